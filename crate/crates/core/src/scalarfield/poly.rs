//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with variable 0 most significant. The leading term of
//! a polynomial is therefore the last entry of the map.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector, one entry per declared parameter.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), BigRational::one());
        p
    }

    pub fn from_term(m: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero(m.0.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    /// The constant value, if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).min().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.involves(v)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul_term(&self, mono: &Monomial, s: &BigRational) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c * s))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.terms.len() < other.terms.len() {
            return other.mul(self);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero(self.nvars);
        for (m2, c2) in &other.terms {
            for (m1, c1) in &self.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[var] -= 1;
                out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) if lc.is_one() => self.clone(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    /// Exact division. Returns `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "exact_div by zero polynomial");
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.terms.last_key_value().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&m) {
                return None;
            }
            let qm = lm.div_into(&m);
            let qc = &c / &lc;
            for (dm, dc) in &d.terms {
                rem.add_term(dm.mul(&qm), -(dc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Coefficients as a polynomial in `var`: entry `k` multiplies `var^k`
    /// and is free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out[k].add_term(m2, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(var: usize, coeffs: &[Poly], nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                let mut m2 = m.clone();
                m2.0[var] += k as u32;
                out.add_term(m2, c.clone());
            }
        }
        out
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of the (integer) numerators, assuming all coefficients are integers.
    pub fn integer_content(&self) -> BigInt {
        use num_integer::Integer;
        self.terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }

    /// Integer-coefficient primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = BigRational::from_integer(self.denominator_lcm());
        let p = self.scale(&l);
        let mut c = p.integer_content();
        if !p.sign_of_leading() {
            c = -c;
        }
        p.scale(&BigRational::from_integer(c).recip())
    }

    /// Substitutes `point[w]` for every variable `w != var`, returning the
    /// dense coefficient list in `var`.
    fn image_in(&self, var: usize, point: &[BigInt]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (w, &e) in m.0.iter().enumerate() {
                if w != var && e > 0 {
                    v *= BigRational::from_integer(num_traits::pow(point[w].clone(), e as usize));
                }
            }
            out[m.0[var] as usize] += v;
        }
        out
    }

    pub fn sign_of_leading(&self) -> bool {
        self.leading().map_or(true, |(_, c)| !c.is_negative())
    }
}

/// Monic greatest common divisor over Q.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if a == b {
        return a.monic();
    }
    if a.is_monomial() {
        return monomial_gcd(a, b);
    }
    if b.is_monomial() {
        return monomial_gcd(b, a);
    }

    let vars: Vec<usize> = (0..n).filter(|&v| a.involves(v) || b.involves(v)).collect();
    if vars.len() == 1 {
        return univariate_gcd(a, b, vars[0]);
    }
    if certainly_coprime(a, b, &vars) {
        return Poly::one(n);
    }
    let a = &a.primitive();
    let b = &b.primitive();

    // Pull out the common monomial factor first; it keeps the PRS small.
    let ma = min_monomial(a);
    let mb = min_monomial(b);
    let mg = Monomial(ma.0.iter().zip(&mb.0).map(|(x, y)| *x.min(y)).collect());
    let a = a.exact_div(&Poly::from_term(ma, BigRational::one())).unwrap();
    let b = b.exact_div(&Poly::from_term(mb, BigRational::one())).unwrap();
    let mono = Poly::from_term(mg, BigRational::one());

    let v = vars[0];
    let g = if !a.involves(v) {
        gcd_many(b.coefficients_in(v).iter().chain(std::iter::once(&a)))
    } else if !b.involves(v) {
        gcd_many(a.coefficients_in(v).iter().chain(std::iter::once(&b)))
    } else {
        let ca = a.coefficients_in(v);
        let cb = b.coefficients_in(v);
        let cont_a = gcd_many(ca.iter());
        let cont_b = gcd_many(cb.iter());
        let pa: Vec<Poly> = ca.iter().map(|c| c.exact_div(&cont_a).unwrap()).collect();
        let pb: Vec<Poly> = cb.iter().map(|c| c.exact_div(&cont_b).unwrap()).collect();
        let content = gcd(&cont_a, &cont_b);
        let prim = subresultant_gcd(pa, pb);
        content.mul(&Poly::from_coefficients_in(v, &prim, n))
    };
    mono.mul(&g).monic()
}

/// Evaluation certificate: if for every variable `v` the images of `a` and
/// `b` at a point keeping both leading coefficients in `v` nonzero have a
/// constant gcd, then the true gcd has degree 0 in every variable.
fn certainly_coprime(a: &Poly, b: &Poly, vars: &[usize]) -> bool {
    const POINTS: [[i64; 4]; 3] = [[3, 7, 11, 2], [5, -2, 13, 17], [-4, 9, 6, -11]];
    let n = a.nvars;
    'var: for &v in vars {
        if !a.involves(v) || !b.involves(v) {
            // the gcd divides a coefficient of the other; handled by the full path
            return false;
        }
        let la = &a.coefficients_in(v)[a.degree_in(v) as usize];
        let lb = &b.coefficients_in(v)[b.degree_in(v) as usize];
        for (k, base) in POINTS.iter().enumerate() {
            let point: Vec<BigInt> = (0..n)
                .map(|w| BigInt::from(base[w % 4] + 19 * (w / 4) as i64 + k as i64))
                .collect();
            let nonzero = |p: &Poly| {
                let im = p.image_in(v, &point);
                !im[0].is_zero()
            };
            if !nonzero(la) || !nonzero(lb) {
                continue;
            }
            let ia = a.image_in(v, &point);
            let ib = b.image_in(v, &point);
            let mut x = ia;
            let mut y = ib;
            trim_r(&mut x);
            trim_r(&mut y);
            if x.len() < y.len() {
                std::mem::swap(&mut x, &mut y);
            }
            while !(y.len() == 1 && y[0].is_zero()) {
                let r = urem(&x, &y);
                x = y;
                y = r;
            }
            if x.len() == 1 {
                continue 'var;
            }
            return false;
        }
        return false;
    }
    true
}

fn min_monomial(p: &Poly) -> Monomial {
    Monomial((0..p.nvars).map(|v| p.min_degree_in(v)).collect())
}

fn monomial_gcd(mono: &Poly, other: &Poly) -> Poly {
    let (m, _) = mono.leading().unwrap();
    let e = (0..mono.nvars)
        .map(|v| m.0[v].min(other.min_degree_in(v)))
        .collect();
    Poly::from_term(Monomial(e), BigRational::one())
}

fn gcd_many<'a>(polys: impl Iterator<Item = &'a Poly>) -> Poly {
    let mut acc: Option<Poly> = None;
    for p in polys {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.monic(),
            Some(g) => gcd(&g, p),
        });
        if acc.as_ref().unwrap().is_one() {
            break;
        }
    }
    acc.unwrap_or_else(|| Poly::zero(0))
}

fn univariate_gcd(a: &Poly, b: &Poly, v: usize) -> Poly {
    let n = a.nvars;
    let to_vec = |p: &Poly| -> Vec<BigRational> {
        p.coefficients_in(v)
            .iter()
            .map(|c| c.as_constant().unwrap())
            .collect()
    };
    let mut x = to_vec(a);
    let mut y = to_vec(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !(y.len() == 1 && y[0].is_zero()) && !y.is_empty() {
        let r = urem(&x, &y);
        x = y;
        y = r;
    }
    let lc = x.last().unwrap().clone();
    let coeffs: Vec<Poly> = x
        .iter()
        .map(|c| Poly::constant(n, c / &lc))
        .collect();
    Poly::from_coefficients_in(v, &coeffs, n)
}

fn trim_r(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
}

fn urem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lcb = b[db].clone();
    trim_r(&mut r);
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let f = &r[dr] / &lcb;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &f * bc;
        }
        r.pop();
        trim_r(&mut r);
        if r.is_empty() {
            r.push(BigRational::zero());
        }
    }
    if r.is_empty() {
        r.push(BigRational::zero());
    }
    r
}

fn trim(v: &mut Vec<Poly>) {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
}

fn is_zero_list(v: &[Poly]) -> bool {
    v.iter().all(Poly::is_zero)
}

fn deg(v: &[Poly]) -> usize {
    v.len() - 1
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = deg(b);
    let lcb = b[db].clone();
    let mut r = a.to_vec();
    trim(&mut r);
    let mut e = (deg(&r) + 1).saturating_sub(db) as u32;
    while !is_zero_list(&r) && deg(&r) >= db {
        let dr = deg(&r);
        let lcr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(&lcb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.mul(&lcr));
        }
        next.pop();
        if next.is_empty() {
            next.push(Poly::zero(lcb.nvars()));
        }
        trim(&mut next);
        r = next;
        e = e.saturating_sub(1);
        if dr == 0 {
            break;
        }
    }
    if e > 0 {
        let f = lcb.pow(e);
        r = r.iter().map(|c| c.mul(&f)).collect();
    }
    r
}

/// Primitive gcd of two primitive univariate polynomials with multivariate
/// coefficients, via the subresultant polynomial remainder sequence.
fn subresultant_gcd(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let nv = a[0].nvars();
    let (mut a, mut b) = if deg(&a) >= deg(&b) { (a, b) } else { (b, a) };
    let mut g = Poly::one(nv);
    let mut h = Poly::one(nv);
    loop {
        let d = (deg(&a) - deg(&b)) as u32;
        let r = prem(&a, &b);
        if is_zero_list(&r) {
            break;
        }
        if deg(&r) == 0 {
            return vec![Poly::one(nv)];
        }
        let denom = g.mul(&h.pow(d));
        let next: Vec<Poly> = r
            .iter()
            .map(|c| c.exact_div(&denom).expect("subresultant division is exact"))
            .collect();
        a = b;
        b = next;
        g = a[deg(&a)].clone();
        h = match d {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(d)
                .exact_div(&h.pow(d - 1))
                .expect("subresultant h-update is exact"),
        };
    }
    let cont = gcd_many(b.iter());
    b.iter().map(|c| c.exact_div(&cont).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn grlex_leading_term() {
        let p = x(0).add(&x(1).pow(2));
        assert_eq!(p.leading().unwrap().0 .0, vec![0, 2, 0]);
        let p = x(0).mul(&x(2)).add(&x(1).pow(2));
        assert_eq!(p.leading().unwrap().0 .0, vec![1, 0, 1]);
    }

    #[test]
    fn exact_division_roundtrip() {
        let a = x(0).add(&x(1)).add(&Poly::constant(3, q(3)));
        let b = x(0).sub(&x(2).pow(2));
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert!(prod.add(&Poly::one(3)).exact_div(&b).is_none());
    }

    #[test]
    fn multivariate_gcd_recovers_common_factor() {
        let common = x(0).mul(&x(1)).sub(&Poly::constant(3, q(2)));
        let a = common.mul(&x(0).add(&x(2)));
        let b = common.mul(&x(1).pow(2).add(&Poly::one(3)));
        assert_eq!(gcd(&a, &b), common.monic());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = x(0).add(&x(1));
        let b = x(0).sub(&x(1));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_with_monomial_factor() {
        let a = x(0).pow(2).mul(&x(1));
        let b = x(0).mul(&x(1).add(&Poly::one(3)));
        assert_eq!(gcd(&a, &b), x(0));
    }
}
