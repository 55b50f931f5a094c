//! Universal enveloping algebras in PBW normal form.
//!
//! Monomials are exponent vectors over an ordered list of generators;
//! products are straightened with `g_l g_q = g_q g_l + [g_l, g_q]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::lie_tensor::{LieAlgebra, LieError, Vector};
use crate::linalg;
use crate::scalarfield::{Context, FieldElement};

pub type Mono = Vec<u32>;
type Terms = BTreeMap<Mono, FieldElement>;

pub const DEFAULT_DEGREE_CAP: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UeaError {
    #[error("elements belong to different enveloping algebras")]
    AlgebraMismatch,
    #[error("degree {0} exceeds the cap {1}")]
    DegreeCap(u32, u32),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("new generators do not form a basis")]
    SingularChange,
    #[error("generator order does not fit the projection: {0}")]
    OrderMisconfigured(String),
    #[error("tensor slot count mismatch")]
    SlotMismatch,
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Enveloping algebra of a Lie algebra with a fixed PBW generator order.
pub struct Uea {
    alg: LieAlgebra,
    names: Vec<String>,
    /// `gens[p]` is the basis index of the generator at PBW position `p`.
    gens: Vec<usize>,
    /// `[g_p, g_q]` in PBW positions.
    table: Vec<Vec<Vec<(usize, FieldElement)>>>,
    cap: u32,
    memo: Mutex<HashMap<(Mono, usize), Terms>>,
}

impl fmt::Debug for Uea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Uea({:?})", self.names)
    }
}

impl Uea {
    /// `order` lists the basis names of `alg` in PBW order.
    pub fn new(alg: LieAlgebra, order: &[&str]) -> Result<Arc<Uea>, UeaError> {
        Self::with_cap(alg, order, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(alg: LieAlgebra, order: &[&str], cap: u32) -> Result<Arc<Uea>, UeaError> {
        let gens: Vec<usize> = order
            .iter()
            .map(|n| alg.index(n).map_err(|_| UeaError::UnknownGenerator(n.to_string())))
            .collect::<Result<_, _>>()?;
        let mut sorted = gens.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != alg.dim() || gens.len() != alg.dim() {
            return Err(UeaError::OrderMisconfigured(
                "order must list every basis element once".into(),
            ));
        }
        let pos_of: BTreeMap<usize, usize> = gens.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let table = gens
            .iter()
            .map(|&i| {
                gens.iter()
                    .map(|&j| {
                        alg.bracket(i, j)
                            .iter()
                            .map(|(k, c)| (pos_of[k], c.clone()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Arc::new(Uea {
            names: order.iter().map(|s| s.to_string()).collect(),
            alg,
            gens,
            table,
            cap,
            memo: Mutex::new(HashMap::new()),
        }))
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn context(&self) -> &Context {
        self.alg.context()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn position(&self, name: &str) -> Result<usize, UeaError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| UeaError::UnknownGenerator(name.to_string()))
    }

    /// Basis index in the Lie algebra of the generator at PBW position `p`.
    pub fn basis_index(&self, p: usize) -> usize {
        self.gens[p]
    }

    /// `m · g_q` in normal form.
    fn mono_times_gen(&self, m: &Mono, q: usize) -> Result<Terms, UeaError> {
        let Some(l) = (q + 1..m.len()).rev().find(|&l| m[l] > 0) else {
            let mut n = m.clone();
            n[q] += 1;
            let deg: u32 = n.iter().sum();
            if deg > self.cap {
                return Err(UeaError::DegreeCap(deg, self.cap));
            }
            return Ok(Terms::from([(n, self.context().one())]));
        };
        let key = (m.clone(), q);
        if let Some(t) = self.memo.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        // m = m' g_l, so m g_q = (m' g_q) g_l + m' [g_l, g_q]
        let mut mp = m.clone();
        mp[l] -= 1;
        let mut out = Terms::new();
        for (mono, c) in self.mono_times_gen(&mp, q)? {
            for (m2, c2) in self.mono_times_gen(&mono, l)? {
                add_into(&mut out, m2, &c * &c2);
            }
        }
        for (k, c) in &self.table[l][q] {
            for (m2, c2) in self.mono_times_gen(&mp, *k)? {
                add_into(&mut out, m2, c * &c2);
            }
        }
        self.memo.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    fn mono_mul(&self, a: &Mono, b: &Mono) -> Result<Terms, UeaError> {
        let mut cur = Terms::from([(a.clone(), self.context().one())]);
        for (q, &e) in b.iter().enumerate() {
            for _ in 0..e {
                let mut next = Terms::new();
                for (m, c) in &cur {
                    for (m2, c2) in self.mono_times_gen(m, q)? {
                        add_into(&mut next, m2, c * &c2);
                    }
                }
                cur = next;
            }
        }
        Ok(cur)
    }
}

fn add_into(t: &mut Terms, m: Mono, c: FieldElement) {
    if c.is_zero() {
        return;
    }
    match t.get_mut(&m) {
        Some(e) => {
            *e = &*e + &c;
            if e.is_zero() {
                t.remove(&m);
            }
        }
        None => {
            t.insert(m, c);
        }
    }
}

/// Element of `Ug` in PBW normal form.
#[derive(Clone)]
pub struct UeaElement {
    uea: Arc<Uea>,
    terms: Terms,
}

impl PartialEq for UeaElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.uea, &other.uea) && self.terms == other.terms
    }
}

impl fmt::Debug for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono = mono_string(&self.uea.names, m);
                match (mono.is_empty(), c.is_one()) {
                    (true, _) => format!("({c})"),
                    (false, true) => mono,
                    (false, false) => format!("({c})*{mono}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn mono_string(names: &[String], m: &Mono) -> String {
    m.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(p, &e)| if e == 1 { names[p].clone() } else { format!("{}^{}", names[p], e) })
        .collect::<Vec<_>>()
        .join("*")
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MonomialTerm {
    pub exp: Vec<u32>,
    pub coeff: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct UeaJson {
    pub gens: Vec<String>,
    pub terms: Vec<MonomialTerm>,
}

impl UeaElement {
    pub fn zero(uea: &Arc<Uea>) -> Self {
        UeaElement {
            uea: uea.clone(),
            terms: Terms::new(),
        }
    }

    pub fn one(uea: &Arc<Uea>) -> Self {
        Self::scalar(uea, uea.context().one())
    }

    pub fn scalar(uea: &Arc<Uea>, c: FieldElement) -> Self {
        Self::from_terms(uea, [(vec![0; uea.ngens()], c)])
    }

    pub fn generator(uea: &Arc<Uea>, name: &str) -> Result<Self, UeaError> {
        let p = uea.position(name)?;
        let mut m = vec![0; uea.ngens()];
        m[p] = 1;
        Ok(Self::from_terms(uea, [(m, uea.context().one())]))
    }

    /// Element of the Lie algebra, given in its basis.
    pub fn from_lie(uea: &Arc<Uea>, v: &Vector) -> Self {
        let mut t = Terms::new();
        for (i, c) in v {
            let p = uea.gens.iter().position(|g| g == i).unwrap();
            let mut m = vec![0; uea.ngens()];
            m[p] = 1;
            add_into(&mut t, m, c.clone());
        }
        UeaElement {
            uea: uea.clone(),
            terms: t,
        }
    }

    /// Terms in normal form; monomials must already be PBW-ordered, which
    /// exponent vectors are by construction.
    pub fn from_terms(uea: &Arc<Uea>, terms: impl IntoIterator<Item = (Mono, FieldElement)>) -> Self {
        let mut t = Terms::new();
        for (m, c) in terms {
            assert_eq!(m.len(), uea.ngens());
            add_into(&mut t, m, c);
        }
        UeaElement {
            uea: uea.clone(),
            terms: t,
        }
    }

    pub fn uea(&self) -> &Arc<Uea> {
        &self.uea
    }

    pub fn terms(&self) -> &BTreeMap<Mono, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    fn same(&self, other: &Self) -> Result<(), UeaError> {
        if Arc::ptr_eq(&self.uea, &other.uea) {
            Ok(())
        } else {
            Err(UeaError::AlgebraMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, UeaError> {
        self.same(other)?;
        let mut t = self.terms.clone();
        for (m, c) in &other.terms {
            add_into(&mut t, m.clone(), c.clone());
        }
        Ok(UeaElement {
            uea: self.uea.clone(),
            terms: t,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).unwrap()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&self.uea.context().int(-1)))
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        Self::from_terms(&self.uea, self.terms.iter().map(|(m, c)| (m.clone(), c * s)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, UeaError> {
        self.same(other)?;
        let mut t = Terms::new();
        for (m2, c2) in &other.terms {
            for (m1, c1) in &self.terms {
                let cc = c1 * c2;
                for (m, c) in self.uea.mono_mul(m1, m2)? {
                    add_into(&mut t, m, &cc * &c);
                }
            }
        }
        Ok(UeaElement {
            uea: self.uea.clone(),
            terms: t,
        })
    }

    /// Panics on algebra mismatch or when the degree cap is exceeded.
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).unwrap()
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(&self.uea), |acc, _| acc.mul(self))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Coefficient of the empty monomial.
    pub fn counit(&self) -> FieldElement {
        self.terms
            .get(&vec![0; self.uea.ngens()])
            .cloned()
            .unwrap_or_else(|| self.uea.context().zero())
    }

    pub fn coproduct(&self) -> TensorUea {
        let mut out = TensorUea::zero(&self.uea, 2);
        for (m, c) in &self.terms {
            for (l, r, k) in split_monomial(m) {
                out.add_term(vec![l, r], c.scale(&k));
            }
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::from_terms(&self.uea, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn to_json(&self) -> UeaJson {
        UeaJson {
            gens: self.uea.names.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| MonomialTerm {
                    exp: m.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    /// Projection onto `Uv` along the left ideal `Ug·h`: drops monomials
    /// with a positive exponent on any of `h_gens`, which must be the last
    /// generators in PBW order.
    pub fn project_pi_v(&self, h_gens: &[&str]) -> Result<Self, UeaError> {
        let mask = trailing_mask(&self.uea, h_gens)?;
        Ok(self.filter(|m| m.iter().zip(&mask).all(|(&e, &h)| !h || e == 0)))
    }

    /// `(·)_0` for `Ug = Uh ⊕ (n₋·Ug + Ug·n₊)`: keeps the monomials in the
    /// Cartan generators only. Requires the order (n₋, h, n₊).
    pub fn project_zero(&self, neg: &[&str], cartan: &[&str], pos: &[&str]) -> Result<Self, UeaError> {
        let names: Vec<&str> = neg.iter().chain(cartan).chain(pos).copied().collect();
        if names.len() != self.uea.ngens()
            || names.iter().zip(&self.uea.names).any(|(a, b)| a != b)
        {
            return Err(UeaError::OrderMisconfigured(
                "expected the order (n-, h, n+)".into(),
            ));
        }
        let (lo, hi) = (neg.len(), neg.len() + cartan.len());
        Ok(self.filter(|m| m.iter().enumerate().all(|(p, &e)| (lo..hi).contains(&p) || e == 0)))
    }

    fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        UeaElement {
            uea: self.uea.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

fn trailing_mask(uea: &Uea, h_gens: &[&str]) -> Result<Vec<bool>, UeaError> {
    let mut mask = vec![false; uea.ngens()];
    for n in h_gens {
        mask[uea.position(n)?] = true;
    }
    let k = h_gens.len();
    if mask[uea.ngens() - k..].iter().any(|b| !b) {
        return Err(UeaError::OrderMisconfigured(
            "ideal generators must come last".into(),
        ));
    }
    Ok(mask)
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `Δ(m) = Σ_j Π C(e_p, j_p) g^j ⊗ g^{e-j}`.
fn split_monomial(m: &Mono) -> Vec<(Mono, Mono, num_rational::BigRational)> {
    let mut out = vec![(vec![], vec![], num_rational::BigRational::from_integer(1.into()))];
    for &e in m {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for (l, r, k) in &out {
            for j in 0..=e {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2.push(j);
                r2.push(e - j);
                next.push((l2, r2, k * num_rational::BigRational::from_integer(binomial(e, j).into())));
            }
        }
        out = next;
    }
    out
}

/// Element of `Ug^{⊗n}` with normal form in each slot.
#[derive(Clone)]
pub struct TensorUea {
    uea: Arc<Uea>,
    slots: usize,
    terms: BTreeMap<Vec<Mono>, FieldElement>,
}

impl PartialEq for TensorUea {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.uea, &other.uea) && self.slots == other.slots && self.terms == other.terms
    }
}

impl fmt::Debug for TensorUea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TensorUea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let slots: Vec<String> = k
                    .iter()
                    .map(|m| {
                        let s = mono_string(&self.uea.names, m);
                        if s.is_empty() {
                            "1".into()
                        } else {
                            s
                        }
                    })
                    .collect();
                format!("({c})*{}", slots.join("⊗"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TensorTerm {
    pub slots: Vec<Vec<u32>>,
    pub coeff: String,
}

impl TensorUea {
    pub fn zero(uea: &Arc<Uea>, slots: usize) -> Self {
        TensorUea {
            uea: uea.clone(),
            slots,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(uea: &Arc<Uea>, slots: usize) -> Self {
        let mut t = Self::zero(uea, slots);
        t.add_term(vec![vec![0; uea.ngens()]; slots], uea.context().one());
        t
    }

    /// `a ⊗ b ⊗ ...`.
    pub fn pure(parts: &[&UeaElement]) -> Self {
        let uea = parts[0].uea.clone();
        let mut out = TensorUea::one(&uea, 0);
        for p in parts {
            assert!(Arc::ptr_eq(&uea, &p.uea));
            let mut next = TensorUea::zero(&uea, out.slots + 1);
            for (k, c) in &out.terms {
                for (m, d) in &p.terms {
                    let mut k2 = k.clone();
                    k2.push(m.clone());
                    next.add_term(k2, c * d);
                }
            }
            out = next;
        }
        out
    }

    pub fn uea(&self) -> &Arc<Uea> {
        &self.uea
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Mono>, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<Mono>, c: FieldElement) {
        debug_assert_eq!(key.len(), self.slots);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), UeaError> {
        if !Arc::ptr_eq(&self.uea, &other.uea) {
            return Err(UeaError::AlgebraMismatch);
        }
        if self.slots != other.slots {
            return Err(UeaError::SlotMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other).unwrap();
        let mut t = self.clone();
        for (k, c) in &other.terms {
            t.add_term(k.clone(), c.clone());
        }
        t
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other).unwrap();
        let mut t = self.clone();
        for (k, c) in &other.terms {
            t.add_term(k.clone(), -c);
        }
        t
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        self.map_coefficients(|c| c * s)
    }

    pub fn map_coefficients(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        let mut t = Self::zero(&self.uea, self.slots);
        for (k, c) in &self.terms {
            t.add_term(k.clone(), f(c));
        }
        t
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, UeaError> {
        self.check(other)?;
        let mut out = Self::zero(&self.uea, self.slots);
        for (k2, c2) in &other.terms {
            for (k1, c1) in &self.terms {
                let mut partial: Vec<(Vec<Mono>, FieldElement)> = vec![(Vec::new(), c1 * c2)];
                for s in 0..self.slots {
                    let prod = self.uea.mono_mul(&k1[s], &k2[s])?;
                    let mut next = Vec::with_capacity(partial.len() * prod.len());
                    for (k, c) in &partial {
                        for (m, d) in &prod {
                            let mut kk = k.clone();
                            kk.push(m.clone());
                            next.push((kk, c * d));
                        }
                    }
                    partial = next;
                }
                for (k, c) in partial {
                    out.add_term(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).unwrap()
    }

    /// Applies the coproduct to slot `s`, producing `slots + 1` slots.
    pub fn coproduct_slot(&self, s: usize) -> Self {
        let mut out = Self::zero(&self.uea, self.slots + 1);
        for (k, c) in &self.terms {
            for (l, r, q) in split_monomial(&k[s]) {
                let mut k2 = k[..s].to_vec();
                k2.push(l);
                k2.push(r);
                k2.extend_from_slice(&k[s + 1..]);
                out.add_term(k2, c.scale(&q));
            }
        }
        out
    }

    /// Applies the counit to slot `s`.
    pub fn counit_slot(&self, s: usize) -> Self {
        let mut out = Self::zero(&self.uea, self.slots - 1);
        for (k, c) in &self.terms {
            if k[s].iter().all(|&e| e == 0) {
                let mut k2 = k.clone();
                k2.remove(s);
                out.add_term(k2, c.clone());
            }
        }
        out
    }

    /// Inserts `1` as a new slot at position `s`.
    pub fn insert_unit(&self, s: usize) -> Self {
        let mut out = Self::zero(&self.uea, self.slots + 1);
        for (k, c) in &self.terms {
            let mut k2 = k.clone();
            k2.insert(s, vec![0; self.uea.ngens()]);
            out.add_term(k2, c.clone());
        }
        out
    }

    /// Slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(&self.uea, self.slots);
        for (k, c) in &self.terms {
            out.add_term(perm.iter().map(|&p| k[p].clone()).collect(), c.clone());
        }
        out
    }

    /// Applies a linear map on `Ug` slot by slot (one monomial at a time).
    pub fn map_slots(&self, target: &Arc<Uea>, f: impl Fn(&Mono) -> Result<UeaElement, UeaError>) -> Result<Self, UeaError> {
        let mut cache: HashMap<Mono, UeaElement> = HashMap::new();
        let mut out = TensorUea::zero(target, self.slots);
        for (k, c) in &self.terms {
            let mut partial: Vec<(Vec<Mono>, FieldElement)> = vec![(Vec::new(), c.clone())];
            for m in k {
                if !cache.contains_key(m) {
                    cache.insert(m.clone(), f(m)?);
                }
                let img = &cache[m];
                let mut next = Vec::new();
                for (kk, cc) in &partial {
                    for (m2, d) in &img.terms {
                        let mut k2 = kk.clone();
                        k2.push(m2.clone());
                        next.push((k2, cc * d));
                    }
                }
                partial = next;
            }
            for (k2, c2) in partial {
                out.add_term(k2, c2);
            }
        }
        Ok(out)
    }

    /// Projection along `Ug·h` in every slot.
    pub fn project_pi_v(&self, h_gens: &[&str]) -> Result<Self, UeaError> {
        let mask = trailing_mask(&self.uea, h_gens)?;
        let mut out = Self::zero(&self.uea, self.slots);
        for (k, c) in &self.terms {
            if k.iter().all(|m| m.iter().zip(&mask).all(|(&e, &h)| !h || e == 0)) {
                out.add_term(k.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Vec<TensorTerm> {
        self.terms
            .iter()
            .map(|(k, c)| TensorTerm {
                slots: k.clone(),
                coeff: c.to_string(),
            })
            .collect()
    }
}

/// Change of generators: a new basis given by its expansion in the old one.
pub struct BasisChange {
    pub old: Arc<Uea>,
    pub new: Arc<Uea>,
    /// Old generators (in PBW order) as Lie elements of the new algebra.
    old_in_new: Vec<UeaElement>,
    /// New generators (in PBW order) as Lie elements of the old algebra.
    new_in_old: Vec<UeaElement>,
}

impl BasisChange {
    /// `new_gens[i] = (name, expansion in the old algebra's basis)`; the new
    /// PBW order is the listed order.
    pub fn new(old: &Arc<Uea>, new_gens: &[(&str, Vector)]) -> Result<BasisChange, UeaError> {
        let old_alg = old.algebra();
        let ctx = old_alg.context().clone();
        let d = old_alg.dim();
        if new_gens.len() != d {
            return Err(UeaError::SingularChange);
        }
        // rows: new generator coordinates in the old basis
        let mut m = vec![vec![ctx.zero(); d]; d];
        for (i, (_, v)) in new_gens.iter().enumerate() {
            for (j, c) in v {
                m[i][*j] = &m[i][*j] + c;
            }
        }
        let inv = linalg::inverse(&m).ok_or(UeaError::SingularChange)?;
        let names: Vec<&str> = new_gens.iter().map(|(n, _)| *n).collect();
        let to_new = |v: &Vector| -> Vector {
            // v = Σ v_j old_j and old_j = Σ inv[j][i] new_i
            let mut out = BTreeMap::new();
            for (j, c) in v {
                for (i, e) in inv[*j].iter().enumerate() {
                    if !e.is_zero() {
                        let x = out.entry(i).or_insert_with(|| ctx.zero());
                        *x = &*x + &(c * e);
                    }
                }
            }
            out.into_iter().filter(|(_, c): &(usize, FieldElement)| !c.is_zero()).collect()
        };
        let mut brackets = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let b = old_alg.bracket_vectors(&new_gens[i].1, &new_gens[j].1);
                brackets.push((i, j, to_new(&b)));
            }
        }
        let form = match old_alg.form() {
            Some(_) => Some(
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| old_alg.pair(&new_gens[i].1, &new_gens[j].1).unwrap())
                            .collect()
                    })
                    .collect(),
            ),
            None => None,
        };
        let new_alg = LieAlgebra::new(&ctx, &names, &brackets, form)?;
        let new = Uea::with_cap(new_alg, &names, old.cap)?;
        let old_in_new = (0..d)
            .map(|p| {
                let j = old.basis_index(p);
                UeaElement::from_lie(&new, &to_new(&vec![(j, ctx.one())]))
            })
            .collect();
        let new_in_old = new_gens
            .iter()
            .map(|(_, v)| UeaElement::from_lie(old, v))
            .collect();
        Ok(BasisChange {
            old: old.clone(),
            new,
            old_in_new,
            new_in_old,
        })
    }

    fn rewrite(m: &Mono, target: &Arc<Uea>, images: &[UeaElement]) -> UeaElement {
        let mut acc = UeaElement::one(target);
        for (p, &e) in m.iter().enumerate() {
            for _ in 0..e {
                acc = acc.mul(&images[p]);
            }
        }
        acc
    }

    pub fn mono_to_new(&self, m: &Mono) -> UeaElement {
        Self::rewrite(m, &self.new, &self.old_in_new)
    }

    pub fn mono_to_old(&self, m: &Mono) -> UeaElement {
        Self::rewrite(m, &self.old, &self.new_in_old)
    }

    pub fn to_new(&self, u: &UeaElement) -> Result<UeaElement, UeaError> {
        if !Arc::ptr_eq(u.uea(), &self.old) {
            return Err(UeaError::AlgebraMismatch);
        }
        Ok(self.convert(u, &self.new, |m| self.mono_to_new(m)))
    }

    pub fn to_old(&self, u: &UeaElement) -> Result<UeaElement, UeaError> {
        if !Arc::ptr_eq(u.uea(), &self.new) {
            return Err(UeaError::AlgebraMismatch);
        }
        Ok(self.convert(u, &self.old, |m| self.mono_to_old(m)))
    }

    fn convert(&self, u: &UeaElement, target: &Arc<Uea>, f: impl Fn(&Mono) -> UeaElement) -> UeaElement {
        let mut acc = UeaElement::zero(target);
        for (m, c) in u.terms() {
            acc = acc.add(&f(m).scale(c));
        }
        acc
    }

    pub fn tensor_to_new(&self, t: &TensorUea) -> Result<TensorUea, UeaError> {
        if !Arc::ptr_eq(t.uea(), &self.old) {
            return Err(UeaError::AlgebraMismatch);
        }
        t.map_slots(&self.new, |m| Ok(self.mono_to_new(m)))
    }

    pub fn tensor_to_old(&self, t: &TensorUea) -> Result<TensorUea, UeaError> {
        if !Arc::ptr_eq(t.uea(), &self.new) {
            return Err(UeaError::AlgebraMismatch);
        }
        t.map_slots(&self.old, |m| Ok(self.mono_to_old(m)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> (Context, Arc<Uea>) {
        let c = Context::new(&["lambda"]);
        let u = Uea::new(LieAlgebra::sl2(&c), &["y", "h", "x"]).unwrap();
        (c, u)
    }

    fn gen(u: &Arc<Uea>, n: &str) -> UeaElement {
        UeaElement::generator(u, n).unwrap()
    }

    fn casimir(c: &Context, u: &Arc<Uea>) -> UeaElement {
        let (x, y, h) = (gen(u, "x"), gen(u, "y"), gen(u, "h"));
        x.mul(&y).add(&y.mul(&x)).add(&h.mul(&h).scale(&c.frac(1, 2)))
    }

    #[test]
    fn straightening_examples() {
        let (c, u) = sl2();
        let (x, y, h) = (gen(&u, "x"), gen(&u, "y"), gen(&u, "h"));
        let xy = x.mul(&y);
        let want = UeaElement::from_terms(&u, [(vec![1, 0, 1], c.one()), (vec![0, 1, 0], c.one())]);
        assert_eq!(xy, want);
        assert_eq!(UeaElement::one(&u).mul(&xy), xy);
        let cas = casimir(&c, &u);
        for g in [&x, &y, &h] {
            assert!(cas.commutator(g).is_zero());
        }
        // generators reproduce the bracket
        assert_eq!(h.commutator(&x), x.scale(&c.int(2)));
        assert_eq!(h.commutator(&y), y.scale(&c.int(-2)));
        assert_eq!(x.commutator(&y), h);
    }

    #[test]
    fn coproduct_and_counit() {
        let (c, u) = sl2();
        let y = gen(&u, "y");
        let one = UeaElement::one(&u);
        assert_eq!(y.coproduct(), TensorUea::pure(&[&y, &one]).add(&TensorUea::pure(&[&one, &y])));
        let y2 = y.mul(&y);
        let want = TensorUea::pure(&[&y2, &one])
            .add(&TensorUea::pure(&[&y, &y]).scale(&c.int(2)))
            .add(&TensorUea::pure(&[&one, &y2]));
        assert_eq!(y2.coproduct(), want);
        let x = gen(&u, "x");
        let d = x.coproduct();
        assert_eq!(d.coproduct_slot(0), d.coproduct_slot(1));

        assert!(one.counit().is_one());
        assert!(y.counit().is_zero());
        assert_eq!(UeaElement::scalar(&u, c.int(3)).add(&y.mul(&x)).counit(), c.int(3));
    }

    #[test]
    fn hopf_compatibility() {
        let (_, u) = sl2();
        let (x, y, h) = (gen(&u, "x"), gen(&u, "y"), gen(&u, "h"));
        let a = x.mul(&y).add(&h);
        let b = y.mul(&h).mul(&x);
        assert_eq!(a.mul(&b).coproduct(), a.coproduct().mul(&b.coproduct()));
        // (ε ⊗ id) Δ = id
        let dab = a.mul(&b).coproduct();
        let back = dab.counit_slot(0);
        assert_eq!(back, TensorUea::pure(&[&a.mul(&b)]));
    }

    #[test]
    fn change_of_generators() {
        let (c, u) = sl2();
        let alg = u.algebra();
        let (x, y, h) = (alg.index("x").unwrap(), alg.index("y").unwrap(), alg.index("h").unwrap());
        let half = c.frac(1, 2);
        let ch = BasisChange::new(
            &u,
            &[
                ("b", vec![(y, c.one()), (h, half.clone())]),
                ("a", vec![(x, c.one()), (h, -&half)]),
                ("c", vec![(h, -&half)]),
            ],
        )
        .unwrap();
        let (b, a, cc) = (gen(&ch.new, "b"), gen(&ch.new, "a"), gen(&ch.new, "c"));
        assert_eq!(ch.to_new(&gen(&u, "y")).unwrap(), b.add(&cc));
        assert_eq!(ch.to_new(&gen(&u, "x")).unwrap(), a.sub(&cc));
        assert_eq!(cc.commutator(&b), b.add(&cc));
        assert_eq!(b.commutator(&a), a.sub(&b));
        let e = gen(&u, "y").pow(2).mul(&gen(&u, "x"));
        assert_eq!(ch.to_old(&ch.to_new(&e).unwrap()).unwrap(), e);
        assert!(BasisChange::new(&u, &[("p", vec![(h, c.one())]), ("q", vec![(h, c.one())]), ("r", vec![(x, c.one())])]).is_err());
    }

    #[test]
    fn projections() {
        let (c, u) = sl2();
        let alg = u.algebra();
        let (x, y, h) = (alg.index("x").unwrap(), alg.index("y").unwrap(), alg.index("h").unwrap());
        let half = c.frac(1, 2);
        let ch = BasisChange::new(
            &u,
            &[
                ("b", vec![(y, c.one()), (h, half.clone())]),
                ("a", vec![(x, c.one()), (h, -&half)]),
                ("c", vec![(h, -&half)]),
            ],
        )
        .unwrap();
        let b = gen(&ch.new, "b");
        let yv = ch.to_new(&gen(&u, "y")).unwrap();
        assert_eq!(yv.project_pi_v(&["c"]).unwrap(), b);
        let y2 = ch.to_new(&gen(&u, "y").pow(2)).unwrap();
        assert_eq!(y2.project_pi_v(&["c"]).unwrap(), b.mul(&b).add(&b));
        assert!(y2.project_pi_v(&["b"]).is_err());

        let xy = gen(&u, "x").mul(&gen(&u, "y"));
        assert_eq!(xy.project_zero(&["y"], &["h"], &["x"]).unwrap(), gen(&u, "h"));
        assert!(xy.project_zero(&["x"], &["h"], &["y"]).is_err());
    }
}
