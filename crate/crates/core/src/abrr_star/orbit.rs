//! Polynomial functions on SL(2) in the matrix coordinates, and the
//! star-product induced by the ABRR twist on the right `H`-invariant ones.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{AbrrError, TwistSeries, HBAR, LAMBDA};
use crate::linalg;
use crate::lie_tensor::{LieAlgebra, Vector};
use crate::scalarfield::{Context, FieldElement};
use crate::uea::{Uea, UeaElement};

/// Exponents of `g11, g12, g21, g22`.
pub type GMono = [u32; 4];

const G11: usize = 0;
const G22: usize = 3;

/// Polynomial in the matrix coordinates, normalized modulo
/// `g11 g22 − g12 g21 − 1` by rewriting `g11 g22 → g12 g21 + 1`.
#[derive(Clone, PartialEq)]
pub struct OrbitFunction {
    ctx: Context,
    terms: BTreeMap<GMono, FieldElement>,
}

impl fmt::Debug for OrbitFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for OrbitFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["g11", "g12", "g21", "g22"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { names[i].to_string() } else { format!("{}^{}", names[i], e) })
                    .collect();
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OrbitTerm {
    pub exp: GMono,
    pub coeff: String,
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl OrbitFunction {
    pub fn zero(ctx: &Context) -> Self {
        OrbitFunction {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Context, c: FieldElement) -> Self {
        Self::from_terms(ctx, [([0; 4], c)])
    }

    /// Coordinate `g_{kl}` with `k, l ∈ {1, 2}`.
    pub fn coordinate(ctx: &Context, k: usize, l: usize) -> Self {
        let mut m = [0; 4];
        m[(k - 1) * 2 + (l - 1)] = 1;
        Self::from_terms(ctx, [(m, ctx.one())])
    }

    pub fn from_terms(ctx: &Context, terms: impl IntoIterator<Item = (GMono, FieldElement)>) -> Self {
        let mut out = Self::zero(ctx);
        for (m, c) in terms {
            out.add_reduced(m, c);
        }
        out
    }

    fn add_raw(&mut self, m: GMono, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Adds `c·m` after rewriting `(g11 g22)^a = (g12 g21 + 1)^a`.
    fn add_reduced(&mut self, m: GMono, c: FieldElement) {
        let a = m[G11].min(m[G22]);
        if a == 0 {
            self.add_raw(m, c);
            return;
        }
        for i in 0..=a {
            let k = binomial(a, i);
            let n = [m[0] - a, m[1] + i, m[2] + i, m[3] - a];
            self.add_raw(n, c.scale(&num_rational::BigRational::from_integer(k.into())));
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<GMono, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_raw(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_raw(*m, -c);
        }
        out
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            out.add_raw(*m, c * s);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = [m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3]];
                out.add_reduced(m, c1 * c2);
            }
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::from_terms(&self.ctx, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Value at a point of SL(2) given by its four entries.
    pub fn evaluate(&self, g: [&FieldElement; 4]) -> FieldElement {
        let mut acc = self.ctx.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..4 {
                for _ in 0..m[i] {
                    t = &t * g[i];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// `Σ_{kl} w_{kl}(g) ∂f/∂g_{kl}` with `w` linear in `g`, given as
    /// `(target kl, source coordinate, coefficient)` triples.
    fn derivation(&self, field: &[(usize, usize, FieldElement)]) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            for (kl, src, w) in field {
                let e = m[*kl];
                if e == 0 {
                    continue;
                }
                let mut n = *m;
                n[*kl] -= 1;
                n[*src] += 1;
                out.add_reduced(n, &(c * w) * &self.ctx.int(e as i64));
            }
        }
        out
    }

    pub fn to_json(&self) -> Vec<OrbitTerm> {
        self.terms
            .iter()
            .map(|(m, c)| OrbitTerm {
                exp: *m,
                coeff: c.to_string(),
            })
            .collect()
    }
}

/// 2×2 matrix of an element of sl(2) given in the basis `x, y, h`.
pub fn sl2_matrix(alg: &LieAlgebra, v: &Vector) -> [[FieldElement; 2]; 2] {
    let ctx = alg.context();
    let mut m = [[ctx.zero(), ctx.zero()], [ctx.zero(), ctx.zero()]];
    for (i, c) in v {
        match alg.names()[*i].as_str() {
            "x" => m[0][1] = &m[0][1] + c,
            "y" => m[1][0] = &m[1][0] + c,
            "h" => {
                m[0][0] = &m[0][0] + c;
                m[1][1] = &m[1][1] - c;
            }
            other => panic!("not an sl(2) basis name: {other}"),
        }
    }
    m
}

/// Left-invariant field: `(g v)_{kl} = Σ_m g_{km} v_{ml}`.
fn left_field(v: &[[FieldElement; 2]; 2]) -> Vec<(usize, usize, FieldElement)> {
    let mut f = Vec::new();
    for k in 0..2 {
        for l in 0..2 {
            for m in 0..2 {
                if !v[m][l].is_zero() {
                    f.push((k * 2 + l, k * 2 + m, v[m][l].clone()));
                }
            }
        }
    }
    f
}

/// Generator of left translations: `−(v g)_{kl} = −Σ_m v_{km} g_{ml}`.
fn right_field(v: &[[FieldElement; 2]; 2]) -> Vec<(usize, usize, FieldElement)> {
    let mut f = Vec::new();
    for k in 0..2 {
        for l in 0..2 {
            for m in 0..2 {
                if !v[k][m].is_zero() {
                    f.push((k * 2 + l, m * 2 + l, -&v[k][m]));
                }
            }
        }
    }
    f
}

/// Star-product data: `U(sl2)` plus the orbit parameter.
pub struct Sl2Functions {
    uea: Arc<Uea>,
    /// Fields of the PBW generators, in PBW position order.
    fields: Vec<Vec<(usize, usize, FieldElement)>>,
    pos: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarMode {
    /// Coefficients in `Q(λ, ħ)`; the series terminates on polynomials.
    Formal,
    /// `ħ = 1`.
    HbarOne,
}

impl Sl2Functions {
    pub fn new(uea: &Arc<Uea>) -> Result<Self, AbrrError> {
        let alg = uea.algebra();
        let fields = (0..uea.ngens())
            .map(|p| left_field(&sl2_matrix(alg, &vec![(uea.basis_index(p), uea.context().one())])))
            .collect();
        Ok(Sl2Functions {
            uea: uea.clone(),
            fields,
            pos: [uea.position("x")?, uea.position("y")?, uea.position("h")?],
        })
    }

    pub fn uea(&self) -> &Arc<Uea> {
        &self.uea
    }

    pub fn context(&self) -> &Context {
        self.uea.context()
    }

    fn algebra(&self) -> &LieAlgebra {
        self.uea.algebra()
    }

    /// `f_a(g) = (λ/2)⟨g h g^{-1}, a⟩`.
    pub fn orbit_function(&self, a: &Vector) -> OrbitFunction {
        let ctx = self.context();
        let gm = |k, l| OrbitFunction::coordinate(ctx, k, l);
        // g h adj(g) = [[g11g22 + g12g21, −2 g11g12], [2 g21g22, −(g11g22 + g12g21)]]
        let d = gm(1, 1).mul(&gm(2, 2)).add(&gm(1, 2).mul(&gm(2, 1)));
        let m12 = gm(1, 1).mul(&gm(1, 2)).scale(&ctx.int(-2));
        let m21 = gm(2, 1).mul(&gm(2, 2)).scale(&ctx.int(2));
        let am = sl2_matrix(self.algebra(), a);
        // tr(M a) = M11 a11 + M12 a21 + M21 a12 + M22 a22, with M22 = −M11
        let tr = d
            .scale(&(&am[0][0] - &am[1][1]))
            .add(&m12.scale(&am[1][0]))
            .add(&m21.scale(&am[0][1]));
        let half_lambda = &ctx.var(LAMBDA).expect("lambda") * &ctx.frac(1, 2);
        tr.scale(&half_lambda)
    }

    pub fn basis_function(&self, name: &str) -> Result<OrbitFunction, AbrrError> {
        let i = self.algebra().index(name)?;
        Ok(self.orbit_function(&vec![(i, self.context().one())]))
    }

    /// Left-invariant field of a Lie algebra element.
    pub fn vector_field(&self, v: &Vector, f: &OrbitFunction) -> OrbitFunction {
        f.derivation(&left_field(&sl2_matrix(self.algebra(), v)))
    }

    /// Infinitesimal left translation by `v`; commutes with every
    /// left-invariant operator.
    pub fn translation_field(&self, v: &Vector, f: &OrbitFunction) -> OrbitFunction {
        f.derivation(&right_field(&sl2_matrix(self.algebra(), v)))
    }

    fn gen_power(&self, p: usize, e: u32, f: &OrbitFunction) -> OrbitFunction {
        (0..e).fold(f.clone(), |acc, _| acc.derivation(&self.fields[p]))
    }

    /// Left-invariant operator of `u ∈ U(sl2)`; the rightmost factor acts first.
    pub fn invariant_derivative(&self, u: &UeaElement, f: &OrbitFunction) -> OrbitFunction {
        let mut out = OrbitFunction::zero(self.context());
        for (m, c) in u.terms() {
            let mut g = f.clone();
            for p in (0..m.len()).rev() {
                g = self.gen_power(p, m[p], &g);
            }
            out = out.add(&g.scale(c));
        }
        out
    }

    pub fn is_h_invariant(&self, f: &OrbitFunction) -> bool {
        self.gen_power(self.pos[2], 1, f).is_zero()
    }

    /// `Σ_n (−1)^n ħ^n / (n! λ(λ−ħ)…(λ−(n−1)ħ)) (→y^n f1)(→x^n f2)`.
    pub fn star(&self, f1: &OrbitFunction, f2: &OrbitFunction, mode: StarMode) -> Result<OrbitFunction, AbrrError> {
        if !self.is_h_invariant(f1) || !self.is_h_invariant(f2) {
            return Err(AbrrError::NotHInvariant);
        }
        let ctx = self.context();
        let lambda = ctx.var(LAMBDA)?;
        let hbar = match mode {
            StarMode::Formal => ctx.var(HBAR)?,
            StarMode::HbarOne => ctx.one(),
        };
        let mut out = f1.mul(f2);
        let (mut a, mut b) = (f1.clone(), f2.clone());
        let mut coeff = ctx.one();
        let mut n = 0i64;
        loop {
            a = self.gen_power(self.pos[1], 1, &a);
            b = self.gen_power(self.pos[0], 1, &b);
            if a.is_zero() || b.is_zero() {
                break;
            }
            let denom = &(&lambda - &(&hbar * &ctx.int(n))) * &ctx.int(n + 1);
            coeff = &(&coeff * &(-&hbar)) / &denom;
            out = out.add(&a.mul(&b).scale(&coeff));
            n += 1;
        }
        Ok(out)
    }

    /// `m(→J(f1 ⊗ f2))` order by order in `ħ`, with the full (h-dependent)
    /// coefficients of the series.
    pub fn apply_twist(&self, j: &TwistSeries, f1: &OrbitFunction, f2: &OrbitFunction) -> Vec<OrbitFunction> {
        j.coeffs
            .iter()
            .map(|t| {
                let mut acc = OrbitFunction::zero(self.context());
                let mut cache: BTreeMap<(usize, Vec<u32>), OrbitFunction> = BTreeMap::new();
                for (key, c) in t.terms() {
                    let mut parts = Vec::with_capacity(2);
                    for (s, f) in [f1, f2].into_iter().enumerate() {
                        let k = (s, key[s].clone());
                        if !cache.contains_key(&k) {
                            let mono = UeaElement::from_terms(&self.uea, [(key[s].clone(), self.context().one())]);
                            cache.insert(k.clone(), self.invariant_derivative(&mono, f));
                        }
                        parts.push(cache[&k].clone());
                    }
                    acc = acc.add(&parts[0].mul(&parts[1]).scale(c));
                }
                acc
            })
            .collect()
    }

    /// `F(u)` for `u ∈ U(sl2)`: generators go to `f_a`, products to `⋆` at `ħ = 1`.
    pub fn quantization_map(&self, u: &UeaElement) -> Result<OrbitFunction, AbrrError> {
        let ctx = self.context();
        let gens: Vec<OrbitFunction> = (0..self.uea.ngens())
            .map(|p| self.orbit_function(&vec![(self.uea.basis_index(p), ctx.one())]))
            .collect();
        let mut out = OrbitFunction::zero(ctx);
        for (m, c) in u.terms() {
            let mut acc = OrbitFunction::constant(ctx, ctx.one());
            for (p, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    acc = self.star(&acc, &gens[p], StarMode::HbarOne)?;
                }
            }
            out = out.add(&acc.scale(c));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PairCheck {
    pub a: String,
    pub b: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GradedDimension {
    pub degree: u32,
    pub commutative: usize,
    pub star_image: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OrbitReport {
    /// `f_a ⋆ f_b = (1 − 1/λ) f_a f_b + ½ f_[a,b] + (λ/2)⟨a,b⟩`.
    pub product_formula: Vec<PairCheck>,
    pub commutator: Vec<PairCheck>,
    pub casimir_value: String,
    pub casimir_pass: bool,
    pub associativity_triples: usize,
    pub associativity_failures: usize,
    /// First-order antisymmetric part against `u_λ` and `f_[a,b]`.
    pub quasiclassical: Vec<PairCheck>,
    pub unit: bool,
}

impl OrbitReport {
    pub fn all_pass(&self) -> bool {
        self.product_formula.iter().all(|p| p.pass)
            && self.commutator.iter().all(|p| p.pass)
            && self.casimir_pass
            && self.associativity_failures == 0
            && self.quasiclassical.iter().all(|p| p.pass)
            && self.unit
    }
}

impl Sl2Functions {
    fn basis(&self) -> Vec<(String, Vector)> {
        let ctx = self.context();
        ["x", "y", "h"]
            .iter()
            .map(|n| (n.to_string(), vec![(self.algebra().index(n).unwrap(), ctx.one())]))
            .collect()
    }

    /// The declared associativity test set: `f_x, f_y, f_h, f_x f_y, f_h²`.
    pub fn associativity_set(&self) -> Vec<OrbitFunction> {
        let fx = self.basis_function("x").unwrap();
        let fy = self.basis_function("y").unwrap();
        let fh = self.basis_function("h").unwrap();
        vec![fx.clone(), fy.clone(), fh.clone(), fx.mul(&fy), fh.mul(&fh)]
    }

    pub fn casimir_image(&self) -> Result<OrbitFunction, AbrrError> {
        let ctx = self.context();
        let (x, y, h) = (
            UeaElement::generator(&self.uea, "x")?,
            UeaElement::generator(&self.uea, "y")?,
            UeaElement::generator(&self.uea, "h")?,
        );
        let c = x.mul(&y).add(&y.mul(&x)).add(&h.mul(&h).scale(&ctx.frac(1, 2)));
        self.quantization_map(&c)
    }

    pub fn verify_orbit_identities(&self) -> Result<OrbitReport, AbrrError> {
        let ctx = self.context().clone();
        let lambda = ctx.var(LAMBDA)?;
        let alg = self.algebra();
        let basis = self.basis();
        let one_minus = &ctx.one() - &lambda.inv()?;
        let mut product_formula = Vec::new();
        let mut commutator = Vec::new();
        let mut quasiclassical = Vec::new();
        let u_x = UeaElement::generator(&self.uea, "x")?;
        let u_y = UeaElement::generator(&self.uea, "y")?;
        for (na, a) in &basis {
            for (nb, b) in &basis {
                let fa = self.orbit_function(a);
                let fb = self.orbit_function(b);
                let fab = self.orbit_function(&alg.bracket_vectors(a, b));
                let ab = self.star(&fa, &fb, StarMode::HbarOne)?;
                let want = fa
                    .mul(&fb)
                    .scale(&one_minus)
                    .add(&fab.scale(&ctx.frac(1, 2)))
                    .add(&OrbitFunction::constant(&ctx, &(&lambda * &ctx.frac(1, 2)) * &alg.pair(a, b)?));
                product_formula.push(PairCheck {
                    a: na.clone(),
                    b: nb.clone(),
                    pass: ab == want,
                });
                let ba = self.star(&fb, &fa, StarMode::HbarOne)?;
                commutator.push(PairCheck {
                    a: na.clone(),
                    b: nb.clone(),
                    pass: ab.sub(&ba) == fab,
                });
                // ħ-formal: coefficient of ħ in f_a ⋆ f_b − f_b ⋆ f_a
                let diff = self
                    .star(&fa, &fb, StarMode::Formal)?
                    .sub(&self.star(&fb, &fa, StarMode::Formal)?);
                let first = diff.map_coefficients(|c| c.series_expand(HBAR, 1).expect("no pole at ħ = 0").coeffs[1].clone());
                let inv = lambda.inv()?;
                let kks = self
                    .invariant_derivative(&u_x, &fa)
                    .mul(&self.invariant_derivative(&u_y, &fb))
                    .sub(&self.invariant_derivative(&u_y, &fa).mul(&self.invariant_derivative(&u_x, &fb)))
                    .scale(&inv);
                quasiclassical.push(PairCheck {
                    a: na.clone(),
                    b: nb.clone(),
                    pass: first == kks && kks == fab,
                });
            }
        }
        let cas = self.casimir_image()?;
        let want_cas = &(&lambda * &(&lambda + &ctx.int(2))) * &ctx.frac(1, 2);
        let casimir_pass = cas == OrbitFunction::constant(&ctx, want_cas);

        let set = self.associativity_set();
        let mut failures = 0;
        let mut pairs: BTreeMap<(usize, usize), OrbitFunction> = BTreeMap::new();
        for i in 0..set.len() {
            for j in 0..set.len() {
                pairs.insert((i, j), self.star(&set[i], &set[j], StarMode::HbarOne)?);
            }
        }
        for i in 0..set.len() {
            for j in 0..set.len() {
                for k in 0..set.len() {
                    let l = self.star(&pairs[&(i, j)], &set[k], StarMode::HbarOne)?;
                    let r = self.star(&set[i], &pairs[&(j, k)], StarMode::HbarOne)?;
                    if l != r {
                        failures += 1;
                    }
                }
            }
        }
        let one = OrbitFunction::constant(&ctx, ctx.one());
        let mut unit = true;
        for f in &set {
            unit &= self.star(f, &one, StarMode::HbarOne)? == *f && self.star(&one, f, StarMode::HbarOne)? == *f;
        }
        Ok(OrbitReport {
            product_formula,
            commutator,
            casimir_value: cas.to_string(),
            casimir_pass,
            associativity_triples: set.len().pow(3),
            associativity_failures: failures,
            quasiclassical,
            unit,
        })
    }

    /// Ranks of the degree-`≤ d` pieces: commutative monomials in `f_a`,
    /// and the image of PBW monomials under `F`. Both should be `(d+1)²`.
    pub fn graded_dimensions(&self, max_degree: u32) -> Result<Vec<GradedDimension>, AbrrError> {
        let ctx = self.context().clone();
        let fx = self.basis_function("x")?;
        let fy = self.basis_function("y")?;
        let fh = self.basis_function("h")?;
        let mut out = Vec::new();
        for d in 0..=max_degree {
            let mut comm = Vec::new();
            let mut star = Vec::new();
            for i in 0..=d {
                for j in 0..=d - i {
                    for k in 0..=d - i - j {
                        let pw = |f: &OrbitFunction, e: u32| {
                            (0..e).fold(OrbitFunction::constant(&ctx, ctx.one()), |acc, _| acc.mul(f))
                        };
                        comm.push(pw(&fy, i).mul(&pw(&fh, j)).mul(&pw(&fx, k)));
                        let m = vec![i, j, k];
                        let mono = UeaElement::from_terms(&self.uea, [(self.pbw_from_yhx(&m), ctx.one())]);
                        star.push(self.quantization_map(&mono)?);
                    }
                }
            }
            out.push(GradedDimension {
                degree: d,
                commutative: function_rank(&comm),
                star_image: function_rank(&star),
                expected: ((d + 1) * (d + 1)) as usize,
            });
        }
        Ok(out)
    }

    fn pbw_from_yhx(&self, e: &[u32]) -> Vec<u32> {
        let mut m = vec![0; self.uea.ngens()];
        m[self.pos[1]] = e[0];
        m[self.pos[2]] = e[1];
        m[self.pos[0]] = e[2];
        m
    }
}

fn function_rank(fs: &[OrbitFunction]) -> usize {
    let mut cols: BTreeMap<GMono, usize> = BTreeMap::new();
    for f in fs {
        for m in f.terms().keys() {
            let n = cols.len();
            cols.entry(*m).or_insert(n);
        }
    }
    if fs.is_empty() || cols.is_empty() {
        return 0;
    }
    let ctx = fs[0].context();
    let rows: Vec<Vec<FieldElement>> = fs
        .iter()
        .map(|f| {
            let mut r = vec![ctx.zero(); cols.len()];
            for (m, c) in f.terms() {
                r[cols[m]] = c.clone();
            }
            r
        })
        .collect();
    linalg::rank(&rows)
}
