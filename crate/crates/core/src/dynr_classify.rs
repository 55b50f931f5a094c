//! Coefficient families `x_α` of classical dynamical r-matrices on a
//! semisimple algebra, their defining conditions, the tensor-level membership
//! test, the converse recovery and the associated Lagrangian subalgebra.
//!
//! `coth α(h)` is encoded through `t_α = e^{2α(h)}` as `(t_α+1)/(t_α-1)`, so
//! every identity below is an identity of rational functions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::lie_tensor::{LieAlgebra, LieError, Tensor2};
use crate::linalg;
use crate::rootsys::{add, neg, Root, RootError, RootSystem};
use crate::scalarfield::{Context, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynrError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("U is not reductive")]
    NotReductive,
    #[error("root {0:?} of U lies outside the Levi set of Δ")]
    UOutsideLevi(Root),
    #[error("no parameter t given for {0:?} in Δ")]
    MissingParameter(Root),
    #[error("t must equal 1 on U, but t at {0:?} is {1}")]
    NotTrivialOnU(Root, String),
    #[error("coth has a pole: t = 1 at {0:?}, which lies in N \\ U")]
    Pole(Root),
    #[error("family is not defined at {0:?}")]
    IncompleteFamily(Root),
    #[error("quasi-unitarity fails: b + b^21 differs from Ω")]
    QuasiUnitarity,
    #[error("tensor is not antisymmetric")]
    NotAntisymmetric,
    #[error("tensor is not supported on m ⊗ m")]
    NotInMM,
    #[error("the set P = {{x ≠ -1/2}} is not parabolic")]
    NotParabolic,
}

/// Classification data: simple system Π, Δ ⊆ Π, reductive U ⊆ span(Δ) and
/// one parameter `t_δ` per `δ ∈ Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynrSpec {
    pub pi: Vec<Root>,
    pub delta: Vec<Root>,
    pub u: Vec<Root>,
    pub t: BTreeMap<Root, FieldElement>,
}

impl DynrSpec {
    /// Default simple system; `t_δ = 1` for `δ ∈ U` and a fresh symbol
    /// `t<k>` otherwise, `k` the position of δ in Π.
    pub fn standard(rs: &RootSystem, ctx: &Context, delta: &[Root], u: &[Root]) -> Result<DynrSpec, DynrError> {
        let pi = rs.simple_roots();
        let mut t = BTreeMap::new();
        for d in delta {
            let k = pi
                .iter()
                .position(|p| p == d)
                .ok_or_else(|| RootError::NotSimple(d.clone()))?;
            let v = if u.contains(d) {
                ctx.one()
            } else {
                ctx.var(&format!("t{}", k + 1))?
            };
            t.insert(d.clone(), v);
        }
        Ok(DynrSpec {
            pi,
            delta: delta.to_vec(),
            u: u.to_vec(),
            t,
        })
    }
}

/// `α ↦ x_α` on all of R.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    pub x: BTreeMap<Root, FieldElement>,
}

impl CoefficientFamily {
    pub fn get(&self, r: &[i64]) -> Result<&FieldElement, DynrError> {
        self.x.get(r).ok_or_else(|| DynrError::IncompleteFamily(r.to_vec()))
    }

    pub fn with(&self, r: &[i64], v: FieldElement) -> CoefficientFamily {
        let mut f = self.clone();
        f.x.insert(r.to_vec(), v);
        f
    }
}

/// `t_α` for `α ∈ N`, multiplicative in the Δ-coordinates of α.
fn levi_parameters(
    rs: &RootSystem,
    ctx: &Context,
    spec: &DynrSpec,
) -> Result<BTreeMap<Root, FieldElement>, DynrError> {
    let n = rs.levi_subset(&spec.pi, &spec.delta)?;
    let mut out = BTreeMap::new();
    for r in &n.roots {
        let coords = rs.coordinates_in(&spec.pi, r)?;
        let mut t = ctx.one();
        for (k, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let d = &spec.pi[k];
            let td = spec
                .t
                .get(d)
                .ok_or_else(|| DynrError::MissingParameter(d.clone()))?;
            t = t.checked_mul(&td.pow(c as i32)?)?;
        }
        out.insert(r.clone(), t);
    }
    Ok(out)
}

pub fn build_coefficients(
    rs: &RootSystem,
    ctx: &Context,
    spec: &DynrSpec,
) -> Result<CoefficientFamily, DynrError> {
    if !rs.check_reductive_subset(&spec.u)? {
        return Err(DynrError::NotReductive);
    }
    let tn = levi_parameters(rs, ctx, spec)?;
    for r in &spec.u {
        if !tn.contains_key(r) {
            return Err(DynrError::UOutsideLevi(r.clone()));
        }
    }
    let pos: BTreeSet<Root> = rs.positive_roots_for(&spec.pi)?.into_iter().collect();
    let half = ctx.frac(1, 2);
    let mut x = BTreeMap::new();
    for r in rs.roots() {
        let v = if spec.u.contains(r) {
            if !tn[r].is_one() {
                return Err(DynrError::NotTrivialOnU(r.clone(), tn[r].to_string()));
            }
            ctx.zero()
        } else if let Some(t) = tn.get(r) {
            if t.is_one() {
                return Err(DynrError::Pole(r.clone()));
            }
            let one = ctx.one();
            &half * &(t + &one).checked_div(&(t - &one))?
        } else if pos.contains(r) {
            half.clone()
        } else {
            -&half
        };
        x.insert(r.clone(), v);
    }
    Ok(CoefficientFamily { x })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConditionResult {
    pub pass: bool,
    /// First violating root tuple, if any.
    pub witness: Option<Vec<Root>>,
    /// Nonzero residual at the witness.
    pub residual: Option<String>,
    /// Number of tuples the condition was evaluated on.
    pub checked: usize,
}

impl ConditionResult {
    fn new() -> Self {
        ConditionResult {
            pass: true,
            witness: None,
            residual: None,
            checked: 0,
        }
    }

    fn record(&mut self, tuple: Vec<Root>, residual: FieldElement) {
        self.checked += 1;
        if self.pass && !residual.is_zero() {
            self.pass = false;
            self.witness = Some(tuple);
            self.residual = Some(residual.to_string());
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConditionReport {
    pub a: ConditionResult,
    pub b: ConditionResult,
    pub c: ConditionResult,
    pub d: ConditionResult,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.a.pass && self.b.pass && self.c.pass && self.d.pass
    }
}

/// Conditions (a) x = 0 on U, (b) oddness, (c) `x_α + x_β = 0` on triples
/// with exactly γ in U, (d) `x_α x_β + x_β x_γ + x_γ x_α = -1/4` on
/// zero-sum triples outside U.
pub fn check_coefficient_conditions(
    rs: &RootSystem,
    fam: &CoefficientFamily,
    u: &[Root],
) -> Result<ConditionReport, DynrError> {
    let ctx = fam
        .x
        .values()
        .next()
        .map(|v| v.context().clone())
        .ok_or_else(|| DynrError::IncompleteFamily(vec![]))?;
    let in_u = |r: &Root| u.contains(r);
    let mut a = ConditionResult::new();
    let mut b = ConditionResult::new();
    let mut c = ConditionResult::new();
    let mut d = ConditionResult::new();
    let quarter = ctx.frac(1, 4);
    for r in rs.roots() {
        let x = fam.get(r)?;
        if in_u(r) {
            a.record(vec![r.clone()], x.clone());
        }
        b.record(vec![r.clone()], x + fam.get(&neg(r))?);
    }
    let outside: Vec<&Root> = rs.roots().iter().filter(|r| !in_u(r)).collect();
    for al in &outside {
        for be in &outside {
            let gamma = neg(&add(al, be));
            if !rs.is_root(&gamma) {
                continue;
            }
            let (xa, xb) = (fam.get(al)?, fam.get(be)?);
            if in_u(&gamma) {
                c.record(vec![(*al).clone(), (*be).clone(), gamma], xa + xb);
            } else {
                let xg = fam.get(&gamma)?;
                let s = &(&(xa * xb) + &(xb * xg)) + &(xg * xa);
                d.record(vec![(*al).clone(), (*be).clone(), gamma], &s + &quarter);
            }
        }
    }
    Ok(ConditionReport { a, b, c, d })
}

/// Equivalent form of (c): `x_{α+β} = x_α` for `α ∉ U`, `β ∈ U`, `α+β ∈ R`.
pub fn check_condition_c_equivalent(
    rs: &RootSystem,
    fam: &CoefficientFamily,
    u: &[Root],
) -> Result<ConditionResult, DynrError> {
    let mut res = ConditionResult::new();
    for al in rs.roots().iter().filter(|r| !u.contains(r)) {
        for be in u {
            let s = add(al, be);
            if rs.is_root(&s) {
                res.record(vec![al.clone(), be.clone()], fam.get(&s)? - fam.get(al)?);
            }
        }
    }
    Ok(res)
}

/// `Σ x_α E_α ⊗ E_{-α} + Ω/2`.
pub fn coefficients_to_tensor(g: &LieAlgebra, fam: &CoefficientFamily) -> Result<Tensor2, DynrError> {
    let ctx = g.context();
    let mut t = g.casimir()?.scale(&ctx.frac(1, 2));
    for (r, x) in &fam.x {
        let i = g.index_of_root(r).ok_or_else(|| RootError::NotARoot(r.clone()))?;
        let j = g.index_of_root(&neg(r)).ok_or_else(|| RootError::NotARoot(neg(r)))?;
        t.add_term([i, j], x.clone());
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MembershipReport {
    pub supported_on_mm: bool,
    pub u_invariant: bool,
    pub cyb_vanishes_mod_u: bool,
    /// Number of nonzero entries of the reduced CYB tensor.
    pub reduced_cyb_terms: usize,
}

impl MembershipReport {
    pub fn holds(&self) -> bool {
        self.supported_on_mm && self.u_invariant && self.cyb_vanishes_mod_u
    }
}

/// Tests `b ∈ M_Ω`: `b - Ω/2 ∈ (∧²m)^u` and `CYB(b) = 0` modulo u.
/// Quasi-unitarity `b + b^21 = Ω` is a precondition, reported as an error.
pub fn check_in_m_omega(g: &LieAlgebra, b: &Tensor2) -> Result<MembershipReport, DynrError> {
    let ctx = g.context();
    let om = g.casimir()?;
    if b.add(&b.flip()) != om {
        return Err(DynrError::QuasiUnitarity);
    }
    let lam = b.sub(&om.scale(&ctx.frac(1, 2)));
    let u = g.u_indices()?;
    let supported_on_mm = g.reduce_mod_u(&lam)? == lam;
    let u_invariant = g.check_invariance(&lam, &u);
    let red = g.reduce_mod_u(&g.cyb(b))?;
    Ok(MembershipReport {
        supported_on_mm,
        u_invariant,
        cyb_vanishes_mod_u: red.is_zero(),
        reduced_cyb_terms: red.terms().len(),
    })
}

/// `Ω/2 + π(e) + p_*(ρ - Ω/2)`, with `p_*` the slot-wise projection onto m.
pub fn recover_b_from_initial(g: &LieAlgebra, pi_e: &Tensor2, rho: &Tensor2) -> Result<Tensor2, DynrError> {
    let ctx = g.context();
    let om = g.casimir()?;
    if rho.add(&rho.flip()) != om {
        return Err(DynrError::QuasiUnitarity);
    }
    if pi_e.add(&pi_e.flip()) != Tensor2::new() {
        return Err(DynrError::NotAntisymmetric);
    }
    if g.reduce_mod_u(pi_e)? != *pi_e {
        return Err(DynrError::NotInMM);
    }
    let half_om = om.scale(&ctx.frac(1, 2));
    let lam = rho.sub(&half_om);
    Ok(half_om.add(pi_e).add(&g.reduce_mod_u(&lam)?))
}

/// A classification datum reproducing a given family.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub spec: DynrSpec,
    /// `P = R₊ ∪ N` for this simple system.
    pub parabolic: Vec<Root>,
}

/// All simple systems Π with `R₊(Π) ⊆ P`, `P = {α : x_α ≠ -1/2}`, together
/// with Δ = Π ∩ P ∩ (-P) and `t_δ = (2x_δ+1)/(2x_δ-1)` (1 on U). Every
/// returned witness reproduces `fam` through [`build_coefficients`].
pub fn recover_classification(
    rs: &RootSystem,
    fam: &CoefficientFamily,
    u: &[Root],
) -> Result<Vec<Witness>, DynrError> {
    let ctx = fam.get(&rs.roots()[0])?.context().clone();
    let minus_half = ctx.frac(-1, 2);
    let mut p = Vec::new();
    for r in rs.roots() {
        if *fam.get(r)? != minus_half {
            p.push(r.clone());
        }
    }
    if !rs.check_parabolic(&p)? {
        return Err(DynrError::NotParabolic);
    }
    let pset: BTreeSet<&Root> = p.iter().collect();
    let levi: Vec<Root> = p.iter().filter(|r| pset.contains(&neg(r))).cloned().collect();
    let one = ctx.one();
    let two = ctx.int(2);
    let mut out = Vec::new();
    for pi in rs.simple_systems() {
        let pos = rs.positive_roots_for(&pi)?;
        if !pos.iter().all(|r| pset.contains(r)) {
            continue;
        }
        let delta: Vec<Root> = pi.iter().filter(|r| levi.contains(r)).cloned().collect();
        let n = rs.levi_subset(&pi, &delta)?;
        let mut union: BTreeSet<Root> = pos.iter().cloned().collect();
        union.extend(n.roots.iter().cloned());
        if union != p.iter().cloned().collect::<BTreeSet<_>>() {
            continue;
        }
        let mut t = BTreeMap::new();
        for dl in &delta {
            let v = if u.contains(dl) {
                one.clone()
            } else {
                let x = fam.get(dl)?;
                (&(&two * x) + &one).checked_div(&(&(&two * x) - &one))?
            };
            t.insert(dl.clone(), v);
        }
        let spec = DynrSpec {
            pi: pi.clone(),
            delta,
            u: u.to_vec(),
            t,
        };
        if let Ok(back) = build_coefficients(rs, &ctx, &spec) {
            if back == *fam {
                out.push(Witness {
                    spec,
                    parabolic: p.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Vectors in `g × g`, coordinates `(x, y)` concatenated.
#[derive(Debug, Clone)]
pub struct LagrangianData {
    pub basis: Vec<Vec<FieldElement>>,
    pub dim_g: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LagrangianReport {
    pub dim_l: usize,
    pub dim_g: usize,
    pub isotropic: bool,
    pub closed: bool,
    pub dim_intersection_with_diagonal: usize,
    pub dim_u: usize,
    pub intersection_is_u_diag: bool,
}

impl LagrangianReport {
    pub fn all_pass(&self) -> bool {
        self.dim_l == self.dim_g && self.isotropic && self.closed && self.intersection_is_u_diag
    }
}

/// `𝔩 = {(x,y) ∈ p₋ × p₊ : θ(p₋(x)) = p₊(y)}` with θ acting by `t_α` on
/// `g_α`, `α ∈ N`, and trivially on h.
pub fn build_lagrangian(
    rs: &RootSystem,
    ctx: &Context,
    spec: &DynrSpec,
) -> Result<(LagrangianData, LagrangianReport), DynrError> {
    build_coefficients(rs, ctx, spec)?;
    let g = LieAlgebra::from_root_system(rs, ctx, Some(&spec.u))?;
    let d = g.dim();
    let tn = levi_parameters(rs, ctx, spec)?;
    let pos: BTreeSet<Root> = rs.positive_roots_for(&spec.pi)?.into_iter().collect();
    let unit = |i: usize, j: Option<usize>, tj: FieldElement| {
        let mut v = vec![ctx.zero(); 2 * d];
        v[i] = ctx.one();
        if let Some(j) = j {
            v[d + j] = tj;
        }
        v
    };
    let mut basis = Vec::new();
    for i in 0..d {
        match g.root_of(i) {
            None => basis.push(unit(i, Some(i), ctx.one())),
            Some(r) if tn.contains_key(r) => basis.push(unit(i, Some(i), tn[r].clone())),
            Some(r) if pos.contains(r) => {
                let mut v = vec![ctx.zero(); 2 * d];
                v[d + i] = ctx.one();
                basis.push(v);
            }
            Some(_) => basis.push(unit(i, None, ctx.zero())),
        }
    }

    let dim_l = linalg::rank(&basis);
    let form = g.form().ok_or(LieError::NoForm)?;
    let q = |a: &[FieldElement], b: &[FieldElement]| {
        let mut s = ctx.zero();
        for i in 0..d {
            for j in 0..d {
                if form[i][j].is_zero() {
                    continue;
                }
                s = s + &(&a[i] * &b[j]) * &form[i][j] - &(&a[d + i] * &b[d + j]) * &form[i][j];
            }
        }
        s
    };
    let isotropic = basis.iter().all(|a| basis.iter().all(|b| q(a, b).is_zero()));

    let to_vec = |v: &[FieldElement]| -> crate::lie_tensor::Vector {
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect()
    };
    let span = Span::new(&basis);
    let mut closed = true;
    'outer: for (k, a) in basis.iter().enumerate() {
        for b in &basis[k + 1..] {
            let x = g.bracket_vectors(&to_vec(&a[..d]), &to_vec(&b[..d]));
            let y = g.bracket_vectors(&to_vec(&a[d..]), &to_vec(&b[d..]));
            let mut v = vec![ctx.zero(); 2 * d];
            for (i, c) in x {
                v[i] = c;
            }
            for (i, c) in y {
                v[d + i] = c;
            }
            if !span.contains(&v) {
                closed = false;
                break 'outer;
            }
        }
    }

    let diag: Vec<Vec<FieldElement>> = (0..d).map(|i| unit(i, Some(i), ctx.one())).collect();
    let mut both = basis.clone();
    both.extend(diag.iter().cloned());
    let dim_sum = linalg::rank(&both);
    let dim_intersection = dim_l + d - dim_sum;
    let u = g.u_indices()?;
    let u_inside = u.iter().all(|&i| span.contains(&diag[i]));
    let report = LagrangianReport {
        dim_l,
        dim_g: d,
        isotropic,
        closed,
        dim_intersection_with_diagonal: dim_intersection,
        dim_u: u.len(),
        intersection_is_u_diag: u_inside && dim_intersection == u.len(),
    };
    Ok((LagrangianData { basis, dim_g: d }, report))
}

/// Row space membership via a reduced echelon basis.
struct Span {
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl Span {
    fn new(vectors: &[Vec<FieldElement>]) -> Span {
        let (rows, pivots) = linalg::rref(vectors);
        Span {
            rows: rows.into_iter().take(pivots.len()).collect(),
            pivots,
        }
    }

    fn contains(&self, v: &[FieldElement]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (j, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    v[j] = &v[j] - &(&f * r);
                }
            }
        }
        v.iter().all(|c| c.is_zero())
    }
}
