//! Finite-dimensional Lie algebras over Q(params) with an invariant form,
//! and the tensor operations used to state r-matrix conditions.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::rootsys::{Root, RootError, RootSystem};
use crate::scalarfield::{Context, FieldElement};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("bracket is not antisymmetric at ({0}, {1})")]
    Antisymmetry(String, String),
    #[error("Jacobi identity fails on ({0}, {1}, {2})")]
    Jacobi(String, String, String),
    #[error("form is not symmetric at ({0}, {1})")]
    FormNotSymmetric(String, String),
    #[error("form is not invariant: ad {0} on ({1}, {2})")]
    NonInvariantForm(String, String, String),
    #[error("invariant form is degenerate")]
    DegenerateForm,
    #[error("algebra has no invariant form")]
    NoForm,
    #[error("algebra has no marked subalgebra u")]
    NoMarking,
    #[error("marking is invalid: {0}")]
    BadMarking(String),
    #[error("unknown basis element `{0}`")]
    UnknownBasis(String),
    #[error("coefficient from a different parameter context")]
    ContextMismatch,
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Sparse vector in the algebra: `(basis index, coefficient)` pairs.
pub type Vector = Vec<(usize, FieldElement)>;

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    ctx: Context,
    names: Vec<String>,
    /// `table[i][j]` = `[e_i, e_j]`.
    table: Vec<Vec<Vector>>,
    form: Option<Vec<Vec<FieldElement>>>,
    /// `u_mask[i]` marks basis element `i` as spanning `u`; the rest spans `m`.
    u_mask: Option<Vec<bool>>,
    roots: Vec<Option<Root>>,
}

impl LieAlgebra {
    /// Builds and validates an algebra from the brackets `[e_i, e_j]` for
    /// `i < j`; unlisted pairs commute.
    pub fn new(
        ctx: &Context,
        names: &[&str],
        brackets: &[(usize, usize, Vector)],
        form: Option<Vec<Vec<FieldElement>>>,
    ) -> Result<LieAlgebra, LieError> {
        let n = names.len();
        let mut table = vec![vec![Vector::new(); n]; n];
        for (i, j, v) in brackets {
            if v.iter().any(|(_, c)| c.context() != ctx) {
                return Err(LieError::ContextMismatch);
            }
            if i == j {
                if !v.iter().all(|(_, c)| c.is_zero()) {
                    return Err(LieError::Antisymmetry(names[*i].into(), names[*j].into()));
                }
                continue;
            }
            let v = prune(v.clone());
            table[*j][*i] = v.iter().map(|(k, c)| (*k, -c)).collect();
            table[*i][*j] = v;
        }
        let g = LieAlgebra {
            ctx: ctx.clone(),
            names: names.iter().map(|s| s.to_string()).collect(),
            table,
            form,
            u_mask: None,
            roots: vec![None; n],
        };
        g.validate()?;
        Ok(g)
    }

    /// sl(2) with basis `x, y, h` and the trace form.
    pub fn sl2(ctx: &Context) -> LieAlgebra {
        let c = |n: i64| ctx.int(n);
        let form = vec![
            vec![c(0), c(1), c(0)],
            vec![c(1), c(0), c(0)],
            vec![c(0), c(0), c(2)],
        ];
        LieAlgebra::new(
            ctx,
            &["x", "y", "h"],
            &[
                (0, 1, vec![(2, c(1))]),
                (0, 2, vec![(0, c(-2))]),
                (1, 2, vec![(1, c(2))]),
            ],
            Some(form),
        )
        .expect("sl(2) is a Lie algebra")
    }

    /// Two-dimensional nonabelian algebra with basis `b, a`, `[b,a] = a - b`.
    pub fn two_dim_nonabelian(ctx: &Context) -> LieAlgebra {
        LieAlgebra::new(
            ctx,
            &["b", "a"],
            &[(0, 1, vec![(1, ctx.int(1)), (0, ctx.int(-1))])],
            None,
        )
        .expect("two-dimensional algebra is a Lie algebra")
    }

    /// The matrix realization of a root system; if `u` is given it must be
    /// a reductive subset, and `u = h ⊕ Σ_{α∈U} g_α` is marked.
    pub fn from_root_system(
        rs: &RootSystem,
        ctx: &Context,
        u: Option<&[Root]>,
    ) -> Result<LieAlgebra, LieError> {
        let real = rs.realize();
        let fe = |q: &BigRational| ctx.rational(q.clone());
        let names: Vec<&str> = real.names.iter().map(|s| s.as_str()).collect();
        let brackets: Vec<(usize, usize, Vector)> = real
            .brackets
            .iter()
            .map(|(&(i, j), v)| (i, j, v.iter().map(|(k, c)| (*k, fe(c))).collect()))
            .collect();
        let form = real
            .form
            .iter()
            .map(|row| row.iter().map(fe).collect())
            .collect();
        let mut g = LieAlgebra::new(ctx, &names, &brackets, Some(form))?;
        for (r, &i) in &real.root_index {
            g.roots[i] = Some(r.clone());
        }
        if let Some(u) = u {
            if !rs.check_reductive_subset(u)? {
                return Err(LieError::BadMarking("U is not reductive".into()));
            }
            let mut mask = vec![false; g.dim()];
            for &i in &real.cartan {
                mask[i] = true;
            }
            for r in u {
                mask[real.root_index[r]] = true;
            }
            g = g.with_marking(mask)?;
        }
        Ok(g)
    }

    /// Marks `u` as the span of the flagged basis elements and `m` as the
    /// span of the others; requires `u` closed and `[u, m] ⊆ m`.
    pub fn with_marking(mut self, u_mask: Vec<bool>) -> Result<LieAlgebra, LieError> {
        if u_mask.len() != self.dim() {
            return Err(LieError::BadMarking("mask length".into()));
        }
        for i in (0..self.dim()).filter(|&i| u_mask[i]) {
            for j in 0..self.dim() {
                for (k, _) in &self.table[i][j] {
                    if u_mask[j] != u_mask[*k] {
                        let what = if u_mask[j] { "u is not a subalgebra" } else { "[u, m] is not inside m" };
                        return Err(LieError::BadMarking(format!(
                            "{what}: [{}, {}]",
                            self.names[i], self.names[j]
                        )));
                    }
                }
            }
        }
        self.u_mask = Some(u_mask);
        Ok(self)
    }

    pub fn marking_from_names(self, u: &[&str]) -> Result<LieAlgebra, LieError> {
        let mut mask = vec![false; self.dim()];
        for n in u {
            mask[self.index(n)?] = true;
        }
        self.with_marking(mask)
    }

    fn validate(&self) -> Result<(), LieError> {
        let n = self.dim();
        let nm = |i: usize| self.names[i].clone();
        for i in 0..n {
            for j in 0..n {
                let a = &self.table[i][j];
                let b: Vector = self.table[j][i].iter().map(|(k, c)| (*k, -c)).collect();
                if !vec_eq(a, &b) {
                    return Err(LieError::Antisymmetry(nm(i), nm(j)));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = BTreeMap::new();
                    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                        let inner = &self.table[x][y];
                        for (p, c) in inner {
                            for (q, d) in &self.table[*p][z] {
                                accumulate(&mut acc, *q, c * d);
                            }
                        }
                    }
                    if acc.values().any(|c: &FieldElement| !c.is_zero()) {
                        return Err(LieError::Jacobi(nm(i), nm(j), nm(k)));
                    }
                }
            }
        }
        if let Some(f) = &self.form {
            for i in 0..n {
                for j in 0..n {
                    if f[i][j] != f[j][i] {
                        return Err(LieError::FormNotSymmetric(nm(i), nm(j)));
                    }
                }
            }
            for z in 0..n {
                for a in 0..n {
                    for b in a..n {
                        let mut s = self.ctx.zero();
                        for (k, c) in &self.table[z][a] {
                            s = s + c * &f[*k][b];
                        }
                        for (k, c) in &self.table[z][b] {
                            s = s + c * &f[a][*k];
                        }
                        if !s.is_zero() {
                            return Err(LieError::NonInvariantForm(nm(z), nm(a), nm(b)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize, LieError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| LieError::UnknownBasis(name.to_string()))
    }

    pub fn bracket(&self, i: usize, j: usize) -> &Vector {
        &self.table[i][j]
    }

    pub fn bracket_vectors(&self, a: &Vector, b: &Vector) -> Vector {
        let mut acc = BTreeMap::new();
        for (i, c) in a {
            for (j, d) in b {
                for (k, e) in &self.table[*i][*j] {
                    accumulate(&mut acc, *k, &(c * d) * e);
                }
            }
        }
        finish(acc)
    }

    pub fn form(&self) -> Option<&Vec<Vec<FieldElement>>> {
        self.form.as_ref()
    }

    pub fn pair(&self, a: &Vector, b: &Vector) -> Result<FieldElement, LieError> {
        let f = self.form.as_ref().ok_or(LieError::NoForm)?;
        let mut s = self.ctx.zero();
        for (i, c) in a {
            for (j, d) in b {
                if !f[*i][*j].is_zero() {
                    s = s + &(c * d) * &f[*i][*j];
                }
            }
        }
        Ok(s)
    }

    pub fn root_of(&self, i: usize) -> Option<&Root> {
        self.roots[i].as_ref()
    }

    pub fn index_of_root(&self, r: &[i64]) -> Option<usize> {
        self.roots.iter().position(|x| x.as_deref() == Some(r))
    }

    pub fn cartan_indices(&self) -> Vec<usize> {
        if self.roots.iter().all(Option::is_none) {
            return Vec::new();
        }
        (0..self.dim()).filter(|&i| self.roots[i].is_none()).collect()
    }

    pub fn u_mask(&self) -> Option<&[bool]> {
        self.u_mask.as_deref()
    }

    pub fn in_u(&self, i: usize) -> Result<bool, LieError> {
        Ok(self.u_mask.as_ref().ok_or(LieError::NoMarking)?[i])
    }

    /// Casimir tensor `Ω = Σ (G^{-1})_{ij} e_i ⊗ e_j`.
    pub fn casimir(&self) -> Result<Tensor2, LieError> {
        let f = self.form.as_ref().ok_or(LieError::NoForm)?;
        let inv = linalg::inverse(f).ok_or(LieError::DegenerateForm)?;
        let mut t = Tensor2::new();
        for (i, row) in inv.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                t.add_term([i, j], c.clone());
            }
        }
        Ok(t)
    }

    /// The Cartan part `Ω_h` of the Casimir tensor, for root-system input.
    pub fn casimir_cartan_part(&self) -> Result<Tensor2, LieError> {
        let om = self.casimir()?;
        let h = self.cartan_indices();
        Ok(om.filter(|k| k.iter().all(|i| h.contains(i))))
    }

    /// True iff `t ∈ (u⊗u) ⊕ (m⊗m)`.
    pub fn splits_along_marking(&self, t: &Tensor2) -> Result<bool, LieError> {
        let u = self.u_mask.as_ref().ok_or(LieError::NoMarking)?;
        Ok(t.terms.keys().all(|[a, b]| u[*a] == u[*b]))
    }

    /// `[r12,r13] + [r12,r23] + [r13,r23]`.
    pub fn cyb(&self, r: &Tensor2) -> Tensor3 {
        let mut out = Tensor3::new();
        for ([a, b], x) in &r.terms {
            for ([c, d], y) in &r.terms {
                let xy = x * y;
                for (k, e) in &self.table[*a][*c] {
                    out.add_term([*k, *b, *d], &xy * e);
                }
                for (k, e) in &self.table[*b][*c] {
                    out.add_term([*a, *k, *d], &xy * e);
                }
                for (k, e) in &self.table[*b][*d] {
                    out.add_term([*a, *c, *k], &xy * e);
                }
            }
        }
        out
    }

    /// Projects every slot onto `m` along `u`.
    pub fn reduce_mod_u<const N: usize>(&self, t: &Tensor<N>) -> Result<Tensor<N>, LieError> {
        let u = self.u_mask.as_ref().ok_or(LieError::NoMarking)?;
        Ok(t.filter(|k| k.iter().all(|i| !u[*i])))
    }

    /// `Σ_slots ad_z` applied to `t`.
    pub fn ad<const N: usize>(&self, z: usize, t: &Tensor<N>) -> Tensor<N> {
        let mut out = Tensor::new();
        for (key, c) in &t.terms {
            for s in 0..N {
                for (k, e) in &self.table[z][key[s]] {
                    let mut nk = *key;
                    nk[s] = *k;
                    out.add_term(nk, c * e);
                }
            }
        }
        out
    }

    /// True iff `t` is annihilated by `ad_z` for every listed `z`.
    pub fn check_invariance<const N: usize>(&self, t: &Tensor<N>, subalgebra: &[usize]) -> bool {
        subalgebra.iter().all(|&z| self.ad(z, t).is_zero())
    }

    /// Basis indices of `u`.
    pub fn u_indices(&self) -> Result<Vec<usize>, LieError> {
        let u = self.u_mask.as_ref().ok_or(LieError::NoMarking)?;
        Ok((0..self.dim()).filter(|&i| u[i]).collect())
    }

    pub fn tensor_json<const N: usize>(&self, t: &Tensor<N>) -> Vec<TensorEntry> {
        t.terms
            .iter()
            .map(|(k, c)| TensorEntry {
                slots: k.iter().map(|i| self.names[*i].clone()).collect(),
                coeff: c.to_string(),
            })
            .collect()
    }
}

/// `Alt(a⊗b⊗c) = a⊗b⊗c + c⊗a⊗b + b⊗c⊗a`.
pub fn alt(t: &Tensor3) -> Tensor3 {
    let mut out = Tensor3::new();
    for ([a, b, c], x) in &t.terms {
        out.add_term([*a, *b, *c], x.clone());
        out.add_term([*c, *a, *b], x.clone());
        out.add_term([*b, *c, *a], x.clone());
    }
    out
}

/// `z ⊗ t` for a basis element `z` (the derivative tensor `h ⊗ ∂r/∂λ`).
pub fn prepend(z: usize, t: &Tensor2) -> Tensor3 {
    let mut out = Tensor3::new();
    for ([a, b], x) in &t.terms {
        out.add_term([z, *a, *b], x.clone());
    }
    out
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TensorEntry {
    pub slots: Vec<String>,
    pub coeff: String,
}

fn accumulate(acc: &mut BTreeMap<usize, FieldElement>, k: usize, c: FieldElement) {
    match acc.get_mut(&k) {
        Some(e) => *e = &*e + &c,
        None => {
            acc.insert(k, c);
        }
    }
}

fn finish(acc: BTreeMap<usize, FieldElement>) -> Vector {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn prune(v: Vector) -> Vector {
    let mut acc = BTreeMap::new();
    for (k, c) in v {
        accumulate(&mut acc, k, c);
    }
    finish(acc)
}

fn vec_eq(a: &Vector, b: &Vector) -> bool {
    let mut acc = BTreeMap::new();
    for (k, c) in a {
        accumulate(&mut acc, *k, c.clone());
    }
    for (k, c) in b {
        accumulate(&mut acc, *k, -c);
    }
    acc.values().all(|c| c.is_zero())
}

/// Sparse tensor with `N` slots over a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor<const N: usize> {
    terms: BTreeMap<[usize; N], FieldElement>,
}

pub type Tensor2 = Tensor<2>;
pub type Tensor3 = Tensor<3>;

impl<const N: usize> Default for Tensor<N> {
    fn default() -> Self {
        Tensor {
            terms: BTreeMap::new(),
        }
    }
}

impl<const N: usize> Tensor<N> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([usize; N], FieldElement)>) -> Self {
        let mut t = Self::new();
        for (k, c) in terms {
            t.add_term(k, c);
        }
        t
    }

    pub fn add_term(&mut self, key: [usize; N], c: FieldElement) {
        if c.is_zero() {
            return;
        }
        if let Some(e) = self.terms.get_mut(&key) {
            *e = &*e + &c;
            if e.is_zero() {
                self.terms.remove(&key);
            }
        } else {
            self.terms.insert(key, c);
        }
    }

    pub fn terms(&self) -> &BTreeMap<[usize; N], FieldElement> {
        &self.terms
    }

    pub fn get(&self, key: &[usize; N]) -> Option<&FieldElement> {
        self.terms.get(key)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for (k, c) in &other.terms {
            t.add_term(*k, c.clone());
        }
        t
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for (k, c) in &other.terms {
            t.add_term(*k, -c);
        }
        t
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, c * s)))
    }

    pub fn map_coefficients(
        &self,
        mut f: impl FnMut(&FieldElement) -> FieldElement,
    ) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    pub fn filter(&self, keep: impl Fn(&[usize; N]) -> bool) -> Self {
        Tensor {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Slot permutation: slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permute(&self, perm: [usize; N]) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| {
            let mut nk = *k;
            for i in 0..N {
                nk[i] = k[perm[i]];
            }
            (nk, c.clone())
        }))
    }
}

impl Tensor2 {
    /// `t^{21}`.
    pub fn flip(&self) -> Self {
        self.permute([1, 0])
    }

    pub fn symmetric_part(&self, half: &FieldElement) -> Self {
        self.add(&self.flip()).scale(half)
    }

    pub fn antisymmetric_part(&self, half: &FieldElement) -> Self {
        self.sub(&self.flip()).scale(half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::RootType;

    fn ctx() -> Context {
        Context::new(&["lambda"])
    }

    #[test]
    fn sl2_data() {
        let c = ctx();
        let g = LieAlgebra::sl2(&c);
        let (x, y, h) = (0, 1, 2);
        assert_eq!(g.bracket(h, x), &vec![(x, c.int(2))]);
        assert_eq!(g.bracket(h, y), &vec![(y, c.int(-2))]);
        assert_eq!(g.bracket(x, y), &vec![(h, c.int(1))]);
        let om = g.casimir().unwrap();
        let want = Tensor2::from_terms([([x, y], c.int(1)), ([y, x], c.int(1)), ([h, h], c.frac(1, 2))]);
        assert_eq!(om, want);
        assert!(g.check_invariance(&om, &[0, 1, 2]));
    }

    #[test]
    fn nonabelian_and_rejections() {
        let c = ctx();
        let v = LieAlgebra::two_dim_nonabelian(&c);
        assert_eq!(v.bracket(0, 1), &vec![(0, c.int(-1)), (1, c.int(1))]);
        assert!(matches!(v.casimir(), Err(LieError::NoForm)));

        // Heisenberg-like bracket with a non-invariant form
        let bad = LieAlgebra::new(
            &c,
            &["p", "q", "z"],
            &[(0, 1, vec![(2, c.int(1))])],
            Some(vec![
                vec![c.int(1), c.int(0), c.int(0)],
                vec![c.int(0), c.int(1), c.int(0)],
                vec![c.int(0), c.int(0), c.int(1)],
            ]),
        );
        assert!(matches!(bad, Err(LieError::NonInvariantForm(..))));

        // [a,b]=a, [a,c]=b, [b,c]=a violates Jacobi
        let bad = LieAlgebra::new(
            &c,
            &["a", "b", "c"],
            &[
                (0, 1, vec![(0, c.int(1))]),
                (0, 2, vec![(1, c.int(1))]),
                (1, 2, vec![(0, c.int(1))]),
            ],
            None,
        );
        assert!(matches!(bad, Err(LieError::Jacobi(..))));
    }

    #[test]
    fn a2_marking_and_casimir_split() {
        let c = ctx();
        let rs = RootSystem::build(RootType::A, 2).unwrap();
        let g = LieAlgebra::from_root_system(&rs, &c, Some(&[vec![1, 0], vec![-1, 0]])).unwrap();
        assert_eq!(g.dim(), 8);
        let u = g.u_indices().unwrap();
        assert_eq!(u.len(), 4);
        let om = g.casimir().unwrap();
        assert!(g.check_invariance(&om, &(0..8).collect::<Vec<_>>()));
        assert_eq!(om, om.flip());
        assert!(g.splits_along_marking(&om).unwrap());
        // Ω = Ω_h + Σ E_α ⊗ E_{-α}
        for r in rs.roots() {
            let i = g.index_of_root(r).unwrap();
            let j = g.index_of_root(&crate::rootsys::neg(r)).unwrap();
            assert_eq!(om.get(&[i, j]), Some(&c.one()));
        }
        assert!(matches!(
            LieAlgebra::from_root_system(&rs, &c, Some(&[vec![1, 0]])),
            Err(LieError::BadMarking(_))
        ));
    }

    #[test]
    fn cyb_and_alt_basics() {
        let c = ctx();
        let g = LieAlgebra::sl2(&c);
        assert!(g.cyb(&Tensor2::new()).is_zero());
        let half = c.frac(1, 2);
        let r = Tensor2::from_terms([([0, 1], half.clone()), ([1, 0], -&half)]);
        assert!(!g.cyb(&r).is_zero());

        let t = Tensor3::from_terms([([0, 1, 2], c.one())]);
        let want = Tensor3::from_terms([
            ([0, 1, 2], c.one()),
            ([2, 0, 1], c.one()),
            ([1, 2, 0], c.one()),
        ]);
        assert_eq!(alt(&t), want);
        assert_eq!(alt(&want), want.scale(&c.int(3)));
    }

    #[test]
    fn cyb_of_x_wedge_y_equals_alt_of_h_term() {
        // hand expansion: CYB(x⊗y - y⊗x) = Alt(h ⊗ (x⊗y - y⊗x))
        let c = ctx();
        let g = LieAlgebra::sl2(&c);
        let r = Tensor2::from_terms([([0, 1], c.one()), ([1, 0], c.int(-1))]);
        assert_eq!(g.cyb(&r), alt(&prepend(2, &r)));
    }

    #[test]
    fn invariance_examples() {
        let c = ctx();
        let g = LieAlgebra::sl2(&c);
        let r = Tensor2::from_terms([([0, 1], c.one()), ([1, 0], c.int(-1))]);
        assert!(g.check_invariance(&r, &[2]));
        assert!(!g.check_invariance(&r, &[0, 1, 2]));
    }

    #[test]
    fn reduction_mod_u() {
        let c = ctx();
        let g = LieAlgebra::sl2(&c).marking_from_names(&["h"]).unwrap();
        let t = Tensor3::from_terms([([2, 0, 1], c.one()), ([0, 1, 0], c.int(3))]);
        let red = g.reduce_mod_u(&t).unwrap();
        assert_eq!(red, Tensor3::from_terms([([0, 1, 0], c.int(3))]));
        assert_eq!(g.reduce_mod_u(&red).unwrap(), red);
        assert!(matches!(LieAlgebra::sl2(&c).reduce_mod_u(&t), Err(LieError::NoMarking)));

        // u = g kills everything
        let rs = RootSystem::build(RootType::A, 2).unwrap();
        let all = rs.roots().to_vec();
        let g = LieAlgebra::from_root_system(&rs, &c, Some(&all)).unwrap();
        let om = g.casimir().unwrap().scale(&c.frac(1, 2));
        assert!(g.reduce_mod_u(&g.cyb(&om)).unwrap().is_zero());
    }

    #[test]
    fn cyb_of_half_casimir_matches_structure_constants() {
        // CYB(Ω/2) ≡ ¼ Σ_{α+β+γ=0, all outside U} c_{αβ} E_{-α}⊗E_{-β}⊗E_{-γ} mod u
        let c = ctx();
        for (ty, n, u) in [
            (RootType::A, 2, vec![vec![1, 0], vec![-1, 0]]),
            (RootType::A, 2, vec![]),
            (RootType::B, 2, vec![]),
        ] {
            let rs = RootSystem::build(ty, n).unwrap();
            let g = LieAlgebra::from_root_system(&rs, &c, Some(&u)).unwrap();
            let table = rs.chevalley_constants();
            let om = g.casimir().unwrap().scale(&c.frac(1, 2));
            let lhs = g.reduce_mod_u(&g.cyb(&om)).unwrap();
            let mut rhs = Tensor3::new();
            let outside: Vec<&Root> = rs.roots().iter().filter(|r| !u.contains(r)).collect();
            for a in &outside {
                for b in &outside {
                    let gamma = crate::rootsys::neg(&crate::rootsys::add(a, b));
                    if !outside.contains(&&gamma) {
                        continue;
                    }
                    let cab = &table.constants[&((*a).clone(), (*b).clone())];
                    let idx = |r: &Root| g.index_of_root(&crate::rootsys::neg(r)).unwrap();
                    rhs.add_term([idx(a), idx(b), idx(&gamma)], c.rational(cab / BigRational::from_integer(4.into())));
                }
            }
            assert_eq!(lhs, rhs, "{ty}{n}");
        }
    }
}
