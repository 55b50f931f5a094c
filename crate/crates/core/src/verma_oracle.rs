//! sl(2) Verma modules over Q(λ), intertwiners `M(λ) → M(λ) ⊗ V`, and the
//! comparison of composed intertwiners against the twist acting on
//! finite-dimensional modules.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::scalarfield::{Context, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VermaError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("depth {have} is below the required {need}")]
    DepthInsufficient { have: usize, need: usize },
    #[error("expectation value is not of weight zero")]
    NotZeroWeight,
    #[error("module V_{0} has no zero weight space")]
    OddHighestWeight(usize),
    #[error("highest-weight system is {0}")]
    Singular(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gen {
    X,
    Y,
    H,
}

/// Truncation of `M(λ)` to `m_0, …, m_K`, `m_k = y^k 𝕀_λ`.
#[derive(Debug, Clone)]
pub struct VermaData {
    ctx: Context,
    lambda: FieldElement,
    depth: usize,
}

impl VermaData {
    pub fn new(ctx: &Context, depth: usize) -> Result<Self, VermaError> {
        Ok(VermaData {
            ctx: ctx.clone(),
            lambda: ctx.var("lambda")?,
            depth,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Image of `m_k`; `None` when the result is zero or leaves the truncation.
    pub fn act(&self, g: Gen, k: usize) -> Option<(usize, FieldElement)> {
        match g {
            Gen::H => Some((k, &self.lambda - &self.ctx.int(2 * k as i64))),
            Gen::Y => (k < self.depth).then(|| (k + 1, self.ctx.one())),
            Gen::X => (k > 0).then(|| {
                let kk = self.ctx.int(k as i64);
                (k - 1, &kk * &(&self.lambda - &self.ctx.int(k as i64 - 1)))
            }),
        }
    }
}

/// Irreducible module `V_m` with basis `v_0, …, v_m` of weights `m − 2i`.
#[derive(Debug, Clone)]
pub struct FiniteModule {
    ctx: Context,
    m: usize,
}

impl FiniteModule {
    pub fn new(ctx: &Context, highest_weight: usize) -> Self {
        FiniteModule {
            ctx: ctx.clone(),
            m: highest_weight,
        }
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn highest_weight(&self) -> usize {
        self.m
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.m as i64 - 2 * i as i64
    }

    /// Basis indices spanning `V[μ]`.
    pub fn weight_space(&self, mu: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weight(i) == mu).collect()
    }

    pub fn act(&self, g: Gen, i: usize) -> Option<(usize, FieldElement)> {
        match g {
            Gen::H => (self.weight(i) != 0).then(|| (i, self.ctx.int(self.weight(i)))),
            Gen::Y => (i < self.m).then(|| (i + 1, self.ctx.one())),
            Gen::X => (i > 0).then(|| (i - 1, self.ctx.int((i * (self.m - i + 1)) as i64))),
        }
    }

    pub fn apply(&self, g: Gen, v: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = vec![self.ctx.zero(); self.dim()];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some((j, e)) = self.act(g, i) {
                out[j] = &out[j] + &(c * &e);
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<FieldElement> {
        (0..self.dim())
            .map(|j| if i == j { self.ctx.one() } else { self.ctx.zero() })
            .collect()
    }

    /// The zero-weight basis vector.
    pub fn zero_weight_vector(&self) -> Result<Vec<FieldElement>, VermaError> {
        match self.weight_space(0).first() {
            Some(&i) => Ok(self.basis_vector(i)),
            None => Err(VermaError::OddHighestWeight(self.m)),
        }
    }
}

/// Tensor factor of a module `M(λ) ⊗ V ⊗ …`.
#[derive(Debug, Clone)]
pub enum Factor {
    Verma(VermaData),
    Finite(FiniteModule),
}

impl Factor {
    fn act(&self, g: Gen, i: usize) -> Option<(usize, FieldElement)> {
        match self {
            Factor::Verma(v) => v.act(g, i),
            Factor::Finite(f) => f.act(g, i),
        }
    }
}

type TVec = BTreeMap<Vec<usize>, FieldElement>;

fn add_into(t: &mut TVec, k: Vec<usize>, c: FieldElement) {
    if c.is_zero() {
        return;
    }
    match t.get_mut(&k) {
        Some(e) => {
            *e = &*e + &c;
            if e.is_zero() {
                t.remove(&k);
            }
        }
        None => {
            t.insert(k, c);
        }
    }
}

/// Diagonal action `Σ_s g^{(s)}` on a tensor product vector.
pub fn act_tensor(factors: &[Factor], g: Gen, v: &TVec) -> TVec {
    let mut out = TVec::new();
    for (k, c) in v {
        for (s, f) in factors.iter().enumerate() {
            if let Some((j, e)) = f.act(g, k[s]) {
                let mut k2 = k.clone();
                k2[s] = j;
                add_into(&mut out, k2, c * &e);
            }
        }
    }
    out
}

/// `Φ(𝕀_λ) = Σ_k m_k ⊗ w_k`.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub module: FiniteModule,
    pub depth: usize,
    pub w: Vec<Vec<FieldElement>>,
}

impl Intertwiner {
    pub fn expectation(&self) -> &[FieldElement] {
        &self.w[0]
    }

    pub fn image(&self) -> TVec {
        let mut t = TVec::new();
        for (k, wk) in self.w.iter().enumerate() {
            for (i, c) in wk.iter().enumerate() {
                add_into(&mut t, vec![k, i], c.clone());
            }
        }
        t
    }
}

/// Solves `x·Φ = 0`, `h·Φ = λΦ` in `M(λ) ⊗ V` with `w_0 = v0` fixed.
/// Unknowns are all coordinates of `w_1, …, w_K`; the homogeneous system
/// must have only the zero solution.
pub fn solve_intertwiner(verma: &VermaData, v: &FiniteModule, v0: &[FieldElement]) -> Result<Intertwiner, VermaError> {
    let need = v.dim();
    if verma.depth < need {
        return Err(VermaError::DepthInsufficient {
            have: verma.depth,
            need,
        });
    }
    if v.apply(Gen::H, v0).iter().any(|c| !c.is_zero()) {
        return Err(VermaError::NotZeroWeight);
    }
    let ctx = &verma.ctx;
    let (kmax, d) = (verma.depth, v.dim());
    let nunk = kmax * d;
    let col = |k: usize, i: usize| (k - 1) * d + i;
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    let mut rhs: Vec<FieldElement> = Vec::new();
    // x-equations at each component m_k ⊗ v_i
    for k in 0..=kmax {
        for i in 0..d {
            let mut row = vec![ctx.zero(); nunk];
            let mut b = ctx.zero();
            if k < kmax {
                let (_, c) = verma.act(Gen::X, k + 1).expect("k+1 > 0");
                row[col(k + 1, i)] = c;
            }
            // (x w_k)[i] = Σ_j w_k[j] (x v_j)[i]
            for j in 0..d {
                if let Some((t, e)) = v.act(Gen::X, j) {
                    if t == i {
                        if k == 0 {
                            b = &b - &(&v0[j] * &e);
                        } else {
                            row[col(k, j)] = &row[col(k, j)] + &e;
                        }
                    }
                }
            }
            if row.iter().any(|c| !c.is_zero()) || !b.is_zero() {
                rows.push(row);
                rhs.push(b);
            }
        }
    }
    // weight equations: (weight(v_i) − 2k) w_k[i] = 0
    for k in 1..=kmax {
        for i in 0..d {
            let wt = v.weight(i) - 2 * k as i64;
            if wt != 0 {
                let mut row = vec![ctx.zero(); nunk];
                row[col(k, i)] = ctx.int(wt);
                rows.push(row);
                rhs.push(ctx.zero());
            }
        }
    }
    if linalg::rank(&rows) != nunk {
        return Err(VermaError::Singular("underdetermined"));
    }
    let sol = linalg::solve(&rows, &rhs).ok_or(VermaError::Singular("inconsistent"))?;
    let mut w = vec![v0.to_vec()];
    for k in 1..=kmax {
        w.push((0..d).map(|i| sol[col(k, i)].clone()).collect());
    }
    Ok(Intertwiner {
        module: v.clone(),
        depth: kmax,
        w,
    })
}

/// True iff `Φ(𝕀_λ)` is annihilated by `x` and has `h`-eigenvalue `λ`.
pub fn is_highest_weight(verma: &VermaData, phi: &Intertwiner) -> bool {
    let factors = [Factor::Verma(verma.clone()), Factor::Finite(phi.module.clone())];
    let img = phi.image();
    if !act_tensor(&factors, Gen::X, &img).is_empty() {
        return false;
    }
    let hv = act_tensor(&factors, Gen::H, &img);
    let mut scaled = TVec::new();
    for (k, c) in &img {
        add_into(&mut scaled, k.clone(), c * &verma.lambda);
    }
    hv == scaled
}

/// The `m_0` component of `(φ ⊗ id)ψ(𝕀_λ)`, as a vector in `V ⊗ W`
/// indexed by `i * dim W + j`.
pub fn compose_leading(verma: &VermaData, phi: &Intertwiner, psi: &Intertwiner) -> Vec<FieldElement> {
    let factors = [Factor::Verma(verma.clone()), Factor::Finite(phi.module.clone())];
    let (dv, dw) = (phi.module.dim(), psi.module.dim());
    let mut out = vec![verma.ctx.zero(); dv * dw];
    // φ(m_k) = y^k · φ(𝕀_λ) under the diagonal action
    let mut phik = phi.image();
    for (k, wk) in psi.w.iter().enumerate() {
        if k > 0 {
            phik = act_tensor(&factors, Gen::Y, &phik);
        }
        for (key, c) in &phik {
            if key[0] != 0 {
                continue;
            }
            for (j, d) in wk.iter().enumerate() {
                if !d.is_zero() {
                    let idx = key[1] * dw + j;
                    out[idx] = &out[idx] + &(c * d);
                }
            }
        }
    }
    out
}

/// `J(λ)_{V⊗W}(a ⊗ b)` at `ħ = 1`, from
/// `J_n = ((−1)^n/n!) y^n ⊗ x^n (λ−h)^{-1} … (λ−(h+n−1))^{-1}`, with `J_n`
/// scaled by `weight(n)`.
pub fn twist_on_modules(
    ctx: &Context,
    v: &FiniteModule,
    w: &FiniteModule,
    a: &[FieldElement],
    b: &[FieldElement],
    weight: impl Fn(usize) -> FieldElement,
) -> Result<Vec<FieldElement>, VermaError> {
    let lambda = ctx.var("lambda")?;
    let dw = w.dim();
    let mut out = vec![ctx.zero(); v.dim() * dw];
    let mut yn = a.to_vec();
    let mut fact = ctx.one();
    for n in 0..=v.dim() {
        if n > 0 {
            yn = v.apply(Gen::Y, &yn);
            fact = &fact * &ctx.int(n as i64);
        }
        if yn.iter().all(|c| c.is_zero()) {
            break;
        }
        // rightmost factors act first, on weight vectors of W
        let mut right: Vec<FieldElement> = b
            .iter()
            .enumerate()
            .map(|(i, c)| -> Result<FieldElement, VermaError> {
                let mut d = c.clone();
                for j in 0..n {
                    let shift = &lambda - &ctx.int(w.weight(i) + j as i64);
                    d = d.checked_div(&shift)?;
                }
                Ok(d)
            })
            .collect::<Result<_, _>>()?;
        for _ in 0..n {
            right = w.apply(Gen::X, &right);
        }
        let sign = if n % 2 == 0 { ctx.one() } else { ctx.int(-1) };
        let s = &(&sign / &fact) * &weight(n);
        for (i, ci) in yn.iter().enumerate() {
            for (j, cj) in right.iter().enumerate() {
                if !ci.is_zero() && !cj.is_zero() {
                    out[i * dw + j] = &out[i * dw + j] + &(&(ci * cj) * &s);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OracleReport {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "W")]
    pub w: usize,
    pub depth: usize,
    pub composed: Vec<String>,
    pub twist_side: Vec<String>,
    pub difference_terms: Vec<(usize, String)>,
    pub status: String,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.difference_terms.is_empty()
    }
}

/// Compares `u_{(φ⊗id)ψ}` with `J(λ)_{V⊗W}(u_φ ⊗ u_ψ)`; `weight` scales
/// each `J_n` (identity weight for the actual twist).
pub fn compose_and_extract(
    ctx: &Context,
    v_hw: usize,
    w_hw: usize,
    depth: Option<usize>,
    weight: impl Fn(usize) -> FieldElement,
) -> Result<OracleReport, VermaError> {
    let v = FiniteModule::new(ctx, v_hw);
    let w = FiniteModule::new(ctx, w_hw);
    let depth = depth.unwrap_or(v.dim() + w.dim());
    let verma = VermaData::new(ctx, depth)?;
    let phi = solve_intertwiner(&verma, &v, &v.zero_weight_vector()?)?;
    let psi = solve_intertwiner(&verma, &w, &w.zero_weight_vector()?)?;
    let composed = compose_leading(&verma, &phi, &psi);
    let twisted = twist_on_modules(ctx, &v, &w, phi.expectation(), psi.expectation(), weight)?;
    let difference_terms: Vec<(usize, String)> = composed
        .iter()
        .zip(&twisted)
        .enumerate()
        .filter_map(|(i, (a, b))| {
            let d = a - b;
            (!d.is_zero()).then(|| (i, d.to_string()))
        })
        .collect();
    Ok(OracleReport {
        v: v_hw,
        w: w_hw,
        depth,
        composed: composed.iter().map(|c| c.to_string()).collect(),
        twist_side: twisted.iter().map(|c| c.to_string()).collect(),
        status: if difference_terms.is_empty() { "pass" } else { "fail" }.into(),
        difference_terms,
    })
}

/// Checks that every matrix entry of `J_n` on `V ⊗ W` (ħ = 1) becomes a
/// polynomial after multiplying by `Π_{j=−m_W}^{m_W+n−1} (λ − j)`.
pub fn twist_poles_are_integral(ctx: &Context, v: &FiniteModule, w: &FiniteModule) -> Result<bool, VermaError> {
    let lambda = ctx.var("lambda")?;
    let one = ctx.one();
    for n in 1..=v.dim().min(w.dim()) {
        let mut clear = ctx.one();
        for j in -(w.highest_weight() as i64)..(w.highest_weight() + n) as i64 {
            clear = &clear * &(&lambda - &ctx.int(j));
        }
        for a in 0..v.dim() {
            for b in 0..w.dim() {
                let only_n = |k: usize| if k == n { one.clone() } else { ctx.zero() };
                let out = twist_on_modules(ctx, v, w, &v.basis_vector(a), &w.basis_vector(b), only_n)?;
                if out.iter().any(|c| !(c * &clear).denom().is_constant()) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `c = xy + yx + ½h²` on `m_k` for `k < K`, as a multiple of `m_k`.
pub fn casimir_on_verma(verma: &VermaData, k: usize) -> Option<FieldElement> {
    let f = [Factor::Verma(verma.clone())];
    let v = TVec::from([(vec![k], verma.ctx.one())]);
    let xy = act_tensor(&f, Gen::X, &act_tensor(&f, Gen::Y, &v));
    let yx = act_tensor(&f, Gen::Y, &act_tensor(&f, Gen::X, &v));
    let hh = act_tensor(&f, Gen::H, &act_tensor(&f, Gen::H, &v));
    let mut total = xy;
    for (key, c) in yx {
        add_into(&mut total, key, c);
    }
    for (key, c) in hh {
        add_into(&mut total, key, &c * &verma.ctx.frac(1, 2));
    }
    if total.keys().any(|key| key[0] != k) {
        return None;
    }
    Some(total.get(&vec![k]).cloned().unwrap_or_else(|| verma.ctx.zero()))
}

/// The sl(2) relations `[h,x] = 2x`, `[h,y] = −2y`, `[x,y] = h` on `m_k`.
pub fn verma_relations_hold(verma: &VermaData, k: usize) -> bool {
    let f = [Factor::Verma(verma.clone())];
    relations_hold(&f, &TVec::from([(vec![k], verma.ctx.one())]), &verma.ctx)
}

pub fn finite_relations_hold(v: &FiniteModule) -> bool {
    let f = [Factor::Finite(v.clone())];
    (0..v.dim()).all(|i| relations_hold(&f, &TVec::from([(vec![i], v.ctx.one())]), &v.ctx))
}

fn relations_hold(f: &[Factor], v: &TVec, ctx: &Context) -> bool {
    let comm = |a: Gen, b: Gen| {
        let ab = act_tensor(f, a, &act_tensor(f, b, v));
        let mut out = ab;
        for (k, c) in act_tensor(f, b, &act_tensor(f, a, v)) {
            add_into(&mut out, k, -&c);
        }
        out
    };
    let scaled = |g: Gen, s: i64| {
        act_tensor(f, g, v)
            .into_iter()
            .map(|(k, c)| (k, &c * &ctx.int(s)))
            .filter(|(_, c)| !c.is_zero())
            .collect::<TVec>()
    };
    comm(Gen::H, Gen::X) == scaled(Gen::X, 2)
        && comm(Gen::H, Gen::Y) == scaled(Gen::Y, -2)
        && comm(Gen::X, Gen::Y) == scaled(Gen::H, 1)
}
