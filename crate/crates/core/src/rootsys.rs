//! Classical root systems realized inside matrix Lie algebras.
//!
//! Roots are integer vectors in the basis of the default (Bourbaki) simple
//! roots. Root vectors come from elementary matrices of sl(n+1), so(2n+1),
//! sp(2n) and so(2n); the invariant form is a multiple of the trace form
//! chosen so that long roots have squared length 2.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg;

pub type Root = Vec<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RootType {
    A,
    B,
    C,
    D,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl std::str::FromStr for RootType {
    type Err = RootError;
    fn from_str(s: &str) -> Result<Self, RootError> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(RootType::A),
            "B" => Ok(RootType::B),
            "C" => Ok(RootType::C),
            "D" => Ok(RootType::D),
            _ => Err(RootError::Unsupported(s.to_string(), 0)),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("unsupported root system {0}{1}")]
    Unsupported(String, usize),
    #[error("{0:?} is not a root")]
    NotARoot(Root),
    #[error("{0:?} is not a simple root of the given simple system")]
    NotSimple(Root),
    #[error("{0:?} is not a simple system")]
    NotASimpleSystem(Vec<Root>),
    #[error("subset is not parabolic")]
    NotParabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetTag {
    Reductive,
    Parabolic,
    Levi,
    YSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSubset {
    pub roots: Vec<Root>,
    pub tag: SubsetTag,
}

impl RootSubset {
    pub fn contains(&self, r: &[i64]) -> bool {
        self.roots.iter().any(|x| x == r)
    }
}

type Sparse = BTreeMap<(usize, usize), BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn commutator(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    let mut acc = |i: usize, k: usize, v: BigRational| {
        let e = out.entry((i, k)).or_insert_with(BigRational::zero);
        *e += v;
    };
    for (&(i, j), x) in a {
        for (&(j2, k), y) in b.range((j, 0)..(j + 1, 0)) {
            debug_assert_eq!(j, j2);
            acc(i, k, x * y);
        }
    }
    for (&(i, j), x) in b {
        for (&(_, k), y) in a.range((j, 0)..(j + 1, 0)) {
            acc(i, k, -(x * y));
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn trace_of_product(a: &Sparse, b: &Sparse) -> BigRational {
    let mut t = BigRational::zero();
    for (&(i, j), x) in a {
        if let Some(y) = b.get(&(j, i)) {
            t += x * y;
        }
    }
    t
}

/// Structure constants of the normalized root vectors.
#[derive(Debug, Clone)]
pub struct StructureTable {
    /// `c[(α,β)]` with `[E_α, E_β] = c E_{α+β}`, for `α+β` a root.
    pub constants: BTreeMap<(Root, Root), BigRational>,
    /// `⟨E_α, E_{-α}⟩`, which is 1 for every root after normalization.
    pub pairings: BTreeMap<Root, BigRational>,
}

/// Full bracket and invariant form of the realized algebra, in the basis
/// (root vectors in root order, then simple coroots).
#[derive(Debug, Clone)]
pub struct RealizedAlgebra {
    pub names: Vec<String>,
    /// `brackets[(i,j)]` lists `(k, c)` with `[e_i,e_j] = Σ c e_k`, for `i<j`.
    pub brackets: BTreeMap<(usize, usize), Vec<(usize, BigRational)>>,
    pub form: Vec<Vec<BigRational>>,
    /// Index of the basis vector for each root.
    pub root_index: BTreeMap<Root, usize>,
    pub cartan: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    typ: RootType,
    rank: usize,
    roots: Vec<Root>,
    npos: usize,
    gram: Vec<Vec<BigRational>>,
    model: Model,
}

#[derive(Debug, Clone)]
struct Model {
    size: usize,
    /// Form scale `s` in `⟨X,Y⟩ = s tr(XY)`.
    scale: BigRational,
    vectors: BTreeMap<Root, Sparse>,
    coroots: Vec<Sparse>,
}

pub const MAX_RANK: usize = 8;

impl RootSystem {
    pub fn build(typ: RootType, rank: usize) -> Result<RootSystem, RootError> {
        let min = match typ {
            RootType::A => 1,
            RootType::B | RootType::C => 2,
            RootType::D => 3,
        };
        if rank < min || rank > MAX_RANK {
            return Err(RootError::Unsupported(typ.to_string(), rank));
        }
        let n = rank;
        // ε-coordinates of the diagonal weights and the model data
        let (size, dim, weight, jmat, scale): (usize, usize, Vec<Vec<i64>>, Option<Vec<Vec<i64>>>, BigRational) =
            match typ {
                RootType::A => {
                    let w = (0..=n).map(|i| unit(n + 1, i, 1)).collect();
                    (n + 1, n + 1, w, None, q(1))
                }
                RootType::B => {
                    let mut w = vec![vec![0; n]];
                    w.extend((0..n).map(|i| unit(n, i, 1)));
                    w.extend((0..n).map(|i| unit(n, i, -1)));
                    let mut j = vec![vec![0; 2 * n + 1]; 2 * n + 1];
                    j[0][0] = 1;
                    for i in 1..=n {
                        j[i][n + i] = 1;
                        j[n + i][i] = 1;
                    }
                    (2 * n + 1, n, w, Some(j), BigRational::new(1.into(), 2.into()))
                }
                RootType::C | RootType::D => {
                    let mut w: Vec<Vec<i64>> = (0..n).map(|i| unit(n, i, 1)).collect();
                    w.extend((0..n).map(|i| unit(n, i, -1)));
                    let sign = if typ == RootType::C { -1 } else { 1 };
                    let mut j = vec![vec![0; 2 * n]; 2 * n];
                    for i in 0..n {
                        j[i][n + i] = 1;
                        j[n + i][i] = sign;
                    }
                    let s = if typ == RootType::C {
                        q(1)
                    } else {
                        BigRational::new(1.into(), 2.into())
                    };
                    (2 * n, n, w, Some(j), s)
                }
            };

        let simple: Vec<Vec<i64>> = (0..n)
            .map(|k| match (typ, k + 1 == n) {
                (RootType::B, true) => unit(dim, k, 1),
                (RootType::C, true) => unit(dim, k, 2),
                (RootType::D, true) => {
                    let mut v = unit(dim, k - 1, 1);
                    v[k] = 1;
                    v
                }
                _ => {
                    let mut v = unit(dim, k, 1);
                    v[k + 1] = -1;
                    v
                }
            })
            .collect();
        // columns: simple roots; solve for simple-root coordinates
        let sys: Vec<Vec<BigRational>> = (0..dim)
            .map(|r| simple.iter().map(|s| q(s[r])).collect())
            .collect();
        let to_simple = |eps: &[i64]| -> Option<Root> {
            let rhs: Vec<BigRational> = eps.iter().map(|&x| q(x)).collect();
            let x = linalg::solve(&sys, &rhs)?;
            x.iter()
                .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
                .collect()
        };

        let jinv = jmat.as_ref().map(|j| {
            let jq: Vec<Vec<BigRational>> =
                j.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            linalg::inverse(&jq).expect("J is invertible")
        });
        let project = |i: usize, k: usize| -> Sparse {
            let mut m = Sparse::new();
            m.insert((i, k), q(1));
            if let (Some(j), Some(ji)) = (&jmat, &jinv) {
                // X - J^{-1} X^T J with X = e_ik; X^T = e_ki
                for (a, row) in ji.iter().enumerate() {
                    if row[k].is_zero() {
                        continue;
                    }
                    for (b, &jib) in j[i].iter().enumerate() {
                        if jib != 0 {
                            let e = m.entry((a, b)).or_insert_with(BigRational::zero);
                            *e -= &row[k] * q(jib);
                        }
                    }
                }
                m.retain(|_, v| !v.is_zero());
            }
            m
        };

        let mut raw: BTreeMap<Root, Sparse> = BTreeMap::new();
        for i in 0..size {
            for k in 0..size {
                let w: Vec<i64> = weight[i].iter().zip(&weight[k]).map(|(a, b)| a - b).collect();
                if w.iter().all(|&x| x == 0) {
                    continue;
                }
                let Some(root) = to_simple(&w) else { continue };
                if raw.contains_key(&root) {
                    continue;
                }
                let m = project(i, k);
                if !m.is_empty() {
                    raw.insert(root, m);
                }
            }
        }

        let mut pos: Vec<Root> = raw
            .keys()
            .filter(|r| r.iter().all(|&c| c >= 0))
            .cloned()
            .collect();
        pos.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let npos = pos.len();
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|r| neg(r)));
        assert_eq!(roots.len(), raw.len());

        // normalize E_{-α} so that ⟨E_α, E_{-α}⟩ = 1
        let mut vectors = BTreeMap::new();
        for r in &pos {
            let e = raw[r].clone();
            let f = raw[&neg(r)].clone();
            let p = &scale * trace_of_product(&e, &f);
            let f: Sparse = f.into_iter().map(|(k, v)| (k, v / &p)).collect();
            vectors.insert(r.clone(), e);
            vectors.insert(neg(r), f);
        }
        let coroots: Vec<Sparse> = (0..n)
            .map(|k| {
                let a = unit(n, k, 1);
                commutator(&vectors[&a], &vectors[&neg(&a)])
            })
            .collect();

        let scale_eps = if typ == RootType::C {
            BigRational::new(1.into(), 2.into())
        } else {
            q(1)
        };
        let gram = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let d: i64 = simple[a].iter().zip(&simple[b]).map(|(x, y)| x * y).sum();
                        q(d) * &scale_eps
                    })
                    .collect()
            })
            .collect();

        Ok(RootSystem {
            typ,
            rank,
            roots,
            npos,
            gram,
            model: Model {
                size,
                scale,
                vectors,
                coroots,
            },
        })
    }

    pub fn root_type(&self) -> RootType {
        self.typ
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All roots: positive roots by height, then their negatives.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.npos]
    }

    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.rank).map(|k| unit(self.rank, k, 1)).collect()
    }

    pub fn is_root(&self, r: &[i64]) -> bool {
        r.len() == self.rank && self.model.vectors.contains_key(r)
    }

    pub fn ensure_root(&self, r: &[i64]) -> Result<(), RootError> {
        if self.is_root(r) {
            Ok(())
        } else {
            Err(RootError::NotARoot(r.to_vec()))
        }
    }

    /// `⟨α, β⟩`, long roots of squared length 2.
    pub fn inner(&self, a: &[i64], b: &[i64]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    s += &self.gram[i][j] * q(x * y);
                }
            }
        }
        s
    }

    /// Entries `⟨α_i, α_j^∨⟩`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let s = self.simple_roots();
        s.iter()
            .map(|a| s.iter().map(|b| self.pairing(a, b)).collect())
            .collect()
    }

    /// `⟨β, α^∨⟩ = 2⟨β,α⟩/⟨α,α⟩`.
    pub fn pairing(&self, beta: &[i64], alpha: &[i64]) -> i64 {
        let v = q(2) * self.inner(beta, alpha) / self.inner(alpha, alpha);
        v.to_integer().to_i64().unwrap()
    }

    pub fn reflect(&self, alpha: &[i64], beta: &[i64]) -> Root {
        let k = self.pairing(beta, alpha);
        beta.iter().zip(alpha).map(|(b, a)| b - k * a).collect()
    }

    /// Every simple system, as the orbit of the default one under the Weyl
    /// group. Intended for small ranks.
    pub fn simple_systems(&self) -> Vec<Vec<Root>> {
        let start = self.simple_roots();
        let gens = self.simple_roots();
        let mut seen: BTreeSet<Vec<Root>> = BTreeSet::new();
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start);
        let mut out = Vec::new();
        while let Some(sys) = queue.pop_front() {
            for g in &gens {
                let next: Vec<Root> = sys.iter().map(|b| self.reflect(g, b)).collect();
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
            out.push(sys);
        }
        out
    }

    /// Coordinates of `r` relative to the simple system `pi`.
    pub fn coordinates_in(&self, pi: &[Root], r: &[i64]) -> Result<Vec<i64>, RootError> {
        let sys: Vec<Vec<BigRational>> = (0..self.rank)
            .map(|row| pi.iter().map(|s| q(s[row])).collect())
            .collect();
        let rhs: Vec<BigRational> = r.iter().map(|&x| q(x)).collect();
        let x = linalg::solve(&sys, &rhs).ok_or_else(|| RootError::NotASimpleSystem(pi.to_vec()))?;
        x.iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer().to_i64().unwrap())
                } else {
                    Err(RootError::NotASimpleSystem(pi.to_vec()))
                }
            })
            .collect()
    }

    fn check_simple_system(&self, pi: &[Root]) -> Result<(), RootError> {
        for r in pi {
            self.ensure_root(r)?;
        }
        if pi.len() != self.rank {
            return Err(RootError::NotASimpleSystem(pi.to_vec()));
        }
        for r in &self.roots {
            let c = self.coordinates_in(pi, r)?;
            if !(c.iter().all(|&x| x >= 0) || c.iter().all(|&x| x <= 0)) {
                return Err(RootError::NotASimpleSystem(pi.to_vec()));
            }
        }
        Ok(())
    }

    /// Positive roots for the simple system `pi`.
    pub fn positive_roots_for(&self, pi: &[Root]) -> Result<Vec<Root>, RootError> {
        self.check_simple_system(pi)?;
        let mut out = Vec::new();
        for r in &self.roots {
            if self.coordinates_in(pi, r)?.iter().all(|&x| x >= 0) {
                out.push(r.clone());
            }
        }
        Ok(out)
    }

    pub fn check_reductive_subset(&self, u: &[Root]) -> Result<bool, RootError> {
        for r in u {
            self.ensure_root(r)?;
        }
        let set: HashSet<&Root> = u.iter().collect();
        if !u.iter().all(|r| set.contains(&neg(r))) {
            return Ok(false);
        }
        Ok(self.closed_under_sums(u))
    }

    fn closed_under_sums(&self, s: &[Root]) -> bool {
        let set: HashSet<&Root> = s.iter().collect();
        for a in s {
            for b in s {
                let c = add(a, b);
                if self.is_root(&c) && !set.contains(&c) {
                    return false;
                }
            }
        }
        true
    }

    /// The Levi set `N = span(Δ) ∩ R`.
    pub fn levi_subset(&self, pi: &[Root], delta: &[Root]) -> Result<RootSubset, RootError> {
        self.check_simple_system(pi)?;
        let mut idx = Vec::new();
        for d in delta {
            match pi.iter().position(|p| p == d) {
                Some(i) => idx.push(i),
                None => return Err(RootError::NotSimple(d.clone())),
            }
        }
        let mut roots = Vec::new();
        for r in &self.roots {
            let c = self.coordinates_in(pi, r)?;
            if c.iter().enumerate().all(|(i, &x)| x == 0 || idx.contains(&i)) {
                roots.push(r.clone());
            }
        }
        Ok(RootSubset {
            roots,
            tag: SubsetTag::Levi,
        })
    }

    pub fn check_parabolic(&self, p: &[Root]) -> Result<bool, RootError> {
        for r in p {
            self.ensure_root(r)?;
        }
        let set: HashSet<&Root> = p.iter().collect();
        let covers = self
            .roots
            .iter()
            .all(|r| set.contains(r) || set.contains(&neg(r)));
        Ok(covers && self.closed_under_sums(p))
    }

    pub fn y_set_properties(&self, p: &[Root]) -> Result<YSetReport, RootError> {
        if !self.check_parabolic(p)? {
            return Err(RootError::NotParabolic);
        }
        let pset: HashSet<&Root> = p.iter().collect();
        let y: Vec<Root> = self
            .roots
            .iter()
            .filter(|r| !pset.contains(r))
            .cloned()
            .collect();
        let yset: HashSet<&Root> = y.iter().collect();
        let ya = y.iter().all(|a| !yset.contains(&neg(a)));
        let yb = self.closed_under_sums(&y);
        let mut yc = true;
        for a in &y {
            for b in self.roots.iter().filter(|b| !yset.contains(b)) {
                let d = sub(a, b);
                if self.is_root(&d) && !yset.contains(&d) {
                    yc = false;
                }
            }
        }
        Ok(YSetReport {
            y: RootSubset {
                roots: y,
                tag: SubsetTag::YSet,
            },
            ya,
            yb,
            yc,
        })
    }

    /// Root vector of `α` in the matrix model.
    fn vector(&self, r: &[i64]) -> &Sparse {
        &self.model.vectors[r]
    }

    pub fn form_of(&self, a: &[i64], b: &[i64]) -> BigRational {
        &self.model.scale * trace_of_product(self.vector(a), self.vector(b))
    }

    pub fn chevalley_constants(&self) -> StructureTable {
        let mut constants = BTreeMap::new();
        for a in &self.roots {
            for b in &self.roots {
                let s = add(a, b);
                if !self.is_root(&s) {
                    continue;
                }
                let m = commutator(self.vector(a), self.vector(b));
                let target = self.vector(&s);
                let (pos, val) = target.iter().next().unwrap();
                let c = m.get(pos).cloned().unwrap_or_else(BigRational::zero) / val;
                constants.insert((a.clone(), b.clone()), c);
            }
        }
        let pairings = self
            .roots
            .iter()
            .map(|r| (r.clone(), self.form_of(r, &neg(r))))
            .collect();
        StructureTable {
            constants,
            pairings,
        }
    }

    /// Bracket table and form of the full algebra in the basis of root
    /// vectors followed by the simple coroots.
    pub fn realize(&self) -> RealizedAlgebra {
        let mut mats: Vec<Sparse> = self.roots.iter().map(|r| self.vector(r).clone()).collect();
        let mut names: Vec<String> = self.roots.iter().map(|r| root_name(r)).collect();
        let nroots = mats.len();
        for (k, h) in self.model.coroots.iter().enumerate() {
            mats.push(h.clone());
            names.push(format!("H{}", k + 1));
        }
        let root_index: BTreeMap<Root, usize> =
            self.roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let cartan: Vec<usize> = (nroots..mats.len()).collect();

        // left inverse for reading Cartan coefficients off a diagonal
        let size = self.model.size;
        let diag_cols: Vec<Vec<BigRational>> = (0..size)
            .map(|i| {
                self.model
                    .coroots
                    .iter()
                    .map(|h| h.get(&(i, i)).cloned().unwrap_or_else(BigRational::zero))
                    .collect()
            })
            .collect();
        let transposed: Vec<Vec<BigRational>> = (0..self.rank)
            .map(|c| diag_cols.iter().map(|row| row[c].clone()).collect())
            .collect();
        let rows = linalg::rref(&transposed).1;
        let sub: Vec<Vec<BigRational>> = rows.iter().map(|&i| diag_cols[i].clone()).collect();
        let sub_inv = linalg::inverse(&sub).expect("coroots are independent");

        let decompose = |m: &Sparse| -> Vec<(usize, BigRational)> {
            let mut out = Vec::new();
            for (i, r) in self.roots.iter().enumerate() {
                let (pos, val) = self.vector(r).iter().next().unwrap();
                if let Some(x) = m.get(pos) {
                    out.push((i, x / val));
                }
            }
            for (k, row) in sub_inv.iter().enumerate() {
                let mut c = BigRational::zero();
                for (j, &ri) in rows.iter().enumerate() {
                    if let Some(x) = m.get(&(ri, ri)) {
                        c += &row[j] * x;
                    }
                }
                if !c.is_zero() {
                    out.push((nroots + k, c));
                }
            }
            out
        };

        let mut brackets = BTreeMap::new();
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let m = commutator(&mats[i], &mats[j]);
                if m.is_empty() {
                    continue;
                }
                let d = decompose(&m);
                debug_assert!(reconstructs(&m, &d, &mats));
                brackets.insert((i, j), d);
            }
        }
        let form = mats
            .iter()
            .map(|a| {
                mats.iter()
                    .map(|b| &self.model.scale * trace_of_product(a, b))
                    .collect()
            })
            .collect();
        RealizedAlgebra {
            names,
            brackets,
            form,
            root_index,
            cartan,
        }
    }
}

fn reconstructs(m: &Sparse, d: &[(usize, BigRational)], mats: &[Sparse]) -> bool {
    let mut acc = Sparse::new();
    for (k, c) in d {
        for (pos, v) in &mats[*k] {
            *acc.entry(*pos).or_insert_with(BigRational::zero) += c * v;
        }
    }
    acc.retain(|_, v| !v.is_zero());
    &acc == m
}

#[derive(Debug, Clone, Serialize)]
pub struct YSetReport {
    pub y: RootSubset,
    pub ya: bool,
    pub yb: bool,
    pub yc: bool,
}

impl YSetReport {
    pub fn all_hold(&self) -> bool {
        self.ya && self.yb && self.yc
    }
}

fn unit(n: usize, i: usize, v: i64) -> Vec<i64> {
    let mut u = vec![0; n];
    u[i] = v;
    u
}

pub fn neg(r: &[i64]) -> Root {
    r.iter().map(|x| -x).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> Root {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Root {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Basis name of a root vector: its coordinates, e.g. `E(1,1)`.
pub fn root_name(r: &[i64]) -> String {
    let c: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    format!("E({})", c.join(","))
}

/// Parses `a1`, `-a2`, `a1+a2`, `pm-a1` (both signs) style root tokens.
pub fn parse_roots(rank: usize, tok: &str) -> Result<Vec<Root>, String> {
    let tok = tok.trim();
    if let Some(rest) = tok.strip_prefix("pm-") {
        let r = parse_root(rank, rest)?;
        return Ok(vec![r.clone(), neg(&r)]);
    }
    Ok(vec![parse_root(rank, tok)?])
}

fn parse_root(rank: usize, s: &str) -> Result<Root, String> {
    let s = s.replace(' ', "");
    let bad = || format!("cannot parse root `{s}`");
    let mut r = vec![0; rank];
    let mut rest = s.as_str();
    if rest.is_empty() {
        return Err(bad());
    }
    while !rest.is_empty() {
        let mut sign = 1;
        if let Some(x) = rest.strip_prefix('-') {
            sign = -1;
            rest = x;
        } else if let Some(x) = rest.strip_prefix('+') {
            rest = x;
        }
        let end = rest[1..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
        let term = &rest[..end];
        rest = &rest[end..];
        let i = term.find('a').ok_or_else(bad)?;
        let coef = if i == 0 {
            1
        } else {
            term[..i].trim_end_matches('*').parse::<i64>().map_err(|_| bad())?
        };
        let k: usize = term[i + 1..].parse().map_err(|_| bad())?;
        if k == 0 || k > rank {
            return Err(bad());
        }
        r[k - 1] += sign * coef;
    }
    Ok(r)
}

/// Magnitudes of the structure constants, for reporting.
pub fn constant_magnitudes(t: &StructureTable) -> BTreeSet<BigRational> {
    t.constants.values().map(|c| c.abs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rs(t: RootType, n: usize) -> RootSystem {
        RootSystem::build(t, n).unwrap()
    }

    #[test]
    fn small_root_lists() {
        let a2 = rs(RootType::A, 2);
        let want: BTreeSet<Root> = [
            vec![1, 0],
            vec![0, 1],
            vec![1, 1],
            vec![-1, 0],
            vec![0, -1],
            vec![-1, -1],
        ]
        .into_iter()
        .collect();
        assert_eq!(a2.roots().iter().cloned().collect::<BTreeSet<_>>(), want);
        let a1 = rs(RootType::A, 1);
        assert_eq!(a1.roots(), &[vec![1], vec![-1]]);
        let b2 = rs(RootType::B, 2);
        assert_eq!(b2.roots().len(), 8);
        assert!(b2.is_root(&[1, 2]));
        assert!(!b2.is_root(&[2, 1]));
        assert_eq!(b2.inner(&[1, 2], &[1, 2]), q(2));
        assert_eq!(b2.inner(&[0, 1], &[0, 1]), q(1));
    }

    #[test]
    fn classical_counts() {
        for n in 1..=MAX_RANK {
            assert_eq!(rs(RootType::A, n).roots().len(), n * (n + 1));
        }
        for n in 2..=6 {
            assert_eq!(rs(RootType::B, n).roots().len(), 2 * n * n);
            assert_eq!(rs(RootType::C, n).roots().len(), 2 * n * n);
        }
        for n in 3..=6 {
            assert_eq!(rs(RootType::D, n).roots().len(), 2 * n * (n - 1));
        }
        assert!(RootSystem::build(RootType::D, 2).is_err());
        assert!(RootSystem::build(RootType::A, 0).is_err());
        assert!(RootSystem::build(RootType::A, MAX_RANK + 1).is_err());
    }

    #[test]
    fn cartan_matrices_are_bourbaki() {
        // entries ⟨α_i, α_j^∨⟩; α1 long in B2, short in C2
        assert_eq!(rs(RootType::B, 2).cartan_matrix(), vec![vec![2, -2], vec![-1, 2]]);
        assert_eq!(rs(RootType::C, 2).cartan_matrix(), vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!(
            rs(RootType::D, 4).cartan_matrix(),
            vec![
                vec![2, -1, 0, 0],
                vec![-1, 2, -1, -1],
                vec![0, -1, 2, 0],
                vec![0, -1, 0, 2]
            ]
        );
    }

    #[test]
    fn root_strings_match_cartan_integers() {
        for (t, n) in [(RootType::A, 3), (RootType::B, 3), (RootType::C, 3), (RootType::D, 4)] {
            let s = rs(t, n);
            for a in s.roots() {
                for b in s.roots() {
                    if b == a || *b == neg(a) {
                        continue;
                    }
                    let step = |k: i64| -> Root { b.iter().zip(a).map(|(x, y)| x + k * y).collect() };
                    let mut p = 0;
                    while s.is_root(&step(-(p + 1))) {
                        p += 1;
                    }
                    let mut qq = 0;
                    while s.is_root(&step(qq + 1)) {
                        qq += 1;
                    }
                    assert_eq!(p - qq, s.pairing(b, a), "{t}{n} {a:?} {b:?}");
                    assert!(p + qq <= 3);
                }
            }
        }
    }

    #[test]
    fn normalization_and_constants() {
        let a1 = rs(RootType::A, 1);
        let t = a1.chevalley_constants();
        assert!(t.pairings.values().all(|p| p.is_one()));
        let real = a1.realize();
        // [E_α, E_{-α}] is a nonzero Cartan element
        let br = &real.brackets[&(0, 1)];
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].0, 2);

        let a2 = rs(RootType::A, 2);
        let t = a2.chevalley_constants();
        let c12 = &t.constants[&(vec![1, 0], vec![0, 1])];
        let c21 = &t.constants[&(vec![0, 1], vec![1, 0])];
        assert_eq!(c12.abs(), q(1));
        assert_eq!(c12, &-c21);

        for (ty, n) in [(RootType::B, 2), (RootType::C, 2), (RootType::B, 3), (RootType::D, 4)] {
            let s = rs(ty, n);
            let t = s.chevalley_constants();
            assert!(t.pairings.values().all(|p| p.is_one()));
            for ((a, b), c) in &t.constants {
                assert!(!c.is_zero());
                assert_eq!(c, &-t.constants[&(b.clone(), a.clone())].clone());
            }
        }
        let b2 = rs(RootType::B, 2).chevalley_constants();
        let mags = constant_magnitudes(&b2);
        assert!(mags.iter().all(|m| *m == q(1) || *m == q(2)), "{mags:?}");
    }

    #[test]
    fn realized_algebra_satisfies_jacobi_and_invariance() {
        for (ty, n) in [(RootType::A, 2), (RootType::B, 2), (RootType::C, 3), (RootType::D, 4)] {
            let real = rs(ty, n).realize();
            let dim = real.names.len();
            let br = |i: usize, j: usize| -> Vec<BigRational> {
                let mut v = vec![BigRational::zero(); dim];
                let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
                if let Some(list) = real.brackets.get(&(a, b)) {
                    for (k, c) in list {
                        v[*k] += c * q(s);
                    }
                }
                v
            };
            let br_vec = |v: &[BigRational], j: usize| -> Vec<BigRational> {
                let mut out = vec![BigRational::zero(); dim];
                for (i, c) in v.iter().enumerate() {
                    if c.is_zero() || i == j {
                        continue;
                    }
                    for (k, d) in br(i, j).iter().enumerate() {
                        out[k] += c * d;
                    }
                }
                out
            };
            for a in 0..dim {
                for b in 0..dim {
                    for c in b + 1..dim {
                        // [[a,b],c] + [[b,c],a] + [[c,a],b]
                        let t1 = br_vec(&br(a, b), c);
                        let t2 = br_vec(&br(b, c), a);
                        let t3 = br_vec(&br(c, a), b);
                        for k in 0..dim {
                            assert!((&t1[k] + &t2[k] + &t3[k]).is_zero());
                        }
                        // ⟨[a,b],c⟩ + ⟨b,[a,c]⟩ = 0
                        let ab = br(a, b);
                        let ac = br(a, c);
                        let mut s = BigRational::zero();
                        for k in 0..dim {
                            s += &ab[k] * &real.form[k][c] + &real.form[b][k] * &ac[k];
                        }
                        assert!(s.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn induced_form_on_roots_matches_gram() {
        // ⟨α,β⟩ = ⟨[E_α,E_-α],[E_β,E_-β]⟩ when ⟨E_α,E_-α⟩ = 1
        for (ty, n) in [(RootType::A, 3), (RootType::B, 2), (RootType::C, 2), (RootType::D, 4)] {
            let s = rs(ty, n);
            let t = |r: &Root| commutator(s.vector(r), s.vector(&neg(r)));
            for a in s.positive_roots() {
                for b in s.positive_roots() {
                    let v = &s.model.scale * trace_of_product(&t(a), &t(b));
                    assert_eq!(v, s.inner(a, b), "{ty}{n} {a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn reductive_examples() {
        let a2 = rs(RootType::A, 2);
        assert!(a2.check_reductive_subset(&[vec![1, 0], vec![-1, 0]]).unwrap());
        assert!(!a2.check_reductive_subset(&[vec![1, 0]]).unwrap());
        assert!(!a2
            .check_reductive_subset(&[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]])
            .unwrap());
        assert_eq!(
            a2.check_reductive_subset(&[vec![2, 0]]),
            Err(RootError::NotARoot(vec![2, 0]))
        );
    }

    #[test]
    fn levi_examples() {
        let a2 = rs(RootType::A, 2);
        let pi = a2.simple_roots();
        let n = a2.levi_subset(&pi, &[vec![1, 0]]).unwrap();
        assert_eq!(n.roots, vec![vec![1, 0], vec![-1, 0]]);
        assert_eq!(a2.levi_subset(&pi, &pi).unwrap().roots.len(), 6);
        assert!(a2.levi_subset(&pi, &[vec![1, 1]]).is_err());

        let a3 = rs(RootType::A, 3);
        let n = a3.levi_subset(&a3.simple_roots(), &[vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        let want: BTreeSet<Root> = [vec![1, 0, 0], vec![-1, 0, 0], vec![0, 0, 1], vec![0, 0, -1]]
            .into_iter()
            .collect();
        assert_eq!(n.roots.into_iter().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn parabolic_and_y_examples() {
        let a2 = rs(RootType::A, 2);
        let pos = a2.positive_roots().to_vec();
        assert!(a2.check_parabolic(&pos).unwrap());
        let mut p = pos.clone();
        p.push(vec![-1, 0]);
        assert!(a2.check_parabolic(&p).unwrap());
        assert!(!a2.check_parabolic(&[vec![1, 0]]).unwrap());

        let mut p: Vec<Root> = pos.iter().map(|r| neg(r)).collect();
        p.push(vec![1, 0]);
        let rep = a2.y_set_properties(&p).unwrap();
        let y: BTreeSet<Root> = rep.y.roots.iter().cloned().collect();
        assert_eq!(y, [vec![0, 1], vec![1, 1]].into_iter().collect());
        assert!(rep.all_hold());

        let rep = a2.y_set_properties(a2.roots()).unwrap();
        assert!(rep.y.roots.is_empty() && rep.all_hold());
        assert_eq!(a2.y_set_properties(&[vec![1, 0]]).unwrap_err(), RootError::NotParabolic);

        let a3 = rs(RootType::A, 3);
        let mut p: Vec<Root> = a3.positive_roots().iter().map(|r| neg(r)).collect();
        p.push(vec![1, 0, 0]);
        assert!(a3.y_set_properties(&p).unwrap().all_hold());
    }

    #[test]
    fn weyl_orbit_of_simple_systems() {
        assert_eq!(rs(RootType::A, 2).simple_systems().len(), 6);
        assert_eq!(rs(RootType::B, 2).simple_systems().len(), 8);
        assert_eq!(rs(RootType::A, 3).simple_systems().len(), 24);
        let a2 = rs(RootType::A, 2);
        for pi in a2.simple_systems() {
            assert_eq!(a2.positive_roots_for(&pi).unwrap().len(), 3);
        }
        assert!(a2.positive_roots_for(&[vec![1, 0], vec![1, 1]]).is_err());
    }

    #[test]
    fn root_token_parsing() {
        assert_eq!(parse_roots(2, "a1").unwrap(), vec![vec![1, 0]]);
        assert_eq!(parse_roots(2, "pm-a1").unwrap(), vec![vec![1, 0], vec![-1, 0]]);
        assert_eq!(parse_roots(2, "a1+2a2").unwrap(), vec![vec![1, 2]]);
        assert_eq!(parse_roots(2, "-a1-a2").unwrap(), vec![vec![-1, -1]]);
        assert!(parse_roots(2, "").is_err());
        assert!(parse_roots(2, "a3").is_err());
    }
}
