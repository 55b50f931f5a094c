//! Dense Gaussian elimination over an exact field.

use num_rational::BigRational;
use num_traits::Zero;

use crate::scalarfield::FieldElement;

/// Exact field scalar usable by the elimination routines.
pub trait Scalar: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Panics on a zero divisor; elimination only divides by pivots.
    fn div(&self, o: &Self) -> Self;
}

impl Scalar for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        num_traits::One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for FieldElement {
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        self.context().zero()
    }
    fn one_like(&self) -> Self {
        self.context().one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// Reduced row echelon form. Returns the reduced rows and the pivot columns.
pub fn rref<T: Scalar>(rows: &[Vec<T>]) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].one_like().div(&m[r][c]);
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        for i in 0..m.len() {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..ncols {
                if !m[r][j].is_zero() {
                    m[i][j] = m[i][j].sub(&f.mul(&m[r][j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    rref(rows).1.len()
}

/// Some solution of `a x = b`, free variables set to zero.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    assert_eq!(a.len(), b.len());
    let n = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let zero = b.first().or_else(|| a.first().and_then(|r| r.first()))?.zero_like();
    let mut x = vec![zero; n];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = m[row][n].clone();
    }
    Some(x)
}

/// Basis of the right kernel `{x : a x = 0}`.
pub fn nullspace<T: Scalar>(a: &[Vec<T>], zero: &T) -> Vec<Vec<T>> {
    let n = a.first().map_or(0, |r| r.len());
    let (m, pivots) = rref(a);
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.zero_like(); n];
        v[free] = zero.one_like();
        for (row, &c) in pivots.iter().enumerate() {
            if !m[row][free].is_zero() {
                v[c] = zero.zero_like().sub(&m[row][free]);
            }
        }
        out.push(v);
    }
    out
}

pub fn inverse<T: Scalar>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let zero = a.first()?.first()?.zero_like();
    let one = zero.one_like();
    let aug: Vec<Vec<T>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}
