//! The ABRR dynamical twist for sl(2), the shifted twist equation, the
//! classical limit, and the star-product on functions of SL(2)/H.

pub mod orbit;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::lie_tensor::{alt, prepend, LieAlgebra, LieError, Tensor2, Tensor3};
use crate::scalarfield::{Context, FieldElement, FieldError};
use crate::uea::{TensorUea, Uea, UeaElement, UeaError};

pub use orbit::{OrbitFunction, StarMode};

pub const LAMBDA: &str = "lambda";
pub const HBAR: &str = "hbar";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbrrError {
    #[error(transparent)]
    Uea(#[from] UeaError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("dynamical shift needs a one-dimensional Cartan, got {0} generators")]
    UnsupportedCartan(usize),
    #[error("series truncated at order {have}, order {want} requested")]
    Truncation { have: usize, want: usize },
    #[error("input is not h-invariant")]
    NotHInvariant,
    #[error("coefficient is not in g ⊗ g: {0}")]
    NotLinear(String),
}

/// Parameters `lambda, hbar`.
pub fn twist_context() -> Context {
    Context::new(&[LAMBDA, HBAR])
}

/// `U(sl2)` with PBW order `y, h, x`.
pub fn sl2_uea(ctx: &Context) -> Arc<Uea> {
    Uea::new(LieAlgebra::sl2(ctx), &["y", "h", "x"]).expect("sl(2) generators")
}

/// `Σ_k ħ^k J_k`, truncated at `ħ^order`; each `J_k` is a two-slot tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistSeries {
    pub order: usize,
    pub coeffs: Vec<TensorUea>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TwistTermJson {
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub coeff: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TwistOrderJson {
    pub k: usize,
    pub terms: Vec<TwistTermJson>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TwistJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub gens: Vec<String>,
    pub orders: Vec<TwistOrderJson>,
}

impl TwistSeries {
    pub fn trivial(uea: &Arc<Uea>, order: usize) -> Self {
        let mut coeffs = vec![TensorUea::one(uea, 2)];
        coeffs.extend((0..order).map(|_| TensorUea::zero(uea, 2)));
        TwistSeries { order, coeffs }
    }

    pub fn uea(&self) -> &Arc<Uea> {
        self.coeffs[0].uea()
    }

    pub fn truncate(&self, order: usize) -> Result<Self, AbrrError> {
        if order > self.order {
            return Err(AbrrError::Truncation {
                have: self.order,
                want: order,
            });
        }
        Ok(TwistSeries {
            order,
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// `(ε⊗id)J_k` and `(id⊗ε)J_k` equal `δ_{k0}` for every k.
    pub fn counit_holds(&self) -> Vec<(bool, bool)> {
        let uea = self.uea();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let want = if k == 0 {
                    TensorUea::one(uea, 1)
                } else {
                    TensorUea::zero(uea, 1)
                };
                (c.counit_slot(0) == want, c.counit_slot(1) == want)
            })
            .collect()
    }

    /// Every coefficient commutes with `Δ(z)` for the listed generators.
    pub fn is_invariant(&self, gens: &[&str]) -> Result<bool, AbrrError> {
        let uea = self.uea();
        let one = UeaElement::one(uea);
        for g in gens {
            let z = UeaElement::generator(uea, g)?;
            let dz = TensorUea::pure(&[&z, &one]).add(&TensorUea::pure(&[&one, &z]));
            for c in &self.coeffs {
                if !dz.mul(c).sub(&c.mul(&dz)).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> TwistJson {
        TwistJson {
            n: self.order,
            gens: self.uea().names().to_vec(),
            orders: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| TwistOrderJson {
                    k,
                    terms: c
                        .terms()
                        .iter()
                        .map(|(key, v)| TwistTermJson {
                            left: key[0].clone(),
                            right: key[1].clone(),
                            coeff: v.to_string(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Truncated product of two `ħ`-series of tensors.
pub fn series_mul(a: &[TensorUea], b: &[TensorUea], order: usize) -> Vec<TensorUea> {
    (0..=order)
        .map(|k| {
            let mut acc = TensorUea::zero(a[0].uea(), a[0].slots());
            for i in 0..=k {
                if i < a.len() && k - i < b.len() && !a[i].is_zero() && !b[k - i].is_zero() {
                    acc = acc.add(&a[i].mul(&b[k - i]));
                }
            }
            acc
        })
        .collect()
}

/// ABRR twist with every `J_n` multiplied by `weight(n)`; the identity
/// weight gives the twist itself, anything else is a perturbation.
pub fn abrr_twist_weighted(
    uea: &Arc<Uea>,
    order: usize,
    weight: impl Fn(usize) -> FieldElement,
) -> Result<TwistSeries, AbrrError> {
    let ctx = uea.context().clone();
    let lambda = ctx.var(LAMBDA)?;
    let y = UeaElement::generator(uea, "y")?;
    let x = UeaElement::generator(uea, "x")?;
    let h = UeaElement::generator(uea, "h")?;
    let mut out = TwistSeries::trivial(uea, order);
    let mut fact = ctx.one();
    for n in 1..=order {
        fact = &fact * &ctx.int(n as i64);
        let room = order - n;
        // Π_{j<n} Σ_m ħ^m (h+j)^m / λ^{m+1}, as an ħ-series of polynomials in h
        let mut prod: Vec<UeaElement> = vec![UeaElement::one(uea)];
        prod.extend((0..room).map(|_| UeaElement::zero(uea)));
        for j in 0..n {
            let hj = h.add(&UeaElement::scalar(uea, ctx.int(j as i64)));
            let mut factor = Vec::with_capacity(room + 1);
            let mut p = UeaElement::one(uea);
            for m in 0..=room {
                factor.push(p.scale(&lambda.pow(-(m as i32) - 1)?));
                p = p.mul(&hj);
            }
            prod = (0..=room)
                .map(|k| {
                    (0..=k).fold(UeaElement::zero(uea), |acc, i| {
                        acc.add(&prod[i].mul(&factor[k - i]))
                    })
                })
                .collect();
        }
        let sign = if n % 2 == 0 { ctx.one() } else { ctx.int(-1) };
        let pre = &(&sign / &fact) * &weight(n);
        let yn = y.pow(n as u32);
        let xn = x.pow(n as u32);
        for (m, p) in prod.iter().enumerate() {
            let t = TensorUea::pure(&[&yn, &xn.mul(p)]).scale(&pre);
            out.coeffs[n + m] = out.coeffs[n + m].add(&t);
        }
    }
    Ok(out)
}

pub fn abrr_twist(uea: &Arc<Uea>, order: usize) -> Result<TwistSeries, AbrrError> {
    let one = uea.context().one();
    abrr_twist_weighted(uea, order, |_| one.clone())
}

/// `J(λ − ħh^{(3)})^{12} = Σ_m (−ħ)^m/m! ∂_λ^m J(λ) ⊗ h^m`, truncated.
pub fn shift_twist(j: &TwistSeries, cartan: &[&str], order: usize) -> Result<Vec<TensorUea>, AbrrError> {
    if cartan.len() != 1 {
        return Err(AbrrError::UnsupportedCartan(cartan.len()));
    }
    if order > j.order {
        return Err(AbrrError::Truncation {
            have: j.order,
            want: order,
        });
    }
    let uea = j.uea();
    let ctx = uea.context().clone();
    let hpos = uea.position(cartan[0])?;
    let mut out: Vec<TensorUea> = (0..=order).map(|_| TensorUea::zero(uea, 3)).collect();
    for (b, jb) in j.coeffs[..=order].iter().enumerate() {
        let mut deriv = jb.clone();
        let mut fact = ctx.one();
        for m in 0..=order - b {
            if m > 0 {
                deriv = deriv.map_coefficients(|c| c.differentiate(LAMBDA).expect("lambda in context"));
                fact = &fact * &ctx.int(m as i64);
            }
            if deriv.is_zero() {
                break;
            }
            let sign = if m % 2 == 0 { ctx.one() } else { ctx.int(-1) };
            let s = &sign / &fact;
            let mut hm = vec![0; uea.ngens()];
            hm[hpos] = m as u32;
            let mut t = TensorUea::zero(uea, 3);
            for (key, c) in deriv.terms() {
                let mut k3 = key.clone();
                k3.push(hm.clone());
                t.add_term(k3, c * &s);
            }
            out[b + m] = out[b + m].add(&t);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct OrderResidual {
    pub k: usize,
    pub residual: TensorUea,
}

impl OrderResidual {
    pub fn is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Debug, Clone)]
pub struct TwistEquationReport {
    pub orders: Vec<OrderResidual>,
    pub counit: Vec<(bool, bool)>,
}

impl TwistEquationReport {
    pub fn all_pass(&self) -> bool {
        self.orders.iter().all(|o| o.is_zero()) && self.counit.iter().all(|(a, b)| *a && *b)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.orders.iter().find(|o| !o.is_zero()).map(|o| o.k)
    }
}

/// Per-order residual of `J^{12,3} S − J^{1,23} J^{23}` where `S` is the
/// shifted `J^{12}` (dynamical) or `J^{12}` itself.
pub fn twist_equation(
    j: &TwistSeries,
    order: usize,
    shift: Option<&[&str]>,
) -> Result<TwistEquationReport, AbrrError> {
    let j = j.truncate(order)?;
    let j12_3: Vec<TensorUea> = j.coeffs.iter().map(|c| c.coproduct_slot(0)).collect();
    let j1_23: Vec<TensorUea> = j.coeffs.iter().map(|c| c.coproduct_slot(1)).collect();
    let j23: Vec<TensorUea> = j.coeffs.iter().map(|c| c.insert_unit(0)).collect();
    let j12: Vec<TensorUea> = match shift {
        Some(cartan) => shift_twist(&j, cartan, order)?,
        None => j.coeffs.iter().map(|c| c.insert_unit(2)).collect(),
    };
    let lhs = series_mul(&j12_3, &j12, order);
    let rhs = series_mul(&j1_23, &j23, order);
    Ok(TwistEquationReport {
        orders: lhs
            .iter()
            .zip(&rhs)
            .enumerate()
            .map(|(k, (l, r))| OrderResidual {
                k,
                residual: l.sub(r),
            })
            .collect(),
        counit: j.counit_holds(),
    })
}

/// The dynamical twist equation with the `λ − ħh^{(3)}` shift.
pub fn check_dynamical_twist(j: &TwistSeries, order: usize) -> Result<TwistEquationReport, AbrrError> {
    twist_equation(j, order, Some(&["h"]))
}

/// `r = j − j^{21}` with the classical twist `j` as an element of `g ⊗ g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalRMatrix {
    pub j: Tensor2,
    pub r: Tensor2,
    /// `r + r^{21}`.
    pub symmetric: Tensor2,
}

fn tensor_to_lie(uea: &Uea, t: &TensorUea) -> Result<Tensor2, AbrrError> {
    let mut out = Tensor2::new();
    for (key, c) in t.terms() {
        let mut idx = [0usize; 2];
        for (s, m) in key.iter().enumerate() {
            let nz: Vec<usize> = (0..m.len()).filter(|&p| m[p] > 0).collect();
            if nz.len() != 1 || m[nz[0]] != 1 {
                return Err(AbrrError::NotLinear(t.to_string()));
            }
            idx[s] = uea.basis_index(nz[0]);
        }
        out.add_term(idx, c.clone());
    }
    Ok(out)
}

/// The `ħ¹` coefficient of the formal twist is the `ħ¹` coefficient of
/// the `ħ = 1` twist at `λ/ħ`, since `J_ħ(λ) = J_1(λ/ħ)` termwise.
pub fn classical_limit_r(j: &TwistSeries) -> Result<DynamicalRMatrix, AbrrError> {
    if j.order < 1 {
        return Err(AbrrError::Truncation { have: j.order, want: 1 });
    }
    let jt = tensor_to_lie(j.uea(), &j.coeffs[1])?;
    let r = jt.sub(&jt.flip());
    let symmetric = r.add(&r.flip());
    Ok(DynamicalRMatrix { j: jt, r, symmetric })
}

/// `Alt(h ⊗ ∂r/∂λ) + CYB(r)` for a one-dimensional Cartan spanned by `h`.
pub fn check_cdybe(alg: &LieAlgebra, r: &Tensor2, h: &str) -> Result<Tensor3, AbrrError> {
    let hi = alg.index(h)?;
    let dr = r.map_coefficients(|c| c.differentiate(LAMBDA).expect("lambda in context"));
    Ok(alt(&prepend(hi, &dr)).add(&alg.cyb(r)))
}

/// `u_λ = (1/λ)(x⊗y − y⊗x)`.
pub fn u_lambda(alg: &LieAlgebra) -> Result<Tensor2, AbrrError> {
    let ctx = alg.context();
    let inv = ctx.var(LAMBDA)?.inv()?;
    let (x, y) = (alg.index("x")?, alg.index("y")?);
    Ok(Tensor2::from_terms([([x, y], inv.clone()), ([y, x], -&inv)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Context, Arc<Uea>) {
        let c = twist_context();
        let u = sl2_uea(&c);
        (c, u)
    }

    fn g(u: &Arc<Uea>, n: &str) -> UeaElement {
        UeaElement::generator(u, n).unwrap()
    }

    #[test]
    fn low_order_coefficients() {
        let (c, u) = setup();
        let j = abrr_twist(&u, 2).unwrap();
        assert_eq!(j.coeffs[0], TensorUea::one(&u, 2));
        let l = c.var(LAMBDA).unwrap();
        let (x, y, h) = (g(&u, "x"), g(&u, "y"), g(&u, "h"));
        let want1 = TensorUea::pure(&[&y, &x]).scale(&-&l.inv().unwrap());
        assert_eq!(j.coeffs[1], want1);
        // ħ²: −(1/λ²) y⊗xh + (1/2)(1/λ²) y²⊗x²
        let l2 = l.pow(-2).unwrap();
        let want2 = TensorUea::pure(&[&y, &x.mul(&h)])
            .scale(&-&l2)
            .add(&TensorUea::pure(&[&y.pow(2), &x.pow(2)]).scale(&(&l2 * &c.frac(1, 2))));
        assert_eq!(j.coeffs[2], want2);
    }

    #[test]
    fn counit_and_invariance() {
        let (_, u) = setup();
        let j = abrr_twist(&u, 4).unwrap();
        assert!(j.counit_holds().iter().all(|(a, b)| *a && *b));
        assert!(j.is_invariant(&["h"]).unwrap());
        assert!(!j.is_invariant(&["x"]).unwrap());
    }

    #[test]
    fn shift_low_orders() {
        let (c, u) = setup();
        let j = abrr_twist(&u, 2).unwrap();
        let s = shift_twist(&j, &["h"], 2).unwrap();
        assert_eq!(s[0], TensorUea::one(&u, 3));
        assert_eq!(s[1], j.coeffs[1].insert_unit(2));
        let (x, y, h) = (g(&u, "x"), g(&u, "y"), g(&u, "h"));
        let l2 = c.var(LAMBDA).unwrap().pow(-2).unwrap();
        let cross = TensorUea::pure(&[&y, &x, &h]).scale(&-&l2);
        assert_eq!(s[2], j.coeffs[2].insert_unit(2).add(&cross));
        assert!(matches!(shift_twist(&j, &["h", "x"], 2), Err(AbrrError::UnsupportedCartan(2))));
    }

    #[test]
    fn twist_equation_through_order_three() {
        let (c, u) = setup();
        let j = abrr_twist(&u, 3).unwrap();
        assert!(check_dynamical_twist(&j, 3).unwrap().all_pass());
        let triv = TwistSeries::trivial(&u, 3);
        assert!(check_dynamical_twist(&triv, 3).unwrap().all_pass());
        let bad = abrr_twist_weighted(&u, 3, |n| if n == 2 { c.int(2) } else { c.one() }).unwrap();
        let rep = check_dynamical_twist(&bad, 3).unwrap();
        assert_eq!(rep.first_failure(), Some(2));
        // the unshifted equation fails for ABRR
        assert!(!twist_equation(&j, 2, None).unwrap().all_pass());
    }

    #[test]
    fn classical_limit_and_cdybe() {
        let (c, u) = setup();
        let alg = u.algebra();
        let j = abrr_twist(&u, 1).unwrap();
        let r = classical_limit_r(&j).unwrap();
        assert_eq!(r.r, u_lambda(alg).unwrap());
        assert!(r.symmetric.is_zero());
        assert!(check_cdybe(alg, &r.r, "h").unwrap().is_zero());

        let triv = classical_limit_r(&TwistSeries::trivial(&u, 1)).unwrap();
        assert!(triv.r.is_zero());
        assert!(check_cdybe(alg, &triv.r, "h").unwrap().is_zero());

        let (x, y) = (alg.index("x").unwrap(), alg.index("y").unwrap());
        let half = c.frac(1, 2);
        let constant = Tensor2::from_terms([([x, y], half.clone()), ([y, x], -&half)]);
        assert!(!check_cdybe(alg, &constant, "h").unwrap().is_zero());
    }

    #[test]
    fn json_shape() {
        let (_, u) = setup();
        let j = abrr_twist(&u, 1).unwrap();
        let v = serde_json::to_value(j.to_json()).unwrap();
        assert_eq!(v["N"], 1);
        assert_eq!(v["orders"][1]["terms"][0]["left"], serde_json::json!([1, 0, 0]));
        assert_eq!(v["orders"][1]["terms"][0]["coeff"], "-1/(lambda)");
    }
}
