//! Projection of a dynamical twist for `(g, h)` onto `Uv ⊗ Uv` along
//! `Ug·h`, for a complement subalgebra `v`, and the sl(2) example where
//! `v` is a conjugate of the Borel subalgebra.

use std::sync::Arc;

use serde::Serialize;

use crate::abrr_star::{series_mul, shift_twist, twist_equation, AbrrError, TwistEquationReport, TwistSeries, HBAR, LAMBDA};
use crate::lie_tensor::LieAlgebra;
use crate::scalarfield::FieldElement;
use crate::uea::{BasisChange, TensorUea, Uea, UeaElement, UeaError};

/// `g = h ⊕ v` with the PBW order `(v, h)` on the new generators.
pub struct SplittingData {
    pub change: BasisChange,
    pub v_gens: Vec<String>,
    pub h_gens: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BracketCheck {
    pub relation: String,
    pub holds: bool,
}

impl SplittingData {
    /// `v = g B g^{-1}` for `g = [[1,0],[s,1]]` and `B` upper triangular:
    /// `b = g(½h)g^{-1}`, `a = g(x + ½h)g^{-1}`, `c = −½h`.
    pub fn conjugated_borel(g_uea: &Arc<Uea>, s: i64) -> Result<Self, AbrrError> {
        let alg = g_uea.algebra();
        let ctx = alg.context();
        let (x, y, h) = (alg.index("x")?, alg.index("y")?, alg.index("h")?);
        let half = ctx.frac(1, 2);
        let si = ctx.int(s);
        let b = vec![(y, si.clone()), (h, half.clone())];
        let a = vec![
            (x, ctx.one()),
            (y, ctx.int(s - s * s)),
            (h, &half - &si),
        ];
        let c = vec![(h, -&half)];
        let change = BasisChange::new(g_uea, &[("b", b), ("a", a), ("c", c)])?;
        let sp = SplittingData {
            change,
            v_gens: vec!["b".into(), "a".into()],
            h_gens: vec!["c".into()],
        };
        sp.validate()?;
        Ok(sp)
    }

    /// The splitting `b = y + ½h`, `a = x − ½h`, `c = −½h`.
    pub fn sl2(g_uea: &Arc<Uea>) -> Result<Self, AbrrError> {
        Self::conjugated_borel(g_uea, 1)
    }

    pub fn new_uea(&self) -> &Arc<Uea> {
        &self.change.new
    }

    fn new_alg(&self) -> &LieAlgebra {
        self.change.new.algebra()
    }

    fn h_refs(&self) -> Vec<&str> {
        self.h_gens.iter().map(|s| s.as_str()).collect()
    }

    /// `v` closed under the bracket and `h` abelian, in the new basis.
    pub fn validate(&self) -> Result<(), AbrrError> {
        let alg = self.new_alg();
        let idx = |n: &String| alg.index(n);
        let vs: Vec<usize> = self.v_gens.iter().map(idx).collect::<Result<_, _>>()?;
        let hs: Vec<usize> = self.h_gens.iter().map(idx).collect::<Result<_, _>>()?;
        for &i in &vs {
            for &j in &vs {
                if alg.bracket(i, j).iter().any(|(k, _)| hs.contains(k)) {
                    return Err(UeaError::OrderMisconfigured("v is not a subalgebra".into()).into());
                }
            }
        }
        for &i in &hs {
            for &j in &hs {
                if !alg.bracket(i, j).is_empty() {
                    return Err(UeaError::OrderMisconfigured("h is not abelian".into()).into());
                }
            }
        }
        Ok(())
    }

    /// `[c,b] = b + c`, `[c,a] = c − a`, `[b,a] = a − b`.
    pub fn bracket_checks(&self) -> Vec<BracketCheck> {
        let u = self.new_uea();
        let g = |n: &str| UeaElement::generator(u, n).unwrap();
        let (a, b, c) = (g("a"), g("b"), g("c"));
        vec![
            BracketCheck {
                relation: "[c,b] = b + c".into(),
                holds: c.commutator(&b) == b.add(&c),
            },
            BracketCheck {
                relation: "[-c,a] = a - c".into(),
                holds: c.commutator(&a).scale(&u.context().int(-1)) == a.sub(&c),
            },
            BracketCheck {
                relation: "[b,a] = a - b".into(),
                holds: b.commutator(&a) == a.sub(&b),
            },
        ]
    }
}

/// `J` rewritten in the split basis, and its projection `J_v`.
pub fn rewrite_twist(j: &TwistSeries, sp: &SplittingData) -> Result<TwistSeries, AbrrError> {
    let coeffs = j
        .coeffs
        .iter()
        .map(|c| sp.change.tensor_to_new(c))
        .collect::<Result<_, _>>()?;
    Ok(TwistSeries { order: j.order, coeffs })
}

/// Projects every slot along `Ug·h`, for a series already in the split basis.
pub fn project_split(j: &TwistSeries, sp: &SplittingData) -> Result<TwistSeries, AbrrError> {
    let h = sp.h_refs();
    let coeffs = j
        .coeffs
        .iter()
        .map(|c| c.project_pi_v(&h))
        .collect::<Result<_, _>>()?;
    Ok(TwistSeries { order: j.order, coeffs })
}

/// `J_v`; the input must commute with `Δ(h)` order by order.
pub fn project_twist(j: &TwistSeries, sp: &SplittingData, cartan: &[&str]) -> Result<TwistSeries, AbrrError> {
    if !j.is_invariant(cartan)? {
        return Err(AbrrError::NotHInvariant);
    }
    project_split(&rewrite_twist(j, sp)?, sp)
}

/// `J_h = J − J_v` in the split basis.
pub fn complement_part(j: &TwistSeries, sp: &SplittingData, cartan: &[&str]) -> Result<TwistSeries, AbrrError> {
    let full = rewrite_twist(j, sp)?;
    let jv = project_twist(j, sp, cartan)?;
    Ok(TwistSeries {
        order: j.order,
        coeffs: full.coeffs.iter().zip(&jv.coeffs).map(|(a, b)| a.sub(b)).collect(),
    })
}

/// `b(b+1)…(b+n−1)`.
pub fn rising_factorial(u: &Arc<Uea>, gen: &str, n: u32) -> Result<UeaElement, UeaError> {
    let g = UeaElement::generator(u, gen)?;
    let mut acc = UeaElement::one(u);
    for j in 0..n {
        acc = acc.mul(&g.add(&UeaElement::scalar(u, u.context().int(j as i64))));
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RisingFactorialCheck {
    pub n: u32,
    pub brute_force: UeaElement,
    pub closed_form: UeaElement,
    pub equal: bool,
}

/// Projection of `(b+c)^n` by straightening, against `b(b+1)…(b+n−1)`.
pub fn rising_factorial_projection(sp: &SplittingData, n: u32) -> Result<RisingFactorialCheck, AbrrError> {
    let u = sp.new_uea();
    let bc = UeaElement::generator(u, "b")?.add(&UeaElement::generator(u, "c")?);
    let brute_force = bc.pow(n).project_pi_v(&sp.h_refs())?;
    let closed_form = rising_factorial(u, "b", n)?;
    Ok(RisingFactorialCheck {
        n,
        equal: brute_force == closed_form,
        brute_force,
        closed_form,
    })
}

/// `c b^n = b((b+1)^n − b^n) + (b+1)^n c`.
pub fn cb_identity(sp: &SplittingData, n: u32) -> Result<bool, AbrrError> {
    let u = sp.new_uea();
    let b = UeaElement::generator(u, "b")?;
    let c = UeaElement::generator(u, "c")?;
    let b1 = b.add(&UeaElement::one(u)).pow(n);
    let lhs = c.mul(&b.pow(n));
    let rhs = b.mul(&b1.sub(&b.pow(n))).add(&b1.mul(&c));
    Ok(lhs == rhs)
}

/// `1 + Σ_n (−1)^n ħ^n v_n / (n! λ(λ−ħ)…(λ−(n−1)ħ))`, expanded in `ħ`,
/// with `v_n` scaled by `weight(n)`.
pub fn closed_form_jv_weighted(
    sp: &SplittingData,
    order: usize,
    weight: impl Fn(usize) -> FieldElement,
) -> Result<TwistSeries, AbrrError> {
    let u = sp.new_uea();
    let ctx = u.context().clone();
    let lambda = ctx.var(LAMBDA)?;
    let hbar = ctx.var(HBAR)?;
    let mut out = TwistSeries::trivial(u, order);
    let mut fact = ctx.one();
    let mut denom = ctx.one();
    for n in 1..=order {
        fact = &fact * &ctx.int(n as i64);
        denom = &denom * &(&lambda - &(&hbar * &ctx.int(n as i64 - 1)));
        let sign = if n % 2 == 0 { ctx.one() } else { ctx.int(-1) };
        let series = denom.inv()?.series_expand(HBAR, order - n)?;
        let vn = TensorUea::pure(&[
            &rising_factorial(u, "b", n as u32)?,
            &rising_factorial(u, "a", n as u32)?,
        ]);
        let pre = &(&sign / &fact) * &weight(n);
        for (m, c) in series.coeffs.iter().enumerate() {
            out.coeffs[n + m] = out.coeffs[n + m].add(&vn.scale(&(&pre * c)));
        }
    }
    Ok(out)
}

pub fn closed_form_jv(sp: &SplittingData, order: usize) -> Result<TwistSeries, AbrrError> {
    let one = sp.new_uea().context().one();
    closed_form_jv_weighted(sp, order, |_| one.clone())
}

/// `J^{12,3}J^{12} = J^{1,23}J^{23}` and the counit identities, per order.
pub fn check_nondynamical_twist(jv: &TwistSeries, order: usize) -> Result<TwistEquationReport, AbrrError> {
    twist_equation(jv, order, None)
}

/// Per order: `(J_h^{12,3} J_v^{12})_v = 0` and `(J_h^{1,23} J_v^{23})_v = 0`.
pub fn cross_terms_vanish(j: &TwistSeries, sp: &SplittingData, cartan: &[&str], order: usize) -> Result<Vec<(bool, bool)>, AbrrError> {
    let jv = project_twist(j, sp, cartan)?.truncate(order)?;
    let jh = complement_part(j, sp, cartan)?.truncate(order)?;
    let h = sp.h_refs();
    let a: Vec<TensorUea> = jh.coeffs.iter().map(|c| c.coproduct_slot(0)).collect();
    let b: Vec<TensorUea> = jv.coeffs.iter().map(|c| c.insert_unit(2)).collect();
    let c: Vec<TensorUea> = jh.coeffs.iter().map(|c| c.coproduct_slot(1)).collect();
    let d: Vec<TensorUea> = jv.coeffs.iter().map(|c| c.insert_unit(0)).collect();
    let left = series_mul(&a, &b, order);
    let right = series_mul(&c, &d, order);
    left.iter()
        .zip(&right)
        .map(|(l, r)| Ok((l.project_pi_v(&h)?.is_zero(), r.project_pi_v(&h)?.is_zero())))
        .collect()
}

/// Per order: the projection of `J^{12,3} J(λ−ħh^{(3)})^{12}` equals
/// `J_v^{12,3} J_v^{12}`, and likewise for the right-hand side.
pub fn projected_sides_agree(j: &TwistSeries, sp: &SplittingData, cartan: &[&str], order: usize) -> Result<Vec<(bool, bool)>, AbrrError> {
    let j = j.truncate(order)?;
    let h = sp.h_refs();
    let shifted = shift_twist(&j, cartan, order)?;
    let j12_3: Vec<TensorUea> = j.coeffs.iter().map(|c| c.coproduct_slot(0)).collect();
    let j1_23: Vec<TensorUea> = j.coeffs.iter().map(|c| c.coproduct_slot(1)).collect();
    let j23: Vec<TensorUea> = j.coeffs.iter().map(|c| c.insert_unit(0)).collect();
    let lhs = series_mul(&j12_3, &shifted, order);
    let rhs = series_mul(&j1_23, &j23, order);
    let jv = project_twist(&j, sp, cartan)?;
    let v_lhs = series_mul(
        &jv.coeffs.iter().map(|c| c.coproduct_slot(0)).collect::<Vec<_>>(),
        &jv.coeffs.iter().map(|c| c.insert_unit(2)).collect::<Vec<_>>(),
        order,
    );
    let v_rhs = series_mul(
        &jv.coeffs.iter().map(|c| c.coproduct_slot(1)).collect::<Vec<_>>(),
        &jv.coeffs.iter().map(|c| c.insert_unit(0)).collect::<Vec<_>>(),
        order,
    );
    (0..=order)
        .map(|k| {
            let l = sp.change.tensor_to_new(&lhs[k])?.project_pi_v(&h)?;
            let r = sp.change.tensor_to_new(&rhs[k])?.project_pi_v(&h)?;
            Ok((l == v_lhs[k], r == v_rhs[k]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abrr_star::{abrr_twist, sl2_uea, twist_context};

    fn setup() -> (Arc<Uea>, SplittingData) {
        let u = sl2_uea(&twist_context());
        let sp = SplittingData::sl2(&u).unwrap();
        (u, sp)
    }

    #[test]
    fn split_brackets() {
        let (_, sp) = setup();
        assert!(sp.bracket_checks().iter().all(|c| c.holds));
        let (u, _) = setup();
        let ext = SplittingData::conjugated_borel(&u, 2).unwrap();
        assert!(ext.validate().is_ok());
    }

    #[test]
    fn rising_factorials() {
        let (_, sp) = setup();
        let u = sp.new_uea();
        let b = UeaElement::generator(u, "b").unwrap();
        let r1 = rising_factorial_projection(&sp, 1).unwrap();
        assert_eq!(r1.brute_force, b);
        let r2 = rising_factorial_projection(&sp, 2).unwrap();
        assert_eq!(r2.brute_force, b.mul(&b).add(&b));
        for n in 0..=6 {
            assert!(rising_factorial_projection(&sp, n).unwrap().equal);
            assert!(cb_identity(&sp, n).unwrap());
        }
        // through the change of basis as well
        let y = UeaElement::generator(&sp.change.old, "y").unwrap();
        for n in 1..=4 {
            let p = sp.change.to_new(&y.pow(n)).unwrap().project_pi_v(&["c"]).unwrap();
            assert_eq!(p, rising_factorial(u, "b", n).unwrap());
        }
    }

    #[test]
    fn projected_abrr_matches_closed_form() {
        let (u, sp) = setup();
        let j = abrr_twist(&u, 4).unwrap();
        let jv = project_twist(&j, &sp, &["h"]).unwrap();
        assert_eq!(jv.coeffs[0], TensorUea::one(sp.new_uea(), 2));
        let nu = sp.new_uea();
        let (b, a) = (UeaElement::generator(nu, "b").unwrap(), UeaElement::generator(nu, "a").unwrap());
        let l = nu.context().var(LAMBDA).unwrap();
        assert_eq!(jv.coeffs[1], TensorUea::pure(&[&b, &a]).scale(&-&l.inv().unwrap()));
        assert_eq!(jv, closed_form_jv(&sp, 4).unwrap());
        assert_eq!(project_split(&jv, &sp).unwrap(), jv);
        assert!(check_nondynamical_twist(&jv, 4).unwrap().all_pass());
    }

    #[test]
    fn mutation_and_trivial() {
        let (_, sp) = setup();
        let nu = sp.new_uea();
        let ctx = nu.context().clone();
        assert!(check_nondynamical_twist(&TwistSeries::trivial(nu, 3), 3).unwrap().all_pass());
        let bad = closed_form_jv_weighted(&sp, 3, |n| if n == 2 { ctx.int(2) } else { ctx.one() }).unwrap();
        assert_eq!(check_nondynamical_twist(&bad, 3).unwrap().first_failure(), Some(2));
    }

    #[test]
    fn noninvariant_input_rejected() {
        let (u, sp) = setup();
        let mut j = TwistSeries::trivial(&u, 1);
        let x = UeaElement::generator(&u, "x").unwrap();
        let one = UeaElement::one(&u);
        j.coeffs[1] = TensorUea::pure(&[&x, &one]);
        assert!(matches!(project_twist(&j, &sp, &["h"]), Err(AbrrError::NotHInvariant)));
    }

    #[test]
    fn proof_steps_hold() {
        let (u, sp) = setup();
        let j = abrr_twist(&u, 3).unwrap();
        assert!(cross_terms_vanish(&j, &sp, &["h"], 3).unwrap().iter().all(|(a, b)| *a && *b));
        assert!(projected_sides_agree(&j, &sp, &["h"], 3).unwrap().iter().all(|(a, b)| *a && *b));
    }

    #[test]
    fn second_splitting_gives_a_twist() {
        let (u, _) = setup();
        let sp = SplittingData::conjugated_borel(&u, 2).unwrap();
        let j = abrr_twist(&u, 3).unwrap();
        let jv = project_twist(&j, &sp, &["h"]).unwrap();
        assert!(check_nondynamical_twist(&jv, 3).unwrap().all_pass());
    }
}
