use dyntwist::dynr_classify::{
    build_coefficients, build_lagrangian, check_coefficient_conditions, check_condition_c_equivalent, CoefficientFamily,
    check_in_m_omega, coefficients_to_tensor, recover_classification, DynrError, DynrSpec,
};
use dyntwist::lie_tensor::LieAlgebra;
use dyntwist::rootsys::{neg, Root, RootSystem, RootType};
use dyntwist::scalarfield::{Context, FieldElement};
use proptest::prelude::*;

fn ctx() -> Context {
    Context::new(&["t1", "t2", "t3"])
}

const SYSTEMS: [(RootType, usize); 4] = [
    (RootType::A, 2),
    (RootType::A, 3),
    (RootType::B, 2),
    (RootType::C, 3),
];

/// Rational values for the parameters, avoiding the excluded `0` and `1`.
const VALUES: [(i64, i64); 6] = [(2, 1), (3, 1), (-1, 1), (1, 2), (-2, 3), (5, 1)];

#[derive(Debug, Clone)]
struct Case {
    sys: usize,
    delta_mask: u32,
    u_pick: usize,
    symbolic: bool,
    values: Vec<usize>,
}

fn case() -> impl Strategy<Value = Case> {
    (0..SYSTEMS.len(), 0u32..8, 0usize..4, any::<bool>(), prop::collection::vec(0..VALUES.len(), 3)).prop_map(
        |(sys, delta_mask, u_pick, symbolic, values)| Case {
            sys,
            delta_mask,
            u_pick,
            symbolic,
            values,
        },
    )
}

/// A valid specification: Δ from the mask, U either empty, `±δ` for one
/// δ ∈ Δ, or all of `N`.
fn spec_for(rs: &RootSystem, c: &Context, case: &Case) -> DynrSpec {
    let pi = rs.simple_roots();
    let delta: Vec<Root> = pi
        .iter()
        .enumerate()
        .filter(|(i, _)| case.delta_mask >> i & 1 == 1)
        .map(|(_, r)| r.clone())
        .collect();
    let u: Vec<Root> = match (case.u_pick, delta.first()) {
        (1, Some(d)) => vec![d.clone(), neg(d)],
        (2, Some(_)) => rs.levi_subset(&pi, &delta).unwrap().roots,
        _ => vec![],
    };
    let mut spec = DynrSpec::standard(rs, c, &delta, &u).unwrap();
    if !case.symbolic {
        for (k, d) in delta.iter().enumerate() {
            if !u.contains(d) {
                let (n, m) = VALUES[case.values[k % 3]];
                spec.t.insert(d.clone(), c.frac(n, m));
            }
        }
    }
    spec
}

/// Concrete values can multiply to `t_α = 1` on a non-simple Levi root,
/// which is a genuine pole of the family; such cases are rejected.
fn family(rs: &RootSystem, c: &Context, spec: &DynrSpec) -> Result<CoefficientFamily, TestCaseError> {
    match build_coefficients(rs, c, spec) {
        Ok(f) => Ok(f),
        Err(DynrError::Pole(r)) => {
            prop_assert!(!spec.delta.contains(&r), "pole at a simple root {:?}", r);
            Err(TestCaseError::reject("t = 1 on a Levi root"))
        }
        Err(e) => Err(TestCaseError::fail(format!("{e}"))),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn built_families_are_classified(case in case()) {
        let c = ctx();
        let (typ, rank) = SYSTEMS[case.sys];
        let rs = RootSystem::build(typ, rank).unwrap();
        let spec = spec_for(&rs, &c, &case);
        let fam = family(&rs, &c, &spec)?;
        let rep = check_coefficient_conditions(&rs, &fam, &spec.u).unwrap();
        prop_assert!(rep.all_pass(), "{:?}", rep);
        prop_assert!(check_condition_c_equivalent(&rs, &fam, &spec.u).unwrap().pass);

        let g = LieAlgebra::from_root_system(&rs, &c, Some(&spec.u)).unwrap();
        let b = coefficients_to_tensor(&g, &fam).unwrap();
        prop_assert!(check_in_m_omega(&g, &b).unwrap().holds());

        let witnesses = recover_classification(&rs, &fam, &spec.u).unwrap();
        prop_assert!(!witnesses.is_empty());
        for w in &witnesses {
            prop_assert_eq!(&build_coefficients(&rs, &c, &w.spec).unwrap(), &fam);
        }
    }

    #[test]
    fn condition_checker_agrees_with_tensor_oracle(case in case(), root in 0usize..64, value in 0usize..6) {
        let c = ctx();
        let (typ, rank) = SYSTEMS[case.sys];
        let rs = RootSystem::build(typ, rank).unwrap();
        let spec = spec_for(&rs, &c, &case);
        let fam = family(&rs, &c, &spec)?;
        // quasi-unitary mutation: x_α and x_{-α} changed together
        let r = rs.roots()[root % rs.roots().len()].clone();
        let (n, m) = [(1, 2), (-1, 2), (0, 1), (1, 3), (3, 2), (-1, 5)][value];
        let v: FieldElement = c.frac(n, m);
        let mutated = fam.with(&r, v.clone()).with(&neg(&r), -&v);
        let g = LieAlgebra::from_root_system(&rs, &c, Some(&spec.u)).unwrap();
        let verdict = check_coefficient_conditions(&rs, &mutated, &spec.u).unwrap().all_pass();
        let oracle = check_in_m_omega(&g, &coefficients_to_tensor(&g, &mutated).unwrap()).unwrap().holds();
        prop_assert_eq!(verdict, oracle);
        // breaking oddness breaks quasi-unitarity
        let odd = fam.with(&r, &fam.x[&r] + &c.one());
        prop_assert_eq!(
            check_in_m_omega(&g, &coefficients_to_tensor(&g, &odd).unwrap()),
            Err(DynrError::QuasiUnitarity)
        );
    }
}

#[test]
fn lagrangian_checks_on_small_systems() {
    let c = ctx();
    for (typ, rank) in [(RootType::A, 2), (RootType::B, 2)] {
        let rs = RootSystem::build(typ, rank).unwrap();
        for mask in 0..4u32 {
            for u_pick in 0..3 {
                let case = Case {
                    sys: 0,
                    delta_mask: mask,
                    u_pick,
                    symbolic: true,
                    values: vec![0, 0, 0],
                };
                let spec = spec_for(&rs, &c, &case);
                let (_, rep) = build_lagrangian(&rs, &c, &spec).unwrap();
                assert!(rep.all_pass(), "{typ}{rank} {mask} {u_pick}: {rep:?}");
                assert_eq!(rep.dim_l, rep.dim_g);
            }
        }
    }
}
