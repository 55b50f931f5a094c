//! One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

use std::process::ExitCode;
use std::time::Instant;

use dyntwist::abrr_star::orbit::Sl2Functions;
use dyntwist::abrr_star::{
    abrr_twist, abrr_twist_weighted, check_cdybe, check_dynamical_twist, classical_limit_r, sl2_uea, twist_context,
    u_lambda,
};
use dyntwist::dynr_classify::{
    build_coefficients, build_lagrangian, check_coefficient_conditions, check_in_m_omega, coefficients_to_tensor,
    recover_classification, CoefficientFamily, DynrSpec,
};
use dyntwist::lie_tensor::LieAlgebra;
use dyntwist::rootsys::{neg, parse_roots, Root, RootSystem, RootType};
use dyntwist::scalarfield::Context;
use dyntwist::twist_projection::{
    check_nondynamical_twist, closed_form_jv, closed_form_jv_weighted, cb_identity, project_twist,
    rising_factorial_projection, SplittingData,
};
use dyntwist::verma_oracle::compose_and_extract;

type Outcome = Result<(bool, String), String>;

struct Fixture {
    name: &'static str,
    typ: RootType,
    rank: usize,
    delta: &'static [&'static str],
    u: &'static str,
}

const FIXTURES: [Fixture; 4] = [
    Fixture { name: "A2 Δ={a1} U={±a1} t=1", typ: RootType::A, rank: 2, delta: &["a1"], u: "pm-a1" },
    Fixture { name: "A2 Δ={a1} U=∅", typ: RootType::A, rank: 2, delta: &["a1"], u: "" },
    Fixture { name: "A3 Δ={a1,a3} U={±a1}", typ: RootType::A, rank: 3, delta: &["a1", "a3"], u: "pm-a1" },
    Fixture { name: "B2 Δ={a1} U=∅", typ: RootType::B, rank: 2, delta: &["a1"], u: "" },
];

fn roots(rank: usize, toks: &[&str]) -> Vec<Root> {
    toks.iter().filter(|t| !t.is_empty()).flat_map(|t| parse_roots(rank, t).unwrap()).collect()
}

fn setup(f: &Fixture, ctx: &Context) -> Result<(RootSystem, DynrSpec, CoefficientFamily), String> {
    let rs = RootSystem::build(f.typ, f.rank).map_err(|e| e.to_string())?;
    let spec = DynrSpec::standard(&rs, ctx, &roots(f.rank, f.delta), &roots(f.rank, &[f.u])).map_err(|e| e.to_string())?;
    let fam = build_coefficients(&rs, ctx, &spec).map_err(|e| e.to_string())?;
    Ok((rs, spec, fam))
}

fn ctx() -> Context {
    Context::new(&["t1", "t2", "t3"])
}

fn classification_soundness() -> Outcome {
    let c = ctx();
    let mut notes = Vec::new();
    let mut ok = true;
    for f in &FIXTURES {
        let t = Instant::now();
        let (rs, spec, fam) = setup(f, &c)?;
        let rep = check_coefficient_conditions(&rs, &fam, &spec.u).map_err(|e| e.to_string())?;
        let g = LieAlgebra::from_root_system(&rs, &c, Some(&spec.u)).map_err(|e| e.to_string())?;
        let b = coefficients_to_tensor(&g, &fam).map_err(|e| e.to_string())?;
        let m = check_in_m_omega(&g, &b).map_err(|e| e.to_string())?;
        let pass = rep.all_pass() && m.holds() && t.elapsed().as_secs() < 60;
        ok &= pass;
        notes.push(format!("{}: {}", f.name, if pass { "ok" } else { "fail" }));
    }
    Ok((ok, notes.join("; ")))
}

fn round_trip() -> Outcome {
    let c = ctx();
    let mut ok = true;
    let mut notes = Vec::new();
    for f in &FIXTURES {
        let (rs, spec, fam) = setup(f, &c)?;
        let ws = recover_classification(&rs, &fam, &spec.u).map_err(|e| e.to_string())?;
        let reproduced = ws
            .iter()
            .all(|w| build_coefficients(&rs, &c, &w.spec).map(|b| b == fam).unwrap_or(false));
        let pass = !ws.is_empty() && reproduced;
        ok &= pass;
        notes.push(format!("{}: {} witness(es)", f.name, ws.len()));
    }
    Ok((ok, notes.join("; ")))
}

fn lagrangian() -> Outcome {
    let c = ctx();
    let (rs, spec, _) = setup(&FIXTURES[0], &c)?;
    let (_, rep) = build_lagrangian(&rs, &c, &spec).map_err(|e| e.to_string())?;
    let pass = rep.all_pass() && rep.dim_l == 8 && rep.dim_intersection_with_diagonal == 4;
    Ok((
        pass,
        format!(
            "dim l = {}, isotropic = {}, closed = {}, dim(l ∩ diag) = {}",
            rep.dim_l, rep.isotropic, rep.closed, rep.dim_intersection_with_diagonal
        ),
    ))
}

fn abrr() -> Outcome {
    let t = Instant::now();
    let u = sl2_uea(&twist_context());
    let j = abrr_twist(&u, 5).map_err(|e| e.to_string())?;
    let rep = check_dynamical_twist(&j, 5).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    Ok((rep.all_pass() && secs < 120.0, format!("orders 0..=5 zero, counit per order, {secs:.1}s")))
}

fn classical_limit() -> Outcome {
    let u = sl2_uea(&twist_context());
    let alg = u.algebra();
    let j = abrr_twist(&u, 1).map_err(|e| e.to_string())?;
    let r = classical_limit_r(&j).map_err(|e| e.to_string())?;
    let expected = u_lambda(alg).map_err(|e| e.to_string())?;
    let cdybe = check_cdybe(alg, &r.r, "h").map_err(|e| e.to_string())?;
    Ok((r.r == expected && cdybe.is_zero(), "r = (1/λ)(x⊗y − y⊗x), CDYBE residual zero".to_string()))
}

fn star_identities() -> Outcome {
    let u = sl2_uea(&twist_context());
    let fs = Sl2Functions::new(&u).map_err(|e| e.to_string())?;
    let rep = fs.verify_orbit_identities().map_err(|e| e.to_string())?;
    let pass = rep.product_formula.len() == 9
        && rep.product_formula.iter().all(|p| p.pass)
        && rep.commutator.iter().all(|p| p.pass)
        && rep.casimir_pass
        && rep.associativity_triples == 125
        && rep.associativity_failures == 0;
    Ok((
        pass,
        format!(
            "9 pairs, casimir = {}, {} associativity triples",
            rep.casimir_value, rep.associativity_triples
        ),
    ))
}

fn verma() -> Outcome {
    let c = twist_context();
    let one = c.one();
    let mut ok = true;
    let mut notes = Vec::new();
    for (v, w) in [(2, 2), (2, 4)] {
        let rep = compose_and_extract(&c, v, w, None, |_| one.clone()).map_err(|e| e.to_string())?;
        ok &= rep.pass();
        notes.push(format!("V{v}⊗V{w}: {}", rep.status));
    }
    let bad = compose_and_extract(&c, 2, 2, None, |n| if n == 1 { c.int(2) } else { one.clone() })
        .map_err(|e| e.to_string())?;
    ok &= !bad.pass();
    notes.push(format!("mutated: {} nonzero entries", bad.difference_terms.len()));
    Ok((ok, notes.join("; ")))
}

fn projection() -> Outcome {
    let u = sl2_uea(&twist_context());
    let sp = SplittingData::sl2(&u).map_err(|e| e.to_string())?;
    let mut ok = true;
    for n in 1..=6 {
        ok &= rising_factorial_projection(&sp, n).map_err(|e| e.to_string())?.equal;
        ok &= cb_identity(&sp, n).map_err(|e| e.to_string())?;
    }
    let j = abrr_twist(&u, 5).map_err(|e| e.to_string())?;
    let jv = project_twist(&j, &sp, &["h"]).map_err(|e| e.to_string())?;
    let closed = closed_form_jv(&sp, 5).map_err(|e| e.to_string())?;
    ok &= jv == closed;
    ok &= check_nondynamical_twist(&jv, 5).map_err(|e| e.to_string())?.all_pass();
    Ok((ok, "n ≤ 6, orders ≤ 5".into()))
}

fn mutations() -> Outcome {
    let mut notes = Vec::new();

    // conditions: x_α ↦ x_α + 1 on a pair ±α outside the Levi set, keeping
    // oddness; a Levi root alone would leave (d) untouched
    let c = ctx();
    let (rs, spec, fam) = setup(&FIXTURES[1], &c)?;
    let half = c.frac(1, 2);
    let a = rs
        .positive_roots()
        .iter()
        .find(|r| fam.get(r).map(|x| *x == half).unwrap_or(false))
        .ok_or("no root outside the Levi set")?
        .clone();
    let x = fam.get(&a).map_err(|e| e.to_string())?;
    let bent = fam.with(&a, x + &c.one()).with(&neg(&a), -&(x + &c.one()));
    let cond = !check_coefficient_conditions(&rs, &bent, &spec.u).map_err(|e| e.to_string())?.all_pass();
    notes.push(format!("conditions {cond}"));

    // dynamical twist equation: J_2 doubled
    let tc = twist_context();
    let u = sl2_uea(&tc);
    let two = tc.int(2);
    let one = tc.one();
    let w = |n: usize| if n == 2 { two.clone() } else { one.clone() };
    let j = abrr_twist_weighted(&u, 3, w).map_err(|e| e.to_string())?;
    let dyn_fail = check_dynamical_twist(&j, 3).map_err(|e| e.to_string())?.first_failure() == Some(2);
    notes.push(format!("twist equation {dyn_fail}"));

    // non-dynamical equation: v_2 doubled
    let sp = SplittingData::sl2(&u).map_err(|e| e.to_string())?;
    let jv = closed_form_jv_weighted(&sp, 3, w).map_err(|e| e.to_string())?;
    let nondyn = check_nondynamical_twist(&jv, 3).map_err(|e| e.to_string())?.first_failure() == Some(2);
    notes.push(format!("non-dynamical {nondyn}"));

    // oracle: J_1 doubled
    let bad = compose_and_extract(&tc, 2, 2, None, |n| if n == 1 { two.clone() } else { one.clone() })
        .map_err(|e| e.to_string())?;
    let oracle = !bad.pass();
    notes.push(format!("oracle {oracle}"));

    Ok((cond && dyn_fail && nondyn && oracle, format!("nonzero residuals: {}", notes.join(", "))))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 classification soundness", classification_soundness),
        ("2 converse round trip", round_trip),
        ("3 Lagrangian subalgebra", lagrangian),
        ("4 ABRR twist equation", abrr),
        ("5 classical limit and CDYBE", classical_limit),
        ("6 star-product identities", star_identities),
        ("7 Verma oracle", verma),
        ("8 twist projection", projection),
        ("9 mutation sensitivity", mutations),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name} ({:.1}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "NOTE criterion 10 excluded by design: the moduli bijection, infinite-dimensional statements and \
         quantum-group content are not finitely checkable; criteria 1-8 cover their finite shadows"
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
