use dyntwist::scalarfield::{Context, FieldElement};
use proptest::prelude::*;

fn ctx() -> Context {
    thread_local! {
        static CTX: Context = Context::new(&["lambda", "hbar", "t1"]);
    }
    CTX.with(|c| c.clone())
}

/// Small random polynomial in the three parameters.
fn poly() -> impl Strategy<Value = FieldElement> {
    prop::collection::vec((-4i64..=4, 0u32..3, 0u32..2, 0u32..2), 1..4).prop_map(|terms| {
        let c = ctx();
        let vars = ["lambda", "hbar", "t1"].map(|n| c.var(n).unwrap());
        terms.into_iter().fold(c.zero(), |acc, (k, a, b, d)| {
            let m = vars[0].pow(a as i32).unwrap()
                * vars[1].pow(b as i32).unwrap()
                * vars[2].pow(d as i32).unwrap();
            acc + c.int(k) * m
        })
    })
}

fn element() -> impl Strategy<Value = FieldElement> {
    (poly(), poly()).prop_map(|(n, d)| if d.is_zero() { n } else { n / d })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a / &a).is_one());
        }
    }

    #[test]
    fn equality_agrees_with_cross_multiplication(a in element(), b in element()) {
        let lhs = a.numer().mul(b.denom());
        let rhs = b.numer().mul(a.denom());
        prop_assert_eq!(a == b, lhs == rhs);
    }

    #[test]
    fn leibniz_rule(a in element(), b in element()) {
        let d = |f: &FieldElement| f.differentiate("lambda").unwrap();
        prop_assert_eq!(d(&(&a * &b)), &d(&a) * &b + &a * &d(&b));
    }

    #[test]
    fn series_resums_modulo_truncation(n in poly(), d in poly(), order in 0usize..5) {
        let c = ctx();
        // make the denominator invertible at hbar = 0
        let d = d * c.var("hbar").unwrap() + c.int(1) + c.var("lambda").unwrap();
        let f = &n / &d;
        let s = f.series_expand("hbar", order).unwrap();
        let h = c.var("hbar").unwrap();
        // (f - resum) must be divisible by hbar^(order+1)
        let diff = (&f - &s.resum().unwrap()) / h.pow(order as i32 + 1).unwrap();
        prop_assert!(diff.series_expand("hbar", 0).is_ok());
        prop_assert_eq!(s.coeffs.len(), order + 1);
        for co in &s.coeffs {
            prop_assert_eq!(co.differentiate("hbar").unwrap(), c.zero());
        }
    }

    #[test]
    fn rendering_parses_back(a in element()) {
        let text = a.to_string();
        prop_assert_eq!(ctx().parse(&text).unwrap(), a);
    }
}
