use gks_core::certifier::{certify_search, SearchBudget, Sense};
use gks_core::model::base_view;
use gks_core::{parse, AlphaContext, FieldOp, FractalScalar};
use proptest::prelude::*;

fn close(a: FractalScalar, b: FractalScalar) -> bool {
    a.compare(b, 1e-12) == std::cmp::Ordering::Equal
}

fn base() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3_f64, -1.0..1.0_f64, Just(0.0), Just(1.0)]
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.3), Just(0.5), Just(0.8), 0.05..=1.0_f64]
}

proptest! {
    #[test]
    fn field_rules_hold_in_base_space(a in base(), b in base(), c in base(), al in alpha()) {
        let ctx = AlphaContext::new(al, 0.5).unwrap();
        let (x, y, z) = (FractalScalar::from_base(a), FractalScalar::from_base(b), FractalScalar::from_base(c));
        prop_assert!((x + y).base.is_finite() && (x * y).base.is_finite());
        prop_assert!(close(x + y, y + x) && close(x + y, FractalScalar::from_base(a + b)));
        prop_assert!(close(x + (y + z), (x + y) + z));
        prop_assert!(close(x * y, y * x) && close(x * y, FractalScalar::from_base(a * b)));
        prop_assert!(close(x * (y * z), (x * y) * z));
        prop_assert!(close(x * (y + z), x * y + x * z));
        prop_assert_eq!(x + FractalScalar::ZERO, x);
        prop_assert_eq!(FractalScalar::ONE * x, x);
        prop_assert_eq!(ctx.field_op(FieldOp::Add, x, y).unwrap(), x + y);
    }

    #[test]
    fn value_roundtrip(v in -1e3..1e3_f64, al in alpha()) {
        let x = FractalScalar::from_value(v, al);
        prop_assert!((x.value(al) - v).abs() <= 1e-9 * v.abs().max(1.0));
    }

    #[test]
    fn division_inverts_multiplication(a in base(), b in base().prop_filter("nonzero", |b| b.abs() > 1e-6)) {
        let (x, y) = (FractalScalar::from_base(a), FractalScalar::from_base(b));
        prop_assert!(close((x * y).checked_div(y).unwrap(), x));
    }

    #[test]
    fn print_parse_roundtrip(a in -3.0..3.0_f64, b in -3.0..3.0_f64, c in -3.0..3.0_f64, k in 0.1..3.0_f64, u in 0.0..5.0_f64) {
        let text = format!("pw(u==0 -> fb({a}); u<=1 -> fb({b})*mono({k}) + fv({c}); else -> max(mono(s), fb({c})))");
        let f = parse(&text).unwrap();
        let printed = f.to_string();
        let g = parse(&printed).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(g.to_string(), printed);
        let ctx = AlphaContext::new(0.5, 0.5).unwrap();
        prop_assert_eq!(f.evaluate(u, &ctx).unwrap(), g.evaluate(u, &ctx).unwrap());
    }

    #[test]
    fn base_view_matches_evaluate(k in 0.1..3.0_f64, c in -2.0..2.0_f64, u in 0.0..10.0_f64, al in alpha()) {
        let ctx = AlphaContext::new(al, 0.5).unwrap();
        let f = parse(&format!("fb({c})*mono({k}) + fv(1)")).unwrap();
        prop_assert_eq!(base_view(&f, &ctx)(u).unwrap(), f.evaluate(u, &ctx).unwrap().base);
    }
}

fn small_budget(seed: u64) -> SearchBudget {
    SearchBudget { grid_n: 16, t_n: 16, random_trials: 2000, refine_steps: 20, seed, u_max: 10.0 }
}

#[test]
fn search_is_deterministic_and_witnesses_replay() {
    let ctx = AlphaContext::new(0.5, 0.5).unwrap();
    for text in [
        "pw(u==0 -> fb(0); else -> fb(1)*mono(s) + fb(-1))",
        "mono(2)",
        "fv(1) - mono(1)",
        "mono(s) + fv(1)",
    ] {
        let f = parse(text).unwrap();
        for sense in [Sense::First, Sense::Second] {
            let a = certify_search(&f, sense, &ctx, &small_budget(3)).unwrap();
            let b = certify_search(&f, sense, &ctx, &small_budget(3)).unwrap();
            assert_eq!(a, b, "{text}");
            if let Some(w) = a.witness() {
                assert!(w.margin > ctx.tol_violation);
                assert!((w.replay(&f, &ctx).unwrap() - w.margin).abs() <= 1e-10, "{text}");
            }
        }
    }
}

#[test]
fn degenerate_weights_never_violate() {
    let ctx = AlphaContext::new(0.5, 0.5).unwrap();
    let f = parse("fv(3) - mono(2)").unwrap();
    for u in [0.0, 0.5, 1.0, 7.0] {
        for v in [0.0, 2.0] {
            for (l1, l2) in [(1.0, 0.0), (0.0, 1.0)] {
                let m = gks_core::certifier::inequality_margin(&f, u, v, l1, l2, &ctx).unwrap();
                assert!(m <= ctx.tol_violation);
            }
        }
    }
}
