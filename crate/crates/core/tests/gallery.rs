use gks_core::certifier::{certify, certify_search, SearchBudget, Sense, VerdictStatus};
use gks_core::gallery::{
    find_ineq35_witness, make_example41, make_example42, Example41Params, Example42Params, Expectation,
};
use gks_core::AlphaContext;

fn budget() -> SearchBudget {
    SearchBudget { random_trials: 20_000, ..SearchBudget::default() }
}

fn ex41(a: f64, b: f64, c: f64, s: f64) -> (gks_core::FunctionExpr, gks_core::gallery::Expected41) {
    make_example41(&Example41Params { a, b, c, s })
}

#[test]
fn example41_cases() {
    let ctx = AlphaContext::new(0.5, 0.5).unwrap();

    let (f, e) = ex41(1.0, 1.0, 0.0, 0.5);
    assert_eq!(e.cases, ["i", "ii", "iii"]);
    assert!(e.drop_at_zero);
    let v = certify(&f, Sense::First, &ctx, &budget()).unwrap();
    assert!(matches!(v.status, VerdictStatus::ProvenMember { .. }));
    assert!(!certify_search(&f, Sense::Second, &ctx, &budget()).unwrap().is_violation());

    let (f, e) = ex41(0.0, 1.0, -1.0, 0.5);
    assert_eq!(e.second, Expectation::NonMember);
    let v = certify(&f, Sense::Second, &ctx, &budget()).unwrap();
    let w = v.witness().expect("case iv violates the second sense");
    assert!((w.replay(&f, &ctx).unwrap() - w.margin).abs() <= 1e-10);

    let (_, e) = ex41(0.0, 1.0, 1.0, 0.5);
    assert_eq!(e.first, Expectation::Unknown);
    assert_eq!(e.second, Expectation::Unknown);
}

#[test]
fn example42_classification() {
    for (k, s) in [(2.0, 0.5), (4.0, 0.25)] {
        let ctx = AlphaContext::new(0.5, s).unwrap();
        let p = Example42Params { k, s };
        let (f, e) = make_example42(&p).unwrap();
        assert!(!e.continuous_at_one);
        assert!(!certify_search(&f, Sense::First, &ctx, &budget()).unwrap().is_violation(), "k={k} s={s}");
        let v = certify_search(&f, Sense::Second, &ctx, &budget()).unwrap();
        assert!(v.witness().is_some_and(|w| w.margin > 1e-6), "k={k} s={s}");
    }
}

#[test]
fn ineq35_witness_is_a_second_sense_violation() {
    let p = Example42Params { k: 2.0, s: 0.5 };
    let ctx = AlphaContext::new(0.5, 0.5).unwrap();
    let (f, _) = make_example42(&p).unwrap();
    let found = find_ineq35_witness(&p, &ctx, &budget()).unwrap();
    let w = found.witness.expect("witness exists").to_witness();
    let m = w.replay(&f, &ctx).unwrap();
    assert!(m > ctx.tol_violation);
    assert!((m - w.margin).abs() <= 1e-10 * m.abs().max(1.0));
    assert!((w.lambda1 + w.lambda2 - 1.0).abs() < 1e-15);
}

#[test]
fn example42_rejects_bad_parameters() {
    assert!(make_example42(&Example42Params { k: 1.0, s: 0.5 }).is_err());
    assert!(make_example42(&Example42Params { k: 2.0, s: 1.0 }).is_err());
}
