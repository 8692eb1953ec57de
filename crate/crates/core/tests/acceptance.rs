//! Acceptance run: one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use gks_core::calculus::{ftc_residual, lf_derivative, lf_integral, Bound, LimitScheme, MeshSpec};
use gks_core::certifier::{certify, certify_classical, certify_search, SearchBudget, Sense};
use gks_core::gallery::{
    default_example41_grid, find_ineq35_witness, make_example41, make_example42, run_example41_matrix,
    Example41Params, Example42Params, CANONICAL_EXAMPLE41,
};
use gks_core::model::base_view;
use gks_core::model::combine::thm35_pattern;
use gks_core::theorems::{build_phi_thm37, run_suite, sandwich_grid, CheckGrid, SuiteConfig};
use gks_core::{gamma, parse, AlphaContext, FractalScalar, FunctionExpr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(lhs: FractalScalar, rhs: FractalScalar, scale: f64) -> bool {
    (lhs.base - rhs.base).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
}

fn algebra_laws() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 100_000;
    for alpha in [0.3, 0.5, 0.8] {
        let ctx = AlphaContext::new(alpha, 0.5).map_err(err)?;
        for i in 0..n {
            let [a, b, c]: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1e3..1e3));
            let (x, y, z) = (FractalScalar::from_base(a), FractalScalar::from_base(b), FractalScalar::from_base(c));
            let add = a.abs() + b.abs() + c.abs();
            let mul = a.abs() * b.abs() * c.abs().max(1.0);
            let dist = a.abs() * (b.abs() + c.abs());
            let ok = (x + y).base.is_finite()
                && (x * y).base.is_finite()
                && (x + y) == (y + x)
                && within(x + y, FractalScalar::from_base(a + b), add)
                && within(x + (y + z), (x + y) + z, add)
                && (x * y) == (y * x)
                && within(x * y, FractalScalar::from_base(a * b), mul)
                && within(x * (y * z), (x * y) * z, mul)
                && within(x * (y + z), x * y + x * z, dist)
                && x + FractalScalar::ZERO == x
                && FractalScalar::ZERO + x == x
                && x * FractalScalar::ONE == x
                && FractalScalar::ONE * x == x
                && ((x * y).value(alpha) - x.value(alpha) * y.value(alpha)).abs()
                    <= 1e-12 * (x * y).value(alpha).abs().max(1.0)
                && ctx.approx_eq(x, FractalScalar::from_value(x.value(alpha), alpha));
            ensure(ok, format!("triple {i} at alpha {alpha}: ({a}, {b}, {c})"))?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(5), format!("took {t:?}"))?;
    Ok(format!("{} triples", 3 * n))
}

fn ftc() -> Check {
    let start = Instant::now();
    let mut corpus: Vec<FunctionExpr> = ["fv(1)", "fb(2)", "fb(-1)", "fv(0.5)", "mono(0.5)", "mono(1)", "mono(2)"]
        .iter()
        .map(|t| parse(t).unwrap())
        .collect();
    for (a, b, c) in [(0.0, 1.0, 0.0), (1.0, 1.0, 0.0), (2.0, 1.0, 1.0)] {
        corpus.push(make_example41(&Example41Params { a, b, c, s: 0.5 }).0);
    }
    let mut worst = 0.0_f64;
    for alpha in [0.3, 0.5, 0.8] {
        let ctx = AlphaContext::new(alpha, 0.5).map_err(err)?;
        for f in &corpus {
            for i in 1..=10 {
                let x = 0.2 * i as f64;
                let r = ftc_residual(f, 0.0, x, &ctx, &MeshSpec::default(), &LimitScheme::default()).map_err(err)?;
                ensure(r < 1e-5, format!("{f} alpha={alpha} x={x}: residual {r:e}"))?;
                worst = worst.max(r);
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), format!("took {t:?}"))?;
    Ok(format!("300 residuals, worst {worst:.1e}"))
}

fn integral_spots() -> Check {
    let ctx = AlphaContext::new(0.5, 0.5).map_err(err)?;
    let mesh = MeshSpec::default();
    let f = parse("mono(1)").unwrap();
    let r1 = lf_integral(&Bound::new(&f, &ctx), 0.0, 1.0, &ctx, &mesh).map_err(err)?.value;
    ensure((r1 - 0.797_884_6).abs() < 1e-4, format!("mono(1) gives {r1}"))?;
    let g = parse("fv(1)").unwrap();
    let r2 = lf_integral(&Bound::new(&g, &ctx), 0.0, 2.0, &ctx, &mesh).map_err(err)?.value;
    ensure((r2 - 1.595_769_1).abs() < 1e-4, format!("constant gives {r2}"))?;
    Ok(format!("{r1:.7}, {r2:.7}"))
}

fn derivative_spots() -> Check {
    let ctx = AlphaContext::new(0.5, 0.5).map_err(err)?;
    let scheme = LimitScheme::default();
    let f = parse("mono(1)").unwrap();
    let d = lf_derivative(&Bound::new(&f, &ctx), 0.0, &ctx, &scheme).map_err(err)?.value;
    let g15 = gamma(1.5).map_err(err)?;
    ensure((d - g15).abs() < 1e-8, format!("mono(1) gives {d}, want {g15}"))?;
    for text in ["fv(1)", "fb(-2)", "fv(0)"] {
        let c = parse(text).unwrap();
        for x0 in [0.0, 0.5, 3.0] {
            let r = lf_derivative(&Bound::new(&c, &ctx), x0, &ctx, &scheme).map_err(err)?;
            ensure(r.base == 0.0, format!("{text} at {x0} gives base {}", r.base))?;
        }
    }
    Ok(format!("{d:.10}"))
}

fn example41_matrix() -> Check {
    let start = Instant::now();
    let mut params = default_example41_grid();
    params.extend(CANONICAL_EXAMPLE41);
    let rows = run_example41_matrix(&params, &[0.25, 0.5, 0.75], &[0.3, 0.5, 0.8], &SearchBudget::default())
        .map_err(err)?;
    let classified: Vec<_> = rows.iter().filter(|r| r.agrees.is_some()).collect();
    if let Some(r) = classified.iter().find(|r| r.agrees != Some(true)) {
        return Err(format!("disagreement at {r:?}"));
    }
    let worst = rows.iter().filter_map(|r| r.replay_error).fold(0.0_f64, |m, e| m.max(e.abs()));
    ensure(worst <= 1e-10, format!("replay error {worst:e}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), format!("took {t:?}"))?;
    Ok(format!("{}/{} classified cells agree, {} runs", classified.len(), classified.len(), rows.len()))
}

fn example42() -> Check {
    let budget = SearchBudget::default();
    let mut worst = f64::INFINITY;
    for k in [1.5, 2.0, 4.0] {
        for s in [0.25, 0.5] {
            let ctx = AlphaContext::new(0.5, s).map_err(err)?;
            let p = Example42Params { k, s };
            let (f, _) = make_example42(&p).map_err(err)?;
            let first = certify_search(&f, Sense::First, &ctx, &budget).map_err(err)?;
            ensure(!first.is_violation(), format!("k={k} s={s}: first sense violated {:?}", first.witness()))?;
            let second = certify_search(&f, Sense::Second, &ctx, &budget).map_err(err)?;
            let m = second.witness().map_or(0.0, |w| w.margin);
            ensure(m > 1e-6, format!("k={k} s={s}: second sense margin {m:e}"))?;
            worst = worst.min(m);
            let w = find_ineq35_witness(&p, &ctx, &budget)
                .map_err(err)?
                .witness
                .ok_or(format!("k={k} s={s}: no ineq35 witness"))?
                .to_witness();
            let replayed = w.replay(&f, &ctx).map_err(err)?;
            ensure(replayed > ctx.tol_violation, format!("k={k} s={s}: ineq35 witness replays to {replayed:e}"))?;
        }
    }
    Ok(format!("6 cases, smallest second-sense margin {worst:.3e}"))
}

fn theorem_suite() -> Check {
    let cfg = SuiteConfig::default();
    let reports = run_suite(&cfg).map_err(err)?;
    if let Some(r) = reports.iter().find(|r| !r.holds()) {
        return Err(format!("{} did not hold: {:?}", r.test_id, r.conclusion_status));
    }
    let cases = [
        (FunctionExpr::mono(1.0), 0.5),
        (thm35_pattern(FunctionExpr::fv(1.0), 0.5).map_err(err)?, 0.5),
        (thm35_pattern(FunctionExpr::fv(1.0), 1.0 / 3.0).map_err(err)?, 1.0 / 3.0),
        (thm35_pattern(FunctionExpr::mono(1.0), 0.5).map_err(err)?, 0.5),
    ];
    let grid = CheckGrid::default();
    for (f, s) in &cases {
        let ctx = AlphaContext::new(cfg.alpha, *s).map_err(err)?;
        let built = build_phi_thm37(f, *s, &ctx, &cfg.budget, &grid, &cfg.mesh).map_err(err)?;
        ensure(built.report.holds(), format!("thm3.7 on {f}: {:?}", built.report.conclusion_status))?;
        let sw = built.sandwich.ok_or(format!("no sandwich for {f}"))?;
        ensure(sw.rows.len() == sandwich_grid().len() && sw.rows.len() == 100, "sandwich grid size")?;
        ensure(sw.holds, format!("sandwich broken for {f}"))?;
    }
    let ctx = AlphaContext::new(cfg.alpha, 0.5).map_err(err)?;
    let built = build_phi_thm37(&FunctionExpr::mono(1.0), 0.5, &ctx, &cfg.budget, &grid, &cfg.mesh).map_err(err)?;
    let row = built.sandwich_at(&[1.0]).map_err(err)?.rows[0].clone();
    let chain = [row.lower_value, row.phi_value, row.upper_value];
    for (got, want) in chain.iter().zip([0.5, 0.707_106_8, 1.0]) {
        ensure((got - want).abs() < 1e-4, format!("chain at u=1 is {chain:?}"))?;
    }
    Ok(format!("{} reports hold, chain at 1 = ({:.4}, {:.4}, {:.4})", reports.len(), chain[0], chain[1], chain[2]))
}

fn base_isomorphism() -> Check {
    let budget = SearchBudget { random_trials: 20_000, ..SearchBudget::default() };
    let mut corpus: Vec<(FunctionExpr, f64)> = Vec::new();
    let mut params = default_example41_grid();
    params.extend(CANONICAL_EXAMPLE41);
    for (a, b, c) in params {
        corpus.push((make_example41(&Example41Params { a, b, c, s: 0.5 }).0, 0.5));
    }
    for (k, s) in [(1.5, 0.25), (2.0, 0.5), (4.0, 0.5)] {
        corpus.push((make_example42(&Example42Params { k, s }).map_err(err)?.0, s));
    }
    for t in ["mono(1)", "mono(2)", "mono(0.5)", "fv(1)", "fv(1) - mono(1)", "max(mono(1), fv(1))"] {
        corpus.push((parse(t).unwrap(), 0.5));
    }
    let mut violations = 0;
    for (f, s) in &corpus {
        let ctx = AlphaContext::new(0.5, *s).map_err(err)?;
        let g = base_view(f, &ctx);
        for sense in [Sense::First, Sense::Second] {
            let gen = certify_search(f, sense, &ctx, &budget).map_err(err)?;
            let cls = certify_classical(&g, sense, *s, &budget, ctx.tol_violation).map_err(err)?;
            ensure(
                gen.status.class() == cls.status.class(),
                format!("{f} {sense:?}: {} vs {}", gen.status.class(), cls.status.class()),
            )?;
            if let Some(w) = gen.witness() {
                violations += 1;
                let m = w.replay_classical(&g, *s).map_err(err)?;
                ensure(m == w.margin, format!("{f}: generalized witness replays classically to {m:e}"))?;
            }
            if let Some(w) = cls.witness() {
                let m = w.replay(f, &ctx).map_err(err)?;
                ensure(m == w.margin, format!("{f}: classical witness replays to {m:e}"))?;
            }
        }
    }
    Ok(format!("{} functions, {violations} violations transferred", corpus.len()))
}

fn determinism() -> Check {
    let budget = SearchBudget { random_trials: 20_000, seed: 11, ..SearchBudget::default() };
    let ctx = AlphaContext::new(0.5, 0.5).map_err(err)?;
    let fs: Vec<FunctionExpr> = [
        "pw(u==0 -> fb(0); else -> fb(1)*mono(s) + fb(-1))",
        "pw(u<=1 -> mono(1); else -> fb(2)*mono(1))",
        "mono(2)",
    ]
    .iter()
    .map(|t| parse(t).unwrap())
    .collect();
    let mut runs = Vec::new();
    for threads in [1, 4, 16] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
        let out = pool.install(|| {
            fs.iter()
                .flat_map(|f| [Sense::First, Sense::Second].map(|sense| certify(f, sense, &ctx, &budget)))
                .collect::<Result<Vec<_>, _>>()
        });
        runs.push(out.map_err(err)?);
    }
    ensure(runs[0] == runs[1] && runs[0] == runs[2], "verdicts differ across thread counts")?;
    Ok(format!("{} verdicts identical at 1, 4, 16 threads", runs[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("algebra laws on random triples", algebra_laws),
        ("fundamental theorem residuals", ftc),
        ("integral spot values", integral_spots),
        ("derivative spot values", derivative_spots),
        ("ex4.1 regression matrix", example41_matrix),
        ("ex4.2 classification", example42),
        ("theorem suite holds", theorem_suite),
        ("base isomorphism equivalence", base_isomorphism),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = check();
        let t = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {} PASS {name}: {msg} ({t:.2}s)", i + 1),
            Err(msg) => {
                println!("criterion {} FAIL {name}: {msg} ({t:.2}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
