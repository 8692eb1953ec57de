use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use gks_core::calculus::{
    continuity_probe, ftc_residual, lf_derivative, lf_integral, ratio_limit, Bound, LimitScheme,
    MeshSpec, DEFAULT_EPS_GRID,
};
use gks_core::certifier::{
    certify, certify_relaxed, certify_search, ConvexityVerdict, SearchBudget, Sense,
    VerdictStatus,
};
use gks_core::gallery::{
    default_example41_grid, find_ineq35_witness, make_example42, run_example41_matrix,
    Example42Params, Expectation, CANONICAL_EXAMPLE41,
};
use gks_core::theorems::{
    build_phi_thm37, run_suite, traceability_table, CheckGrid, ConclusionStatus, SuiteConfig,
    TheoremReport,
};
use gks_core::{parse, AlphaContext, FunctionExpr};

use crate::output::{emit, label, num, Outcome, Table, SCHEMA};
use crate::{CalcOp, Cli, Command, Common, Family, OutputFormat, SenseArg};

pub fn run(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let format = if c.json { OutputFormat::Json } else { c.output };
    let ctx = context(c, c.s)?;
    let budget = budget(c)?;
    let outcome = match &cli.command {
        Command::Classify {
            function,
            sense,
            relaxed,
            search_only,
        } => classify(function, *sense, *relaxed, *search_only, &ctx, &budget)?,
        Command::Theorems { suite, corpus } => theorems(suite, corpus, c, &budget)?,
        Command::Calc { op } => calc(op, &ctx)?,
        Command::Sandwich {
            function,
            points,
            step,
        } => sandwich(function, *points, *step, c, &ctx, &budget)?,
        Command::Examples {
            family,
            orders,
            alphas,
        } => examples(*family, orders, alphas, c, &budget)?,
    };
    emit(&outcome, format, c.out.as_deref())?;
    Ok(outcome.code)
}

fn context(c: &Common, s: f64) -> Result<AlphaContext> {
    let tol = c.tol.unwrap_or(AlphaContext::DEFAULT_TOL_VIOLATION);
    Ok(AlphaContext::with_tolerances(
        c.alpha,
        s,
        AlphaContext::DEFAULT_TOL_BASE,
        tol,
    )?)
}

fn budget(c: &Common) -> Result<SearchBudget> {
    let b = SearchBudget {
        grid_n: c.grid_n,
        random_trials: c.trials,
        seed: c.seed,
        u_max: c.u_max,
        ..SearchBudget::default()
    };
    b.validate()?;
    Ok(b)
}

/// DSL text, or `@path` for a file holding it.
fn load_fn(src: &str) -> Result<FunctionExpr> {
    let text = match src.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => src.to_string(),
    };
    parse(text.trim()).with_context(|| format!("parsing {:?}", text.trim()))
}

fn sense_of(s: SenseArg) -> Sense {
    match s {
        SenseArg::First => Sense::First,
        SenseArg::Second => Sense::Second,
    }
}

fn verdict_text(f: &FunctionExpr, v: &ConvexityVerdict) -> String {
    let head = format!(
        "{f}\n  sense {}, s = {}, alpha = {}: {}",
        v.sense,
        v.s,
        v.alpha,
        status_name(v)
    );
    match &v.status {
        VerdictStatus::ProvenMember { rule_id, citation } => format!("{head} by {rule_id} ({citation})\n"),
        VerdictStatus::Violation { witness: w } => format!(
            "{head}\n  witness u = {}, v = {}, lambda1 = {}, lambda2 = {}, margin = {:e}\n",
            w.u, w.v, w.lambda1, w.lambda2, w.margin
        ),
        VerdictStatus::NoViolationFound {
            evaluations,
            max_margin_seen,
        } => format!("{head} after {evaluations} evaluations, max margin {max_margin_seen:e}\n"),
    }
}

fn status_name(v: &ConvexityVerdict) -> &'static str {
    match v.status {
        VerdictStatus::ProvenMember { .. } => "proven_member",
        VerdictStatus::Violation { .. } => "violation",
        VerdictStatus::NoViolationFound { .. } => "no_violation_found",
    }
}

fn classify(
    src: &str,
    sense: SenseArg,
    relaxed: bool,
    search_only: bool,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<Outcome> {
    let f = load_fn(src)?;
    let sense = sense_of(sense);
    let v = if relaxed {
        certify_relaxed(&f, sense, ctx, budget)?
    } else if search_only {
        certify_search(&f, sense, ctx, budget)?
    } else {
        certify(&f, sense, ctx, budget)?
    };
    Ok(Outcome {
        json: json!({
            "schema": SCHEMA,
            "command": "classify",
            "function": f.to_string(),
            "relaxed": relaxed,
            "verdict": v,
        }),
        text: verdict_text(&f, &v),
        table: None,
        code: u8::from(v.is_violation()),
    })
}

fn status_label(status: &ConclusionStatus) -> &'static str {
    match status {
        ConclusionStatus::Holds => "holds",
        ConclusionStatus::Falsified { .. } => "falsified",
        ConclusionStatus::HypothesisUnmet => "hypothesis_unmet",
    }
}

fn theorems(suite: &str, corpus: &str, c: &Common, budget: &SearchBudget) -> Result<Outcome> {
    if suite != "all" {
        bail!("unknown suite {suite:?}; only \"all\" is available");
    }
    if corpus != "default" {
        bail!("unknown corpus {corpus:?}; only \"default\" is available");
    }
    let cfg = SuiteConfig {
        alpha: c.alpha,
        budget: *budget,
        grid: CheckGrid {
            u_max: c.u_max,
            ..CheckGrid::default()
        },
        ..SuiteConfig::default()
    };
    let reports = run_suite(&cfg)?;
    let failed = reports.iter().filter(|r| !r.holds()).count();
    let rows = reports
        .iter()
        .map(|r: &TheoremReport| {
            vec![
                r.theorem_id.clone(),
                r.test_id.clone(),
                status_label(&r.conclusion_status).to_string(),
                r.citation.clone(),
            ]
        })
        .collect();
    Ok(Outcome {
        json: json!({
            "schema": SCHEMA,
            "command": "theorems",
            "alpha": c.alpha,
            "failed": failed,
            "reports": reports,
        }),
        text: traceability_table(&reports),
        table: Some(Table {
            headers: vec!["theorem_id", "test_id", "status", "citation"],
            rows,
        }),
        code: u8::from(failed > 0),
    })
}

fn calc_outcome(op: &str, f: &FunctionExpr, ctx: &AlphaContext, extra: serde_json::Value, result: impl Serialize, text: String) -> Result<Outcome> {
    let mut json = json!({
        "schema": SCHEMA,
        "command": format!("calc {op}"),
        "function": f.to_string(),
        "alpha": ctx.alpha,
        "result": result,
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (json.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(Outcome {
        json,
        text,
        table: None,
        code: 0,
    })
}

fn calc(op: &CalcOp, ctx: &AlphaContext) -> Result<Outcome> {
    let scheme = LimitScheme::default();
    let mesh = MeshSpec::default();
    match op {
        CalcOp::Derive { function, at } => {
            let f = load_fn(function)?;
            let r = lf_derivative(&Bound::new(&f, ctx), *at, ctx, &scheme)?;
            let text = format!("D^alpha f({at}) = {} (base {}, error {:e}, converged {})\n", r.value, r.base, r.convergence_estimate, r.converged);
            calc_outcome("derive", &f, ctx, json!({ "x0": at }), r, text)
        }
        CalcOp::Integrate { function, from, to } => {
            let f = load_fn(function)?;
            let r = lf_integral(&Bound::new(&f, ctx), *from, *to, ctx, &mesh)?;
            let text = format!("I[{from}, {to}] f = {} (base {}, error {:e}, converged {})\n", r.value, r.base, r.convergence_estimate, r.converged);
            calc_outcome("integrate", &f, ctx, json!({ "from": from, "to": to }), r, text)
        }
        CalcOp::Continuity { function, at } => {
            let f = load_fn(function)?;
            let r = continuity_probe(&Bound::new(&f, ctx), *at, ctx, &DEFAULT_EPS_GRID)?;
            let text = match r.obstructing_eps {
                None => format!("continuous at {at} on the probed eps grid\n"),
                Some(e) => format!("not continuous at {at}: eps = {e} obstructs, jump base {}\n", r.jump_base),
            };
            calc_outcome("continuity", &f, ctx, json!({ "x0": at }), r, text)
        }
        CalcOp::RatioLimit { f, g, at } => {
            let (fe, ge) = (load_fn(f)?, load_fn(g)?);
            let r = ratio_limit(&Bound::new(&fe, ctx), &Bound::new(&ge, ctx), *at, ctx, &scheme)?;
            let text = format!(
                "lim f/g at {at}: derivative ratio {} (error {:e}), direct ratio {} (error {:e}), agree {}\n",
                r.derivative_ratio.value,
                r.derivative_ratio.convergence_estimate,
                r.direct_ratio.value,
                r.direct_ratio.convergence_estimate,
                r.agree
            );
            calc_outcome("ratio-limit", &fe, ctx, json!({ "g": ge.to_string(), "x0": at }), r, text)
        }
        CalcOp::Ftc { function, from, at } => {
            let f = load_fn(function)?;
            let r = ftc_residual(&f, *from, *at, ctx, &mesh, &scheme)?;
            let text = format!("ftc residual at {at} (from {from}): {r:e}\n");
            calc_outcome("ftc", &f, ctx, json!({ "from": from, "x0": at }), json!({ "residual": r }), text)
        }
    }
}

fn sandwich(src: &str, points: usize, step: f64, c: &Common, ctx: &AlphaContext, budget: &SearchBudget) -> Result<Outcome> {
    let f = load_fn(src)?;
    let grid = CheckGrid {
        u_max: c.u_max,
        ..CheckGrid::default()
    };
    let built = build_phi_thm37(&f, ctx.s, ctx, budget, &grid, &MeshSpec::default())?;
    let us: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
    let sw = match &built.sandwich {
        Some(_) => Some(built.sandwich_at(&us)?),
        None => None,
    };
    let holds = built.report.holds() && sw.as_ref().is_some_and(|s| s.holds);
    let rows: Vec<Vec<String>> = sw
        .iter()
        .flat_map(|s| s.rows.iter())
        .map(|r| vec![num(r.u), num(r.lower_value), num(r.phi_value), num(r.upper_value)])
        .collect();
    let mut text = format!("{f}, s = {}, alpha = {}: {}\n", ctx.s, ctx.alpha, status_label(&built.report.conclusion_status));
    for r in &rows {
        text.push_str(&format!("{}\t{}\t{}\t{}\n", r[0], r[1], r[2], r[3]));
    }
    Ok(Outcome {
        json: json!({
            "schema": SCHEMA,
            "command": "sandwich",
            "function": f.to_string(),
            "report": built.report,
            "sandwich": sw,
        }),
        text,
        table: Some(Table {
            headers: vec!["u", "lower_value", "phi_value", "upper_value"],
            rows,
        }),
        code: u8::from(!holds),
    })
}

#[derive(Debug, Serialize)]
struct ExampleRow {
    family: &'static str,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    k: Option<f64>,
    s: f64,
    alpha: f64,
    sense: Sense,
    expected: Expectation,
    observed: String,
    rule_id: Option<String>,
    margin: f64,
    agrees: Option<bool>,
}

impl ExampleRow {
    fn record(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        vec![
            self.family.to_string(),
            opt(self.a),
            opt(self.b),
            opt(self.c),
            opt(self.k),
            num(self.s),
            num(self.alpha),
            self.sense.to_string(),
            label(&self.expected),
            self.observed.clone(),
            self.rule_id.clone().unwrap_or_default(),
            num(self.margin),
            self.agrees.map(|a| a.to_string()).unwrap_or_default(),
        ]
    }
}

fn examples(family: Family, orders: &[f64], alphas: &[f64], c: &Common, budget: &SearchBudget) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut ineq35 = Vec::new();
    if matches!(family, Family::Ex41 | Family::All) {
        let mut params = default_example41_grid();
        params.extend(CANONICAL_EXAMPLE41);
        for r in run_example41_matrix(&params, orders, alphas, budget)? {
            rows.push(ExampleRow {
                family: "ex41",
                a: Some(r.a),
                b: Some(r.b),
                c: Some(r.c),
                k: None,
                s: r.s,
                alpha: r.alpha,
                sense: r.sense,
                expected: r.expected,
                observed: r.observed,
                rule_id: r.rule_id,
                margin: r.margin,
                agrees: r.agrees,
            });
        }
    }
    if matches!(family, Family::Ex42 | Family::All) {
        for k in [1.5, 2.0, 4.0] {
            for s in [0.25, 0.5] {
                let p = Example42Params { k, s };
                let ctx = context(c, s)?;
                let (f, expected) = make_example42(&p)?;
                for (sense, exp) in [(Sense::First, expected.first), (Sense::Second, expected.second)] {
                    let v = certify(&f, sense, &ctx, budget)?;
                    let margin = v.witness().map_or(v.budget_stats.max_margin_seen, |w| w.margin);
                    let rule_id = match &v.status {
                        VerdictStatus::ProvenMember { rule_id, .. } => Some(rule_id.clone()),
                        _ => None,
                    };
                    rows.push(ExampleRow {
                        family: "ex42",
                        a: None,
                        b: None,
                        c: None,
                        k: Some(k),
                        s,
                        alpha: ctx.alpha,
                        sense,
                        expected: exp,
                        observed: v.status.class().to_string(),
                        rule_id,
                        margin,
                        agrees: exp.matches(&v.status),
                    });
                }
                let search = find_ineq35_witness(&p, &ctx, budget)?;
                let replayed = search
                    .witness
                    .map(|w| w.to_witness().replay(&f, &ctx))
                    .transpose()?;
                ineq35.push(json!({
                    "k": k,
                    "s": s,
                    "search": search,
                    "definition_margin": replayed,
                }));
            }
        }
    }
    let disagreements = rows.iter().filter(|r| r.agrees == Some(false)).count();
    let mut text = format!("{} rows, {} disagreements\n", rows.len(), disagreements);
    for r in rows.iter().filter(|r| r.agrees == Some(false)) {
        text.push_str(&format!("  {}\n", r.record().join(",")));
    }
    let table = Table {
        headers: vec![
            "family", "a", "b", "c", "k", "s", "alpha", "sense", "expected", "observed", "rule_id",
            "margin", "agrees",
        ],
        rows: rows.iter().map(ExampleRow::record).collect(),
    };
    Ok(Outcome {
        json: json!({
            "schema": SCHEMA,
            "command": "examples",
            "disagreements": disagreements,
            "rows": rows,
            "ineq35": ineq35,
        }),
        text,
        table: Some(table),
        code: u8::from(disagreements > 0),
    })
}
