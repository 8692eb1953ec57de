use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    describe, falsified_or_holds, first_decrease, first_increase, first_negative,
    right_continuous_at_zero, right_limit_at_zero, slack, Builder, CheckGrid, ConclusionStatus,
    Counterexample, TheoremError, TheoremReport,
};
use crate::algebra::{AlphaContext, FractalScalar};
use crate::certifier::{
    certify_base, certify_classical, certify_relaxed, certify_search, ConvexityVerdict,
    SearchBudget, Sense,
};
use crate::model::combine::{compose, product, thm35_pattern};
use crate::model::{base_view, EvalError, FunctionExpr, ScalarExpr};

const CITE_31A: &str = "thm3.1(a): f in GK_s^1 is non-decreasing on (0, +inf) and f(0+) <= f(0)";
const CITE_31B: &str = "thm3.1(b): f in GK_s^2 is non-negative on [0, +inf)";
const CITE_BIV: &str =
    "F(l1^s u + l2^s v, l1^s r + l2^s t) <= l1^(s alpha) F(u, r) + l2^(s alpha) F(v, t)";
const CITE_32: &str = "thm3.2: h(u) = F(f(u), g(u)) is in GK_s^1";
const CITE_33A: &str = "thm3.3(a): the relaxed first-sense inequality holds iff f(0) <= 0^alpha";
const CITE_33B: &str = "thm3.3(b): the relaxed second-sense inequality holds iff f(0) = 0^alpha";
const CITE_34A: &str = "thm3.4(a): f in GK_s^2 with f(0) = 0^alpha is in GK_s^1";
const CITE_34B: &str = "thm3.4(b): f in GK_s2^2 with f(0) = 0^alpha is in GK_s1^2";
const CITE_34C: &str = "thm3.4(c): f in GK_s2^1 with f(0) <= 0^alpha is in GK_s1^1";
const CITE_35: &str = "thm3.5: u^((s/(1-s)) alpha) p(u) is in GK_s^1";
const CITE_36A: &str = "thm3.6(a): f o g is in GK_s^1 with s = s1 s2";
const CITE_36B: &str = "thm3.6(b): fg is in GK_s^1 with s = min(s1, s2)";
const CITE_R31: &str = "rem3.1: a generalized convex function need not be non-decreasing or non-negative";
const CITE_R32: &str = "rem3.2: f in GK_s^1 is non-decreasing on (0, +inf) but not necessarily on [0, +inf)";
const CITE_R33: &str = "rem3.3: non-decreasing f in GK_s^2 composed with non-negative convex g is in GK_s^2";
const CITE_R34: &str = "rem3.4: the product of non-negative generalized convex functions, both non-decreasing or both non-increasing, is generalized convex";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part31 {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part34 {
    A,
    B,
    C,
}

pub(super) fn verdict_at(
    f: &FunctionExpr,
    sense: Sense,
    s: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict, TheoremError> {
    let ctx = ctx.with_s(s)?;
    Ok(certify_search(&f.bind_s(s), sense, &ctx, budget)?)
}

pub(super) fn positive(pts: &[f64]) -> Vec<f64> {
    pts.iter().copied().filter(|&u| u > 0.0).collect()
}

fn in_open_unit(s: f64) -> bool {
    s > 0.0 && s < 1.0
}

pub fn check_thm31(
    f: &FunctionExpr,
    part: Part31,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let (id, cite, sense) = match part {
        Part31::A => ("thm3.1(a)", CITE_31A, Sense::First),
        Part31::B => ("thm3.1(b)", CITE_31B, Sense::Second),
    };
    let mut b = Builder::new(id, &format!("{id}:{f}"), cite);
    b.detail("function", f.to_string());
    b.hypothesis("0 < s < 1", in_open_unit(ctx.s), format!("s = {}", ctx.s));
    let v = certify_search(f, sense, ctx, budget)?;
    let name = match sense {
        Sense::First => "f in GK_s^1",
        Sense::Second => "f in GK_s^2",
    };
    if !b.hypothesis_verdict(name, &v) || !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let g = base_view(f, ctx);
    let pts = grid.points(&f.breakpoints());
    let status = match part {
        Part31::A => {
            let pos = positive(&pts);
            let mono = first_decrease(&g, &pos, ctx, "decrease on (0, u_max]")?;
            let f0 = g(0.0)?;
            let f0_plus = right_limit_at_zero(&g)?;
            b.detail("f0_base", f0);
            b.detail("f0_plus_base", f0_plus);
            b.detail("strict_gap", f0 - f0_plus > slack(ctx, f0));
            b.detail("monotone", describe(&mono));
            let limit = (f0_plus - f0 > slack(ctx, f0)).then(|| Counterexample::Pointwise {
                label: "f(0+) > f(0)".into(),
                coords: vec![0.0],
                margin: f0_plus - f0,
            });
            let scaled = scaling_violation(&g, &pos, &grid.t_points(), ctx)?;
            b.detail("f(tu) <= f(u)", describe(&scaled));
            mono.or(limit).or(scaled)
        }
        Part31::B => {
            let neg = first_negative(&g, &pts, ctx, "negative value")?;
            b.detail("non_negative", describe(&neg));
            neg
        }
    };
    Ok(b.finish(falsified_or_holds(status)))
}

/// `f(tu) <= f(u)` for `t ∈ (0, 1]` over the grid.
fn scaling_violation(
    g: &dyn Fn(f64) -> Result<f64, EvalError>,
    us: &[f64],
    ts: &[f64],
    ctx: &AlphaContext,
) -> Result<Option<Counterexample>, EvalError> {
    for &u in us {
        let fu = g(u)?;
        for &t in ts {
            let ftu = g(t * u)?;
            if ftu - fu > slack(ctx, fu) {
                return Ok(Some(Counterexample::Pointwise {
                    label: "f(tu) > f(u)".into(),
                    coords: vec![t, u],
                    margin: ftu - fu,
                }));
            }
        }
    }
    Ok(None)
}

/// A two-variable function `ℝ × ℝ → ℝ^α`.
#[derive(Clone)]
pub enum BivariateFn {
    /// `x^α + y^α`.
    SumAlpha,
    /// `max{x^α, y^α}`.
    MaxAlpha,
    /// `(xy)^α`.
    ProductAlpha,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64, f64) -> FractalScalar + Send + Sync>,
    },
}

impl fmt::Debug for BivariateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl BivariateFn {
    pub fn name(&self) -> &str {
        match self {
            BivariateFn::SumAlpha => "sum_alpha",
            BivariateFn::MaxAlpha => "max_alpha",
            BivariateFn::ProductAlpha => "product_alpha",
            BivariateFn::Custom { name, .. } => name,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sum_alpha" => Some(BivariateFn::SumAlpha),
            "max_alpha" => Some(BivariateFn::MaxAlpha),
            "product_alpha" => Some(BivariateFn::ProductAlpha),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> FractalScalar {
        FractalScalar::from_base(self.base(x, y))
    }

    pub fn base(&self, x: f64, y: f64) -> f64 {
        match self {
            BivariateFn::SumAlpha => x + y,
            BivariateFn::MaxAlpha => x.max(y),
            BivariateFn::ProductAlpha => x * y,
            BivariateFn::Custom { f, .. } => f(x, y).base,
        }
    }
}

/// Search box for the two-variable inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateBox {
    pub lo: f64,
    pub hi: f64,
    /// Points per axis for u, v, r and t.
    pub n_axis: usize,
    /// Points per axis for λ1 and λ2 in [0, 1].
    pub n_lambda: usize,
}

impl Default for BivariateBox {
    fn default() -> Self {
        Self {
            lo: -2.0,
            hi: 2.0,
            n_axis: 9,
            n_lambda: 9,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

impl BivariateBox {
    pub fn axis(&self) -> Vec<f64> {
        let mut xs = linspace(self.lo, self.hi, self.n_axis);
        if self.lo < 0.0 && self.hi > 0.0 {
            xs.push(0.0);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    pub fn lambdas(&self) -> Vec<f64> {
        linspace(0.0, 1.0, self.n_lambda)
    }
}

/// Grid falsification of the two-variable inequality, with `λ1, λ2 ∈ [0, 1]`
/// unconstrained. `drop_s_exponents` replaces `λi^s` by `λi` inside `F`.
pub fn check_bivariate_convex(
    big_f: &BivariateFn,
    s: f64,
    ctx: &AlphaContext,
    bx: &BivariateBox,
    drop_s_exponents: bool,
) -> TheoremReport {
    let mut b = Builder::new("bivariate", &format!("bivariate:{}", big_f.name()), CITE_BIV);
    b.detail("F", big_f.name());
    b.detail("s", s);
    b.detail("box", bx);
    b.detail("drop_s_exponents", drop_s_exponents);
    let axis = bx.axis();
    let lambdas = bx.lambdas();
    let mut best: Option<(f64, [f64; 6])> = None;
    let mut evaluations = 0usize;
    for &l1 in &lambdas {
        for &l2 in &lambdas {
            let (w1, w2) = (l1.powf(s), l2.powf(s));
            let (a1, a2) = if drop_s_exponents { (l1, l2) } else { (w1, w2) };
            for &u in &axis {
                for &v in &axis {
                    for &r in &axis {
                        for &t in &axis {
                            let lhs = big_f.base(a1 * u + a2 * v, a1 * r + a2 * t);
                            let rhs = w1 * big_f.base(u, r) + w2 * big_f.base(v, t);
                            let m = lhs - rhs;
                            evaluations += 1;
                            if best.is_none_or(|(bm, _)| m > bm) {
                                best = Some((m, [u, v, r, t, l1, l2]));
                            }
                        }
                    }
                }
            }
        }
    }
    let (max_margin, [u, v, r, t, lambda1, lambda2]) = best.unwrap_or((0.0, [0.0; 6]));
    b.detail("evaluations", evaluations);
    b.detail("max_margin", max_margin);
    let status = if max_margin > ctx.tol_violation {
        ConclusionStatus::Falsified {
            counterexample: Counterexample::Bivariate {
                u,
                v,
                r,
                t,
                lambda1,
                lambda2,
                margin: max_margin,
            },
        }
    } else {
        ConclusionStatus::Holds
    };
    b.finish(status)
}

/// `F` non-decreasing in each variable over the box axis.
fn bivariate_monotone(big_f: &BivariateFn, bx: &BivariateBox, ctx: &AlphaContext) -> Option<Counterexample> {
    let axis = bx.axis();
    for &x in &axis {
        for w in axis.windows(2) {
            for (p, q) in [((x, w[0]), (x, w[1])), ((w[0], x), (w[1], x))] {
                let (fp, fq) = (big_f.base(p.0, p.1), big_f.base(q.0, q.1));
                if fp - fq > slack(ctx, fp) {
                    return Some(Counterexample::Pointwise {
                        label: "F decreases".into(),
                        coords: vec![p.0, p.1, q.0, q.1],
                        margin: fp - fq,
                    });
                }
            }
        }
    }
    None
}

pub(super) fn classical_verdict(
    g: &ScalarExpr,
    sense: Sense,
    s: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict, TheoremError> {
    Ok(certify_classical(&|u| g.eval(u), sense, s, budget, ctx.tol_violation)?)
}

pub fn check_thm32(
    big_f: &BivariateFn,
    f: &ScalarExpr,
    g: &ScalarExpr,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    bx: &BivariateBox,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("thm3.2", &format!("thm3.2:{}", big_f.name()), CITE_32);
    b.detail("F", big_f.name());
    b.hypothesis("0 < s < 1", in_open_unit(ctx.s), format!("s = {}", ctx.s));
    b.hypothesis_verdict("f in K_s^1", &classical_verdict(f, Sense::First, ctx.s, ctx, budget)?);
    b.hypothesis_verdict("g in K_s^1", &classical_verdict(g, Sense::First, ctx.s, ctx, budget)?);
    let biv = check_bivariate_convex(big_f, ctx.s, ctx, bx, false);
    b.hypothesis(
        "F generalized convex",
        biv.holds(),
        format!("{:?}", biv.conclusion_status),
    );
    let mono = bivariate_monotone(big_f, bx, ctx);
    b.hypothesis("F non-decreasing in each variable", mono.is_none(), describe(&mono));
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let h = |u: f64| -> Result<f64, EvalError> { Ok(big_f.base(f.eval(u)?, g.eval(u)?)) };
    let v = certify_base(&h, Sense::First, ctx, budget)?;
    Ok(b.conclude_verdict("h in GK_s^1", &v))
}

pub fn check_thm33(
    f: &FunctionExpr,
    sense: Sense,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<TheoremReport, TheoremError> {
    let (id, cite) = match sense {
        Sense::First => ("thm3.3(a)", CITE_33A),
        Sense::Second => ("thm3.3(b)", CITE_33B),
    };
    let mut b = Builder::new(id, &format!("{id}:{f}"), cite);
    b.detail("function", f.to_string());
    let exact = certify_search(f, sense, ctx, budget)?;
    if !b.hypothesis_verdict("exact-constraint membership", &exact) {
        return Ok(b.unmet());
    }
    let f0 = f.base_at(0.0, ctx)?;
    let predicted = match sense {
        Sense::First => f0 <= ctx.tol_violation,
        Sense::Second => f0.abs() <= ctx.tol_violation,
    };
    let relaxed = certify_relaxed(f, sense, ctx, budget)?;
    b.detail("f0_base", f0);
    b.detail("predicted_holds", predicted);
    b.detail("observed_holds", !relaxed.is_violation());
    b.detail("verdict: relaxed", &relaxed);
    let status = match (predicted, relaxed.witness()) {
        (true, Some(w)) => ConclusionStatus::Falsified {
            counterexample: Counterexample::Convexity {
                witness: *w,
                sense,
                s: ctx.s,
            },
        },
        (false, None) => ConclusionStatus::Falsified {
            counterexample: Counterexample::Pointwise {
                label: "predicted relaxed violation not found".into(),
                coords: vec![0.0],
                margin: f0,
            },
        },
        _ => ConclusionStatus::Holds,
    };
    Ok(b.finish(status))
}

/// Part (a) uses `s2` as its single order; `f` is frozen at `s2`.
pub fn check_thm34(
    f: &FunctionExpr,
    part: Part34,
    s1: f64,
    s2: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<TheoremReport, TheoremError> {
    let (id, cite) = match part {
        Part34::A => ("thm3.4(a)", CITE_34A),
        Part34::B => ("thm3.4(b)", CITE_34B),
        Part34::C => ("thm3.4(c)", CITE_34C),
    };
    let mut b = Builder::new(id, &format!("{id}:{f}"), cite);
    let f = f.bind_s(s2);
    b.detail("function", f.to_string());
    b.detail("s1", s1);
    b.detail("s2", s2);
    let orders_ok = match part {
        Part34::A => in_open_unit(s2),
        _ => s1 > 0.0 && s1 <= s2 && s2 <= 1.0,
    };
    if !b.hypothesis("order range", orders_ok, format!("s1 = {s1}, s2 = {s2}")) {
        return Ok(b.unmet());
    }
    let (hyp_sense, concl_sense, concl_s) = match part {
        Part34::A => (Sense::Second, Sense::First, s2),
        Part34::B => (Sense::Second, Sense::Second, s1),
        Part34::C => (Sense::First, Sense::First, s1),
    };
    let hyp = verdict_at(&f, hyp_sense, s2, ctx, budget)?;
    b.hypothesis_verdict(&format!("f in GK_s2^{}", hyp_sense.index()), &hyp);
    let f0 = f.base_at(0.0, &ctx.with_s(s2)?)?;
    match part {
        Part34::C => b.hypothesis("f(0) <= 0", f0 <= ctx.tol_violation, format!("base {f0}")),
        _ => b.hypothesis("f(0) = 0", f0.abs() <= ctx.tol_violation, format!("base {f0}")),
    };
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let v = verdict_at(&f, concl_sense, concl_s, ctx, budget)?;
    Ok(b.conclude_verdict("conclusion class", &v))
}

pub fn check_thm35(
    p: &FunctionExpr,
    s: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("thm3.5", &format!("thm3.5:{p}"), CITE_35);
    b.detail("p", p.to_string());
    if !b.hypothesis("0 < s < 1", in_open_unit(s), format!("s = {s}")) {
        return Ok(b.unmet());
    }
    let ctx = ctx.with_s(s)?;
    let p = p.bind_s(s);
    let g = base_view(&p, &ctx);
    let pts = grid.points(&p.breakpoints());
    let dec = first_decrease(&g, &pts, &ctx, "p decreases")?;
    b.hypothesis("p non-decreasing", dec.is_none(), describe(&dec));
    let neg = first_negative(&g, &pts, &ctx, "p negative")?;
    b.hypothesis("p non-negative", neg.is_none(), describe(&neg));
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let f = thm35_pattern(p.clone(), s)?;
    b.detail("function", f.to_string());
    let v = certify_search(&f, Sense::First, &ctx, budget)?;
    Ok(b.conclude_verdict("f in GK_s^1", &v))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Thm36Input {
    /// `f ∘ g` with `f ∈ GK_{s1}^1`, `g ∈ K_{s2}^1`.
    Compose { f: FunctionExpr, g: ScalarExpr },
    /// `fg` with `f ∈ GK_{s1}^1`, `g ∈ GK_{s2}^1`; with `s1 = s2 = 1` the
    /// generalized convex product of rem3.4.
    Product { f: FunctionExpr, g: FunctionExpr },
    /// rem3.3: `f ∘ g` with `f ∈ GK_{s1}^2` and `g` convex.
    ComposeSecond { f: FunctionExpr, g: ScalarExpr },
}

pub fn check_thm36(
    input: &Thm36Input,
    s1: f64,
    s2: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    match input {
        Thm36Input::Compose { f, g } => thm36_compose(f, g, s1, s2, ctx, budget, grid),
        Thm36Input::Product { f, g } if s1 == 1.0 && s2 == 1.0 => {
            remark34_product(f, g, ctx, budget, grid)
        }
        Thm36Input::Product { f, g } => thm36_product(f, g, s1, s2, ctx, budget, grid),
        Thm36Input::ComposeSecond { f, g } => remark33_compose(f, g, s1, ctx, budget, grid),
    }
}

pub(super) fn scalar_points(g: &ScalarExpr, grid: &CheckGrid) -> Vec<f64> {
    let mut br = Vec::new();
    g.breakpoints(&mut br);
    grid.points(&br)
}

fn thm36_compose(
    f: &FunctionExpr,
    g: &ScalarExpr,
    s1: f64,
    s2: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("thm3.6(a)", &format!("thm3.6(a):{f}"), CITE_36A);
    let ok = s1 > 0.0 && s1 <= 1.0 && s2 > 0.0 && s2 <= 1.0;
    if !b.hypothesis("0 < s1, s2 <= 1", ok, format!("s1 = {s1}, s2 = {s2}")) {
        return Ok(b.unmet());
    }
    let f = f.bind_s(s1);
    let c1 = ctx.with_s(s1)?;
    b.hypothesis_verdict("f in GK_s1^1", &verdict_at(&f, Sense::First, s1, ctx, budget)?);
    let fb = base_view(&f, &c1);
    let dec = first_decrease(&fb, &grid.points(&f.breakpoints()), ctx, "f decreases")?;
    b.hypothesis("f non-decreasing", dec.is_none(), describe(&dec));
    let f0 = fb(0.0)?;
    b.hypothesis("f(0) <= 0", f0 <= ctx.tol_violation, format!("base {f0}"));
    b.hypothesis_verdict("g in K_s2^1", &classical_verdict(g, Sense::First, s2, ctx, budget)?);
    let gv = |u: f64| g.eval(u);
    let neg = first_negative(&gv, &scalar_points(g, grid), ctx, "g negative")?;
    b.hypothesis("g non-negative", neg.is_none(), describe(&neg));
    let g0 = g.eval(0.0)?;
    b.hypothesis("g(0) = 0", g0.abs() <= ctx.tol_violation, format!("g(0) = {g0}"));
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let h = compose(f.clone(), g.clone());
    b.detail("function", h.to_string());
    let s = s1 * s2;
    b.detail("s", s);
    let v = verdict_at(&h, Sense::First, s, ctx, budget)?;
    Ok(b.conclude_verdict("f o g in GK_s^1", &v))
}

fn thm36_product(
    f: &FunctionExpr,
    g: &FunctionExpr,
    s1: f64,
    s2: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("thm3.6(b)", &format!("thm3.6(b):{f}*{g}"), CITE_36B);
    let ok = in_open_unit(s1) && in_open_unit(s2);
    if !b.hypothesis("0 < s1, s2 < 1", ok, format!("s1 = {s1}, s2 = {s2}")) {
        return Ok(b.unmet());
    }
    let (f, g) = (f.bind_s(s1), g.bind_s(s2));
    let (c1, c2) = (ctx.with_s(s1)?, ctx.with_s(s2)?);
    b.hypothesis_verdict("f in GK_s1^1", &verdict_at(&f, Sense::First, s1, ctx, budget)?);
    b.hypothesis_verdict("g in GK_s2^1", &verdict_at(&g, Sense::First, s2, ctx, budget)?);
    for (name, e, c) in [("f", &f, &c1), ("g", &g, &c2)] {
        let neg = first_negative(&base_view(e, c), &grid.points(&e.breakpoints()), ctx, "negative")?;
        b.hypothesis(&format!("{name} non-negative"), neg.is_none(), describe(&neg));
    }
    let f0 = f.base_at(0.0, &c1)?;
    let g0 = g.base_at(0.0, &c2)?;
    let zero = |x: f64| x.abs() <= ctx.tol_violation;
    let boundary = (zero(f0) && right_continuous_at_zero(&g, &c2)?)
        || (zero(g0) && right_continuous_at_zero(&f, &c1)?);
    b.hypothesis(
        "f(0) = 0 and g(0+) = g(0), or the symmetric condition",
        boundary,
        format!("f(0) base {f0}, g(0) base {g0}"),
    );
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let h = product(f, g);
    b.detail("function", h.to_string());
    let s = s1.min(s2);
    b.detail("s", s);
    let v = verdict_at(&h, Sense::First, s, ctx, budget)?;
    Ok(b.conclude_verdict("fg in GK_s^1", &v))
}

fn remark34_product(
    f: &FunctionExpr,
    g: &FunctionExpr,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("rem3.4", &format!("rem3.4:{f}*{g}"), CITE_R34);
    let (f, g) = (f.bind_s(1.0), g.bind_s(1.0));
    let c = ctx.with_s(1.0)?;
    b.hypothesis_verdict("f generalized convex", &verdict_at(&f, Sense::First, 1.0, ctx, budget)?);
    b.hypothesis_verdict("g generalized convex", &verdict_at(&g, Sense::First, 1.0, ctx, budget)?);
    let mut up = true;
    let mut down = true;
    for (name, e) in [("f", &f), ("g", &g)] {
        let view = base_view(e, &c);
        let pts = grid.points(&e.breakpoints());
        let neg = first_negative(&view, &pts, ctx, "negative")?;
        b.hypothesis(&format!("{name} non-negative"), neg.is_none(), describe(&neg));
        up &= first_decrease(&view, &pts, ctx, "decrease")?.is_none();
        down &= first_increase(&view, &pts, ctx, "increase")?.is_none();
    }
    b.hypothesis(
        "same monotonicity on [0, +inf)",
        up || down,
        format!("both non-decreasing: {up}, both non-increasing: {down}"),
    );
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let h = product(f, g);
    b.detail("function", h.to_string());
    let v = verdict_at(&h, Sense::First, 1.0, ctx, budget)?;
    Ok(b.conclude_verdict("fg generalized convex", &v))
}

fn remark33_compose(
    f: &FunctionExpr,
    g: &ScalarExpr,
    s: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("rem3.3", &format!("rem3.3:{f}"), CITE_R33);
    let f = f.bind_s(s);
    let c = ctx.with_s(s)?;
    b.hypothesis_verdict("f in GK_s^2", &verdict_at(&f, Sense::Second, s, ctx, budget)?);
    let dec = first_decrease(&base_view(&f, &c), &grid.points(&f.breakpoints()), ctx, "f decreases")?;
    b.hypothesis("f non-decreasing", dec.is_none(), describe(&dec));
    b.hypothesis_verdict("g convex", &classical_verdict(g, Sense::Second, 1.0, ctx, budget)?);
    let gv = |u: f64| g.eval(u);
    let neg = first_negative(&gv, &scalar_points(g, grid), ctx, "g negative")?;
    b.hypothesis("g non-negative", neg.is_none(), describe(&neg));
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let h = compose(f.clone(), g.clone());
    b.detail("function", h.to_string());
    let v = verdict_at(&h, Sense::Second, s, ctx, budget)?;
    Ok(b.conclude_verdict("f o g in GK_s^2", &v))
}

/// Holds when a generalized convex `f` (s = 1) is seen to be either
/// decreasing somewhere or negative somewhere.
pub fn check_remark31(
    f: &FunctionExpr,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("rem3.1", &format!("rem3.1:{f}"), CITE_R31);
    b.detail("function", f.to_string());
    let c = ctx.with_s(1.0)?;
    let f = f.bind_s(1.0);
    if !b.hypothesis_verdict("f generalized convex", &verdict_at(&f, Sense::First, 1.0, ctx, budget)?) {
        return Ok(b.unmet());
    }
    let view = base_view(&f, &c);
    let pts = grid.points(&f.breakpoints());
    let dec = first_decrease(&view, &pts, ctx, "decrease")?;
    let neg = first_negative(&view, &pts, ctx, "negative value")?;
    b.detail("decrease", describe(&dec));
    b.detail("negative", describe(&neg));
    let status = if dec.is_some() || neg.is_some() {
        ConclusionStatus::Holds
    } else {
        ConclusionStatus::Falsified {
            counterexample: Counterexample::Pointwise {
                label: "monotone and non-negative on grid".into(),
                coords: vec![],
                margin: 0.0,
            },
        }
    };
    Ok(b.finish(status))
}

/// Holds when `f ∈ GK_s^1` is non-decreasing on the positive grid and
/// still drops from `f(0)` to the right of 0.
pub fn check_remark32(
    f: &FunctionExpr,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("rem3.2", &format!("rem3.2:{f}"), CITE_R32);
    b.detail("function", f.to_string());
    b.hypothesis("0 < s < 1", in_open_unit(ctx.s), format!("s = {}", ctx.s));
    b.hypothesis_verdict("f in GK_s^1", &certify_search(f, Sense::First, ctx, budget)?);
    if !b.hypotheses_ok() {
        return Ok(b.unmet());
    }
    let view = base_view(f, ctx);
    let pts = grid.points(&f.breakpoints());
    let pos = positive(&pts);
    let dec = first_decrease(&view, &pos, ctx, "decrease on (0, u_max]")?;
    let on_closed = first_decrease(&view, &pts, ctx, "decrease on [0, u_max]")?;
    b.detail("open_half_line", describe(&dec));
    b.detail("closed_half_line", describe(&on_closed));
    let status = match (dec, on_closed) {
        (Some(c), _) => ConclusionStatus::Falsified { counterexample: c },
        (None, Some(_)) => ConclusionStatus::Holds,
        (None, None) => ConclusionStatus::Falsified {
            counterexample: Counterexample::Pointwise {
                label: "non-decreasing on [0, u_max]".into(),
                coords: vec![0.0],
                margin: 0.0,
            },
        },
    };
    Ok(b.finish(status))
}
