use serde::{Deserialize, Serialize};

use super::basic::{classical_verdict, positive, scalar_points, verdict_at};
use super::{
    describe, falsified_or_holds, first_decrease, first_negative, slack, Builder, CheckGrid,
    ConclusionStatus, Counterexample, TheoremError, TheoremReport,
};
use crate::algebra::{AlphaContext, FractalScalar};
use crate::calculus::{
    continuity_probe, lf_integral, CalcError, CalcResult, FractalFunction, MeshSpec, DEFAULT_EPS_GRID,
};
use crate::certifier::{SearchBudget, Sense};
use crate::gamma::gamma;
use crate::model::combine::compose;
use crate::model::{base_view, EvalError, FunctionExpr, ScalarExpr};

const CITE_PHI: &str = "phi-type: f(0) = 0^alpha, f local fractional continuous and non-decreasing";
const CITE_C31: &str = "cor3.1: Phi o g is in GK_s^1, in particular Phi(u^s)";
const CITE_C32: &str = "cor3.2: f o Phi is in GK_s^2, in particular [Phi(u)]^(s alpha)";
const CITE_37: &str = "thm3.7: f(2^(-1/s) u) <= Phi(u^s) <= f(u) for a generalized convex phi-type Phi";

/// Points probed for continuity: 0, breakpoints and a few log-spaced ones.
fn continuity_points(breakpoints: &[f64], u_max: f64) -> Vec<f64> {
    let (lo, hi) = (1e-3_f64.ln(), u_max.max(1.0).ln());
    let mut pts: Vec<f64> = (0..16).map(|i| (lo + (hi - lo) * i as f64 / 15.0).exp()).collect();
    pts.push(0.0);
    pts.extend(breakpoints.iter().copied().filter(|&c| c >= 0.0));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn first_discontinuity(
    f: &impl FractalFunction,
    pts: &[f64],
    ctx: &AlphaContext,
) -> Result<Option<Counterexample>, CalcError> {
    for &x0 in pts {
        let r = continuity_probe(f, x0, ctx, &DEFAULT_EPS_GRID)?;
        if !r.continuous {
            return Ok(Some(Counterexample::Pointwise {
                label: "discontinuity".into(),
                coords: vec![x0],
                margin: r.jump_base,
            }));
        }
    }
    Ok(None)
}

fn zero_at_origin(b0: f64, ctx: &AlphaContext, what: &str) -> Option<Counterexample> {
    (b0.abs() > ctx.tol_violation).then(|| Counterexample::Pointwise {
        label: format!("{what}(0) != 0"),
        coords: vec![0.0],
        margin: b0.abs(),
    })
}

/// First failed φ-type property of `f`, if any.
fn phi_type_issue(
    f: &FunctionExpr,
    ctx: &AlphaContext,
    grid: &CheckGrid,
) -> Result<Option<Counterexample>, TheoremError> {
    let view = base_view(f, ctx);
    let br = f.breakpoints();
    let pts = grid.points(&br);
    if let Some(c) = zero_at_origin(view(0.0)?, ctx, "f") {
        return Ok(Some(c));
    }
    if let Some(c) = first_negative(&view, &pts, ctx, "negative value")? {
        return Ok(Some(c));
    }
    if let Some(c) = first_decrease(&view, &pts, ctx, "decrease")? {
        return Ok(Some(c));
    }
    let bound = crate::calculus::Bound::new(f, ctx);
    Ok(first_discontinuity(&bound, &continuity_points(&br, grid.u_max), ctx)?)
}

/// First failed φ-function property of a real `g`, if any.
fn phi_function_issue(
    g: &ScalarExpr,
    ctx: &AlphaContext,
    grid: &CheckGrid,
) -> Result<Option<Counterexample>, TheoremError> {
    let gv = |u: f64| g.eval(u);
    let pts = scalar_points(g, grid);
    if let Some(c) = zero_at_origin(g.eval(0.0)?, ctx, "g") {
        return Ok(Some(c));
    }
    if let Some(c) = first_negative(&gv, &pts, ctx, "negative value")? {
        return Ok(Some(c));
    }
    if let Some(c) = first_decrease(&gv, &pts, ctx, "decrease")? {
        return Ok(Some(c));
    }
    let lifted = |u: f64| -> Result<FractalScalar, CalcError> { Ok(FractalScalar::from_base(g.eval(u)?)) };
    let mut br = Vec::new();
    g.breakpoints(&mut br);
    Ok(first_discontinuity(&lifted, &continuity_points(&br, grid.u_max), ctx)?)
}

pub fn phi_type_check(
    f: &FunctionExpr,
    ctx: &AlphaContext,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let mut b = Builder::new("phi_type", &format!("phi_type:{f}"), CITE_PHI);
    b.detail("function", f.to_string());
    let issue = phi_type_issue(f, ctx, grid)?;
    b.detail("result", describe(&issue));
    Ok(b.finish(falsified_or_holds(issue)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorollaryInput {
    /// `Φ ∘ g` with `Φ` a generalized convex φ-type function and `g ∈ K_s^1`
    /// a φ-function.
    Cor31 { phi: FunctionExpr, g: ScalarExpr },
    /// `f ∘ Φ` with `Φ` a convex φ-function and `f ∈ GK_s^2` φ-type.
    Cor32 { phi: ScalarExpr, f: FunctionExpr },
}

pub fn check_corollaries(
    input: &CorollaryInput,
    s: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
) -> Result<TheoremReport, TheoremError> {
    let ctx_s = ctx.with_s(s)?;
    match input {
        CorollaryInput::Cor31 { phi, g } => {
            let mut b = Builder::new("cor3.1", &format!("cor3.1:{phi}"), CITE_C31);
            let phi = phi.bind_s(s);
            let c1 = ctx.with_s(1.0)?;
            b.hypothesis_verdict("Phi generalized convex", &verdict_at(&phi, Sense::First, 1.0, ctx, budget)?);
            let issue = phi_type_issue(&phi, &c1, grid)?;
            b.hypothesis("Phi phi-type", issue.is_none(), describe(&issue));
            b.hypothesis_verdict("g in K_s^1", &classical_verdict(g, Sense::First, s, ctx, budget)?);
            let issue = phi_function_issue(g, ctx, grid)?;
            b.hypothesis("g phi-function", issue.is_none(), describe(&issue));
            if !b.hypotheses_ok() {
                return Ok(b.unmet());
            }
            let h = compose(phi, g.clone());
            b.detail("function", h.to_string());
            let v = verdict_at(&h, Sense::First, s, &ctx_s, budget)?;
            Ok(b.conclude_verdict("Phi o g in GK_s^1", &v))
        }
        CorollaryInput::Cor32 { phi, f } => {
            let mut b = Builder::new("cor3.2", &format!("cor3.2:{f}"), CITE_C32);
            let f = f.bind_s(s);
            b.hypothesis_verdict("Phi convex", &classical_verdict(phi, Sense::First, 1.0, ctx, budget)?);
            let issue = phi_function_issue(phi, ctx, grid)?;
            b.hypothesis("Phi phi-function", issue.is_none(), describe(&issue));
            b.hypothesis_verdict("f in GK_s^2", &verdict_at(&f, Sense::Second, s, ctx, budget)?);
            let issue = phi_type_issue(&f, &ctx_s, grid)?;
            b.hypothesis("f phi-type", issue.is_none(), describe(&issue));
            if !b.hypotheses_ok() {
                return Ok(b.unmet());
            }
            let h = compose(f, phi.clone());
            b.detail("function", h.to_string());
            let v = verdict_at(&h, Sense::Second, s, &ctx_s, budget)?;
            Ok(b.conclude_verdict("f o Phi in GK_s^2", &v))
        }
    }
}

/// `Φ(w) = Γ(1+α) · _0I_w^{(α)} (f(t^{1/s}) / t^α)`.
#[derive(Debug, Clone)]
pub struct PhiFunction {
    pub f: FunctionExpr,
    pub s: f64,
    pub ctx: AlphaContext,
    pub mesh: MeshSpec,
}

impl PhiFunction {
    pub fn new(f: &FunctionExpr, s: f64, ctx: &AlphaContext, mesh: &MeshSpec) -> Self {
        Self {
            f: f.bind_s(s),
            s,
            ctx: *ctx,
            mesh: *mesh,
        }
    }

    pub fn compute(&self, w: f64) -> Result<CalcResult, CalcError> {
        if w < 0.0 {
            return Err(CalcError::Domain(format!("Phi needs w >= 0, got {w}")));
        }
        if w == 0.0 {
            return Ok(CalcResult {
                value: 0.0,
                base: 0.0,
                convergence_estimate: 0.0,
                levels_used: 0,
                converged: true,
            });
        }
        let integrand = |t: f64| -> Result<FractalScalar, CalcError> {
            let num = self.f.evaluate(t.powf(1.0 / self.s), &self.ctx)?;
            Ok(num.checked_div(FractalScalar::from_base(t))?)
        };
        let r = lf_integral(&integrand, 0.0, w, &self.ctx, &self.mesh)?;
        let g = gamma(1.0 + self.ctx.alpha)?;
        let scaled = self.ctx.scale(g, r.scalar());
        Ok(CalcResult {
            value: self.ctx.value(scaled),
            base: scaled.base,
            convergence_estimate: g * r.convergence_estimate,
            levels_used: r.levels_used,
            converged: r.converged,
        })
    }
}

impl FractalFunction for PhiFunction {
    fn eval(&self, x: f64) -> Result<FractalScalar, CalcError> {
        Ok(self.compute(x)?.scalar())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub u: f64,
    /// `f(2^{-1/s} u)`.
    pub lower_value: f64,
    /// `Φ(u^s)`.
    pub phi_value: f64,
    /// `f(u)`.
    pub upper_value: f64,
    pub lower_base: f64,
    pub phi_base: f64,
    pub upper_base: f64,
    pub phi_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub s: f64,
    pub alpha: f64,
    pub rows: Vec<SandwichRow>,
    pub holds: bool,
    pub convex_midpoint_ok: bool,
    pub phi_monotone: bool,
    pub phi_zero_at_origin: bool,
}

#[derive(Debug, Clone)]
pub struct PhiThm37 {
    pub phi: PhiFunction,
    /// Present when every hypothesis held.
    pub sandwich: Option<SandwichReport>,
    pub report: TheoremReport,
}

/// `u = i/25` for `i = 0..100`.
pub fn sandwich_grid() -> Vec<f64> {
    (0..100).map(|i| i as f64 / 25.0).collect()
}

fn chain_tol(ctx: &AlphaContext, mesh: &MeshSpec, x: f64) -> f64 {
    slack(ctx, x) + 10.0 * mesh.rel_tol * x.abs()
}

impl PhiThm37 {
    pub fn sandwich_at(&self, us: &[f64]) -> Result<SandwichReport, TheoremError> {
        self.phi.sandwich(us)
    }
}

impl PhiFunction {
    /// Evaluates the chain `f(2^{-1/s} u) <= Φ(u^s) <= f(u)` at each `u`.
    pub fn sandwich(&self, us: &[f64]) -> Result<SandwichReport, TheoremError> {
        let phi = self;
        let ctx = &phi.ctx;
        let shrink = 2f64.powf(-1.0 / phi.s);
        let mut rows = Vec::with_capacity(us.len());
        for &u in us {
            let lower = phi.f.evaluate(shrink * u, ctx)?;
            let upper = phi.f.evaluate(u, ctx)?;
            let p = phi.compute(u.powf(phi.s))?;
            let holds = lower.base <= p.base + chain_tol(ctx, &phi.mesh, p.base)
                && p.base <= upper.base + chain_tol(ctx, &phi.mesh, upper.base);
            rows.push(SandwichRow {
                u,
                lower_value: ctx.value(lower),
                phi_value: p.value,
                upper_value: ctx.value(upper),
                lower_base: lower.base,
                phi_base: p.base,
                upper_base: upper.base,
                phi_error: p.convergence_estimate,
                holds,
            });
        }
        // Φ itself on a uniform grid: convexity, monotonicity, Φ(0) = 0.
        let ws = sandwich_grid();
        let phis: Vec<f64> = ws
            .iter()
            .map(|&w| phi.compute(w).map(|r| r.base))
            .collect::<Result<_, _>>()?;
        let convex_midpoint_ok = phis.windows(3).all(|w| {
            let mid = 0.5 * (w[0] + w[2]);
            w[1] <= mid + chain_tol(ctx, &phi.mesh, mid)
        });
        let phi_monotone = phis
            .windows(2)
            .all(|w| w[0] <= w[1] + chain_tol(ctx, &phi.mesh, w[1]));
        Ok(SandwichReport {
            s: phi.s,
            alpha: ctx.alpha,
            holds: rows.iter().all(|r| r.holds),
            rows,
            convex_midpoint_ok,
            phi_monotone,
            phi_zero_at_origin: phis[0] == 0.0,
        })
    }
}

pub fn build_phi_thm37(
    f: &FunctionExpr,
    s: f64,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    grid: &CheckGrid,
    mesh: &MeshSpec,
) -> Result<PhiThm37, TheoremError> {
    let mut b = Builder::new("thm3.7", &format!("thm3.7:{f}"), CITE_37);
    b.detail("function", f.to_string());
    b.detail("s", s);
    let ok = s > 0.0 && s < 1.0;
    let phi_ctx = if ok { ctx.with_s(s)? } else { *ctx };
    let phi = PhiFunction::new(f, s, &phi_ctx, mesh);
    if !b.hypothesis("0 < s < 1", ok, format!("s = {s}")) {
        return Ok(PhiThm37 { phi, sandwich: None, report: b.unmet() });
    }
    let fs = &phi.f;
    b.hypothesis_verdict("f in GK_s^1", &verdict_at(fs, Sense::First, s, ctx, budget)?);
    let issue = phi_type_issue(fs, &phi_ctx, grid)?;
    b.hypothesis("f phi-type", issue.is_none(), describe(&issue));
    let q = |u: f64| -> Result<f64, EvalError> { Ok(fs.base_at(u.powf(1.0 / s), &phi_ctx)? / u) };
    let pos = positive(&grid.points(&[]));
    let dec = first_decrease(&q, &pos, &phi_ctx, "f(u^(1/s))/u^alpha decreases")?;
    b.hypothesis("f(u^(1/s))/u^alpha non-decreasing", dec.is_none(), describe(&dec));
    if !b.hypotheses_ok() {
        return Ok(PhiThm37 { phi, sandwich: None, report: b.unmet() });
    }
    let sw = phi.sandwich(&sandwich_grid())?;
    b.detail("grid_points", sw.rows.len());
    b.detail("convex_midpoint_ok", sw.convex_midpoint_ok);
    b.detail("phi_monotone", sw.phi_monotone);
    b.detail("phi_zero_at_origin", sw.phi_zero_at_origin);
    if let Some(row) = sw.rows.iter().find(|r| r.u == 1.0) {
        b.detail("chain_at_1", [row.lower_value, row.phi_value, row.upper_value]);
    }
    let status = if let Some(r) = sw.rows.iter().find(|r| !r.holds) {
        let margin = (r.lower_base - r.phi_base).max(r.phi_base - r.upper_base);
        ConclusionStatus::Falsified {
            counterexample: Counterexample::Pointwise {
                label: "sandwich chain broken".into(),
                coords: vec![r.u],
                margin,
            },
        }
    } else if !(sw.convex_midpoint_ok && sw.phi_monotone && sw.phi_zero_at_origin) {
        ConclusionStatus::Falsified {
            counterexample: Counterexample::Pointwise {
                label: "Phi not a generalized convex phi-type function on grid".into(),
                coords: vec![],
                margin: 0.0,
            },
        }
    } else {
        ConclusionStatus::Holds
    };
    Ok(PhiThm37 {
        phi,
        sandwich: Some(sw),
        report: b.finish(status),
    })
}
