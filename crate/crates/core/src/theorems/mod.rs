//! Structural results about GK_s^1 / GK_s^2 as executable checks.
//!
//! Every check first tests its hypotheses (by search, so they can only be
//! refuted) and evaluates the conclusion only when none was refuted. A
//! falsified conclusion carries a counterexample that can be replayed.

mod basic;
mod phi;
mod suite;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlphaContext};
use crate::calculus::{continuity_probe, CalcError, DEFAULT_EPS_GRID};
use crate::calculus::limits::aitken;
use crate::certifier::{CertifyError, ConvexityVerdict, Sense, Witness};
use crate::model::combine::CombineError;
use crate::model::{EvalError, FunctionExpr};

pub use basic::{
    check_bivariate_convex, check_remark31, check_remark32, check_thm31, check_thm32, check_thm33,
    check_thm34, check_thm35, check_thm36, BivariateBox, BivariateFn, Part31, Part34, Thm36Input,
};
pub use phi::{
    build_phi_thm37, check_corollaries, phi_type_check, sandwich_grid, CorollaryInput, PhiFunction,
    PhiThm37, SandwichReport, SandwichRow,
};
pub use suite::{run_suite, traceability_table, SuiteConfig};


#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Combine(#[from] CombineError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// A violated convexity inequality.
    Convexity { witness: Witness, sense: Sense, s: f64 },
    /// A violated pointwise property at the given coordinates.
    Pointwise {
        label: String,
        coords: Vec<f64>,
        margin: f64,
    },
    /// A violated two-variable inequality.
    Bivariate {
        u: f64,
        v: f64,
        r: f64,
        t: f64,
        lambda1: f64,
        lambda2: f64,
        margin: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConclusionStatus {
    Holds,
    Falsified { counterexample: Counterexample },
    HypothesisUnmet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub test_id: String,
    pub citation: String,
    pub hypotheses_checked: Vec<HypothesisCheck>,
    pub conclusion_status: ConclusionStatus,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.conclusion_status == ConclusionStatus::Holds
    }
}

pub(crate) struct Builder {
    report: TheoremReport,
}

impl Builder {
    pub fn new(theorem_id: &str, test_id: &str, citation: &str) -> Self {
        Self {
            report: TheoremReport {
                theorem_id: theorem_id.into(),
                test_id: test_id.into(),
                citation: citation.into(),
                hypotheses_checked: Vec::new(),
                conclusion_status: ConclusionStatus::HypothesisUnmet,
                details: BTreeMap::new(),
            },
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.report.details.insert(key.into(), v);
    }

    pub fn hypothesis(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.report.hypotheses_checked.push(HypothesisCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    /// Records "no violation found" for a certifier run.
    pub fn hypothesis_verdict(&mut self, name: &str, v: &ConvexityVerdict) -> bool {
        let detail = match v.witness() {
            Some(w) => format!("violation, margin {:e}", w.margin),
            None => format!(
                "no violation in {} evaluations, max margin {:e}",
                v.budget_stats.evaluations, v.budget_stats.max_margin_seen
            ),
        };
        self.detail(&format!("verdict: {name}"), v);
        self.hypothesis(name, !v.is_violation(), detail)
    }

    pub fn hypotheses_ok(&self) -> bool {
        self.report.hypotheses_checked.iter().all(|h| h.passed)
    }

    pub fn finish(mut self, status: ConclusionStatus) -> TheoremReport {
        self.report.conclusion_status = if self.hypotheses_ok() {
            status
        } else {
            ConclusionStatus::HypothesisUnmet
        };
        self.report
    }

    pub fn unmet(self) -> TheoremReport {
        self.finish(ConclusionStatus::HypothesisUnmet)
    }

    /// Conclusion from a certifier run of the concluded class.
    pub fn conclude_verdict(mut self, name: &str, v: &ConvexityVerdict) -> TheoremReport {
        self.detail(&format!("verdict: {name}"), v);
        let status = match v.witness() {
            Some(w) => ConclusionStatus::Falsified {
                counterexample: Counterexample::Convexity {
                    witness: *w,
                    sense: v.sense,
                    s: v.s,
                },
            },
            None => ConclusionStatus::Holds,
        };
        self.finish(status)
    }
}

/// Sample points for pointwise checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckGrid {
    /// Log-spaced points in `[1e-6, u_max]`.
    pub n_u: usize,
    /// Uniform points in `(0, 1]` for scaling factors.
    pub n_t: usize,
    pub u_max: f64,
}

impl Default for CheckGrid {
    fn default() -> Self {
        Self {
            n_u: 64,
            n_t: 128,
            u_max: 10.0,
        }
    }
}

impl CheckGrid {
    /// `{0} ∪ logspace ∪ {1}` plus each breakpoint and its immediate
    /// neighbours, sorted.
    pub fn points(&self, breakpoints: &[f64]) -> Vec<f64> {
        let n = self.n_u.max(2);
        let (lo, hi) = (1e-6_f64.ln(), self.u_max.ln());
        let mut pts: Vec<f64> = (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
            .collect();
        pts.push(0.0);
        if self.u_max >= 1.0 {
            pts.push(1.0);
        }
        for &c in breakpoints {
            if c >= 0.0 && c <= self.u_max {
                let eps = 1e-9 * c.abs().max(1.0);
                pts.extend([c, c + eps]);
                if c - eps >= 0.0 {
                    pts.push(c - eps);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn t_points(&self) -> Vec<f64> {
        let n = self.n_t.max(1);
        (1..=n).map(|i| i as f64 / n as f64).collect()
    }
}

/// Absolute slack for comparing bases of size `x`.
pub(crate) fn slack(ctx: &AlphaContext, x: f64) -> f64 {
    ctx.tol_violation * x.abs().max(1.0)
}

/// First `(u_i, u_{i+1})` with `g(u_i) > g(u_{i+1})` beyond slack, as a
/// pointwise counterexample.
pub(crate) fn first_decrease(
    g: &dyn Fn(f64) -> Result<f64, EvalError>,
    pts: &[f64],
    ctx: &AlphaContext,
    label: &str,
) -> Result<Option<Counterexample>, EvalError> {
    let vals: Vec<f64> = pts.iter().map(|&u| g(u)).collect::<Result<_, _>>()?;
    for i in 1..vals.len() {
        let drop = vals[i - 1] - vals[i];
        if drop > slack(ctx, vals[i - 1]) {
            return Ok(Some(Counterexample::Pointwise {
                label: label.into(),
                coords: vec![pts[i - 1], pts[i]],
                margin: drop,
            }));
        }
    }
    Ok(None)
}

/// Largest increase along the grid, for monotone non-increasing checks.
pub(crate) fn first_increase(
    g: &dyn Fn(f64) -> Result<f64, EvalError>,
    pts: &[f64],
    ctx: &AlphaContext,
    label: &str,
) -> Result<Option<Counterexample>, EvalError> {
    let neg = |u: f64| g(u).map(|x| -x);
    first_decrease(&neg, pts, ctx, label)
}

pub(crate) fn first_negative(
    g: &dyn Fn(f64) -> Result<f64, EvalError>,
    pts: &[f64],
    ctx: &AlphaContext,
    label: &str,
) -> Result<Option<Counterexample>, EvalError> {
    for &u in pts {
        let y = g(u)?;
        if y < -ctx.tol_violation {
            return Ok(Some(Counterexample::Pointwise {
                label: label.into(),
                coords: vec![u],
                margin: -y,
            }));
        }
    }
    Ok(None)
}

/// `lim_{u→0+} g(u)` by Aitken extrapolation.
pub(crate) fn right_limit_at_zero(g: &dyn Fn(f64) -> Result<f64, EvalError>) -> Result<f64, EvalError> {
    Ok(aitken(g(1e-3)?, g(1e-5)?, g(1e-7)?))
}

/// Whether `lim_{u→0+} g(u)` equals `g(0)`, via the continuity probe.
pub(crate) fn right_continuous_at_zero(f: &FunctionExpr, ctx: &AlphaContext) -> Result<bool, CalcError> {
    let b = crate::calculus::Bound::new(f, ctx);
    Ok(continuity_probe(&b, 0.0, ctx, &DEFAULT_EPS_GRID)?.continuous)
}

pub(crate) fn describe(c: &Option<Counterexample>) -> String {
    match c {
        None => "ok on grid".into(),
        Some(Counterexample::Pointwise { label, coords, margin }) => {
            format!("{label} at {coords:?} by {margin:e}")
        }
        Some(c) => format!("{c:?}"),
    }
}

pub(crate) fn falsified_or_holds(c: Option<Counterexample>) -> ConclusionStatus {
    match c {
        Some(counterexample) => ConclusionStatus::Falsified { counterexample },
        None => ConclusionStatus::Holds,
    }
}
