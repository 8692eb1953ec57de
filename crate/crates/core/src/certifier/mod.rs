//! Membership tests for the generalized s-convexity classes GK_s^1, GK_s^2
//! and the classical classes K_s^1, K_s^2.
//!
//! The inequality `f(λ1 u + λ2 v) <= λ1^{sα} f(u) + λ2^{sα} f(v)` reads, in
//! base space, `f_b(λ1 u + λ2 v) <= λ1^s f_b(u) + λ2^s f_b(v)`, which is the
//! classical inequality for the base function `f_b`. All margins are
//! computed this way, so the generalized and classical certifiers share a
//! single search engine.
//!
//! A verdict is proven only by a syntactic rule; sampling can only falsify.

mod patterns;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlphaContext;
use crate::model::{base_view, EvalError, FunctionExpr};

pub use patterns::{example41_params, match_rules, monotone_nonneg, thm35_factor, Example41Shape, RuleMatch};

use search::{margin_of, Problem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid search budget: {0}")]
    Budget(String),
    #[error("invalid order s = {0}")]
    Order(f64),
}

/// First sense: `λ1^s + λ2^s = 1`; second sense: `λ1 + λ2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    First,
    Second,
}

impl Sense {
    pub fn index(self) -> u8 {
        match self {
            Sense::First => 1,
            Sense::Second => 2,
        }
    }
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sense::First => "first",
            Sense::Second => "second",
        })
    }
}

/// Exact constraint, or the relaxed one with constraint sum `r < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Exact,
    Relaxed,
}

/// `(λ1, λ2)` for the parameter `t ∈ [0, 1]`.
///
/// The relaxed pair is the exact pair scaled so that the constraint sum
/// becomes `r`; `r` is ignored for the exact variant.
pub fn constraint_pair(sense: Sense, variant: Variant, t: f64, r: f64, s: f64) -> (f64, f64) {
    let r = match variant {
        Variant::Exact => 1.0,
        Variant::Relaxed => r,
    };
    match sense {
        Sense::First => {
            let p = 1.0 / s;
            let k = r.powf(p);
            (k * t.powf(p), k * (1.0 - t).powf(p))
        }
        Sense::Second => (r * t, r * (1.0 - t)),
    }
}

/// Constraint sum `λ1^s + λ2^s` or `λ1 + λ2`.
pub fn constraint_sum(sense: Sense, l1: f64, l2: f64, s: f64) -> f64 {
    match sense {
        Sense::First => l1.powf(s) + l2.powf(s),
        Sense::Second => l1 + l2,
    }
}

/// `base(f(λ1 u + λ2 v)) - base(λ1^{sα} f(u) + λ2^{sα} f(v))`; positive
/// means the inequality fails.
pub fn inequality_margin(
    f: &FunctionExpr,
    u: f64,
    v: f64,
    lambda1: f64,
    lambda2: f64,
    ctx: &AlphaContext,
) -> Result<f64, EvalError> {
    margin_of(&base_view(f, ctx), u, v, lambda1, lambda2, ctx.s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Points per u/v axis, before adding 0, 1 and breakpoints.
    pub grid_n: usize,
    /// Points on the `t` axis.
    pub t_n: usize,
    pub random_trials: usize,
    pub refine_steps: usize,
    pub seed: u64,
    pub u_max: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            grid_n: 64,
            t_n: 128,
            random_trials: 100_000,
            refine_steps: 40,
            seed: 0,
            u_max: 10.0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<(), CertifyError> {
        if self.grid_n < 2 || self.t_n < 2 {
            return Err(CertifyError::Budget("grid sizes must be at least 2".into()));
        }
        if !(self.u_max > 0.0 && self.u_max.is_finite()) {
            return Err(CertifyError::Budget(format!("u_max must be positive, got {}", self.u_max)));
        }
        Ok(())
    }
}

/// A concrete falsifying tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub u: f64,
    pub v: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Violation size in base space.
    pub margin: f64,
}

impl Witness {
    /// Recomputes the margin from scratch.
    pub fn replay(&self, f: &FunctionExpr, ctx: &AlphaContext) -> Result<f64, EvalError> {
        inequality_margin(f, self.u, self.v, self.lambda1, self.lambda2, ctx)
    }

    pub fn replay_classical<G>(&self, g: &G, s: f64) -> Result<f64, EvalError>
    where
        G: Fn(f64) -> Result<f64, EvalError> + ?Sized,
    {
        margin_of(g, self.u, self.v, self.lambda1, self.lambda2, s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerdictStatus {
    ProvenMember { rule_id: String, citation: String },
    Violation { witness: Witness },
    NoViolationFound { evaluations: u64, max_margin_seen: f64 },
}

impl VerdictStatus {
    pub fn is_violation(&self) -> bool {
        matches!(self, VerdictStatus::Violation { .. })
    }

    /// `"violation"` or `"no_violation"`; proven membership and an
    /// exhausted budget fall in the same class.
    pub fn class(&self) -> &'static str {
        if self.is_violation() {
            "violation"
        } else {
            "no_violation"
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            VerdictStatus::Violation { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetStats {
    pub evaluations: u64,
    pub max_margin_seen: f64,
    pub grid_points: u64,
    pub random_trials: u64,
    pub refine_steps: u64,
    pub seed: u64,
    pub u_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    #[serde(flatten)]
    pub status: VerdictStatus,
    pub sense: Sense,
    pub variant: Variant,
    pub s: f64,
    pub alpha: f64,
    /// `s = 1`, where the classes reduce to generalized convexity.
    pub boundary_case: bool,
    pub budget_stats: BudgetStats,
}

impl ConvexityVerdict {
    pub fn is_violation(&self) -> bool {
        self.status.is_violation()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.status.witness()
    }
}

struct SearchSpec<'a> {
    sense: Sense,
    variant: Variant,
    s: f64,
    alpha: f64,
    tol_violation: f64,
    budget: &'a SearchBudget,
    extra_points: &'a [f64],
}

fn run_search<G>(g: &G, spec: SearchSpec<'_>, rule: Option<RuleMatch>) -> Result<ConvexityVerdict, CertifyError>
where
    G: Fn(f64) -> Result<f64, EvalError> + Sync + ?Sized,
{
    if !(spec.s > 0.0 && spec.s <= 1.0) {
        return Err(CertifyError::Order(spec.s));
    }
    spec.budget.validate()?;
    let problem = Problem {
        g,
        sense: spec.sense,
        variant: spec.variant,
        s: spec.s,
        budget: spec.budget,
        extra_points: spec.extra_points,
    };
    let out = problem.run()?;
    let best = out.best;
    let status = if best.margin > spec.tol_violation {
        VerdictStatus::Violation {
            witness: Witness {
                u: best.u,
                v: best.v,
                lambda1: best.lambda1,
                lambda2: best.lambda2,
                margin: best.margin,
            },
        }
    } else if let Some(rule) = rule {
        VerdictStatus::ProvenMember {
            rule_id: rule.rule_id.to_string(),
            citation: rule.citation.to_string(),
        }
    } else {
        VerdictStatus::NoViolationFound {
            evaluations: out.evaluations,
            max_margin_seen: best.margin,
        }
    };
    Ok(ConvexityVerdict {
        status,
        sense: spec.sense,
        variant: spec.variant,
        s: spec.s,
        alpha: spec.alpha,
        boundary_case: spec.s == 1.0,
        budget_stats: BudgetStats {
            evaluations: out.evaluations,
            max_margin_seen: best.margin,
            grid_points: out.grid_points,
            random_trials: out.random_trials,
            refine_steps: out.refine_steps,
            seed: spec.budget.seed,
            u_max: spec.budget.u_max,
        },
    })
}

fn generalized(
    f: &FunctionExpr,
    sense: Sense,
    variant: Variant,
    ctx: &AlphaContext,
    budget: &SearchBudget,
    rule: Option<RuleMatch>,
) -> Result<ConvexityVerdict, CertifyError> {
    let breaks = f.breakpoints();
    let verdict = run_search(
        &base_view(f, ctx),
        SearchSpec {
            sense,
            variant,
            s: ctx.s,
            alpha: ctx.alpha,
            tol_violation: ctx.tol_violation,
            budget,
            extra_points: &breaks,
        },
        rule,
    )?;
    if let Some(w) = verdict.witness() {
        let replayed = w.replay(f, ctx)?;
        debug_assert!((replayed - w.margin).abs() <= 1e-10, "witness {w:?} replays to {replayed}");
    }
    Ok(verdict)
}

/// Pattern rules first, then grid, random and refinement search.
///
/// A found violation always wins over a matching rule, so a mismatch
/// between the two cannot hide.
pub fn certify(
    f: &FunctionExpr,
    sense: Sense,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict, CertifyError> {
    let rule = match_rules(f, sense, ctx);
    generalized(f, sense, Variant::Exact, ctx, budget, rule)
}

/// Search only, without pattern rules.
pub fn certify_search(
    f: &FunctionExpr,
    sense: Sense,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict, CertifyError> {
    generalized(f, sense, Variant::Exact, ctx, budget, None)
}

/// Search over the relaxed constraint, `r ∈ [0, 1)`.
pub fn certify_relaxed(
    f: &FunctionExpr,
    sense: Sense,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict, CertifyError> {
    generalized(f, sense, Variant::Relaxed, ctx, budget, None)
}

/// Generalized search for a function given only through its base map,
/// e.g. one built from classical pieces.
pub fn certify_base<G>(
    g: &G,
    sense: Sense,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<ConvexityVerdict, CertifyError>
where
    G: Fn(f64) -> Result<f64, EvalError> + Sync + ?Sized,
{
    run_search(
        g,
        SearchSpec {
            sense,
            variant: Variant::Exact,
            s: ctx.s,
            alpha: ctx.alpha,
            tol_violation: ctx.tol_violation,
            budget,
            extra_points: &[],
        },
        None,
    )
}

/// The same search for a real function in ordinary arithmetic
/// (reported with `alpha = 1`).
pub fn certify_classical<G>(
    g: &G,
    sense: Sense,
    s: f64,
    budget: &SearchBudget,
    tol_violation: f64,
) -> Result<ConvexityVerdict, CertifyError>
where
    G: Fn(f64) -> Result<f64, EvalError> + Sync + ?Sized,
{
    run_search(
        g,
        SearchSpec {
            sense,
            variant: Variant::Exact,
            s,
            alpha: 1.0,
            tol_violation,
            budget,
            extra_points: &[],
        },
        None,
    )
}
