//! Local fractional calculus of order α on functions `ℝ₊ → ℝ^α`.
//!
//! * derivative: limit of `Γ(1+α)(f(x) - f(x0)) / (x - x0)^α`
//! * integral: `(1/Γ(1+α)) Σ f(t_j)(Δt_j)^α` on refined uniform meshes
//!
//! Real prefactors act on values and `(Δt)^α` enters as the element with
//! base `Δt`. Under these conventions the derivative of `u ↦ ∫_a^u f` is `f`
//! again, which [`ftc_residual`] measures.

mod continuity;
mod derivative;
mod integral;
pub mod limits;
mod ratio;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlphaContext, FractalScalar};
use crate::gamma::GammaError;
use crate::model::{EvalError, FunctionExpr};

pub use continuity::{continuity_probe, ContinuityReport, EpsCheck, DEFAULT_EPS_GRID};
pub use derivative::{lf_derivative, LimitScheme};
pub use integral::{lf_integral, IntegralFunction, MeshSpec};
pub use ratio::{ratio_limit, RatioLimitReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalcError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// A function `ℝ₊ → ℝ^α` that the calculus operations can sample.
pub trait FractalFunction: Sync {
    fn eval(&self, x: f64) -> Result<FractalScalar, CalcError>;

    /// `f(x) - f(x0)`. Implementations may compute this directly when the
    /// difference of two evaluations would lose precision.
    fn increment(&self, x0: f64, x: f64) -> Result<FractalScalar, CalcError> {
        Ok(self.eval(x)? - self.eval(x0)?)
    }
}

/// A parsed function bound to its context.
#[derive(Debug, Clone, Copy)]
pub struct Bound<'a> {
    pub f: &'a FunctionExpr,
    pub ctx: &'a AlphaContext,
}

impl<'a> Bound<'a> {
    pub fn new(f: &'a FunctionExpr, ctx: &'a AlphaContext) -> Self {
        Self { f, ctx }
    }
}

impl FractalFunction for Bound<'_> {
    fn eval(&self, x: f64) -> Result<FractalScalar, CalcError> {
        Ok(self.f.evaluate(x, self.ctx)?)
    }
}

impl<F> FractalFunction for F
where
    F: Fn(f64) -> Result<FractalScalar, CalcError> + Sync,
{
    fn eval(&self, x: f64) -> Result<FractalScalar, CalcError> {
        self(x)
    }
}

/// Numerical result with its convergence bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalcResult {
    pub value: f64,
    pub base: f64,
    /// Estimated error, in value units.
    pub convergence_estimate: f64,
    /// Step sizes (derivative) or mesh levels (integral) actually used.
    pub levels_used: usize,
    pub converged: bool,
}

impl CalcResult {
    pub fn scalar(&self) -> FractalScalar {
        FractalScalar::from_base(self.base)
    }

    pub(crate) fn from_base(
        base: f64,
        base_error: f64,
        levels_used: usize,
        rel_tol: f64,
        ctx: &AlphaContext,
    ) -> Self {
        let x = FractalScalar::from_base(base);
        let value = x.value(ctx.alpha);
        let convergence_estimate = if base_error.is_finite() {
            let hi = FractalScalar::from_base(base + base_error).value(ctx.alpha);
            let lo = FractalScalar::from_base(base - base_error).value(ctx.alpha);
            (hi - value).abs().max((value - lo).abs())
        } else {
            f64::INFINITY
        };
        let converged = base.is_finite() && convergence_estimate <= rel_tol * value.abs().max(1.0);
        Self {
            value,
            base,
            convergence_estimate,
            levels_used,
            converged,
        }
    }
}

/// `|value(D^α ∫_a^u f |_{u=x}) - value(f(x))| / max(1, |value(f(x))|)`.
pub fn ftc_residual(
    f: &FunctionExpr,
    a: f64,
    x: f64,
    ctx: &AlphaContext,
    mesh: &MeshSpec,
    scheme: &LimitScheme,
) -> Result<f64, CalcError> {
    if !(a < x) {
        return Err(CalcError::Domain(format!("need a < x, got a = {a}, x = {x}")));
    }
    let integral = IntegralFunction::new(Bound::new(f, ctx), a, *ctx, *mesh);
    let d = lf_derivative(&integral, x, ctx, scheme)?;
    let fx = ctx.value(f.evaluate(x, ctx)?);
    Ok((d.value - fx).abs() / fx.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    #[test]
    fn ftc_spot_cases() {
        let ctx = AlphaContext::new(0.5, 0.5).unwrap();
        let (mesh, scheme) = (MeshSpec::default(), LimitScheme::default());
        let r = ftc_residual(&FunctionExpr::fv(1.0), 0.0, 1.0, &ctx, &mesh, &scheme).unwrap();
        assert!(r < 1e-6, "{r}");
        let r = ftc_residual(&FunctionExpr::mono(1.0), 0.0, 2.0, &ctx, &mesh, &scheme).unwrap();
        assert!(r < 1e-6, "{r}");
        let ex41 = parse("pw(u==0 -> fb(0); else -> fb(1)*mono(s) + fb(0))").unwrap();
        let r = ftc_residual(&ex41, 0.0, 1.0, &ctx, &mesh, &scheme).unwrap();
        assert!(r < 1e-5, "{r}");
        assert!(ftc_residual(&ex41, 1.0, 1.0, &ctx, &mesh, &scheme).is_err());
    }
}
