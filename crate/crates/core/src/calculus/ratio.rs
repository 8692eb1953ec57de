use serde::{Deserialize, Serialize};

use super::limits::{aitken, richardson};
use super::{lf_derivative, CalcError, CalcResult, FractalFunction, LimitScheme};
use crate::algebra::AlphaContext;

const PRECONDITION_STEPS: [f64; 3] = [1e-3, 1e-5, 1e-7];
const VANISH_TOL: f64 = 1e-8;
const AGREE_TOL: f64 = 1e-4;
const SAMPLES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioLimitReport {
    pub x0: f64,
    /// Limit of `f^{(α)}(x) / g^{(α)}(x)`.
    pub derivative_ratio: CalcResult,
    /// Limit of `f(x) / g(x)`, the cross-check.
    pub direct_ratio: CalcResult,
    /// Estimated one-sided limits of `f` and `g` at `x0`, in base.
    pub f_limit_base: f64,
    pub g_limit_base: f64,
    pub agree: bool,
}

fn right_limit(f: &impl FractalFunction, x0: f64) -> Result<f64, CalcError> {
    let [a, b, c] = PRECONDITION_STEPS.map(|h| f.eval(x0 + h).map(|y| y.base));
    Ok(aitken(a?, b?, c?))
}

/// Sampled right-hand limit at `x0` of `f^{(α)}/g^{(α)}` and of `f/g`.
///
/// Ratios are taken at `x0 + h0·2^{-i}` and extrapolated in base space.
/// `agree` is false when the two limits differ by more than `1e-4`
/// relative in value.
pub fn ratio_limit(
    f: &impl FractalFunction,
    g: &impl FractalFunction,
    x0: f64,
    ctx: &AlphaContext,
    scheme: &LimitScheme,
) -> Result<RatioLimitReport, CalcError> {
    if !(x0 >= 0.0 && x0.is_finite()) {
        return Err(CalcError::Domain(format!("x0 = {x0} is outside [0, ∞)")));
    }
    let (fl, gl) = (right_limit(f, x0)?, right_limit(g, x0)?);
    if fl.abs() > VANISH_TOL || gl.abs() > VANISH_TOL {
        return Err(CalcError::Precondition(format!(
            "f and g must both tend to 0^α at {x0} (bases {fl:e}, {gl:e})"
        )));
    }

    let point = |i: usize| x0 + scheme.h0 * 0.5f64.powi(i as i32);
    let inner = LimitScheme {
        h0: scheme.h0 * 0.5f64.powi(SAMPLES as i32 + 2),
        ..*scheme
    };
    let derivative = richardson(SAMPLES, 0.5, 1, |i| -> Result<f64, CalcError> {
        let x = point(i);
        let df = lf_derivative(f, x, ctx, &inner)?;
        let dg = lf_derivative(g, x, ctx, &inner)?;
        if dg.base == 0.0 {
            return Err(CalcError::Precondition(format!("g^(α) vanishes at {x}")));
        }
        Ok(df.base / dg.base)
    })?;
    let direct = richardson(SAMPLES, 0.5, 1, |i| -> Result<f64, CalcError> {
        let x = point(i);
        let gx = g.eval(x)?;
        Ok(f.eval(x)?.checked_div(gx)?.base)
    })?;

    let derivative_ratio = CalcResult::from_base(
        derivative.estimate,
        derivative.error,
        derivative.terms_used,
        scheme.rel_tol,
        ctx,
    );
    let direct_ratio =
        CalcResult::from_base(direct.estimate, direct.error, direct.terms_used, scheme.rel_tol, ctx);
    let (v1, v2) = (derivative_ratio.value, direct_ratio.value);
    let agree = (v1 - v2).abs() <= AGREE_TOL * v1.abs().max(v2.abs()).max(1.0);
    Ok(RatioLimitReport {
        x0,
        derivative_ratio,
        direct_ratio,
        f_limit_base: fl,
        g_limit_base: gl,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Bound;
    use crate::model::{parse, FunctionExpr};

    fn run(f: &str, g: &str) -> Result<RatioLimitReport, CalcError> {
        let c = AlphaContext::new(0.5, 0.5).unwrap();
        let (f, g) = (parse(f).unwrap(), parse(g).unwrap());
        ratio_limit(&Bound::new(&f, &c), &Bound::new(&g, &c), 0.0, &c, &LimitScheme::default())
    }

    #[test]
    fn identical_functions() {
        let r = run("mono(1)", "mono(1)").unwrap();
        assert!((r.derivative_ratio.value - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.agree);
    }

    #[test]
    fn higher_order_numerator() {
        let r = run("mono(2)", "mono(1)").unwrap();
        assert!(r.derivative_ratio.value.abs() < 1e-4, "{r:?}");
        assert!(r.direct_ratio.value.abs() < 1e-4, "{r:?}");
        assert!(r.agree);
    }

    #[test]
    fn constant_factor() {
        let r = run("mono(1)", "fv(2) * mono(1)").unwrap();
        assert!((r.derivative_ratio.value - 0.5).abs() < 1e-9, "{r:?}");
        assert!(r.agree);
    }

    #[test]
    fn nonvanishing_numerator_is_rejected() {
        let e = run("mono(1) + fb(1)", "mono(1)").unwrap_err();
        assert!(matches!(e, CalcError::Precondition(_)));
        let _ = FunctionExpr::mono(1.0);
    }
}
