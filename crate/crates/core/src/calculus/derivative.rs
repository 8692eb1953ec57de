use serde::{Deserialize, Serialize};

use super::limits::richardson;
use super::{CalcError, CalcResult, FractalFunction};
use crate::algebra::{AlphaContext, FractalScalar};
use crate::gamma::gamma;

/// Step sequence for the derivative limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitScheme {
    pub h0: f64,
    pub ratio: f64,
    pub terms: usize,
    pub extrapolate: bool,
    /// Relative (value-space, floor 1) stabilization threshold.
    pub rel_tol: f64,
}

impl Default for LimitScheme {
    fn default() -> Self {
        Self {
            h0: 1e-2,
            ratio: 0.5,
            terms: 20,
            extrapolate: true,
            rel_tol: 1e-6,
        }
    }
}

/// Local fractional derivative `f^{(α)}(x0)`.
///
/// The quotient at step `h` is `scale(Γ(1+α), f(x0±h) - f(x0))` divided by
/// the element with base `±h`. Where `x0 - h0 >= 0` the right and left
/// quotients are averaged (a central difference in base space), otherwise
/// only right quotients are used. The sequence is Richardson-extrapolated in
/// base space; a non-stabilizing sequence is reported through
/// `converged = false` rather than an error.
pub fn lf_derivative(
    f: &impl FractalFunction,
    x0: f64,
    ctx: &AlphaContext,
    scheme: &LimitScheme,
) -> Result<CalcResult, CalcError> {
    if !(x0 >= 0.0) {
        return Err(CalcError::Domain(format!("x0 = {x0} is outside [0, ∞)")));
    }
    if !(scheme.h0 > 0.0 && scheme.ratio > 0.0 && scheme.ratio < 1.0 && scheme.terms >= 1) {
        return Err(CalcError::Domain(format!("invalid limit scheme {scheme:?}")));
    }
    let g = gamma(1.0 + ctx.alpha)?;
    let two_sided = x0 - scheme.h0 >= 0.0;

    let quotient = |h: f64| -> Result<f64, CalcError> {
        let right = ctx
            .scale(g, f.increment(x0, x0 + h)?)
            .checked_div(FractalScalar::from_base(h))?;
        if !two_sided {
            return Ok(right.base);
        }
        let left = ctx
            .scale(g, f.increment(x0, x0 - h)?)
            .checked_div(FractalScalar::from_base(-h))?;
        Ok(0.5 * (right.base + left.base))
    };
    let step = |i: usize| scheme.h0 * scheme.ratio.powi(i as i32);

    let (base, err, used) = if scheme.extrapolate {
        let power = if two_sided { 2 } else { 1 };
        let r = richardson(scheme.terms, scheme.ratio, power, |i| quotient(step(i)))?;
        (r.estimate, r.error, r.terms_used)
    } else {
        let mut last = quotient(step(0))?;
        let mut err = f64::INFINITY;
        for i in 1..scheme.terms {
            let q = quotient(step(i))?;
            err = (q - last).abs();
            last = q;
        }
        (last, err, scheme.terms)
    };
    Ok(CalcResult::from_base(base, err, used, scheme.rel_tol, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Bound;
    use crate::model::FunctionExpr;

    const GAMMA_1_5: f64 = 0.886_226_925_452_758;

    fn ctx() -> AlphaContext {
        AlphaContext::new(0.5, 0.5).unwrap()
    }

    #[test]
    fn constant_has_zero_derivative() {
        let c = ctx();
        for f in [FunctionExpr::fb(3.0), FunctionExpr::fv(-2.0)] {
            for x0 in [0.0, 0.005, 1.0, 7.5] {
                let d = lf_derivative(&Bound::new(&f, &c), x0, &c, &LimitScheme::default()).unwrap();
                assert_eq!(d.base, 0.0);
                assert_eq!(d.value, 0.0);
                assert!(d.converged);
            }
        }
    }

    #[test]
    fn identity_at_zero_is_gamma() {
        let c = ctx();
        let f = FunctionExpr::mono(1.0);
        let d = lf_derivative(&Bound::new(&f, &c), 0.0, &c, &LimitScheme::default()).unwrap();
        assert!((d.value - GAMMA_1_5).abs() < 1e-12, "{d:?}");
        assert!(d.converged);
    }

    #[test]
    fn square_at_two() {
        // base derivative 2·x0 = 4, value Γ(1.5)·4^{1/2}
        let c = ctx();
        let f = FunctionExpr::mono(2.0);
        let d = lf_derivative(&Bound::new(&f, &c), 2.0, &c, &LimitScheme::default()).unwrap();
        assert!((d.value - 2.0 * GAMMA_1_5).abs() < 1e-9, "{d:?}");
    }

    #[test]
    fn shrinking_h_oracle_agrees() {
        // Plain difference quotient at a tiny step, no extrapolation.
        let c = AlphaContext::new(0.7, 0.5).unwrap();
        let f = FunctionExpr::mono(1.5);
        let x0 = 1.3;
        let h = 1e-7;
        let g = gamma(1.7).unwrap();
        let df = f.base_at(x0 + h, &c).unwrap() - f.base_at(x0 - h, &c).unwrap();
        let oracle = g * (df / (2.0 * h)).powf(0.7);
        let d = lf_derivative(&Bound::new(&f, &c), x0, &c, &LimitScheme::default()).unwrap();
        assert!((d.value - oracle).abs() < 1e-7, "{} vs {oracle}", d.value);
    }

    #[test]
    fn infinite_slope_is_flagged() {
        let c = ctx();
        let f = FunctionExpr::mono(0.5);
        let d = lf_derivative(&Bound::new(&f, &c), 0.0, &c, &LimitScheme::default()).unwrap();
        assert!(!d.converged, "{d:?}");
    }

    #[test]
    fn rejects_negative_point() {
        let c = ctx();
        let f = FunctionExpr::mono(1.0);
        assert!(lf_derivative(&Bound::new(&f, &c), -1.0, &c, &LimitScheme::default()).is_err());
    }
}
