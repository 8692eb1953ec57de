use thiserror::Error;

use super::ast::{Branch, FunctionExpr, Guard, ScalarExpr};
use crate::algebra::{signed_pow, AlphaContext, FractalScalar, ScalarMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("argument u = {0} is outside the domain [0, ∞)")]
    NegativeArgument(f64),
    #[error("pole: u^{k} at u = 0")]
    Pole { k: f64 },
    #[error("invalid power: ({base})^{exponent}")]
    InvalidPower { base: f64, exponent: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("no piecewise branch matches u = {0}")]
    NoBranch(f64),
    #[error("inner function of a composition left [0, ∞): g({u}) = {inner}")]
    CompositionRange { u: f64, inner: f64 },
    #[error("non-finite result at u = {0}")]
    NonFinite(f64),
}

fn select<T>(branches: &[Branch<T>], u: f64) -> Result<&T, EvalError> {
    branches
        .iter()
        .find(|b| b.guard.matches(u))
        .map(|b| &b.body)
        .ok_or(EvalError::NoBranch(u))
}

/// `u^k` on `u >= 0`, with `0^0 = 1` and a pole for negative `k` at zero.
#[inline]
fn upow(u: f64, k: f64) -> Result<f64, EvalError> {
    if u == 0.0 {
        if k > 0.0 {
            Ok(0.0)
        } else if k == 0.0 {
            Ok(1.0)
        } else {
            Err(EvalError::Pole { k })
        }
    } else {
        Ok(u.powf(k))
    }
}

impl ScalarExpr {
    pub fn eval(&self, u: f64) -> Result<f64, EvalError> {
        let r = match self {
            ScalarExpr::Num { value } => *value,
            ScalarExpr::U => u,
            ScalarExpr::Add { lhs, rhs } => lhs.eval(u)? + rhs.eval(u)?,
            ScalarExpr::Sub { lhs, rhs } => lhs.eval(u)? - rhs.eval(u)?,
            ScalarExpr::Mul { lhs, rhs } => lhs.eval(u)? * rhs.eval(u)?,
            ScalarExpr::Div { lhs, rhs } => {
                let d = rhs.eval(u)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                lhs.eval(u)? / d
            }
            ScalarExpr::Neg { arg } => -arg.eval(u)?,
            ScalarExpr::Pow { arg, exponent } => {
                let b = arg.eval(u)?;
                let e = *exponent;
                if b < 0.0 && e.fract() != 0.0 {
                    return Err(EvalError::InvalidPower { base: b, exponent: e });
                }
                if b == 0.0 {
                    upow(0.0, e)?
                } else {
                    b.powf(e)
                }
            }
            ScalarExpr::Piecewise { branches } => select(branches, u)?.eval(u)?,
        };
        if r.is_finite() {
            Ok(r)
        } else {
            Err(EvalError::NonFinite(u))
        }
    }
}

impl FunctionExpr {
    /// `f(u)` for `u >= 0`.
    pub fn evaluate(&self, u: f64, ctx: &AlphaContext) -> Result<FractalScalar, EvalError> {
        if !(u >= 0.0) {
            return Err(EvalError::NegativeArgument(u));
        }
        let x = self.eval_unchecked(u, ctx)?;
        if x.base.is_finite() {
            Ok(x)
        } else {
            Err(EvalError::NonFinite(u))
        }
    }

    /// Base of `f(u)`.
    #[inline]
    pub fn base_at(&self, u: f64, ctx: &AlphaContext) -> Result<f64, EvalError> {
        self.evaluate(u, ctx).map(|x| x.base)
    }

    fn eval_unchecked(&self, u: f64, ctx: &AlphaContext) -> Result<FractalScalar, EvalError> {
        Ok(match self {
            FunctionExpr::Const { mode, x } => match mode {
                ScalarMode::Base => FractalScalar::from_base(*x),
                ScalarMode::Value => FractalScalar::from_base(signed_pow(*x, 1.0 / ctx.alpha)),
            },
            FunctionExpr::Mono { k } => FractalScalar::from_base(upow(u, k.eval(ctx.s))?),
            FunctionExpr::Sum { lhs, rhs } => {
                lhs.eval_unchecked(u, ctx)? + rhs.eval_unchecked(u, ctx)?
            }
            FunctionExpr::Difference { lhs, rhs } => {
                lhs.eval_unchecked(u, ctx)? - rhs.eval_unchecked(u, ctx)?
            }
            FunctionExpr::Product { lhs, rhs } => {
                lhs.eval_unchecked(u, ctx)? * rhs.eval_unchecked(u, ctx)?
            }
            FunctionExpr::Max { lhs, rhs } => lhs
                .eval_unchecked(u, ctx)?
                .max(rhs.eval_unchecked(u, ctx)?),
            FunctionExpr::Piecewise { branches } => select(branches, u)?.eval_unchecked(u, ctx)?,
            FunctionExpr::Subst { outer, inner } => {
                let g = inner.eval(u)?;
                if g < 0.0 {
                    return Err(EvalError::CompositionRange { u, inner: g });
                }
                outer.eval_unchecked(g, ctx)?
            }
        })
    }
}

/// The exact base map `u ↦ base(f(u))`.
pub fn base_view<'a>(
    f: &'a FunctionExpr,
    ctx: &'a AlphaContext,
) -> impl Fn(f64) -> Result<f64, EvalError> + Sync + 'a {
    move |u| f.base_at(u, ctx)
}

/// Region of ℝ₊ not matched by any guard.
#[derive(Debug, Clone, PartialEq)]
pub enum Uncovered {
    Point(f64),
    Interval(f64, f64),
}

impl std::fmt::Display for Uncovered {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Uncovered::Point(c) => write!(f, "u = {c}"),
            Uncovered::Interval(a, b) => write!(f, "u in ({a}, {b})"),
        }
    }
}

/// Checks that the guards cover all of `[0, ∞)`.
///
/// Guards are threshold tests against constants, so their truth is constant
/// on every breakpoint and on every open interval between consecutive
/// breakpoints; one representative per region decides coverage exactly.
pub fn check_coverage(guards: &[Guard]) -> Result<(), Uncovered> {
    let mut cuts: Vec<f64> = guards
        .iter()
        .filter_map(Guard::constant)
        .filter(|c| *c > 0.0 && c.is_finite())
        .collect();
    cuts.push(0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let covered = |u: f64| guards.iter().any(|g| g.matches(u));
    for (i, &c) in cuts.iter().enumerate() {
        if !covered(c) {
            return Err(Uncovered::Point(c));
        }
        let next = cuts.get(i + 1).copied();
        let probe = match next {
            Some(n) => 0.5 * (c + n),
            None => c + 1.0,
        };
        if !covered(probe) {
            return Err(Uncovered::Interval(c, next.unwrap_or(f64::INFINITY)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> AlphaContext {
        AlphaContext::new(0.5, 0.5).unwrap()
    }

    #[test]
    fn mono_base_is_power() {
        let f = FunctionExpr::mono_s();
        let x = f.evaluate(4.0, &ctx()).unwrap();
        assert!((x.base - 2.0).abs() < 1e-15);
        assert!((x.value(0.5) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.base_at(0.0, &ctx()).unwrap(), 0.0);
        assert_eq!(FunctionExpr::mono(0.0).base_at(0.0, &ctx()).unwrap(), 1.0);
        assert_eq!(
            FunctionExpr::mono(-1.0).base_at(0.0, &ctx()),
            Err(EvalError::Pole { k: -1.0 })
        );
    }

    #[test]
    fn negative_argument_rejected() {
        assert!(matches!(
            FunctionExpr::fb(1.0).evaluate(-1.0, &ctx()),
            Err(EvalError::NegativeArgument(_))
        ));
    }

    #[test]
    fn coverage_regions() {
        use Guard::*;
        assert!(check_coverage(&[Eq { c: 0.0 }, Gt { c: 0.0 }]).is_ok());
        assert!(check_coverage(&[Le { c: 1.0 }, Gt { c: 1.0 }]).is_ok());
        assert!(check_coverage(&[Else]).is_ok());
        assert_eq!(
            check_coverage(&[Lt { c: 1.0 }, Gt { c: 1.0 }]),
            Err(Uncovered::Point(1.0))
        );
        assert_eq!(
            check_coverage(&[Le { c: 1.0 }, Gt { c: 2.0 }]),
            Err(Uncovered::Interval(1.0, 2.0))
        );
        assert_eq!(
            check_coverage(&[Gt { c: 0.0 }]),
            Err(Uncovered::Point(0.0))
        );
    }

    #[test]
    fn scalar_pow_domain() {
        let g = ScalarExpr::Pow {
            arg: Box::new(ScalarExpr::Sub {
                lhs: Box::new(ScalarExpr::U),
                rhs: Box::new(ScalarExpr::num(2.0)),
            }),
            exponent: 0.5,
        };
        assert!(matches!(g.eval(1.0), Err(EvalError::InvalidPower { .. })));
        assert_eq!(g.eval(6.0).unwrap(), 2.0);
        let sq = ScalarExpr::Pow {
            arg: Box::new(ScalarExpr::Neg {
                arg: Box::new(ScalarExpr::U),
            }),
            exponent: 2.0,
        };
        assert_eq!(sq.eval(3.0).unwrap(), 9.0);
    }
}
