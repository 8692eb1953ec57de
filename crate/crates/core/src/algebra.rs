//! Arithmetic on the fractal real line ℝ^α.
//!
//! An element `a^α` is stored through its base `a`. Addition and
//! multiplication act on bases (`a^α + b^α = (a+b)^α`, `a^α b^α = (ab)^α`),
//! which makes the commutative, associative, distributive and identity laws
//! hold exactly up to floating-point rounding. The "value" of an element is
//! the signed power `sign(a)|a|^α`. Elements are ordered by base.
//!
//! Bare real scalars (for instance `Γ(1+α)`) act on values through
//! [`AlphaContext::scale`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute floor under the relative base tolerance.
pub const ABS_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("division by the zero element 0^α")]
    DivisionByZero,
    #[error("invalid context: {0}")]
    InvalidContext(String),
}

/// Fractal dimension α, convexity order s and comparison tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaContext {
    pub alpha: f64,
    pub s: f64,
    pub tol_base: f64,
    pub tol_violation: f64,
}

impl AlphaContext {
    pub const DEFAULT_TOL_BASE: f64 = 1e-12;
    pub const DEFAULT_TOL_VIOLATION: f64 = 1e-9;

    pub fn new(alpha: f64, s: f64) -> Result<Self, AlgebraError> {
        Self::with_tolerances(
            alpha,
            s,
            Self::DEFAULT_TOL_BASE,
            Self::DEFAULT_TOL_VIOLATION,
        )
    }

    pub fn with_tolerances(
        alpha: f64,
        s: f64,
        tol_base: f64,
        tol_violation: f64,
    ) -> Result<Self, AlgebraError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(AlgebraError::InvalidContext(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(AlgebraError::InvalidContext(format!(
                "s must lie in (0, 1], got {s}"
            )));
        }
        if !(tol_base > 0.0 && tol_violation > tol_base) {
            return Err(AlgebraError::InvalidContext(format!(
                "need tol_violation > tol_base > 0, got {tol_violation} and {tol_base}"
            )));
        }
        Ok(Self {
            alpha,
            s,
            tol_base,
            tol_violation,
        })
    }

    /// Same context with a different convexity order.
    pub fn with_s(&self, s: f64) -> Result<Self, AlgebraError> {
        Self::with_tolerances(self.alpha, s, self.tol_base, self.tol_violation)
    }

    pub fn make_scalar(&self, mode: ScalarMode, x: f64) -> FractalScalar {
        match mode {
            ScalarMode::Base => FractalScalar::from_base(x),
            ScalarMode::Value => FractalScalar::from_value(x, self.alpha),
        }
    }

    pub fn value(&self, x: FractalScalar) -> f64 {
        x.value(self.alpha)
    }

    /// Multiplies the value of `x` by the real `c`.
    pub fn scale(&self, c: f64, x: FractalScalar) -> FractalScalar {
        FractalScalar::from_value(c * x.value(self.alpha), self.alpha)
    }

    pub fn compare(&self, lhs: FractalScalar, rhs: FractalScalar) -> Ordering {
        lhs.compare(rhs, self.tol_base)
    }

    pub fn approx_eq(&self, lhs: FractalScalar, rhs: FractalScalar) -> bool {
        self.compare(lhs, rhs) == Ordering::Equal
    }

    pub fn field_op(
        &self,
        op: FieldOp,
        lhs: FractalScalar,
        rhs: FractalScalar,
    ) -> Result<FractalScalar, AlgebraError> {
        match op {
            FieldOp::Add => Ok(lhs + rhs),
            FieldOp::Sub => Ok(lhs - rhs),
            FieldOp::Mul => Ok(lhs * rhs),
            FieldOp::Div => lhs.checked_div(rhs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    Base,
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// `sign(x)·|x|^p`.
#[inline]
pub fn signed_pow(x: f64, p: f64) -> f64 {
    if x >= 0.0 {
        x.powf(p)
    } else {
        -(-x).powf(p)
    }
}

/// An element `a^α` of ℝ^α, held by its base `a`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FractalScalar {
    pub base: f64,
}

impl FractalScalar {
    pub const ZERO: FractalScalar = FractalScalar { base: 0.0 };
    pub const ONE: FractalScalar = FractalScalar { base: 1.0 };

    #[inline]
    pub const fn from_base(base: f64) -> Self {
        Self { base }
    }

    /// The element whose value is `v`, i.e. base `sign(v)|v|^{1/α}`.
    #[inline]
    pub fn from_value(v: f64, alpha: f64) -> Self {
        Self {
            base: signed_pow(v, 1.0 / alpha),
        }
    }

    #[inline]
    pub fn value(self, alpha: f64) -> f64 {
        signed_pow(self.base, alpha)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, AlgebraError> {
        if rhs.base.abs() <= ABS_FLOOR {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self {
            base: self.base / rhs.base,
        })
    }

    /// Base order with a relative equality band of width `tol`.
    pub fn compare(self, rhs: Self, tol: f64) -> Ordering {
        let (a, b) = (self.base, rhs.base);
        let band = (tol * a.abs().max(b.abs())).max(ABS_FLOOR);
        if (a - b).abs() <= band {
            Ordering::Equal
        } else if a < b {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn max(self, rhs: Self) -> Self {
        if rhs.base > self.base {
            rhs
        } else {
            self
        }
    }
}

impl Add for FractalScalar {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::from_base(self.base + rhs.base)
    }
}

impl Sub for FractalScalar {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::from_base(self.base - rhs.base)
    }
}

impl Mul for FractalScalar {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::from_base(self.base * rhs.base)
    }
}

impl Neg for FractalScalar {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::from_base(-self.base)
    }
}

impl fmt::Display for FractalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^α", self.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;

    fn ctx(alpha: f64) -> AlphaContext {
        AlphaContext::new(alpha, 0.5).unwrap()
    }

    #[test]
    fn make_scalar_modes() {
        let c = ctx(0.5);
        let x = c.make_scalar(ScalarMode::Base, 2.0);
        assert_eq!(x.base, 2.0);
        assert!((c.value(x) - 2f64.sqrt()).abs() < 1e-15);

        let y = c.make_scalar(ScalarMode::Value, 4.0);
        assert!((y.base - 16.0).abs() < 1e-12);
        assert!((c.value(y) - 4.0).abs() < 1e-12);

        let z = c.make_scalar(ScalarMode::Base, 0.0);
        assert_eq!(z, FractalScalar::ZERO);
        assert_eq!(c.value(z), 0.0);
    }

    #[test]
    fn field_ops_on_bases() {
        let c = ctx(0.7);
        let (a, b) = (FractalScalar::from_base(2.0), FractalScalar::from_base(3.0));
        assert_eq!(c.field_op(FieldOp::Add, a, b).unwrap().base, 5.0);
        assert_eq!(c.field_op(FieldOp::Sub, a, b).unwrap().base, -1.0);
        assert_eq!(c.field_op(FieldOp::Mul, a, b).unwrap().base, 6.0);
        assert!((c.field_op(FieldOp::Div, a, b).unwrap().base - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(
            c.field_op(FieldOp::Div, a, FractalScalar::ZERO),
            Err(AlgebraError::DivisionByZero)
        );
    }

    #[test]
    fn scale_acts_on_values() {
        let c = ctx(0.5);
        let one = FractalScalar::from_value(1.0, 0.5);
        assert_eq!(c.scale(1.0, one), one);
        let g = gamma(1.5).unwrap();
        assert!((c.value(c.scale(g, one)) - 0.886_226_925_452_758).abs() < 1e-12);
        for alpha in [0.2, 0.5, 1.0] {
            let c = ctx(alpha);
            let three = FractalScalar::from_value(3.0, alpha);
            assert!((c.value(c.scale(2.0, three)) - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn compare_examples() {
        let c = ctx(0.5);
        let b = FractalScalar::from_base;
        assert_eq!(c.compare(b(1.0), b(2.0)), Ordering::Less);
        assert_eq!(c.compare(b(-1.0), FractalScalar::ZERO), Ordering::Less);
        assert_eq!(c.compare(b(5.0), b(5.0 * (1.0 + 1e-14))), Ordering::Equal);
        assert_eq!(c.compare(b(5.0), b(5.0 * (1.0 + 1e-10))), Ordering::Less);
    }

    #[test]
    fn context_validation() {
        assert!(AlphaContext::new(0.0, 0.5).is_err());
        assert!(AlphaContext::new(1.2, 0.5).is_err());
        assert!(AlphaContext::new(0.5, 0.0).is_err());
        assert!(AlphaContext::new(1.0, 1.0).is_ok());
        assert!(AlphaContext::with_tolerances(0.5, 0.5, 1e-9, 1e-12).is_err());
    }

    #[test]
    fn negative_values_are_signed_powers() {
        let x = FractalScalar::from_base(-8.0);
        assert!((x.value(1.0 / 3.0) + 2.0).abs() < 1e-12);
        let back = FractalScalar::from_value(-2.0, 1.0 / 3.0);
        assert!((back.base + 8.0).abs() < 1e-12);
    }
}
