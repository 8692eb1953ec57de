//! Constructions that build new functions from old ones: sums, products,
//! maxima, compositions and the `u^{(s/(1-s))α} p(u)` family.

use thiserror::Error;

use super::ast::{FunctionExpr, KExpr, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CombineError {
    #[error("the u^(s/(1-s)) construction needs 0 < s < 1, got s = {0}")]
    OrderOutOfRange(f64),
}

pub fn sum(f: FunctionExpr, g: FunctionExpr) -> FunctionExpr {
    FunctionExpr::sum(f, g)
}

pub fn max(f: FunctionExpr, g: FunctionExpr) -> FunctionExpr {
    FunctionExpr::max(f, g)
}

fn is_unit(e: &FunctionExpr) -> bool {
    // Both fb(1) and fv(1) denote 1^α.
    matches!(e, FunctionExpr::Const { x, .. } if *x == 1.0)
}

/// Product in ℝ^α. Monomials merge (`u^{aα} u^{bα} = u^{(a+b)α}`) and unit
/// factors drop out.
pub fn product(f: FunctionExpr, g: FunctionExpr) -> FunctionExpr {
    match (f, g) {
        (FunctionExpr::Mono { k: a }, FunctionExpr::Mono { k: b }) => {
            let k = match (&a, &b) {
                (KExpr::Num { value: x }, KExpr::Num { value: y }) => KExpr::num(x + y),
                _ if a == b => KExpr::Mul {
                    lhs: Box::new(KExpr::num(2.0)),
                    rhs: Box::new(a.clone()),
                },
                _ => KExpr::Add {
                    lhs: Box::new(a),
                    rhs: Box::new(b),
                },
            };
            FunctionExpr::Mono { k }
        }
        (f, g) if is_unit(&f) => g,
        (f, g) if is_unit(&g) => f,
        (f, g) => FunctionExpr::Product {
            lhs: Box::new(f),
            rhs: Box::new(g),
        },
    }
}

/// `u ↦ f(g(u))` for a real inner function `g` with range in ℝ₊.
pub fn compose(outer: FunctionExpr, inner: ScalarExpr) -> FunctionExpr {
    FunctionExpr::Subst {
        outer: Box::new(outer),
        inner,
    }
}

/// The exponent `s/(1-s)`.
pub fn thm35_exponent(s: f64) -> Result<f64, CombineError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(CombineError::OrderOutOfRange(s));
    }
    Ok(s / (1.0 - s))
}

/// `u^{(s/(1-s))α} · p(u)`.
pub fn thm35_pattern(p: FunctionExpr, s: f64) -> Result<FunctionExpr, CombineError> {
    let k = thm35_exponent(s)?;
    Ok(product(FunctionExpr::mono(k), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlphaContext;

    #[test]
    fn thm35_with_unit_p_is_monomial() {
        let f = thm35_pattern(FunctionExpr::fv(1.0), 0.5).unwrap();
        assert_eq!(f, FunctionExpr::mono(1.0));
        assert!(thm35_pattern(FunctionExpr::fv(1.0), 1.0).is_err());
    }

    #[test]
    fn monomials_merge() {
        let ctx = AlphaContext::new(0.5, 0.5).unwrap();
        let f = product(FunctionExpr::mono_s(), FunctionExpr::mono_s());
        let FunctionExpr::Mono { k } = &f else { panic!() };
        assert_eq!(k.eval(0.3), 0.6);
        assert!((f.base_at(2.0, &ctx).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn composition_substitutes() {
        let ctx = AlphaContext::new(0.5, 0.5).unwrap();
        let f = compose(FunctionExpr::mono_s(), ScalarExpr::power_of_u(2.0));
        // (u^2)^{s}: base at u = 3 is 3
        assert!((f.base_at(3.0, &ctx).unwrap() - 3.0).abs() < 1e-14);
    }
}
