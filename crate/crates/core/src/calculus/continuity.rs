use serde::{Deserialize, Serialize};

use super::{CalcError, FractalFunction};
use crate::algebra::AlphaContext;

pub const DEFAULT_EPS_GRID: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Relative positions sampled inside each `δ`-neighbourhood.
const OFFSETS: [f64; 4] = [0.99, 0.5, 0.1, 0.01];
const SMALLEST_DELTA: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsCheck {
    pub eps: f64,
    /// Largest `δ = 2^{-j}` whose samples all stayed within `ε`.
    pub delta_found: Option<f64>,
    /// Largest `|base(f(x) - f(x0))|` seen at the last `δ` tried.
    pub max_dev_base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub x0: f64,
    pub continuous: bool,
    pub obstructing_eps: Option<f64>,
    /// Largest deviation at the smallest `δ` probed (0 when continuous).
    pub jump_base: f64,
    pub jump_value: f64,
    pub per_eps: Vec<EpsCheck>,
}

/// Numerical probe of `|f(x) - f(x0)| < ε^α` for `|x - x0| < δ`.
///
/// `|f(x) - f(x0)| < ε^α` is equivalent to `|Δbase| < ε`, so deviations
/// are measured in base space. For each `ε` the radius `δ` is halved until
/// the sampled deviation drops below `ε` or the neighbourhood becomes
/// unrepresentable around `x0`.
pub fn continuity_probe(
    f: &impl FractalFunction,
    x0: f64,
    ctx: &AlphaContext,
    eps_grid: &[f64],
) -> Result<ContinuityReport, CalcError> {
    if !(x0 >= 0.0 && x0.is_finite()) {
        return Err(CalcError::Domain(format!("x0 = {x0} is outside [0, ∞)")));
    }
    let f0 = f.eval(x0)?;

    let deviation = |delta: f64| -> Result<Option<f64>, CalcError> {
        let mut worst: Option<f64> = None;
        for q in OFFSETS {
            for x in [x0 + delta * q, x0 - delta * q] {
                if x < 0.0 || x == x0 {
                    continue;
                }
                let d = (f.eval(x)? - f0).base.abs();
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
        }
        Ok(worst)
    };

    let mut per_eps = Vec::with_capacity(eps_grid.len());
    let mut obstructing = None;
    let mut jump_base: f64 = 0.0;
    for &eps in eps_grid {
        let mut delta = 1.0_f64;
        let mut found = None;
        let mut last_dev = 0.0;
        while delta >= SMALLEST_DELTA && x0 + delta * OFFSETS[3] != x0 {
            let Some(dev) = deviation(delta)? else { break };
            last_dev = dev;
            if dev < eps {
                found = Some(delta);
                break;
            }
            delta *= 0.5;
        }
        if found.is_none() {
            obstructing.get_or_insert(eps);
            jump_base = jump_base.max(last_dev);
        }
        per_eps.push(EpsCheck {
            eps,
            delta_found: found,
            max_dev_base: last_dev,
        });
    }
    Ok(ContinuityReport {
        x0,
        continuous: obstructing.is_none(),
        obstructing_eps: obstructing,
        jump_base,
        jump_value: jump_base.powf(ctx.alpha),
        per_eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Bound;
    use crate::model::{parse, FunctionExpr};

    fn probe(src: &str, x0: f64) -> ContinuityReport {
        let c = AlphaContext::new(0.5, 0.5).unwrap();
        let f = parse(src).unwrap();
        continuity_probe(&Bound::new(&f, &c), x0, &c, &DEFAULT_EPS_GRID).unwrap()
    }

    #[test]
    fn identity_is_continuous() {
        let r = probe("mono(1)", 1.0);
        assert!(r.continuous);
        assert!(r.per_eps.iter().all(|e| e.delta_found.is_some()));
    }

    #[test]
    fn constants_are_continuous() {
        for x0 in [0.0, 1.0, 3.5] {
            assert!(probe("fv(2)", x0).continuous);
        }
    }

    #[test]
    fn steep_root_at_zero_is_continuous() {
        assert!(probe("mono(0.05)", 0.0).continuous);
    }

    #[test]
    fn jump_at_one() {
        let r = probe("pw(u <= 1 -> mono(s/(1-s)); else -> fb(2) * mono(s/(1-s)))", 1.0);
        assert!(!r.continuous);
        assert_eq!(r.obstructing_eps, Some(1e-1));
        assert!((r.jump_base - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn jump_at_zero_from_the_right() {
        let f = FunctionExpr::piecewise(vec![
            (crate::model::Guard::Eq { c: 0.0 }, FunctionExpr::fb(1.0)),
            (crate::model::Guard::Else, FunctionExpr::mono(1.0)),
        ]);
        let c = AlphaContext::new(0.5, 0.5).unwrap();
        let r = continuity_probe(&Bound::new(&f, &c), 0.0, &c, &[0.5]).unwrap();
        assert!(!r.continuous);
    }
}
