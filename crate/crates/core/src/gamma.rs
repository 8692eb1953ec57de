//! Real Gamma function on the positive axis.
//!
//! Arguments below [`SHIFT`] are pushed up with the recurrence
//! `Γ(t) = Γ(t + n) / (t (t+1) ... (t+n-1))` and then evaluated with the
//! Stirling series for `ln Γ`, truncated after the `B_14` term. At `z >= 20`
//! the first omitted term is below `1e-20`, so the result is limited by
//! floating-point rounding (a few ulps times `|ln Γ|`).

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GammaError {
    #[error("gamma is only defined here for t > 0 (got {0})")]
    Domain(f64),
}

const SHIFT: f64 = 20.0;

/// Stirling coefficients `B_{2k} / (2k (2k - 1))` for k = 1..=7.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
];

fn ln_gamma_large(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // Horner in 1/z^2.
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    series *= inv;
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

/// Γ(t) for `t > 0`. Overflows to `+inf` past t ≈ 171.6.
pub fn gamma(t: f64) -> Result<f64, GammaError> {
    if !(t > 0.0) || !t.is_finite() {
        if t == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        return Err(GammaError::Domain(t));
    }
    if t.fract() == 0.0 && t <= 30.0 {
        // exact factorials
        return Ok((2..t as u32).fold(1.0, |acc, n| acc * n as f64));
    }
    if t < SHIFT {
        let mut z = t;
        let mut prod = 1.0;
        while z < SHIFT {
            prod *= z;
            z += 1.0;
        }
        Ok(ln_gamma_large(z).exp() / prod)
    } else {
        Ok(ln_gamma_large(t).exp())
    }
}
