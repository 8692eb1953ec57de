//! Numerical limits: Richardson tableau over a geometric step sequence and
//! Aitken's Δ² for one-sided limits of power-law sequences.

/// Extrapolated limit of a sequence sampled at geometric steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub estimate: f64,
    /// Tableau-based error estimate; `f64::INFINITY` with a single term.
    pub error: f64,
    pub terms_used: usize,
}

const SAFE: f64 = 2.0;

/// Ridders-style Richardson extrapolation.
///
/// `sample(i)` is the quantity at step `h0 * ratio^i`; its error expands in
/// powers `h^p, h^{2p}, ...` with `p = power_step`. Sampling stops early once
/// the tableau diagonal stops improving.
pub fn richardson<E>(
    terms: usize,
    ratio: f64,
    power_step: u32,
    mut sample: impl FnMut(usize) -> Result<f64, E>,
) -> Result<Extrapolated, E> {
    assert!(terms >= 1 && ratio > 0.0 && ratio < 1.0);
    let base = (1.0 / ratio).powi(power_step as i32);
    let mut prev: Vec<f64> = vec![sample(0)?];
    let mut best = Extrapolated {
        estimate: prev[0],
        error: f64::INFINITY,
        terms_used: 1,
    };
    for i in 1..terms {
        let mut row = Vec::with_capacity(i + 1);
        row.push(sample(i)?);
        let mut fac = base;
        for j in 1..=i {
            let v = (row[j - 1] * fac - prev[j - 1]) / (fac - 1.0);
            fac *= base;
            let err = (v - row[j - 1]).abs().max((v - prev[j - 1]).abs());
            if err <= best.error {
                best.estimate = v;
                best.error = err;
            }
            row.push(v);
        }
        best.terms_used = i + 1;
        if (row[i] - prev[i - 1]).abs() >= SAFE * best.error {
            break;
        }
        prev = row;
    }
    Ok(best)
}

/// Aitken Δ² limit of three samples taken at geometrically shrinking steps.
/// Exact for sequences `L + C q^n`, which is what `L + C h^p` becomes on a
/// geometric grid.
pub fn aitken(f1: f64, f2: f64, f3: f64) -> f64 {
    let denom = f1 - 2.0 * f2 + f3;
    if denom.abs() <= 1e-300 || !denom.is_finite() {
        return f3;
    }
    let l = f3 - (f3 - f2) * (f3 - f2) / (f3 - 2.0 * f2 + f1);
    if l.is_finite() {
        l
    } else {
        f3
    }
}
