//! Worked example families with their known classifications, used as
//! end-to-end regression fixtures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlphaContext};
use crate::certifier::{certify, CertifyError, SearchBudget, Sense, VerdictStatus, Witness};
use crate::model::{FunctionExpr, Guard, KExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalleryError {
    #[error("parameter error: {0}")]
    Params(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// Expected membership in one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Member,
    NonMember,
    Unknown,
}

impl Expectation {
    /// Whether an observed verdict is consistent; `None` when nothing is
    /// expected.
    pub fn matches(self, status: &VerdictStatus) -> Option<bool> {
        match self {
            Expectation::Member => Some(!status.is_violation()),
            Expectation::NonMember => Some(status.is_violation()),
            Expectation::Unknown => None,
        }
    }
}

/// `f(0) = a^α`, `f(u) = b^α u^{sα} + c^α` for `u > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example41Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected41 {
    pub first: Expectation,
    pub second: Expectation,
    /// Non-decreasing on `(0, ∞)` but not on `[0, ∞)`.
    pub drop_at_zero: bool,
    /// Which of the cases (i)–(iv) apply.
    pub cases: Vec<String>,
}

pub fn example41_expected(p: &Example41Params) -> Expected41 {
    let mut cases = Vec::new();
    let i = p.b >= 0.0 && p.c <= p.a;
    let ii = p.b >= 0.0 && p.c < p.a;
    let iii = p.b >= 0.0 && 0.0 <= p.c && p.c <= p.a;
    let iv = p.b > 0.0 && p.c < 0.0;
    for (hit, name) in [(i, "i"), (ii, "ii"), (iii, "iii"), (iv, "iv")] {
        if hit {
            cases.push(name.to_string());
        }
    }
    Expected41 {
        first: if i { Expectation::Member } else { Expectation::Unknown },
        second: if iii {
            Expectation::Member
        } else if iv {
            Expectation::NonMember
        } else {
            Expectation::Unknown
        },
        drop_at_zero: ii,
        cases,
    }
}

/// `pw(u == 0 -> fb(a); else -> fb(b) * mono(s) + fb(c))`; evaluate with a
/// context whose `s` equals `p.s`.
pub fn make_example41(p: &Example41Params) -> (FunctionExpr, Expected41) {
    let body = FunctionExpr::sum(
        FunctionExpr::Product {
            lhs: Box::new(FunctionExpr::fb(p.b)),
            rhs: Box::new(FunctionExpr::mono_s()),
        },
        FunctionExpr::fb(p.c),
    );
    let f = FunctionExpr::piecewise(vec![
        (Guard::Eq { c: 0.0 }, FunctionExpr::fb(p.a)),
        (Guard::Else, body),
    ]);
    (f, example41_expected(p))
}

/// `u^{(s/(1-s))α}` on `[0, 1]`, `k^α u^{(s/(1-s))α}` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example42Params {
    pub k: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected42 {
    pub first: Expectation,
    pub second: Expectation,
    pub continuous_at_one: bool,
}

fn thm35_k() -> KExpr {
    KExpr::Div {
        lhs: Box::new(KExpr::S),
        rhs: Box::new(KExpr::Sub {
            lhs: Box::new(KExpr::num(1.0)),
            rhs: Box::new(KExpr::S),
        }),
    }
}

pub fn make_example42(p: &Example42Params) -> Result<(FunctionExpr, Expected42), GalleryError> {
    if !(p.k > 1.0) {
        return Err(GalleryError::Params(format!("k must exceed 1, got {}", p.k)));
    }
    if !(p.s > 0.0 && p.s < 1.0) {
        return Err(GalleryError::Params(format!("s must lie in (0, 1), got {}", p.s)));
    }
    let mono = FunctionExpr::Mono { k: thm35_k() };
    let f = FunctionExpr::piecewise(vec![
        (Guard::Le { c: 1.0 }, mono.clone()),
        (
            Guard::Else,
            FunctionExpr::Product {
                lhs: Box::new(FunctionExpr::fb(p.k)),
                rhs: Box::new(mono),
            },
        ),
    ]);
    Ok((
        f,
        Expected42 {
            first: Expectation::Member,
            second: Expectation::NonMember,
            continuous_at_one: false,
        },
    ))
}

/// A point `(a, λ1)` where
/// `k a^K <= λ1^s + k (1-λ1)^s ((a-λ1)/(1-λ1))^K` fails, `K = s/(1-s)`,
/// all in base space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ineq35Witness {
    pub a: f64,
    pub lambda1: f64,
    pub margin: f64,
}

impl Ineq35Witness {
    /// The second-sense tuple `u = 1`, `v = (a-λ1)/(1-λ1)`, `λ2 = 1-λ1`.
    pub fn to_witness(&self) -> Witness {
        Witness {
            u: 1.0,
            v: (self.a - self.lambda1) / (1.0 - self.lambda1),
            lambda1: self.lambda1,
            lambda2: 1.0 - self.lambda1,
            margin: self.margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ineq35Search {
    pub witness: Option<Ineq35Witness>,
    pub evaluations: u64,
    pub max_margin_seen: f64,
}

pub fn ineq35_margin(p: &Example42Params, a: f64, lambda1: f64) -> f64 {
    let big_k = p.s / (1.0 - p.s);
    let lhs = p.k * a.powf(big_k);
    let rhs = lambda1.powf(p.s)
        + p.k * (1.0 - lambda1).powf(p.s) * ((a - lambda1) / (1.0 - lambda1)).powf(big_k);
    lhs - rhs
}

/// Grid over `a ∈ (1, u_max]` (log-spaced in `a - 1`) and `λ1 ∈ (0, 1)`,
/// followed by coordinate refinement of the largest margin.
pub fn find_ineq35_witness(
    p: &Example42Params,
    ctx: &AlphaContext,
    budget: &SearchBudget,
) -> Result<Ineq35Search, GalleryError> {
    make_example42(p)?;
    budget.validate()?;
    let a_span = budget.u_max - 1.0;
    if !(a_span > 0.0) {
        return Err(GalleryError::Params(format!(
            "u_max must exceed 1, got {}",
            budget.u_max
        )));
    }
    let n_a = budget.grid_n;
    let n_l = budget.t_n;
    let (lo, hi) = ((1e-6_f64).ln(), a_span.ln());
    let a_at = |i: usize| 1.0 + (lo + (hi - lo) * i as f64 / (n_a - 1) as f64).exp();
    let l_at = |j: usize| (j as f64 + 0.5) / n_l as f64;

    let mut best = (f64::NEG_INFINITY, 1.0, 0.0);
    for i in 0..n_a {
        for j in 0..n_l {
            let (a, l) = (a_at(i), l_at(j));
            let m = ineq35_margin(p, a, l);
            if m > best.0 {
                best = (m, a, l);
            }
        }
    }
    let mut evals = (n_a * n_l) as u64;
    let (mut step_a, mut step_l) = (0.25 * (best.1 - 1.0), 0.5 / n_l as f64);
    for _ in 0..budget.refine_steps {
        let mut improved = false;
        for (da, dl) in [(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0)] {
            let a = (best.1 + da * step_a).clamp(1.0 + 1e-12, budget.u_max);
            let l = (best.2 + dl * step_l).clamp(0.0, 1.0 - 1e-9);
            let m = ineq35_margin(p, a, l);
            evals += 1;
            if m > best.0 {
                best = (m, a, l);
                improved = true;
            }
        }
        if !improved {
            step_a *= 0.5;
            step_l *= 0.5;
        }
    }
    let witness = (best.0 > ctx.tol_violation).then_some(Ineq35Witness {
        a: best.1,
        lambda1: best.2,
        margin: best.0,
    });
    Ok(Ineq35Search {
        witness,
        evaluations: evals,
        max_margin_seen: best.0,
    })
}

/// One certifier run in the regression matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRow {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub s: f64,
    pub alpha: f64,
    pub sense: Sense,
    pub expected: Expectation,
    /// `violation` or `no_violation`.
    pub observed: String,
    pub rule_id: Option<String>,
    /// Witness margin, or the largest margin seen.
    pub margin: f64,
    pub agrees: Option<bool>,
    /// Replayed witness margin minus reported margin.
    pub replay_error: Option<f64>,
}

/// Bases `{0, 1, 2}^3`.
pub fn default_example41_grid() -> Vec<(f64, f64, f64)> {
    let vals = [0.0, 1.0, 2.0];
    let mut out = Vec::with_capacity(27);
    for a in vals {
        for b in vals {
            for c in vals {
                out.push((a, b, c));
            }
        }
    }
    out
}

/// One signed parameter set per case (i)–(iv).
pub const CANONICAL_EXAMPLE41: [(f64, f64, f64); 4] =
    [(-1.0, 1.0, -2.0), (1.0, 1.0, 0.0), (2.0, 1.0, 1.0), (0.0, 1.0, -1.0)];

pub fn run_example41_matrix(
    params: &[(f64, f64, f64)],
    ss: &[f64],
    alphas: &[f64],
    budget: &SearchBudget,
) -> Result<Vec<RegressionRow>, GalleryError> {
    let mut jobs = Vec::new();
    for &(a, b, c) in params {
        for &s in ss {
            for &alpha in alphas {
                for sense in [Sense::First, Sense::Second] {
                    jobs.push((Example41Params { a, b, c, s }, alpha, sense));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(p, alpha, sense)| -> Result<RegressionRow, GalleryError> {
            let ctx = AlphaContext::new(alpha, p.s)?;
            let (f, expected) = make_example41(&p);
            let exp = match sense {
                Sense::First => expected.first,
                Sense::Second => expected.second,
            };
            let v = certify(&f, sense, &ctx, budget)?;
            let (margin, replay_error) = match v.witness() {
                Some(w) => {
                    let r = w.replay(&f, &ctx).map_err(CertifyError::from)?;
                    (w.margin, Some(r - w.margin))
                }
                None => (v.budget_stats.max_margin_seen, None),
            };
            let rule_id = match &v.status {
                VerdictStatus::ProvenMember { rule_id, .. } => Some(rule_id.clone()),
                _ => None,
            };
            Ok(RegressionRow {
                a: p.a,
                b: p.b,
                c: p.c,
                s: p.s,
                alpha,
                sense,
                expected: exp,
                observed: v.status.class().to_string(),
                rule_id,
                margin,
                agrees: exp.matches(&v.status),
                replay_error,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::inequality_margin;
    use crate::model::parse;

    #[test]
    fn example41_matches_dsl() {
        let ctx = AlphaContext::new(0.5, 0.5).unwrap();
        let (f, e) = make_example41(&Example41Params { a: 0.0, b: 1.0, c: -1.0, s: 0.5 });
        let g = parse("pw(u==0 -> fb(0); else -> fb(1)*mono(s) + fb(-1))").unwrap();
        for u in [0.0, 0.3, 1.0, 4.0] {
            assert_eq!(f.base_at(u, &ctx).unwrap(), g.base_at(u, &ctx).unwrap());
        }
        assert_eq!(e.first, Expectation::Member);
        assert_eq!(e.second, Expectation::NonMember);
        assert_eq!(e.cases, vec!["i", "ii", "iv"]);
    }

    #[test]
    fn expectations_per_case() {
        let e = example41_expected(&Example41Params { a: 0.0, b: 1.0, c: 0.0, s: 0.5 });
        assert_eq!((e.first, e.second, e.drop_at_zero), (Expectation::Member, Expectation::Member, false));
        let e = example41_expected(&Example41Params { a: 1.0, b: 1.0, c: 0.0, s: 0.5 });
        assert!(e.drop_at_zero);
        let e = example41_expected(&Example41Params { a: 0.0, b: 1.0, c: 1.0, s: 0.5 });
        assert_eq!((e.first, e.second), (Expectation::Unknown, Expectation::Unknown));
    }

    #[test]
    fn example42_rejects_small_k() {
        assert!(make_example42(&Example42Params { k: 1.0, s: 0.5 }).is_err());
        assert!(make_example42(&Example42Params { k: 2.0, s: 1.0 }).is_err());
    }

    #[test]
    fn example42_shape() {
        let ctx = AlphaContext::new(0.5, 0.5).unwrap();
        let (f, _) = make_example42(&Example42Params { k: 2.0, s: 0.5 }).unwrap();
        assert_eq!(f.base_at(1.0, &ctx).unwrap(), 1.0);
        assert!((f.base_at(1.0 + 1e-12, &ctx).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(f.base_at(3.0, &ctx).unwrap(), 6.0);
    }

    #[test]
    fn ineq35_boundary_identity() {
        let p = Example42Params { k: 2.0, s: 0.5 };
        for a in [1.5, 2.0, 7.0] {
            assert_eq!(ineq35_margin(&p, a, 0.0), 0.0);
        }
    }

    #[test]
    fn ineq35_witness_maps_to_second_sense_violation() {
        let ctx = AlphaContext::new(0.5, 0.5).unwrap();
        let p = Example42Params { k: 2.0, s: 0.5 };
        let r = find_ineq35_witness(&p, &ctx, &SearchBudget::default()).unwrap();
        let w = r.witness.expect("witness");
        assert!(w.a > 1.0);
        let (f, _) = make_example42(&p).unwrap();
        let d = w.to_witness();
        let m = inequality_margin(&f, d.u, d.v, d.lambda1, d.lambda2, &ctx).unwrap();
        assert!((m - w.margin).abs() < 1e-9 * w.margin.max(1.0), "{m} vs {}", w.margin);
    }
}
