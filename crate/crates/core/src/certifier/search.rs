//! Grid, random and coordinate-refinement search for the largest
//! convexity-inequality margin of a real function.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{constraint_pair, CertifyError, SearchBudget, Sense, Variant};
use crate::model::EvalError;

const RANDOM_BLOCK: usize = 1000;
const RELAXED_T_N: usize = 32;
const RELAXED_R: [f64; 8] = [0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875];
const R_MAX: f64 = 1.0 - 1e-9;
const U_MIN: f64 = 1e-6;

/// A point of the search space and the margin found there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub u: f64,
    pub v: f64,
    pub t: f64,
    pub r: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub margin: f64,
}

impl Candidate {
    fn key(&self) -> [f64; 4] {
        [self.u, self.v, self.t, self.r]
    }

    /// Larger margin wins; ties go to the lexicographically smallest
    /// `(u, v, t, r)`.
    fn better_than(&self, other: &Candidate) -> bool {
        match self.margin.total_cmp(&other.margin) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                let (a, b) = (self.key(), other.key());
                for i in 0..4 {
                    match a[i].total_cmp(&b[i]) {
                        Ordering::Less => return true,
                        Ordering::Greater => return false,
                        Ordering::Equal => {}
                    }
                }
                false
            }
        }
    }
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Outcome {
    pub best: Candidate,
    pub evaluations: u64,
    pub grid_points: u64,
    pub random_trials: u64,
    pub refine_steps: u64,
}

/// `g(λ1 u + λ2 v) - (λ1^s g(u) + λ2^s g(v))`.
pub(crate) fn margin_of<G>(g: &G, u: f64, v: f64, l1: f64, l2: f64, s: f64) -> Result<f64, EvalError>
where
    G: Fn(f64) -> Result<f64, EvalError> + ?Sized,
{
    let lhs = g(l1 * u + l2 * v)?;
    Ok(lhs - rhs_of(g(u)?, g(v)?, l1, l2, s))
}

#[inline]
fn rhs_of(gu: f64, gv: f64, l1: f64, l2: f64, s: f64) -> f64 {
    // λ^s multiplies g; a zero weight drops the term even if g is large.
    let w1 = if l1 == 0.0 { 0.0 } else { l1.powf(s) * gu };
    let w2 = if l2 == 0.0 { 0.0 } else { l2.powf(s) * gv };
    w1 + w2
}

pub(crate) struct Problem<'a, G: ?Sized> {
    pub g: &'a G,
    pub sense: Sense,
    pub variant: Variant,
    pub s: f64,
    pub budget: &'a SearchBudget,
    /// Extra u/v grid points, e.g. piecewise breakpoints.
    pub extra_points: &'a [f64],
}

impl<G> Problem<'_, G>
where
    G: Fn(f64) -> Result<f64, EvalError> + Sync + ?Sized,
{
    fn candidate(&self, u: f64, v: f64, t: f64, r: f64) -> Result<Candidate, EvalError> {
        let (l1, l2) = constraint_pair(self.sense, self.variant, t, r, self.s);
        let margin = margin_of(self.g, u, v, l1, l2, self.s)?;
        Ok(Candidate {
            u,
            v,
            t,
            r,
            lambda1: l1,
            lambda2: l2,
            margin,
        })
    }

    fn r_exact(&self) -> f64 {
        match self.variant {
            Variant::Exact => 1.0,
            Variant::Relaxed => 0.0,
        }
    }

    fn axis(&self) -> Vec<f64> {
        let b = self.budget;
        let n = b.grid_n.saturating_sub(1).max(1);
        let (lo, hi) = (U_MIN.ln(), b.u_max.ln());
        let mut pts: Vec<f64> = (0..n)
            .map(|i| {
                if n == 1 {
                    b.u_max
                } else {
                    (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect();
        pts.push(0.0);
        if b.u_max >= 1.0 {
            pts.push(1.0);
        }
        pts.extend(
            self.extra_points
                .iter()
                .copied()
                .filter(|p| *p >= 0.0 && *p <= b.u_max),
        );
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn grid_phase(&self) -> Result<(Option<Candidate>, u64, u64), CertifyError> {
        let axis = self.axis();
        let g_axis: Vec<f64> = axis.iter().map(|&u| (self.g)(u)).collect::<Result<_, _>>()?;
        let (ts, rs): (Vec<f64>, Vec<f64>) = match self.variant {
            Variant::Exact => (unit_grid(self.budget.t_n), vec![1.0]),
            Variant::Relaxed => (unit_grid(RELAXED_T_N), RELAXED_R.to_vec()),
        };
        let pairs: Vec<(f64, f64, f64, f64)> = rs
            .iter()
            .flat_map(|&r| {
                ts.iter().map(move |&t| {
                    let (l1, l2) = constraint_pair(self.sense, self.variant, t, r, self.s);
                    (t, r, l1, l2)
                })
            })
            .collect();

        let per_row = |i: usize| -> Result<(Option<Candidate>, u64), EvalError> {
            let (u, gu) = (axis[i], g_axis[i]);
            let mut best: Option<Candidate> = None;
            let mut evals = 0;
            for (j, &v) in axis.iter().enumerate() {
                let gv = g_axis[j];
                for &(t, r, l1, l2) in &pairs {
                    let lhs = (self.g)(l1 * u + l2 * v)?;
                    evals += 1;
                    let c = Candidate {
                        u,
                        v,
                        t,
                        r,
                        lambda1: l1,
                        lambda2: l2,
                        margin: lhs - rhs_of(gu, gv, l1, l2, self.s),
                    };
                    if best.is_none_or(|b| c.better_than(&b)) {
                        best = Some(c);
                    }
                }
            }
            Ok((best, evals))
        };
        let (best, evals) = (0..axis.len())
            .into_par_iter()
            .map(per_row)
            .try_reduce(|| (None, 0), |a, b| Ok((pick(a.0, b.0), a.1 + b.1)))?;
        let points = (axis.len() * axis.len() * pairs.len()) as u64;
        Ok((best, evals + axis.len() as u64, points))
    }

    fn random_phase(&self) -> Result<(Option<Candidate>, u64), CertifyError> {
        let b = self.budget;
        let blocks = b.random_trials.div_ceil(RANDOM_BLOCK);
        let block = |k: usize| -> Result<(Option<Candidate>, u64), EvalError> {
            let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
            rng.set_stream(k as u64);
            let n = RANDOM_BLOCK.min(b.random_trials - k * RANDOM_BLOCK);
            let mut best: Option<Candidate> = None;
            for i in 0..n {
                let log_scale = i % 2 == 1;
                let u = sample_point(&mut rng, b.u_max, log_scale);
                let v = sample_point(&mut rng, b.u_max, log_scale);
                let t = match rng.random_range(0..32u32) {
                    0 => 0.0,
                    1 => 1.0,
                    _ => rng.random::<f64>(),
                };
                let r = match self.variant {
                    Variant::Exact => 1.0,
                    Variant::Relaxed => {
                        if rng.random_range(0..16u32) == 0 {
                            0.0
                        } else {
                            rng.random::<f64>() * R_MAX
                        }
                    }
                };
                let c = self.candidate(u, v, t, r)?;
                if best.is_none_or(|b| c.better_than(&b)) {
                    best = Some(c);
                }
            }
            Ok((best, 3 * n as u64))
        };
        Ok((0..blocks)
            .into_par_iter()
            .map(block)
            .try_reduce(|| (None, 0), |a, b| Ok((pick(a.0, b.0), a.1 + b.1)))?)
    }

    /// Coordinate ascent on the margin with step halving.
    fn refine(&self, start: Candidate) -> Result<(Candidate, u64, u64), CertifyError> {
        let b = self.budget;
        let mut best = start;
        let mut steps = [
            (0.25 * best.u).max(1e-4 * b.u_max),
            (0.25 * best.v).max(1e-4 * b.u_max),
            0.5 / b.t_n as f64,
            1.0 / 16.0,
        ];
        let dims = match self.variant {
            Variant::Exact => 3,
            Variant::Relaxed => 4,
        };
        let (mut evals, mut taken) = (0u64, 0u64);
        for _ in 0..b.refine_steps {
            taken += 1;
            let mut improved = false;
            for d in 0..dims {
                for dir in [-1.0, 1.0] {
                    let mut x = [best.u, best.v, best.t, best.r];
                    x[d] += dir * steps[d];
                    x[0] = x[0].clamp(0.0, b.u_max);
                    x[1] = x[1].clamp(0.0, b.u_max);
                    x[2] = x[2].clamp(0.0, 1.0);
                    x[3] = if dims == 4 { x[3].clamp(0.0, R_MAX) } else { self.r_exact() };
                    if x == [best.u, best.v, best.t, best.r] {
                        continue;
                    }
                    let c = self.candidate(x[0], x[1], x[2], x[3])?;
                    evals += 3;
                    if c.margin > best.margin {
                        best = c;
                        improved = true;
                    }
                }
            }
            if !improved {
                steps.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        Ok((best, evals, taken))
    }

    pub fn run(&self) -> Result<Outcome, CertifyError> {
        let (grid_best, grid_evals, grid_points) = self.grid_phase()?;
        let (rand_best, rand_evals) = self.random_phase()?;
        let start = pick(grid_best, rand_best).expect("search space is never empty");
        let (best, ref_evals, refine_steps) = self.refine(start)?;
        Ok(Outcome {
            best,
            evaluations: grid_evals + rand_evals + ref_evals,
            grid_points,
            random_trials: self.budget.random_trials as u64,
            refine_steps,
        })
    }
}

fn unit_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn sample_point(rng: &mut ChaCha8Rng, u_max: f64, log_scale: bool) -> f64 {
    if rng.random_range(0..16u32) == 0 {
        return 0.0;
    }
    if log_scale && u_max > U_MIN {
        let (lo, hi) = (U_MIN.ln(), u_max.ln());
        (lo + (hi - lo) * rng.random::<f64>()).exp()
    } else {
        u_max * rng.random::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem<'a>(
        g: &'a (dyn Fn(f64) -> Result<f64, EvalError> + Sync),
        sense: Sense,
        budget: &'a SearchBudget,
    ) -> Problem<'a, dyn Fn(f64) -> Result<f64, EvalError> + Sync + 'a> {
        Problem {
            g,
            sense,
            variant: Variant::Exact,
            s: 0.5,
            budget,
            extra_points: &[],
        }
    }

    #[test]
    fn tie_break_is_lexicographic() {
        let base = Candidate {
            u: 1.0,
            v: 2.0,
            t: 0.5,
            r: 1.0,
            lambda1: 0.0,
            lambda2: 0.0,
            margin: 0.0,
        };
        let other = Candidate { v: 1.0, ..base };
        assert!(other.better_than(&base));
        assert!(!base.better_than(&other));
        let bigger = Candidate { margin: 1.0, ..base };
        assert!(bigger.better_than(&other));
    }

    #[test]
    fn axis_contains_boundaries() {
        let budget = SearchBudget::default();
        let g = |u: f64| Ok(u);
        let p = problem(&g, Sense::First, &budget);
        let axis = p.axis();
        assert_eq!(axis[0], 0.0);
        assert!(axis.contains(&1.0));
        assert!((axis.last().unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn negative_function_fails_second_sense() {
        let budget = SearchBudget {
            random_trials: 2000,
            ..SearchBudget::default()
        };
        let g = |u: f64| Ok(-u - 1.0);
        let out = problem(&g, Sense::Second, &budget).run().unwrap();
        assert!(out.best.margin > 0.1, "{out:?}");
    }
}
