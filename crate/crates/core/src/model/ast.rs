use serde::{Deserialize, Serialize};

use crate::algebra::ScalarMode;

/// Real-valued exponent expression; may mention the convexity order `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KExpr {
    Num { value: f64 },
    S,
    Add { lhs: Box<KExpr>, rhs: Box<KExpr> },
    Sub { lhs: Box<KExpr>, rhs: Box<KExpr> },
    Mul { lhs: Box<KExpr>, rhs: Box<KExpr> },
    Div { lhs: Box<KExpr>, rhs: Box<KExpr> },
    Neg { arg: Box<KExpr> },
}

impl KExpr {
    pub fn num(value: f64) -> Self {
        KExpr::Num { value }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            KExpr::Num { value } => *value,
            KExpr::S => s,
            KExpr::Add { lhs, rhs } => lhs.eval(s) + rhs.eval(s),
            KExpr::Sub { lhs, rhs } => lhs.eval(s) - rhs.eval(s),
            KExpr::Mul { lhs, rhs } => lhs.eval(s) * rhs.eval(s),
            KExpr::Div { lhs, rhs } => lhs.eval(s) / rhs.eval(s),
            KExpr::Neg { arg } => -arg.eval(s),
        }
    }

    pub fn mentions_s(&self) -> bool {
        match self {
            KExpr::Num { .. } => false,
            KExpr::S => true,
            KExpr::Add { lhs, rhs }
            | KExpr::Sub { lhs, rhs }
            | KExpr::Mul { lhs, rhs }
            | KExpr::Div { lhs, rhs } => lhs.mentions_s() || rhs.mentions_s(),
            KExpr::Neg { arg } => arg.mentions_s(),
        }
    }
}

/// Piecewise guard on the argument `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Guard {
    Eq { c: f64 },
    Lt { c: f64 },
    Le { c: f64 },
    Gt { c: f64 },
    Ge { c: f64 },
    Else,
}

impl Guard {
    #[inline]
    pub fn matches(&self, u: f64) -> bool {
        match *self {
            Guard::Eq { c } => u == c,
            Guard::Lt { c } => u < c,
            Guard::Le { c } => u <= c,
            Guard::Gt { c } => u > c,
            Guard::Ge { c } => u >= c,
            Guard::Else => true,
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match *self {
            Guard::Eq { c } | Guard::Lt { c } | Guard::Le { c } | Guard::Gt { c } | Guard::Ge { c } => {
                Some(c)
            }
            Guard::Else => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch<T> {
    pub guard: Guard,
    pub body: T,
}

/// Real-valued function of `u`, used for classical functions and inner
/// functions of compositions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarExpr {
    Num { value: f64 },
    U,
    Add { lhs: Box<ScalarExpr>, rhs: Box<ScalarExpr> },
    Sub { lhs: Box<ScalarExpr>, rhs: Box<ScalarExpr> },
    Mul { lhs: Box<ScalarExpr>, rhs: Box<ScalarExpr> },
    Div { lhs: Box<ScalarExpr>, rhs: Box<ScalarExpr> },
    Neg { arg: Box<ScalarExpr> },
    Pow { arg: Box<ScalarExpr>, exponent: f64 },
    Piecewise { branches: Vec<Branch<ScalarExpr>> },
}

impl ScalarExpr {
    pub fn num(value: f64) -> Self {
        ScalarExpr::Num { value }
    }

    /// `u^p`.
    pub fn power_of_u(p: f64) -> Self {
        ScalarExpr::Pow {
            arg: Box::new(ScalarExpr::U),
            exponent: p,
        }
    }

    pub fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            ScalarExpr::Num { .. } | ScalarExpr::U => {}
            ScalarExpr::Add { lhs, rhs }
            | ScalarExpr::Sub { lhs, rhs }
            | ScalarExpr::Mul { lhs, rhs }
            | ScalarExpr::Div { lhs, rhs } => {
                lhs.breakpoints(out);
                rhs.breakpoints(out);
            }
            ScalarExpr::Neg { arg } | ScalarExpr::Pow { arg, .. } => arg.breakpoints(out),
            ScalarExpr::Piecewise { branches } => {
                for b in branches {
                    out.extend(b.guard.constant());
                    b.body.breakpoints(out);
                }
            }
        }
    }
}

/// A function ℝ₊ → ℝ^α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionExpr {
    /// `fb(x)` (by base) or `fv(x)` (by value).
    Const { mode: ScalarMode, x: f64 },
    /// `u^{kα}`, i.e. the element with base `u^k`.
    Mono { k: KExpr },
    Sum { lhs: Box<FunctionExpr>, rhs: Box<FunctionExpr> },
    Difference { lhs: Box<FunctionExpr>, rhs: Box<FunctionExpr> },
    Product { lhs: Box<FunctionExpr>, rhs: Box<FunctionExpr> },
    Max { lhs: Box<FunctionExpr>, rhs: Box<FunctionExpr> },
    Piecewise { branches: Vec<Branch<FunctionExpr>> },
    /// `u ↦ outer(inner(u))`.
    Subst { outer: Box<FunctionExpr>, inner: ScalarExpr },
}

impl FunctionExpr {
    pub fn fb(x: f64) -> Self {
        FunctionExpr::Const {
            mode: ScalarMode::Base,
            x,
        }
    }

    pub fn fv(x: f64) -> Self {
        FunctionExpr::Const {
            mode: ScalarMode::Value,
            x,
        }
    }

    pub fn mono(k: f64) -> Self {
        FunctionExpr::Mono { k: KExpr::num(k) }
    }

    /// `u^{sα}` with `s` resolved from the context.
    pub fn mono_s() -> Self {
        FunctionExpr::Mono { k: KExpr::S }
    }

    pub fn sum(lhs: FunctionExpr, rhs: FunctionExpr) -> Self {
        FunctionExpr::Sum {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn difference(lhs: FunctionExpr, rhs: FunctionExpr) -> Self {
        FunctionExpr::Difference {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn max(lhs: FunctionExpr, rhs: FunctionExpr) -> Self {
        FunctionExpr::Max {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn piecewise(branches: Vec<(Guard, FunctionExpr)>) -> Self {
        FunctionExpr::Piecewise {
            branches: branches
                .into_iter()
                .map(|(guard, body)| Branch { guard, body })
                .collect(),
        }
    }

    /// Guard constants of every piecewise node, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.retain(|c| c.is_finite());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            FunctionExpr::Const { .. } | FunctionExpr::Mono { .. } => {}
            FunctionExpr::Sum { lhs, rhs }
            | FunctionExpr::Difference { lhs, rhs }
            | FunctionExpr::Product { lhs, rhs }
            | FunctionExpr::Max { lhs, rhs } => {
                lhs.collect_breakpoints(out);
                rhs.collect_breakpoints(out);
            }
            FunctionExpr::Piecewise { branches } => {
                for b in branches {
                    out.extend(b.guard.constant());
                    b.body.collect_breakpoints(out);
                }
            }
            // Inner breakpoints live in the inner variable; outer ones would
            // need inverting the inner map, so only the inner ones are kept.
            FunctionExpr::Subst { inner, .. } => inner.breakpoints(out),
        }
    }

    /// Replaces every occurrence of the symbol `s` by the number `s`.
    pub fn bind_s(&self, s: f64) -> FunctionExpr {
        match self {
            FunctionExpr::Const { .. } => self.clone(),
            FunctionExpr::Mono { k } => FunctionExpr::Mono {
                k: if k.mentions_s() {
                    KExpr::num(k.eval(s))
                } else {
                    k.clone()
                },
            },
            FunctionExpr::Sum { lhs, rhs } => FunctionExpr::sum(lhs.bind_s(s), rhs.bind_s(s)),
            FunctionExpr::Difference { lhs, rhs } => {
                FunctionExpr::difference(lhs.bind_s(s), rhs.bind_s(s))
            }
            FunctionExpr::Product { lhs, rhs } => FunctionExpr::Product {
                lhs: Box::new(lhs.bind_s(s)),
                rhs: Box::new(rhs.bind_s(s)),
            },
            FunctionExpr::Max { lhs, rhs } => FunctionExpr::max(lhs.bind_s(s), rhs.bind_s(s)),
            FunctionExpr::Piecewise { branches } => FunctionExpr::Piecewise {
                branches: branches
                    .iter()
                    .map(|b| Branch {
                        guard: b.guard,
                        body: b.body.bind_s(s),
                    })
                    .collect(),
            },
            FunctionExpr::Subst { outer, inner } => FunctionExpr::Subst {
                outer: Box::new(outer.bind_s(s)),
                inner: inner.clone(),
            },
        }
    }
}
