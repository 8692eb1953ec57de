//! Canonical DSL text for ASTs. Printing then parsing reproduces the tree.

use std::fmt::{self, Display, Formatter};

use super::ast::{Branch, FunctionExpr, Guard, KExpr, ScalarExpr};
use crate::algebra::ScalarMode;

// Binding strength: 1 = additive, 2 = multiplicative, 3 = unary/atom.
fn kprec(e: &KExpr) -> u8 {
    match e {
        KExpr::Add { .. } | KExpr::Sub { .. } => 1,
        KExpr::Mul { .. } | KExpr::Div { .. } => 2,
        _ => 3,
    }
}

fn sprec(e: &ScalarExpr) -> u8 {
    match e {
        ScalarExpr::Add { .. } | ScalarExpr::Sub { .. } => 1,
        ScalarExpr::Mul { .. } | ScalarExpr::Div { .. } => 2,
        _ => 3,
    }
}

fn fprec(e: &FunctionExpr) -> u8 {
    match e {
        FunctionExpr::Sum { .. } | FunctionExpr::Difference { .. } => 1,
        FunctionExpr::Product { .. } => 2,
        _ => 3,
    }
}

fn wrap<T: Display>(f: &mut Formatter<'_>, e: &T, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl Display for KExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut Formatter<'_>, l: &KExpr, op: &str, r: &KExpr, p: u8| {
            wrap(f, l, kprec(l) < p)?;
            write!(f, " {op} ")?;
            wrap(f, r, kprec(r) <= p)
        };
        match self {
            KExpr::Num { value } => write!(f, "{value}"),
            KExpr::S => f.write_str("s"),
            KExpr::Add { lhs, rhs } => bin(f, lhs, "+", rhs, 1),
            KExpr::Sub { lhs, rhs } => bin(f, lhs, "-", rhs, 1),
            KExpr::Mul { lhs, rhs } => bin(f, lhs, "*", rhs, 2),
            KExpr::Div { lhs, rhs } => bin(f, lhs, "/", rhs, 2),
            KExpr::Neg { arg } => {
                f.write_str("-")?;
                let paren = kprec(arg) < 3 || matches!(**arg, KExpr::Num { .. });
                wrap(f, arg, paren)
            }
        }
    }
}

impl Display for Guard {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Eq { c } => write!(f, "u == {c}"),
            Guard::Lt { c } => write!(f, "u < {c}"),
            Guard::Le { c } => write!(f, "u <= {c}"),
            Guard::Gt { c } => write!(f, "u > {c}"),
            Guard::Ge { c } => write!(f, "u >= {c}"),
            Guard::Else => f.write_str("else"),
        }
    }
}

fn branches<T: Display>(f: &mut Formatter<'_>, bs: &[Branch<T>]) -> fmt::Result {
    f.write_str("pw(")?;
    for (i, b) in bs.iter().enumerate() {
        if i > 0 {
            f.write_str("; ")?;
        }
        write!(f, "{} -> {}", b.guard, b.body)?;
    }
    f.write_str(")")
}

impl Display for ScalarExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut Formatter<'_>, l: &ScalarExpr, op: &str, r: &ScalarExpr, p: u8| {
            wrap(f, l, sprec(l) < p)?;
            write!(f, " {op} ")?;
            wrap(f, r, sprec(r) <= p)
        };
        match self {
            ScalarExpr::Num { value } => write!(f, "{value}"),
            ScalarExpr::U => f.write_str("u"),
            ScalarExpr::Add { lhs, rhs } => bin(f, lhs, "+", rhs, 1),
            ScalarExpr::Sub { lhs, rhs } => bin(f, lhs, "-", rhs, 1),
            ScalarExpr::Mul { lhs, rhs } => bin(f, lhs, "*", rhs, 2),
            ScalarExpr::Div { lhs, rhs } => bin(f, lhs, "/", rhs, 2),
            ScalarExpr::Neg { arg } => {
                f.write_str("-")?;
                let paren = sprec(arg) < 3 || matches!(**arg, ScalarExpr::Num { .. });
                wrap(f, arg, paren)
            }
            ScalarExpr::Pow { arg, exponent } => write!(f, "pow({arg}, {exponent})"),
            ScalarExpr::Piecewise { branches: bs } => branches(f, bs),
        }
    }
}

impl Display for FunctionExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut Formatter<'_>, l: &FunctionExpr, op: &str, r: &FunctionExpr, p: u8| {
            wrap(f, l, fprec(l) < p)?;
            write!(f, " {op} ")?;
            wrap(f, r, fprec(r) <= p)
        };
        match self {
            FunctionExpr::Const { mode, x } => match mode {
                ScalarMode::Base => write!(f, "fb({x})"),
                ScalarMode::Value => write!(f, "fv({x})"),
            },
            FunctionExpr::Mono { k } => write!(f, "mono({k})"),
            FunctionExpr::Sum { lhs, rhs } => bin(f, lhs, "+", rhs, 1),
            FunctionExpr::Difference { lhs, rhs } => bin(f, lhs, "-", rhs, 1),
            FunctionExpr::Product { lhs, rhs } => bin(f, lhs, "*", rhs, 2),
            FunctionExpr::Max { lhs, rhs } => write!(f, "max({lhs}, {rhs})"),
            FunctionExpr::Piecewise { branches: bs } => branches(f, bs),
            FunctionExpr::Subst { outer, inner } => write!(f, "subst({outer}; {inner})"),
        }
    }
}
