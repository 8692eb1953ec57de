//! Syntactic membership rules. Each rule matches a function shape whose
//! class is known in closed form and returns the rule id with a citation.

use crate::algebra::AlphaContext;
use crate::model::combine::thm35_exponent;
use crate::model::{check_coverage, FunctionExpr, Guard, KExpr};

use super::Sense;

#[derive(Debug, Clone, PartialEq)]
pub struct RuleMatch {
    pub rule_id: &'static str,
    pub citation: &'static str,
}

const EX41_I: RuleMatch = RuleMatch {
    rule_id: "ex4.1(i)",
    citation: "Example 4.1(i): a^α at u = 0, b^α u^{sα} + c^α for u > 0, with b^α >= 0^α and c^α <= a^α, lies in GK_s^1",
};
const EX41_III: RuleMatch = RuleMatch {
    rule_id: "ex4.1(iii)",
    citation: "Example 4.1(iii): a^α at u = 0, b^α u^{sα} + c^α for u > 0, with b^α >= 0^α and 0^α <= c^α <= a^α, lies in GK_s^2",
};
const THM35: RuleMatch = RuleMatch {
    rule_id: "thm3.5",
    citation: "Theorem 3.5: u^{(s/(1-s))α} p(u) with p non-decreasing and non-negative lies in GK_s^1",
};

/// Tries every rule for `sense`. Rules only exist for `0 < s < 1`.
pub fn match_rules(f: &FunctionExpr, sense: Sense, ctx: &AlphaContext) -> Option<RuleMatch> {
    if !(ctx.s > 0.0 && ctx.s < 1.0) {
        return None;
    }
    if let Some(p) = example41_params(f, ctx) {
        match sense {
            Sense::First if p.b >= 0.0 && p.c <= p.a => return Some(EX41_I),
            Sense::Second if p.b >= 0.0 && 0.0 <= p.c && p.c <= p.a => return Some(EX41_III),
            _ => {}
        }
    }
    if sense == Sense::First {
        if let Some(p) = thm35_factor(f, ctx) {
            if monotone_nonneg(&p, ctx) {
                return Some(THM35);
            }
        }
    }
    None
}

/// Bases `(a, b, c)` of `f(0) = a^α`, `f(u) = b^α u^{sα} + c^α` for `u > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example41Shape {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn const_base(e: &FunctionExpr, ctx: &AlphaContext) -> Option<f64> {
    match e {
        FunctionExpr::Const { mode, x } => Some(ctx.make_scalar(*mode, *x).base),
        _ => None,
    }
}

fn is_mono_s(k: &KExpr, ctx: &AlphaContext) -> bool {
    match k {
        KExpr::S => true,
        other => other.eval(ctx.s) == ctx.s,
    }
}

/// `(b, c)` with `e = b u^s + c` in base.
fn affine_in_us(e: &FunctionExpr, ctx: &AlphaContext) -> Option<(f64, f64)> {
    use FunctionExpr as F;
    if let Some(c) = const_base(e, ctx) {
        return Some((0.0, c));
    }
    match e {
        F::Mono { k } if is_mono_s(k, ctx) => Some((1.0, 0.0)),
        F::Product { lhs, rhs } => {
            let (k, m) = match (const_base(lhs, ctx), const_base(rhs, ctx)) {
                (Some(k), None) => (k, rhs),
                (None, Some(k)) => (k, lhs),
                _ => return None,
            };
            let (b, c) = affine_in_us(m, ctx)?;
            Some((k * b, k * c))
        }
        F::Sum { lhs, rhs } => {
            let (b1, c1) = affine_in_us(lhs, ctx)?;
            let (b2, c2) = affine_in_us(rhs, ctx)?;
            Some((b1 + b2, c1 + c2))
        }
        F::Difference { lhs, rhs } => {
            let (b1, c1) = affine_in_us(lhs, ctx)?;
            let (b2, c2) = affine_in_us(rhs, ctx)?;
            Some((b1 - b2, c1 - c2))
        }
        _ => None,
    }
}

/// Recognizes the two-branch family, and its one-branch special case
/// `a = c`.
pub fn example41_params(f: &FunctionExpr, ctx: &AlphaContext) -> Option<Example41Shape> {
    if let FunctionExpr::Piecewise { branches } = f {
        let [first, rest @ ..] = branches.as_slice() else {
            return None;
        };
        if first.guard != (Guard::Eq { c: 0.0 }) && first.guard != (Guard::Le { c: 0.0 }) {
            return None;
        }
        let a = const_base(&first.body, ctx)?;
        // The remaining branches must cover (0, ∞) with one affine body.
        let second = rest.first()?;
        if !matches!(second.guard, Guard::Else | Guard::Gt { c: 0.0 } | Guard::Ge { c: 0.0 }) {
            return None;
        }
        let (b, c) = affine_in_us(&second.body, ctx)?;
        return Some(Example41Shape { a, b, c });
    }
    let (b, c) = affine_in_us(f, ctx)?;
    Some(Example41Shape { a: c, b, c })
}

/// `p` with `f = u^{(s/(1-s))α} p(u)`, where a factor `u^{kα}` with
/// `k > s/(1-s)` leaves `u^{(k - s/(1-s))α}` in `p`.
pub fn thm35_factor(f: &FunctionExpr, ctx: &AlphaContext) -> Option<FunctionExpr> {
    let big_k = thm35_exponent(ctx.s).ok()?;
    factor(f, big_k, ctx)
}

fn mono_excess(e: &FunctionExpr, big_k: f64, ctx: &AlphaContext) -> Option<FunctionExpr> {
    let FunctionExpr::Mono { k } = e else {
        return None;
    };
    let k = k.eval(ctx.s);
    let tol = 1e-12 * big_k.max(1.0);
    if (k - big_k).abs() <= tol {
        Some(FunctionExpr::fb(1.0))
    } else if k > big_k {
        Some(FunctionExpr::mono(k - big_k))
    } else {
        None
    }
}

fn factor(f: &FunctionExpr, big_k: f64, ctx: &AlphaContext) -> Option<FunctionExpr> {
    use FunctionExpr as F;
    if let Some(p) = mono_excess(f, big_k, ctx) {
        return Some(p);
    }
    match f {
        F::Product { lhs, rhs } => {
            if let Some(p) = factor(lhs, big_k, ctx) {
                Some(product(p, (**rhs).clone()))
            } else {
                factor(rhs, big_k, ctx).map(|p| product((**lhs).clone(), p))
            }
        }
        F::Sum { lhs, rhs } => Some(F::sum(factor(lhs, big_k, ctx)?, factor(rhs, big_k, ctx)?)),
        F::Max { lhs, rhs } => Some(F::max(factor(lhs, big_k, ctx)?, factor(rhs, big_k, ctx)?)),
        F::Piecewise { branches } => Some(F::piecewise(
            branches
                .iter()
                .map(|b| Some((b.guard, factor(&b.body, big_k, ctx)?)))
                .collect::<Option<Vec<_>>>()?,
        )),
        _ => None,
    }
}

fn product(a: FunctionExpr, b: FunctionExpr) -> FunctionExpr {
    FunctionExpr::Product {
        lhs: Box::new(a),
        rhs: Box::new(b),
    }
}

/// Conservative structural test that `p` is non-decreasing with
/// non-negative base on `[0, ∞)`. False means "not shown", not "false".
pub fn monotone_nonneg(p: &FunctionExpr, ctx: &AlphaContext) -> bool {
    use FunctionExpr as F;
    match p {
        F::Const { mode, x } => ctx.make_scalar(*mode, *x).base >= 0.0,
        F::Mono { k } => k.eval(ctx.s) >= 0.0,
        F::Sum { lhs, rhs } | F::Product { lhs, rhs } | F::Max { lhs, rhs } => {
            monotone_nonneg(lhs, ctx) && monotone_nonneg(rhs, ctx)
        }
        F::Piecewise { branches } => piecewise_monotone(branches, ctx),
        F::Difference { .. } | F::Subst { .. } => false,
    }
}

fn continuous_nonneg(p: &FunctionExpr, ctx: &AlphaContext) -> bool {
    !matches!(p, FunctionExpr::Piecewise { .. })
        && monotone_nonneg(p, ctx)
        && !contains_piecewise(p)
}

fn contains_piecewise(p: &FunctionExpr) -> bool {
    use FunctionExpr as F;
    match p {
        F::Piecewise { .. } => true,
        F::Const { .. } | F::Mono { .. } => false,
        F::Sum { lhs, rhs } | F::Product { lhs, rhs } | F::Max { lhs, rhs } | F::Difference { lhs, rhs } => {
            contains_piecewise(lhs) || contains_piecewise(rhs)
        }
        F::Subst { outer, .. } => contains_piecewise(outer),
    }
}

/// Bodies must be continuous and monotone; at every cut `c` the left
/// body, the body selected at `c`, and the right body must be ordered.
fn piecewise_monotone(branches: &[crate::model::Branch<FunctionExpr>], ctx: &AlphaContext) -> bool {
    let guards: Vec<Guard> = branches.iter().map(|b| b.guard).collect();
    if check_coverage(&guards).is_err() {
        return false;
    }
    if !branches.iter().all(|b| continuous_nonneg(&b.body, ctx)) {
        return false;
    }
    let select = |u: f64| branches.iter().find(|b| b.guard.matches(u)).map(|b| &b.body);
    let mut cuts: Vec<f64> = guards
        .iter()
        .filter_map(Guard::constant)
        .filter(|c| *c >= 0.0 && c.is_finite())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    for (i, &c) in cuts.iter().enumerate() {
        let right_probe = cuts.get(i + 1).map_or(c + 1.0, |n| 0.5 * (c + n));
        let at = select(c);
        let right = select(right_probe);
        let left = if c > 0.0 {
            let lo = if i == 0 { 0.5 * c } else { 0.5 * (cuts[i - 1] + c) };
            select(lo)
        } else {
            None
        };
        let base = |e: Option<&FunctionExpr>| e.and_then(|e| e.base_at(c, ctx).ok());
        let (l, m, r) = (base(left), base(at), base(right));
        let Some(m) = m else { return false };
        let Some(r) = r else { return false };
        if m > r {
            return false;
        }
        if let Some(l) = l {
            if l > m {
                return false;
            }
        } else if c > 0.0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    fn ctx(s: f64) -> AlphaContext {
        AlphaContext::new(0.5, s).unwrap()
    }

    #[test]
    fn example41_shape_is_read() {
        let f = parse("pw(u==0 -> fb(2); else -> fb(3)*mono(s) + fb(-1))").unwrap();
        let p = example41_params(&f, &ctx(0.5)).unwrap();
        assert_eq!(p, Example41Shape { a: 2.0, b: 3.0, c: -1.0 });
        let g = parse("mono(s)").unwrap();
        assert_eq!(
            example41_params(&g, &ctx(0.5)).unwrap(),
            Example41Shape { a: 0.0, b: 1.0, c: 0.0 }
        );
        assert!(example41_params(&parse("mono(2)").unwrap(), &ctx(0.5)).is_none());
    }

    #[test]
    fn rules_fire_per_case() {
        let c = ctx(0.5);
        let f = parse("pw(u==0 -> fb(0); else -> fb(1)*mono(s) + fb(-1))").unwrap();
        assert_eq!(match_rules(&f, Sense::First, &c).unwrap().rule_id, "ex4.1(i)");
        assert!(match_rules(&f, Sense::Second, &c).is_none());
        let g = parse("pw(u==0 -> fb(0); else -> fb(1)*mono(s) + fb(0))").unwrap();
        assert_eq!(match_rules(&g, Sense::Second, &c).unwrap().rule_id, "ex4.1(iii)");
    }

    #[test]
    fn thm35_recognizes_step_factor() {
        let c = ctx(0.5);
        let f = parse("pw(u <= 1 -> mono(s/(1-s)); else -> fb(2) * mono(s/(1-s)))").unwrap();
        assert_eq!(match_rules(&f, Sense::First, &c).unwrap().rule_id, "thm3.5");
        // decreasing step is not accepted
        let g = parse("pw(u <= 1 -> fb(2) * mono(s/(1-s)); else -> mono(s/(1-s)))").unwrap();
        assert!(match_rules(&g, Sense::First, &c).is_none());
        // higher powers factor with a monomial remainder
        assert_eq!(match_rules(&parse("mono(3)").unwrap(), Sense::First, &c).unwrap().rule_id, "thm3.5");
        assert!(match_rules(&parse("mono(0.9)").unwrap(), Sense::First, &c).is_none());
    }

    #[test]
    fn no_rules_at_boundary_order() {
        let f = parse("mono(s)").unwrap();
        assert!(match_rules(&f, Sense::First, &ctx(1.0)).is_none());
    }
}
