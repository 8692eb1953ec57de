//! Function DSL: AST, parser, printer, evaluator and combinators.

pub mod ast;
pub mod combine;
pub mod eval;
pub mod parse;
mod print;

pub use ast::{Branch, FunctionExpr, Guard, KExpr, ScalarExpr};
pub use eval::{base_view, check_coverage, EvalError, Uncovered};
pub use parse::{parse, parse_scalar, ParseError, ParseErrorKind};
