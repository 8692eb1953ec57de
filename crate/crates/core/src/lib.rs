//! Fractal real-line algebra ℝ^α, local fractional calculus, and
//! falsification-based certification of generalized s-convexity.

pub mod algebra;
pub mod calculus;
pub mod certifier;
pub mod gallery;
pub mod gamma;
pub mod model;
pub mod theorems;

pub use algebra::{AlphaContext, FieldOp, FractalScalar, ScalarMode};
pub use gamma::gamma;
pub use model::{parse, parse_scalar, FunctionExpr, ScalarExpr};
