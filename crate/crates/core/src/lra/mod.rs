//! Linear arithmetic over exact ordered fields.
//!
//! [`LinSystem`] is an immutable conjunction of [`LinConstraint`]s. Variables
//! are projected out with Fourier-Motzkin elimination, which yields
//! satisfiability, answer constraints over chosen variables, witnesses and
//! linear optimization without any floating point.

mod linear;
mod scalar;
mod system;

pub use linear::{Cmp, LinConstraint, LinExpr, Rel};
pub use scalar::Field;
pub use system::{Direction, LinSystem, Optimum, Point, Satisfiability};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LraError {
    #[error("non-linear term: product of two unknowns")]
    NonLinear,
    #[error("unsupported over rationals: {0}")]
    Unsupported(&'static str),
}
