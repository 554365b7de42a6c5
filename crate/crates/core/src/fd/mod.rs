//! Finite-domain integer constraint solving.
//!
//! A [`Store`] holds integer variables with interval-list [`Domain`]s and the
//! [`Propagator`]s posted on them. Propagation runs a FIFO queue to fixpoint;
//! [`Store::label`] enumerates solutions depth-first with a trail for
//! backtracking; [`Store::residual`] returns the answer constraint.

mod domain;
mod propagate;
mod propagator;
mod search;
mod store;
mod tree;

pub use domain::Domain;
pub use propagator::{LinRel, Operand, PropId, Propagator};
pub use search::{EventKind, Heuristic, Labeling, SearchEvent, SearchObserver, ValueOrder};
pub use store::{Mark, Residual, Status, Store, VarId};
pub use tree::SearchTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FdError {
    #[error("empty domain")]
    EmptyDomain,
    #[error("unknown variable {0}")]
    UnknownVar(VarId),
    #[error("integer overflow during propagation")]
    Overflow,
}
