use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{FromPrimitive, Signed};

/// An exact ordered field: the coefficient type of linear systems.
///
/// Fourier-Motzkin elimination needs exact division and total ordering, so
/// floating-point types are deliberately not implementors.
pub trait Field: Clone + Ord + Hash + Debug + Display + Signed + FromPrimitive {
    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn mid(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()) / Self::two()
    }
}

impl<T> Field for T where T: Clone + Ord + Hash + Debug + Display + Signed + FromPrimitive {}
