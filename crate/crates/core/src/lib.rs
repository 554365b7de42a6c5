pub mod bench;
pub mod fd;
pub mod lang;
pub mod lra;
pub mod modeling;
pub mod rational;

/// Exact arbitrary-precision rational.
pub type Rat = num_rational::BigRational;
/// Linear system over exact rationals.
pub type RatSystem = lra::LinSystem<Rat>;
pub type RatConstraint = lra::LinConstraint<Rat>;
pub type RatExpr = lra::LinExpr<Rat>;
