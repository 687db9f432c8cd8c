//! Exact algebraic substrate: rationals, graded coefficient rings, boundary
//! polynomials, parity quasi-polynomials and truncated Laurent series.

pub mod graded;
pub mod poly;
pub mod series;

pub use graded::{
    bernoulli, binomial, classical_zeta, factorial, rat, Family, Grade, GradedCoefficient,
    Monomial, Rational,
};
pub use poly::{BoundaryPolynomial, Parity, ParityQuasiPolynomial, VarMonomial};
pub use series::LaurentSeries;
