//! Symbolic-numeric toolkit for the ODE reductions of twisting type N
//! Einstein spaces: exact series, Puiseux expansions, weak Painlevé
//! analysis, adaptive integration, Cartan CR invariants, and metric export.

pub mod cr_invariants;
pub mod exact_series;
pub mod export;
pub mod jet;
pub mod jet2;
pub mod metric;
pub mod numeric_ode;
pub mod painleve_analysis;
pub mod poly;
pub mod puiseux_engine;
pub mod scalar;

pub use num_complex::Complex64;
pub use num_rational::BigRational;

/// Exact rational scalar.
pub type Rational = BigRational;
/// Exact Gaussian rational.
pub type ComplexRational = num_complex::Complex<BigRational>;
/// Univariate jet in `z` with complex coefficients.
pub type ZJet = jet::Jet<Complex64>;
/// Bivariate jet in `(ζ, ζ̄)` with complex coefficients.
pub type CJet2 = jet2::Jet2<Complex64>;
/// Exact univariate jet.
pub type RationalJet = jet::Jet<BigRational>;
/// Polynomial over the rationals.
pub type RationalPoly = poly::Poly<BigRational>;
