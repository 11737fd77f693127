//! Exact formal Dirichlet series, difference-differential polynomials and
//! obstruction certificates.

pub mod analysis;
pub mod coefficient;
pub mod diff_poly;
pub mod error;
pub mod exponent;
pub mod fixtures;
pub mod formal_eval;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod numtheory;
pub mod obstruction;
pub mod parse;
pub mod rational;
pub mod real;
pub mod series;
pub mod symbols;
pub mod transforms;
pub mod wronskian;

pub use coefficient::{Coefficient, Monomial, XPoly};
pub use error::{Error, Result};
pub use exponent::Exponent;
pub use rational::Q;
pub use real::Interval;
pub use symbols::{BasisEntry, PrecisionTie, Symbol, SymbolBasis, SymbolValue};
pub use series::{FormalSeries, Horizon, Leading};
pub use diff_poly::{DiffIndeterminate, DiffMonomial, DiffPolynomial};
