//! Exact arithmetic for wreath products of cyclic association schemes and
//! their Terwilliger algebras, with brute-force oracles for their structure.
//!
//! Linear algebra is generic over [`Scalar`]: exact rationals, exact
//! cyclotomic numbers, and `f32`/`f64` with a tolerance.

pub mod cyclotomic;
pub mod error;
pub mod matrix;
pub mod report;
pub mod scalar;
pub mod scheme;
pub mod span;
pub mod structure;
pub mod terwilliger;
pub mod wreath;

pub use cyclotomic::CycloNum;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use report::CheckReport;
pub use scalar::Scalar;
pub use scheme::Scheme;
pub use span::{algebra_closure, SpanBasis};
pub use terwilliger::{make_context, TerwilligerContext};
pub use wreath::{cyclic_scheme, wreath_of_cyclics, wreath_product, Moduli, WreathIndex};

/// Exact rational scalars.
pub type Rational = num_rational::BigRational;
/// Matrices over `Q(zeta_N)`.
pub type ExactMatrix = Matrix<CycloNum>;
pub type RationalMatrix = Matrix<Rational>;
pub type FloatMatrix = Matrix<f64>;
/// Terwilliger context over the rationals.
pub type Context = TerwilligerContext<Rational>;
