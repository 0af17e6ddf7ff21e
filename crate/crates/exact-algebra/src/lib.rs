//! Exact arithmetic over the rationals: scalars, polynomials, rational
//! functions, matrices, Laurent polynomials and Birkhoff factorization.
//!
//! Nothing in this crate rounds. Equality is structural equality of reduced
//! representations.

pub mod birkhoff;
pub mod error;
pub mod interp;
pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod ratfunc;
pub mod roots;
pub mod scalar;
pub mod traits;

pub use birkhoff::{birkhoff_factorize, splitting_type, Birkhoff, SplittingType};
pub use error::AlgebraError;
pub use interp::{poly_interpolate_quadratic, Constraint};
pub use laurent::Laurent;
pub use matrix::{matrix_kernel, Matrix};
pub use poly::{qpoly, Poly, QPoly};
pub use ratfunc::RatFunc;
pub use roots::count_roots_with_multiplicity;
pub use scalar::{q, qi, Scalar};
pub use traits::{Field, Ring};
