//! Exact integer, rational and polynomial arithmetic.

pub mod algebraic;
pub mod cyclotomic;
pub mod factor;
pub mod functions;
pub mod modp;
pub mod poly;
pub mod resultant;
pub mod roots;
pub mod zfactor;

pub use algebraic::{AlgebraicNumber, Place, PlaceSet};
pub use cyclotomic::{cyclotomic, cyclotomic_homogeneous};
pub use factor::{factor, factor_u64, factor_with_budget, PartialFactorization, PrimeFactorization};
pub use functions::{arith_functions, ArithValues};
pub use poly::IntPolynomial;
pub use resultant::resultant;
pub use roots::complex_roots;
