//! Weierstrass curves over the rationals: invariants, reduction, group law,
//! division polynomials, rational torsion, periods and elliptic logarithms.

pub mod curve;
pub mod division;
pub mod periods;
pub mod point;
pub mod torsion;

pub use curve::{BadPrime, ReductionType, WeierstrassCurve};
pub use division::{division_polynomials, primitive_division_polynomials, DivisionPolynomialSet};
pub use periods::{elliptic_log, periods_and_log, PeriodLattice};
pub use point::CurvePoint;
pub use torsion::rational_torsion;
