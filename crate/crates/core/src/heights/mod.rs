//! Local and canonical heights, torsion denominators and integrality scans.

pub mod canonical;
pub mod cassels;
pub mod local;
pub mod scan;

pub use canonical::{canonical_height, torsion_invariance_check, CanonicalHeightReport, EllipticContext, TORSION_HEIGHT_TOL};
pub use cassels::{cassels_check, cassels_sweep, CasselsPart, CasselsReport, CasselsVerdict};
pub use local::{local_height_arch, local_height_nonarch, HeightMethod, LocalHeightReport, TateLocalData};
pub use scan::{
    s_integral_torsion_scan, torsion_average_series, CollisionKind, TorsionAverage, TorsionCollision,
    TorsionIntegralityVerdict,
};
