//! Exact and certified-numeric tools for studying S-integral torsion points
//! on the multiplicative group and on elliptic curves over the rationals.

pub mod arith;
pub mod dd;
pub mod elliptic;
pub mod equidist;
pub mod error;
pub mod heights;
pub mod circle;
pub mod mulgroup;
pub mod ser;

pub use error::{LabError, Result};
