//! Exact arithmetic substrate: big-rational scalars with an optional
//! quadratic extension, affine forms in the constants `C_i`, truncated
//! Laurent series, and exact linear solving.

pub mod affine;
pub mod scalar;
pub mod series;
pub mod solve;
