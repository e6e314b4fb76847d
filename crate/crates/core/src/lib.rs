//! Certified minimality for planar networks with triple junctions.
//!
//! The crate checks that a straight-segment network meets the local
//! 120° balance conditions, then goes further: it constructs and
//! machine-verifies two kinds of calibration certificates (a group-valued
//! current calibration and a paired partition calibration), compares
//! competitor networks against a certified reference, and cross-checks
//! small instances against a brute-force Steiner tree oracle. Geometry can
//! run in plain `f64` or exactly over ℚ[√3].

pub mod comparison;
pub mod currents;
pub mod error;
pub mod geometry;
pub mod json;
pub mod network;
pub mod offset;
pub mod partitions;
pub mod planar;
pub mod scalar;
pub mod svg;
pub mod steiner;

pub use error::{CoreError, Result};
