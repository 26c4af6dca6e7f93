//! Verification lab for Osserman and conformally Osserman curvature algebra.
//!
//! Clifford systems induce curvature tensors whose Jacobi spectra are checked
//! numerically; the conformal formulas around the rank-one models are
//! evaluated directly and cross-checked against finite-difference curvature
//! of explicit metrics.

pub mod clifford;
pub mod conformal;
pub mod curvature;
pub mod error;
pub mod json;
pub mod geodiff;
pub mod numkit;
pub mod octonion;
pub mod verify;

pub use error::{LabError, Result};
