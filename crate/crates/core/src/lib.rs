//! Exact rational geometry for finitely supported points of `ℓ¹`, paired
//! with eventually vanishing sequences under the sup norm: hulls and linear
//! programs, weighted metrics and Hausdorff distances, exposure
//! certificates, a certified approximation of compact convex sets by hulls
//! of exposed points, and finite-prefix set limits.

pub mod error;
pub mod faces;
pub mod geometry;
pub mod hypermetrics;
pub mod io;
pub mod limits;
pub mod numerics;
pub mod poulsen;

pub use error::{Error, Result};
