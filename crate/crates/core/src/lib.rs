//! Geodesics and homogenized metric of the two-valued chessboard medium.
//!
//! The plane is tiled by unit squares whose refractive index alternates
//! between 1 (light) and `beta > 1` (dark). The crate computes
//!
//! - Snell paths across layered strips ([`snell`]),
//! - the normalized length `l(t, β)`, its increments and the critical
//!   indices `β^c_k` ([`normlen`]),
//! - explicit geodesics between light vertices and a brute-force
//!   shortest-path oracle valid for every index ([`geodesic`]),
//! - the homogenized Finsler metric and its unit ball ([`homog`]).

pub mod error;
pub mod format;
pub mod geodesic;
pub mod homog;
pub mod normlen;
mod roots;
pub mod snell;
pub mod verify;

pub use error::{Error, Result};

/// A point of the plane, `[x, y]`.
pub type Point = [f64; 2];
