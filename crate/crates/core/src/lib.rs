//! Mesh-free option pricing with radial basis function generated finite
//! differences (RBF-FD).
//!
//! The crate is organised bottom-up:
//!
//! * [`nodegen`] builds node layouts (equidistant, sinh-adapted and smoothly
//!   varying advancing-front layouts) on scaled 2D domains.
//! * [`stencils`] finds nearest neighbours with a k-d tree and forms stencils.
//! * [`rbffd`] computes polyharmonic spline + polynomial differentiation weights
//!   and assembles the sparse differentiation matrix.
//! * [`models`] describes the pricing problems (basket options under
//!   Black–Scholes–Merton, European calls under Heston).
//! * [`linalg`] holds the dense and sparse linear algebra (LU, ILU(0), GMRES,
//!   1-norm condition estimation).
//! * [`solver`] marches the semi-discrete system in time with constant-β₀ BDF2,
//!   including operator splitting for American exercise.

pub mod error;
pub mod linalg;
pub mod models;
pub mod nodegen;
pub mod rbffd;
pub mod solver;
pub mod stencils;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

#[inline]
pub(crate) fn dist2(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

#[inline]
pub(crate) fn dist(a: &Point, b: &Point) -> f64 {
    dist2(a, b).sqrt()
}
