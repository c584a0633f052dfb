//! Crossed-slit (XSlit) camera geometry.
//!
//! Exact projection through two slits, the depth-dependent aspect ratio and
//! slope calculus that follows from it, depth solvers built on repeated
//! shapes and parallel lines, synthetic scene rendering, and dense depth
//! propagation over superpixels with a graph-cut MRF.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod camera;
pub mod ddar;
pub mod inference;
pub mod math;
pub mod propagation;
pub mod scene;

pub use camera::{CameraError, Point2, Point3, SlitBasis, SlitCoords, XSlitCamera};

/// Relative tolerance for every geometric degeneracy test.
pub const REL_EPS: f64 = 1e-12;
