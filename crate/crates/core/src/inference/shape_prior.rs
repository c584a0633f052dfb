//! Joint depth and size recovery for `K` identical rectangles.
//!
//! Each rectangle `j` with image side components `(ku_j, kv_j)` gives
//!
//! ```text
//! ku_j * z_j + z2 * kx = z2 * ku_j
//! kv_j * z_j + z1 * ky = z1 * kv_j
//! ```
//!
//! in the unknowns `z_1..z_K, kx, ky`: `2K` equations, `K + 2` unknowns.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use super::InferenceError;
use crate::camera::XSlitCamera;

/// Singular values below `RANK_TOL * s_max` count as zero.
const RANK_TOL: f64 = 1e-10;

/// Image side components of one rectangle in the slit basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectObservation {
    pub kappa_u: f64,
    pub kappa_v: f64,
}

impl RectObservation {
    pub const fn new(kappa_u: f64, kappa_v: f64) -> Self {
        Self { kappa_u, kappa_v }
    }

    /// Projected aspect ratio `ku / kv`.
    pub fn ratio(&self) -> f64 {
        self.kappa_u / self.kappa_v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapePriorSolution {
    pub depths: Vec<f64>,
    pub kappa_x: f64,
    pub kappa_y: f64,
    /// Euclidean norm of the unscaled system residual.
    pub residual: f64,
}

impl ShapePriorSolution {
    /// Side lengths along `v1` and `v2` (unit vectors, so just the magnitudes).
    pub fn side_lengths(&self) -> (f64, f64) {
        (self.kappa_x.abs(), self.kappa_y.abs())
    }

    pub fn base_ratio(&self) -> f64 {
        self.kappa_x / self.kappa_y
    }
}

/// Unscaled design matrix and right-hand side.
pub fn shape_prior_system(obs: &[RectObservation], cam: &XSlitCamera) -> (DMatrix<f64>, DVector<f64>) {
    let k = obs.len();
    let (z1, z2) = (cam.z1(), cam.z2());
    let mut a = DMatrix::zeros(2 * k, k + 2);
    let mut b = DVector::zeros(2 * k);
    for (j, o) in obs.iter().enumerate() {
        a[(2 * j, j)] = o.kappa_u;
        a[(2 * j, k)] = z2;
        b[2 * j] = z2 * o.kappa_u;
        a[(2 * j + 1, j)] = o.kappa_v;
        a[(2 * j + 1, k + 1)] = z1;
        b[2 * j + 1] = z1 * o.kappa_v;
    }
    (a, b)
}

fn scaled_system(obs: &[RectObservation], cam: &XSlitCamera) -> (DMatrix<f64>, DVector<f64>) {
    let (mut a, mut b) = shape_prior_system(obs, cam);
    for (j, o) in obs.iter().enumerate() {
        for (row, kappa) in [(2 * j, o.kappa_u), (2 * j + 1, o.kappa_v)] {
            let s = 1.0 / kappa.abs().max(1.0);
            a.row_mut(row).scale_mut(s);
            b[row] *= s;
        }
    }
    (a, b)
}

fn numerical_rank(singular: &DVector<f64>) -> usize {
    let smax = singular.max();
    singular.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

/// Householder QR of the tall design matrix; the square `R` factor carries the
/// same singular values and is small enough for a reliable SVD.
fn triangular_factor(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = a.clone().qr();
    (qr.q(), qr.r())
}

fn rank_of(r: &DMatrix<f64>) -> usize {
    numerical_rank(&r.singular_values())
}

/// Numerical rank of the (row-scaled) design matrix.
pub fn shape_prior_rank(obs: &[RectObservation], cam: &XSlitCamera) -> usize {
    if obs.is_empty() {
        return 0;
    }
    let (a, _) = scaled_system(obs, cam);
    if a.nrows() < a.ncols() {
        return numerical_rank(&a.singular_values());
    }
    rank_of(&triangular_factor(&a).1)
}

/// Least-squares solution of the stacked system via SVD.
pub fn solve_shape_prior(
    obs: &[RectObservation],
    cam: &XSlitCamera,
) -> Result<ShapePriorSolution, InferenceError> {
    let k = obs.len();
    if k < 2 {
        return Err(InferenceError::TooFewObservations { needed: 2, got: k });
    }
    if obs.iter().any(|o| !o.kappa_u.is_finite() || !o.kappa_v.is_finite()) {
        return Err(InferenceError::NonFinite);
    }
    if cam.is_pinhole_degenerate() {
        return Err(InferenceError::DegenerateCamera);
    }
    let unknowns = k + 2;
    let (a, b) = scaled_system(obs, cam);
    let (q, r) = triangular_factor(&a);
    let rank = rank_of(&r);
    if rank < unknowns {
        return Err(InferenceError::RankDeficient { rank, unknowns });
    }
    let solve = |rhs: &DVector<f64>| {
        r.solve_upper_triangular(&(q.transpose() * rhs))
            .ok_or(InferenceError::RankDeficient { rank, unknowns })
    };
    let mut x = solve(&b)?;
    x += solve(&(&b - &a * &x))?;

    let (a0, b0) = shape_prior_system(obs, cam);
    let residual = (a0 * &x - b0).norm();
    Ok(ShapePriorSolution {
        depths: x.iter().take(k).copied().collect(),
        kappa_x: x[k],
        kappa_y: x[k + 1],
        residual,
    })
}
