//! Depth solvers that need no known base aspect ratio.
//!
//! * [`shape_prior`]: several rectangles of one unknown size.
//! * [`equal_distance`]: shapes of one unknown aspect ratio, evenly spaced in depth.
//! * [`slope`] and [`lines`]: frontal-parallel lines whose image slope encodes depth.

pub mod equal_distance;
pub mod lines;
pub mod shape_prior;
pub mod slope;

use alloc::vec::Vec;

use crate::camera::CameraError;
use crate::ddar::DdarError;

pub use equal_distance::{solve_equal_distance_prior, EqualDistanceSolution};
pub use lines::{
    classify_line_groups, ClassifiedLine, LineClassification, LineObs, ManhattanDirections,
    ManhattanGroup, UnclassifiedLine, UnclassifiedReason,
};
pub use shape_prior::{
    shape_prior_rank, shape_prior_system, solve_shape_prior, RectObservation, ShapePriorSolution,
};
pub use slope::{
    angle_to_slope, depth_from_slope, normalize_angle, slope_to_angle, slope_to_base_ratio,
    slope_to_base_ratio_printed,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InferenceError {
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("design matrix has rank {rank} < {unknowns} unknowns")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error("pinhole-degenerate camera: depth is not recoverable from aspect ratios")]
    DegenerateCamera,
    #[error("observations {0} and {1} coincide")]
    IndistinctObservations(usize, usize),
    #[error("no sign change of the spacing residual in the feasible r_o interval")]
    NoRootInBracket,
    #[error("spacing residual has {} roots", .0.len())]
    AmbiguousRoot(Vec<f64>),
    #[error("direction is parallel to a slit")]
    ParallelToSlit,
    #[error("non-finite observation")]
    NonFinite,
    #[error(transparent)]
    Ddar(#[from] DdarError),
    #[error(transparent)]
    Camera(#[from] CameraError),
}

impl InferenceError {
    pub fn code(&self) -> &'static str {
        match self {
            InferenceError::TooFewObservations { .. } => "too_few_observations",
            InferenceError::RankDeficient { .. } => "rank_deficient",
            InferenceError::DegenerateCamera => "degenerate_camera",
            InferenceError::IndistinctObservations(..) => "indistinct_observations",
            InferenceError::NoRootInBracket => "no_root_in_bracket",
            InferenceError::AmbiguousRoot(_) => "ambiguous_root",
            InferenceError::ParallelToSlit => "parallel_to_slit",
            InferenceError::NonFinite => "non_finite",
            InferenceError::Ddar(e) => e.code(),
            InferenceError::Camera(e) => e.code(),
        }
    }

    /// True for failures of the numerics rather than of the input shape.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            InferenceError::RankDeficient { .. }
                | InferenceError::NoRootInBracket
                | InferenceError::AmbiguousRoot(_)
                | InferenceError::Ddar(DdarError::UnresolvableAr { .. })
        )
    }
}
