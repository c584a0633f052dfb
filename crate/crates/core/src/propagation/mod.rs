//! Sparse-to-dense depth propagation.
//!
//! The image is segmented into superpixels, sparse depths are blended over the
//! region graph by geodesic distance, and the blend is regularised by a
//! truncated-linear MRF solved with alpha-expansion.

mod blend;
mod depth_map;
mod maxflow;
mod mrf;
mod superpixel;

pub use blend::{blend_initial, Anchor, AnchorSite, Blend, SparseDepth};
pub use depth_map::{expand_to_pixels, label_image, DepthMap};
pub use maxflow::FlowGraph;
pub use mrf::{
    solve_mrf, solve_mrf_from, solve_mrf_with, MrfEdge, MrfOptions, MrfProblem, MrfSolution,
};
pub use superpixel::{segment_superpixels, Region, RegionEdge, SuperpixelGraph};

use alloc::vec::Vec;

use crate::scene::RasterImage;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropagationError {
    #[error("image has no pixels")]
    EmptyImage,
    #[error("no depth anchors")]
    NoAnchors,
    #[error("anchor {index} lies outside the image or region range")]
    AnchorOutOfRange { index: usize },
    #[error("anchor {index} has a non-finite depth or confidence outside [0, 1]")]
    InvalidAnchor { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("invalid MRF problem: {0}")]
    InvalidProblem(&'static str),
    #[error("expected {expected} region values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

impl PropagationError {
    pub fn code(&self) -> &'static str {
        match self {
            PropagationError::EmptyImage => "empty_image",
            PropagationError::NoAnchors => "no_anchors",
            PropagationError::AnchorOutOfRange { .. } => "anchor_out_of_range",
            PropagationError::InvalidAnchor { .. } => "invalid_anchor",
            PropagationError::InvalidParameter(_) => "invalid_parameter",
            PropagationError::InvalidProblem(_) => "invalid_problem",
            PropagationError::LengthMismatch { .. } => "length_mismatch",
        }
    }
}

/// Tunables of [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    /// Segmentation scale `k`; larger values give larger regions.
    pub k: f64,
    pub min_size: usize,
    /// Geodesic blending length, 8-bit colour units.
    pub sigma_g: f64,
    /// Colour similarity scale of the smoothness weights, 8-bit colour units.
    pub sigma_c: f64,
    pub lambda: f64,
    /// Smoothness truncation as a fraction of the label span.
    pub truncation: f64,
    pub n_labels: usize,
    /// Restart the MRF search from every constant labelling.
    pub mrf_restarts: bool,
    /// Relative padding of the anchor depth range when placing labels.
    pub label_padding: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            k: 300.0,
            min_size: 20,
            sigma_g: 10.0,
            sigma_c: 15.0,
            lambda: 0.5,
            truncation: 0.2,
            n_labels: 64,
            mrf_restarts: true,
            label_padding: 0.1,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<(), PropagationError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.k) {
            return Err(PropagationError::InvalidParameter("k must be positive"));
        }
        if !positive(self.sigma_g) || !positive(self.sigma_c) {
            return Err(PropagationError::InvalidParameter("sigmas must be positive"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(PropagationError::InvalidParameter("lambda must be non-negative"));
        }
        if !(self.truncation > 0.0) {
            return Err(PropagationError::InvalidParameter("truncation must be positive"));
        }
        if self.n_labels < 2 {
            return Err(PropagationError::InvalidParameter("need at least two labels"));
        }
        if !(self.label_padding.is_finite() && self.label_padding >= 0.0) {
            return Err(PropagationError::InvalidParameter("label padding must be non-negative"));
        }
        Ok(())
    }
}

/// `n` depths uniformly spaced over `[lo, hi]` widened by `padding` of the span.
/// A zero span is widened by `padding` of the depth itself.
pub fn depth_labels(lo: f64, hi: f64, n: usize, padding: f64) -> Vec<f64> {
    let span = hi - lo;
    let pad = if span > 0.0 {
        padding * span
    } else {
        (padding * lo.abs()).max(1e-9)
    };
    let (a, b) = (lo - pad, hi + pad);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Everything produced by one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub graph: SuperpixelGraph,
    pub blend: Blend,
    pub problem: MrfProblem,
    pub solution: MrfSolution,
    pub depth: DepthMap,
}

/// Segments `image`, blends `sparse` over the regions and solves the MRF.
pub fn propagate(
    image: &RasterImage,
    sparse: &SparseDepth,
    params: &PropagationParams,
) -> Result<Propagation, PropagationError> {
    params.validate()?;
    let graph = segment_superpixels(image, params.k, params.min_size)?;
    let blend = blend_initial(&graph, sparse, params.sigma_g)?;
    let (lo, hi) = sparse
        .anchors
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
            (lo.min(a.depth), hi.max(a.depth))
        });
    let labels = depth_labels(lo, hi, params.n_labels, params.label_padding);
    let span = labels[labels.len() - 1] - labels[0];
    let problem = MrfProblem::from_graph(
        &graph,
        &blend,
        labels,
        params.lambda,
        params.sigma_c,
        params.truncation * span,
    )?;
    let options = MrfOptions {
        constant_restarts: params.mrf_restarts,
        ..MrfOptions::default()
    };
    let solution = solve_mrf_with(&problem, &options);
    let depth = expand_to_pixels(&graph, &solution.values)?;
    Ok(Propagation {
        graph,
        blend,
        problem,
        solution,
        depth,
    })
}
