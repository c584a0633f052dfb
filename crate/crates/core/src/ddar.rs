//! Depth-dependent aspect ratio.
//!
//! A frontal-parallel shape with slit-basis extents `(kx, ky)` has base
//! aspect ratio `r_o = kx / ky`. Through the camera its image has
//!
//! ```text
//! r_i = z2 (z - z1) / (z1 (z - z2)) * r_o
//! ```
//!
//! which is invertible in `z`. Everything here is closed form on signed depths.

use crate::camera::XSlitCamera;
use crate::REL_EPS;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DdarError {
    #[error("depth {depth} is on a slit plane (aspect-ratio pole)")]
    AtSlitPole { depth: f64 },
    /// The camera is a pinhole; the aspect ratio is depth independent and equals `r_i`.
    #[error("pinhole-degenerate camera: aspect ratio is depth invariant (r_i = {r_i})")]
    DegenerateCamera { r_i: f64 },
    #[error("aspect ratio {r_i} is at or beyond the infinite-depth limit for r_o = {r_o}")]
    UnresolvableAr { r_i: f64, r_o: f64 },
    #[error("epsilon must be positive and at least 1/L, got {0}")]
    InvalidEpsilon(f64),
    #[error("non-finite input")]
    NonFinite,
}

impl DdarError {
    pub fn code(&self) -> &'static str {
        match self {
            DdarError::AtSlitPole { .. } => "at_slit_pole",
            DdarError::DegenerateCamera { .. } => "degenerate_camera",
            DdarError::UnresolvableAr { .. } => "unresolvable_ar",
            DdarError::InvalidEpsilon(_) => "invalid_epsilon",
            DdarError::NonFinite => "non_finite",
        }
    }
}

/// Base and projected aspect ratio of one shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspectRatioPair {
    pub r_o: f64,
    pub r_i: f64,
}

/// Smallest discernible aspect-ratio change, optionally tied to an image extent `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    epsilon: f64,
    image_extent: Option<u32>,
}

impl AnalysisConfig {
    pub fn new(epsilon: f64) -> Result<Self, DdarError> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(DdarError::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            image_extent: None,
        })
    }

    /// `epsilon = 1 / L`, the pixel-level bound without sub-pixel accuracy.
    pub fn from_image_extent(extent: u32) -> Result<Self, DdarError> {
        if extent == 0 {
            return Err(DdarError::InvalidEpsilon(f64::INFINITY));
        }
        Ok(Self {
            epsilon: 1.0 / extent as f64,
            image_extent: Some(extent),
        })
    }

    /// Explicit epsilon checked against the `1 / L` lower bound.
    pub fn with_extent(epsilon: f64, extent: u32) -> Result<Self, DdarError> {
        let base = Self::from_image_extent(extent)?;
        if !(epsilon >= base.epsilon) || !epsilon.is_finite() {
            return Err(DdarError::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            image_extent: Some(extent),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn image_extent(&self) -> Option<u32> {
        self.image_extent
    }
}

fn check_pole(z: f64, cam: &XSlitCamera) -> Result<(), DdarError> {
    if !z.is_finite() {
        return Err(DdarError::NonFinite);
    }
    let tol = REL_EPS * cam.depth_scale();
    if (z - cam.z1()).abs() <= tol || (z - cam.z2()).abs() <= tol {
        return Err(DdarError::AtSlitPole { depth: z });
    }
    Ok(())
}

/// Depth factor `F(z) = z2 (z - z1) / (z1 (z - z2))`, so that `r_i = F(z) * r_o`.
pub fn ar_factor(z: f64, cam: &XSlitCamera) -> Result<f64, DdarError> {
    check_pole(z, cam)?;
    let (z1, z2) = (cam.z1(), cam.z2());
    Ok(z2 * (z - z1) / (z1 * (z - z2)))
}

/// Projected aspect ratio of a shape with base ratio `r_o` at depth `z`.
///
/// A pinhole-degenerate camera yields [`DdarError::DegenerateCamera`] carrying `r_i = r_o`.
pub fn ar_forward(z: f64, r_o: f64, cam: &XSlitCamera) -> Result<f64, DdarError> {
    if !r_o.is_finite() {
        return Err(DdarError::NonFinite);
    }
    let f = ar_factor(z, cam)?;
    if cam.is_pinhole_degenerate() {
        return Err(DdarError::DegenerateCamera { r_i: r_o });
    }
    Ok(f * r_o)
}

fn ar_denominator(r_i: f64, r_o: f64, cam: &XSlitCamera) -> Result<f64, DdarError> {
    if !r_i.is_finite() || !r_o.is_finite() {
        return Err(DdarError::NonFinite);
    }
    let den = cam.z1() * r_i - cam.z2() * r_o;
    if den.abs() <= REL_EPS * (cam.z2() * r_o).abs() || den == 0.0 {
        return Err(DdarError::UnresolvableAr { r_i, r_o });
    }
    Ok(den)
}

/// Inverts [`ar_forward`]: `z = z1 z2 (r_i - r_o) / (z1 r_i - z2 r_o)`.
///
/// `r_i == r_o` on a non-degenerate camera returns `0`, the sensor plane.
pub fn depth_from_ar(r_i: f64, r_o: f64, cam: &XSlitCamera) -> Result<f64, DdarError> {
    let den = ar_denominator(r_i, r_o, cam)?;
    Ok(cam.z1() * cam.z2() * (r_i - r_o) / den)
}

/// `dz / dr_i`; its sign is fixed for a given camera and `r_o`.
pub fn dz_dri(r_i: f64, r_o: f64, cam: &XSlitCamera) -> Result<f64, DdarError> {
    let den = ar_denominator(r_i, r_o, cam)?;
    if cam.is_pinhole_degenerate() {
        return Ok(0.0);
    }
    let (z1, z2) = (cam.z1(), cam.z2());
    Ok(z1 * z2 * (z1 - z2) * r_o / (den * den))
}

/// Signed `dr_i / dz`.
pub fn dri_dz(z: f64, r_o: f64, cam: &XSlitCamera) -> Result<f64, DdarError> {
    check_pole(z, cam)?;
    if !r_o.is_finite() {
        return Err(DdarError::NonFinite);
    }
    if cam.is_pinhole_degenerate() {
        return Ok(0.0);
    }
    let (z1, z2) = (cam.z1(), cam.z2());
    let d = z - z2;
    Ok(z2 * (z1 - z2) * r_o / (z1 * d * d))
}

/// `|dr_i / dz|`.
pub fn sensitivity(z: f64, r_o: f64, cam: &XSlitCamera) -> Result<f64, DdarError> {
    dri_dz(z, r_o, cam).map(f64::abs)
}

/// Direction in which the projected aspect ratio moves as depth grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArTrend {
    Increasing,
    Decreasing,
    Constant,
}

/// Sign of `dr_i/dz`, which is the same at every depth off the poles.
pub fn ar_trend(r_o: f64, cam: &XSlitCamera) -> ArTrend {
    if cam.is_pinhole_degenerate() || r_o == 0.0 {
        return ArTrend::Constant;
    }
    let (z1, z2) = (cam.z1(), cam.z2());
    if z2 * (z1 - z2) * r_o / z1 > 0.0 {
        ArTrend::Increasing
    } else {
        ArTrend::Decreasing
    }
}

/// Limits of the projected aspect ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArRange {
    /// `r_i` as `z -> inf`: `(z2 / z1) r_o`. The minimum when `0 < z1 < z2`.
    pub r_i_min: f64,
    /// Depth at which `r_i` is unbounded (`z = z2`).
    pub pole_depth: f64,
}

pub fn ar_range(r_o: f64, cam: &XSlitCamera) -> ArRange {
    ArRange {
        r_i_min: cam.slit_ratio() * r_o,
        pole_depth: cam.z2(),
    }
}

/// Which closed form [`max_discernible_depth_with`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepthRangeFormula {
    /// `depth_from_ar((z2/z1) r_o + eps, r_o) = z2 [1 + (z2 - z1) r_o / (z1 eps)]`.
    #[default]
    Substitution,
    /// `(z2/z1) [1 + (z2 - z1) r_o / eps]`, kept for comparison output. Agrees with
    /// `Substitution` only when `z1 = 1`.
    PrintedCompat,
}

/// Depth whose aspect ratio is one `epsilon` away from the infinite-depth limit.
pub fn max_discernible_depth(
    r_o: f64,
    cfg: &AnalysisConfig,
    cam: &XSlitCamera,
) -> Result<f64, DdarError> {
    max_discernible_depth_with(r_o, cfg, cam, DepthRangeFormula::Substitution)
}

pub fn max_discernible_depth_with(
    r_o: f64,
    cfg: &AnalysisConfig,
    cam: &XSlitCamera,
    formula: DepthRangeFormula,
) -> Result<f64, DdarError> {
    if !r_o.is_finite() {
        return Err(DdarError::NonFinite);
    }
    let (z1, z2, eps) = (cam.z1(), cam.z2(), cfg.epsilon());
    Ok(match formula {
        DepthRangeFormula::Substitution => z2 * (1.0 + (z2 - z1) * r_o / (z1 * eps)),
        DepthRangeFormula::PrintedCompat => (z2 / z1) * (1.0 + (z2 - z1) * r_o / eps),
    })
}
