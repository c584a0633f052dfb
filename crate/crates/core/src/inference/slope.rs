//! Depth-dependent slope of frontal-parallel lines.
//!
//! A frontal line is the diagonal of a parallelogram with sides along the
//! slits, so its direction has a base ratio `r_o = a / b` of slit-basis
//! components. Its image direction gives `r_i` the same way and depth follows
//! from the aspect-ratio inverse.

use core::f64::consts::PI;

use super::InferenceError;
use crate::camera::XSlitCamera;
use crate::ddar::depth_from_ar;
use crate::math::{atan2, cos, sin};
use crate::REL_EPS;

/// Maps any angle onto `[0, pi)`; lines are undirected.
pub fn normalize_angle(phi: f64) -> f64 {
    let r = phi % PI;
    let r = if r < 0.0 { r + PI } else { r };
    if r >= PI {
        0.0
    } else {
        r
    }
}

pub fn slope_to_angle(s: f64) -> f64 {
    normalize_angle(atan2(s, 1.0))
}

/// `tan(phi)`; infinite for vertical lines.
pub fn angle_to_slope(phi: f64) -> f64 {
    let phi = normalize_angle(phi);
    if (phi - PI / 2.0).abs() <= REL_EPS {
        f64::INFINITY
    } else {
        sin(phi) / cos(phi)
    }
}

/// Ratio of the slit-basis components of the unit direction `(cos phi, sin phi)`.
pub fn slope_to_base_ratio(direction_angle: f64, cam: &XSlitCamera) -> Result<f64, InferenceError> {
    if !direction_angle.is_finite() {
        return Err(InferenceError::NonFinite);
    }
    let c = cam
        .basis()
        .decompose([cos(direction_angle), sin(direction_angle)])?;
    if c.a.abs() < REL_EPS || c.b.abs() < REL_EPS {
        return Err(InferenceError::ParallelToSlit);
    }
    Ok(c.a / c.b)
}

/// `(sin t2 - s sin t1) / (s cos t1 - cos t2)` evaluated literally.
///
/// Agrees with [`slope_to_base_ratio`] for `theta1 = 0, theta2 = pi/2` only; kept
/// for comparison output.
pub fn slope_to_base_ratio_printed(slope: f64, cam: &XSlitCamera) -> Result<f64, InferenceError> {
    if !slope.is_finite() {
        return Err(InferenceError::NonFinite);
    }
    let (t1, t2) = (cam.theta1(), cam.theta2());
    let num = sin(t2) - slope * sin(t1);
    let den = slope * cos(t1) - cos(t2);
    if den.abs() < REL_EPS || num.abs() < REL_EPS {
        return Err(InferenceError::ParallelToSlit);
    }
    Ok(num / den)
}

/// Depth of a frontal line whose 3D direction is `true_angle` and whose image
/// direction is `observed_angle`.
pub fn depth_from_slope(
    observed_angle: f64,
    true_angle: f64,
    cam: &XSlitCamera,
) -> Result<f64, InferenceError> {
    let r_i = slope_to_base_ratio(observed_angle, cam)?;
    let r_o = slope_to_base_ratio(true_angle, cam)?;
    Ok(depth_from_ar(r_i, r_o, cam)?)
}
