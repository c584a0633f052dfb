//! Crossed-slit projection.
//!
//! The sensor is the plane `z = 0`. Two slits lie in the planes `z = z1` and
//! `z = z2`, each through the z-axis, at angles `theta1` and `theta2` to the
//! x-axis. Every ray reaching the sensor crosses both slits.
//!
//! Writing the x-y part of a point in the slit basis `(v1, v2)` turns the
//! projection into two independent pinhole-like scalings:
//!
//! ```text
//! (x, y)  = kx * v1 + ky * v2
//! ku      = -z2 / (z - z2) * kx
//! kv      = -z1 / (z - z1) * ky
//! p'      = ku * v1 + kv * v2
//! ```
//!
//! Depths are signed and no ordering between `z1` and `z2` is imposed.

use alloc::vec::Vec;

use crate::math::{cos, sin};
use crate::REL_EPS;

/// A point in the scene.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Linear interpolation `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point3, t: f64) -> Point3 {
        Point3 {
            x: self.x + t * (other.x - self.x),
            y: self.y + t * (other.y - self.y),
            z: self.z + t * (other.z - self.z),
        }
    }
}

/// A point on the sensor plane, in scene units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub u: f64,
    pub v: f64,
}

impl Point2 {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum CameraError {
    #[error("slits are parallel (sin(theta2 - theta1) = {det:e})")]
    ParallelSlits { det: f64 },
    #[error("slit basis is degenerate (det = {det:e})")]
    DegenerateBasis { det: f64 },
    #[error("slits share depth {depth}; use XSlitCamera::pinhole_degenerate for a pinhole")]
    CoincidentSlits { depth: f64 },
    #[error("slit depth must be nonzero (slit on the sensor plane)")]
    SlitOnSensor,
    #[error("non-finite camera or point parameter")]
    NonFinite,
    #[error("point at depth {depth} lies on a slit plane")]
    OnSlitPlane { depth: f64, t: Option<f64> },
    #[error("segment sampling needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
}

impl CameraError {
    pub fn code(&self) -> &'static str {
        match self {
            CameraError::ParallelSlits { .. } => "parallel_slits",
            CameraError::DegenerateBasis { .. } => "degenerate_basis",
            CameraError::CoincidentSlits { .. } => "coincident_slits",
            CameraError::SlitOnSensor => "slit_on_sensor",
            CameraError::NonFinite => "non_finite",
            CameraError::OnSlitPlane { .. } => "on_slit_plane",
            CameraError::TooFewSamples(_) => "too_few_samples",
        }
    }
}

/// Coefficients of a 2-vector in the slit basis: `xy = a * v1 + b * v2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlitCoords {
    pub a: f64,
    pub b: f64,
}

impl SlitCoords {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }
}

/// Unit direction vectors of the two slits projected onto the sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitBasis {
    v1: [f64; 2],
    v2: [f64; 2],
    det: f64,
}

impl SlitBasis {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self, CameraError> {
        if !theta1.is_finite() || !theta2.is_finite() {
            return Err(CameraError::NonFinite);
        }
        let v1 = [cos(theta1), sin(theta1)];
        let v2 = [cos(theta2), sin(theta2)];
        // sin(theta2 - theta1) computed from the vectors so it matches decompose exactly
        let det = v1[0] * v2[1] - v1[1] * v2[0];
        if det.abs() <= REL_EPS {
            return Err(CameraError::ParallelSlits { det });
        }
        Ok(Self { v1, v2, det })
    }

    pub fn v1(&self) -> [f64; 2] {
        self.v1
    }

    pub fn v2(&self) -> [f64; 2] {
        self.v2
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Solves `xy = a * v1 + b * v2` by Cramer's rule.
    pub fn decompose(&self, xy: [f64; 2]) -> Result<SlitCoords, CameraError> {
        if self.det.abs() <= REL_EPS {
            return Err(CameraError::DegenerateBasis { det: self.det });
        }
        let [x, y] = xy;
        let a = (x * self.v2[1] - y * self.v2[0]) / self.det;
        let b = (y * self.v1[0] - x * self.v1[1]) / self.det;
        Ok(SlitCoords { a, b })
    }

    pub fn recompose(&self, c: SlitCoords) -> [f64; 2] {
        [
            c.a * self.v1[0] + c.b * self.v2[0],
            c.a * self.v1[1] + c.b * self.v2[1],
        ]
    }
}

/// Free-function form of [`SlitBasis::decompose`].
pub fn decompose(xy: [f64; 2], basis: &SlitBasis) -> Result<SlitCoords, CameraError> {
    basis.decompose(xy)
}

/// A crossed-slit camera with slit depths `z1`, `z2` and angles `theta1`, `theta2` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XSlitCamera {
    z1: f64,
    z2: f64,
    theta1: f64,
    theta2: f64,
    basis: SlitBasis,
}

impl XSlitCamera {
    /// Builds a camera with distinct slit depths.
    pub fn new(z1: f64, z2: f64, theta1: f64, theta2: f64) -> Result<Self, CameraError> {
        let cam = Self::build(z1, z2, theta1, theta2)?;
        if cam.is_pinhole_degenerate() {
            return Err(CameraError::CoincidentSlits { depth: z1 });
        }
        Ok(cam)
    }

    /// Parallel-orthogonal camera: `theta1 = 0`, `theta2 = pi/2`.
    pub fn po_xslit(z1: f64, z2: f64) -> Result<Self, CameraError> {
        Self::new(z1, z2, 0.0, core::f64::consts::FRAC_PI_2)
    }

    /// Both slits at depth `f`: an ordinary pinhole at `(0, 0, f)`.
    pub fn pinhole_degenerate(f: f64, theta1: f64, theta2: f64) -> Result<Self, CameraError> {
        Self::build(f, f, theta1, theta2)
    }

    fn build(z1: f64, z2: f64, theta1: f64, theta2: f64) -> Result<Self, CameraError> {
        if !z1.is_finite() || !z2.is_finite() {
            return Err(CameraError::NonFinite);
        }
        if z1 == 0.0 || z2 == 0.0 {
            return Err(CameraError::SlitOnSensor);
        }
        let basis = SlitBasis::new(theta1, theta2)?;
        Ok(Self {
            z1,
            z2,
            theta1,
            theta2,
            basis,
        })
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn z2(&self) -> f64 {
        self.z2
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn basis(&self) -> &SlitBasis {
        &self.basis
    }

    /// Scale used by every slit-depth tolerance test.
    pub fn depth_scale(&self) -> f64 {
        self.z1.abs().max(self.z2.abs())
    }

    /// True when the slits share a depth, i.e. the camera is a pinhole.
    pub fn is_pinhole_degenerate(&self) -> bool {
        (self.z1 - self.z2).abs() <= REL_EPS * self.depth_scale()
    }

    /// `z2 / z1`, the aspect-ratio scaling as depth goes to infinity.
    pub fn slit_ratio(&self) -> f64 {
        self.z2 / self.z1
    }

    /// Lower end of the depth domain used for physical scene content:
    /// `(max(z1, z2, 0), inf)` holds no slit plane and no sensor.
    pub fn depth_floor(&self) -> f64 {
        self.z1.max(self.z2).max(0.0)
    }

    fn check_depth(&self, z: f64, t: Option<f64>) -> Result<(), CameraError> {
        let tol = REL_EPS * self.depth_scale();
        if (z - self.z1).abs() <= tol || (z - self.z2).abs() <= tol {
            return Err(CameraError::OnSlitPlane { depth: z, t });
        }
        Ok(())
    }

    /// Per-component scale factors `(-z2/(z-z2), -z1/(z-z1))` at depth `z`.
    pub fn component_scales(&self, z: f64) -> Result<(f64, f64), CameraError> {
        if !z.is_finite() {
            return Err(CameraError::NonFinite);
        }
        self.check_depth(z, None)?;
        Ok((-self.z2 / (z - self.z2), -self.z1 / (z - self.z1)))
    }

    /// Projects slit-basis coordinates at depth `z` to sensor slit-basis coordinates.
    pub fn project_coords(&self, c: SlitCoords, z: f64) -> Result<SlitCoords, CameraError> {
        let (su, sv) = self.component_scales(z)?;
        Ok(SlitCoords::new(su * c.a, sv * c.b))
    }

    pub fn project_point(&self, p: Point3) -> Result<Point2, CameraError> {
        if !p.is_finite() {
            return Err(CameraError::NonFinite);
        }
        let k = self.basis.decompose([p.x, p.y])?;
        let q = self.project_coords(k, p.z)?;
        let [u, v] = self.basis.recompose(q);
        Ok(Point2 { u, v })
    }

    /// Projects `samples` uniformly spaced points of the segment `a -> b`.
    ///
    /// Segments of constant depth map to straight lines; others map to curves.
    pub fn project_segment(
        &self,
        a: Point3,
        b: Point3,
        samples: usize,
    ) -> Result<Vec<Point2>, CameraError> {
        if samples < 2 {
            return Err(CameraError::TooFewSamples(samples));
        }
        let last = (samples - 1) as f64;
        (0..samples)
            .map(|i| {
                let t = i as f64 / last;
                let p = a.lerp(&b, t);
                self.project_point(p).map_err(|e| match e {
                    CameraError::OnSlitPlane { depth, .. } => {
                        CameraError::OnSlitPlane { depth, t: Some(t) }
                    }
                    other => other,
                })
            })
            .collect()
    }
}

/// Free-function form of [`XSlitCamera::project_point`].
pub fn project_point(p: Point3, cam: &XSlitCamera) -> Result<Point2, CameraError> {
    cam.project_point(p)
}

pub fn is_pinhole_degenerate(cam: &XSlitCamera) -> bool {
    cam.is_pinhole_degenerate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn decompose_orthonormal() {
        let basis = SlitBasis::new(0.0, FRAC_PI_2).unwrap();
        let c = basis.decompose([1.0, 1.0]).unwrap();
        assert!(close(c.a, 1.0, 1e-15) && close(c.b, 1.0, 1e-15));
        assert_eq!(basis.decompose([0.0, 0.0]).unwrap(), SlitCoords::new(0.0, 0.0));
    }

    #[test]
    fn decompose_rotated_basis() {
        let basis = SlitBasis::new(FRAC_PI_4, 3.0 * FRAC_PI_4).unwrap();
        let c = basis.decompose([1.0, 1.0]).unwrap();
        assert!(close(c.a, SQRT_2, 1e-14), "{c:?}");
        assert!(c.b.abs() < 1e-14, "{c:?}");
        let back = basis.recompose(c);
        assert!(close(back[0], 1.0, 1e-14) && close(back[1], 1.0, 1e-14));
    }

    #[test]
    fn parallel_slits_rejected() {
        assert!(matches!(
            SlitBasis::new(0.3, 0.3 + core::f64::consts::PI),
            Err(CameraError::ParallelSlits { .. })
        ));
        assert!(matches!(
            XSlitCamera::new(1.0, 2.0, 1.0, 1.0),
            Err(CameraError::ParallelSlits { .. })
        ));
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            XSlitCamera::new(1.0, 1.0, 0.0, FRAC_PI_2),
            Err(CameraError::CoincidentSlits { .. })
        ));
        assert_eq!(
            XSlitCamera::new(0.0, 1.0, 0.0, FRAC_PI_2),
            Err(CameraError::SlitOnSensor)
        );
        assert_eq!(
            XSlitCamera::new(f64::NAN, 1.0, 0.0, FRAC_PI_2),
            Err(CameraError::NonFinite)
        );
    }

    #[test]
    fn project_reference_point() {
        let cam = XSlitCamera::po_xslit(1.0, 2.0).unwrap();
        let p = cam.project_point(Point3::new(1.0, 1.0, 4.0)).unwrap();
        assert!(close(p.u, -1.0, 1e-15), "{p:?}");
        assert!(close(p.v, -1.0 / 3.0, 1e-15), "{p:?}");
        let o = cam.project_point(Point3::new(0.0, 0.0, 5.0)).unwrap();
        assert_eq!((o.u.abs(), o.v.abs()), (0.0, 0.0));
    }

    #[test]
    fn pinhole_axis_point() {
        let cam = XSlitCamera::pinhole_degenerate(1.0, 0.0, FRAC_PI_2).unwrap();
        let p = cam.project_point(Point3::new(0.0, 0.0, 7.0)).unwrap();
        assert_eq!((p.u.abs(), p.v.abs()), (0.0, 0.0));
    }

    #[test]
    fn on_slit_plane() {
        let cam = XSlitCamera::po_xslit(1.0, 2.0).unwrap();
        for z in [1.0, 2.0] {
            assert!(matches!(
                cam.project_point(Point3::new(0.5, 0.5, z)),
                Err(CameraError::OnSlitPlane { .. })
            ));
        }
        let err = cam
            .project_segment(Point3::new(0.0, 0.0, 0.5), Point3::new(1.0, 1.0, 1.5), 3)
            .unwrap_err();
        assert_eq!(err, CameraError::OnSlitPlane { depth: 1.0, t: Some(0.5) });
    }

    #[test]
    fn degeneracy_flag() {
        let theta = (0.0, FRAC_PI_2);
        assert!(XSlitCamera::pinhole_degenerate(1.0, theta.0, theta.1)
            .unwrap()
            .is_pinhole_degenerate());
        assert!(!XSlitCamera::po_xslit(1.0, 2.0).unwrap().is_pinhole_degenerate());
        assert!(!XSlitCamera::po_xslit(-3.2, -346.7).unwrap().is_pinhole_degenerate());
    }

    #[test]
    fn segment_edge_cases() {
        let cam = XSlitCamera::po_xslit(1.0, 2.0).unwrap();
        let p = Point3::new(0.3, -0.2, 6.0);
        let pts = cam.project_segment(p, p, 5).unwrap();
        assert!(pts.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(cam.project_segment(p, p, 1), Err(CameraError::TooFewSamples(1)));
    }
}
