//! Frames from a pinhole camera translating along x at constant speed, the
//! raw material for stitched XSlit panoramas.

use alloc::vec::Vec;

use super::raster::{rasterize, ImageSpec, RasterImage};
use super::render::{circle_samples, line_endpoints, ObservationKind, VectorObservation};
use super::{Scene, SceneError, Shape, CURVE_SAMPLES};
use crate::camera::{Point2, Point3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinholeSweep {
    /// Distance from the pinhole to its image plane, scene units.
    pub focal: f64,
    /// Camera translation along x between consecutive frames.
    pub step: f64,
    pub frames: usize,
    pub image: ImageSpec,
}

impl PinholeSweep {
    fn project(&self, frame: usize, p: Point3) -> Option<Point2> {
        if !(p.z > 0.0) {
            return None;
        }
        let cx = self.step * frame as f64;
        Some(Point2::new(self.focal * (p.x - cx) / p.z, self.focal * p.y / p.z))
    }

    /// Perspective projection of the scene as seen from frame `frame`.
    /// Primitives with points at or behind the camera plane are skipped.
    pub fn frame_observations(&self, scene: &Scene, frame: usize) -> Vec<VectorObservation> {
        let mut out = Vec::new();
        for prim in &scene.primitives {
            let (kind, pts3): (ObservationKind, Vec<Point3>) = match prim.shape {
                Shape::FrontalRect {
                    center,
                    kappa_x,
                    kappa_y,
                    depth,
                } => {
                    // sides along the image axes in the pinhole frames
                    let (hx, hy) = (0.5 * kappa_x, 0.5 * kappa_y);
                    let c = |sx: f64, sy: f64| Point3::new(center[0] + sx * hx, center[1] + sy * hy, depth);
                    (
                        ObservationKind::Polygon,
                        alloc::vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)],
                    )
                }
                Shape::FrontalCircle {
                    center,
                    radius,
                    depth,
                } => (
                    ObservationKind::Ellipse,
                    circle_samples(center, radius)
                        .map(|c| Point3::new(c[0], c[1], depth))
                        .collect(),
                ),
                Shape::Segment3 { start, end } => (
                    ObservationKind::Polyline,
                    (0..CURVE_SAMPLES)
                        .map(|i| start.lerp(&end, i as f64 / (CURVE_SAMPLES - 1) as f64))
                        .collect(),
                ),
                Shape::FrontalLine {
                    point,
                    direction_angle,
                    depth,
                    length,
                } => {
                    let (a, b) = line_endpoints(point, direction_angle, length);
                    (
                        ObservationKind::Polyline,
                        alloc::vec![Point3::new(a[0], a[1], depth), Point3::new(b[0], b[1], depth)],
                    )
                }
            };
            let points: Option<Vec<Point2>> = pts3.iter().map(|&p| self.project(frame, p)).collect();
            if let Some(points) = points {
                let (z0, z1) = (pts3[0].z, pts3[pts3.len() - 1].z);
                out.push(VectorObservation {
                    id: prim.id,
                    color: prim.color,
                    kind,
                    points,
                    depth: (z0, z1),
                });
            }
        }
        out
    }

    pub fn render_frames(&self, scene: &Scene) -> Result<Vec<RasterImage>, SceneError> {
        let spec = self.image.with_background(scene.background);
        (0..self.frames)
            .map(|f| rasterize(&self.frame_observations(scene, f), &spec).map(|r| r.image))
            .collect()
    }
}
