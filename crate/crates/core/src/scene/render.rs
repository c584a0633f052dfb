use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::{Primitive, Rgb, Scene, Shape, CURVE_SAMPLES};
use crate::camera::{CameraError, Point2, Point3, XSlitCamera};
use crate::inference::RectObservation;
use crate::math::{cos, sin};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationKind {
    /// Filled polygon (projected rectangle corners).
    Polygon,
    /// Closed boundary samples (projected circle).
    Ellipse,
    /// Open curve samples (projected segment or line).
    Polyline,
}

/// Projection of one primitive with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorObservation {
    pub id: u32,
    pub color: Rgb,
    pub kind: ObservationKind,
    pub points: Vec<Point2>,
    /// Depth at the first and last sample; equal for frontal primitives.
    pub depth: (f64, f64),
}

impl VectorObservation {
    /// Image side components of a projected rectangle, from corners 0->1 and 0->3.
    pub fn rect_sides(&self, cam: &XSlitCamera) -> Option<RectObservation> {
        if self.kind != ObservationKind::Polygon || self.points.len() != 4 {
            return None;
        }
        let p = &self.points;
        let side_u = cam
            .basis()
            .decompose([p[1].u - p[0].u, p[1].v - p[0].v])
            .ok()?;
        let side_v = cam
            .basis()
            .decompose([p[3].u - p[0].u, p[3].v - p[0].v])
            .ok()?;
        Some(RectObservation::new(side_u.a, side_v.b))
    }

    /// Ground-truth depth at sample `i`, linear along the sample index.
    pub fn depth_at(&self, i: usize) -> f64 {
        let n = self.points.len();
        if n < 2 || self.depth.0 == self.depth.1 {
            return self.depth.0;
        }
        let t = i as f64 / (n - 1) as f64;
        self.depth.0 + t * (self.depth.1 - self.depth.0)
    }

    /// Mean depth, used for painter's ordering.
    pub fn mean_depth(&self) -> f64 {
        0.5 * (self.depth.0 + self.depth.1)
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.points.len().max(1) as f64;
        let (su, sv) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(a, b), p| (a + p.u, b + p.v));
        Point2::new(su / n, sv / n)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RenderOutput {
    pub observations: Vec<VectorObservation>,
    /// Primitives that hit a slit plane, by id.
    pub failures: Vec<(u32, CameraError)>,
}

fn frontal(xy: [f64; 2], z: f64) -> Point3 {
    Point3::new(xy[0], xy[1], z)
}

pub(crate) fn rect_corners(center: [f64; 2], kx: f64, ky: f64, cam: &XSlitCamera) -> [[f64; 2]; 4] {
    let [v1, v2] = [cam.basis().v1(), cam.basis().v2()];
    let at = |s: f64, t: f64| {
        [
            center[0] + s * kx * v1[0] + t * ky * v2[0],
            center[1] + s * kx * v1[1] + t * ky * v2[1],
        ]
    };
    [at(-0.5, -0.5), at(0.5, -0.5), at(0.5, 0.5), at(-0.5, 0.5)]
}

pub(crate) fn circle_samples(center: [f64; 2], radius: f64) -> impl Iterator<Item = [f64; 2]> {
    (0..CURVE_SAMPLES).map(move |i| {
        let t = TAU * i as f64 / CURVE_SAMPLES as f64;
        [center[0] + radius * cos(t), center[1] + radius * sin(t)]
    })
}

pub(crate) fn line_endpoints(point: [f64; 2], angle: f64, length: f64) -> ([f64; 2], [f64; 2]) {
    let (dx, dy) = (0.5 * length * cos(angle), 0.5 * length * sin(angle));
    ([point[0] - dx, point[1] - dy], [point[0] + dx, point[1] + dy])
}

/// Exact projection of a single primitive.
pub fn render_primitive(
    prim: &Primitive,
    cam: &XSlitCamera,
) -> Result<VectorObservation, CameraError> {
    let (kind, points) = match prim.shape {
        Shape::FrontalRect {
            center,
            kappa_x,
            kappa_y,
            depth,
        } => {
            let pts = rect_corners(center, kappa_x, kappa_y, cam)
                .iter()
                .map(|&c| cam.project_point(frontal(c, depth)))
                .collect::<Result<Vec<_>, _>>()?;
            (ObservationKind::Polygon, pts)
        }
        Shape::FrontalCircle {
            center,
            radius,
            depth,
        } => {
            let pts = circle_samples(center, radius)
                .map(|c| cam.project_point(frontal(c, depth)))
                .collect::<Result<Vec<_>, _>>()?;
            (ObservationKind::Ellipse, pts)
        }
        Shape::Segment3 { start, end } => (
            ObservationKind::Polyline,
            cam.project_segment(start, end, CURVE_SAMPLES)?,
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
                cam.project_segment(frontal(a, depth), frontal(b, depth), CURVE_SAMPLES)?,
            )
        }
    };
    let depth = match prim.shape {
        Shape::Segment3 { start, end } => (start.z, end.z),
        other => other.depth_range(),
    };
    Ok(VectorObservation {
        id: prim.id,
        color: prim.color,
        kind,
        points,
        depth,
    })
}

/// Projects every primitive; failures are collected rather than aborting.
pub fn render_vector(scene: &Scene, cam: &XSlitCamera) -> RenderOutput {
    let mut out = RenderOutput::default();
    for prim in &scene.primitives {
        match render_primitive(prim, cam) {
            Ok(o) => out.observations.push(o),
            Err(e) => out.failures.push((prim.id, e)),
        }
    }
    out
}
