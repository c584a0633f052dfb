//! Synthetic frontal-parallel scenes rendered through an XSlit camera, and the
//! image measurements the depth solvers consume.

mod measure;
mod noise;
mod raster;
mod render;
pub mod scenes;
mod stitch;
mod sweep;

use alloc::string::String;
use alloc::vec::Vec;

use crate::camera::{CameraError, Point3, XSlitCamera};
use crate::inference::ManhattanDirections;
use crate::REL_EPS;

pub use measure::{fit_line, measure_ellipse_ar, LineFit};
pub use noise::{perturb, NoiseSpec};
pub use raster::{rasterize, ImageSpec, Pixels, Raster, RasterImage};
pub use render::{render_primitive, render_vector, ObservationKind, RenderOutput, VectorObservation};
pub use stitch::stitch_panorama;
pub use sweep::PinholeSweep;

/// Boundary samples per curve primitive.
pub const CURVE_SAMPLES: usize = 256;

pub type Rgb = [u8; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("primitive {id}: {reason}")]
    InvalidPrimitive { id: u32, reason: &'static str },
    #[error("need at least {needed} points, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("ellipse samples are degenerate")]
    DegenerateEllipse,
    #[error("points do not determine a line")]
    DegeneratePoints,
    #[error("no frames to stitch")]
    NoFrames,
    #[error("frame {frame} differs in size or pixel format from frame 0")]
    FrameMismatch { frame: usize },
    #[error("frame {frame}: column {column} out of range")]
    ColumnOutOfRange { frame: usize, column: i64 },
    #[error("image dimensions must be positive")]
    EmptyImage,
    #[error(transparent)]
    Camera(#[from] CameraError),
}

impl SceneError {
    pub fn code(&self) -> &'static str {
        match self {
            SceneError::InvalidPrimitive { .. } => "invalid_primitive",
            SceneError::TooFewSamples { .. } => "too_few_samples",
            SceneError::DegenerateEllipse => "degenerate_ellipse",
            SceneError::DegeneratePoints => "degenerate_points",
            SceneError::NoFrames => "no_frames",
            SceneError::FrameMismatch { .. } => "frame_mismatch",
            SceneError::ColumnOutOfRange { .. } => "column_out_of_range",
            SceneError::EmptyImage => "empty_image",
            SceneError::Camera(e) => e.code(),
        }
    }
}

/// Geometry of one scene primitive. Frontal shapes lie in the plane `z = depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Parallelogram with sides `kappa_x * v1` and `kappa_y * v2` centred at `center`.
    FrontalRect {
        center: [f64; 2],
        kappa_x: f64,
        kappa_y: f64,
        depth: f64,
    },
    FrontalCircle {
        center: [f64; 2],
        radius: f64,
        depth: f64,
    },
    Segment3 {
        start: Point3,
        end: Point3,
    },
    /// Segment of `length` centred at `point`, direction in radians.
    FrontalLine {
        point: [f64; 2],
        direction_angle: f64,
        depth: f64,
        length: f64,
    },
}

impl Shape {
    /// Nearest and farthest depth of the shape.
    pub fn depth_range(&self) -> (f64, f64) {
        match *self {
            Shape::FrontalRect { depth, .. }
            | Shape::FrontalCircle { depth, .. }
            | Shape::FrontalLine { depth, .. } => (depth, depth),
            Shape::Segment3 { start, end } => (start.z.min(end.z), start.z.max(end.z)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub id: u32,
    pub color: Rgb,
    pub shape: Shape,
    /// Rectangles sharing a group label have identical (unknown) size.
    pub group: Option<String>,
}

impl Primitive {
    pub fn new(id: u32, color: Rgb, shape: Shape) -> Self {
        Self {
            id,
            color,
            shape,
            group: None,
        }
    }

    pub fn in_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    pub fn validate(&self, cam: &XSlitCamera) -> Result<(), SceneError> {
        let invalid = |reason| SceneError::InvalidPrimitive { id: self.id, reason };
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self.shape {
            Shape::FrontalRect {
                center,
                kappa_x,
                kappa_y,
                depth,
            } => {
                if !finite(&[center[0], center[1], kappa_x, kappa_y, depth]) {
                    return Err(invalid("non-finite parameter"));
                }
                if kappa_x == 0.0 || kappa_y == 0.0 {
                    return Err(invalid("rectangle side is zero"));
                }
            }
            Shape::FrontalCircle {
                center,
                radius,
                depth,
            } => {
                if !finite(&[center[0], center[1], radius, depth]) {
                    return Err(invalid("non-finite parameter"));
                }
                if !(radius > 0.0) {
                    return Err(invalid("radius must be positive"));
                }
            }
            Shape::Segment3 { start, end } => {
                if !start.is_finite() || !end.is_finite() {
                    return Err(invalid("non-finite parameter"));
                }
            }
            Shape::FrontalLine {
                point,
                direction_angle,
                depth,
                length,
            } => {
                if !finite(&[point[0], point[1], direction_angle, depth, length]) {
                    return Err(invalid("non-finite parameter"));
                }
                if !(length > 0.0) {
                    return Err(invalid("length must be positive"));
                }
            }
        }
        let (near, far) = self.shape.depth_range();
        let tol = REL_EPS * cam.depth_scale();
        for slit in [cam.z1(), cam.z2()] {
            let hits = if near == far {
                (near - slit).abs() <= tol
            } else {
                near - tol <= slit && slit <= far + tol
            };
            if hits {
                return Err(SceneError::Camera(CameraError::OnSlitPlane {
                    depth: slit,
                    t: None,
                }));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub primitives: Vec<Primitive>,
    pub background: Rgb,
    pub manhattan: ManhattanDirections,
}

impl Scene {
    pub fn new(primitives: Vec<Primitive>) -> Self {
        Self {
            primitives,
            ..Self::default()
        }
    }

    /// Axis-aligned bounds `(min, max)` of all primitives in scene units.
    pub fn extent(&self) -> Option<(Point3, Point3)> {
        let mut pts: Vec<Point3> = Vec::new();
        for p in &self.primitives {
            match p.shape {
                Shape::FrontalRect {
                    center,
                    kappa_x,
                    kappa_y,
                    depth,
                } => {
                    let r = 0.5 * (kappa_x.abs() + kappa_y.abs());
                    pts.push(Point3::new(center[0] - r, center[1] - r, depth));
                    pts.push(Point3::new(center[0] + r, center[1] + r, depth));
                }
                Shape::FrontalCircle {
                    center,
                    radius,
                    depth,
                } => {
                    pts.push(Point3::new(center[0] - radius, center[1] - radius, depth));
                    pts.push(Point3::new(center[0] + radius, center[1] + radius, depth));
                }
                Shape::Segment3 { start, end } => {
                    pts.push(start);
                    pts.push(end);
                }
                Shape::FrontalLine {
                    point, depth, length, ..
                } => {
                    let r = 0.5 * length;
                    pts.push(Point3::new(point[0] - r, point[1] - r, depth));
                    pts.push(Point3::new(point[0] + r, point[1] + r, depth));
                }
            }
        }
        let first = *pts.first()?;
        Some(pts.iter().fold((first, first), |(lo, hi), p| {
            (
                Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        }))
    }

    pub fn validate(&self, cam: &XSlitCamera) -> Result<(), SceneError> {
        self.primitives.iter().try_for_each(|p| p.validate(cam))
    }
}
