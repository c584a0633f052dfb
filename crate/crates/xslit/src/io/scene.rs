//! Scene documents.
//!
//! ```json
//! {
//!   "background": [0, 0, 0],
//!   "manhattan": {"horizontal_deg": 0, "vertical_deg": 90},
//!   "image": {"width": 640, "height": 480, "scale": 10, "center": [0, 0]},
//!   "primitives": [
//!     {"id": 1, "color": [200, 60, 60], "group": "cards", "kind": "frontal_rect",
//!      "center": [0, 0], "kappa_x": 1, "kappa_y": 2, "depth": 3},
//!     {"kind": "frontal_circle", "center": [0, 0], "radius": 1, "depth": 4},
//!     {"kind": "segment3", "start": [0, 0, 3], "end": [1, 0, 5]},
//!     {"kind": "frontal_line", "point": [0, 0], "direction_deg": 30, "depth": 4, "length": 2}
//!   ]
//! }
//! ```
//!
//! `id` defaults to the 1-based position, `color` to white. `image` is
//! optional; without it the frame is fitted to the projected scene.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use xslit_core::inference::ManhattanDirections;
use xslit_core::scene::{ImageSpec, Primitive, Rgb, Scene, Shape};
use xslit_core::{Point2, Point3};

use super::fs::{read_json, write_json};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDoc {
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
        start: [f64; 3],
        end: [f64; 3],
    },
    FrontalLine {
        point: [f64; 2],
        direction_deg: f64,
        depth: f64,
        length: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    #[serde(default = "white")]
    pub color: Rgb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(flatten)]
    pub shape: ShapeDoc,
}

fn white() -> Rgb {
    [255, 255, 255]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManhattanDoc {
    pub horizontal_deg: f64,
    pub vertical_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageDoc {
    pub width: usize,
    pub height: usize,
    /// Pixels per sensor unit.
    pub scale: f64,
    #[serde(default)]
    pub center: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    #[serde(default)]
    pub background: Rgb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manhattan: Option<ManhattanDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<ImageDoc>,
    pub primitives: Vec<PrimitiveDoc>,
}

/// A parsed scene with its optional fixed frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFile {
    pub scene: Scene,
    pub image: Option<ImageSpec>,
}

impl ShapeDoc {
    fn to_shape(self) -> Shape {
        match self {
            ShapeDoc::FrontalRect {
                center,
                kappa_x,
                kappa_y,
                depth,
            } => Shape::FrontalRect {
                center,
                kappa_x,
                kappa_y,
                depth,
            },
            ShapeDoc::FrontalCircle {
                center,
                radius,
                depth,
            } => Shape::FrontalCircle {
                center,
                radius,
                depth,
            },
            ShapeDoc::Segment3 { start, end } => Shape::Segment3 {
                start: Point3::new(start[0], start[1], start[2]),
                end: Point3::new(end[0], end[1], end[2]),
            },
            ShapeDoc::FrontalLine {
                point,
                direction_deg,
                depth,
                length,
            } => Shape::FrontalLine {
                point,
                direction_angle: direction_deg.to_radians(),
                depth,
                length,
            },
        }
    }

    fn from_shape(shape: &Shape) -> Self {
        match *shape {
            Shape::FrontalRect {
                center,
                kappa_x,
                kappa_y,
                depth,
            } => ShapeDoc::FrontalRect {
                center,
                kappa_x,
                kappa_y,
                depth,
            },
            Shape::FrontalCircle {
                center,
                radius,
                depth,
            } => ShapeDoc::FrontalCircle {
                center,
                radius,
                depth,
            },
            Shape::Segment3 { start, end } => ShapeDoc::Segment3 {
                start: [start.x, start.y, start.z],
                end: [end.x, end.y, end.z],
            },
            Shape::FrontalLine {
                point,
                direction_angle,
                depth,
                length,
            } => ShapeDoc::FrontalLine {
                point,
                direction_deg: direction_angle.to_degrees(),
                depth,
                length,
            },
        }
    }
}

impl SceneDoc {
    pub fn to_scene(&self) -> Result<SceneFile> {
        let mut ids = BTreeSet::new();
        let mut primitives = Vec::with_capacity(self.primitives.len());
        for (i, p) in self.primitives.iter().enumerate() {
            let id = p.id.unwrap_or(i as u32 + 1);
            if !ids.insert(id) {
                return Err(Error::validation(
                    "duplicate_id",
                    format!("primitive id {id} is used twice"),
                ));
            }
            let mut prim = Primitive::new(id, p.color, p.shape.to_shape());
            prim.group = p.group.clone();
            primitives.push(prim);
        }
        let manhattan = match self.manhattan {
            Some(m) => {
                if !(m.horizontal_deg.is_finite() && m.vertical_deg.is_finite()) {
                    return Err(Error::validation("non_finite", "Manhattan angles must be finite"));
                }
                ManhattanDirections {
                    horizontal: m.horizontal_deg.to_radians(),
                    vertical: m.vertical_deg.to_radians(),
                }
            }
            None => ManhattanDirections::default(),
        };
        let image = match self.image {
            Some(d) => {
                if d.width == 0 || d.height == 0 || !(d.scale.is_finite() && d.scale > 0.0) {
                    return Err(Error::validation(
                        "invalid_image",
                        "image needs positive width, height and scale",
                    ));
                }
                if !(d.center[0].is_finite() && d.center[1].is_finite()) {
                    return Err(Error::validation("non_finite", "image centre must be finite"));
                }
                Some(ImageSpec {
                    width: d.width,
                    height: d.height,
                    scale: d.scale,
                    center: Point2::new(d.center[0], d.center[1]),
                    background: self.background,
                })
            }
            None => None,
        };
        Ok(SceneFile {
            scene: Scene {
                primitives,
                background: self.background,
                manhattan,
            },
            image,
        })
    }

    pub fn from_scene(scene: &Scene, image: Option<&ImageSpec>) -> Self {
        let m = scene.manhattan;
        let manhattan = (m != ManhattanDirections::default()).then(|| ManhattanDoc {
            horizontal_deg: m.horizontal.to_degrees(),
            vertical_deg: m.vertical.to_degrees(),
        });
        Self {
            background: scene.background,
            manhattan,
            image: image.map(|s| ImageDoc {
                width: s.width,
                height: s.height,
                scale: s.scale,
                center: [s.center.u, s.center.v],
            }),
            primitives: scene
                .primitives
                .iter()
                .map(|p| PrimitiveDoc {
                    id: Some(p.id),
                    color: p.color,
                    group: p.group.clone(),
                    shape: ShapeDoc::from_shape(&p.shape),
                })
                .collect(),
        }
    }
}

pub fn read_scene(path: &Path) -> Result<SceneFile> {
    read_json::<SceneDoc>(path)?.to_scene()
}

pub fn write_scene(path: &Path, scene: &Scene, image: Option<&ImageSpec>) -> Result<()> {
    write_json(path, &SceneDoc::from_scene(scene, image))
}
