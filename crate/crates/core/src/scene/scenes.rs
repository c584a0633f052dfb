//! Built-in synthetic scenes.
//!
//! Panel scenes are laid out in sensor coordinates and back-projected, so the
//! same layout yields a legible image for any camera.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::raster::ImageSpec;
use super::{Primitive, Rgb, Scene, Shape};
use crate::camera::{CameraError, Point2, XSlitCamera};

/// PO-XSlit camera of the concentric-arch scene, centimetres.
pub fn arch_camera() -> XSlitCamera {
    XSlitCamera::po_xslit(-3.2, -346.7).expect("valid camera")
}

pub const ARCH_DEPTHS: [f64; 5] = [900.0, 1250.0, 1600.0, 1950.0, 2300.0];

/// Concentric circles (base aspect ratio 1) at the given depths.
pub fn arch_scene(depths: &[f64], radius: f64) -> Scene {
    let primitives = depths
        .iter()
        .enumerate()
        .map(|(i, &depth)| {
            let shade = 255 - (i * 160 / depths.len().max(1)) as u8;
            Primitive::new(
                i as u32 + 1,
                [shade, shade / 2, 40],
                Shape::FrontalCircle {
                    center: [0.0, 0.0],
                    radius,
                    depth,
                },
            )
        })
        .collect();
    Scene::new(primitives)
}

/// Identical cards at several depths, grouped for the shape prior.
pub fn card_scene(kappa_x: f64, kappa_y: f64, depths: &[f64]) -> Scene {
    let n = depths.len() as f64;
    let primitives = depths
        .iter()
        .enumerate()
        .map(|(i, &depth)| {
            // spread the cards horizontally by roughly one card width in the image
            let x = (i as f64 - 0.5 * (n - 1.0)) * 1.6 * kappa_x * depth / depths[0];
            Primitive::new(
                i as u32 + 1,
                [230, 230 - 30 * i as u8, 200],
                Shape::FrontalRect {
                    center: [x, 0.0],
                    kappa_x,
                    kappa_y,
                    depth,
                },
            )
            .in_group("cards")
        })
        .collect();
    Scene::new(primitives)
}

/// Parallel frontal lines of one 3D direction at several depths.
pub fn line_pencil(direction_angle: f64, depths: &[f64], length: f64) -> Scene {
    let primitives = depths
        .iter()
        .enumerate()
        .map(|(i, &depth)| {
            Primitive::new(
                i as u32 + 1,
                [255, 255, 255],
                Shape::FrontalLine {
                    point: [0.3 * i as f64, 0.0],
                    direction_angle,
                    depth,
                    length,
                },
            )
        })
        .collect();
    Scene::new(primitives)
}

/// A frontal panel placed by its image: centre and half extents along the
/// slit directions, both in sensor units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelLayout {
    pub center: Point2,
    pub half: (f64, f64),
    pub depth: f64,
    pub color: Rgb,
}

/// Scene plus the image frame its layout was designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutScene {
    pub scene: Scene,
    pub image: ImageSpec,
}

/// Image length of marker lines, sensor units.
const LINE_IMAGE_LENGTH: f64 = 8.0;
/// Fraction of a panel half extent a marker line may reach.
const LINE_FILL: f64 = 0.6;

struct Builder<'a> {
    cam: &'a XSlitCamera,
    primitives: Vec<Primitive>,
}

impl Builder<'_> {
    fn next_id(&self) -> u32 {
        self.primitives.len() as u32 + 1
    }

    /// Scene-plane point at depth `z` that projects to `image`.
    fn back_project(&self, image: Point2, z: f64) -> Result<[f64; 2], CameraError> {
        let c = self.cam.basis().decompose([image.u, image.v])?;
        let (su, sv) = self.cam.component_scales(z)?;
        Ok(self.cam.basis().recompose(crate::camera::SlitCoords::new(c.a / su, c.b / sv)))
    }

    fn panel(&mut self, p: &PanelLayout) -> Result<(), CameraError> {
        let (su, sv) = self.cam.component_scales(p.depth)?;
        let center = self.back_project(p.center, p.depth)?;
        let id = self.next_id();
        self.primitives.push(Primitive::new(
            id,
            p.color,
            Shape::FrontalRect {
                center,
                kappa_x: 2.0 * p.half.0 / su.abs(),
                kappa_y: 2.0 * p.half.1 / sv.abs(),
                depth: p.depth,
            },
        ));
        Ok(())
    }

    /// Frontal line through the 3D point imaged at `at`, limited to a box of
    /// image half extents `limit` along the slit directions.
    fn line(
        &mut self,
        at: Point2,
        depth: f64,
        angle: f64,
        limit: (f64, f64),
        color: Rgb,
    ) -> Result<(), CameraError> {
        let (su, sv) = self.cam.component_scales(depth)?;
        let d = self
            .cam
            .basis()
            .decompose([libm::cos(angle), libm::sin(angle)])?;
        let (ia, ib) = ((su * d.a).abs(), (sv * d.b).abs());
        let [du, dv] = self
            .cam
            .basis()
            .recompose(crate::camera::SlitCoords::new(su * d.a, sv * d.b));
        let per_unit = libm::sqrt(du * du + dv * dv);
        let mut length = LINE_IMAGE_LENGTH / per_unit;
        if ia > 0.0 {
            length = length.min(2.0 * LINE_FILL * limit.0 / ia);
        }
        if ib > 0.0 {
            length = length.min(2.0 * LINE_FILL * limit.1 / ib);
        }
        let point = self.back_project(at, depth)?;
        let id = self.next_id();
        self.primitives.push(Primitive::new(
            id,
            color,
            Shape::FrontalLine {
                point,
                direction_angle: angle,
                depth,
                length,
            },
        ));
        Ok(())
    }
}

fn darker(c: Rgb) -> Rgb {
    [c[0].saturating_sub(24), c[1].saturating_sub(24), c[2].saturating_sub(24)]
}

/// Panels with one horizontal and one vertical marker line each, over a back
/// wall that fills the frame and carries its own markers at `wall_markers`.
pub fn panel_scene(
    cam: &XSlitCamera,
    panels: &[PanelLayout],
    wall: (f64, Rgb),
    wall_markers: &[Point2],
    image: ImageSpec,
) -> Result<LayoutScene, CameraError> {
    let mut b = Builder {
        cam,
        primitives: Vec::new(),
    };
    let half_w = 0.5 * image.width as f64 / image.scale;
    let half_h = 0.5 * image.height as f64 / image.scale;
    let cover = 2.0 * (half_w + half_h);
    b.panel(&PanelLayout {
        center: image.center,
        half: (cover, cover),
        depth: wall.0,
        color: wall.1,
    })?;
    let (h, v) = (0.0, FRAC_PI_2);
    for p in panels {
        b.panel(p)?;
        // vertical marker right of centre, horizontal marker below it
        let shift = 0.25 * p.half.0.min(p.half.1);
        let right = Point2::new(p.center.u + shift, p.center.v + shift);
        let below = Point2::new(p.center.u - shift, p.center.v - shift);
        let limit = (0.7 * p.half.0, 0.7 * p.half.1);
        b.line(right, p.depth, v, limit, darker(p.color))?;
        b.line(below, p.depth, h, limit, darker(p.color))?;
    }
    for (i, &m) in wall_markers.iter().enumerate() {
        let angle = if i % 2 == 0 { h } else { v };
        b.line(m, wall.0, angle, (4.0, 4.0), darker(wall.1))?;
    }
    Ok(LayoutScene {
        scene: Scene {
            primitives: b.primitives,
            background: wall.1,
            manhattan: Default::default(),
        },
        image: image.with_background(wall.1),
    })
}

fn slits_45_135(z1: f64, z2: f64) -> XSlitCamera {
    XSlitCamera::new(z1, z2, FRAC_PI_4, 3.0 * FRAC_PI_4).expect("valid camera")
}

/// Rotated camera with a moderate slit ratio; keeps 640x480 renders legible.
pub fn corridor_camera() -> XSlitCamera {
    slits_45_135(50.0, 100.0)
}

/// Camera of the corridor panorama, centimetres.
pub fn corridor_panorama_camera() -> XSlitCamera {
    slits_45_135(-3.6, -717.9)
}

/// Camera of the facade panorama, centimetres.
pub fn facade_camera() -> XSlitCamera {
    slits_45_135(-3.1, 4895.9)
}

const PANEL_COLORS: [Rgb; 5] = [
    [200, 60, 60],
    [60, 180, 70],
    [70, 90, 210],
    [210, 190, 60],
    [170, 80, 200],
];

fn standard_layout(depths: [f64; 5]) -> Vec<PanelLayout> {
    let spots = [
        (Point2::new(-18.0, 8.0), (6.0, 5.5)),
        (Point2::new(0.0, 10.0), (6.0, 6.0)),
        (Point2::new(17.0, 6.0), (5.5, 6.0)),
        (Point2::new(-12.0, -12.0), (6.0, 6.0)),
        (Point2::new(12.0, -12.0), (6.0, 5.0)),
    ];
    spots
        .iter()
        .zip(depths)
        .zip(PANEL_COLORS)
        .map(|((&(center, half), depth), color)| PanelLayout {
            center,
            half,
            depth,
            color,
        })
        .collect()
}

fn standard_wall_markers() -> [Point2; 4] {
    [
        Point2::new(-26.0, 19.0),
        Point2::new(26.0, 19.0),
        Point2::new(0.0, -19.0),
        Point2::new(0.0, -1.5),
    ]
}

fn standard_image() -> ImageSpec {
    ImageSpec {
        width: 640,
        height: 480,
        scale: 10.0,
        center: Point2::new(0.0, 0.0),
        background: [0, 0, 0],
    }
}

/// Piecewise-constant corridor: five panels and a back wall, 640x480.
pub fn corridor_scene(cam: &XSlitCamera) -> Result<LayoutScene, CameraError> {
    let floor = cam.depth_floor();
    let base = if floor > 0.0 { 2.0 * floor } else { 200.0 };
    let depths = [1.0, 1.4, 1.8, 2.25, 2.6].map(|k| k * base);
    panel_scene(
        cam,
        &standard_layout(depths),
        (3.25 * base, [90, 90, 110]),
        &standard_wall_markers(),
        standard_image(),
    )
}

/// Facade scene for the facade camera: panels between 55 m and 85 m.
pub fn facade_scene(cam: &XSlitCamera) -> Result<LayoutScene, CameraError> {
    panel_scene(
        cam,
        &standard_layout([5500.0, 6200.0, 7000.0, 7800.0, 8500.0]),
        (10000.0, [120, 110, 100]),
        &standard_wall_markers(),
        standard_image(),
    )
}

/// Two identical squares centred on `x`, one near and one far, placed apart
/// vertically so their images never overlap in a pinhole frame.
pub fn two_depth_squares(side: f64, near: f64, far: f64, x: f64) -> Scene {
    let square = |id, color, y, depth| {
        Primitive::new(
            id,
            color,
            Shape::FrontalRect {
                center: [x, y],
                kappa_x: side,
                kappa_y: side,
                depth,
            },
        )
    };
    let mut s = Scene::new(alloc::vec![
        square(1, [90, 160, 250], 0.6 * side * far / near, far),
        square(2, [250, 120, 60], -0.6 * side, near),
    ]);
    s.background = [10, 10, 10];
    s
}
