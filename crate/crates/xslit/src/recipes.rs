//! Built-in synthetic reproductions.

use serde::{Deserialize, Serialize};
use xslit_core::ddar::{ar_forward, sensitivity, DdarError};
use xslit_core::scene::scenes::{
    arch_camera, arch_scene, card_scene, corridor_camera, corridor_scene, facade_camera,
    facade_scene, ARCH_DEPTHS,
};
use xslit_core::XSlitCamera;

use crate::error::Result;
use crate::io::SceneFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Recipe {
    /// Concentric circles at 900..2300 through the arch camera.
    Arch,
    /// Aspect-ratio curves for three slit ratios.
    Checkerboard,
    /// Five panels and a back wall, recovered from marker lines.
    Corridor,
    /// Facade panels between 55 m and 85 m.
    Facade,
    /// Identical cards recovered with the shape prior.
    Cards,
}

impl Recipe {
    pub fn name(self) -> &'static str {
        match self {
            Recipe::Arch => "arch",
            Recipe::Checkerboard => "checkerboard",
            Recipe::Corridor => "corridor",
            Recipe::Facade => "facade",
            Recipe::Cards => "cards",
        }
    }
}

pub const ARCH_RADIUS: f64 = 300.0;
pub const CARD_SIZE: (f64, f64) = (40.0, 60.0);
pub const CARD_DEPTHS: [f64; 4] = [300.0, 350.0, 400.0, 450.0];

pub fn cards_camera() -> XSlitCamera {
    XSlitCamera::po_xslit(50.0, 100.0).expect("valid camera")
}

/// Camera and scene of a pipeline recipe; `None` for `checkerboard`.
pub fn pipeline_recipe(recipe: Recipe) -> Result<Option<(XSlitCamera, SceneFile)>> {
    let plain = |scene| SceneFile { scene, image: None };
    Ok(Some(match recipe {
        Recipe::Arch => (arch_camera(), plain(arch_scene(&ARCH_DEPTHS, ARCH_RADIUS))),
        Recipe::Cards => (cards_camera(), plain(card_scene(CARD_SIZE.0, CARD_SIZE.1, &CARD_DEPTHS))),
        Recipe::Corridor => {
            let cam = corridor_camera();
            let l = corridor_scene(&cam)?;
            (cam, SceneFile { scene: l.scene, image: Some(l.image) })
        }
        Recipe::Facade => {
            let cam = facade_camera();
            let l = facade_scene(&cam)?;
            (cam, SceneFile { scene: l.scene, image: Some(l.image) })
        }
        Recipe::Checkerboard => return Ok(None),
    }))
}

pub const CHECKERBOARD_Z1: f64 = 6.0;
pub const CHECKERBOARD_RATIOS: [f64; 3] = [1.3, 1.59, 2.0];
pub const CHECKERBOARD_DEPTHS: (f64, f64, usize) = (30.0, 300.0, 28);

/// One row of an aspect-ratio curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub z: f64,
    pub r_i: f64,
    pub sensitivity: f64,
}

/// `n` evenly spaced values from `a` to `b`; a single value is `a`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Projected aspect ratio and its sensitivity along `depths`. A pinhole camera
/// gives the constant `r_o` with zero sensitivity.
pub fn ar_curve(cam: &XSlitCamera, r_o: f64, depths: &[f64]) -> Result<Vec<CurvePoint>> {
    depths
        .iter()
        .map(|&z| match ar_forward(z, r_o, cam) {
            Ok(r_i) => Ok(CurvePoint {
                z,
                r_i,
                sensitivity: sensitivity(z, r_o, cam)?,
            }),
            Err(DdarError::DegenerateCamera { r_i }) => Ok(CurvePoint {
                z,
                r_i,
                sensitivity: 0.0,
            }),
            Err(e) => Err(e.into()),
        })
        .collect()
}

pub fn checkerboard_camera(ratio: f64) -> Result<XSlitCamera> {
    Ok(XSlitCamera::po_xslit(CHECKERBOARD_Z1, ratio * CHECKERBOARD_Z1)?)
}
