use std::path::Path;

use serde::{Deserialize, Serialize};
use xslit_core::XSlitCamera;

use super::fs::{read_json, write_json};
use crate::error::{Error, Result};

/// `{"z1":…, "z2":…, "theta1_deg":…, "theta2_deg":…}`; angles default to a
/// PO-XSlit (0° and 90°). Equal slit depths give the degenerate pinhole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraDoc {
    pub z1: f64,
    pub z2: f64,
    #[serde(default)]
    pub theta1_deg: f64,
    #[serde(default = "ninety")]
    pub theta2_deg: f64,
}

fn ninety() -> f64 {
    90.0
}

impl CameraDoc {
    pub fn to_camera(&self) -> Result<XSlitCamera> {
        if ![self.z1, self.z2, self.theta1_deg, self.theta2_deg]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::validation("non_finite", "camera fields must be finite"));
        }
        let (t1, t2) = (self.theta1_deg.to_radians(), self.theta2_deg.to_radians());
        if self.z1 == self.z2 {
            return Ok(XSlitCamera::pinhole_degenerate(self.z1, t1, t2)?);
        }
        Ok(XSlitCamera::new(self.z1, self.z2, t1, t2)?)
    }
}

impl From<&XSlitCamera> for CameraDoc {
    fn from(cam: &XSlitCamera) -> Self {
        Self {
            z1: cam.z1(),
            z2: cam.z2(),
            theta1_deg: cam.theta1().to_degrees(),
            theta2_deg: cam.theta2().to_degrees(),
        }
    }
}

pub fn read_camera(path: &Path) -> Result<XSlitCamera> {
    read_json::<CameraDoc>(path)?.to_camera()
}

pub fn write_camera(path: &Path, cam: &XSlitCamera) -> Result<()> {
    write_json(path, &CameraDoc::from(cam))
}
