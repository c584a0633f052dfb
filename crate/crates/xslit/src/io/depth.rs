use std::path::Path;

use serde::{Deserialize, Serialize};
use xslit_core::propagation::DepthMap;

use super::fs::{read_bytes, read_json, write_json};
use super::pnm::{decode_pgm16_raw, write_pgm16};
use crate::error::{Error, Result};

/// Range of the linear 16-bit depth codes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthSidecar {
    pub depth_min: f64,
    pub depth_max: f64,
}

/// Writes `pgm` and its sidecar; the code range is the map's own range.
pub fn write_depth_map(pgm: &Path, sidecar: &Path, map: &DepthMap) -> Result<DepthSidecar> {
    let (lo, hi) = map
        .range()
        .ok_or_else(|| Error::validation("empty_image", "depth map has no pixels"))?;
    let side = DepthSidecar {
        depth_min: lo,
        depth_max: hi,
    };
    write_pgm16(pgm, map.width, map.height, &map.quantize(lo, hi))?;
    write_json(sidecar, &side)?;
    Ok(side)
}

pub fn read_depth_map(pgm: &Path, sidecar: &Path) -> Result<DepthMap> {
    let side: DepthSidecar = read_json(sidecar)?;
    let (w, h, codes) = decode_pgm16_raw(&read_bytes(pgm)?)?;
    Ok(DepthMap::from_quantized(w, h, &codes, side.depth_min, side.depth_max))
}
