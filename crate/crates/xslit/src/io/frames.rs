//! Directories of numbered PPM frames, ordered by the last run of digits in
//! each file stem (`frame_0002.ppm` is frame 2).

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use xslit_core::scene::RasterImage;

use super::fs::ensure_dir;
use super::pnm::{read_image, write_ppm};
use crate::error::{Error, Result};

fn frame_number(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let end = stem.rfind(|c: char| c.is_ascii_digit())? + 1;
    let start = stem[..end]
        .rfind(|c: char| !c.is_ascii_digit())
        .map_or(0, |i| i + 1);
    stem[start..end].parse().ok()
}

/// Numbered `.ppm` files of `dir` in frame order.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut numbered = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("ppm") {
            continue;
        }
        let n = frame_number(&path).ok_or_else(|| {
            Error::validation(
                "unnumbered_frame",
                format!("{}: frame file name has no number", path.display()),
            )
        })?;
        numbered.push((n, path));
    }
    numbered.sort();
    if let Some(w) = numbered.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::validation(
            "duplicate_frame",
            format!("{} and {} share frame number {}", w[0].1.display(), w[1].1.display(), w[0].0),
        ));
    }
    if numbered.is_empty() {
        return Err(Error::validation(
            "no_frames",
            format!("{}: no .ppm frames", dir.display()),
        ));
    }
    Ok(numbered.into_iter().map(|(_, p)| p).collect())
}

/// Decodes every frame in order; decoding runs in parallel.
pub fn read_frames(dir: &Path) -> Result<Vec<RasterImage>> {
    list_frames(dir)?.par_iter().map(|p| read_image(p)).collect()
}

pub fn frame_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("frame_{index:04}.ppm"))
}

pub fn write_frames(dir: &Path, frames: &[RasterImage]) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    frames
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let path = frame_path(dir, i);
            write_ppm(&path, f).map(|_| path)
        })
        .collect()
}
