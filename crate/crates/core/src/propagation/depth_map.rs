use alloc::vec::Vec;

use super::{PropagationError, SuperpixelGraph};

/// Dense row-major depth grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    pub depth: Vec<f64>,
}

impl DepthMap {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.depth[y * self.width + x]
    }

    /// `(min, max)` over all pixels; `None` for an empty map.
    pub fn range(&self) -> Option<(f64, f64)> {
        if self.depth.is_empty() {
            return None;
        }
        Some(
            self.depth
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d))),
        )
    }

    /// Linear 16-bit code of each depth over `[min, max]`; a flat map is all zero.
    pub fn quantize(&self, min: f64, max: f64) -> Vec<u16> {
        let span = max - min;
        self.depth
            .iter()
            .map(|&d| {
                if !(span > 0.0) {
                    0
                } else {
                    let q = libm::round((d - min) / span * 65535.0);
                    q.clamp(0.0, 65535.0) as u16
                }
            })
            .collect()
    }

    /// Inverse of [`DepthMap::quantize`] up to one code step.
    pub fn from_quantized(width: usize, height: usize, codes: &[u16], min: f64, max: f64) -> Self {
        let span = max - min;
        Self {
            width,
            height,
            depth: codes
                .iter()
                .map(|&q| min + span * q as f64 / 65535.0)
                .collect(),
        }
    }

    /// Fraction of pixels within relative error `tol` of `truth`, skipping pixels
    /// without ground truth.
    pub fn fraction_within(&self, truth: &[Option<f64>], tol: f64) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for (d, t) in self.depth.iter().zip(truth) {
            if let Some(t) = t {
                total += 1;
                if (d - t).abs() <= tol * t.abs() {
                    hit += 1;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}

/// Paints each pixel with its region's value.
pub fn expand_to_pixels(graph: &SuperpixelGraph, values: &[f64]) -> Result<DepthMap, PropagationError> {
    if values.len() != graph.regions.len() {
        return Err(PropagationError::LengthMismatch {
            expected: graph.regions.len(),
            got: values.len(),
        });
    }
    Ok(DepthMap {
        width: graph.width,
        height: graph.height,
        depth: graph.labels.iter().map(|&l| values[l as usize]).collect(),
    })
}

/// Region ids as 16-bit codes, wrapping past 65535.
pub fn label_image(graph: &SuperpixelGraph) -> Vec<u16> {
    graph.labels.iter().map(|&l| (l & 0xffff) as u16).collect()
}
