use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{PropagationError, SuperpixelGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorSite {
    Region(usize),
    Pixel { x: usize, y: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub site: AnchorSite,
    pub depth: f64,
    /// In `[0, 1]`; scales the anchor's blending weight.
    pub confidence: f64,
}

impl Anchor {
    pub fn at_pixel(x: usize, y: usize, depth: f64) -> Self {
        Self {
            site: AnchorSite::Pixel { x, y },
            depth,
            confidence: 1.0,
        }
    }

    pub fn in_region(region: usize, depth: f64) -> Self {
        Self {
            site: AnchorSite::Region(region),
            depth,
            confidence: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseDepth {
    pub anchors: Vec<Anchor>,
}

impl SparseDepth {
    pub fn new(anchors: Vec<Anchor>) -> Self {
        Self { anchors }
    }
}

/// Initial per-region depths.
#[derive(Debug, Clone, PartialEq)]
pub struct Blend {
    pub values: Vec<f64>,
    /// Regions whose total anchor weight is below `1e-12`.
    pub low_confidence: Vec<bool>,
    /// Region index of each anchor.
    pub anchor_regions: Vec<usize>,
}

/// Below this total weight a region's blend is not trusted.
pub const LOW_CONFIDENCE_WEIGHT: f64 = 1e-12;

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn geodesic(graph: &SuperpixelGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.regions.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for &(j, _) in graph.neighbors(i) {
            let nd = d + graph.color_distance(i, j);
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(Entry(nd, j));
            }
        }
    }
    dist
}

/// Weighted average of anchor depths with weights
/// `confidence * exp(-d_g / sigma_g)`, where `d_g` is the shortest path over
/// the region graph with mean-colour distance as edge cost.
pub fn blend_initial(
    graph: &SuperpixelGraph,
    sparse: &SparseDepth,
    sigma_g: f64,
) -> Result<Blend, PropagationError> {
    if sparse.anchors.is_empty() {
        return Err(PropagationError::NoAnchors);
    }
    if !(sigma_g.is_finite() && sigma_g > 0.0) {
        return Err(PropagationError::InvalidParameter("sigma_g must be positive"));
    }
    let n = graph.regions.len();
    let mut anchor_regions = Vec::with_capacity(sparse.anchors.len());
    for (index, a) in sparse.anchors.iter().enumerate() {
        if !a.depth.is_finite() || !(0.0..=1.0).contains(&a.confidence) {
            return Err(PropagationError::InvalidAnchor { index });
        }
        let region = match a.site {
            AnchorSite::Region(r) => (r < n).then_some(r),
            AnchorSite::Pixel { x, y } => graph.region_of(x, y),
        };
        anchor_regions.push(region.ok_or(PropagationError::AnchorOutOfRange { index })?);
    }

    // log-weights per anchor, combined with a running log-sum-exp per region
    let mut log_total = vec![f64::NEG_INFINITY; n];
    let mut weighted = vec![0.0; n];
    let mut sources: Vec<usize> = anchor_regions.clone();
    sources.sort_unstable();
    sources.dedup();
    for &src in &sources {
        let dist = geodesic(graph, src);
        for (a, _) in sparse
            .anchors
            .iter()
            .zip(&anchor_regions)
            .filter(|(_, &r)| r == src)
        {
            if a.confidence == 0.0 {
                continue;
            }
            let ln_c = libm::log(a.confidence);
            for i in 0..n {
                let l = ln_c - dist[i] / sigma_g;
                if l == f64::NEG_INFINITY {
                    continue;
                }
                let m = log_total[i].max(l);
                let (old, new) = (libm::exp(log_total[i] - m), libm::exp(l - m));
                weighted[i] = (weighted[i] * old + a.depth * new) / (old + new);
                log_total[i] = m + libm::log(old + new);
            }
        }
    }
    let threshold = libm::log(LOW_CONFIDENCE_WEIGHT);
    let fallback = sparse.anchors.iter().map(|a| a.depth).sum::<f64>() / sparse.anchors.len() as f64;
    let low_confidence: Vec<bool> = log_total.iter().map(|&l| !(l >= threshold)).collect();
    let values = weighted
        .iter()
        .zip(&log_total)
        .map(|(&v, &l)| if l == f64::NEG_INFINITY { fallback } else { v })
        .collect();
    Ok(Blend {
        values,
        low_confidence,
        anchor_regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::segment_superpixels;
    use crate::scene::RasterImage;

    fn two_tone() -> SuperpixelGraph {
        let mut img = RasterImage::rgb(20, 10, [0, 0, 0]);
        for y in 0..10 {
            for x in 10..20 {
                img.put_rgb(x, y, [250, 250, 250]);
            }
        }
        segment_superpixels(&img, 50.0, 5).unwrap()
    }

    #[test]
    fn single_anchor_is_constant() {
        let g = two_tone();
        let b = blend_initial(&g, &SparseDepth::new(vec![Anchor::at_pixel(2, 2, 7.5)]), 10.0).unwrap();
        assert!(b.values.iter().all(|&v| (v - 7.5).abs() < 1e-12));
        assert_eq!(b.low_confidence, [false, true]);
    }

    #[test]
    fn high_contrast_boundary_separates_anchors() {
        let g = two_tone();
        let s = SparseDepth::new(vec![Anchor::at_pixel(2, 2, 3.0), Anchor::at_pixel(15, 5, 9.0)]);
        let b = blend_initial(&g, &s, 20.0).unwrap();
        assert!((b.values[0] - 3.0).abs() < 1e-6);
        assert!((b.values[1] - 9.0).abs() < 1e-6);
    }

    #[test]
    fn anchor_errors() {
        let g = two_tone();
        assert_eq!(blend_initial(&g, &SparseDepth::default(), 1.0), Err(PropagationError::NoAnchors));
        let bad = SparseDepth::new(vec![Anchor::at_pixel(50, 2, 3.0)]);
        assert_eq!(
            blend_initial(&g, &bad, 1.0),
            Err(PropagationError::AnchorOutOfRange { index: 0 })
        );
        let nan = SparseDepth::new(vec![Anchor::in_region(0, f64::NAN)]);
        assert_eq!(blend_initial(&g, &nan, 1.0), Err(PropagationError::InvalidAnchor { index: 0 }));
    }
}
