use alloc::vec;
use alloc::vec::Vec;

use super::PropagationError;
use crate::scene::{Pixels, RasterImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    /// Mean colour, 8-bit units.
    pub mean_color: [f64; 3],
    /// Mean pixel position `(x, y)`.
    pub centroid: (f64, f64),
    pub pixel_count: usize,
}

/// Undirected adjacency between regions `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionEdge {
    pub a: usize,
    pub b: usize,
    /// Number of 4-connected pixel pairs straddling the boundary.
    pub boundary: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperpixelGraph {
    pub width: usize,
    pub height: usize,
    /// Region id per pixel, row-major.
    pub labels: Vec<u32>,
    pub regions: Vec<Region>,
    /// Sorted by `(a, b)`.
    pub edges: Vec<RegionEdge>,
    neighbors: Vec<Vec<(usize, usize)>>,
}

impl SuperpixelGraph {
    /// `(neighbour, edge index)` pairs of region `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.neighbors[i]
    }

    pub fn region_of(&self, x: usize, y: usize) -> Option<usize> {
        (x < self.width && y < self.height).then(|| self.labels[y * self.width + x] as usize)
    }

    pub fn color_distance(&self, a: usize, b: usize) -> f64 {
        let (ca, cb) = (self.regions[a].mean_color, self.regions[b].mean_color);
        let d2: f64 = (0..3).map(|k| (ca[k] - cb[k]) * (ca[k] - cb[k])).sum();
        libm::sqrt(d2)
    }
}

struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Largest edge weight merged into the component.
    internal: Vec<f64>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            internal: vec![0.0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    /// Unites two roots; the larger (then the lower index) becomes the root.
    fn union(&mut self, a: u32, b: u32, w: f64) {
        let (sa, sb) = (self.size[a as usize], self.size[b as usize]);
        let (root, child) = if sa > sb || (sa == sb && a < b) { (a, b) } else { (b, a) };
        self.parent[child as usize] = root;
        self.size[root as usize] = sa + sb;
        self.internal[root as usize] = w;
    }
}

fn features(image: &RasterImage) -> Vec<[f32; 3]> {
    match image.pixels() {
        Pixels::Rgb8(d) => d
            .chunks_exact(3)
            .map(|c| [c[0] as f32, c[1] as f32, c[2] as f32])
            .collect(),
        Pixels::Gray16(d) => d
            .iter()
            .map(|&g| {
                let v = g as f32 / 257.0;
                [v, v, v]
            })
            .collect(),
    }
}

fn distance(a: &[f32; 3], b: &[f32; 3]) -> f32 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    libm::sqrtf(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

/// Graph-based segmentation over the 8-connected pixel grid.
///
/// Edges are processed by increasing colour distance, ties by generation order,
/// and two components merge when the edge is no heavier than either
/// component's internal difference plus `k / size`. Components smaller than
/// `min_size` are then merged along the same edge order. Region ids follow the
/// row-major order of each region's first pixel.
pub fn segment_superpixels(
    image: &RasterImage,
    k: f64,
    min_size: usize,
) -> Result<SuperpixelGraph, PropagationError> {
    let (w, h) = (image.width(), image.height());
    if w == 0 || h == 0 {
        return Err(PropagationError::EmptyImage);
    }
    let feat = features(image);
    let mut edges: Vec<(f32, u32, u32)> = Vec::with_capacity(4 * w * h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let mut push = |j: usize| edges.push((distance(&feat[i], &feat[j]), i as u32, j as u32));
            if x + 1 < w {
                push(i + 1);
            }
            if y + 1 < h {
                push(i + w);
                if x + 1 < w {
                    push(i + w + 1);
                }
                if x > 0 {
                    push(i + w - 1);
                }
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut set = DisjointSet::new(w * h);
    for &(wt, a, b) in &edges {
        let (ra, rb) = (set.find(a), set.find(b));
        if ra == rb {
            continue;
        }
        let wt = wt as f64;
        let ta = set.internal[ra as usize] + k / set.size[ra as usize] as f64;
        let tb = set.internal[rb as usize] + k / set.size[rb as usize] as f64;
        if wt <= ta.min(tb) {
            set.union(ra, rb, wt);
        }
    }
    for &(wt, a, b) in &edges {
        let (ra, rb) = (set.find(a), set.find(b));
        if ra != rb
            && ((set.size[ra as usize] as usize) < min_size
                || (set.size[rb as usize] as usize) < min_size)
        {
            let keep = set.internal[ra as usize].max(set.internal[rb as usize]);
            set.union(ra, rb, keep.max(wt as f64));
        }
    }

    let mut id_of_root = vec![u32::MAX; w * h];
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    for i in 0..w * h {
        let r = set.find(i as u32) as usize;
        if id_of_root[r] == u32::MAX {
            id_of_root[r] = next;
            next += 1;
        }
        labels[i] = id_of_root[r];
    }
    Ok(build_graph(w, h, labels, &feat))
}

/// Region statistics and adjacency for a given labelling.
pub(crate) fn build_graph(w: usize, h: usize, labels: Vec<u32>, feat: &[[f32; 3]]) -> SuperpixelGraph {
    let n = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut sums = vec![[0.0f64; 5]; n];
    let mut counts = vec![0usize; n];
    for (i, &l) in labels.iter().enumerate() {
        let s = &mut sums[l as usize];
        let f = feat[i];
        s[0] += f[0] as f64;
        s[1] += f[1] as f64;
        s[2] += f[2] as f64;
        s[3] += (i % w) as f64;
        s[4] += (i / w) as f64;
        counts[l as usize] += 1;
    }
    let regions = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| {
            let inv = 1.0 / c as f64;
            Region {
                mean_color: [s[0] * inv, s[1] * inv, s[2] * inv],
                centroid: (s[3] * inv, s[4] * inv),
                pixel_count: c,
            }
        })
        .collect();

    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            let mut check = |m: u32| {
                if m != l {
                    pairs.push((l.min(m), l.max(m)));
                }
            };
            if x + 1 < w {
                check(labels[y * w + x + 1]);
            }
            if y + 1 < h {
                check(labels[(y + 1) * w + x]);
            }
        }
    }
    pairs.sort_unstable();
    let mut edges: Vec<RegionEdge> = Vec::new();
    for (a, b) in pairs {
        match edges.last_mut() {
            Some(e) if e.a == a as usize && e.b == b as usize => e.boundary += 1,
            _ => edges.push(RegionEdge {
                a: a as usize,
                b: b as usize,
                boundary: 1,
            }),
        }
    }
    let mut neighbors = vec![Vec::new(); n];
    for (idx, e) in edges.iter().enumerate() {
        neighbors[e.a].push((e.b, idx));
        neighbors[e.b].push((e.a, idx));
    }
    SuperpixelGraph {
        width: w,
        height: h,
        labels,
        regions,
        edges,
        neighbors,
    }
}
