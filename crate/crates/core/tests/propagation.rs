use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xslit_core::propagation::{
    blend_initial, depth_labels, expand_to_pixels, label_image, propagate, segment_superpixels,
    solve_mrf, solve_mrf_with, Anchor, DepthMap, MrfEdge, MrfOptions, MrfProblem,
    PropagationParams, SparseDepth,
};
use xslit_core::scene::scenes::{corridor_camera, corridor_scene};
use xslit_core::scene::{rasterize, render_vector, ObservationKind, RasterImage};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_problem(rng: &mut ChaCha8Rng, max_regions: usize, max_labels: usize) -> MrfProblem {
    let n = 1 + (rng.next_u32() as usize % max_regions);
    let l = 2 + (rng.next_u32() as usize % (max_labels - 1));
    let mut labels: Vec<f64> = Vec::new();
    while labels.len() < l {
        let v = (unit(rng) * 1000.0).round() / 100.0;
        if !labels.contains(&v) {
            labels.push(v);
        }
    }
    labels.sort_by(f64::total_cmp);
    let initial = (0..n).map(|_| unit(rng) * 10.0).collect();
    let weights = (0..n)
        .map(|_| if unit(rng) < 0.2 { 0.0 } else { 3.0 * unit(rng) })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if unit(rng) < 0.7 {
                edges.push(MrfEdge { a, b, weight: 3.0 * unit(rng) });
            }
        }
    }
    let truncation = if unit(rng) < 0.3 { f64::INFINITY } else { 0.5 + 5.0 * unit(rng) };
    MrfProblem::new(initial, weights, edges, 2.0 * unit(rng), truncation, labels).unwrap()
}

/// Exhaustive minimum over all labellings.
fn brute_force(p: &MrfProblem) -> f64 {
    let (n, l) = (p.regions(), p.labels().len());
    (0..l.pow(n as u32))
        .map(|mut code| {
            let lab: Vec<usize> = (0..n)
                .map(|_| {
                    let v = code % l;
                    code /= l;
                    v
                })
                .collect();
            p.energy(&lab)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn mrf_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..500 {
        let p = random_problem(&mut rng, 4, 4);
        let s = solve_mrf(&p);
        let best = brute_force(&p);
        assert!(s.energy <= best + 1e-9 * best.max(1.0), "case {case}: {} vs {best}", s.energy);
        assert_eq!(s.energy, p.energy(&s.labels));
    }
}

#[test]
fn mrf_trace_non_increasing_on_larger_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_problem(&mut rng, 30, 10);
        for restarts in [false, true] {
            let options = MrfOptions {
                constant_restarts: restarts,
                ..MrfOptions::default()
            };
            let s = solve_mrf_with(&p, &options);
            assert!(s.trace.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*s.trace.last().unwrap(), s.energy);
        }
    }
}

#[test]
fn mrf_zero_lambda_takes_nearest_label() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let p = random_problem(&mut rng, 6, 6);
        let p = MrfProblem::new(
            p.initial().to_vec(),
            vec![1.0; p.regions()],
            p.edges().to_vec(),
            0.0,
            p.truncation(),
            p.labels().to_vec(),
        )
        .unwrap();
        let s = solve_mrf(&p);
        let expected: Vec<usize> = p.initial().iter().map(|&v| p.nearest_label(v)).collect();
        assert_eq!(p.energy(&s.labels), p.energy(&expected));
    }
}

fn blocks(w: usize, h: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = RasterImage::rgb(w, h, [0, 0, 0]);
    let palette: Vec<[u8; 3]> = (0..12)
        .map(|_| {
            let v = rng.next_u32().to_le_bytes();
            [v[0], v[1], v[2]]
        })
        .collect();
    for y in 0..h {
        for x in 0..w {
            let base = palette[(x / 8 + 3 * (y / 6)) % palette.len()];
            let jitter = (rng.next_u32() % 9) as i32 - 4;
            let c = base.map(|b| (b as i32 + jitter).clamp(0, 255) as u8);
            img.put_rgb(x, y, c);
        }
    }
    img
}

#[test]
fn region_count_decreases_with_scale() {
    let img = blocks(64, 48, 11);
    let counts: Vec<usize> = [5.0, 20.0, 80.0, 300.0, 1200.0, 5000.0]
        .iter()
        .map(|&k| segment_superpixels(&img, k, 4).unwrap().regions.len())
        .collect();
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
    assert!(counts[0] > counts[counts.len() - 1]);
}

#[test]
fn segmentation_is_a_deterministic_partition() {
    let img = blocks(40, 30, 5);
    let g = segment_superpixels(&img, 100.0, 6).unwrap();
    assert_eq!(g, segment_superpixels(&img, 100.0, 6).unwrap());
    let mut counts = vec![0usize; g.regions.len()];
    for &l in &g.labels {
        counts[l as usize] += 1;
    }
    for (r, c) in g.regions.iter().zip(&counts) {
        assert!(*c > 0);
        assert_eq!(r.pixel_count, *c);
    }
    for (idx, e) in g.edges.iter().enumerate() {
        assert!(e.a < e.b && e.boundary > 0);
        assert!(g.neighbors(e.a).contains(&(e.b, idx)));
        assert!(g.neighbors(e.b).contains(&(e.a, idx)));
    }
}

#[test]
fn sharp_blend_returns_anchor_depth() {
    let img = blocks(40, 30, 9);
    let g = segment_superpixels(&img, 100.0, 6).unwrap();
    let s = SparseDepth::new(vec![Anchor::at_pixel(3, 3, 10.0), Anchor::at_pixel(35, 25, 50.0)]);
    let b = blend_initial(&g, &s, 1e-3).unwrap();
    let (ra, rb) = (g.region_of(3, 3).unwrap(), g.region_of(35, 25).unwrap());
    assert!((b.values[ra] - 10.0).abs() < 1e-9);
    assert!((b.values[rb] - 50.0).abs() < 1e-9);
}

#[test]
fn expansion_respects_partition_and_means() {
    let img = blocks(40, 30, 13);
    let g = segment_superpixels(&img, 100.0, 6).unwrap();
    let values: Vec<f64> = (0..g.regions.len()).map(|i| 1.0 + i as f64).collect();
    let map = expand_to_pixels(&g, &values).unwrap();
    let mut sums = vec![0.0; g.regions.len()];
    for (d, &l) in map.depth.iter().zip(&g.labels) {
        assert_eq!(*d, values[l as usize]);
        sums[l as usize] += d;
    }
    for (i, r) in g.regions.iter().enumerate() {
        assert!((sums[i] / r.pixel_count as f64 - values[i]).abs() < 1e-12);
    }
    let one = segment_superpixels(&RasterImage::rgb(5, 5, [1, 2, 3]), 10.0, 1).unwrap();
    let flat = expand_to_pixels(&one, &[4.0]).unwrap();
    assert!(flat.depth.iter().all(|&d| d == 4.0));
    assert_eq!(label_image(&one), vec![0u16; 25]);
    assert!(expand_to_pixels(&one, &[]).is_err());
}

proptest! {
    #[test]
    fn quantize_round_trip(depths in proptest::collection::vec(1.0f64..900.0, 1..64)) {
        let map = DepthMap { width: depths.len(), height: 1, depth: depths.clone() };
        let (lo, hi) = map.range().unwrap();
        let codes = map.quantize(lo, hi);
        let back = DepthMap::from_quantized(map.width, 1, &codes, lo, hi);
        let step = (hi - lo) / 65535.0;
        for (a, b) in depths.iter().zip(&back.depth) {
            prop_assert!((a - b).abs() <= 0.5 * step + 1e-9);
        }
    }

    #[test]
    fn labels_cover_padded_range(lo in 1.0f64..100.0, span in 0.0f64..100.0, n in 2usize..80) {
        let labels = depth_labels(lo, lo + span, n, 0.1);
        prop_assert_eq!(labels.len(), n);
        prop_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(labels[0] < lo && labels[n - 1] > lo + span);
    }
}

#[test]
fn corridor_propagation_is_faithful() {
    let cam = corridor_camera();
    let layout = corridor_scene(&cam).unwrap();
    let out = render_vector(&layout.scene, &cam);
    let raster = rasterize(&out.observations, &layout.image).unwrap();
    let anchors = out
        .observations
        .iter()
        .filter(|o| o.kind == ObservationKind::Polyline)
        .map(|o| {
            let (x, y) = layout.image.pixel_of(o.points[o.points.len() / 2]).unwrap();
            Anchor::at_pixel(x, y, o.depth.0)
        })
        .collect();
    let p = propagate(&raster.image, &SparseDepth::new(anchors), &PropagationParams::default()).unwrap();
    let frac = p.depth.fraction_within(&raster.depth, 0.05);
    assert!(frac >= 0.9, "{frac}");
}
