mod common;

use common::oracles::{central_difference, ray_oracle, rel_err};
use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use xslit_core::ddar::{
    ar_forward, ar_trend, depth_from_ar, dri_dz, dz_dri, max_discernible_depth,
    max_discernible_depth_with, AnalysisConfig, ArTrend, DepthRangeFormula,
};
use xslit_core::inference::{depth_from_slope, normalize_angle};
use xslit_core::{Point3, XSlitCamera};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn range(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let m = range(rng, lo, hi);
    if rng.next_u32() & 1 == 0 {
        m
    } else {
        -m
    }
}

struct Config {
    z1: f64,
    z2: f64,
    t1: f64,
    t2: f64,
}

impl Config {
    fn cam(&self) -> XSlitCamera {
        XSlitCamera::new(self.z1, self.z2, self.t1, self.t2).unwrap()
    }
}

/// Random non-degenerate camera with slits at least 5% of the scale apart and
/// at least 0.2 rad from parallel.
fn random_config(rng: &mut ChaCha8Rng) -> Config {
    loop {
        let z1 = signed(rng, 0.5, 50.0);
        let z2 = signed(rng, 0.5, 50.0);
        if (z1 - z2).abs() < 0.05 * z1.abs().max(z2.abs()) {
            continue;
        }
        let t1 = range(rng, 0.0, PI);
        let t2 = t1 + range(rng, 0.2, PI - 0.2);
        return Config { z1, z2, t1, t2 };
    }
}

/// Depth inside the physical domain, away from its floor.
fn valid_depth(rng: &mut ChaCha8Rng, cam: &XSlitCamera) -> f64 {
    let scale = cam.depth_scale();
    cam.depth_floor() + scale * range(rng, 0.05, 20.0)
}

#[test]
fn projection_matches_ray_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..10_000 {
        let c = random_config(&mut rng);
        let cam = c.cam();
        let scale = cam.depth_scale();
        let z = loop {
            let z = range(&mut rng, -3.0 * scale, 3.0 * scale);
            if (z - c.z1).abs() > 0.05 * scale && (z - c.z2).abs() > 0.05 * scale {
                break z;
            }
        };
        let p = [range(&mut rng, -10.0, 10.0), range(&mut rng, -10.0, 10.0), z];
        let got = cam.project_point(Point3::new(p[0], p[1], p[2])).unwrap();
        let want = ray_oracle(c.z1, c.z2, c.t1, c.t2, p).unwrap();
        let mag = want[0].abs().max(want[1].abs()).max(1.0);
        assert!(
            (got.u - want[0]).abs() <= 1e-7 * mag && (got.v - want[1]).abs() <= 1e-7 * mag,
            "case {case}: {got:?} vs {want:?}"
        );
    }
}

#[test]
fn ar_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..10_000 {
        let cam = random_config(&mut rng).cam();
        let z = valid_depth(&mut rng, &cam);
        let r_o = signed(&mut rng, 0.1, 10.0);
        let r_i = ar_forward(z, r_o, &cam).unwrap();
        let back = depth_from_ar(r_i, r_o, &cam).unwrap();
        assert!(rel_err(back, z) < 1e-9, "case {case}: {back} vs {z}");
    }
}

#[test]
fn slope_round_trip_through_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    while checked < 10_000 {
        let c = random_config(&mut rng);
        let cam = c.cam();
        let z = valid_depth(&mut rng, &cam);
        let phi = range(&mut rng, 0.0, PI);
        // keep away from the slit directions, where the slope carries no depth
        let off = |t: f64| normalize_angle(phi - t).min(PI - normalize_angle(phi - t));
        if off(c.t1) < 0.05 || off(c.t2) < 0.05 {
            continue;
        }
        let p0 = Point3::new(range(&mut rng, -5.0, 5.0), range(&mut rng, -5.0, 5.0), z);
        let p1 = Point3::new(p0.x + phi.cos(), p0.y + phi.sin(), z);
        let (a, b) = (cam.project_point(p0).unwrap(), cam.project_point(p1).unwrap());
        let observed = (b.v - a.v).atan2(b.u - a.u);
        let depth = depth_from_slope(observed, phi, &cam).unwrap();
        assert!(rel_err(depth, z) < 1e-9, "{depth} vs {z}");
        checked += 1;
    }
}

#[test]
fn derivatives_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..1000 {
        let cam = random_config(&mut rng).cam();
        let z = valid_depth(&mut rng, &cam);
        let r_o = signed(&mut rng, 0.1, 10.0);

        let h = 1e-5 * z.abs();
        let fd = central_difference(|t| ar_forward(t, r_o, &cam).unwrap(), z, h);
        let closed = dri_dz(z, r_o, &cam).unwrap();
        assert!(rel_err(closed, fd) < 1e-5, "case {case} dri_dz {closed} vs {fd}");

        let r_i = ar_forward(z, r_o, &cam).unwrap();
        // the step must stay well inside the distance to the infinite-depth asymptote
        let gap = (r_i - cam.slit_ratio() * r_o).abs();
        let h = 1e-5 * gap.min(r_i.abs());
        let fd = central_difference(|r| depth_from_ar(r, r_o, &cam).unwrap(), r_i, h);
        let closed = dz_dri(r_i, r_o, &cam).unwrap();
        assert!(rel_err(closed, fd) < 1e-5, "case {case} dz_dri {closed} vs {fd}");
    }
}

#[test]
fn printed_depth_range_differs_from_substitution() {
    let cam = XSlitCamera::po_xslit(2.0, 4.0).unwrap();
    let cfg = AnalysisConfig::new(0.01).unwrap();
    let z = max_discernible_depth(1.0, &cfg, &cam).unwrap();
    let printed = max_discernible_depth_with(1.0, &cfg, &cam, DepthRangeFormula::PrintedCompat).unwrap();
    // independent route: invert the ratio one epsilon above its limit
    let derived = depth_from_ar(cam.slit_ratio() * 1.0 + 0.01, 1.0, &cam).unwrap();
    assert!((z - 404.0).abs() < 1e-9 && (derived - 404.0).abs() < 1e-9);
    assert!((printed - 402.0).abs() < 1e-9);
}

#[test]
fn max_depth_grows_as_resolution_improves() {
    for (z1, z2) in [(1.0, 2.0), (2.0, 4.0), (3.0, 10.0), (0.5, 0.9)] {
        let cam = XSlitCamera::po_xslit(z1, z2).unwrap();
        let mut last = 0.0;
        for extent in [100u32, 300, 1000, 3000] {
            let cfg = AnalysisConfig::from_image_extent(extent).unwrap();
            let z = max_discernible_depth(1.0, &cfg, &cam).unwrap();
            assert!(z > last);
            last = z;
        }
    }
}

#[test]
fn pinhole_limit_is_perspective() {
    let f = 3.0;
    let cam = XSlitCamera::pinhole_degenerate(f, 0.2, 1.4).unwrap();
    for (x, y, z) in [(1.0, 2.0, 7.0), (-3.0, 0.5, 20.0), (0.1, -0.1, 4.0)] {
        let p = cam.project_point(Point3::new(x, y, z)).unwrap();
        let s = -f / (z - f);
        assert!((p.u - s * x).abs() < 1e-12 && (p.v - s * y).abs() < 1e-12);
    }
    let near = XSlitCamera::new(3.0, 3.0 + 1e-7, 0.2, 1.4).unwrap();
    let a = near.project_point(Point3::new(1.0, 2.0, 7.0)).unwrap();
    let b = cam.project_point(Point3::new(1.0, 2.0, 7.0)).unwrap();
    assert!((a.u - b.u).abs() < 1e-6 && (a.v - b.v).abs() < 1e-6);
}

proptest! {
    #[test]
    fn projection_is_linear_at_fixed_depth(
        z1 in 0.5f64..10.0, gap in 0.5f64..10.0, t1 in 0.0f64..3.0, dt in 0.3f64..2.8,
        z in 25.0f64..100.0, x in -5.0f64..5.0, y in -5.0f64..5.0, s in -3.0f64..3.0,
    ) {
        let cam = XSlitCamera::new(z1, z1 + gap, t1, t1 + dt).unwrap();
        let p = cam.project_point(Point3::new(x, y, z)).unwrap();
        let q = cam.project_point(Point3::new(s * x, s * y, z)).unwrap();
        prop_assert!((q.u - s * p.u).abs() < 1e-9 && (q.v - s * p.v).abs() < 1e-9);
    }

    #[test]
    fn ar_is_monotone_along_depth(
        z1 in 0.5f64..10.0, gap in 0.5f64..10.0, r_o in 0.1f64..5.0,
        a in 0.1f64..50.0, b in 0.1f64..50.0,
    ) {
        let cam = XSlitCamera::po_xslit(z1, z1 + gap).unwrap();
        let (za, zb) = (cam.depth_floor() + a.min(b), cam.depth_floor() + a.max(b));
        prop_assume!(zb - za > 1e-6);
        let (ra, rb) = (ar_forward(za, r_o, &cam).unwrap(), ar_forward(zb, r_o, &cam).unwrap());
        match ar_trend(r_o, &cam) {
            ArTrend::Increasing => prop_assert!(rb > ra),
            ArTrend::Decreasing => prop_assert!(rb < ra),
            ArTrend::Constant => prop_assert!(false),
        }
    }

    #[test]
    fn derivative_sign_matches_trend(
        z1 in -20.0f64..20.0, z2 in -20.0f64..20.0, r_o in -5.0f64..5.0, dz in 0.1f64..30.0,
    ) {
        prop_assume!(z1.abs() > 0.1 && z2.abs() > 0.1 && (z1 - z2).abs() > 0.1 && r_o.abs() > 1e-3);
        let cam = XSlitCamera::po_xslit(z1, z2).unwrap();
        let z = cam.depth_floor() + dz;
        let d = dri_dz(z, r_o, &cam).unwrap();
        let expected = if ar_trend(r_o, &cam) == ArTrend::Increasing { 1.0 } else { -1.0 };
        prop_assert_eq!(d.signum(), expected);
    }
}
