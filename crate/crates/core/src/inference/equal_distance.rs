//! Unknown common aspect ratio, evenly spaced depths.
//!
//! For a trial `r_o` every observation inverts to a depth `z_j(r_o)`. The true
//! `r_o` makes consecutive spacings equal. Three observations give one scalar
//! equation `g(r_o) = z_1 + z_3 - 2 z_2 = 0`; more give a least-squares fit of
//! the `K - 2` second differences.

use alloc::vec::Vec;

use super::InferenceError;
use crate::camera::XSlitCamera;
use crate::ddar::depth_from_ar;
use crate::REL_EPS;

const SCAN_POINTS: usize = 1024;
const ROOT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EqualDistanceSolution {
    pub r_o: f64,
    pub depths: Vec<f64>,
    /// RMS of the second differences, relative to the depth span.
    pub residual: f64,
}

/// Open interval of `r_o` for which every observation inverts to a depth in
/// `(cam.depth_floor(), inf)`.
pub(crate) fn feasible_interval(r_i: &[f64], cam: &XSlitCamera) -> Option<(f64, f64)> {
    let (z1, z2) = (cam.z1(), cam.z2());
    let rho = z2 / z1;
    let floor = cam.depth_floor();
    // F(floor): sensor plane gives 1, slit 1 gives 0, slit 2 is the pole
    let f_floor = if floor == z2 {
        if z2 * (z2 - z1) / z1 > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else if floor == z1 {
        0.0
    } else {
        1.0
    };

    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut cap = r_i.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    for &r in r_i {
        let ends = [div_limit(r, f_floor, rho), r / rho];
        let (a, b) = if ends[0] < ends[1] {
            (ends[0], ends[1])
        } else {
            (ends[1], ends[0])
        };
        for e in [a, b] {
            if e.is_finite() {
                cap = cap.max(e.abs());
            }
        }
        lo = lo.max(a);
        hi = hi.min(b);
    }
    // unbounded sides come from F -> 0; cut them off well past the data scale
    let cap = 1e3 * cap.max(1.0);
    let lo = lo.max(-cap);
    let hi = hi.min(cap);
    (lo < hi).then_some((lo, hi))
}

/// `r / f`, taking `f = 0` as approached from the side of `toward`.
fn div_limit(r: f64, f: f64, toward: f64) -> f64 {
    if f.is_infinite() {
        0.0
    } else if f == 0.0 {
        if (r > 0.0) == (toward > 0.0) {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        r / f
    }
}

fn depths_for(r_i: &[f64], r_o: f64, cam: &XSlitCamera) -> Option<Vec<f64>> {
    r_i.iter()
        .map(|&r| depth_from_ar(r, r_o, cam).ok())
        .collect()
}

/// `dz/dr_o` of `depth_from_ar` at fixed `r_i`.
fn depth_slope(r_i: f64, r_o: f64, cam: &XSlitCamera) -> f64 {
    let (z1, z2) = (cam.z1(), cam.z2());
    let den = z1 * r_i - z2 * r_o;
    z1 * z2 * r_i * (z2 - z1) / (den * den)
}

fn check_inputs(r_i: &[f64], needed: usize, cam: &XSlitCamera) -> Result<(), InferenceError> {
    if r_i.len() < needed {
        return Err(InferenceError::TooFewObservations {
            needed,
            got: r_i.len(),
        });
    }
    if r_i.iter().any(|r| !r.is_finite()) {
        return Err(InferenceError::NonFinite);
    }
    if cam.is_pinhole_degenerate() {
        return Err(InferenceError::DegenerateCamera);
    }
    for i in 0..r_i.len() {
        for j in i + 1..r_i.len() {
            let scale = r_i[i].abs().max(r_i[j].abs());
            if (r_i[i] - r_i[j]).abs() <= REL_EPS * scale {
                return Err(InferenceError::IndistinctObservations(i, j));
            }
        }
    }
    Ok(())
}

/// Recovers the shared base ratio and the depths of evenly spaced shapes.
///
/// `r_i` must be ordered along depth (nearest first or farthest first).
pub fn solve_equal_distance_prior(
    r_i: &[f64],
    cam: &XSlitCamera,
) -> Result<EqualDistanceSolution, InferenceError> {
    check_inputs(r_i, 3, cam)?;
    let (lo, hi) = feasible_interval(r_i, cam).ok_or(InferenceError::NoRootInBracket)?;
    let r_o = if r_i.len() == 3 {
        solve_three(r_i, cam, lo, hi)?
    } else {
        solve_least_squares(r_i, cam, lo, hi)?
    };
    let depths = depths_for(r_i, r_o, cam).ok_or(InferenceError::NoRootInBracket)?;
    let residual = spacing_residuals(&depths)
        .map(|res| libm::sqrt(res.iter().map(|r| r * r).sum::<f64>() / res.len() as f64))
        .unwrap_or(f64::INFINITY);
    Ok(EqualDistanceSolution {
        r_o,
        depths,
        residual,
    })
}

fn scan_grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let margin = 1e-9 * (hi - lo);
    let (a, b) = (lo + margin, hi - margin);
    (0..SCAN_POINTS).map(move |i| a + (b - a) * i as f64 / (SCAN_POINTS - 1) as f64)
}

fn solve_three(r_i: &[f64], cam: &XSlitCamera, lo: f64, hi: f64) -> Result<f64, InferenceError> {
    let g = |r_o: f64| -> Option<f64> {
        let z = depths_for(r_i, r_o, cam)?;
        Some(z[0] + z[2] - 2.0 * z[1])
    };
    let mut roots: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for x in scan_grid(lo, hi) {
        let Some(gx) = g(x) else {
            prev = None;
            continue;
        };
        if gx == 0.0 {
            roots.push(x);
        } else if let Some((px, pg)) = prev {
            if pg != 0.0 && (pg < 0.0) != (gx < 0.0) {
                roots.push(refine_root(&g, px, pg, x, gx));
            }
        }
        prev = Some((x, gx));
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(b.abs()));
    match roots.len() {
        0 => Err(InferenceError::NoRootInBracket),
        1 => Ok(roots[0]),
        _ => Err(InferenceError::AmbiguousRoot(roots)),
    }
}

/// Bisection safeguarded secant on a sign-changing bracket.
fn refine_root(g: &impl Fn(f64) -> Option<f64>, mut a: f64, mut ga: f64, mut b: f64, mut gb: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let secant = b - gb * (b - a) / (gb - ga);
        let inside = secant > a.min(b) && secant < a.max(b);
        let x = if inside { secant } else { mid };
        let Some(gx) = g(x) else {
            return mid;
        };
        if gx == 0.0 {
            return x;
        }
        if (gx < 0.0) == (ga < 0.0) {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
        // a secant step that lands next to the same end every time stalls; bisect instead
        let m = 0.5 * (a + b);
        if let Some(gm) = g(m) {
            if gm == 0.0 {
                return m;
            }
            if (gm < 0.0) == (ga < 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
                gb = gm;
            }
        }
        if (b - a).abs() <= ROOT_REL_TOL * a.abs().max(b.abs()) {
            break;
        }
    }
    if ga.abs() < gb.abs() {
        a
    } else {
        b
    }
}

/// Second differences of consecutive depths divided by the total span.
fn spacing_residuals(z: &[f64]) -> Option<Vec<f64>> {
    let span = z[z.len() - 1] - z[0];
    if span == 0.0 || !span.is_finite() {
        return None;
    }
    Some(
        z.windows(3)
            .map(|w| (w[0] + w[2] - 2.0 * w[1]) / span)
            .collect(),
    )
}

fn objective(r_i: &[f64], r_o: f64, cam: &XSlitCamera) -> Option<f64> {
    let z = depths_for(r_i, r_o, cam)?;
    let res = spacing_residuals(&z)?;
    Some(res.iter().map(|r| r * r).sum())
}

fn solve_least_squares(
    r_i: &[f64],
    cam: &XSlitCamera,
    lo: f64,
    hi: f64,
) -> Result<f64, InferenceError> {
    let (best, _) = scan_grid(lo, hi)
        .filter_map(|x| objective(r_i, x, cam).map(|h| (x, h)))
        .fold(None, |acc: Option<(f64, f64)>, (x, h)| match acc {
            Some((_, bh)) if bh <= h => acc,
            _ => Some((x, h)),
        })
        .ok_or(InferenceError::NoRootInBracket)?;

    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let mut x = golden_section(|t| objective(r_i, t, cam), &mut a, &mut b);
    for _ in 0..50 {
        let Some(next) = gauss_newton_step(r_i, x, cam) else {
            break;
        };
        let (Some(hn), Some(hx)) = (objective(r_i, next, cam), objective(r_i, x, cam)) else {
            break;
        };
        if !(next > lo && next < hi) || hn > hx {
            break;
        }
        let done = (next - x).abs() <= ROOT_REL_TOL * x.abs();
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

fn golden_section(f: impl Fn(f64) -> Option<f64>, a: &mut f64, b: &mut f64) -> f64 {
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let eval = |t: f64| f(t).unwrap_or(f64::INFINITY);
    let mut c = *b - inv_phi * (*b - *a);
    let mut d = *a + inv_phi * (*b - *a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..200 {
        if (*b - *a).abs() <= ROOT_REL_TOL * a.abs().max(b.abs()) {
            break;
        }
        if fc < fd {
            *b = d;
            d = c;
            fd = fc;
            c = *b - inv_phi * (*b - *a);
            fc = eval(c);
        } else {
            *a = c;
            c = d;
            fc = fd;
            d = *a + inv_phi * (*b - *a);
            fd = eval(d);
        }
    }
    0.5 * (*a + *b)
}

fn gauss_newton_step(r_i: &[f64], r_o: f64, cam: &XSlitCamera) -> Option<f64> {
    let z = depths_for(r_i, r_o, cam)?;
    let dz: Vec<f64> = r_i.iter().map(|&r| depth_slope(r, r_o, cam)).collect();
    let n = z.len();
    let span = z[n - 1] - z[0];
    let dspan = dz[n - 1] - dz[0];
    if span == 0.0 {
        return None;
    }
    let (mut jtj, mut jtr) = (0.0, 0.0);
    for j in 1..n - 1 {
        let num = z[j - 1] + z[j + 1] - 2.0 * z[j];
        let dnum = dz[j - 1] + dz[j + 1] - 2.0 * dz[j];
        let res = num / span;
        let jac = (dnum * span - num * dspan) / (span * span);
        jtj += jac * jac;
        jtr += jac * res;
    }
    (jtj > 0.0).then(|| r_o - jtr / jtj)
}
