//! Independent reference implementations used by the test suites.

#![allow(dead_code)]

/// Sensor point of the ray through `p` that meets both slits, built from
/// Cartesian ray geometry. Slit `i` is the line through `(0, 0, z_i)` with
/// direction `(cos theta_i, sin theta_i, 0)`; the sensor is `z = 0`.
///
/// The ray is `p + s (dx, dy, -1)` parameterised by depth drop `s`. Meeting
/// slit `i` at `s_i = p.z - z_i` means `(p.xy + s_i d) x dir_i = 0`, which is
/// linear in `(dx, dy)`.
pub fn ray_oracle(z1: f64, z2: f64, theta1: f64, theta2: f64, p: [f64; 3]) -> Option<[f64; 2]> {
    let dirs = [(theta1.cos(), theta1.sin()), (theta2.cos(), theta2.sin())];
    let drops = [p[2] - z1, p[2] - z2];
    // row i: s_i (dx * ey - dy * ex) = -(px * ey - py * ex)
    let mut m = [[0.0; 2]; 2];
    let mut rhs = [0.0; 2];
    for i in 0..2 {
        let (ex, ey) = dirs[i];
        m[i] = [drops[i] * ey, -drops[i] * ex];
        rhs[i] = -(p[0] * ey - p[1] * ex);
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    let dx = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
    let dy = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
    let s0 = p[2];
    Some([p[0] + s0 * dx, p[1] + s0 * dy])
}

/// Central difference of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Relative error with an absolute floor.
pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
