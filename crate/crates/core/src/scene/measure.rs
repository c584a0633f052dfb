//! Moment-based measurements on projected sample points.

use super::SceneError;
use crate::camera::{Point2, SlitBasis};
use crate::inference::normalize_angle;
use crate::math::{atan2, cos, sin, sqrt};

struct Moments {
    saa: f64,
    sbb: f64,
    sab: f64,
}

impl Moments {
    fn of(points: impl Iterator<Item = (f64, f64)> + Clone) -> Moments {
        let (n, sa, sb) = points
            .clone()
            .fold((0usize, 0.0, 0.0), |(n, a, b), (x, y)| (n + 1, a + x, b + y));
        let inv = 1.0 / n as f64;
        let (ma, mb) = (sa * inv, sb * inv);
        let (saa, sbb, sab) = points.fold((0.0, 0.0, 0.0), |(aa, bb, ab), (x, y)| {
            let (da, db) = (x - ma, y - mb);
            (aa + da * da, bb + db * db, ab + da * db)
        });
        Moments {
            saa: saa * inv,
            sbb: sbb * inv,
            sab: sab * inv,
        }
    }

    /// Eigenvalues `(large, small)` of the covariance.
    fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.saa + self.sbb);
        let half = 0.5 * (self.saa - self.sbb);
        let r = sqrt(half * half + self.sab * self.sab);
        (mean + r, (mean - r).max(0.0))
    }
}

/// Aspect ratio `|ku / kv|` of a projected circle from its boundary samples.
///
/// Samples are expressed in the slit basis and the ratio is the square root of
/// the variance ratio of the two coordinates. Any affine image of a uniformly
/// sampled circle is recovered exactly, including oblique slit bases.
pub fn measure_ellipse_ar(points: &[Point2], basis: &SlitBasis) -> Result<f64, SceneError> {
    if points.len() < 8 {
        return Err(SceneError::TooFewSamples {
            needed: 8,
            got: points.len(),
        });
    }
    let mut coords = alloc::vec::Vec::with_capacity(points.len());
    for p in points {
        let c = basis.decompose([p.u, p.v])?;
        coords.push((c.a, c.b));
    }
    let m = Moments::of(coords.iter().copied());
    let (big, small) = m.eigenvalues();
    if !(big > 0.0) || small <= 1e-15 * big {
        return Err(SceneError::DegenerateEllipse);
    }
    Ok(sqrt(m.saa / m.sbb))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    /// Direction in `[0, pi)`.
    pub direction_angle: f64,
    /// RMS orthogonal distance of the points to the fitted line.
    pub residual: f64,
}

/// Total-least-squares line through the points.
pub fn fit_line(points: &[Point2]) -> Result<LineFit, SceneError> {
    if points.len() < 2 {
        return Err(SceneError::TooFewSamples {
            needed: 2,
            got: points.len(),
        });
    }
    let m = Moments::of(points.iter().map(|p| (p.u, p.v)));
    if !(m.eigenvalues().0 > 0.0) {
        return Err(SceneError::DegeneratePoints);
    }
    let angle = 0.5 * atan2(2.0 * m.sab, m.saa - m.sbb);
    let n = points.len() as f64;
    let (cu, cv) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.u / n, b + p.v / n));
    let (nu, nv) = (-sin(angle), cos(angle));
    let ss = points
        .iter()
        .map(|p| {
            let d = (p.u - cu) * nu + (p.v - cv) * nv;
            d * d
        })
        .sum::<f64>();
    Ok(LineFit {
        direction_angle: normalize_angle(angle),
        residual: sqrt(ss / n),
    })
}
