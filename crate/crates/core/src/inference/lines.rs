//! Splitting observed lines into the two in-plane Manhattan directions.
//!
//! Each line is tried against both 3D directions. A hypothesis is valid when
//! the implied depth is finite and lies past both slits and the sensor, which
//! is the same as the observed ratio sitting inside the attainable `r_i` range.

use alloc::vec::Vec;

use super::slope::{normalize_angle, slope_to_base_ratio};
use super::InferenceError;
use crate::camera::XSlitCamera;
use crate::ddar::{ar_factor, ar_forward, depth_from_ar};
use crate::REL_EPS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineObs {
    direction_angle: f64,
    pub depth_estimate: Option<f64>,
}

impl LineObs {
    pub fn new(direction_angle: f64) -> Self {
        Self {
            direction_angle: normalize_angle(direction_angle),
            depth_estimate: None,
        }
    }

    pub fn with_depth_estimate(mut self, z: f64) -> Self {
        self.depth_estimate = Some(z);
        self
    }

    /// Image direction in `[0, pi)`.
    pub fn direction_angle(&self) -> f64 {
        self.direction_angle
    }
}

/// 3D directions of horizontal and vertical scene lines, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManhattanDirections {
    pub horizontal: f64,
    pub vertical: f64,
}

impl Default for ManhattanDirections {
    fn default() -> Self {
        Self {
            horizontal: 0.0,
            vertical: core::f64::consts::FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ManhattanGroup {
    Horizontal,
    Vertical,
}

impl ManhattanGroup {
    pub fn as_str(&self) -> &'static str {
        match self {
            ManhattanGroup::Horizontal => "horizontal",
            ManhattanGroup::Vertical => "vertical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifiedLine {
    pub index: usize,
    pub group: ManhattanGroup,
    pub depth: f64,
    pub r_i: f64,
    pub r_o: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnclassifiedReason {
    ParallelToSlit,
    NoValidHypothesis,
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnclassifiedLine {
    pub index: usize,
    pub reason: UnclassifiedReason,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineClassification {
    pub classified: Vec<ClassifiedLine>,
    pub unclassified: Vec<UnclassifiedLine>,
}

struct Hypothesis {
    group: ManhattanGroup,
    r_o: f64,
    f_floor: f64,
    f_inf: f64,
}

impl Hypothesis {
    fn try_line(&self, index: usize, r_i: f64, cam: &XSlitCamera) -> Option<ClassifiedLine> {
        let depth = depth_from_ar(r_i, self.r_o, cam).ok()?;
        let floor = cam.depth_floor();
        if !depth.is_finite() || depth <= floor + REL_EPS * cam.depth_scale().max(1.0) {
            return None;
        }
        let factor = r_i / self.r_o;
        let (lo, hi) = if self.f_floor < self.f_inf {
            (self.f_floor, self.f_inf)
        } else {
            (self.f_inf, self.f_floor)
        };
        if !(factor > lo && factor < hi) {
            return None;
        }
        Some(ClassifiedLine {
            index,
            group: self.group,
            depth,
            r_i,
            r_o: self.r_o,
        })
    }
}

fn factor_at_floor(cam: &XSlitCamera) -> f64 {
    let floor = cam.depth_floor();
    let (z1, z2) = (cam.z1(), cam.z2());
    if floor == z2 {
        if z2 * (z2 - z1) / z1 > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else if floor == z1 {
        0.0
    } else {
        ar_factor(floor, cam).unwrap_or(1.0)
    }
}

/// Assigns each line to a Manhattan group and attaches its depth.
///
/// When both groups give a valid depth the line's `depth_estimate` breaks the
/// tie by the smaller `|ar_forward(estimate, r_o) - r_i|`; without an estimate,
/// or on an exact tie, the line is reported as ambiguous.
pub fn classify_line_groups(
    lines: &[LineObs],
    cam: &XSlitCamera,
    manhattan: &ManhattanDirections,
) -> Result<LineClassification, InferenceError> {
    if cam.is_pinhole_degenerate() {
        return Err(InferenceError::DegenerateCamera);
    }
    let f_floor = factor_at_floor(cam);
    let f_inf = cam.slit_ratio();
    let hyps = [
        Hypothesis {
            group: ManhattanGroup::Horizontal,
            r_o: slope_to_base_ratio(manhattan.horizontal, cam)?,
            f_floor,
            f_inf,
        },
        Hypothesis {
            group: ManhattanGroup::Vertical,
            r_o: slope_to_base_ratio(manhattan.vertical, cam)?,
            f_floor,
            f_inf,
        },
    ];

    let mut out = LineClassification::default();
    for (index, line) in lines.iter().enumerate() {
        let r_i = match slope_to_base_ratio(line.direction_angle, cam) {
            Ok(r) => r,
            Err(InferenceError::ParallelToSlit) => {
                out.unclassified.push(UnclassifiedLine {
                    index,
                    reason: UnclassifiedReason::ParallelToSlit,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let valid: Vec<ClassifiedLine> = hyps
            .iter()
            .filter_map(|h| h.try_line(index, r_i, cam))
            .collect();
        let pick = match valid.as_slice() {
            [] => Err(UnclassifiedReason::NoValidHypothesis),
            [one] => Ok(*one),
            [a, b] => break_tie(a, b, line.depth_estimate, cam),
            _ => unreachable!(),
        };
        match pick {
            Ok(c) => out.classified.push(c),
            Err(reason) => out.unclassified.push(UnclassifiedLine { index, reason }),
        }
    }
    Ok(out)
}

fn break_tie(
    a: &ClassifiedLine,
    b: &ClassifiedLine,
    estimate: Option<f64>,
    cam: &XSlitCamera,
) -> Result<ClassifiedLine, UnclassifiedReason> {
    let z = estimate.ok_or(UnclassifiedReason::Ambiguous)?;
    let residual = |c: &ClassifiedLine| {
        ar_forward(z, c.r_o, cam)
            .map(|r| (r - c.r_i).abs())
            .unwrap_or(f64::INFINITY)
    };
    let (ra, rb) = (residual(a), residual(b));
    let scale = a.r_i.abs().max(b.r_i.abs()).max(1.0);
    if (ra - rb).abs() <= REL_EPS * scale || (ra.is_infinite() && rb.is_infinite()) {
        Err(UnclassifiedReason::Ambiguous)
    } else if ra < rb {
        Ok(*a)
    } else {
        Ok(*b)
    }
}
