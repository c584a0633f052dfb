//! Observation and solution documents.
//!
//! Inputs: rectangles `[{"kappa_u":…, "kappa_v":…}]`, aspect ratios
//! `[{"r_i":…}]`, lines `[{"angle_deg":…, "group":…, "depth":…}]` where
//! `group` and `depth` are optional. Line output uses the same shape with
//! both fields filled.

use serde::{Deserialize, Serialize};
use xslit_core::inference::{ManhattanGroup, RectObservation, UnclassifiedReason};
use xslit_core::scene::{ObservationKind, Rgb, VectorObservation};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectDoc {
    pub kappa_u: f64,
    pub kappa_v: f64,
}

impl From<RectDoc> for RectObservation {
    fn from(d: RectDoc) -> Self {
        RectObservation::new(d.kappa_u, d.kappa_v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioDoc {
    pub r_i: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineDoc {
    pub angle_deg: f64,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub depth: Option<f64>,
}

pub fn parse_group(name: &str) -> Result<ManhattanGroup> {
    match name {
        "horizontal" => Ok(ManhattanGroup::Horizontal),
        "vertical" => Ok(ManhattanGroup::Vertical),
        other => Err(Error::validation(
            "invalid_group",
            format!("unknown line group {other:?}; expected \"horizontal\" or \"vertical\""),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapePriorDoc {
    pub depths: Vec<f64>,
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub base_ratio: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualDistanceDoc {
    pub r_o: f64,
    pub depths: Vec<f64>,
}

/// One inferred line; `group` and `depth` are null when unclassified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSolutionDoc {
    pub angle_deg: f64,
    pub group: Option<String>,
    pub depth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDoc {
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorObservationDoc {
    pub id: u32,
    pub kind: String,
    pub color: Rgb,
    /// Depth at the first and last sample.
    pub depth: [f64; 2],
    pub points: Vec<[f64; 2]>,
}

pub fn kind_name(kind: ObservationKind) -> &'static str {
    match kind {
        ObservationKind::Polygon => "polygon",
        ObservationKind::Ellipse => "ellipse",
        ObservationKind::Polyline => "polyline",
    }
}

impl From<&VectorObservation> for VectorObservationDoc {
    fn from(o: &VectorObservation) -> Self {
        Self {
            id: o.id,
            kind: kind_name(o.kind).to_owned(),
            color: o.color,
            depth: [o.depth.0, o.depth.1],
            points: o.points.iter().map(|p| [p.u, p.v]).collect(),
        }
    }
}

pub fn reason_name(reason: UnclassifiedReason) -> &'static str {
    match reason {
        UnclassifiedReason::ParallelToSlit => "parallel_to_slit",
        UnclassifiedReason::NoValidHypothesis => "no_valid_hypothesis",
        UnclassifiedReason::Ambiguous => "ambiguous",
    }
}

/// Rejects empty documents and non-finite numbers.
pub fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::validation("non_finite", "observations must be finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fields_are_optional() {
        let lines: Vec<LineDoc> =
            serde_json::from_str(r#"[{"angle_deg": 30}, {"angle_deg": 60, "group": "vertical", "depth": 4}]"#)
                .unwrap();
        assert_eq!(lines[0].group, None);
        assert_eq!(lines[1].depth, Some(4.0));
        assert_eq!(parse_group("vertical").unwrap(), ManhattanGroup::Vertical);
        assert!(parse_group("diagonal").is_err());
    }

    #[test]
    fn unclassified_lines_serialize_nulls() {
        let doc = LineSolutionDoc {
            angle_deg: 45.0,
            group: None,
            depth: None,
            reason: Some("ambiguous".into()),
        };
        assert_eq!(
            serde_json::to_string(&doc).unwrap(),
            r#"{"angle_deg":45.0,"group":null,"depth":null,"reason":"ambiguous"}"#
        );
    }
}
