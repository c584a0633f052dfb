//! Sparse depth documents: `[{"x":…, "y":…, "depth":…, "confidence":…}]` for
//! pixel anchors or `[{"region":…, "depth":…}]` for region anchors;
//! `confidence` defaults to 1.

use serde::{Deserialize, Serialize};
use xslit_core::propagation::{Anchor, AnchorSite, SparseDepth};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<usize>,
    pub depth: f64,
    #[serde(default = "one")]
    pub confidence: f64,
}

fn one() -> f64 {
    1.0
}

impl AnchorDoc {
    pub fn to_anchor(&self, index: usize) -> Result<Anchor> {
        let site = match (self.x, self.y, self.region) {
            (Some(x), Some(y), None) => AnchorSite::Pixel { x, y },
            (None, None, Some(r)) => AnchorSite::Region(r),
            _ => {
                return Err(Error::validation(
                    "invalid_anchor",
                    format!("anchor {index}: give either x and y, or region"),
                ))
            }
        };
        Ok(Anchor {
            site,
            depth: self.depth,
            confidence: self.confidence,
        })
    }
}

impl From<&Anchor> for AnchorDoc {
    fn from(a: &Anchor) -> Self {
        let (x, y, region) = match a.site {
            AnchorSite::Pixel { x, y } => (Some(x), Some(y), None),
            AnchorSite::Region(r) => (None, None, Some(r)),
        };
        Self {
            x,
            y,
            region,
            depth: a.depth,
            confidence: a.confidence,
        }
    }
}

pub fn to_sparse(docs: &[AnchorDoc]) -> Result<SparseDepth> {
    let anchors = docs
        .iter()
        .enumerate()
        .map(|(i, d)| d.to_anchor(i))
        .collect::<Result<_>>()?;
    Ok(SparseDepth::new(anchors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_and_region_sites() {
        let docs: Vec<AnchorDoc> = serde_json::from_str(
            r#"[{"x": 3, "y": 4, "depth": 10}, {"region": 2, "depth": 5, "confidence": 0.5}]"#,
        )
        .unwrap();
        let s = to_sparse(&docs).unwrap();
        assert_eq!(s.anchors[0].site, AnchorSite::Pixel { x: 3, y: 4 });
        assert_eq!(s.anchors[0].confidence, 1.0);
        assert_eq!(s.anchors[1].site, AnchorSite::Region(2));
        assert_eq!(AnchorDoc::from(&s.anchors[1]), docs[1]);
    }

    #[test]
    fn mixed_site_is_invalid() {
        let d: AnchorDoc = serde_json::from_str(r#"{"x": 1, "region": 2, "depth": 1}"#).unwrap();
        assert_eq!(d.to_anchor(0).unwrap_err().code, "invalid_anchor");
    }
}
