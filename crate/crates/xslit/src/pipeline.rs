//! Render, measure, infer sparse depths, propagate, and score against ground
//! truth.
//!
//! Measurement per observation:
//! * ellipse (projected circle): aspect ratio from boundary moments, base
//!   ratio 1, depth by inverting the aspect-ratio model;
//! * polygon in a `group`: side components, joint shape-prior solve per group;
//! * polyline of a frontal line: total-least-squares direction, Manhattan
//!   classification with the scene's directions.
//!
//! Each inferred depth becomes one pixel anchor. Observations are measured in
//! parallel and collected in scene order, so results do not depend on the
//! thread count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xslit_core::ddar::depth_from_ar;
use xslit_core::inference::{classify_line_groups, solve_shape_prior, LineObs, RectObservation};
use xslit_core::propagation::{propagate, Anchor, Propagation, SparseDepth};
use xslit_core::scene::{
    fit_line, measure_ellipse_ar, perturb, rasterize, render_vector, ImageSpec, NoiseSpec,
    ObservationKind, Raster, Scene, Shape, VectorObservation,
};
use xslit_core::{Point2, XSlitCamera};

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::io::observations::{kind_name, reason_name};
use crate::io::{write_depth_map, write_json, write_pgm16, write_ppm, CameraDoc, SceneFile};

pub const METRICS_SCHEMA_VERSION: u32 = 1;

/// One sparse depth with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorReport {
    pub id: u32,
    pub kind: String,
    pub method: String,
    /// Pixel carrying the anchor; `null` when it falls outside the frame.
    pub pixel: Option<[usize; 2]>,
    pub true_depth: f64,
    pub estimated_depth: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorSummary {
    pub count: usize,
    pub mean_rel_error: Option<f64>,
    pub max_rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMetrics {
    pub pixels_with_truth: usize,
    pub tolerance: f64,
    pub fraction_within_tolerance: f64,
    pub mean_rel_error: Option<f64>,
    pub median_rel_error: Option<f64>,
    pub max_rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationMetrics {
    pub regions: usize,
    pub labels: usize,
    pub low_confidence_regions: usize,
    pub energy: f64,
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub schema_version: u32,
    pub camera: CameraDoc,
    pub noise_sigma: f64,
    pub seed: u64,
    pub image: [usize; 2],
    pub anchors: Vec<AnchorReport>,
    pub skipped: Vec<Skipped>,
    pub anchor_summary: AnchorSummary,
    pub dense: DenseMetrics,
    pub propagation: PropagationMetrics,
}

/// Sparse stage output: measured depths without propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Sparse {
    pub spec: ImageSpec,
    pub raster: Raster,
    pub observations: Vec<VectorObservation>,
    pub anchors: Vec<AnchorReport>,
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub sparse: Sparse,
    pub propagation: Propagation,
    pub metrics: Metrics,
}

enum Measured {
    Depth { depth: f64, method: &'static str },
    Rect(RectObservation),
    Line(f64),
    Skip(String),
}

fn measure(obs: &VectorObservation, shape: &Shape, grouped: bool, cam: &XSlitCamera) -> Measured {
    match (obs.kind, shape) {
        (ObservationKind::Ellipse, Shape::FrontalCircle { .. }) => {
            let ar = match measure_ellipse_ar(&obs.points, cam.basis()) {
                Ok(ar) => ar,
                Err(e) => return Measured::Skip(e.code().to_owned()),
            };
            // the sign of r_i / r_o is fixed by the camera in the valid domain
            let sign = (cam.z1() * cam.z2()).signum();
            match depth_from_ar(sign * ar, 1.0, cam) {
                Ok(depth) => Measured::Depth {
                    depth,
                    method: "ellipse_aspect_ratio",
                },
                Err(e) => Measured::Skip(e.code().to_owned()),
            }
        }
        (ObservationKind::Polygon, Shape::FrontalRect { .. }) if grouped => {
            match obs.rect_sides(cam) {
                Some(r) => Measured::Rect(r),
                None => Measured::Skip("degenerate_rectangle".into()),
            }
        }
        (ObservationKind::Polygon, _) => Measured::Skip("no_shape_prior".into()),
        (ObservationKind::Polyline, Shape::FrontalLine { .. }) => match fit_line(&obs.points) {
            Ok(fit) => Measured::Line(fit.direction_angle),
            Err(e) => Measured::Skip(e.code().to_owned()),
        },
        (ObservationKind::Polyline, _) => Measured::Skip("non_frontal".into()),
        _ => Measured::Skip("unsupported".into()),
    }
}

/// Point of the observation that carries its anchor.
fn anchor_point(obs: &VectorObservation) -> Point2 {
    match obs.kind {
        ObservationKind::Polygon => obs.centroid(),
        ObservationKind::Ellipse => obs.points[0],
        ObservationKind::Polyline => obs.points[obs.points.len() / 2],
    }
}

fn image_spec(file: &SceneFile, exact: &[VectorObservation], s: &Settings) -> ImageSpec {
    match file.image {
        Some(spec) => spec,
        None => ImageSpec::fit(exact, s.width, s.height, s.margin).with_background(file.scene.background),
    }
}

/// Renders the scene and infers one depth per measurable observation.
pub fn sparse_stage(file: &SceneFile, cam: &XSlitCamera, s: &Settings) -> Result<Sparse> {
    let scene: &Scene = &file.scene;
    if scene.primitives.is_empty() {
        return Err(Error::validation("empty_scene", "scene has no primitives"));
    }
    scene.validate(cam)?;
    let rendered = render_vector(scene, cam);
    let mut skipped: Vec<Skipped> = rendered
        .failures
        .iter()
        .map(|(id, e)| Skipped {
            id: *id,
            reason: e.code().to_owned(),
        })
        .collect();
    let spec = image_spec(file, &rendered.observations, s);
    let raster = rasterize(&rendered.observations, &spec)?;
    let observations = perturb(&rendered.observations, &NoiseSpec::new(s.noise_sigma, s.seed));

    let by_id: BTreeMap<u32, _> = scene.primitives.iter().map(|p| (p.id, p)).collect();
    let measured: Vec<Measured> = observations
        .par_iter()
        .map(|o| {
            let prim = by_id[&o.id];
            measure(o, &prim.shape, prim.group.is_some(), cam)
        })
        .collect();

    let mut depths: Vec<Option<(f64, &'static str)>> = vec![None; observations.len()];
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut lines: Vec<(usize, LineObs)> = Vec::new();
    for (i, m) in measured.iter().enumerate() {
        let id = observations[i].id;
        match m {
            Measured::Depth { depth, method } => depths[i] = Some((*depth, method)),
            Measured::Rect(_) => {
                let g = by_id[&id].group.as_deref().expect("grouped rectangle");
                groups.entry(g).or_default().push(i);
            }
            Measured::Line(angle) => lines.push((i, LineObs::new(*angle))),
            Measured::Skip(reason) => skipped.push(Skipped {
                id,
                reason: reason.clone(),
            }),
        }
    }

    for members in groups.values() {
        let rects: Vec<RectObservation> = members
            .iter()
            .map(|&i| match measured[i] {
                Measured::Rect(r) => r,
                _ => unreachable!("group members are rectangles"),
            })
            .collect();
        match solve_shape_prior(&rects, cam) {
            Ok(sol) => {
                for (&i, &z) in members.iter().zip(&sol.depths) {
                    depths[i] = Some((z, "shape_prior"));
                }
            }
            Err(e) => skipped.extend(members.iter().map(|&i| Skipped {
                id: observations[i].id,
                reason: e.code().to_owned(),
            })),
        }
    }

    if !lines.is_empty() {
        let obs: Vec<LineObs> = lines.iter().map(|&(_, l)| l).collect();
        match classify_line_groups(&obs, cam, &scene.manhattan) {
            Ok(res) => {
                for c in &res.classified {
                    depths[lines[c.index].0] = Some((c.depth, "line_slope"));
                }
                for u in &res.unclassified {
                    skipped.push(Skipped {
                        id: observations[lines[u.index].0].id,
                        reason: reason_name(u.reason).to_owned(),
                    });
                }
            }
            Err(e) => skipped.extend(lines.iter().map(|&(i, _)| Skipped {
                id: observations[i].id,
                reason: e.code().to_owned(),
            })),
        }
    }

    let mut anchors = Vec::new();
    for (o, d) in observations.iter().zip(&depths) {
        let Some((depth, method)) = *d else { continue };
        if !depth.is_finite() {
            skipped.push(Skipped {
                id: o.id,
                reason: "non_finite".into(),
            });
            continue;
        }
        let truth = o.depth.0;
        let abs_error = (depth - truth).abs();
        anchors.push(AnchorReport {
            id: o.id,
            kind: kind_name(o.kind).to_owned(),
            method: method.to_owned(),
            pixel: spec.pixel_of(anchor_point(o)).map(|(x, y)| [x, y]),
            true_depth: truth,
            estimated_depth: depth,
            abs_error,
            rel_error: abs_error / truth.abs(),
        });
    }
    skipped.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.reason.cmp(&b.reason)));
    Ok(Sparse {
        spec,
        raster,
        observations,
        anchors,
        skipped,
    })
}

fn summary(anchors: &[AnchorReport]) -> AnchorSummary {
    let n = anchors.len();
    AnchorSummary {
        count: n,
        mean_rel_error: (n > 0).then(|| anchors.iter().map(|a| a.rel_error).sum::<f64>() / n as f64),
        max_rel_error: anchors.iter().map(|a| a.rel_error).reduce(f64::max),
    }
}

fn dense_metrics(p: &Propagation, truth: &[Option<f64>], tol: f64) -> DenseMetrics {
    let mut errs: Vec<f64> = p
        .depth
        .depth
        .iter()
        .zip(truth)
        .filter_map(|(d, t)| t.map(|t| (d - t).abs() / t.abs()))
        .collect();
    errs.sort_by(f64::total_cmp);
    let n = errs.len();
    DenseMetrics {
        pixels_with_truth: n,
        tolerance: tol,
        fraction_within_tolerance: p.depth.fraction_within(truth, tol),
        mean_rel_error: (n > 0).then(|| errs.iter().sum::<f64>() / n as f64),
        median_rel_error: (n > 0).then(|| errs[n / 2]),
        max_rel_error: errs.last().copied(),
    }
}

/// Full pipeline on an already parsed scene and camera.
pub fn run_pipeline(file: &SceneFile, cam: &XSlitCamera, s: &Settings) -> Result<PipelineRun> {
    s.validate()?;
    let sparse = sparse_stage(file, cam, s)?;
    let anchors: Vec<Anchor> = sparse
        .anchors
        .iter()
        .filter_map(|a| a.pixel.map(|[x, y]| Anchor::at_pixel(x, y, a.estimated_depth)))
        .collect();
    if anchors.is_empty() {
        return Err(Error::numerical(
            "no_anchors",
            "no observation yielded a depth inside the frame",
        ));
    }
    let propagation = propagate(&sparse.raster.image, &SparseDepth::new(anchors), &s.propagation.into())?;
    let metrics = Metrics {
        schema_version: METRICS_SCHEMA_VERSION,
        camera: CameraDoc::from(cam),
        noise_sigma: s.noise_sigma,
        seed: s.seed,
        image: [sparse.spec.width, sparse.spec.height],
        anchors: sparse.anchors.clone(),
        skipped: sparse.skipped.clone(),
        anchor_summary: summary(&sparse.anchors),
        dense: dense_metrics(&propagation, &sparse.raster.depth, s.tolerance),
        propagation: PropagationMetrics {
            regions: propagation.graph.regions.len(),
            labels: propagation.problem.labels().len(),
            low_confidence_regions: propagation.blend.low_confidence.iter().filter(|&&b| b).count(),
            energy: propagation.solution.energy,
            sweeps: propagation.solution.sweeps,
        },
    };
    Ok(PipelineRun {
        sparse,
        propagation,
        metrics,
    })
}

/// Output file names of a pipeline run inside its directory.
pub mod files {
    pub const IMAGE: &str = "image.ppm";
    pub const DEPTH: &str = "depth.pgm";
    pub const DEPTH_SIDECAR: &str = "depth.json";
    pub const LABELS: &str = "labels.pgm";
    pub const ANCHORS: &str = "anchors.json";
    pub const METRICS: &str = "metrics.json";
}

/// Writes image, depth map with sidecar, superpixel labels, anchors and metrics.
pub fn write_pipeline_outputs(dir: &Path, run: &PipelineRun) -> Result<Vec<PathBuf>> {
    let p = |name: &str| dir.join(name);
    let img = &run.sparse.raster.image;
    write_ppm(&p(files::IMAGE), img)?;
    write_depth_map(&p(files::DEPTH), &p(files::DEPTH_SIDECAR), &run.propagation.depth)?;
    write_pgm16(
        &p(files::LABELS),
        img.width(),
        img.height(),
        &xslit_core::propagation::label_image(&run.propagation.graph),
    )?;
    write_json(&p(files::ANCHORS), &run.metrics.anchors)?;
    write_json(&p(files::METRICS), &run.metrics)?;
    Ok([
        files::IMAGE,
        files::DEPTH,
        files::DEPTH_SIDECAR,
        files::LABELS,
        files::ANCHORS,
        files::METRICS,
    ]
    .iter()
    .map(|n| p(n))
    .collect())
}
