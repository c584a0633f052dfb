//! `xslit` subcommands.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use xslit_core::ddar::{max_discernible_depth_with, AnalysisConfig, DepthRangeFormula};
use xslit_core::inference::{
    classify_line_groups, depth_from_slope, solve_equal_distance_prior, solve_shape_prior, LineObs,
    ManhattanDirections, ManhattanGroup, RectObservation,
};
use xslit_core::propagation::{label_image, propagate};
use xslit_core::scene::{
    perturb, rasterize, render_vector, stitch_panorama, ImageSpec, NoiseSpec, PinholeSweep,
};
use xslit_core::{Point3, XSlitCamera};

use crate::config::{Overrides, PropagationOverrides, Settings};
use crate::error::{Error, Result};
use crate::io::anchors::{to_sparse, AnchorDoc};
use crate::io::frames::{read_frames, write_frames};
use crate::io::fs::ensure_dir;
use crate::io::observations::{
    check_finite, parse_group, reason_name, EqualDistanceDoc, LineDoc, LineSolutionDoc, PointDoc,
    RatioDoc, RectDoc, ShapePriorDoc, VectorObservationDoc,
};
use crate::io::{
    read_camera, read_image, read_json, read_scene, to_json_bytes, write_atomic, write_camera,
    write_depth_map, write_json, write_pgm16, write_ppm, write_scene, SceneFile,
};
use crate::manifest::{sidecar_path, ManifestBuilder, MANIFEST_FILE};
use crate::pipeline::{run_pipeline, write_pipeline_outputs};
use crate::recipes::{
    ar_curve, checkerboard_camera, linspace, pipeline_recipe, Recipe, CHECKERBOARD_DEPTHS,
    CHECKERBOARD_RATIOS,
};

#[derive(Debug, Parser)]
#[command(name = "xslit", version, about = "Crossed-slit camera geometry and depth toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project a point or a whole scene through a camera.
    Project(ProjectArgs),
    /// Aspect-ratio-versus-depth or depth-range curves as CSV.
    Analyze(AnalyzeArgs),
    /// Render a scene: observations, image, ground-truth depth, sweep frames.
    Simulate(SimulateArgs),
    /// Solve for depths from observations.
    Infer(InferArgs),
    /// Dense depth from an image and sparse anchors.
    Propagate(PropagateArgs),
    /// Render, measure, infer, propagate and score a scene.
    Pipeline(PipelineArgs),
    /// Column-stitch numbered frames into a panorama.
    Stitch(StitchArgs),
    /// Run a built-in synthetic reproduction.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Camera JSON.
    #[arg(long)]
    pub camera: PathBuf,
    /// Scene point as `x,y,z`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "scene", required_unless_present = "scene")]
    pub point: Option<String>,
    /// Scene JSON; every primitive is projected.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub camera: PathBuf,
    /// Base aspect ratio.
    #[arg(long = "r-o", default_value_t = 1.0, allow_hyphen_values = true)]
    pub r_o: f64,
    /// Depth sweep `a:b:n`; columns z, r_i, sensitivity.
    #[arg(long, conflicts_with = "epsilon_sweep", required_unless_present = "epsilon_sweep")]
    pub z_range: Option<String>,
    /// Resolution sweep `a:b:n`; columns epsilon, z_max, z_max_printed.
    #[arg(long)]
    pub epsilon_sweep: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InferMode {
    ShapePrior,
    EqualDistance,
    Lines,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long, value_enum)]
    pub mode: InferMode,
    /// Observations JSON.
    #[arg(long)]
    pub obs: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    /// Horizontal Manhattan direction, degrees (lines mode).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub horizontal_deg: f64,
    /// Vertical Manhattan direction, degrees (lines mode).
    #[arg(long, default_value_t = 90.0, allow_hyphen_values = true)]
    pub vertical_deg: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings shared by the rendering and propagation commands.
#[derive(Debug, Args, Default)]
pub struct SettingsArgs {
    /// JSON file of settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Observation noise standard deviation, sensor units.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Frame width when the scene has no image section.
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Relative tolerance of the dense fidelity metric.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Segmentation scale.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub min_size: Option<usize>,
    #[arg(long)]
    pub sigma_g: Option<f64>,
    #[arg(long)]
    pub sigma_c: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Smoothness truncation as a fraction of the label span.
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Number of depth labels.
    #[arg(long)]
    pub labels: Option<usize>,
    /// Skip the MRF restarts from constant labellings.
    #[arg(long)]
    pub no_restarts: bool,
}

impl SettingsArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            noise_sigma: self.noise_sigma,
            seed: self.seed,
            width: self.width,
            height: self.height,
            margin: None,
            tolerance: self.tolerance,
            propagation: PropagationOverrides {
                k: self.k,
                min_size: self.min_size,
                sigma_g: self.sigma_g,
                sigma_c: self.sigma_c,
                lambda: self.lambda,
                truncation: self.truncation,
                n_labels: self.labels,
                mrf_restarts: self.no_restarts.then_some(false),
                label_padding: None,
            },
        }
    }

    fn resolve(&self) -> Result<Settings> {
        Settings::resolve(self.config.as_deref(), &self.overrides())
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also render this many frames of a translating pinhole camera.
    #[arg(long)]
    pub sweep_frames: Option<usize>,
    /// Pinhole translation between frames, scene units.
    #[arg(long, default_value_t = 1.0)]
    pub sweep_step: f64,
    /// Pinhole focal length, scene units.
    #[arg(long, default_value_t = 1.0)]
    pub focal: f64,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    /// PPM image.
    #[arg(long)]
    pub image: PathBuf,
    /// Anchors JSON.
    #[arg(long)]
    pub anchors: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

#[derive(Debug, Args)]
pub struct StitchArgs {
    /// Directory of numbered PPM frames.
    #[arg(long)]
    pub frames: PathBuf,
    /// Column taken from frame 0.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub start: f64,
    /// Column advance per frame; 0 is a pushbroom.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub rate: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub recipe: Recipe,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

/// Writes `bytes` to `out`, or to stdout when `out` is `None`. Returns the
/// written path.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<Option<PathBuf>> {
    match out {
        Some(p) => {
            write_atomic(p, bytes)?;
            Ok(Some(p.to_path_buf()))
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io(Path::new("<stdout>"), e))?;
            Ok(None)
        }
    }
}

fn finish_single(manifest: ManifestBuilder, written: Option<PathBuf>) -> Result<()> {
    if let Some(path) = written {
        let mut m = manifest;
        m.output(&path);
        m.finish(&sidecar_path(&path))?;
    }
    Ok(())
}

fn parse_point(text: &str) -> Result<Point3> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::validation("invalid_point", format!("cannot parse point {text:?}")))?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Point3::new(x, y, z)),
        _ => Err(Error::validation(
            "invalid_point",
            format!("point must be three finite numbers x,y,z, got {text:?}"),
        )),
    }
}

/// `a:b:n` with `n >= 1`.
pub fn parse_range(text: &str) -> Result<(f64, f64, usize)> {
    let bad = || Error::validation("invalid_range", format!("expected a:b:n, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b, n))
}

fn cmd_project(args: &ProjectArgs) -> Result<()> {
    let cam = read_camera(&args.camera)?;
    let mut manifest = ManifestBuilder::new("project");
    manifest.input("camera", &args.camera);
    let bytes = if let Some(scene_path) = &args.scene {
        manifest.input("scene", scene_path);
        let file = read_scene(scene_path)?;
        file.scene.validate(&cam)?;
        let out = render_vector(&file.scene, &cam);
        if let Some((id, e)) = out.failures.first() {
            return Err(Error::validation(e.code(), format!("primitive {id}: {e}")));
        }
        let docs: Vec<VectorObservationDoc> = out.observations.iter().map(Into::into).collect();
        to_json_bytes(&docs)
    } else {
        let p = parse_point(args.point.as_deref().expect("clap requires point or scene"))?;
        let q = cam.project_point(p)?;
        to_json_bytes(&PointDoc { u: q.u, v: q.v })
    };
    let written = emit(args.out.as_deref(), &bytes)?;
    finish_single(manifest, written)
}

fn fmt_row(out: &mut String, cols: &[f64]) {
    for (i, c) in cols.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{c}").expect("string write");
    }
    out.push('\n');
}

/// CSV of the aspect-ratio curve over `depths`.
pub fn curve_csv(cam: &XSlitCamera, r_o: f64, depths: &[f64]) -> Result<String> {
    let mut csv = String::from("z,r_i,sensitivity\n");
    for p in ar_curve(cam, r_o, depths)? {
        fmt_row(&mut csv, &[p.z, p.r_i, p.sensitivity]);
    }
    Ok(csv)
}

fn epsilon_csv(cam: &XSlitCamera, r_o: f64, eps: &[f64]) -> Result<String> {
    let mut csv = String::from("epsilon,z_max,z_max_printed\n");
    for &e in eps {
        let cfg = AnalysisConfig::new(e)?;
        let z = max_discernible_depth_with(r_o, &cfg, cam, DepthRangeFormula::Substitution)?;
        let zp = max_discernible_depth_with(r_o, &cfg, cam, DepthRangeFormula::PrintedCompat)?;
        fmt_row(&mut csv, &[e, z, zp]);
    }
    Ok(csv)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let cam = read_camera(&args.camera)?;
    if !args.r_o.is_finite() {
        return Err(Error::validation("non_finite", "r_o must be finite"));
    }
    let csv = if let Some(r) = &args.z_range {
        let (a, b, n) = parse_range(r)?;
        curve_csv(&cam, args.r_o, &linspace(a, b, n))?
    } else {
        let (a, b, n) = parse_range(args.epsilon_sweep.as_deref().expect("clap requires a sweep"))?;
        epsilon_csv(&cam, args.r_o, &linspace(a, b, n))?
    };
    let mut manifest = ManifestBuilder::new("analyze");
    manifest.input("camera", &args.camera).settings(&serde_json::json!({
        "r_o": args.r_o,
        "z_range": args.z_range,
        "epsilon_sweep": args.epsilon_sweep,
    }));
    let written = emit(args.out.as_deref(), csv.as_bytes())?;
    finish_single(manifest, written)
}

fn lines_solution(lines: &[LineDoc], cam: &XSlitCamera, m: &ManhattanDirections) -> Result<Vec<LineSolutionDoc>> {
    check_finite(lines.iter().map(|l| l.angle_deg))?;
    check_finite(lines.iter().filter_map(|l| l.depth))?;
    let mut out: Vec<LineSolutionDoc> = lines
        .iter()
        .map(|l| LineSolutionDoc {
            angle_deg: l.angle_deg,
            group: None,
            depth: None,
            reason: None,
        })
        .collect();
    let mut free = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        let observed = l.angle_deg.to_radians();
        match l.group.as_deref().map(parse_group).transpose()? {
            Some(g) => {
                let true_angle = match g {
                    ManhattanGroup::Horizontal => m.horizontal,
                    ManhattanGroup::Vertical => m.vertical,
                };
                out[i].group = Some(g.as_str().to_owned());
                match depth_from_slope(observed, true_angle, cam) {
                    Ok(z) => out[i].depth = Some(z),
                    Err(e) => out[i].reason = Some(e.code().to_owned()),
                }
            }
            None => {
                let mut obs = LineObs::new(observed);
                if let Some(z) = l.depth {
                    obs = obs.with_depth_estimate(z);
                }
                free.push((i, obs));
            }
        }
    }
    if !free.is_empty() {
        let obs: Vec<LineObs> = free.iter().map(|&(_, o)| o).collect();
        let res = classify_line_groups(&obs, cam, m)?;
        for c in &res.classified {
            let i = free[c.index].0;
            out[i].group = Some(c.group.as_str().to_owned());
            out[i].depth = Some(c.depth);
        }
        for u in &res.unclassified {
            out[free[u.index].0].reason = Some(reason_name(u.reason).to_owned());
        }
    }
    Ok(out)
}

fn cmd_infer(args: &InferArgs) -> Result<()> {
    let cam = read_camera(&args.camera)?;
    let bytes = match args.mode {
        InferMode::ShapePrior => {
            let docs: Vec<RectDoc> = read_json(&args.obs)?;
            check_finite(docs.iter().flat_map(|d| [d.kappa_u, d.kappa_v]))?;
            let obs: Vec<RectObservation> = docs.into_iter().map(Into::into).collect();
            let s = solve_shape_prior(&obs, &cam)?;
            to_json_bytes(&ShapePriorDoc {
                base_ratio: s.base_ratio(),
                depths: s.depths,
                kappa_x: s.kappa_x,
                kappa_y: s.kappa_y,
                residual: s.residual,
            })
        }
        InferMode::EqualDistance => {
            let docs: Vec<RatioDoc> = read_json(&args.obs)?;
            check_finite(docs.iter().map(|d| d.r_i))?;
            let r_i: Vec<f64> = docs.iter().map(|d| d.r_i).collect();
            let s = solve_equal_distance_prior(&r_i, &cam)?;
            to_json_bytes(&EqualDistanceDoc {
                r_o: s.r_o,
                depths: s.depths,
            })
        }
        InferMode::Lines => {
            let docs: Vec<LineDoc> = read_json(&args.obs)?;
            if !(args.horizontal_deg.is_finite() && args.vertical_deg.is_finite()) {
                return Err(Error::validation("non_finite", "Manhattan angles must be finite"));
            }
            let m = ManhattanDirections {
                horizontal: args.horizontal_deg.to_radians(),
                vertical: args.vertical_deg.to_radians(),
            };
            to_json_bytes(&lines_solution(&docs, &cam, &m)?)
        }
    };
    let mut manifest = ManifestBuilder::new("infer");
    manifest
        .input("camera", &args.camera)
        .input("observations", &args.obs)
        .settings(&serde_json::json!({
            "mode": format!("{:?}", args.mode),
            "horizontal_deg": args.horizontal_deg,
            "vertical_deg": args.vertical_deg,
        }));
    let written = emit(args.out.as_deref(), &bytes)?;
    finish_single(manifest, written)
}

/// File names written by `simulate`.
pub mod sim_files {
    pub const OBSERVATIONS: &str = "observations.json";
    pub const IMAGE: &str = "image.ppm";
    pub const TRUTH_DEPTH: &str = "truth_depth.pgm";
    pub const TRUTH_SIDECAR: &str = "truth_depth.json";
    pub const FRAMES: &str = "frames";
}

#[derive(Serialize)]
struct SimulateSettings<'a> {
    #[serde(flatten)]
    settings: &'a Settings,
    sweep_frames: Option<usize>,
    sweep_step: f64,
    focal: f64,
}

fn frame_spec(file: &SceneFile, cam: &XSlitCamera, s: &Settings) -> ImageSpec {
    let obs = render_vector(&file.scene, cam).observations;
    file.image
        .unwrap_or_else(|| ImageSpec::fit(&obs, s.width, s.height, s.margin))
        .with_background(file.scene.background)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let s = args.settings.resolve()?;
    let cam = read_camera(&args.camera)?;
    let file = read_scene(&args.scene)?;
    if file.scene.primitives.is_empty() {
        return Err(Error::validation("empty_scene", "scene has no primitives"));
    }
    file.scene.validate(&cam)?;
    let rendered = render_vector(&file.scene, &cam);
    if let Some((id, e)) = rendered.failures.first() {
        return Err(Error::validation(e.code(), format!("primitive {id}: {e}")));
    }
    let spec = frame_spec(&file, &cam, &s);
    let raster = rasterize(&rendered.observations, &spec)?;
    let noisy = perturb(&rendered.observations, &NoiseSpec::new(s.noise_sigma, s.seed));

    ensure_dir(&args.out)?;
    let p = |n: &str| args.out.join(n);
    let docs: Vec<VectorObservationDoc> = noisy.iter().map(Into::into).collect();
    write_json(&p(sim_files::OBSERVATIONS), &docs)?;
    write_ppm(&p(sim_files::IMAGE), &raster.image)?;
    // pixels without ground truth are stored as the farthest depth
    let far = raster.depth.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let far = if far.is_finite() { far } else { 0.0 };
    let truth = xslit_core::propagation::DepthMap {
        width: spec.width,
        height: spec.height,
        depth: raster.depth.iter().map(|d| d.unwrap_or(far)).collect(),
    };
    write_depth_map(&p(sim_files::TRUTH_DEPTH), &p(sim_files::TRUTH_SIDECAR), &truth)?;
    let mut outputs = vec![
        p(sim_files::OBSERVATIONS),
        p(sim_files::IMAGE),
        p(sim_files::TRUTH_DEPTH),
        p(sim_files::TRUTH_SIDECAR),
    ];

    if let Some(frames) = args.sweep_frames {
        if frames == 0 || !(args.focal.is_finite() && args.focal > 0.0) || !args.sweep_step.is_finite() {
            return Err(Error::validation(
                "invalid_parameter",
                "sweep needs frames > 0, a positive focal length and a finite step",
            ));
        }
        let mut sweep = PinholeSweep {
            focal: args.focal,
            step: args.sweep_step,
            frames,
            image: spec,
        };
        let mid = sweep.frame_observations(&file.scene, frames / 2);
        sweep.image = file
            .image
            .unwrap_or_else(|| ImageSpec::fit(&mid, s.width, s.height, s.margin))
            .with_background(file.scene.background);
        let sweep = sweep;
        let images = (0..frames)
            .into_par_iter()
            .map(|f| {
                rasterize(&sweep.frame_observations(&file.scene, f), &sweep.image).map(|r| r.image)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        outputs.extend(write_frames(&p(sim_files::FRAMES), &images)?);
    }

    let mut manifest = ManifestBuilder::new("simulate");
    manifest
        .input("camera", &args.camera)
        .input("scene", &args.scene)
        .config(args.settings.config.as_deref())
        .seed(s.seed)
        .settings(&SimulateSettings {
            settings: &s,
            sweep_frames: args.sweep_frames,
            sweep_step: args.sweep_step,
            focal: args.focal,
        })
        .outputs(&outputs);
    manifest.finish(&p(MANIFEST_FILE))?;
    Ok(())
}

/// File names written by `propagate`.
pub mod prop_files {
    pub const DEPTH: &str = "depth.pgm";
    pub const DEPTH_SIDECAR: &str = "depth.json";
    pub const LABELS: &str = "labels.pgm";
}

fn cmd_propagate(args: &PropagateArgs) -> Result<()> {
    let s = args.settings.resolve()?;
    let image = read_image(&args.image)?;
    let docs: Vec<AnchorDoc> = read_json(&args.anchors)?;
    let sparse = to_sparse(&docs)?;
    let run = propagate(&image, &sparse, &s.propagation.into())?;
    ensure_dir(&args.out_dir)?;
    let p = |n: &str| args.out_dir.join(n);
    write_depth_map(&p(prop_files::DEPTH), &p(prop_files::DEPTH_SIDECAR), &run.depth)?;
    write_pgm16(&p(prop_files::LABELS), image.width(), image.height(), &label_image(&run.graph))?;
    let mut manifest = ManifestBuilder::new("propagate");
    manifest
        .input("image", &args.image)
        .input("anchors", &args.anchors)
        .config(args.settings.config.as_deref())
        .settings(&s.propagation)
        .outputs(&[p(prop_files::DEPTH), p(prop_files::DEPTH_SIDECAR), p(prop_files::LABELS)]);
    manifest.finish(&p(MANIFEST_FILE))?;
    Ok(())
}

fn pipeline_into(
    dir: &Path,
    file: &SceneFile,
    cam: &XSlitCamera,
    s: &Settings,
    mut manifest: ManifestBuilder,
) -> Result<()> {
    let run = run_pipeline(file, cam, s)?;
    ensure_dir(dir)?;
    let outputs = write_pipeline_outputs(dir, &run)?;
    manifest.seed(s.seed).settings(s).outputs(&outputs);
    manifest.finish(&dir.join(MANIFEST_FILE))?;
    Ok(())
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<()> {
    let s = args.settings.resolve()?;
    let cam = read_camera(&args.camera)?;
    let file = read_scene(&args.scene)?;
    let mut manifest = ManifestBuilder::new("pipeline");
    manifest
        .input("camera", &args.camera)
        .input("scene", &args.scene)
        .config(args.settings.config.as_deref());
    pipeline_into(&args.out_dir, &file, &cam, &s, manifest)
}

fn cmd_stitch(args: &StitchArgs) -> Result<()> {
    if !(args.start.is_finite() && args.rate.is_finite()) {
        return Err(Error::validation("non_finite", "start and rate must be finite"));
    }
    let frames = read_frames(&args.frames)?;
    let pano = stitch_panorama(&frames, args.start, args.rate)?;
    write_ppm(&args.out, &pano)?;
    let mut manifest = ManifestBuilder::new("stitch");
    manifest
        .input("frames", &args.frames)
        .settings(&serde_json::json!({"start": args.start, "rate": args.rate}))
        .output(&args.out);
    manifest.finish(&sidecar_path(&args.out))?;
    Ok(())
}

fn checkerboard_into(dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let (a, b, n) = CHECKERBOARD_DEPTHS;
    let depths = linspace(a, b, n);
    let mut outputs = Vec::new();
    for ratio in CHECKERBOARD_RATIOS {
        let cam = checkerboard_camera(ratio)?;
        let cam_path = dir.join(format!("camera_{ratio}.json"));
        write_camera(&cam_path, &cam)?;
        let csv_path = dir.join(format!("curve_{ratio}.csv"));
        write_atomic(&csv_path, curve_csv(&cam, 1.0, &depths)?.as_bytes())?;
        outputs.extend([cam_path, csv_path]);
    }
    Ok(outputs)
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<()> {
    let s = args.settings.resolve()?;
    let mut manifest = ManifestBuilder::new(&format!("reproduce {}", args.recipe.name()));
    manifest.config(args.settings.config.as_deref());
    match pipeline_recipe(args.recipe)? {
        None => {
            let outputs = checkerboard_into(&args.out_dir)?;
            manifest.outputs(&outputs);
            manifest.finish(&args.out_dir.join(MANIFEST_FILE))?;
            Ok(())
        }
        Some((cam, file)) => {
            ensure_dir(&args.out_dir)?;
            let (cam_path, scene_path) = (args.out_dir.join("camera.json"), args.out_dir.join("scene.json"));
            write_camera(&cam_path, &cam)?;
            write_scene(&scene_path, &file.scene, file.image.as_ref())?;
            manifest.input("camera", &cam_path).input("scene", &scene_path);
            pipeline_into(&args.out_dir, &file, &cam, &s, manifest)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Project(a) => cmd_project(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Infer(a) => cmd_infer(&a),
        Command::Propagate(a) => cmd_propagate(&a),
        Command::Pipeline(a) => cmd_pipeline(&a),
        Command::Stitch(a) => cmd_stitch(&a),
        Command::Reproduce(a) => cmd_reproduce(&a),
    }
}

/// Parses `args`, runs the command inside the configured thread pool and
/// returns the process exit code. Errors go to stderr as JSON.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = Error::validation("usage", e.to_string().trim_end().to_owned());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    let result = crate::config::with_thread_pool(|| dispatch(cli)).and_then(|r| r);
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_points() {
        assert_eq!(parse_range("1:2:3").unwrap(), (1.0, 2.0, 3));
        assert!(parse_range("1:2:0").is_err());
        assert!(parse_range("1:2").is_err());
        let p = parse_point("1, -1, 4").unwrap();
        assert_eq!((p.x, p.y, p.z), (1.0, -1.0, 4.0));
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("1,2,nan").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
