use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use xslit::io::{read_image, write_ppm};
use xslit::xslit_core::scene::RasterImage;
use xslit::xslit_core::{Point3, XSlitCamera};

fn xslit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xslit"))
        .args(args)
        .env_remove("XSLIT_THREADS")
        .output()
        .expect("spawn xslit")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Exit code and the stable error code from stderr.
fn failure(out: &Output) -> (i32, String) {
    let err: Value = serde_json::from_slice(&out.stderr)
        .unwrap_or_else(|_| panic!("stderr is not JSON: {}", String::from_utf8_lossy(&out.stderr)));
    let code = err["error"]["code"].as_str().expect("error.code").to_owned();
    assert!(err["error"]["message"].is_string());
    (out.status.code().expect("exit code"), code)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn camera_1_2(dir: &Path) -> PathBuf {
    write(dir, "cam.json", r#"{"z1": 1, "z2": 2, "theta1_deg": 0, "theta2_deg": 90}"#)
}

#[test]
fn project_point() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let v = stdout_json(&xslit(&["project", "--camera", s(&cam), "--point", "1,1,4"]));
    assert!((v["u"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((v["v"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn project_to_file_writes_manifest_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let out = dir.path().join("p.json");
    let r = xslit(&["project", "--camera", s(&cam), "--point", "-1,2,5", "--out", s(&out)]);
    assert!(r.status.success());
    assert!(out.exists());
    let m: Value = serde_json::from_slice(&std::fs::read(dir.path().join("p.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "project");
    assert_eq!(m["outputs"][0], s(&out));
}

#[test]
fn missing_camera_is_a_validation_error() {
    let r = xslit(&["project", "--camera", "/nonexistent/cam.json", "--point", "1,1,4"]);
    assert_eq!(failure(&r), (2, "file_not_found".into()));
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let r = xslit(&[flag]);
        assert_eq!(r.status.code(), Some(0));
        assert!(!r.stdout.is_empty());
    }
    let r = xslit(&["pipeline", "--help"]);
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn usage_errors_are_json() {
    assert_eq!(failure(&xslit(&["project", "--bogus"])).0, 2);
    assert_eq!(failure(&xslit(&[])), (2, "usage".into()));
}

#[test]
fn point_on_slit_plane_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let r = xslit(&["project", "--camera", s(&cam), "--point", "1,1,2"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn project_scene_lists_observations() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let scene = write(
        dir.path(),
        "scene.json",
        r#"{"primitives": [{"kind": "frontal_circle", "center": [0, 0], "radius": 1, "depth": 4}]}"#,
    );
    let v = stdout_json(&xslit(&["project", "--camera", s(&cam), "--scene", s(&scene)]));
    let obs = v.as_array().unwrap();
    assert_eq!(obs.len(), 1);
    assert_eq!(obs[0]["kind"], "ellipse");
    assert_eq!(obs[0]["id"], 1);
}

fn csv_rows(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_owned();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn analyze_curves() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let r = xslit(&["analyze", "--camera", s(&cam), "--z-range", "3:6:4"]);
    assert!(r.status.success());
    let (header, rows) = csv_rows(std::str::from_utf8(&r.stdout).unwrap());
    assert_eq!(header, "z,r_i,sensitivity");
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], vec![3.0, 4.0, 2.0]);

    let r = xslit(&["analyze", "--camera", s(&cam), "--z-range", "5:9:1"]);
    let (_, rows) = csv_rows(std::str::from_utf8(&r.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 5.0);
}

#[test]
fn analyze_degenerate_camera_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cam = write(dir.path(), "pin.json", r#"{"z1": 2, "z2": 2}"#);
    let r = xslit(&["analyze", "--camera", s(&cam), "--r-o", "1.5", "--z-range", "3:30:10"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let (_, rows) = csv_rows(std::str::from_utf8(&r.stdout).unwrap());
    assert!(rows.iter().all(|row| row[1] == 1.5 && row[2] == 0.0));
}

#[test]
fn analyze_epsilon_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cam = write(dir.path(), "cam.json", r#"{"z1": 2, "z2": 4}"#);
    let r = xslit(&["analyze", "--camera", s(&cam), "--epsilon-sweep", "0.01:0.02:2"]);
    let (header, rows) = csv_rows(std::str::from_utf8(&r.stdout).unwrap());
    assert_eq!(header, "epsilon,z_max,z_max_printed");
    assert!((rows[0][1] - 404.0).abs() < 1e-9);
    assert!((rows[0][2] - 402.0).abs() < 1e-9);
    assert!(rows[1][1] < rows[0][1]);
}

#[test]
fn analyze_rejects_bad_range() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let r = xslit(&["analyze", "--camera", s(&cam), "--z-range", "3:6:0"]);
    assert_eq!(failure(&r), (2, "invalid_range".into()));
}

#[test]
fn infer_shape_prior() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    // unit square at depths 3 and 4
    let obs = write(
        dir.path(),
        "rects.json",
        r#"[{"kappa_u": -2, "kappa_v": -0.5}, {"kappa_u": -1, "kappa_v": -0.3333333333333333}]"#,
    );
    let v = stdout_json(&xslit(&["infer", "--mode", "shape-prior", "--obs", s(&obs), "--camera", s(&cam)]));
    let depths: Vec<f64> = v["depths"].as_array().unwrap().iter().map(|d| d.as_f64().unwrap()).collect();
    assert!((depths[0] - 3.0).abs() < 1e-9 && (depths[1] - 4.0).abs() < 1e-9, "{depths:?}");
    assert!((v["kappa_x"].as_f64().unwrap().abs() - 1.0).abs() < 1e-9);

    let one = write(dir.path(), "one.json", r#"[{"kappa_u": -2, "kappa_v": -0.5}]"#);
    let r = xslit(&["infer", "--mode", "shape-prior", "--obs", s(&one), "--camera", s(&cam)]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn infer_equal_distance() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let obs = write(dir.path(), "ar.json", r#"[{"r_i": 4}, {"r_i": 3}, {"r_i": 2.6666666666666665}]"#);
    let v = stdout_json(&xslit(&["infer", "--mode", "equal-distance", "--obs", s(&obs), "--camera", s(&cam)]));
    assert!((v["r_o"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let depths: Vec<f64> = v["depths"].as_array().unwrap().iter().map(|d| d.as_f64().unwrap()).collect();
    for (got, want) in depths.iter().zip([3.0, 4.0, 5.0]) {
        assert!((got - want).abs() < 1e-8);
    }
}

fn observed_angle(cam: &XSlitCamera, dir_deg: f64, z: f64) -> f64 {
    let (c, sn) = (dir_deg.to_radians().cos(), dir_deg.to_radians().sin());
    let a = cam.project_point(Point3::new(0.3, -0.2, z)).unwrap();
    let b = cam.project_point(Point3::new(0.3 + c, -0.2 + sn, z)).unwrap();
    (b.v - a.v).atan2(b.u - a.u).to_degrees()
}

#[test]
fn infer_lines_with_explicit_groups() {
    let dir = tempfile::tempdir().unwrap();
    let cam_path = write(dir.path(), "cam.json", r#"{"z1": 1, "z2": 2, "theta1_deg": 0, "theta2_deg": 90}"#);
    let cam = XSlitCamera::po_xslit(1.0, 2.0).unwrap();
    // horizontal Manhattan direction at 30 degrees, vertical at 120
    let lines = [(30.0, "horizontal", 5.0), (120.0, "vertical", 7.0), (30.0, "horizontal", 3.5)];
    let docs: Vec<Value> = lines
        .iter()
        .map(|&(d, g, z)| serde_json::json!({"angle_deg": observed_angle(&cam, d, z), "group": g}))
        .collect();
    let obs = write(dir.path(), "lines.json", &serde_json::to_string(&docs).unwrap());
    let v = stdout_json(&xslit(&[
        "infer", "--mode", "lines", "--obs", s(&obs), "--camera", s(&cam_path),
        "--horizontal-deg", "30", "--vertical-deg", "120",
    ]));
    let out = v.as_array().unwrap();
    for (doc, &(_, g, z)) in out.iter().zip(&lines) {
        assert_eq!(doc["group"], g);
        assert!((doc["depth"].as_f64().unwrap() - z).abs() < 1e-9 * z, "{doc}");
    }
}

#[test]
fn infer_lines_parallel_to_slit_reports_reason() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let obs = write(dir.path(), "lines.json", r#"[{"angle_deg": 0, "group": "horizontal"}]"#);
    let v = stdout_json(&xslit(&["infer", "--mode", "lines", "--obs", s(&obs), "--camera", s(&cam)]));
    assert!(v[0]["depth"].is_null());
    assert!(v[0]["reason"].is_string());
}

#[test]
fn infer_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let obs = write(dir.path(), "bad.json", "[{\"kappa_u\": ");
    let r = xslit(&["infer", "--mode", "shape-prior", "--obs", s(&obs), "--camera", s(&cam)]);
    assert_eq!(failure(&r), (2, "invalid_json".into()));
}

#[test]
fn empty_scene_pipeline_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let scene = write(dir.path(), "scene.json", r#"{"primitives": []}"#);
    let out = dir.path().join("out");
    let r = xslit(&["pipeline", "--scene", s(&scene), "--camera", s(&cam), "--out-dir", s(&out)]);
    assert_eq!(failure(&r), (2, "empty_scene".into()));
}

#[test]
fn scene_without_anchors_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let scene = write(
        dir.path(),
        "scene.json",
        r#"{"primitives": [{"kind": "frontal_rect", "center": [0, 0], "kappa_x": 1, "kappa_y": 1, "depth": 5}]}"#,
    );
    let out = dir.path().join("out");
    let r = xslit(&["pipeline", "--scene", s(&scene), "--camera", s(&cam), "--out-dir", s(&out)]);
    assert_eq!(failure(&r), (3, "no_anchors".into()));
}

#[test]
fn invalid_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cam = camera_1_2(dir.path());
    let r = Command::new(env!("CARGO_BIN_EXE_xslit"))
        .args(["project", "--camera", s(&cam), "--point", "1,1,4"])
        .env("XSLIT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
}

fn frame(width: usize, height: usize, shade: u8) -> RasterImage {
    let mut img = RasterImage::rgb(width, height, [0, 0, 0]);
    for y in 0..height {
        for x in 0..width {
            img.put_rgb(x, y, [shade, x as u8, y as u8]);
        }
    }
    img
}

#[test]
fn stitch_pushbroom_single_frame() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    std::fs::create_dir(&frames).unwrap();
    write_ppm(&frames.join("frame_0000.ppm"), &frame(8, 5, 9)).unwrap();
    let out = dir.path().join("pano.ppm");
    let r = xslit(&["stitch", "--frames", s(&frames), "--start", "3", "--rate", "0", "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let pano = read_image(&out).unwrap();
    assert_eq!((pano.width(), pano.height()), (1, 5));
    assert_eq!(pano.rgb_at(0, 2), [9, 3, 2]);
    assert!(dir.path().join("pano.ppm.manifest.json").exists());
}

#[test]
fn stitch_takes_advancing_columns() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    std::fs::create_dir(&frames).unwrap();
    for i in 0..4u8 {
        write_ppm(&frames.join(format!("frame_{i:04}.ppm")), &frame(6, 3, 10 * i)).unwrap();
    }
    let out = dir.path().join("pano.ppm");
    let r = xslit(&["stitch", "--frames", s(&frames), "--start", "1", "--rate", "1", "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let pano = read_image(&out).unwrap();
    assert_eq!(pano.width(), 4);
    for i in 0..4 {
        assert_eq!(pano.rgb_at(i, 0), [10 * i as u8, 1 + i as u8, 0]);
    }
}

#[test]
fn stitch_rejects_mixed_frame_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    std::fs::create_dir(&frames).unwrap();
    write_ppm(&frames.join("frame_0000.ppm"), &frame(6, 3, 0)).unwrap();
    write_ppm(&frames.join("frame_0001.ppm"), &frame(7, 3, 0)).unwrap();
    let out = dir.path().join("pano.ppm");
    let r = xslit(&["stitch", "--frames", s(&frames), "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn simulate_then_propagate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cards");
    let r = xslit(&["reproduce", "cards", "--out-dir", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    let sim = dir.path().join("sim");
    let r = xslit(&[
        "simulate", "--scene", s(&out.join("scene.json")), "--camera", s(&out.join("camera.json")),
        "--out", s(&sim), "--width", "160", "--height", "120", "--noise-sigma", "0.01", "--seed", "3",
        "--sweep-frames", "3",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for f in ["observations.json", "image.ppm", "truth_depth.pgm", "truth_depth.json", "manifest.json"] {
        assert!(sim.join(f).exists(), "{f}");
    }
    let img = read_image(&sim.join("image.ppm")).unwrap();
    assert_eq!((img.width(), img.height()), (160, 120));
    let frames: Vec<_> = std::fs::read_dir(sim.join("frames")).unwrap().collect();
    assert_eq!(frames.len(), 3);
    let m: Value = serde_json::from_slice(&std::fs::read(sim.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 3);
    assert_eq!(m["settings"]["noise_sigma"], 0.01);

    let anchors = write(
        dir.path(),
        "anchors.json",
        r#"[{"x": 20, "y": 60, "depth": 300}, {"x": 140, "y": 60, "depth": 450, "confidence": 0.5}]"#,
    );
    let prop = dir.path().join("prop");
    let r = xslit(&[
        "propagate", "--image", s(&sim.join("image.ppm")), "--anchors", s(&anchors),
        "--out-dir", s(&prop), "--labels", "16",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let side: Value = serde_json::from_slice(&std::fs::read(prop.join("depth.json")).unwrap()).unwrap();
    let (lo, hi) = (side["depth_min"].as_f64().unwrap(), side["depth_max"].as_f64().unwrap());
    // labels span the anchor range plus 10% padding on each side
    assert!(lo >= 285.0 && hi <= 465.0 && lo < hi, "{side}");
    assert!(prop.join("labels.pgm").exists());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("arch");
    assert!(xslit(&["reproduce", "arch", "--out-dir", s(&out)]).status.success());
    let cfg = write(dir.path(), "cfg.json", r#"{"seed": 11, "noise_sigma": 0.001, "propagation": {"n_labels": 20}}"#);
    let run = dir.path().join("run");
    let r = xslit(&[
        "pipeline", "--scene", s(&out.join("scene.json")), "--camera", s(&out.join("camera.json")),
        "--out-dir", s(&run), "--config", s(&cfg), "--seed", "12",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let m: Value = serde_json::from_slice(&std::fs::read(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 12);
    assert_eq!(m["settings"]["noise_sigma"], 0.001);
    assert_eq!(m["settings"]["propagation"]["n_labels"], 20);
    assert_eq!(m["config_paths"][0], s(&cfg));
    let metrics: Value = serde_json::from_slice(&std::fs::read(run.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["schema_version"], 1);
    assert_eq!(metrics["propagation"]["labels"], 20);

    let bad = write(dir.path(), "bad.json", r#"{"sede": 1}"#);
    let r = xslit(&[
        "pipeline", "--scene", s(&out.join("scene.json")), "--camera", s(&out.join("camera.json")),
        "--out-dir", s(&run), "--config", s(&bad),
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn reproduce_checkerboard_writes_three_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cb");
    assert!(xslit(&["reproduce", "checkerboard", "--out-dir", s(&out)]).status.success());
    for ratio in ["1.3", "1.59", "2"] {
        let text = std::fs::read_to_string(out.join(format!("curve_{ratio}.csv"))).unwrap();
        assert_eq!(csv_rows(&text).1.len(), 28);
        assert!(out.join(format!("camera_{ratio}.json")).exists());
    }
}
