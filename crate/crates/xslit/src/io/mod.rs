//! File formats.

pub mod anchors;
pub mod camera;
pub mod depth;
pub mod frames;
pub mod fs;
pub mod observations;
pub mod pnm;
pub mod scene;

pub use camera::{read_camera, write_camera, CameraDoc};
pub use depth::{read_depth_map, write_depth_map, DepthSidecar};
pub use fs::{read_json, to_json_bytes, write_atomic, write_json};
pub use pnm::{read_image, write_pgm16, write_ppm};
pub use scene::{read_scene, write_scene, SceneDoc, SceneFile};
