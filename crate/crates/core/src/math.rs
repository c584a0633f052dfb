//! Float functions for `no_std` builds.
pub use libm::{atan, atan2, cos, exp, log, round, sin, sqrt};
