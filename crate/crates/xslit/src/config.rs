//! Run settings. Values resolve as command-line flag, then `--config` file,
//! then built-in default.

use std::path::Path;

use serde::{Deserialize, Serialize};
use xslit_core::propagation::PropagationParams;

use crate::error::{Error, Result};
use crate::io::read_json;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "XSLIT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationSettings {
    pub k: f64,
    pub min_size: usize,
    pub sigma_g: f64,
    pub sigma_c: f64,
    pub lambda: f64,
    pub truncation: f64,
    pub n_labels: usize,
    pub mrf_restarts: bool,
    pub label_padding: f64,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        PropagationParams::default().into()
    }
}

impl From<PropagationParams> for PropagationSettings {
    fn from(p: PropagationParams) -> Self {
        Self {
            k: p.k,
            min_size: p.min_size,
            sigma_g: p.sigma_g,
            sigma_c: p.sigma_c,
            lambda: p.lambda,
            truncation: p.truncation,
            n_labels: p.n_labels,
            mrf_restarts: p.mrf_restarts,
            label_padding: p.label_padding,
        }
    }
}

impl From<PropagationSettings> for PropagationParams {
    fn from(s: PropagationSettings) -> Self {
        Self {
            k: s.k,
            min_size: s.min_size,
            sigma_g: s.sigma_g,
            sigma_c: s.sigma_c,
            lambda: s.lambda,
            truncation: s.truncation,
            n_labels: s.n_labels,
            mrf_restarts: s.mrf_restarts,
            label_padding: s.label_padding,
        }
    }
}

/// Fully resolved settings of `simulate`, `propagate` and `pipeline`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Standard deviation of observation noise, sensor units.
    pub noise_sigma: f64,
    pub seed: u64,
    /// Frame used when the scene has no `image` section.
    pub width: usize,
    pub height: usize,
    /// Relative margin of a fitted frame.
    pub margin: f64,
    /// Relative tolerance of the dense fidelity metric.
    pub tolerance: f64,
    pub propagation: PropagationSettings,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            noise_sigma: 0.0,
            seed: 0,
            width: 640,
            height: 480,
            margin: 0.05,
            tolerance: 0.05,
            propagation: PropagationSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationOverrides {
    pub k: Option<f64>,
    pub min_size: Option<usize>,
    pub sigma_g: Option<f64>,
    pub sigma_c: Option<f64>,
    pub lambda: Option<f64>,
    pub truncation: Option<f64>,
    pub n_labels: Option<usize>,
    pub mrf_restarts: Option<bool>,
    pub label_padding: Option<f64>,
}

/// Partial settings, as read from a config file or gathered from flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub noise_sigma: Option<f64>,
    pub seed: Option<u64>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub margin: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub propagation: PropagationOverrides,
}

fn set<T: Copy>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl Settings {
    pub fn apply(&mut self, o: &Overrides) {
        set(&mut self.noise_sigma, o.noise_sigma);
        set(&mut self.seed, o.seed);
        set(&mut self.width, o.width);
        set(&mut self.height, o.height);
        set(&mut self.margin, o.margin);
        set(&mut self.tolerance, o.tolerance);
        let (p, q) = (&mut self.propagation, &o.propagation);
        set(&mut p.k, q.k);
        set(&mut p.min_size, q.min_size);
        set(&mut p.sigma_g, q.sigma_g);
        set(&mut p.sigma_c, q.sigma_c);
        set(&mut p.lambda, q.lambda);
        set(&mut p.truncation, q.truncation);
        set(&mut p.n_labels, q.n_labels);
        set(&mut p.mrf_restarts, q.mrf_restarts);
        set(&mut p.label_padding, q.label_padding);
    }

    /// Defaults, overlaid by `file` and then by `flags`.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut s = Self::default();
        if let Some(path) = file {
            s.apply(&read_json::<Overrides>(path)?);
        }
        s.apply(flags);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::validation("invalid_parameter", m));
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be finite and non-negative");
        }
        if self.width == 0 || self.height == 0 {
            return bad("width and height must be positive");
        }
        if !(self.margin >= 0.0 && self.margin < 0.5) {
            return bad("margin must be in [0, 0.5)");
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        PropagationParams::from(self.propagation).validate()?;
        Ok(())
    }
}

/// Worker count from [`THREADS_ENV`]; `None` leaves the choice to rayon.
pub fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::validation(
                "invalid_parameter",
                format!("{THREADS_ENV} must be a positive integer, got {v:?}"),
            )),
        },
    }
}

/// Runs `f` on a pool sized by [`thread_count`].
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::validation("thread_pool", e.to_string()))?;
    Ok(pool.install(f))
}
