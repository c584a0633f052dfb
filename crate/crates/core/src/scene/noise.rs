//! Seeded Gaussian perturbation of observations.
//!
//! Generator: ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`, one stream per observation (`set_stream(index)`),
//! normal deviates from `rand_distr::Normal`. Each observation's noise depends
//! only on the seed and its index, so results do not depend on evaluation order.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::render::VectorObservation;
use crate::camera::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation per coordinate, scene units.
    pub sigma_obs: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma_obs: f64, seed: u64) -> Self {
        Self { sigma_obs, seed }
    }

    pub fn rng_for(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Adds i.i.d. noise to `points`, drawing from stream `index`.
    pub fn perturb_points(&self, points: &[Point2], index: u64) -> Vec<Point2> {
        if !(self.sigma_obs > 0.0) {
            return points.to_vec();
        }
        let normal = Normal::new(0.0, self.sigma_obs).expect("sigma is finite and positive");
        let mut rng = self.rng_for(index);
        points
            .iter()
            .map(|p| {
                let du = normal.sample(&mut rng);
                let dv = normal.sample(&mut rng);
                Point2::new(p.u + du, p.v + dv)
            })
            .collect()
    }
}

/// Perturbs every observation's points; `sigma_obs = 0` is the identity.
pub fn perturb(observations: &[VectorObservation], noise: &NoiseSpec) -> Vec<VectorObservation> {
    observations
        .iter()
        .enumerate()
        .map(|(i, o)| VectorObservation {
            points: noise.perturb_points(&o.points, i as u64),
            ..o.clone()
        })
        .collect()
}
