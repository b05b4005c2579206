use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{steps_to_sink, MapParams, PhasePoint};

pub const DEFAULT_BASIN_RADIUS: f64 = 1e-6;
pub const DEFAULT_BASIN_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinEstimate {
    pub samples: u64,
    pub converged: u64,
    pub fraction: f64,
    pub max_iter: usize,
    pub radius: f64,
    pub seed: u64,
}

/// The `index`-th sample point of a run: a fresh ChaCha stream per index, so
/// the draw does not depend on how the indices are spread over threads.
fn sample_point(seed: u64, index: u64) -> PhasePoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    PhasePoint::new(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU))
}

fn validate(max_iter: usize, radius: f64) -> Result<()> {
    let _ = max_iter;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    Ok(())
}

/// Count of the given points whose orbits enter the torus ball of `radius`
/// around `(π, π)` within `max_iter` steps.
pub fn basin_fraction_of(points: &[PhasePoint], params: &MapParams, max_iter: usize, radius: f64) -> Result<u64> {
    validate(max_iter, radius)?;
    Ok(points
        .par_iter()
        .filter(|p| steps_to_sink(**p, params, max_iter, radius, true).is_some())
        .count() as u64)
}

/// Monte Carlo estimate of the basin measure on the torus from `samples`
/// uniform initial conditions.
pub fn estimate_basin(
    params: &MapParams,
    samples: u64,
    max_iter: usize,
    radius: f64,
    seed: u64,
) -> Result<BasinEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    validate(max_iter, radius)?;
    let converged = (0..samples)
        .into_par_iter()
        .filter(|&i| steps_to_sink(sample_point(seed, i), params, max_iter, radius, true).is_some())
        .count() as u64;
    Ok(BasinEstimate {
        samples,
        converged,
        fraction: converged as f64 / samples as f64,
        max_iter,
        radius,
        seed,
    })
}
