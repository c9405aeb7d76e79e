//! Ensembles of independent trajectories: the sampled form of the classical
//! path integral, in which every sample follows exactly its classical path.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use super::flow::{hamilton_flow, FlowOptions};
use super::liouville::Distribution;
use super::model::{HamiltonianModel, PhasePoint};
use super::DynamicsError;

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleResult {
    /// One entry per input sample, in input order.
    pub endpoints: Vec<Result<PhasePoint, DynamicsError>>,
}

impl EnsembleResult {
    pub fn successes(&self) -> impl Iterator<Item = &PhasePoint> {
        self.endpoints.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &DynamicsError)> {
        self.endpoints
            .iter()
            .enumerate()
            .filter_map(|(k, r)| r.as_ref().err().map(|e| (k, e)))
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }
}

/// Advances each sample over `[0, T]` independently, in parallel.
pub fn ensemble_evolve(
    samples: &[PhasePoint],
    model: &dyn HamiltonianModel,
    total_time: f64,
    opts: &FlowOptions,
) -> EnsembleResult {
    let opts = FlowOptions {
        sample_every: usize::MAX,
        ..*opts
    };
    let endpoints = samples
        .par_iter()
        .map(|phi| {
            if total_time == 0.0 {
                return Ok(phi.clone());
            }
            hamilton_flow(model, phi, 0.0, total_time, &opts).map(|tr| tr.endpoint().clone())
        })
        .collect();
    EnsembleResult { endpoints }
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// `count` independent draws from an axis-aligned Gaussian in (q, p).
pub fn iid_gaussian_samples(
    center: (f64, f64),
    sigma: (f64, f64),
    count: usize,
    rng: &mut impl Rng,
) -> Vec<PhasePoint> {
    let n = standard_normal();
    (0..count)
        .map(|_| {
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            let v: f64 = rng.random_range(f64::EPSILON..1.0);
            DVector::from_row_slice(&[
                center.0 + sigma.0 * n.inverse_cdf(u),
                center.1 + sigma.1 * n.inverse_cdf(v),
            ])
        })
        .collect()
}

/// `k²` draws from an axis-aligned Gaussian, one per cell of a `k × k`
/// partition of the unit square pulled back through the normal quantile
/// function (jittered stratification).
pub fn stratified_gaussian_samples(
    center: (f64, f64),
    sigma: (f64, f64),
    k: usize,
    rng: &mut impl Rng,
) -> Vec<PhasePoint> {
    let n = standard_normal();
    let kf = k as f64;
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let u = (i as f64 + rng.random::<f64>()) / kf;
            let v = (j as f64 + rng.random::<f64>()) / kf;
            let (u, v) = (u.clamp(1e-300, 1.0 - 1e-16), v.clamp(1e-300, 1.0 - 1e-16));
            out.push(DVector::from_row_slice(&[
                center.0 + sigma.0 * n.inverse_cdf(u),
                center.1 + sigma.1 * n.inverse_cdf(v),
            ]));
        }
    }
    out
}

/// Euclidean distance between the bin-probability vectors of a grid density
/// and of a sample histogram, on the grid coarsened by `bin_factor`.
/// Samples outside the window count towards no bin.
pub fn histogram_l2(dist: &Distribution, samples: &[PhasePoint], bin_factor: usize) -> Result<f64, DynamicsError> {
    if samples.is_empty() {
        return Err(DynamicsError::InvalidParameter("empty sample set".into()));
    }
    let grid_bins = dist.binned_probabilities(bin_factor)?;
    let g = &dist.grid;
    let bp = g.np / bin_factor;
    let mut counts = vec![0.0; grid_bins.len()];
    let w = 1.0 / samples.len() as f64;
    for s in samples {
        if let Some((iq, ip)) = g.locate(s[0], s[1]) {
            counts[(iq / bin_factor) * bp + ip / bin_factor] += w;
        }
    }
    Ok(grid_bins
        .iter()
        .zip(&counts)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}
