//! Semi-Lagrangian evolution of phase-space densities under the Liouville
//! operator L̂ = ∂_pH ∂_q − ∂_qH ∂_p.
//!
//! ρ(φ, t + τ) = ρ(Φ_{−τ}(φ), t): every cell centre is traced backwards
//! along its characteristic and the old density is interpolated at the foot
//! point with a Keys cubic kernel. For autonomous H the backward map is the
//! same in every remap, so it is traced once and reused.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::{advance, resolve_scheme, step_plan, Integrator, Scheme};
use super::model::{HamiltonianModel, PhasePoint};
use super::DynamicsError;

/// Rectangular (q, p) window of `nq × np` cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nq: usize,
    pub np: usize,
}

impl Grid {
    pub fn new(q: (f64, f64), p: (f64, f64), nq: usize, np: usize) -> Result<Self, DynamicsError> {
        let g = Self {
            q_min: q.0,
            q_max: q.1,
            p_min: p.0,
            p_max: p.1,
            nq,
            np,
        };
        let finite = [q.0, q.1, p.0, p.1].iter().all(|x| x.is_finite());
        if !finite || q.1 <= q.0 || p.1 <= p.0 {
            return Err(DynamicsError::InvalidGrid(format!("bad window {q:?} × {p:?}")));
        }
        if nq < 4 || np < 4 {
            return Err(DynamicsError::InvalidGrid(format!("{nq} × {np} cells; need at least 4 per axis")));
        }
        Ok(g)
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major with q as the slow index.
    pub fn index(&self, iq: usize, ip: usize) -> usize {
        iq * self.np + ip
    }

    pub fn center(&self, iq: usize, ip: usize) -> (f64, f64) {
        (
            self.q_min + (iq as f64 + 0.5) * self.dq(),
            self.p_min + (ip as f64 + 0.5) * self.dp(),
        )
    }

    pub fn contains(&self, q: f64, p: f64) -> bool {
        q >= self.q_min && q <= self.q_max && p >= self.p_min && p <= self.p_max
    }

    /// Cell containing (q, p), if inside the window.
    pub fn locate(&self, q: f64, p: f64) -> Option<(usize, usize)> {
        if !self.contains(q, p) {
            return None;
        }
        let iq = (((q - self.q_min) / self.dq()) as usize).min(self.nq - 1);
        let ip = (((p - self.p_min) / self.dp()) as usize).min(self.np - 1);
        Some((iq, ip))
    }
}

/// Density values at cell centres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Distribution {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self, DynamicsError> {
        if values.len() != grid.len() {
            return Err(DynamicsError::InvalidGrid(format!(
                "{} values for {} cells",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(DynamicsError::InvalidGrid("density must be finite and non-negative".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self, DynamicsError> {
        let mut values = Vec::with_capacity(grid.len());
        for iq in 0..grid.nq {
            for ip in 0..grid.np {
                let (q, p) = grid.center(iq, ip);
                values.push(f(q, p));
            }
        }
        Self::from_values(grid, values)
    }

    /// Normalised Gaussian with independent widths in q and p.
    pub fn gaussian(grid: Grid, center: (f64, f64), sigma: (f64, f64)) -> Result<Self, DynamicsError> {
        if !(sigma.0 > 0.0 && sigma.1 > 0.0) {
            return Err(DynamicsError::InvalidParameter(format!("widths {sigma:?} must be positive")));
        }
        let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma.0 * sigma.1);
        Self::from_fn(grid, |q, p| {
            let a = (q - center.0) / sigma.0;
            let b = (p - center.1) / sigma.1;
            norm * (-0.5 * (a * a + b * b)).exp()
        })
    }

    pub fn get(&self, iq: usize, ip: usize) -> f64 {
        self.values[self.grid.index(iq, ip)]
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Density-weighted mean (q, p).
    pub fn mean(&self) -> (f64, f64) {
        let (mut mq, mut mp, mut m) = (0.0, 0.0, 0.0);
        for iq in 0..self.grid.nq {
            for ip in 0..self.grid.np {
                let (q, p) = self.grid.center(iq, ip);
                let w = self.get(iq, ip);
                mq += w * q;
                mp += w * p;
                m += w;
            }
        }
        (mq / m, mp / m)
    }

    /// Cell of maximal density: (iq, ip, q, p).
    pub fn peak_cell(&self) -> (usize, usize, f64, f64) {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
        let (iq, ip) = (k / self.grid.np, k % self.grid.np);
        let (q, p) = self.grid.center(iq, ip);
        (iq, ip, q, p)
    }

    /// Discrete L2 norm of the difference, √(Σ (ρ₁ − ρ₂)² dA).
    pub fn l2_distance(&self, other: &Distribution) -> Result<f64, DynamicsError> {
        if self.grid != other.grid {
            return Err(DynamicsError::InvalidGrid("distributions live on different grids".into()));
        }
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).powi(2)).sum();
        Ok((s * self.grid.cell_area()).sqrt())
    }

    /// Probability of each `factor × factor` block of cells, as a flat vector
    /// over the coarse grid (q slow).
    pub fn binned_probabilities(&self, factor: usize) -> Result<Vec<f64>, DynamicsError> {
        let g = &self.grid;
        if factor == 0 || g.nq % factor != 0 || g.np % factor != 0 {
            return Err(DynamicsError::InvalidGrid(format!(
                "bin factor {factor} does not divide {} × {}",
                g.nq, g.np
            )));
        }
        let (bq, bp) = (g.nq / factor, g.np / factor);
        let mut bins = vec![0.0; bq * bp];
        let area = g.cell_area();
        for iq in 0..g.nq {
            for ip in 0..g.np {
                bins[(iq / factor) * bp + ip / factor] += self.get(iq, ip) * area;
            }
        }
        Ok(bins)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Topology {
    /// Zero padding outside the window.
    Plane,
    /// q is periodic over the window (which must span one period).
    Cylinder,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiouvilleOptions {
    /// Number of remaps the span is split into.
    pub remaps: usize,
    /// Step for tracing characteristics.
    pub trace_dt: f64,
    pub integrator: Integrator,
    pub topology: Topology,
    /// Cells with ρ below this fraction of the maximum are not forward traced
    /// in the lost-mass estimate.
    pub loss_threshold: f64,
    /// Relative lost mass above which a boundary warning is raised.
    pub loss_warning: f64,
}

impl Default for LiouvilleOptions {
    fn default() -> Self {
        Self {
            remaps: 1,
            trace_dt: 1e-2,
            integrator: Integrator::Auto,
            topology: Topology::Plane,
            loss_threshold: 1e-14,
            loss_warning: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// Mass carried by characteristics that leave the window.
    pub lost_mass_estimate: f64,
    pub exiting_cells: usize,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleResult {
    pub distribution: Distribution,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub relative_mass_change: f64,
    pub boundary: BoundaryReport,
}

fn trace(model: &dyn HamiltonianModel, scheme: Scheme, q: f64, p: f64, span: f64, steps: usize) -> (f64, f64) {
    let mut phi: PhasePoint = DVector::from_row_slice(&[q, p]);
    let h = span / steps as f64;
    for _ in 0..steps {
        advance(model, scheme, &mut phi, None, h);
    }
    (phi[0], phi[1])
}

/// Keys cubic convolution weights (a = −1/2) for fractional offset t ∈ [0, 1).
fn keys_weights(t: f64) -> [f64; 4] {
    let w = |x: f64| {
        let x = x.abs();
        if x <= 1.0 {
            (1.5 * x - 2.5) * x * x + 1.0
        } else if x < 2.0 {
            ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0
        } else {
            0.0
        }
    };
    [w(1.0 + t), w(t), w(1.0 - t), w(2.0 - t)]
}

fn interpolate(dist: &Distribution, topology: Topology, q: f64, p: f64) -> f64 {
    let g = &dist.grid;
    let mut q = q;
    if topology == Topology::Cylinder {
        let period = g.q_max - g.q_min;
        q = g.q_min + (q - g.q_min).rem_euclid(period);
    }
    // continuous index with cell centres at integers
    let x = (q - g.q_min) / g.dq() - 0.5;
    let y = (p - g.p_min) / g.dp() - 0.5;
    if !x.is_finite() || !y.is_finite() {
        return 0.0;
    }
    let (x0, y0) = (x.floor(), y.floor());
    let (wx, wy) = (keys_weights(x - x0), keys_weights(y - y0));
    let (x0, y0) = (x0 as i64, y0 as i64);
    let mut acc = 0.0;
    for (a, wa) in wx.iter().enumerate() {
        let mut iq = x0 - 1 + a as i64;
        if topology == Topology::Cylinder {
            iq = iq.rem_euclid(g.nq as i64);
        } else if iq < 0 || iq >= g.nq as i64 {
            continue;
        }
        for (b, wb) in wy.iter().enumerate() {
            let ip = y0 - 1 + b as i64;
            if ip < 0 || ip >= g.np as i64 {
                continue;
            }
            acc += wa * wb * dist.get(iq as usize, ip as usize);
        }
    }
    acc
}

pub fn liouville_evolve(
    dist: &Distribution,
    model: &dyn HamiltonianModel,
    total_time: f64,
    opts: &LiouvilleOptions,
) -> Result<LiouvilleResult, DynamicsError> {
    if model.dof() != 1 {
        return Err(DynamicsError::DimensionMismatch { expected: 2, got: 2 * model.dof() });
    }
    if !(total_time.is_finite() && total_time >= 0.0) {
        return Err(DynamicsError::InvalidSpan { t_i: 0.0, t_f: total_time });
    }
    if opts.remaps == 0 {
        return Err(DynamicsError::InvalidParameter("at least one remap is required".into()));
    }
    let g = dist.grid;
    let initial_mass = dist.total_mass();
    if total_time == 0.0 {
        return Ok(LiouvilleResult {
            distribution: dist.clone(),
            initial_mass,
            final_mass: initial_mass,
            relative_mass_change: 0.0,
            boundary: BoundaryReport {
                lost_mass_estimate: 0.0,
                exiting_cells: 0,
                warning: None,
            },
        });
    }
    let scheme = resolve_scheme(model, opts.integrator)?;
    let tau = total_time / opts.remaps as f64;
    let (steps, _) = step_plan(tau, opts.trace_dt)?;

    let feet: Vec<(f64, f64)> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (q, p) = g.center(k / g.np, k % g.np);
            trace(model, scheme, q, p, -tau, steps)
        })
        .collect();
    if feet.iter().any(|(q, p)| !q.is_finite() || !p.is_finite()) {
        return Err(DynamicsError::NonFinite { t: -tau });
    }

    let mut current = dist.clone();
    let mut lost = 0.0;
    let mut exiting = 0;
    for _ in 0..opts.remaps {
        let (l, n) = boundary_loss(&current, model, scheme, tau, steps, opts);
        lost += l;
        exiting += n;
        let values: Vec<f64> = feet
            .par_iter()
            .map(|&(q, p)| interpolate(&current, opts.topology, q, p).max(0.0))
            .collect();
        current = Distribution { grid: g, values };
    }
    let final_mass = current.total_mass();
    let warning = (lost > opts.loss_warning * initial_mass.max(f64::MIN_POSITIVE)).then(|| {
        format!("{exiting} characteristics leave the grid window; estimated lost mass {lost:.3e}")
    });
    Ok(LiouvilleResult {
        distribution: current,
        initial_mass,
        final_mass,
        relative_mass_change: (final_mass - initial_mass).abs() / initial_mass,
        boundary: BoundaryReport {
            lost_mass_estimate: lost,
            exiting_cells: exiting,
            warning,
        },
    })
}

fn boundary_loss(
    dist: &Distribution,
    model: &dyn HamiltonianModel,
    scheme: Scheme,
    tau: f64,
    steps: usize,
    opts: &LiouvilleOptions,
) -> (f64, usize) {
    let g = dist.grid;
    let peak = dist.values.iter().cloned().fold(0.0, f64::max);
    let cut = opts.loss_threshold * peak;
    let area = g.cell_area();
    (0..g.len())
        .into_par_iter()
        .filter(|&k| dist.values[k] > cut)
        .map(|k| {
            let (q, p) = g.center(k / g.np, k % g.np);
            let (qf, pf) = trace(model, scheme, q, p, tau, steps);
            let inside = match opts.topology {
                Topology::Plane => g.contains(qf, pf),
                Topology::Cylinder => pf >= g.p_min && pf <= g.p_max,
            };
            if inside {
                (0.0, 0)
            } else {
                (dist.values[k] * area, 1)
            }
        })
        // summed in cell order so the estimate does not depend on the thread count
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::model::BuiltinModel;

    fn window(n: usize) -> Grid {
        Grid::new((-3.0, 3.0), (-3.0, 3.0), n, n).unwrap()
    }

    #[test]
    fn keys_weights_partition_unity() {
        for t in [0.0, 0.25, 0.5, 0.9] {
            let w = keys_weights(t);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
        assert_eq!(keys_weights(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn harmonic_steady_state() {
        let d = Distribution::gaussian(window(96), (0.0, 0.0), (0.5, 0.5)).unwrap();
        let r = liouville_evolve(&d, &BuiltinModel::Harmonic, 1.3, &LiouvilleOptions::default()).unwrap();
        assert!(r.distribution.l2_distance(&d).unwrap() < 5e-3);
        assert!(r.relative_mass_change < 1e-3);
        assert!(r.boundary.warning.is_none());
    }

    #[test]
    fn harmonic_rotation_moves_peak() {
        let d = Distribution::gaussian(window(128), (1.0, 0.0), (0.2, 0.2)).unwrap();
        let r = liouville_evolve(&d, &BuiltinModel::Harmonic, std::f64::consts::FRAC_PI_2, &LiouvilleOptions::default())
            .unwrap();
        let (mq, mp) = r.distribution.mean();
        assert!(mq.abs() < 1e-3 && (mp + 1.0).abs() < 1e-3, "({mq}, {mp})");
        let (_, _, q, p) = r.distribution.peak_cell();
        assert!(q.abs() <= window(128).dq() && (p + 1.0).abs() <= window(128).dp());
    }

    #[test]
    fn mass_conserved_for_pendulum_and_quartic() {
        let d = Distribution::gaussian(window(96), (0.5, 0.2), (0.3, 0.3)).unwrap();
        for model in [BuiltinModel::Pendulum, BuiltinModel::Quartic] {
            let r = liouville_evolve(&d, &model, 1.0, &LiouvilleOptions { remaps: 4, ..Default::default() }).unwrap();
            assert!(r.relative_mass_change < 1e-3, "{model:?}: {}", r.relative_mass_change);
        }
    }

    #[test]
    fn boundary_loss_is_reported() {
        let g = Grid::new((-1.0, 1.0), (-1.0, 1.0), 32, 32).unwrap();
        let d = Distribution::gaussian(g, (0.5, 0.0), (0.2, 0.2)).unwrap();
        let r = liouville_evolve(&d, &BuiltinModel::Free, 2.0, &LiouvilleOptions::default()).unwrap();
        assert!(r.boundary.warning.is_some());
        assert!(r.boundary.lost_mass_estimate > 0.1);
        assert!((r.initial_mass - r.final_mass - r.boundary.lost_mass_estimate).abs() < 0.05);
    }

    #[test]
    fn cylinder_wraps_pendulum_rotation() {
        let pi = std::f64::consts::PI;
        let g = Grid::new((-pi, pi), (0.5, 4.5), 64, 64).unwrap();
        let d = Distribution::gaussian(g, (2.5, 2.5), (0.3, 0.3)).unwrap();
        let opts = LiouvilleOptions { topology: Topology::Cylinder, ..Default::default() };
        let r = liouville_evolve(&d, &BuiltinModel::Pendulum, 1.0, &opts).unwrap();
        assert!(r.boundary.warning.is_none());
        assert!(r.relative_mass_change < 1e-2);
    }

    #[test]
    fn binned_probabilities_sum_to_mass() {
        let d = Distribution::gaussian(window(64), (0.0, 0.0), (0.4, 0.4)).unwrap();
        let bins = d.binned_probabilities(8).unwrap();
        assert_eq!(bins.len(), 64);
        assert!((bins.iter().sum::<f64>() - d.total_mass()).abs() < 1e-12);
        assert!(d.binned_probabilities(5).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new((1.0, 0.0), (0.0, 1.0), 8, 8).is_err());
        assert!(Grid::new((0.0, 1.0), (0.0, 1.0), 2, 8).is_err());
        let g = window(8);
        assert!(Distribution::from_values(g, vec![0.0; 63]).is_err());
        assert!(Distribution::from_values(g, vec![-1.0; 64]).is_err());
        assert_eq!(g.locate(0.01, -2.99), Some((4, 0)));
        assert_eq!(g.locate(4.0, 0.0), None);
    }
}
