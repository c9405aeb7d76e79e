use cpi_core::dynamics::io::{distribution_json, trajectory_csv};
use cpi_core::dynamics::{
    classical_propagator, ensemble_evolve, extended_flow, histogram_l2, liouville_evolve, lyapunov_spectrum,
    stratified_gaussian_samples, BuiltinModel, Distribution, ExtendedState,
    FlowOptions, Grid, HamiltonianModel, Integrator, LiouvilleOptions, PhasePoint, Topology,
};
use cpi_core::quantum::{
    convergence_sweep, exact_propagator, fit_order, probability_amplitude_check, relative_error, scaling_deviation,
    semiclassical_concentration, sliced_kernel, sliced_propagator, AmplitudeOptions, PropagatorRequest, QuantumModel,
    SemiclassicalOptions, WavePacket,
};
use cpi_core::superspace::verify::{
    default_models, euler_lagrange_suite, lattice_reduction_suite, projector_suite, sign_table, superfield_expansion_suite,
    superspace_suite, truncation_suite, IdentityReport, Status, DEFAULT_STEPS,
};
use cpi_core::superspace::PolynomialHamiltonian;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Command, RunConfig};
use crate::plot::{emit_plot_data, PlotData};
use crate::summary::Check;
use crate::{Artifact, CliError};

/// Seed for the random rational data of the identity suites when none is
/// configured. Those suites pass for every seed.
const VERIFY_SEED: u64 = 17;

type Output = (Vec<Check>, Vec<Artifact>);

pub(crate) fn execute(cmd: Command, cfg: &RunConfig, hash: &str) -> Result<Output, CliError> {
    let ctx = Ctx { cfg, hash };
    match cmd {
        Command::Verify => ctx.verify(),
        Command::Evolve => ctx.evolve(),
        Command::Liouville => ctx.liouville(),
        Command::Quantum => ctx.quantum(),
        Command::Lyapunov => ctx.lyapunov(),
        Command::AmplitudeCheck => ctx.amplitude(),
    }
}

fn model_by_name(name: &str) -> Result<Box<dyn HamiltonianModel>, CliError> {
    if let Some(m) = BuiltinModel::from_name(name) {
        return Ok(Box::new(m));
    }
    PolynomialHamiltonian::from_name(name)
        .map(|m| Box::new(m) as Box<dyn HamiltonianModel>)
        .ok_or_else(|| CliError::Config(format!("unknown model {name:?}")))
}

fn quantum_model(name: &str) -> Result<QuantumModel, CliError> {
    QuantumModel::from_name(name).map_err(|e| CliError::Config(e.to_string()))
}

fn integrator(name: &str) -> Result<Integrator, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "auto" => Ok(Integrator::Auto),
        "leapfrog" => Ok(Integrator::Leapfrog),
        "yoshida4" => Ok(Integrator::Yoshida4),
        "rk4" => Ok(Integrator::Rk4),
        other => Err(CliError::Config(format!("unknown integrator {other:?}"))),
    }
}

fn csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn artifact(name: impl Into<String>, contents: String) -> Artifact {
    Artifact {
        name: name.into(),
        contents,
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialises");
    s.push('\n');
    s
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    hash: &'a str,
}

impl Ctx<'_> {
    fn tol(&self, t: f64) -> f64 {
        t * self.cfg.run.tolerance_scale
    }

    fn flow(&self) -> Result<FlowOptions, CliError> {
        Ok(FlowOptions {
            dt: self.cfg.span.dt,
            integrator: integrator(&self.cfg.span.integrator)?,
            sample_every: self.cfg.span.sample_every.max(1),
            // invariants are reported as checks instead
            invariant_tolerance: f64::INFINITY,
            ..FlowOptions::default()
        })
    }

    fn phi0(&self) -> PhasePoint {
        DVector::from_row_slice(&[self.cfg.initial.q, self.cfg.initial.p])
    }

    fn plot(&self, name: String, data: &PlotData) -> Result<Artifact, CliError> {
        Ok(artifact(name, emit_plot_data(data, self.hash)?))
    }

    fn verify(&self) -> Result<Output, CliError> {
        let seed = self.cfg.run.seed.unwrap_or(VERIFY_SEED);
        let models = default_models();
        let samples = self.cfg.verify.samples.max(1);
        let c = CliError::compute;
        let reports: Vec<IdentityReport> = match self.cfg.verify.suite.as_str() {
            "superspace" => superspace_suite(seed).map_err(c)?,
            "expansion" => {
                let mut r = superfield_expansion_suite(&models, samples, seed).map_err(c)?;
                r.extend(truncation_suite(&models, samples, seed).map_err(c)?);
                r
            }
            "lattice" => lattice_reduction_suite(&models, &DEFAULT_STEPS, seed).map_err(c)?,
            "projector" => projector_suite(&models, &DEFAULT_STEPS, &[(1, 1), (1, 2)], seed).map_err(c)?,
            "euler-lagrange" => euler_lagrange_suite(&models, &[2, 4, 8], seed).map_err(c)?,
            other => return Err(CliError::Config(format!("unknown suite {other:?}"))),
        };
        let tol = self.tol(self.cfg.tolerances.identity);
        let checks = reports
            .iter()
            .map(|r| {
                let mut name = format!("{}/{}", r.identity, r.model);
                if let Some(n) = r.slices {
                    name.push_str(&format!("/N={n}"));
                }
                if let Some(h) = &r.hbar {
                    name.push_str(&format!("/hbar={h}"));
                }
                let residual = match r.status {
                    Status::Pass => r.max_residual_coefficient,
                    Status::Fail => f64::NAN,
                };
                Check::upper(name, residual, tol)
            })
            .collect();
        let artifacts = vec![
            artifact("identities.json", pretty(&serde_json::to_value(&reports).expect("reports serialise"))),
            artifact("sign_table.json", pretty(&sign_table().map_err(c)?)),
        ];
        Ok((checks, artifacts))
    }

    fn evolve(&self) -> Result<Output, CliError> {
        let flow = self.flow()?;
        let tols = &self.cfg.tolerances;
        let mut checks = Vec::new();
        let mut artifacts = Vec::new();
        for name in self.cfg.models() {
            let model = model_by_name(&name)?;
            let s0 = ExtendedState::initial(0.0, self.phi0(), DVector::zeros(2));
            let tr = extended_flow(model.as_ref(), &s0, self.cfg.span.t, &flow).map_err(CliError::compute)?;
            checks.push(Check::upper(format!("det_jacobi/{name}"), tr.max_det_error, self.tol(tols.det_jacobi)));
            checks.push(Check::upper(format!("pairing/{name}"), tr.max_pairing_error, self.tol(tols.pairing)));
            let mut plot = PlotData::new(
                format!("{name} trajectory"),
                &[("t", "time"), ("q", "position"), ("p", "momentum"), ("detJ", "1")],
            );
            for s in &tr.states {
                plot.push(vec![s.t, s.phi[0], s.phi[1], s.det_jacobi()]);
            }
            artifacts.push(artifact(format!("trajectory_{name}.csv"), trajectory_csv(&tr)));
            artifacts.push(self.plot(format!("trajectory_{name}.dat"), &plot)?);
        }
        Ok((checks, artifacts))
    }

    fn lyapunov(&self) -> Result<Output, CliError> {
        let flow = self.flow()?;
        let mut checks = Vec::new();
        let mut artifacts = Vec::new();
        for name in self.cfg.models() {
            let model = model_by_name(&name)?;
            let s = lyapunov_spectrum(model.as_ref(), &self.phi0(), self.cfg.span.t, self.cfg.lyapunov.renorm_interval, &flow)
                .map_err(CliError::compute)?;
            checks.push(Check::upper(
                format!("lyapunov_sum/{name}"),
                s.sum.abs(),
                self.tol(self.cfg.tolerances.lyapunov_sum),
            ));
            artifacts.push(artifact(
                format!("lyapunov_{name}.json"),
                pretty(&json!({
                    "model": name,
                    "T": self.cfg.span.t,
                    "renorm_interval": self.cfg.lyapunov.renorm_interval,
                    "exponents": s.exponents,
                    "sum": s.sum,
                    "renormalizations": s.renormalizations,
                })),
            ));
        }
        Ok((checks, artifacts))
    }

    fn liouville(&self) -> Result<Output, CliError> {
        let l = &self.cfg.liouville;
        let tols = &self.cfg.tolerances;
        let flow = self.flow()?;
        let grid = Grid::new((l.q_range[0], l.q_range[1]), (l.p_range[0], l.p_range[1]), l.grid, l.grid)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let topology = match l.topology.as_str() {
            "plane" => Topology::Plane,
            "cylinder" => Topology::Cylinder,
            other => return Err(CliError::Config(format!("unknown topology {other:?}"))),
        };
        let opts = LiouvilleOptions {
            remaps: l.remaps.max(1),
            trace_dt: l.trace_dt,
            integrator: flow.integrator,
            topology,
            ..LiouvilleOptions::default()
        };
        let seed = if l.strata > 0 {
            Some(self.cfg.run.seed.ok_or_else(|| CliError::Config("the ensemble needs a seed".into()))?)
        } else {
            None
        };
        let (q0, p0) = (self.cfg.initial.q, self.cfg.initial.p);
        let t = self.cfg.span.t;
        let mut checks = Vec::new();
        let mut artifacts = Vec::new();
        for name in self.cfg.models() {
            let model = model_by_name(&name)?;
            let d0 = Distribution::gaussian(grid, (q0, p0), (l.sigma, l.sigma)).map_err(CliError::compute)?;
            let r = liouville_evolve(&d0, model.as_ref(), t, &opts).map_err(CliError::compute)?;
            let cl = classical_propagator(model.as_ref(), &self.phi0(), 0.0, t, &flow).map_err(CliError::compute)?;
            let (_, _, qp, pp) = r.distribution.peak_cell();
            let offset = ((qp - cl.phi_final[0]).abs() / grid.dq()).max((pp - cl.phi_final[1]).abs() / grid.dp());
            checks.push(Check::upper(format!("peak_offset_cells/{name}"), offset, self.tol(tols.peak_cells)));
            checks.push(Check::upper(format!("mass/{name}"), r.relative_mass_change, self.tol(tols.mass)));
            checks.push(Check::upper(
                format!("boundary_loss/{name}"),
                r.boundary.lost_mass_estimate / r.initial_mass,
                self.tol(tols.mass),
            ));
            let mut doc = json!({
                "model": name,
                "T": t,
                "classical_endpoint": [cl.phi_final[0], cl.phi_final[1]],
                "peak_cell_center": [qp, pp],
                "initial_mass": r.initial_mass,
                "final_mass": r.final_mass,
                "boundary": r.boundary,
                "distribution": distribution_json(&r.distribution),
            });
            if let Some(seed) = seed {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let samples = stratified_gaussian_samples((q0, p0), (l.sigma, l.sigma), l.strata, &mut rng);
                let e = ensemble_evolve(&samples, model.as_ref(), t, &flow);
                let ends: Vec<PhasePoint> = e.successes().cloned().collect();
                let l2 = histogram_l2(&r.distribution, &ends, l.bin_factor).map_err(CliError::compute)?;
                checks.push(Check::upper(format!("histogram_l2/{name}"), l2, self.tol(tols.histogram_l2)));
                doc["ensemble"] = json!({
                    "samples": samples.len(),
                    "failures": e.failure_count(),
                    "bin_factor": l.bin_factor,
                    "histogram_l2": l2,
                });
            }
            let mut plot = PlotData::new(
                format!("{name} density at T = {t}"),
                &[("q", "position"), ("p", "momentum"), ("rho", "1/area")],
            );
            for iq in 0..grid.nq {
                for ip in 0..grid.np {
                    let (q, p) = grid.center(iq, ip);
                    plot.push(vec![q, p, r.distribution.get(iq, ip)]);
                }
            }
            artifacts.push(artifact(format!("liouville_{name}.json"), pretty(&doc)));
            artifacts.push(self.plot(format!("distribution_{name}.dat"), &plot)?);
        }
        Ok((checks, artifacts))
    }

    fn quantum(&self) -> Result<Output, CliError> {
        match self.cfg.quantum.sweep.to_ascii_lowercase().as_str() {
            "n" => self.quantum_slices(),
            "hbar" => self.quantum_hbar(),
            "none" => self.quantum_single(),
            other => Err(CliError::Config(format!("unknown sweep {other:?} (n, hbar or none)"))),
        }
    }

    fn request(&self, model: QuantumModel) -> PropagatorRequest {
        let q = &self.cfg.quantum;
        PropagatorRequest {
            model,
            q_i: q.q_i,
            q_f: q.q_f,
            t: self.cfg.span.t,
            hbar: q.hbar,
            slices: q.slices,
        }
    }

    fn unitarity_check(&self, name: &str, model: QuantumModel, slices: usize) -> Result<Check, CliError> {
        let q = &self.cfg.quantum;
        let k = sliced_kernel(model, self.cfg.span.t, q.hbar, slices).map_err(CliError::compute)?;
        let width = q.width_factor * (q.hbar / 2.0).sqrt();
        let psi = WavePacket::gaussian(q.q_i, 0.0, width, q.hbar).map_err(CliError::compute)?;
        let norm = k.apply(&psi).map_err(CliError::compute)?.norm();
        Ok(Check::upper(
            format!("sliced_unitarity/{name}/N={slices}"),
            (norm - 1.0).abs(),
            self.tol(self.cfg.tolerances.unitarity),
        ))
    }

    fn quantum_slices(&self) -> Result<Output, CliError> {
        let tols = &self.cfg.tolerances;
        let sweep = &self.cfg.quantum.sweep_slices;
        let Some(&n_max) = sweep.iter().max() else {
            return Err(CliError::EmptyResult("slice sweep".into()));
        };
        let mut checks = Vec::new();
        let mut artifacts = Vec::new();
        for name in self.cfg.models() {
            let model = quantum_model(&name)?;
            let pts = convergence_sweep(&self.request(model), sweep).map_err(CliError::compute)?;
            match model {
                QuantumModel::Free => {
                    let worst = pts.iter().map(|p| p.relative_error).fold(0.0, f64::max);
                    checks.push(Check::upper(format!("free_slicing_exact/{name}"), worst, self.tol(tols.free_slicing)));
                }
                QuantumModel::Harmonic => {
                    let last = pts.iter().find(|p| p.slices == n_max).expect("n_max is in the sweep");
                    checks.push(Check::upper(
                        format!("sliced_error/{name}/N={n_max}"),
                        last.relative_error,
                        self.tol(tols.sliced_error),
                    ));
                    let order = fit_order(&pts).unwrap_or(f64::NAN);
                    checks.push(Check::upper(format!("convergence_order/{name}"), (order - 2.0).abs(), self.tol(tols.order)));
                    let mut sorted = pts.clone();
                    sorted.sort_by_key(|p| p.slices);
                    let rise = sorted
                        .windows(2)
                        .map(|w| w[1].relative_error - w[0].relative_error)
                        .fold(f64::NEG_INFINITY, f64::max);
                    if sorted.len() > 1 {
                        checks.push(Check::lower(format!("monotone_refinement/{name}"), -rise, 0.0));
                    }
                }
            }
            checks.push(self.unitarity_check(&name, model, n_max)?);
            let rows: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.slices as f64, p.relative_error]).collect();
            let mut plot = PlotData::new(format!("{name} sliced propagator error"), &[("N", "slices"), ("error", "relative")]);
            rows.iter().for_each(|r| plot.push(r.clone()));
            artifacts.push(artifact(format!("convergence_{name}.csv"), csv("N,relative_error", &rows)));
            artifacts.push(self.plot(format!("convergence_{name}.dat"), &plot)?);
        }
        Ok((checks, artifacts))
    }

    fn quantum_hbar(&self) -> Result<Output, CliError> {
        let tols = &self.cfg.tolerances;
        let opts = SemiclassicalOptions {
            width_factor: self.cfg.quantum.width_factor,
            flow: self.flow()?,
        };
        let mut checks = Vec::new();
        let mut artifacts = Vec::new();
        for name in self.cfg.models() {
            let model = quantum_model(&name)?;
            let rows = semiclassical_concentration(model, &self.phi0(), self.cfg.span.t, &self.cfg.quantum.sweep_hbar, &opts)
                .map_err(CliError::compute)?;
            let Some(smallest) = rows.iter().min_by(|a, b| a.hbar.total_cmp(&b.hbar)) else {
                return Err(CliError::EmptyResult("hbar sweep".into()));
            };
            checks.push(Check::upper(format!("spread_scaling/{name}"), scaling_deviation(&rows), self.tol(tols.scaling)));
            checks.push(Check::upper(
                format!("peak_offset/{name}/hbar={}", smallest.hbar),
                smallest.peak_offset / smallest.final_width,
                self.tol(tols.peak_fraction),
            ));
            let norm_err = rows.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max);
            checks.push(Check::upper(format!("packet_norm/{name}"), norm_err, self.tol(tols.unitarity)));
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| vec![r.hbar, r.initial_width, r.final_width, r.spread, r.peak, r.classical_endpoint])
                .collect();
            let mut plot = PlotData::new(format!("{name} spread about the classical endpoint"), &[("hbar", "action"), ("spread", "position")]);
            rows.iter().for_each(|r| plot.push(vec![r.hbar, r.spread]));
            artifacts.push(artifact(
                format!("semiclassical_{name}.csv"),
                csv("hbar,initial_width,final_width,spread,peak,classical_endpoint", &table),
            ));
            artifacts.push(self.plot(format!("semiclassical_{name}.dat"), &plot)?);
        }
        Ok((checks, artifacts))
    }

    fn quantum_single(&self) -> Result<Output, CliError> {
        let mut checks = Vec::new();
        let mut artifacts = Vec::new();
        for name in self.cfg.models() {
            let model = quantum_model(&name)?;
            let req = self.request(model);
            let exact = exact_propagator(&req).map_err(CliError::compute)?;
            let sliced = sliced_propagator(&req).map_err(CliError::compute)?;
            let err = relative_error(&sliced, &exact);
            checks.push(Check::upper(
                format!("sliced_error/{name}/N={}", req.slices),
                err,
                self.tol(self.cfg.tolerances.sliced_error),
            ));
            let show = |v: &cpi_core::quantum::KernelValue| {
                json!({ "re": v.value.re, "im": v.value.im, "modulus": v.modulus, "phase": v.phase })
            };
            artifacts.push(artifact(
                format!("propagator_{name}.json"),
                pretty(&json!({
                    "model": name,
                    "q_i": req.q_i,
                    "q_f": req.q_f,
                    "T": req.t,
                    "hbar": req.hbar,
                    "slices": req.slices,
                    "caustic_distance": exact.caustic_distance,
                    "exact": show(&exact),
                    "sliced": show(&sliced),
                    "relative_error": err,
                })),
            ));
        }
        Ok((checks, artifacts))
    }

    fn amplitude(&self) -> Result<Output, CliError> {
        let e = &self.cfg.amplitude;
        let tols = &self.cfg.tolerances;
        let opts = AmplitudeOptions {
            slices: e.slices,
            epsilon: e.epsilon,
            flow: FlowOptions {
                sample_every: usize::MAX,
                ..self.flow()?
            },
            ..AmplitudeOptions::default()
        };
        if e.times.is_empty() {
            return Err(CliError::EmptyResult("amplitude times".into()));
        }
        let mut checks = Vec::new();
        let mut artifacts = Vec::new();
        for name in self.cfg.models() {
            let model = model_by_name(&name)?;
            let reports = e
                .times
                .iter()
                .map(|&t| probability_amplitude_check(model.as_ref(), &self.phi0(), t, &opts))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::compute)?;
            let k0 = reports[0].constant;
            let smallest = reports.iter().map(|r| r.constant.norm()).fold(f64::INFINITY, f64::min);
            let spread = reports.iter().map(|r| (r.constant - k0).norm() / k0.norm()).fold(0.0, f64::max);
            let peak = reports.iter().map(|r| r.peak_offset).fold(0.0, f64::max);
            checks.push(Check::lower(format!("constant_nonzero/{name}"), smallest, 0.0));
            checks.push(Check::upper(format!("constant_invariance/{name}"), spread, self.tol(tols.constant_invariance)));
            checks.push(Check::upper(format!("bosonic_peak/{name}"), peak, self.tol(tols.bosonic_peak * e.epsilon)));
            let rows: Vec<Vec<f64>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.t,
                        r.constant.re,
                        r.constant.im,
                        r.ghost_integral.re,
                        r.ghost_integral.im,
                        r.det_transporter,
                        r.peak_offset,
                    ]
                })
                .collect();
            artifacts.push(artifact(
                format!("amplitude_{name}.csv"),
                csv("T,K_re,K_im,ghost_integral_re,ghost_integral_im,detJ,peak_offset", &rows),
            ));
        }
        Ok((checks, artifacts))
    }
}
