//! Run configuration: a TOML file with one section per module. Unknown keys
//! are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Evolve,
    Liouville,
    Quantum,
    Lyapunov,
    #[serde(rename = "eq5-check")]
    #[value(name = "eq5-check")]
    AmplitudeCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Evolve => "evolve",
            Command::Liouville => "liouville",
            Command::Quantum => "quantum",
            Command::Lyapunov => "lyapunov",
            Command::AmplitudeCheck => "eq5-check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run: RunSection,
    pub model: ModelSection,
    pub initial: InitialSection,
    pub span: SpanSection,
    pub verify: VerifySection,
    pub liouville: LiouvilleSection,
    pub quantum: QuantumSection,
    pub lyapunov: LyapunovSection,
    pub amplitude: AmplitudeSection,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub command: Option<Command>,
    /// Not part of the config hash.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tolerance_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    /// One name or a comma-separated list, e.g. "pendulum,quartic".
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub q: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpanSection {
    #[serde(rename = "T")]
    pub t: f64,
    pub dt: f64,
    /// auto, leapfrog, yoshida4 or rk4.
    pub integrator: String,
    pub sample_every: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// superspace, expansion, lattice, projector or euler-lagrange.
    pub suite: String,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiouvilleSection {
    pub sigma: f64,
    pub grid: usize,
    pub q_range: [f64; 2],
    pub p_range: [f64; 2],
    pub remaps: usize,
    pub trace_dt: f64,
    /// plane or cylinder.
    pub topology: String,
    /// The ensemble has `strata²` samples; 0 disables it.
    pub strata: usize,
    pub bin_factor: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumSection {
    /// none, n or hbar.
    pub sweep: String,
    pub q_i: f64,
    pub q_f: f64,
    pub hbar: f64,
    pub slices: usize,
    pub sweep_slices: Vec<usize>,
    pub sweep_hbar: Vec<f64>,
    pub width_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LyapunovSection {
    pub renorm_interval: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmplitudeSection {
    pub slices: usize,
    pub epsilon: f64,
    pub times: Vec<f64>,
}

/// Check thresholds before `tolerance_scale` is applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub identity: f64,
    pub det_jacobi: f64,
    pub pairing: f64,
    pub lyapunov_sum: f64,
    /// In grid cells.
    pub peak_cells: f64,
    pub histogram_l2: f64,
    pub mass: f64,
    pub sliced_error: f64,
    pub order: f64,
    pub free_slicing: f64,
    pub unitarity: f64,
    pub scaling: f64,
    /// Fraction of the packet width.
    pub peak_fraction: f64,
    pub constant_invariance: f64,
    /// In units of ε.
    pub bosonic_peak: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            command: None,
            output_dir: None,
            seed: None,
            tolerance_scale: 1.0,
        }
    }
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { name: "harmonic".into() }
    }
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { q: 1.0, p: 0.0 }
    }
}

impl Default for SpanSection {
    fn default() -> Self {
        Self {
            t: 1.0,
            dt: 1e-3,
            integrator: "auto".into(),
            sample_every: 10,
        }
    }
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            suite: "superspace".into(),
            samples: 4,
        }
    }
}

impl Default for LiouvilleSection {
    fn default() -> Self {
        Self {
            sigma: 0.05,
            grid: 256,
            q_range: [-2.0, 2.0],
            p_range: [-2.0, 2.0],
            remaps: 1,
            trace_dt: 1e-2,
            topology: "plane".into(),
            strata: 100,
            bin_factor: 8,
        }
    }
}

impl Default for QuantumSection {
    fn default() -> Self {
        Self {
            sweep: "none".into(),
            q_i: 1.0,
            q_f: 0.5,
            hbar: 1.0,
            slices: 512,
            sweep_slices: vec![2, 4, 8, 16, 32, 64, 128, 256, 512],
            sweep_hbar: vec![1.0, 0.1, 0.01],
            width_factor: 1.0,
        }
    }
}

impl Default for LyapunovSection {
    fn default() -> Self {
        Self { renorm_interval: 1.0 }
    }
}

impl Default for AmplitudeSection {
    fn default() -> Self {
        Self {
            slices: 4,
            epsilon: 1e-2,
            times: vec![0.0, 0.3, 0.7, std::f64::consts::FRAC_PI_2],
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 0.0,
            det_jacobi: 1e-8,
            pairing: 1e-8,
            lyapunov_sum: 1e-3,
            peak_cells: 1.0,
            histogram_l2: 5e-3,
            mass: 1e-3,
            sliced_error: 1e-3,
            order: 0.3,
            free_slicing: 1e-12,
            unitarity: 1e-6,
            scaling: 0.2,
            peak_fraction: 0.1,
            constant_invariance: 1e-6,
            bosonic_peak: 1.0,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            run: RunSection::default(),
            model: ModelSection::default(),
            initial: InitialSection::default(),
            span: SpanSection::default(),
            verify: VerifySection::default(),
            liouville: LiouvilleSection::default(),
            quantum: QuantumSection::default(),
            lyapunov: LyapunovSection::default(),
            amplitude: AmplitudeSection::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.run.command.ok_or_else(|| CliError::Config("no command given".into()))
    }

    pub fn models(&self) -> Vec<String> {
        self.model
            .name
            .split(',')
            .map(|s| s.trim().to_ascii_lowercase())
            .filter(|s| !s.is_empty())
            .collect()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.run.output_dir.clone().unwrap_or_else(|| PathBuf::from("cpi-output"))
    }

    /// sha256 of the canonical JSON form, without the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.output_dir = None;
        let text = serde_json::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Config(format!("{what} must be finite and in range")));
        let finite = [
            self.initial.q,
            self.initial.p,
            self.span.t,
            self.span.dt,
            self.run.tolerance_scale,
            self.liouville.sigma,
            self.liouville.trace_dt,
            self.quantum.q_i,
            self.quantum.q_f,
            self.quantum.hbar,
            self.quantum.width_factor,
            self.lyapunov.renorm_interval,
            self.amplitude.epsilon,
        ]
        .iter()
        .chain(&self.liouville.q_range)
        .chain(&self.liouville.p_range)
        .chain(&self.quantum.sweep_hbar)
        .chain(&self.amplitude.times)
        .all(|v| v.is_finite());
        if !finite {
            return bad("every physical parameter");
        }
        if self.span.t < 0.0 {
            return bad("T");
        }
        if self.span.dt <= 0.0 {
            return bad("dt");
        }
        if self.run.tolerance_scale <= 0.0 {
            return bad("tolerance_scale");
        }
        if self.models().is_empty() {
            return Err(CliError::Config("no model named".into()));
        }
        Ok(())
    }
}
