use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cpi_cli::{run, Command, RunConfig};

/// Classical path integrals in superspace: identity suites, extended
/// dynamics, Liouville evolution and Gaussian quantum propagators.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
/// config or IO error. `summary.json` is always written to the output
/// directory.
#[derive(Parser, Debug)]
#[command(name = "cpi", version)]
struct Cli {
    /// TOML run config; flags given here override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for every stochastic step of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies every check tolerance.
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
    /// May be omitted when the config names `run.command`.
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Model name, or a comma-separated list.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// auto, leapfrog, yoshida4 or rk4.
    #[arg(long)]
    integrator: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Exact identity suites in superspace.
    Verify {
        /// superspace, expansion, lattice, projector or euler-lagrange.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Hamilton flow with Jacobi and adjoint transport.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sample_every: Option<usize>,
    },
    /// Grid evolution of a Gaussian density, against an ensemble.
    Liouville {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        /// Ensemble has strata² samples; 0 disables it.
        #[arg(long)]
        strata: Option<usize>,
    },
    /// Gaussian propagators: single value, slice sweep or ħ sweep.
    Quantum {
        #[command(flatten)]
        common: Common,
        /// none, n (or N) or hbar.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        slices: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        q_i: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        q_f: Option<f64>,
    },
    /// Lyapunov spectrum from the Jacobi matrix.
    Lyapunov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        renorm_interval: Option<f64>,
    },
    /// Ghost-sector probability/amplitude check for quadratic models.
    #[command(name = "eq5-check")]
    AmplitudeCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        slices: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

fn apply_common(cfg: &mut RunConfig, c: Common) {
    if let Some(v) = c.model {
        cfg.model.name = v;
    }
    if let Some(v) = c.q {
        cfg.initial.q = v;
    }
    if let Some(v) = c.p {
        cfg.initial.p = v;
    }
    if let Some(v) = c.t {
        cfg.span.t = v;
    }
    if let Some(v) = c.dt {
        cfg.span.dt = v;
    }
    if let Some(v) = c.integrator {
        cfg.span.integrator = v;
    }
}

fn resolve(cli: Cli) -> Result<RunConfig, cpi_cli::CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.output_dir {
        cfg.run.output_dir = Some(v);
    }
    if let Some(v) = cli.seed {
        cfg.run.seed = Some(v);
    }
    if let Some(v) = cli.tolerance_scale {
        cfg.run.tolerance_scale = v;
    }
    let Some(sub) = cli.command else {
        return Ok(cfg);
    };
    let cmd = match sub {
        Sub::Verify { suite } => {
            if let Some(v) = suite {
                cfg.verify.suite = v;
            }
            Command::Verify
        }
        Sub::Evolve { common, sample_every } => {
            apply_common(&mut cfg, common);
            if let Some(v) = sample_every {
                cfg.span.sample_every = v;
            }
            Command::Evolve
        }
        Sub::Liouville { common, sigma, grid, strata } => {
            apply_common(&mut cfg, common);
            if let Some(v) = sigma {
                cfg.liouville.sigma = v;
            }
            if let Some(v) = grid {
                cfg.liouville.grid = v;
            }
            if let Some(v) = strata {
                cfg.liouville.strata = v;
            }
            Command::Liouville
        }
        Sub::Quantum { common, sweep, hbar, slices, q_i, q_f } => {
            apply_common(&mut cfg, common);
            if let Some(v) = sweep {
                cfg.quantum.sweep = v.to_ascii_lowercase();
            }
            if let Some(v) = hbar {
                cfg.quantum.hbar = v;
            }
            if let Some(v) = slices {
                cfg.quantum.slices = v;
            }
            if let Some(v) = q_i {
                cfg.quantum.q_i = v;
            }
            if let Some(v) = q_f {
                cfg.quantum.q_f = v;
            }
            Command::Quantum
        }
        Sub::Lyapunov { common, renorm_interval } => {
            apply_common(&mut cfg, common);
            if let Some(v) = renorm_interval {
                cfg.lyapunov.renorm_interval = v;
            }
            Command::Lyapunov
        }
        Sub::AmplitudeCheck { common, slices, epsilon } => {
            apply_common(&mut cfg, common);
            if let Some(v) = slices {
                cfg.amplitude.slices = v;
            }
            if let Some(v) = epsilon {
                cfg.amplitude.epsilon = v;
            }
            Command::AmplitudeCheck
        }
    };
    cfg.run.command = Some(cmd);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cpi: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(out) => {
            let failed: Vec<_> = out.summary.checks.iter().filter(|c| !c.passed()).collect();
            for c in &failed {
                eprintln!("FAIL {} residual {:e} tolerance {:e}", c.check, c.residual, c.tolerance);
            }
            if let Some(e) = &out.summary.error {
                eprintln!("cpi: {e}");
            }
            println!(
                "{}: {} checks, {} failed, summary in {}",
                out.summary.command,
                out.summary.checks.len(),
                failed.len(),
                out.output_dir.join(cpi_cli::SUMMARY_FILE).display()
            );
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("cpi: {e}");
            ExitCode::from(2)
        }
    }
}
