//! Acceptance criteria, one line each. Every criterion runs the shipped
//! config files in `configs/` through the same code path as the `cpi`
//! binary, so each line corresponds to `cpi --config configs/<file>`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cpi_cli::{run, RunConfig, RunStatus, Summary};

struct Criterion {
    id: &'static str,
    title: &'static str,
    configs: &'static [&'static str],
    budget: Duration,
    /// Check names (prefix match) that must be present in the summaries.
    required: &'static [&'static str],
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: "AC1",
        title: "superfield expansion of H, exact residual 0",
        configs: &["ac1_expansion.toml"],
        budget: secs(5),
        required: &[
            "superfield_expansion/free",
            "superfield_expansion/harmonic",
            "superfield_expansion/quartic",
            "superfield_expansion/cubic",
        ],
    },
    Criterion {
        id: "AC2",
        title: "lattice Berezin reduction, N = 1, 2, 4, 8, exact residual 0",
        configs: &["ac2_lattice.toml"],
        budget: secs(30),
        required: &[
            "lattice_berezin_reduction/free/N=1",
            "lattice_berezin_reduction/harmonic/N=2",
            "lattice_berezin_reduction/quartic/N=4",
            "lattice_berezin_reduction/cubic/N=8",
        ],
    },
    Criterion {
        id: "AC3",
        title: "quantization projector equals S/ħ for ħ = 1, 1/2",
        configs: &["ac3_projector.toml"],
        budget: secs(5),
        required: &[
            "quantize_projector/cubic/N=8/hbar=1",
            "quantize_projector/cubic/N=8/hbar=1/2",
            "quantize_projector/free/N=1/hbar=1/2",
        ],
    },
    Criterion {
        id: "AC4",
        title: "det J = 1 and J̄ᵀJ = I within 1e-8 over T = 100; Σλ = 0 within 1e-3 at T = 1000",
        configs: &["ac4_invariants.toml", "ac4_lyapunov.toml"],
        budget: secs(60),
        required: &[
            "det_jacobi/pendulum",
            "det_jacobi/quartic",
            "pairing/pendulum",
            "pairing/quartic",
            "lyapunov_sum/pendulum",
            "lyapunov_sum/quartic",
        ],
    },
    Criterion {
        id: "AC5",
        title: "Liouville peak within one cell of the endpoint; grid vs ensemble L2 < 5e-3",
        configs: &["ac5_liouville.toml"],
        budget: secs(120),
        required: &[
            "peak_offset_cells/harmonic",
            "peak_offset_cells/pendulum",
            "histogram_l2/harmonic",
            "histogram_l2/pendulum",
        ],
    },
    Criterion {
        id: "AC6",
        title: "sliced oscillator error < 1e-3 at N = 512, order 2 ± 0.3; free slicing exact",
        configs: &["ac6_slicing.toml"],
        budget: secs(30),
        required: &[
            "sliced_error/harmonic/N=512",
            "convergence_order/harmonic",
            "free_slicing_exact/free",
        ],
    },
    Criterion {
        id: "AC7",
        title: "spread ∝ √ħ within 20%; peak within width/10 at ħ = 0.01",
        configs: &["ac7_semiclassical.toml"],
        budget: secs(30),
        required: &["spread_scaling/harmonic", "peak_offset/harmonic/hbar=0.01"],
    },
    Criterion {
        id: "AC8",
        title: "ghost-sector constant K nonzero and T-independent within 1e-6; bosonic peak within ε",
        configs: &["ac8_amplitude.toml"],
        budget: secs(60),
        required: &[
            "constant_nonzero/harmonic",
            "constant_invariance/harmonic",
            "bosonic_peak/harmonic",
        ],
    },
];

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_config(name: &str, out: &std::path::Path) -> Result<(Summary, String), String> {
    let mut cfg = RunConfig::load(&config_path(name)).map_err(|e| e.to_string())?;
    cfg.run.output_dir = Some(out.join(name.trim_end_matches(".toml")));
    let outcome = run(&cfg).map_err(|e| e.to_string())?;
    let bytes = std::fs::read_to_string(outcome.output_dir.join(cpi_cli::SUMMARY_FILE)).map_err(|e| e.to_string())?;
    Ok((outcome.summary, bytes))
}

fn main() -> ExitCode {
    let first = tempfile::tempdir().expect("temp dir");
    let second = tempfile::tempdir().expect("temp dir");
    let mut all_ok = true;
    let mut bytes = Vec::new();

    for c in CRITERIA {
        let start = Instant::now();
        let mut notes = Vec::new();
        let mut ok = true;
        let mut checks = Vec::new();
        for name in c.configs {
            match run_config(name, first.path()) {
                Ok((summary, text)) => {
                    if summary.status != RunStatus::Pass {
                        ok = false;
                        if let Some(e) = &summary.error {
                            notes.push(format!("{name}: {e}"));
                        }
                        for f in summary.checks.iter().filter(|k| !k.passed()) {
                            notes.push(format!("{} residual {:e} > {:e}", f.check, f.residual, f.tolerance));
                        }
                    }
                    checks.extend(summary.checks);
                    bytes.push((*name, text));
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{name}: {e}"));
                }
            }
        }
        let elapsed = start.elapsed();
        for r in c.required {
            if !checks.iter().any(|k| k.check.starts_with(r)) {
                ok = false;
                notes.push(format!("missing check {r}"));
            }
        }
        if elapsed > c.budget {
            ok = false;
            notes.push(format!("runtime over budget of {} s", c.budget.as_secs()));
        }
        all_ok &= ok;
        println!(
            "{} {} {} ({} checks, {:.2} s, budget {} s){}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            checks.len(),
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if notes.is_empty() { String::new() } else { format!(": {}", notes.join("; ")) }
        );
    }

    let start = Instant::now();
    let mut diffs = Vec::new();
    for (name, text) in &bytes {
        match run_config(name, second.path()) {
            Ok((_, again)) if &again == text => {}
            Ok(_) => diffs.push(format!("{name} differs")),
            Err(e) => diffs.push(format!("{name}: {e}")),
        }
    }
    let ok = diffs.is_empty() && !bytes.is_empty();
    all_ok &= ok;
    println!(
        "AC9 {} rerun of every config gives a byte-identical summary.json ({} configs, {:.2} s){}",
        if ok { "PASS" } else { "FAIL" },
        bytes.len(),
        start.elapsed().as_secs_f64(),
        if diffs.is_empty() { String::new() } else { format!(": {}", diffs.join("; ")) }
    );

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
