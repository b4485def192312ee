//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 validation error (including unparseable
//! configs), 3 divergence during a requested simulation, 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use convcert_cli::output::{write_json, write_trace_csv, write_trajectory_csv};
use convcert_cli::{
    run_scenario, run_sweep, validate_scenario, validate_sweep, HarnessError, MarginsConfig,
    ScenarioConfig, SweepConfig,
};
use convcert_core::analysis::{
    fit_gain_decay_frontier, fit_umd_minimal_gain, MarginInputs, MarginReport, StateKind,
};

#[derive(Parser)]
#[command(
    name = "convcert",
    about = "Simulate discrete-time adaptive control loops and certify convolution bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and export trace, report, and summary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario and certify the requested (c, lambda) pairs.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario and fit the minimal gain over the requested decay grid.
    Fit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute the constructive robustness margins from a margins config.
    Margins {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a parameter sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a scenario or sweep config; prints one violation per line.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_INTERNAL: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

/// Print to stdout, tolerating a closed pipe (e.g. `convcert … | head`).
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(HarnessError::Validation { messages }) => {
            for m in messages {
                eprintln!("validation: {m}");
            }
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Io { path: path.display().to_string(), source: e })?;
    serde_json::from_str(&text).map_err(|e| {
        HarnessError::validation(vec![format!("{}: {e}", path.display())])
    })
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig, HarnessError> {
    let mut cfg: ScenarioConfig = read_config(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RunMode {
    /// Run whatever the config asks for.
    Simulate,
    /// Require and evaluate the certification block.
    Certify,
    /// Fit the minimal gain over the decay grid and export the frontier.
    Fit,
}

fn run_and_export(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    mode: RunMode,
) -> Result<ExitCode, HarnessError> {
    if mode != RunMode::Simulate && cfg.certify.is_none() {
        return Err(HarnessError::validation(vec![
            "this command needs a certify block (lambdas + state_kind) in the scenario".into(),
        ]));
    }
    let outcome = run_scenario(cfg)?;
    write_trace_csv(&out_dir.join("trace.csv"), &outcome.trace)?;
    write_trajectory_csv(&out_dir.join("theta.csv"), &outcome.theta)?;
    write_json(&out_dir.join("report.json"), &outcome.report)?;
    write_atomic_text(&out_dir.join("summary.txt"), &outcome.report.human_readable())?;
    if !outcome.report.certificates.is_empty() || !outcome.report.fitted.is_empty() {
        #[derive(serde::Serialize)]
        struct CertFile<'a> {
            schema: u32,
            fitted: &'a [convcert_cli::scenario::FittedPoint],
            certificates: &'a [convcert_core::analysis::BoundCertificate],
        }
        write_json(
            &out_dir.join("certificates.json"),
            &CertFile {
                schema: 1,
                fitted: &outcome.report.fitted,
                certificates: &outcome.report.certificates,
            },
        )?;
    }
    if mode == RunMode::Fit && !outcome.trace.diverged() {
        let cert_cfg = cfg.certify.as_ref().expect("checked above");
        let mut lambdas = cert_cfg.lambdas.clone();
        lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite lambdas"));
        let points: Vec<convcert_cli::scenario::FittedPoint> = match cert_cfg.state_kind {
            StateKind::PhiZ1 => fit_gain_decay_frontier(&outcome.trace, &lambdas, StateKind::PhiZ1)?
                .into_iter()
                .map(|(lambda, c_min)| convcert_cli::scenario::FittedPoint { lambda, c_min })
                .collect(),
            StateKind::PhiZ1M => {
                let mut pts = Vec::with_capacity(lambdas.len());
                for &lambda in &lambdas {
                    pts.push(convcert_cli::scenario::FittedPoint {
                        lambda,
                        c_min: fit_umd_minimal_gain(&outcome.trace, lambda)?,
                    });
                }
                pts
            }
        };
        #[derive(serde::Serialize)]
        struct FitFile {
            schema: u32,
            state_kind: StateKind,
            points: Vec<convcert_cli::scenario::FittedPoint>,
        }
        write_json(
            &out_dir.join("fit.json"),
            &FitFile { schema: 1, state_kind: cert_cfg.state_kind, points },
        )?;
    }
    emit(outcome.report.human_readable().trim_end());
    if outcome.trace.diverged() {
        return Ok(ExitCode::from(EXIT_DIVERGENCE));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_atomic_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    convcert_cli::output::write_atomic(path, text.as_bytes())
}

fn dispatch(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Simulate { config, out, seed } => {
            let cfg = load_scenario(&config, seed)?;
            run_and_export(&cfg, &out, RunMode::Simulate)
        }
        Command::Certify { config, out, seed } => {
            let cfg = load_scenario(&config, seed)?;
            run_and_export(&cfg, &out, RunMode::Certify)
        }
        Command::Fit { config, out, seed } => {
            let cfg = load_scenario(&config, seed)?;
            run_and_export(&cfg, &out, RunMode::Fit)
        }
        Command::Margins { config, out } => {
            let cfg: MarginsConfig = read_config(&config)?;
            if cfg.schema != convcert_cli::config::SCHEMA_VERSION {
                return Err(HarnessError::validation(vec![format!(
                    "schema {} unsupported",
                    cfg.schema
                )]));
            }
            let report = MarginReport::compute(MarginInputs {
                c: cfg.c,
                lambda: cfg.lambda,
                lambda1: cfg.lambda1,
                c0: cfg.c0,
                f_gain: cfg.f_gain,
                s_norm: cfg.s_norm,
                c1: cfg.c1,
                beta: cfg.beta,
                g_gain: cfg.g_gain,
                lambda2: cfg.lambda2,
            })
            .map_err(|e| HarnessError::validation(vec![e.to_string()]))?;
            write_json(&out.join("margins.json"), &report)?;
            emit(&format!("margins written to {}", out.join("margins.json").display()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, out, seed } => {
            let mut cfg: SweepConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.scenario.seed = s;
            }
            let outcome = run_sweep(&cfg)?;
            convcert_cli::output::write_atomic(
                &out.join("sweep.csv"),
                outcome.rows_csv().as_bytes(),
            )?;
            write_json(&out.join("sweep_summary.json"), &outcome)?;
            for p in &outcome.points {
                emit(&format!(
                    "value={:.6e} runs={} reduced={} max_fitted_c={} divergence_fraction={:.3}",
                    p.swept_value,
                    p.runs,
                    p.reduced.map_or_else(|| "n/a".into(), |v| format!("{v:.6e}")),
                    p.max_fitted_c.map_or_else(|| "n/a".into(), |c| format!("{c:.6e}")),
                    p.divergence_fraction
                ));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| HarnessError::Io { path: config.display().to_string(), source: e })?;
            // A sweep config is recognized by its `sweep` block.
            let violations = if text.contains("\"sweep\"") {
                let cfg: SweepConfig = serde_json::from_str(&text).map_err(|e| {
                    HarnessError::validation(vec![format!("{}: {e}", config.display())])
                })?;
                validate_sweep(&cfg)
            } else {
                let cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| {
                    HarnessError::validation(vec![format!("{}: {e}", config.display())])
                })?;
                validate_scenario(&cfg)
            };
            if violations.is_empty() {
                emit("ok");
                Ok(ExitCode::SUCCESS)
            } else {
                Err(HarnessError::validation(violations))
            }
        }
    }
}
