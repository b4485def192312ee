//! Parameter sweeps: seeds × grid points, run in parallel, reduced to
//! per-point statistics.

use rayon::prelude::*;
use serde::Serialize;

use convcert_core::analysis::{fit_minimal_gain, fit_umd_minimal_gain, StateKind};
use convcert_core::model::fmt_f64;

use crate::config::{
    ScenarioConfig, SignalConfig, SweepConfig, SweepParameter, SweepReduction, ThetaConfig,
    SCHEMA_VERSION,
};
use crate::scenario::{run_scenario, validate_scenario};
use crate::{HarnessError, Result};

/// One run of the sweep: a grid value paired with a seed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub swept_value: f64,
    pub seed: u64,
    /// Fitted minimal gain; absent when the run diverged.
    pub fitted_c: Option<f64>,
    pub diverged: bool,
}

/// Reduction over the seeds of one grid point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPointSummary {
    pub swept_value: f64,
    pub runs: u64,
    /// Selected headline statistic.
    pub reduced: Option<f64>,
    pub max_fitted_c: Option<f64>,
    pub divergence_count: u64,
    pub divergence_fraction: f64,
}

/// Full sweep output.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub schema: u32,
    pub parameter: SweepParameter,
    pub reduction: SweepReduction,
    pub fit_lambda: f64,
    pub points: Vec<SweepPointSummary>,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl SweepOutcome {
    /// CSV table: one row per (grid value, seed) run.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("swept_value,seed,fitted_c,diverged\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(row.swept_value),
                row.seed,
                row.fitted_c.map_or_else(|| "nan".to_string(), fmt_f64),
                u8::from(row.diverged),
            ));
        }
        out
    }
}

/// Apply the swept parameter to a scenario clone.
fn apply_parameter(
    cfg: &ScenarioConfig,
    parameter: SweepParameter,
    value: f64,
) -> Result<ScenarioConfig> {
    let mut out = cfg.clone();
    match parameter {
        SweepParameter::Epsilon => match &mut out.theta_star {
            ThetaConfig::Tv { epsilon, .. } => *epsilon = value,
            ThetaConfig::Fixed { .. } => {
                return Err(HarnessError::validation(vec![
                    "sweeping epsilon needs a tv theta_star".into(),
                ]))
            }
        },
        SweepParameter::C0 => match &mut out.theta_star {
            ThetaConfig::Tv { c0, .. } => *c0 = value,
            ThetaConfig::Fixed { .. } => {
                return Err(HarnessError::validation(vec![
                    "sweeping c0 needs a tv theta_star".into(),
                ]))
            }
        },
        SweepParameter::Mu => match &mut out.umd {
            Some(umd) => umd.mu = value,
            None => {
                return Err(HarnessError::validation(vec![
                    "sweeping mu needs an unmodelled-dynamics block".into(),
                ]))
            }
        },
        SweepParameter::EpochLen => match &mut out.controller {
            crate::config::ControllerConfig::PolePlacement { epoch_len, .. } => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(HarnessError::validation(vec![format!(
                        "epoch_len grid value {value} is not a positive integer"
                    )]));
                }
                *epoch_len = value as usize;
            }
            _ => {
                return Err(HarnessError::validation(vec![
                    "sweeping epoch_len needs the pole-placement controller".into(),
                ]))
            }
        },
        SweepParameter::Amplitude => match &mut out.disturbance {
            SignalConfig::Noise { amplitude } => *amplitude = value,
            SignalConfig::Sinusoid { amplitude, .. } => *amplitude = value,
            _ => {
                return Err(HarnessError::validation(vec![
                    "sweeping amplitude needs a noise or sinusoid disturbance".into(),
                ]))
            }
        },
    }
    Ok(out)
}

/// Validate the sweep without running it.
pub fn validate_sweep(cfg: &SweepConfig) -> Vec<String> {
    let mut out = Vec::new();
    if cfg.schema != SCHEMA_VERSION {
        out.push(format!("schema {} unsupported (expected {SCHEMA_VERSION})", cfg.schema));
        return out;
    }
    if cfg.sweep.grid.is_empty() {
        out.push("sweep grid is empty".into());
    }
    if cfg.sweep.seeds_per_point == 0 {
        out.push("sweep needs at least one seed per point".into());
    }
    if !(cfg.sweep.fit_lambda > 0.0 && cfg.sweep.fit_lambda < 1.0) {
        out.push(format!("fit_lambda {} outside (0,1)", cfg.sweep.fit_lambda));
    }
    for &v in &cfg.sweep.grid {
        if let Err(HarnessError::Validation { messages }) =
            apply_parameter(&cfg.scenario, cfg.sweep.parameter, v)
        {
            out.extend(messages);
            break;
        }
    }
    out.extend(validate_scenario(&cfg.scenario));
    out
}

/// Run the sweep: each grid point sees the same seed list, runs execute in
/// parallel, and the output order is fixed by (grid index, seed index).
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let violations = validate_sweep(cfg);
    if !violations.is_empty() {
        return Err(HarnessError::validation(violations));
    }

    let mut jobs = Vec::new();
    for (gi, &value) in cfg.sweep.grid.iter().enumerate() {
        for k in 0..cfg.sweep.seeds_per_point {
            jobs.push((gi, value, cfg.scenario.seed.wrapping_add(k)));
        }
    }

    let rows: Result<Vec<(usize, SweepRow)>> = jobs
        .par_iter()
        .map(|&(gi, value, seed)| {
            let mut scenario = apply_parameter(&cfg.scenario, cfg.sweep.parameter, value)?;
            scenario.seed = seed;
            scenario.certify = None; // fitting below; skip per-run requests
            let outcome = run_scenario(&scenario)?;
            let fitted_c = if outcome.trace.diverged() {
                None
            } else {
                let c = match cfg.sweep.state_kind {
                    StateKind::PhiZ1 => {
                        fit_minimal_gain(&outcome.trace, cfg.sweep.fit_lambda, StateKind::PhiZ1)?
                    }
                    StateKind::PhiZ1M => {
                        fit_umd_minimal_gain(&outcome.trace, cfg.sweep.fit_lambda)?
                    }
                };
                Some(c)
            };
            Ok((
                gi,
                SweepRow {
                    swept_value: value,
                    seed,
                    fitted_c,
                    diverged: outcome.trace.diverged(),
                },
            ))
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by_key(|(gi, row)| (*gi, row.seed));

    let mut points = Vec::with_capacity(cfg.sweep.grid.len());
    for (gi, &value) in cfg.sweep.grid.iter().enumerate() {
        let point_rows: Vec<&SweepRow> =
            rows.iter().filter(|(g, _)| *g == gi).map(|(_, r)| r).collect();
        let divergence_count = point_rows.iter().filter(|r| r.diverged).count() as u64;
        let divergence_fraction = divergence_count as f64 / point_rows.len().max(1) as f64;
        let max_fitted_c = point_rows
            .iter()
            .filter_map(|r| r.fitted_c)
            .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))));
        let reduced = match cfg.sweep.reduction {
            SweepReduction::MaxFittedC => max_fitted_c,
            SweepReduction::DivergenceFraction => Some(divergence_fraction),
        };
        points.push(SweepPointSummary {
            swept_value: value,
            runs: point_rows.len() as u64,
            reduced,
            max_fitted_c,
            divergence_count,
            divergence_fraction,
        });
    }

    Ok(SweepOutcome {
        schema: SCHEMA_VERSION,
        parameter: cfg.sweep.parameter,
        reduction: cfg.sweep.reduction,
        fit_lambda: cfg.sweep.fit_lambda,
        points,
        rows: rows.into_iter().map(|(_, r)| r).collect(),
    })
}
