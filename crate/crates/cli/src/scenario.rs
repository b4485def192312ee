//! Scenario validation and execution.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use convcert_core::analysis::{
    check_convolution_bound, check_umd_closed_loop_bound, fit_minimal_gain, fit_umd_minimal_gain,
    BoundCertificate, StateKind,
};
use convcert_core::controllers::{deadbeat_baseline, OsaController, PpController};
use convcert_core::estimation::{ConvexParamSet, Halfspace, ParameterSet};
use convcert_core::model::{
    run_closed_loop, ClosedLoopTrace, Controller, GainBoundedMap, PlantSpec, Regressor,
    SignalSource, ZeroController,
};
use convcert_core::seeding;
use convcert_core::uncertainty::{
    generate_tv_trajectory, verify_tv_membership, verify_umd_bound, DirectionSource,
    ParameterTrajectory, TimeVariationClass, TvMode, UmdSetup, UnmodelledDynamicsSpec,
};

use crate::config::*;
use crate::{HarnessError, Result};

/// Membership tolerance used in validation checks.
const SET_TOL: f64 = 1e-9;

pub(crate) fn build_convex_set(cfg: &SetConfig) -> Result<ConvexParamSet> {
    match cfg {
        SetConfig::Box { lower, upper } => Ok(ConvexParamSet::box_set(
            DVector::from_vec(lower.clone()),
            DVector::from_vec(upper.clone()),
        )?),
        SetConfig::Ball { center, radius } => {
            Ok(ConvexParamSet::ball(DVector::from_vec(center.clone()), *radius)?)
        }
        SetConfig::Polytope { normals, offsets } => {
            if normals.len() != offsets.len() {
                return Err(HarnessError::validation(vec![format!(
                    "polytope has {} normals but {} offsets",
                    normals.len(),
                    offsets.len()
                )]));
            }
            let halfspaces = normals
                .iter()
                .zip(offsets)
                .map(|(n, &b)| Halfspace::new(DVector::from_vec(n.clone()), b))
                .collect();
            Ok(ConvexParamSet::polytope(halfspaces)?)
        }
        SetConfig::Union { .. } => Err(HarnessError::validation(vec![
            "a convex set is required here; unions are only admissible as the plant's \
             parameter region"
                .into(),
        ])),
    }
}

pub(crate) fn build_parameter_set(cfg: &SetConfig) -> Result<ParameterSet> {
    match cfg {
        SetConfig::Union { members } => {
            let mut built = Vec::with_capacity(members.len());
            for m in members {
                built.push(build_convex_set(m)?);
            }
            Ok(ParameterSet::union(built)?)
        }
        other => Ok(ParameterSet::Convex(build_convex_set(other)?)),
    }
}

pub(crate) fn build_map(cfg: &MapConfig, dim_in: usize, dim_out: usize) -> Result<GainBoundedMap> {
    let map = match cfg {
        MapConfig::Identity => GainBoundedMap::identity(dim_in),
        MapConfig::Linear { rows, cols, data } => {
            if rows * cols != data.len() {
                return Err(HarnessError::validation(vec![format!(
                    "linear map data has {} entries for a {rows}x{cols} matrix",
                    data.len()
                )]));
            }
            GainBoundedMap::linear(DMatrix::from_row_slice(*rows, *cols, data))
        }
        MapConfig::Tanh { gain } => GainBoundedMap::tanh(dim_in, *gain),
        MapConfig::Norm { gain } => GainBoundedMap::norm_scalar(dim_in, *gain),
        MapConfig::Zero => GainBoundedMap::zero(dim_in, dim_out),
    };
    Ok(map)
}

fn build_signal(cfg: &SignalConfig, dim: usize, seed: u64, label: &str) -> SignalSource {
    match cfg {
        SignalConfig::Zero => SignalSource::Zero { dim },
        SignalConfig::Constant { value } => {
            SignalSource::Constant { value: DVector::from_vec(value.clone()) }
        }
        SignalConfig::Sinusoid { amplitude, period, phase } => SignalSource::Sinusoid {
            dim,
            amplitude: *amplitude,
            period: *period,
            phase: *phase,
            t_ref: 0,
        },
        SignalConfig::Noise { amplitude } => SignalSource::UniformNoise {
            dim,
            amplitude: *amplitude,
            seed: seeding::derive_stream(seed, label),
        },
    }
}

fn tv_mode(cfg: TvModeConfig) -> TvMode {
    match cfg {
        TvModeConfig::Constant => TvMode::Constant,
        TvModeConfig::Drift => TvMode::Drift,
        TvModeConfig::Jumps => TvMode::Jumps,
        TvModeConfig::DriftJumps => TvMode::DriftJumps,
    }
}

/// A built controller with its concrete type retained for post-run stats.
pub(crate) enum BuiltController {
    Zero(ZeroController),
    Deadbeat(Box<convcert_core::controllers::DeadbeatController>),
    Osa(Box<OsaController>),
    Pp(Box<PpController>),
}

impl BuiltController {
    fn as_dyn_mut(&mut self) -> &mut dyn Controller {
        match self {
            BuiltController::Zero(c) => c,
            BuiltController::Deadbeat(c) => c.as_mut(),
            BuiltController::Osa(c) => c.as_mut(),
            BuiltController::Pp(c) => c.as_mut(),
        }
    }

    fn diophantine_failures(&self) -> usize {
        match self {
            BuiltController::Pp(c) => c.refresh_failures().len(),
            _ => 0,
        }
    }
}

fn init_estimate(
    explicit: &Option<Vec<f64>>,
    set: &ConvexParamSet,
) -> Result<DVector<f64>> {
    match explicit {
        Some(v) => Ok(DVector::from_vec(v.clone())),
        None => Ok(set.center_point()?),
    }
}

pub(crate) fn build_controller(cfg: &ScenarioConfig) -> Result<BuiltController> {
    match &cfg.controller {
        ControllerConfig::Zero => Ok(BuiltController::Zero(ZeroController::new(
            cfg.plant.input_dim,
        ))),
        ControllerConfig::Deadbeat => {
            let theta = match &cfg.theta_star {
                ThetaConfig::Fixed { value } => DVector::from_vec(value.clone()),
                ThetaConfig::Tv { .. } => {
                    return Err(HarnessError::validation(vec![
                        "the deadbeat baseline needs fixed true parameters".into(),
                    ]))
                }
            };
            Ok(BuiltController::Deadbeat(Box::new(deadbeat_baseline(&theta)?)))
        }
        ControllerConfig::Osa { set1, set2, theta1_init, theta2_init, sigma0 } => {
            let s1 = build_convex_set(set1)?;
            let s2 = build_convex_set(set2)?;
            let t1 = init_estimate(theta1_init, &s1)?;
            let t2 = init_estimate(theta2_init, &s2)?;
            Ok(BuiltController::Osa(Box::new(OsaController::new(s1, s2, t1, t2, *sigma0)?)))
        }
        ControllerConfig::PolePlacement {
            order,
            epoch_len,
            set1,
            set2,
            theta1_init,
            theta2_init,
            sigma0,
        } => {
            let s1 = build_convex_set(set1)?;
            let s2 = build_convex_set(set2)?;
            let t1 = init_estimate(theta1_init, &s1)?;
            let t2 = init_estimate(theta2_init, &s2)?;
            Ok(BuiltController::Pp(Box::new(PpController::new(
                *order,
                *epoch_len,
                cfg.horizon.t0,
                s1,
                s2,
                t1,
                t2,
                *sigma0,
            )?)))
        }
    }
}

pub(crate) fn build_plant(cfg: &ScenarioConfig) -> Result<PlantSpec> {
    let plant = &cfg.plant;
    let spec = PlantSpec {
        n_y: plant.n_y,
        n_u: plant.n_u,
        output_dim: plant.output_dim,
        input_dim: plant.input_dim,
        param_rows: plant.param_rows,
        f: build_map(&plant.f, plant.regressor_dim(), plant.param_rows)?,
        parameter_set: build_parameter_set(&plant.parameter_set)?,
    };
    spec.validate()?;
    Ok(spec)
}

pub(crate) fn build_theta(
    cfg: &ScenarioConfig,
    spec: &PlantSpec,
    seed: u64,
) -> Result<ParameterTrajectory> {
    let len = cfg.horizon.steps + 1;
    match &cfg.theta_star {
        ThetaConfig::Fixed { value } => {
            if value.len() != spec.param_rows * spec.output_dim {
                return Err(HarnessError::validation(vec![format!(
                    "theta_star has {} entries, plant needs {}",
                    value.len(),
                    spec.param_rows * spec.output_dim
                )]));
            }
            Ok(ParameterTrajectory::constant(
                DMatrix::from_row_slice(spec.param_rows, spec.output_dim, value),
                cfg.horizon.t0,
                len,
            ))
        }
        ThetaConfig::Tv { c0, epsilon, mode } => {
            let class =
                TimeVariationClass::new(spec.parameter_set.clone(), *c0, *epsilon)?;
            Ok(generate_tv_trajectory(
                &class,
                tv_mode(*mode),
                seeding::derive_stream(seed, seeding::LABEL_THETA),
                cfg.horizon.t0,
                len,
                spec.param_rows,
                spec.output_dim,
            )?)
        }
    }
}

fn build_umd(cfg: &ScenarioConfig, spec: &PlantSpec, seed: u64) -> Result<Option<UmdSetup>> {
    let Some(umd) = &cfg.umd else { return Ok(None) };
    let g = build_map(&umd.g, spec.regressor_dim(), 1)?;
    let direction = match &umd.direction {
        DirectionConfig::Constant { value } => {
            DirectionSource::Constant { value: DVector::from_vec(value.clone()) }
        }
        DirectionConfig::Random => DirectionSource::Random {
            dim: spec.output_dim,
            seed: seeding::derive_stream(seed, seeding::LABEL_DIR),
        },
        DirectionConfig::Adversarial => {
            DirectionSource::AdversarialSign { dim: spec.output_dim }
        }
    };
    Ok(Some(UmdSetup {
        spec: UnmodelledDynamicsSpec::new(umd.beta, umd.mu, g, umd.m0)?,
        direction,
    }))
}

/// Whether the built set certifiably excludes `coordinate = 0`, via its
/// outer box approximation (sound but conservative for polytopes).
fn excludes_zero_at(set: &ConvexParamSet, coord: usize) -> bool {
    match set {
        ConvexParamSet::Box { lower, upper } => lower[coord] > 0.0 || upper[coord] < 0.0,
        ConvexParamSet::Ball { center, radius } => center[coord].abs() > *radius,
        ConvexParamSet::Polytope { bbox_lower, bbox_upper, .. } => {
            bbox_lower[coord] > SET_TOL || bbox_upper[coord] < -SET_TOL
        }
    }
}

/// Check every precondition the module operations rely on; returns one
/// message per violation, empty when the scenario is runnable.
pub fn validate_scenario(cfg: &ScenarioConfig) -> Vec<String> {
    let mut out = Vec::new();
    if cfg.schema != SCHEMA_VERSION {
        out.push(format!("schema {} unsupported (expected {SCHEMA_VERSION})", cfg.schema));
        return out;
    }
    if cfg.horizon.steps == 0 {
        out.push("horizon must cover at least one step".into());
    }

    // Plant wiring.
    let spec = match build_plant(cfg) {
        Ok(s) => s,
        Err(e) => {
            out.push(format!("plant: {e}"));
            return out;
        }
    };
    if cfg.init.phi0.len() != spec.regressor_dim() {
        out.push(format!(
            "init.phi0 has {} entries, the regressor needs {}",
            cfg.init.phi0.len(),
            spec.regressor_dim()
        ));
    }

    // Controller-specific preconditions.
    match &cfg.controller {
        ControllerConfig::Zero => {}
        ControllerConfig::Deadbeat => {
            if spec.output_dim != 1 || spec.input_dim != 1 || spec.n_y != spec.n_u {
                out.push("deadbeat baseline needs a scalar plant with n_y = n_u".into());
            }
            if !matches!(cfg.theta_star, ThetaConfig::Fixed { .. }) {
                out.push("deadbeat baseline needs fixed true parameters".into());
            }
            if cfg.plant.f != MapConfig::Identity {
                out.push("deadbeat baseline assumes the identity regressor map".into());
            }
        }
        ControllerConfig::Osa { set1, set2, theta1_init, theta2_init, sigma0 } => {
            if spec.n_y != 1 || spec.n_u != 1 || spec.output_dim != 1 || spec.input_dim != 1 {
                out.push("one-step-ahead control needs the first-order scalar plant".into());
            }
            if spec.param_rows != 2 {
                out.push("one-step-ahead control needs param_rows = 2 (a and b)".into());
            }
            if cfg.plant.f != MapConfig::Identity {
                out.push("one-step-ahead control assumes the identity regressor map".into());
            }
            if !(*sigma0 == 1 || *sigma0 == 2) {
                out.push(format!("sigma0 must be 1 or 2, got {sigma0}"));
            }
            for (name, set_cfg, init) in
                [("set1", set1, theta1_init), ("set2", set2, theta2_init)]
            {
                match build_convex_set(set_cfg) {
                    Ok(set) => {
                        if set.dim() != 2 {
                            out.push(format!("{name} must live in R^2"));
                        } else {
                            if !excludes_zero_at(&set, 1) {
                                out.push(format!(
                                    "{name} does not certifiably exclude b = 0"
                                ));
                            }
                            if let Some(v) = init {
                                check_init_membership(&mut out, name, v, &set);
                            }
                        }
                    }
                    Err(e) => out.push(format!("{name}: {e}")),
                }
            }
        }
        ControllerConfig::PolePlacement {
            order,
            epoch_len,
            set1,
            set2,
            theta1_init,
            theta2_init,
            sigma0,
        } => {
            if spec.output_dim != 1 || spec.input_dim != 1 {
                out.push("pole placement needs a scalar plant".into());
            }
            if spec.n_y != *order || spec.n_u != *order || spec.param_rows != 2 * order {
                out.push(format!(
                    "pole placement of order {order} needs n_y = n_u = {order} and \
                     param_rows = {}",
                    2 * order
                ));
            }
            if cfg.plant.f != MapConfig::Identity {
                out.push("pole placement assumes the identity regressor map".into());
            }
            if *epoch_len < 2 * order {
                out.push(format!("epoch_len = {epoch_len} violates N >= 2n = {}", 2 * order));
            }
            if !(*sigma0 == 1 || *sigma0 == 2) {
                out.push(format!("sigma0 must be 1 or 2, got {sigma0}"));
            }
            for (name, set_cfg, init) in
                [("set1", set1, theta1_init), ("set2", set2, theta2_init)]
            {
                match build_convex_set(set_cfg) {
                    Ok(set) => {
                        if set.dim() != 2 * order {
                            out.push(format!("{name} must live in R^{}", 2 * order));
                            continue;
                        }
                        if let Some(v) = init {
                            check_init_membership(&mut out, name, v, &set);
                        }
                        // The epoch-zero design must be solvable at the
                        // initial estimate (explicit or the set center).
                        let theta0 = match init {
                            Some(v) if v.len() == 2 * order => {
                                Some(DVector::from_vec(v.clone()))
                            }
                            Some(_) => None,
                            None => set.center_point().ok(),
                        };
                        if let Some(theta0) = theta0 {
                            let (a_hat, b_hat) =
                                convcert_core::controllers::Polynomial::plant_pair_from_theta(
                                    &theta0,
                                );
                            if let Err(e) =
                                convcert_core::controllers::pp_solve_diophantine(&a_hat, &b_hat)
                            {
                                out.push(format!(
                                    "{name} initial estimate admits no pole-placement design: {e}"
                                ));
                            }
                        }
                    }
                    Err(e) => out.push(format!("{name}: {e}")),
                }
            }
        }
    }

    // True parameters.
    match &cfg.theta_star {
        ThetaConfig::Fixed { value } => {
            if value.len() != spec.param_rows * spec.output_dim {
                out.push(format!(
                    "theta_star has {} entries, plant needs {}",
                    value.len(),
                    spec.param_rows * spec.output_dim
                ));
            } else {
                let v = DVector::from_vec(value.clone());
                match spec.parameter_set.contains(&v, SET_TOL * (1.0 + spec.parameter_norm_bound())) {
                    Ok(true) => {}
                    Ok(false) => out.push("theta_star lies outside the parameter set".into()),
                    Err(e) => out.push(format!("theta_star membership: {e}")),
                }
            }
        }
        ThetaConfig::Tv { c0, epsilon, .. } => {
            if !(*c0 >= 0.0) {
                out.push(format!("tv class needs c0 >= 0, got {c0}"));
            }
            if !(*epsilon >= 0.0) {
                out.push(format!("tv class needs epsilon >= 0, got {epsilon}"));
            }
        }
    }

    // Unmodelled dynamics.
    if let Some(umd) = &cfg.umd {
        if !(umd.beta > 0.0 && umd.beta < 1.0) {
            out.push(format!("umd beta must lie in (0,1), got {}", umd.beta));
        }
        if !(umd.mu >= 0.0) {
            out.push(format!("umd mu must be >= 0, got {}", umd.mu));
        }
        if !(umd.m0 >= 0.0) {
            out.push(format!("umd m0 must be >= 0, got {}", umd.m0));
        }
        if let MapConfig::Linear { rows, .. } = umd.g {
            if rows != 1 {
                out.push("umd map g must be scalar-valued".into());
            }
        }
    }

    // Certification requests.
    if let Some(cert) = &cfg.certify {
        if cert.lambdas.is_empty() {
            out.push("certify.lambdas must be nonempty".into());
        }
        for &l in &cert.lambdas {
            if !(l > 0.0 && l < 1.0) {
                out.push(format!("certify decay rate {l} outside (0,1)"));
            }
        }
        if let Some(c) = cert.c {
            if !(c >= 1.0) {
                out.push(format!("certify gain {c} must be >= 1"));
            }
        }
    }

    out
}

fn check_init_membership(out: &mut Vec<String>, name: &str, v: &[f64], set: &ConvexParamSet) {
    if v.len() != set.dim() {
        out.push(format!("{name} initial estimate has {} entries, set needs {}", v.len(), set.dim()));
        return;
    }
    match set.contains(&DVector::from_vec(v.to_vec()), SET_TOL * (1.0 + set.norm_bound())) {
        Ok(true) => {}
        Ok(false) => out.push(format!("{name} initial estimate lies outside its set")),
        Err(e) => out.push(format!("{name} membership check: {e}")),
    }
}

/// One fitted point of the gain–decay frontier.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FittedPoint {
    pub lambda: f64,
    pub c_min: f64,
}

/// Summary of one scenario run, JSON-exportable.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub schema: u32,
    pub seed: u64,
    pub t0: i64,
    pub steps_requested: usize,
    pub steps_recorded: usize,
    pub diverged_at: Option<i64>,
    pub z2_violation_at: Option<i64>,
    pub direction_clamp_events: usize,
    pub diophantine_failures: usize,
    /// Independent recheck of the unmodelled-dynamics bound, when present.
    pub umd_bound_ok: Option<bool>,
    /// Independent recheck of class membership for generated trajectories.
    pub tv_membership_ok: Option<bool>,
    pub fitted: Vec<FittedPoint>,
    pub certificates: Vec<BoundCertificate>,
}

impl ScenarioReport {
    /// Plain-text rendering for the run summary file.
    pub fn human_readable(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "scenario run: seed={} t0={} steps={}/{}\n",
            self.seed, self.t0, self.steps_recorded, self.steps_requested
        ));
        match self.diverged_at {
            Some(t) => s.push_str(&format!("divergence at t={t}\n")),
            None => s.push_str("no divergence\n"),
        }
        if let Some(t) = self.z2_violation_at {
            s.push_str(&format!("z2 left its constraint set at t={t}\n"));
        }
        if self.direction_clamp_events > 0 {
            s.push_str(&format!("{} direction clamp events\n", self.direction_clamp_events));
        }
        if self.diophantine_failures > 0 {
            s.push_str(&format!(
                "{} epoch redesigns kept previous gains (near-singular)\n",
                self.diophantine_failures
            ));
        }
        if let Some(ok) = self.umd_bound_ok {
            s.push_str(&format!("umd bound recheck: {}\n", if ok { "ok" } else { "VIOLATED" }));
        }
        if let Some(ok) = self.tv_membership_ok {
            s.push_str(&format!(
                "tv class membership recheck: {}\n",
                if ok { "ok" } else { "VIOLATED" }
            ));
        }
        for p in &self.fitted {
            s.push_str(&format!("fit: lambda={:.6} c_min={:.6e}\n", p.lambda, p.c_min));
        }
        for c in &self.certificates {
            s.push_str(&format!(
                "certificate: c={:.6e} lambda={:.6} kind={:?} verified={} max_slack={:.3e} \
                 worst_pair=({}, {})\n",
                c.c, c.lambda, c.state_kind, c.verified, c.max_slack, c.worst_pair.0, c.worst_pair.1
            ));
        }
        s
    }
}

/// Everything a scenario run produces.
pub struct ScenarioOutcome {
    pub trace: ClosedLoopTrace,
    pub theta: ParameterTrajectory,
    pub report: ScenarioReport,
}

/// Run one scenario with the seed stored in the config.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let violations = validate_scenario(cfg);
    if !violations.is_empty() {
        return Err(HarnessError::validation(violations));
    }
    let seed = cfg.seed;
    let spec = build_plant(cfg)?;
    let theta = build_theta(cfg, &spec, seed)?;
    let mut controller = build_controller(cfg)?;
    let w_src = build_signal(&cfg.disturbance, spec.output_dim, seed, seeding::LABEL_W);
    let r_src = build_signal(&cfg.reference, spec.output_dim, seed, seeding::LABEL_R);
    let umd = build_umd(cfg, &spec, seed)?;
    let init = Regressor::from_flat(
        &DVector::from_vec(cfg.init.phi0.clone()),
        spec.n_y,
        spec.n_u,
        spec.output_dim,
        spec.input_dim,
    )?;

    let trace = run_closed_loop(
        &spec,
        controller.as_dyn_mut(),
        &theta,
        &w_src,
        &r_src,
        umd.as_ref(),
        cfg.horizon.t0,
        cfg.horizon.steps,
        &init,
    )?;

    // Independent rechecks of the injected uncertainties.
    let umd_bound_ok = umd.as_ref().map(|setup| verify_umd_bound(&trace, &setup.spec).ok);
    let tv_membership_ok = match &cfg.theta_star {
        ThetaConfig::Tv { c0, epsilon, .. } => {
            let class = TimeVariationClass::new(spec.parameter_set.clone(), *c0, *epsilon)?;
            Some(verify_tv_membership(&theta, &class)?.member)
        }
        ThetaConfig::Fixed { .. } => None,
    };

    let mut fitted = Vec::new();
    let mut certificates = Vec::new();
    if let Some(cert_cfg) = &cfg.certify {
        if !trace.diverged() {
            for &lambda in &cert_cfg.lambdas {
                match cert_cfg.c {
                    Some(c) => {
                        let cert = match cert_cfg.state_kind {
                            StateKind::PhiZ1 => {
                                check_convolution_bound(&trace, c, lambda, StateKind::PhiZ1)?
                            }
                            StateKind::PhiZ1M => check_umd_closed_loop_bound(&trace, c, lambda)?,
                        };
                        certificates.push(cert);
                    }
                    None => {
                        let c_min = match cert_cfg.state_kind {
                            StateKind::PhiZ1 => {
                                fit_minimal_gain(&trace, lambda, StateKind::PhiZ1)?
                            }
                            StateKind::PhiZ1M => fit_umd_minimal_gain(&trace, lambda)?,
                        };
                        fitted.push(FittedPoint { lambda, c_min });
                        let cert = match cert_cfg.state_kind {
                            StateKind::PhiZ1 => check_convolution_bound(
                                &trace,
                                c_min + 1e-9,
                                lambda,
                                StateKind::PhiZ1,
                            )?,
                            StateKind::PhiZ1M => {
                                check_umd_closed_loop_bound(&trace, c_min + 1e-9, lambda)?
                            }
                        };
                        certificates.push(cert);
                    }
                }
            }
        }
    }

    let report = ScenarioReport {
        schema: SCHEMA_VERSION,
        seed,
        t0: cfg.horizon.t0,
        steps_requested: cfg.horizon.steps + 1,
        steps_recorded: trace.len(),
        diverged_at: trace.divergence,
        z2_violation_at: trace.z2_violation,
        direction_clamp_events: trace.steps.iter().filter(|s| s.dir_clamped).count(),
        diophantine_failures: controller.diophantine_failures(),
        umd_bound_ok,
        tv_membership_ok,
        fitted,
        certificates,
    };

    Ok(ScenarioOutcome { trace, theta, report })
}
