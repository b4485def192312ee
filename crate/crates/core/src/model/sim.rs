//! The closed-loop simulator.
//!
//! Per step: the controller's output map produces `u(t)` from the masked
//! regressor, the window is completed, the plant reveals `y(t+1)`, and the
//! controller state advances. The initial window `φ(t_0)` is supplied in full;
//! strictly proper controllers take `u(t_0)` from it, while controllers whose
//! output map is well-posed at `t_0` overwrite the slot.
//!
//! Crossing the overflow threshold is recorded on the trace as divergence and
//! stops the run; it is an experiment outcome, not an error.

use nalgebra::DVector;

use crate::error::CoreError;
use crate::model::{
    plant_step, ClosedLoopTrace, Controller, PlantSpec, Regressor, SignalSource, TraceStep,
};
use crate::uncertainty::{umd_disturbance, umd_step, ParameterTrajectory, UmdSetup, UmdState};
use crate::Result;

/// Simulator knobs.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    /// Divergence is declared when `‖φ(t)‖` exceeds this (or goes non-finite).
    pub overflow_threshold: f64,
    /// Tolerance on the controller's `z_2`-to-set distance check.
    pub z2_tol: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { overflow_threshold: 1e12, z2_tol: 1e-9 }
    }
}

/// Run the loop on `[t_0, t_0 + horizon]` and record every signal.
///
/// The trace has `horizon + 1` rows unless divergence stops it early. Plant
/// steps happen for `t < t_0 + horizon`; the final row still carries a
/// controller-computed input and sampled exogenous signals so certification
/// sees a complete window.
#[allow(clippy::too_many_arguments)]
pub fn run_closed_loop(
    spec: &PlantSpec,
    controller: &mut dyn Controller,
    theta: &ParameterTrajectory,
    w_src: &SignalSource,
    r_src: &SignalSource,
    umd: Option<&UmdSetup>,
    t0: i64,
    horizon: usize,
    init: &Regressor,
) -> Result<ClosedLoopTrace> {
    run_closed_loop_with(
        spec,
        controller,
        theta,
        w_src,
        r_src,
        umd,
        t0,
        horizon,
        init,
        SimOptions::default(),
    )
}

/// [`run_closed_loop`] with explicit options.
#[allow(clippy::too_many_arguments)]
pub fn run_closed_loop_with(
    spec: &PlantSpec,
    controller: &mut dyn Controller,
    theta: &ParameterTrajectory,
    w_src: &SignalSource,
    r_src: &SignalSource,
    umd: Option<&UmdSetup>,
    t0: i64,
    horizon: usize,
    init: &Regressor,
    options: SimOptions,
) -> Result<ClosedLoopTrace> {
    spec.validate()?;
    if controller.requires_current_input() {
        return Err(CoreError::config(
            "controller output map reads the current-input slot of the regressor; \
             the interconnection is ill-posed",
        ));
    }
    if init.n_y() != spec.n_y
        || init.n_u() != spec.n_u
        || init.output_dim() != spec.output_dim
        || init.input_dim() != spec.input_dim
    {
        return Err(CoreError::dim("initial window does not match the plant layout"));
    }
    if w_src.dim() != spec.output_dim || r_src.dim() != spec.output_dim {
        return Err(CoreError::dim("signal source dimension differs from plant output"));
    }
    if theta.param_rows() != spec.param_rows || theta.output_dim() != spec.output_dim {
        return Err(CoreError::dim("parameter trajectory shape differs from plant parameters"));
    }
    theta.value(t0 + horizon as i64)?; // coverage check up front

    let mut trace =
        ClosedLoopTrace::new(t0, spec.n_y, spec.n_u, spec.output_dim, spec.input_dim);
    let mut umd_state = umd.map(|setup| UmdState::new(setup.spec.m0));

    // φ(t_0): the supplied window, with the current-input slot overwritten by
    // the output map unless the controller is strictly proper.
    let mut current: Regressor = if controller.first_input_from_init() {
        init.clone()
    } else {
        let pre = init.mask_current_input();
        let u0 = controller.control(&pre, r_src, t0)?;
        pre.complete(u0)?
    };

    for t in t0..=t0 + horizon as i64 {
        let flat = current.flatten();
        let norm = flat.norm();

        let w_t = w_src.value(t);
        let r_t = controller.bound_reference(r_src, t);
        let (d_t, m_t, clamped) = match (umd, umd_state) {
            (Some(setup), Some(state)) => {
                let (d, clamped) = umd_disturbance(
                    &setup.spec,
                    state,
                    &flat,
                    current.y_now(),
                    &setup.direction,
                    t,
                );
                (d, state.m, clamped)
            }
            _ => (DVector::zeros(spec.output_dim), 0.0, false),
        };

        if trace.z2_violation.is_none() && controller.z2_distance()? > options.z2_tol {
            trace.z2_violation = Some(t);
        }

        trace.steps.push(TraceStep {
            t,
            y: current.y_now().clone(),
            u: current.u_now().clone(),
            phi: flat.clone(),
            z1: controller.z1(),
            w: w_t.clone(),
            r: r_t,
            d_umd: d_t.clone(),
            m_umd: m_t,
            sigma: controller.sigma(),
            theta_star: theta.value(t)?.clone(),
            theta_hat: controller.estimates(),
            pred_err: controller.prediction_errors(),
            dir_clamped: clamped,
        });

        if !norm.is_finite() || norm > options.overflow_threshold {
            trace.divergence = Some(t);
            break;
        }
        if t == t0 + horizon as i64 {
            break;
        }

        let y_next = plant_step(spec, theta.value(t)?, &current, &w_t, &d_t)?;
        if let (Some(setup), Some(state)) = (umd, umd_state.as_mut()) {
            *state = umd_step(&setup.spec, *state, &flat);
        }
        controller.update(&current, &y_next, r_src, t)?;

        let pre = current.advance(y_next);
        let u_next = controller.control(&pre, r_src, t + 1)?;
        current = pre.complete(u_next)?;
    }

    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{ConvexParamSet, ParameterSet};
    use crate::model::{GainBoundedMap, ZeroController};
    use nalgebra::{dvector, DMatrix};

    fn scalar_spec(a: f64, b: f64) -> (PlantSpec, ParameterTrajectory) {
        let set = ConvexParamSet::ball(dvector![0.0, 0.0], 10.0).unwrap();
        let spec = PlantSpec {
            n_y: 1,
            n_u: 1,
            output_dim: 1,
            input_dim: 1,
            param_rows: 2,
            f: GainBoundedMap::identity(2),
            parameter_set: ParameterSet::Convex(set),
        };
        let theta =
            ParameterTrajectory::constant(DMatrix::from_row_slice(2, 1, &[a, b]), 0, 1000);
        (spec, theta)
    }

    fn scalar_init(y0: f64, u0: f64) -> Regressor {
        Regressor::new(vec![dvector![y0]], vec![dvector![u0]]).unwrap()
    }

    #[test]
    fn zero_everything_stays_zero() {
        let (spec, theta) = scalar_spec(0.5, 1.0);
        let mut ctrl = ZeroController::new(1);
        let zero = SignalSource::Zero { dim: 1 };
        let trace = run_closed_loop(
            &spec,
            &mut ctrl,
            &theta,
            &zero,
            &zero,
            None,
            0,
            50,
            &scalar_init(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(trace.len(), 51);
        assert!(trace.steps.iter().all(|s| s.phi.norm() == 0.0));
        assert!(!trace.diverged());
    }

    #[test]
    fn open_loop_recursion_matches_hand_rollout() {
        // y(t+1) = 0.5 y(t) + w(t) with u ≡ 0.
        let (spec, theta) = scalar_spec(0.5, 1.0);
        let mut ctrl = ZeroController::new(1);
        let w = SignalSource::Constant { value: dvector![0.25] };
        let zero = SignalSource::Zero { dim: 1 };
        let trace = run_closed_loop(
            &spec,
            &mut ctrl,
            &theta,
            &w,
            &zero,
            None,
            0,
            20,
            &scalar_init(1.0, 0.0),
        )
        .unwrap();
        let mut y = 1.0;
        for step in &trace.steps {
            assert!((step.y[0] - y).abs() < 1e-15, "t={}", step.t);
            y = 0.5 * y + 0.25;
        }
        trace.check_consistency().unwrap();
    }

    #[test]
    fn unstable_plant_is_recorded_as_divergence() {
        let (spec, theta) = scalar_spec(2.0, 1.0);
        let mut ctrl = ZeroController::new(1);
        let zero = SignalSource::Zero { dim: 1 };
        let trace = run_closed_loop(
            &spec,
            &mut ctrl,
            &theta,
            &zero,
            &zero,
            None,
            0,
            200,
            &scalar_init(1.0, 0.0),
        )
        .unwrap();
        assert!(trace.diverged());
        let td = trace.divergence.unwrap();
        assert!(trace.steps.last().unwrap().t == td);
        assert!(trace.steps.last().unwrap().phi.norm() > 1e12);
    }

    #[test]
    fn nonzero_t0_is_respected() {
        let (spec, _) = scalar_spec(0.5, 1.0);
        let theta =
            ParameterTrajectory::constant(DMatrix::from_row_slice(2, 1, &[0.5, 1.0]), -7, 100);
        let mut ctrl = ZeroController::new(1);
        let zero = SignalSource::Zero { dim: 1 };
        let trace = run_closed_loop(
            &spec,
            &mut ctrl,
            &theta,
            &zero,
            &zero,
            None,
            -7,
            10,
            &scalar_init(1.0, 0.0),
        )
        .unwrap();
        assert_eq!(trace.steps.first().unwrap().t, -7);
        assert_eq!(trace.steps.last().unwrap().t, 3);
    }
}
