//! Property-based invariants: projections, bound fitting, the window-scan
//! verifier, and the unmodelled-dynamics model.

use nalgebra::{dvector, DMatrix, DVector};
use proptest::prelude::*;

use convcert_core::analysis::{check_convolution_bound, fit_minimal_gain, StateKind};
use convcert_core::estimation::{project, ConvexParamSet, ParameterSet};
use convcert_core::model::{ClosedLoopTrace, TraceStep};
use convcert_core::uncertainty::{
    umd_step, verify_tv_membership, ParameterTrajectory, TimeVariationClass, UmdState,
    UnmodelledDynamicsSpec,
};
use convcert_core::model::GainBoundedMap;

fn convex_set_strategy() -> impl Strategy<Value = ConvexParamSet> {
    prop_oneof![
        (
            prop::collection::vec(-3.0f64..3.0, 2..4),
            prop::collection::vec(0.01f64..3.0, 2..4),
        )
            .prop_map(|(lo, width)| {
                let dim = lo.len().min(width.len());
                let lower = DVector::from_vec(lo[..dim].to_vec());
                let upper = &lower + DVector::from_vec(width[..dim].to_vec());
                ConvexParamSet::box_set(lower, upper).unwrap()
            }),
        (prop::collection::vec(-3.0f64..3.0, 2..4), 0.01f64..3.0).prop_map(|(c, r)| {
            ConvexParamSet::ball(DVector::from_vec(c), r).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_is_idempotent(set in convex_set_strategy(), raw in prop::collection::vec(-10.0f64..10.0, 4)) {
        let x = DVector::from_vec(raw[..set.dim()].to_vec());
        let once = project(&x, &set).unwrap();
        let twice = project(&once, &set).unwrap();
        prop_assert!((once - &twice).norm() <= 1e-12);
    }

    #[test]
    fn projection_is_nearest(set in convex_set_strategy(), raw in prop::collection::vec(-10.0f64..10.0, 4), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let x = DVector::from_vec(raw[..set.dim()].to_vec());
        let p = project(&x, &set).unwrap();
        for _ in 0..20 {
            let s = set.sample_point(&mut rng).unwrap();
            prop_assert!((&x - &p).norm() <= (&x - &s).norm() + 1e-9);
        }
    }
}

/// Random scalar trace driven by a stable-ish recursion.
fn random_trace(y0: f64, a: f64, w: &[f64], r: &[f64]) -> ClosedLoopTrace {
    let mut trace = ClosedLoopTrace::new(0, 1, 1, 1, 1);
    let mut y = y0;
    for t in 0..w.len() {
        trace.steps.push(TraceStep {
            t: t as i64,
            y: dvector![y],
            u: dvector![0.0],
            phi: dvector![y, 0.0],
            z1: DVector::zeros(0),
            w: dvector![w[t]],
            r: dvector![r[t]],
            d_umd: dvector![0.0],
            m_umd: 0.0,
            sigma: None,
            theta_star: DMatrix::zeros(2, 1),
            theta_hat: vec![],
            pred_err: vec![],
            dir_clamped: false,
        });
        y = a * y + w[t] + 0.3 * r[t];
    }
    trace
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_then_check_verifies(
        y0 in -2.0f64..2.0,
        a in -0.95f64..0.95,
        w in prop::collection::vec(-1.0f64..1.0, 8..60),
        lambda in 0.05f64..0.99,
    ) {
        let r = vec![0.0; w.len()];
        let trace = random_trace(y0, a, &w, &r);
        let c_min = fit_minimal_gain(&trace, lambda, StateKind::PhiZ1).unwrap();
        let cert = check_convolution_bound(&trace, c_min + 1e-9, lambda, StateKind::PhiZ1).unwrap();
        prop_assert!(cert.verified, "c_min {} slack {}", c_min, cert.max_slack);
    }

    #[test]
    fn tightened_gain_fails_unless_trivial(
        y0 in 0.5f64..2.0,
        w in prop::collection::vec(0.0f64..1.0, 10..40),
        lambda in 0.2f64..0.9,
    ) {
        let r = vec![0.0; w.len()];
        let trace = random_trace(y0, 0.8, &w, &r);
        let c_min = fit_minimal_gain(&trace, lambda, StateKind::PhiZ1).unwrap();
        // Shrinking a strictly-above-one fit must break verification.
        if c_min > 1.5 {
            let cert = check_convolution_bound(&trace, (c_min * 0.8).max(1.0), lambda, StateKind::PhiZ1).unwrap();
            prop_assert!(!cert.verified);
        }
    }
}

/// Brute-force O(T²) window check used against the O(T) scan.
fn brute_force_member(traj: &ParameterTrajectory, c0: f64, epsilon: f64) -> f64 {
    let deltas: Vec<f64> = (0..traj.len() - 1)
        .map(|k| (&traj.values[k + 1] - &traj.values[k]).norm())
        .collect();
    let mut worst = f64::NEG_INFINITY;
    for t1 in 0..deltas.len() {
        let mut sum = 0.0;
        for t2 in t1 + 1..=deltas.len() {
            sum += deltas[t2 - 1] - epsilon;
            worst = worst.max(sum);
        }
    }
    worst.max(0.0) - c0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn window_scan_equals_brute_force(
        steps in prop::collection::vec((-0.2f64..0.2, -0.2f64..0.2), 1..200),
        c0 in 0.0f64..0.5,
        epsilon in 0.0f64..0.1,
    ) {
        let set = ConvexParamSet::box_set(dvector![-100.0, -100.0], dvector![100.0, 100.0]).unwrap();
        let class = TimeVariationClass::new(ParameterSet::Convex(set), c0, epsilon).unwrap();
        let mut values = vec![DMatrix::from_row_slice(2, 1, &[0.0, 0.0])];
        for (da, db) in &steps {
            let last = values.last().unwrap();
            values.push(last + DMatrix::from_row_slice(2, 1, &[*da, *db]));
        }
        let traj = ParameterTrajectory { t0: 0, values };
        let res = verify_tv_membership(&traj, &class).unwrap();
        let brute = brute_force_member(&traj, c0, epsilon);
        prop_assert!(
            (res.max_violation - brute).abs() <= 1e-12 * (1.0 + brute.abs()),
            "scan {} vs brute {}", res.max_violation, brute
        );
    }

    #[test]
    fn umd_state_nonnegative_and_bounded(
        beta in 0.05f64..0.95,
        m0 in 0.0f64..5.0,
        phis in prop::collection::vec(-3.0f64..3.0, 1..200),
    ) {
        let spec = UnmodelledDynamicsSpec::new(beta, 0.1, GainBoundedMap::norm_scalar(1, 1.0), m0).unwrap();
        let mut state = UmdState::new(m0);
        let sup_g = 3.0; // |g| ≤ ‖φ‖ ≤ 3
        let envelope = m0.max(beta * sup_g / (1.0 - beta));
        for &p in &phis {
            state = umd_step(&spec, state, &dvector![p]);
            prop_assert!(state.m >= 0.0);
            prop_assert!(state.m <= envelope + 1e-9);
        }
    }
}
