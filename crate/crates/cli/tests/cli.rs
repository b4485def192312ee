//! End-to-end checks of the `convcert` binary: exit codes, artifact files,
//! and byte-level reproducibility.

use std::path::Path;
use std::process::Command;

use convcert_cli::config::*;
use convcert_core::analysis::StateKind;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convcert"))
}

fn osa_scenario() -> ScenarioConfig {
    let set1 = SetConfig::Box { lower: vec![-0.8, 0.5], upper: vec![0.8, 1.5] };
    let set2 = SetConfig::Box { lower: vec![-0.8, -1.5], upper: vec![0.8, -0.5] };
    ScenarioConfig {
        schema: 1,
        seed: 11,
        plant: PlantConfig {
            n_y: 1,
            n_u: 1,
            output_dim: 1,
            input_dim: 1,
            param_rows: 2,
            f: MapConfig::Identity,
            parameter_set: SetConfig::Union { members: vec![set1.clone(), set2.clone()] },
        },
        controller: ControllerConfig::Osa {
            set1,
            set2,
            theta1_init: None,
            theta2_init: None,
            sigma0: 1,
        },
        theta_star: ThetaConfig::Fixed { value: vec![0.4, 1.0] },
        disturbance: SignalConfig::Noise { amplitude: 0.05 },
        reference: SignalConfig::Sinusoid { amplitude: 0.8, period: 13.0, phase: 0.0 },
        umd: None,
        horizon: HorizonConfig { t0: 0, steps: 80 },
        init: InitConfig { phi0: vec![0.3, 0.0] },
        certify: Some(CertifyConfig {
            lambdas: vec![0.7, 0.9],
            state_kind: StateKind::PhiZ1,
            c: None,
        }),
    }
}

fn write_config<T: serde::Serialize>(dir: &Path, name: &str, cfg: &T) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

#[test]
fn validate_accepts_good_and_rejects_bad() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "good.json", &osa_scenario());
    let status = bin().args(["validate", "--config"]).arg(&good).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let mut bad_cfg = osa_scenario();
    bad_cfg.init.phi0 = vec![0.3]; // wrong regressor length
    if let ControllerConfig::Osa { sigma0, .. } = &mut bad_cfg.controller {
        *sigma0 = 5;
    }
    let bad = write_config(dir.path(), "bad.json", &bad_cfg);
    let out = bin().args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("phi0"));
    assert!(stderr.contains("sigma0"));

    // Unparseable JSON is also a validation failure.
    let mangled = dir.path().join("mangled.json");
    std::fs::write(&mangled, "{ not json").unwrap();
    let status = bin().args(["validate", "--config"]).arg(&mangled).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn simulate_writes_artifacts_and_is_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario.json", &osa_scenario());

    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for name in ["trace.csv", "theta.csv", "report.json", "summary.txt", "certificates.json"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.is_empty());
    }
    let header = std::fs::read_to_string(out1.join("trace.csv")).unwrap();
    assert!(header.starts_with("t,y_0,u_0,w_0,r_0,sigma,m_umd,norm_phi_z1\n"));

    // A different seed must change the trace.
    let out3 = dir.path().join("run3");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--seed", "999"])
        .arg("--out")
        .arg(&out3)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let a = std::fs::read(out1.join("trace.csv")).unwrap();
    let c = std::fs::read(out3.join("trace.csv")).unwrap();
    assert_ne!(a, c, "seed override had no effect");
}

#[test]
fn fit_writes_monotone_frontier_and_certify_needs_a_block() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "scenario.json", &osa_scenario());
    let out_dir = dir.path().join("fit");
    let status =
        bin().args(["fit", "--config"]).arg(&cfg).arg("--out").arg(&out_dir).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("fit.json")).unwrap()).unwrap();
    let points = fit["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    let c0 = points[0]["c_min"].as_f64().unwrap();
    let c1 = points[1]["c_min"].as_f64().unwrap();
    assert!(points[0]["lambda"].as_f64() < points[1]["lambda"].as_f64());
    assert!(c1 <= c0 * (1.0 + 1e-9), "frontier not monotone: {c0} then {c1}");

    let mut no_block = osa_scenario();
    no_block.certify = None;
    let cfg2 = write_config(dir.path(), "nocert.json", &no_block);
    let status = bin()
        .args(["certify", "--config"])
        .arg(&cfg2)
        .arg("--out")
        .arg(dir.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn divergence_exits_with_code_three() {
    let mut cfg = osa_scenario();
    // Open-loop unstable plant: zero controller, |a| > 1.
    cfg.controller = ControllerConfig::Zero;
    cfg.plant.parameter_set =
        SetConfig::Box { lower: vec![-3.0, -3.0], upper: vec![3.0, 3.0] };
    cfg.theta_star = ThetaConfig::Fixed { value: vec![2.0, 1.0] };
    cfg.certify = None;
    cfg.horizon.steps = 300;
    cfg.init.phi0 = vec![1.0, 0.0];

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "diverge.json", &cfg);
    let out_dir = dir.path().join("out");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("divergence at t="));
}

#[test]
fn margins_command_writes_report() {
    let cfg = MarginsConfig {
        schema: 1,
        c: 2.0,
        lambda: 0.5,
        lambda1: 0.8,
        c0: 0.1,
        f_gain: 1.0,
        s_norm: 2.0,
        c1: Some(2.0),
        beta: Some(0.5),
        g_gain: Some(1.0),
        lambda2: Some(0.9),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "margins.json", &cfg);
    let out_dir = dir.path().join("out");
    let status = bin()
        .args(["margins", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("margins.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(json["thm1"]["m"].as_u64().unwrap() >= 1);
    assert!(json["thm2"]["lambda3"].as_f64().unwrap() < 1.0);
    assert!(json["thm3"]["mu_bar"].as_f64().unwrap() > 0.0);
    // ε·m² = c0 survives serialization.
    let eps = json["thm1"]["epsilon"].as_f64().unwrap();
    let m = json["thm1"]["m"].as_f64().unwrap();
    assert!((eps * m * m - 0.1).abs() < 1e-15);
}

#[test]
fn sweep_command_writes_table() {
    let mut scenario = osa_scenario();
    scenario.certify = None;
    scenario.horizon.steps = 60;
    let sweep = SweepConfig {
        schema: 1,
        scenario,
        sweep: SweepAxis {
            parameter: SweepParameter::Amplitude,
            grid: vec![0.01, 0.1],
            seeds_per_point: 3,
            fit_lambda: 0.9,
            state_kind: StateKind::PhiZ1,
            reduction: SweepReduction::MaxFittedC,
        },
    };
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "sweep.json", &sweep);
    let out_dir = dir.path().join("out");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let table = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "swept_value,seed,fitted_c,diverged");
    assert_eq!(lines.count(), 6, "2 grid points x 3 seeds");
    let summary = std::fs::read_to_string(out_dir.join("sweep_summary.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(json["points"].as_array().unwrap().len(), 2);

    // Parallel execution must not perturb the output bytes.
    let out_again = dir.path().join("out_again");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_again)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(
        std::fs::read(out_dir.join("sweep.csv")).unwrap(),
        std::fs::read(out_again.join("sweep.csv")).unwrap(),
        "sweep table differs between identical runs"
    );

    // Sweep validation failure: empty grid.
    let mut bad = serde_json::from_str::<SweepConfig>(&std::fs::read_to_string(&path).unwrap())
        .unwrap();
    bad.sweep.grid.clear();
    let bad_path = write_config(dir.path(), "bad_sweep.json", &bad);
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&bad_path)
        .arg("--out")
        .arg(dir.path().join("out_bad"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn epsilon_sweep_over_drifting_parameters() {
    let mut scenario = osa_scenario();
    scenario.certify = None;
    scenario.horizon.steps = 100;
    scenario.theta_star =
        ThetaConfig::Tv { c0: 0.05, epsilon: 1e-4, mode: TvModeConfig::Drift };
    let sweep = SweepConfig {
        schema: 1,
        scenario,
        sweep: SweepAxis {
            parameter: SweepParameter::Epsilon,
            grid: vec![1e-5, 1e-4, 1e-3],
            seeds_per_point: 3,
            fit_lambda: 0.95,
            state_kind: StateKind::PhiZ1,
            reduction: SweepReduction::MaxFittedC,
        },
    };
    let outcome = convcert_cli::run_sweep(&sweep).unwrap();
    assert_eq!(outcome.points.len(), 3);
    for p in &outcome.points {
        assert_eq!(p.divergence_count, 0, "small drift should not diverge");
        let c = p.max_fitted_c.unwrap();
        assert!(c.is_finite() && c >= 1.0);
        assert_eq!(p.reduced, p.max_fitted_c);
    }
}

#[test]
fn validate_handles_sweep_configs() {
    let mut scenario = osa_scenario();
    scenario.certify = None;
    let sweep = SweepConfig {
        schema: 1,
        scenario,
        sweep: SweepAxis {
            parameter: SweepParameter::Mu,
            grid: vec![0.01],
            seeds_per_point: 1,
            fit_lambda: 0.9,
            state_kind: StateKind::PhiZ1,
            reduction: SweepReduction::DivergenceFraction,
        },
    };
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "sweep.json", &sweep);
    // Mu sweep without a umd block is a validation error.
    let out = bin().args(["validate", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unmodelled-dynamics"));
}
