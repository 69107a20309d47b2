//! End-to-end checks on cheap short-pulse scenarios.

use qnm_sps::config::parse_config;
use qnm_sps::correlations::two_pulse_indistinguishability;
use qnm_sps::scenario::{manifest, run_scenario, sweep, ScenarioConfig, SweepAxis};

fn short(n: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::fig2();
    c.n_t = n;
    c.n_tau = n;
    c
}

fn csv_bytes(cfg: &ScenarioConfig) -> Vec<u8> {
    let r = run_scenario(cfg).unwrap();
    let mut buf = Vec::new();
    r.correlations.write_csv(&mut buf).unwrap();
    r.trajectory.write_csv(&mut buf).unwrap();
    buf
}

#[test]
fn pulse_train_matches_single_pulse_factorization() {
    let cfg = short(121);
    let single = run_scenario(&cfg).unwrap();
    let r = &single.resolved;
    let train = two_pulse_indistinguishability(&r.model, r.grid.t_end, r.grid.n_steps, r.grid.dt_max, &r.qrt).unwrap();
    assert!(
        (train.ind - single.ind.ind).abs() < 2e-3,
        "train {} vs single {}",
        train.ind,
        single.ind.ind
    );
}

#[test]
fn finer_grids_agree() {
    let base = run_scenario(&short(101)).unwrap();
    let fine = run_scenario(&short(201)).unwrap();
    assert!((base.ind.ind - fine.ind.ind).abs() < 2e-3);
    assert!((base.budget.p1 - fine.budget.p1).abs() < 2e-3);

    // A longer window only adds empty tail.
    let mut long = short(201);
    long.t_end = Some(2.0 * base.resolved.grid.t_end);
    let long = run_scenario(&long).unwrap();
    assert!((long.ind.ind - base.ind.ind).abs() < 2e-3);
    assert!((long.budget.p1 - base.budget.p1).abs() < 2e-3);

    let mut tight = short(101);
    tight.dt_max = Some(0.5 * base.resolved.grid.dt_max);
    let tight = run_scenario(&tight).unwrap();
    assert!((tight.ind.ind - base.ind.ind).abs() < 1e-6);
    assert!((tight.budget.p1 - base.budget.p1).abs() < 1e-6);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let cfg = short(61);
    assert_eq!(csv_bytes(&cfg), csv_bytes(&cfg));
}

#[test]
fn single_point_sweep_equals_direct_run() {
    let mut cfg = short(61);
    cfg.sweep = Some(SweepAxis::GammaPrime(vec![1e-4]));
    let report = sweep(&cfg).unwrap();
    let (budget, ind) = report.points[0].outcome.clone().unwrap();
    let mut direct = short(61);
    direct.gamma_prime = 1e-4;
    let r = run_scenario(&direct).unwrap();
    assert_eq!(ind, r.ind);
    assert_eq!(budget, r.budget);
}

#[test]
fn manifest_reproduces_the_run() {
    let cfg = short(61);
    let first = run_scenario(&cfg).unwrap();
    let text = manifest(&first.resolved);
    let again = run_scenario(&parse_config(&text).unwrap()).unwrap();
    assert!((again.ind.ind - first.ind.ind).abs() < 1e-9);
    assert!((again.budget.p1 - first.budget.p1).abs() < 1e-9);
}

#[test]
fn dephasing_lowers_indistinguishability() {
    let clean = run_scenario(&short(61)).unwrap();
    let mut noisy = short(61);
    noisy.gamma_prime = 1e-3;
    let noisy = run_scenario(&noisy).unwrap();
    assert!(noisy.ind.ind < clean.ind.ind - 0.1);
    assert!(noisy.ind.d2 >= 0.0);
}
