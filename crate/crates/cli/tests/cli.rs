use std::path::Path;
use std::process::{Command, Output};

fn qnm_sps(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnm-sps"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const SMALL: [&str; 6] = ["--set", "scenario=fig2", "--set", "grid.n_t=41", "--set", "grid.n_tau=41"];

#[test]
fn correlations_writes_all_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["correlations", "-o", "run"];
    args.extend(SMALL);
    let out = qnm_sps(&args, tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trajectory.csv", "correlations.csv", "budget.csv", "manifest.txt"] {
        assert!(tmp.path().join("run").join(f).exists(), "{f}");
    }
    let manifest = std::fs::read_to_string(tmp.path().join("run/manifest.txt")).unwrap();
    assert!(manifest.contains("grid.n_t = 41"));
    assert!(manifest.contains("# ind = "));
}

#[test]
fn identical_runs_give_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let mut args = vec!["correlations", "-o", dir];
        args.extend(SMALL);
        assert!(qnm_sps(&args, tmp.path()).status.success());
    }
    for f in ["trajectory.csv", "correlations.csv", "budget.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn config_file_and_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("sweep.cfg"),
        "scenario = fig2\ngrid.n_t = 31\ngrid.n_tau = 31\nsweep.gamma_prime_ev = 1e-5:1e-3:log:3\n",
    )
    .unwrap();
    let out = qnm_sps(&["sweep", "-c", "sweep.cfg", "-o", "sw"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(tmp.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.lines().skip(1).all(|l| l.split(',').nth(1) == Some("ok")));
}

#[test]
fn validation_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qnm_sps(&["simulate", "--set", "mode.beta_rad=1.5"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = qnm_sps(&["simulate", "--set", "no.such.key=1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(tmp.path().join("bad.cfg"), "grid.n_t = 10\nscenario = fig2\n").unwrap();
    let out = qnm_sps(&["simulate", "-c", "bad.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = qnm_sps(&["sweep", "--set", "scenario=fig2"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classical_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qnm_sps(&["purcell", "--points", "11", "-o", "p"], tmp.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("p/purcell.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);

    let out = qnm_sps(&["sfactors", "--synthetic-dimer", "--resolution", "8", "-o", "s"], tmp.path());
    assert!(out.status.success());
    let s = tmp.path().join("s");
    // The written samples feed back in through the CSV path.
    let vol = s.join("volume_samples.csv");
    let surf = s.join("surface_samples.csv");
    let out = qnm_sps(
        &["sfactors", "--volume", vol.to_str().unwrap(), "--surface", surf.to_str().unwrap(), "-o", "s2"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read_to_string(s.join("sfactors.csv")).unwrap();
    let b = std::fs::read_to_string(tmp.path().join("s2/sfactors.csv")).unwrap();
    let beta = |t: &str| -> f64 { t.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap() };
    assert!((beta(&a) - beta(&b)).abs() < 1e-9);

    let out = qnm_sps(&["sfactors", "-o", "s3"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_power_flows() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate", "-o", "sim"];
    args.extend(SMALL);
    assert!(qnm_sps(&args, tmp.path()).status.success());
    let power = std::fs::read_to_string(tmp.path().join("sim/power.csv")).unwrap();
    assert!(power.starts_with("t,p_rad,p_nrad\n"));
    assert_eq!(power.lines().count(), 42);
}
