//! `qnm-sps` command line: Purcell spectra, S factors, pulsed dynamics,
//! correlation runs, sweeps and the built-in figure scenarios.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qnm_sps::config::{apply_setting, parse_config};
use qnm_sps::dynamics::evolve;
use qnm_sps::emission::power_flows;
use qnm_sps::qnm::{
    purcell_spectrum, s_factors, synthetic_dimer_samples, DimerGeometry, FieldSamples, PurcellAnchor,
};
use qnm_sps::quadrature::trapezoid;
use qnm_sps::scenario::{lin_space, manifest, run_resolved, sweep, ResolvedScenario, ScenarioConfig};
use qnm_sps::units::HBAR_EV_PS;
use qnm_sps::{DensityOperator, DrudeModel, Error};

#[derive(Parser)]
#[command(name = "qnm-sps", version, about = "Pulsed single-photon source on a plasmonic quasinormal mode")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file with `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set pulse.area_pi_units=0.5` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(short, long, default_value = "qnm-sps-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Purcell factor across a frequency window.
    Purcell {
        #[command(flatten)]
        common: Common,
        /// Lower frequency (eV); ω_c − 5κ by default.
        #[arg(long)]
        from: Option<f64>,
        /// Upper frequency (eV); ω_c + 5κ by default.
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Phase of (n_d·f̃)² at the emitter (rad).
        #[arg(long, default_value_t = 0.0)]
        field_phase: f64,
    },
    /// S factors and β split from sampled fields.
    Sfactors {
        #[command(flatten)]
        common: Common,
        /// CSV with `weight,eps_imag,f_abs_sq`.
        #[arg(long, requires = "surface", conflicts_with = "synthetic_dimer")]
        volume: Option<PathBuf>,
        /// CSV with `weight,F_abs_sq`.
        #[arg(long, requires = "volume")]
        surface: Option<PathBuf>,
        /// Use a generated gold-dimer mesh instead of CSV input.
        #[arg(long)]
        synthetic_dimer: bool,
        /// Mesh cells per axis for the generated dimer.
        #[arg(long, default_value_t = 24)]
        resolution: usize,
    },
    /// Pulsed population dynamics and power flows.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Full run: dynamics, two-time correlations, budget and indistinguishability.
    Correlations {
        #[command(flatten)]
        common: Common,
    },
    /// Runs the configured sweep axis.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Reproduces one of the built-in figure scenarios.
    Figure {
        which: Figure,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

/// Failure with its process exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_integration_failure() {
            3
        } else if matches!(e, Error::Io(_) | Error::Csv(_)) {
            1
        } else {
            2
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn load(common: &Common, base: Option<ScenarioConfig>) -> CliResult<ScenarioConfig> {
    let mut cfg = match (&common.config, base) {
        (Some(path), base) => {
            let text = fs::read_to_string(path).map_err(|e| validation(format!("{}: {e}", path.display())))?;
            match base {
                Some(b) => qnm_sps::config::parse_config_onto(b, &text)?,
                None => parse_config(&text)?,
            }
        }
        (None, Some(b)) => b,
        (None, None) => ScenarioConfig::fig1(),
    };
    for item in &common.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| validation(format!("--set expects KEY=VALUE, got `{item}`")))?;
        apply_setting(&mut cfg, key, value).map_err(|r| validation(format!("--set {key}: {r}")))?;
    }
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_manifest(dir: &Path, resolved: &ResolvedScenario, command: &str, extra: &str) -> CliResult {
    let mut m = create(dir, "manifest.txt")?;
    writeln!(m, "# command = {command}")?;
    m.write_all(manifest(resolved).as_bytes())?;
    m.write_all(extra.as_bytes())?;
    m.flush()?;
    Ok(())
}

fn prepare(common: &Common, base: Option<ScenarioConfig>) -> CliResult<ResolvedScenario> {
    let resolved = load(common, base)?.resolve()?;
    fs::create_dir_all(&common.out)?;
    Ok(resolved)
}

fn purcell(common: &Common, from: Option<f64>, to: Option<f64>, points: usize, phase: f64) -> CliResult {
    let r = prepare(common, None)?;
    let mode = r.model.mode;
    let lo = from.unwrap_or((mode.omega_c - 5.0 * mode.kappa).max(1e-3));
    let hi = to.unwrap_or(mode.omega_c + 5.0 * mode.kappa);
    if points < 2 || hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return Err(validation("need --points >= 2 and --to > --from"));
    }
    let grid = lin_space(lo, hi, points);
    let anchor = PurcellAnchor {
        peak: r.purcell_peak,
        field_sq: num_complex::Complex64::from_polar(1.0, phase),
    };
    let fp = purcell_spectrum(&mode, &anchor, &grid)?;
    let mut w = csv::Writer::from_writer(create(&common.out, "purcell.csv")?);
    w.write_record(["omega_ev", "purcell"]).map_err(Error::from)?;
    for (x, y) in grid.iter().zip(&fp) {
        w.write_record([format!("{x:.12e}"), format!("{y:.12e}")]).map_err(Error::from)?;
    }
    w.flush()?;
    let extra = format!("# field_phase_rad = {phase:e}\n# quality_factor = {:e}\n", mode.quality_factor());
    write_manifest(&common.out, &r, "purcell", &extra)?;
    println!("peak Purcell factor {:.1} at {:.4} eV, Q = {:.3}", r.purcell_peak, mode.omega_c, mode.quality_factor());
    Ok(())
}

fn sfactors(common: &Common, volume: Option<&Path>, surface: Option<&Path>, synthetic: bool, resolution: usize) -> CliResult {
    let r = prepare(common, None)?;
    let mode = r.model.mode;
    let samples = match (volume, surface, synthetic) {
        (Some(v), Some(s), false) => FieldSamples::from_csv_files(v, s)?,
        (None, None, true) => {
            let geometry = DimerGeometry {
                resolution,
                ..Default::default()
            };
            let samples = synthetic_dimer_samples(&geometry, &DrudeModel::GOLD, &mode)?;
            samples.write_volume(create(&common.out, "volume_samples.csv")?)?;
            samples.write_surface(create(&common.out, "surface_samples.csv")?)?;
            samples
        }
        _ => return Err(validation("give either --volume and --surface, or --synthetic-dimer")),
    };
    let s = s_factors(&samples, &mode)?;
    let mut w = csv::Writer::from_writer(create(&common.out, "sfactors.csv")?);
    w.write_record(["s_nrad", "s_rad", "s", "beta_rad", "beta_nrad"]).map_err(Error::from)?;
    w.write_record([s.s_nrad, s.s_rad, s.s, s.beta_rad, s.beta_nrad].map(|v| format!("{v:.12e}")))
        .map_err(Error::from)?;
    w.flush()?;
    let extra = format!(
        "# volume_samples = {}\n# surface_samples = {}\n",
        samples.volume.len(),
        samples.surface.len()
    );
    write_manifest(&common.out, &r, "sfactors", &extra)?;
    println!(
        "S_nrad = {:.4}, S_rad = {:.4}, S = {:.4}, beta_rad = {:.4}",
        s.s_nrad, s.s_rad, s.s, s.beta_rad
    );
    Ok(())
}

fn simulate(common: &Common) -> CliResult {
    let r = prepare(common, None)?;
    let m = &r.model;
    let traj = evolve(m, &r.grid, &DensityOperator::ground(&m.space))?;
    traj.write_csv(create(&common.out, "trajectory.csv")?)?;
    let flows = power_flows(m, &traj);
    let mut w = csv::Writer::from_writer(create(&common.out, "power.csv")?);
    w.write_record(["t", "p_rad", "p_nrad"]).map_err(Error::from)?;
    for i in 0..flows.times.len() {
        w.write_record([flows.times[i], flows.p_rad[i], flows.p_nrad[i]].map(|v| format!("{v:.12e}")))
            .map_err(Error::from)?;
    }
    w.flush()?;
    let h = traj.dt();
    let p1 = m.mode.kappa / HBAR_EV_PS * trapezoid(&traj.n_c, h);
    let pa = m.emitter.gamma / HBAR_EV_PS * trapezoid(&traj.n_a, h);
    let extra = format!(
        "# results\n# p1 = {p1:.6e}\n# pa = {pa:.6e}\n# max_trace_drift = {:.3e}\n",
        traj.max_trace_drift
    );
    write_manifest(&common.out, &r, "simulate", &extra)?;
    println!("P1 = {p1:.4}, Pa = {pa:.5}");
    Ok(())
}

fn correlations(common: &Common, base: Option<ScenarioConfig>) -> CliResult {
    let r = prepare(common, base)?;
    let out = common.out.clone();
    let result = run_resolved(r)?;
    result.write_outputs(&out)?;
    let (b, ind) = (&result.budget, &result.ind);
    println!(
        "Ind = {:.4} (2D1 = {:.4}, 2D2 = {:.4}), P1 = {:.4}, P1_rad = {:.4}, P2 = {:.5}",
        ind.ind,
        2.0 * ind.d1,
        2.0 * ind.d2,
        b.p1,
        b.p1_rad,
        b.p2
    );
    Ok(())
}

fn run_sweep(common: &Common, base: Option<ScenarioConfig>) -> CliResult {
    let cfg = load(common, base)?;
    if cfg.sweep.is_none() {
        return Err(validation("no sweep axis; set sweep.gamma_prime_ev or sweep.tau_p_purcell_units"));
    }
    let r = cfg.resolve()?;
    fs::create_dir_all(&common.out)?;
    let report = sweep(&cfg)?;
    report.write_csv(create(&common.out, "sweep.csv")?)?;
    let values: Vec<String> = report.points.iter().map(|p| format!("{:e}", p.value)).collect();
    let mut extra = format!("# sweep.{} = {}\n", report.axis, values.join(","));
    for line in report.diagnostics() {
        extra.push_str(&format!("# {line}\n"));
        eprintln!("{line}");
    }
    write_manifest(&common.out, &r, "sweep", &extra)?;
    for p in &report.points {
        if let Ok((_, ind)) = &p.outcome {
            println!("{} = {:.4e}: Ind = {:.4}", report.axis, p.value, ind.ind);
        }
    }
    if report.failures() > 0 {
        return Err(Failure {
            code: 3,
            message: format!("{} sweep point(s) failed", report.failures()),
        });
    }
    Ok(())
}

fn figure(which: Figure, common: &Common) -> CliResult {
    match which {
        Figure::Fig1 => correlations(common, Some(ScenarioConfig::fig1())),
        Figure::Fig2 => correlations(common, Some(ScenarioConfig::fig2())),
        Figure::Fig3 => run_sweep(common, Some(ScenarioConfig::fig3())),
        Figure::Fig4 => correlations(common, Some(ScenarioConfig::fig4())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Purcell {
            common,
            from,
            to,
            points,
            field_phase,
        } => purcell(common, *from, *to, *points, *field_phase),
        Command::Sfactors {
            common,
            volume,
            surface,
            synthetic_dimer,
            resolution,
        } => sfactors(common, volume.as_deref(), surface.as_deref(), *synthetic_dimer, *resolution),
        Command::Simulate { common } => simulate(common),
        Command::Correlations { common } => correlations(common, None),
        Command::Sweep { common } => run_sweep(common, None),
        Command::Figure { which, common } => figure(*which, common),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
