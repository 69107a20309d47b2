//! End-to-end scenarios: configuration, built-in figure presets, the full
//! pipeline and parameter sweeps.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::correlations::{correlation_grid_with, indistinguishability, CorrelationGrid, IndResult, QrtOptions};
use crate::dynamics::{evolve, TimeGrid, Trajectory};
use crate::emission::{emission_budget, write_budget_csv, EmissionBudget};
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::liouvillian::{DensityOperator, PulseSpec, SystemModel};
use crate::qnm::{coupling_from_purcell, free_space_decay, Emitter, QnmMode};
use crate::units::HBAR_EV_PS;

/// How the emitter–mode coupling is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// Peak Purcell factor F_P; g = √(F_P γ κ / 4).
    Purcell(f64),
    /// g in eV.
    Direct(f64),
}

/// How the pulse width is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseWidth {
    /// τ_p in ps.
    Ps(f64),
    /// τ_p = factor / γ^P.
    PurcellUnits(f64),
}

/// Swept parameter and its values.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Pure-dephasing rate γ′ (eV).
    GammaPrime(Vec<f64>),
    /// Pulse width in units of 1/γ^P.
    TauPurcellUnits(Vec<f64>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::GammaPrime(_) => "gamma_prime_ev",
            SweepAxis::TauPurcellUnits(_) => "tau_p_purcell_units",
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            SweepAxis::GammaPrime(v) | SweepAxis::TauPurcellUnits(v) => v,
        }
    }
}

/// Everything needed to run one scenario (or a sweep around it).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub omega_c: f64,
    pub kappa: f64,
    pub beta_rad: f64,
    pub s_factor: f64,
    pub n_b: f64,
    pub coupling: Coupling,
    pub apply_s_factor: bool,
    pub omega_a: f64,
    pub dipole: f64,
    /// Background decay (eV); the free-space value for `dipole` when unset.
    pub gamma: Option<f64>,
    pub gamma_prime: f64,
    /// Pulse area in units of π.
    pub area_pi_units: f64,
    pub tau_p: PulseWidth,
    /// Pulse centre (ps); 5τ_p when unset.
    pub t_off: Option<f64>,
    /// Laser carrier (eV); resonant with the emitter when unset.
    pub omega_l: Option<f64>,
    pub n_fock: usize,
    /// Window length T (ps); t_off + max(10/γ^P, 10/κ, 8τ_p) when unset.
    pub t_end: Option<f64>,
    pub n_t: usize,
    pub n_tau: usize,
    /// Integrator step ceiling (ps); τ_p/5 when unset.
    pub dt_max: Option<f64>,
    pub qrt: QrtOptions,
    pub sweep: Option<SweepAxis>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::fig1()
    }
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub name: String,
    pub model: SystemModel,
    pub grid: TimeGrid,
    pub n_t: usize,
    pub n_tau: usize,
    pub qrt: QrtOptions,
    pub purcell_peak: f64,
}

impl ResolvedScenario {
    /// γ^P = 4g²/κ (eV).
    pub fn purcell_rate(&self) -> f64 {
        self.model.purcell_rate()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl ScenarioConfig {
    /// F_P = 1470, τ_p = 1/γ^P, γ′ = 0.
    pub fn fig1() -> Self {
        Self {
            name: "fig1".into(),
            omega_c: 1.2067,
            kappa: 0.1658,
            beta_rad: 0.6,
            s_factor: 1.0,
            n_b: 1.5,
            coupling: Coupling::Purcell(1470.0),
            apply_s_factor: false,
            omega_a: 1.2067,
            dipole: 30.0,
            gamma: None,
            gamma_prime: 0.0,
            area_pi_units: 1.0,
            tau_p: PulseWidth::PurcellUnits(1.0),
            t_off: None,
            omega_l: None,
            n_fock: 5,
            t_end: None,
            n_t: 400,
            n_tau: 400,
            dt_max: None,
            qrt: QrtOptions::default(),
            sweep: None,
        }
    }

    /// `fig1` with τ_p = 0.5/γ^P.
    pub fn half_width() -> Self {
        Self {
            name: "halfwidth".into(),
            tau_p: PulseWidth::PurcellUnits(0.5),
            ..Self::fig1()
        }
    }

    /// τ_p = 0.1/γ^P.
    pub fn fig2() -> Self {
        Self {
            name: "fig2".into(),
            tau_p: PulseWidth::PurcellUnits(0.1),
            ..Self::fig1()
        }
    }

    /// `fig2` swept over γ′ from 1 μeV to 10 meV (25 log-spaced points).
    pub fn fig3() -> Self {
        Self {
            name: "fig3".into(),
            sweep: Some(SweepAxis::GammaPrime(log_space(1e-6, 1e-2, 25))),
            ..Self::fig2()
        }
    }

    /// F_P = 147000 (2g/κ ≈ 0.475), γ′ = 10 meV, τ_p = 0.1/γ^P.
    pub fn fig4() -> Self {
        Self {
            name: "fig4".into(),
            coupling: Coupling::Purcell(147_000.0),
            gamma_prime: 0.01,
            n_fock: 9,
            ..Self::fig2()
        }
    }

    /// Fig. 4 parameters with τ_p = 1/γ^P.
    pub fn fig4_long() -> Self {
        Self {
            name: "fig4-long".into(),
            tau_p: PulseWidth::PurcellUnits(1.0),
            ..Self::fig4()
        }
    }

    /// Built-in scenario by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "fig1" => Ok(Self::fig1()),
            "halfwidth" | "half-width" => Ok(Self::half_width()),
            "fig2" => Ok(Self::fig2()),
            "fig3" => Ok(Self::fig3()),
            "fig4" => Ok(Self::fig4()),
            "fig4-long" | "fig4_long" => Ok(Self::fig4_long()),
            other => Err(Error::invalid(
                "scenario",
                format!("unknown scenario `{other}` (fig1, halfwidth, fig2, fig3, fig4, fig4-long)"),
            )),
        }
    }

    pub const PRESETS: [&'static str; 6] = ["fig1", "halfwidth", "fig2", "fig3", "fig4", "fig4-long"];

    /// Trajectory intervals needed to host both the t and τ grids.
    pub fn trajectory_intervals(&self) -> usize {
        lcm(self.n_t.max(2) - 1, self.n_tau.max(2) - 1)
    }

    /// Resolves defaults and derived quantities into a runnable model.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let emitter_base = Emitter {
            omega_a: self.omega_a,
            dipole: self.dipole,
            gamma: 0.0,
            gamma_prime: self.gamma_prime,
        };
        emitter_base.validate()?;
        if !(self.n_b > 0.0) {
            return Err(Error::invalid("mode.n_b", "must be > 0"));
        }
        let gamma = self.gamma.unwrap_or_else(|| free_space_decay(&emitter_base, self.n_b));
        let emitter = Emitter { gamma, ..emitter_base };
        let (g, purcell_peak) = match self.coupling {
            Coupling::Purcell(fp) => {
                if !(gamma > 0.0) {
                    return Err(Error::invalid(
                        "mode.purcell_peak",
                        "needs a positive background decay rate to set the coupling",
                    ));
                }
                (coupling_from_purcell(fp, gamma, self.kappa)?, fp)
            }
            Coupling::Direct(g) => {
                let fp = if gamma > 0.0 {
                    4.0 * g * g / (self.kappa * gamma)
                } else {
                    f64::INFINITY
                };
                (g, fp)
            }
        };
        let mode = QnmMode {
            omega_c: self.omega_c,
            kappa: self.kappa,
            beta_rad: self.beta_rad,
            s_factor: self.s_factor,
            g,
            n_b: self.n_b,
        };
        mode.validate()?;
        let g_eff = if self.apply_s_factor { g * self.s_factor.sqrt() } else { g };
        let gamma_p = 4.0 * g_eff * g_eff / self.kappa;
        let tau_p = match self.tau_p {
            PulseWidth::Ps(t) => t,
            PulseWidth::PurcellUnits(f) => {
                if !(gamma_p > 0.0) {
                    return Err(Error::invalid(
                        "pulse.tau_p_purcell_units",
                        "γ^P vanishes; give pulse.tau_p_ps instead",
                    ));
                }
                f * HBAR_EV_PS / gamma_p
            }
        };
        let t_off = self.t_off.unwrap_or(5.0 * tau_p);
        let pulse = PulseSpec {
            area: self.area_pi_units * std::f64::consts::PI,
            tau_p,
            t_off,
            omega_l: self.omega_l.unwrap_or(self.omega_a),
        };
        let space = HilbertSpace::new(self.n_fock)?;
        let mut model = SystemModel::new(mode, emitter, pulse, space)?;
        model.apply_s_factor = self.apply_s_factor;
        let t_end = match self.t_end {
            Some(t) => t,
            None => {
                let decay = if gamma_p > 0.0 { 10.0 * HBAR_EV_PS / gamma_p } else { 0.0 };
                t_off + decay.max(10.0 * HBAR_EV_PS / self.kappa).max(8.0 * tau_p)
            }
        };
        if self.n_t < 2 || self.n_tau < 2 {
            return Err(Error::invalid("grid.n_t", "n_t and n_tau must be >= 2"));
        }
        let grid = TimeGrid::new(
            t_end,
            self.trajectory_intervals() + 1,
            self.dt_max.unwrap_or(tau_p / 5.0),
        )?;
        Ok(ResolvedScenario {
            name: self.name.clone(),
            model,
            grid,
            n_t: self.n_t,
            n_tau: self.n_tau,
            qrt: self.qrt,
            purcell_peak,
        })
    }

    /// Copy with the sweep axis replaced by a single value.
    pub fn at_sweep_value(&self, axis: &SweepAxis, value: f64) -> Self {
        let mut c = self.clone();
        c.sweep = None;
        match axis {
            SweepAxis::GammaPrime(_) => c.gamma_prime = value,
            SweepAxis::TauPurcellUnits(_) => c.tau_p = PulseWidth::PurcellUnits(value),
        }
        c
    }
}

/// `n` logarithmically spaced values from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        a
                    } else if i + 1 == n {
                        b
                    } else {
                        (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// All products of one scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub resolved: ResolvedScenario,
    pub trajectory: Trajectory,
    pub correlations: CorrelationGrid,
    pub budget: EmissionBudget,
    pub ind: IndResult,
}

impl ScenarioResult {
    /// Writes trajectory.csv, correlations.csv, budget.csv and manifest.txt.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.trajectory
            .write_csv(BufWriter::new(File::create(dir.join("trajectory.csv"))?))?;
        self.correlations
            .write_csv(BufWriter::new(File::create(dir.join("correlations.csv"))?))?;
        write_budget_csv(
            BufWriter::new(File::create(dir.join("budget.csv"))?),
            &self.budget,
            &self.ind,
        )?;
        let mut m = File::create(dir.join("manifest.txt"))?;
        m.write_all(manifest(&self.resolved).as_bytes())?;
        m.write_all(result_summary(&self.budget, &self.ind).as_bytes())?;
        Ok(())
    }
}

/// End-to-end pipeline: trajectory, correlations, budget and indistinguishability.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    let name = config.name.clone();
    run_inner(config).map_err(|e| e.in_scenario(&name))
}

fn run_inner(config: &ScenarioConfig) -> Result<ScenarioResult> {
    let resolved = config.resolve()?;
    run_resolved(resolved)
}

/// Runs an already resolved scenario.
pub fn run_resolved(resolved: ResolvedScenario) -> Result<ScenarioResult> {
    let model = &resolved.model;
    let trajectory = evolve(model, &resolved.grid, &DensityOperator::ground(&model.space))?;
    let correlations = correlation_grid_with(model, &trajectory, resolved.n_t, resolved.n_tau, &resolved.qrt)?;
    let ind = indistinguishability(&correlations, resolved.grid.t_end)?;
    let budget = emission_budget(model, &trajectory, &correlations)?;
    Ok(ScenarioResult {
        resolved,
        trajectory,
        correlations,
        budget,
        ind,
    })
}

/// Text manifest of every resolved parameter, in the config-file syntax.
pub fn manifest(r: &ResolvedScenario) -> String {
    let m = &r.model;
    let mut s = String::new();
    let _ = writeln!(s, "# resolved parameters (qnm-sps {})", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "scenario = {}", r.name);
    let _ = writeln!(s, "mode.omega_c_ev = {:e}", m.mode.omega_c);
    let _ = writeln!(s, "mode.kappa_ev = {:e}", m.mode.kappa);
    let _ = writeln!(s, "mode.beta_rad = {:e}", m.mode.beta_rad);
    let _ = writeln!(s, "mode.s_factor = {:e}", m.mode.s_factor);
    let _ = writeln!(s, "mode.n_b = {:e}", m.mode.n_b);
    let _ = writeln!(s, "mode.g_ev = {:e}", m.mode.g);
    let _ = writeln!(s, "mode.purcell_peak = {:e}", r.purcell_peak);
    let _ = writeln!(s, "mode.apply_s_factor = {}", m.apply_s_factor);
    let _ = writeln!(s, "emitter.omega_a_ev = {:e}", m.emitter.omega_a);
    let _ = writeln!(s, "emitter.dipole_debye = {:e}", m.emitter.dipole);
    let _ = writeln!(s, "emitter.gamma_ev = {:e}", m.emitter.gamma);
    let _ = writeln!(s, "emitter.gamma_prime_ev = {:e}", m.emitter.gamma_prime);
    let _ = writeln!(s, "pulse.area_pi_units = {:e}", m.pulse.area / std::f64::consts::PI);
    let _ = writeln!(s, "pulse.tau_p_ps = {:e}", m.pulse.tau_p);
    let _ = writeln!(s, "pulse.t_off_ps = {:e}", m.pulse.t_off);
    let _ = writeln!(s, "pulse.omega_l_ev = {:e}", m.pulse.omega_l);
    let _ = writeln!(s, "space.n_fock = {}", m.space.n_fock());
    let _ = writeln!(s, "grid.t_end_ps = {:e}", r.grid.t_end);
    let _ = writeln!(s, "grid.n_t = {}", r.n_t);
    let _ = writeln!(s, "grid.n_tau = {}", r.n_tau);
    let _ = writeln!(s, "grid.dt_max_ps = {:e}", r.grid.dt_max);
    let _ = writeln!(s, "qrt.atol = {:e}", r.qrt.atol);
    let _ = writeln!(s, "qrt.rtol = {:e}", r.qrt.rtol);
    let _ = writeln!(s, "qrt.pump_cutoff = {:e}", r.qrt.pump_cutoff);
    let _ = writeln!(s, "# derived");
    let _ = writeln!(s, "# detuning_c_ev = {:e}", m.detuning_c);
    let _ = writeln!(s, "# detuning_a_ev = {:e}", m.detuning_a);
    let _ = writeln!(s, "# purcell_rate_ev = {:e}", m.purcell_rate());
    let _ = writeln!(s, "# tau_fwhm_ps = {:e}", m.pulse.fwhm());
    let _ = writeln!(s, "# two_g_over_kappa = {:e}", 2.0 * m.coupling() / m.mode.kappa);
    let _ = writeln!(s, "# trajectory_samples = {}", r.grid.n_steps);
    s
}

fn result_summary(b: &EmissionBudget, ind: &IndResult) -> String {
    let mut s = String::from("# results\n");
    for (k, v) in EmissionBudget::CSV_HEADER.iter().zip(b.csv_fields()) {
        let _ = writeln!(s, "# {k} = {v:.6e}");
    }
    let _ = writeln!(s, "# ind = {:.6e}", ind.ind);
    let _ = writeln!(s, "# d1 = {:.6e}", ind.d1);
    let _ = writeln!(s, "# d2 = {:.6e}", ind.d2);
    s
}

/// One sweep point; failures are recorded instead of aborting the sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: std::result::Result<(EmissionBudget, IndResult), String>,
}

/// Sweep table with monotonicity diagnostics.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub axis: &'static str,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    /// Indices i where Ind(i+1) exceeds Ind(i) by more than `tol`
    /// (successful neighbours only).
    pub fn monotonicity_violations(&self, tol: f64) -> Vec<usize> {
        let inds: Vec<Option<f64>> = self
            .points
            .iter()
            .map(|p| p.outcome.as_ref().ok().map(|(_, i)| i.ind))
            .collect();
        (0..inds.len().saturating_sub(1))
            .filter(|&i| matches!((inds[i], inds[i + 1]), (Some(a), Some(b)) if b > a + tol))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.outcome.is_err()).count()
    }

    /// Human-readable diagnostics lines.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let v = self.monotonicity_violations(0.0);
        if v.is_empty() {
            out.push(format!("ind is non-increasing along {}", self.axis));
        } else {
            for i in v {
                out.push(format!(
                    "ind increases between {} = {:e} and {:e}",
                    self.axis,
                    self.points[i].value,
                    self.points[i + 1].value
                ));
            }
        }
        for p in &self.points {
            if let Err(e) = &p.outcome {
                out.push(format!("point {} = {:e} failed: {e}", self.axis, p.value));
            }
        }
        out
    }

    /// Writes `sweep.csv`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![self.axis, "status"];
        header.extend(EmissionBudget::CSV_HEADER);
        header.extend(["ind", "d1", "d2", "error"]);
        w.write_record(&header)?;
        for p in &self.points {
            let mut row = vec![format!("{:.12e}", p.value)];
            match &p.outcome {
                Ok((b, ind)) => {
                    row.push("ok".into());
                    row.extend(b.csv_fields().iter().map(|v| format!("{v:.12e}")));
                    row.extend([ind.ind, ind.d1, ind.d2].iter().map(|v| format!("{v:.12e}")));
                    row.push(String::new());
                }
                Err(e) => {
                    row.push("failed".into());
                    row.extend(std::iter::repeat_n(String::new(), 12));
                    row.push(e.clone());
                }
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the scenario at every point of its sweep axis.
pub fn sweep(config: &ScenarioConfig) -> Result<SweepReport> {
    let axis = config
        .sweep
        .clone()
        .ok_or_else(|| Error::invalid("sweep", "no sweep axis configured"))?;
    if axis.values().is_empty() {
        return Err(Error::invalid("sweep", "sweep axis is empty"));
    }
    let run_point = |&value: &f64| -> SweepPoint {
        let cfg = config.at_sweep_value(&axis, value);
        let outcome = run_scenario(&cfg)
            .map(|r| (r.budget, r.ind))
            .map_err(|e| e.to_string());
        SweepPoint { value, outcome }
    };
    #[cfg(feature = "parallel")]
    let points = {
        use rayon::prelude::*;
        axis.values().par_iter().map(run_point).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let points = axis.values().iter().map(run_point).collect();
    Ok(SweepReport {
        axis: axis.name(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_resolution() {
        let r = ScenarioConfig::fig1().resolve().unwrap();
        let m = &r.model;
        assert!((m.emitter.gamma - 2.57e-7).abs() < 0.01e-7);
        assert!((2.0 * m.mode.g / m.mode.kappa - 0.0477).abs() < 5e-4);
        assert!((m.pulse.tau_p - 1.742).abs() < 0.005);
        assert!((m.pulse.t_off - 5.0 * m.pulse.tau_p).abs() < 1e-12);
        let expected_t = m.pulse.t_off + 10.0 * HBAR_EV_PS / m.purcell_rate();
        assert!((r.grid.t_end - expected_t).abs() < 1e-9);
        assert_eq!(r.grid.n_steps, 400);
        assert_eq!(m.detuning_a, 0.0);
        assert_eq!(m.detuning_c, 0.0);
    }

    #[test]
    fn fig4_is_strong_coupling_short_pulse() {
        let r = ScenarioConfig::fig4().resolve().unwrap();
        let m = &r.model;
        assert!((2.0 * m.mode.g / m.mode.kappa - 0.477).abs() < 5e-3);
        assert!((m.pulse.fwhm() * 1e3 - 2.9).abs() < 0.1);
        assert_eq!(m.space.n_fock(), 9);
    }

    #[test]
    fn presets_and_sweep_axis() {
        for name in ScenarioConfig::PRESETS {
            assert!(ScenarioConfig::preset(name).unwrap().resolve().is_ok());
        }
        assert!(ScenarioConfig::preset("fig9").is_err());
        let v = match ScenarioConfig::fig3().sweep.unwrap() {
            SweepAxis::GammaPrime(v) => v,
            _ => unreachable!(),
        };
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 1e-6);
        assert_eq!(v[24], 1e-2);
    }

    #[test]
    fn grid_lcm() {
        let mut c = ScenarioConfig::fig1();
        c.n_t = 201;
        c.n_tau = 401;
        assert_eq!(c.trajectory_intervals(), 400);
        c.n_t = 4;
        c.n_tau = 5;
        assert_eq!(c.trajectory_intervals(), 12);
    }

    #[test]
    fn spaces() {
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let l = log_space(1e-3, 1e-1, 3);
        assert!((l[1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn manifest_lists_resolved_keys() {
        let r = ScenarioConfig::fig2().resolve().unwrap();
        let text = manifest(&r);
        for key in ["mode.g_ev", "pulse.tau_p_ps", "grid.t_end_ps", "space.n_fock", "emitter.gamma_ev"] {
            assert!(text.contains(key), "{key}");
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let mut c = ScenarioConfig::fig1();
        c.kappa = -1.0;
        assert!(c.resolve().is_err());
        let mut c = ScenarioConfig::fig1();
        c.n_fock = 0;
        assert!(c.resolve().is_err());
        let mut c = ScenarioConfig::fig1();
        c.dipole = 0.0;
        assert!(c.resolve().is_err());
    }

    #[test]
    fn failed_points_are_recorded() {
        let mut c = ScenarioConfig::fig2();
        c.n_t = 11;
        c.n_tau = 11;
        c.n_fock = 2;
        c.sweep = Some(SweepAxis::GammaPrime(vec![0.0, -1.0]));
        let report = sweep(&c).unwrap();
        assert_eq!(report.failures(), 1);
        assert!(report.points[0].outcome.is_ok());
        assert!(report.diagnostics().iter().any(|l| l.contains("failed")));
    }
}
