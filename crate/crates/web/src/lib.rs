//! Browser bindings for the interactive demo page in `www/`.
//!
//! Every entry point takes a scenario in the config-file syntax and returns
//! a JSON string, so the page needs no JavaScript-side model.

use qnm_sps::config::parse_config;
use qnm_sps::dynamics::evolve;
use qnm_sps::emission::power_flows;
use qnm_sps::qnm::{purcell_spectrum, PurcellAnchor};
use qnm_sps::quadrature::trapezoid;
use qnm_sps::scenario::{lin_space, run_scenario, ScenarioConfig};
use qnm_sps::units::HBAR_EV_PS;
use qnm_sps::DensityOperator;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest grid the indistinguishability explorer accepts; the full
/// 400 × 400 run is too slow for a page.
pub const MAX_EXPLORER_GRID: usize = 121;

#[derive(Serialize)]
struct Spectrum {
    omega: Vec<f64>,
    purcell: Vec<f64>,
    peak: f64,
    quality_factor: f64,
}

#[derive(Serialize)]
struct Dynamics {
    t: Vec<f64>,
    n_a: Vec<f64>,
    n_c: Vec<f64>,
    p_rad: Vec<f64>,
    p_nrad: Vec<f64>,
    p1: f64,
    pa: f64,
    tau_fwhm: f64,
}

#[derive(Serialize)]
struct Explorer {
    ind: f64,
    d1: f64,
    d2: f64,
    p1: f64,
    p1_rad: f64,
    p2: f64,
    grid: usize,
}

fn config(text: &str) -> Result<ScenarioConfig, String> {
    parse_config(text).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Purcell factor on `points` frequencies spanning ω_c ± `half_span` κ.
pub fn spectrum_json(text: &str, half_span: f64, points: usize) -> Result<String, String> {
    let r = config(text)?.resolve().map_err(|e| e.to_string())?;
    let mode = r.model.mode;
    let lo = (mode.omega_c - half_span * mode.kappa).max(1e-3);
    let omega = lin_space(lo, mode.omega_c + half_span * mode.kappa, points.max(2));
    let anchor = PurcellAnchor {
        peak: r.purcell_peak,
        ..Default::default()
    };
    let purcell = purcell_spectrum(&mode, &anchor, &omega).map_err(|e| e.to_string())?;
    to_json(&Spectrum {
        omega,
        purcell,
        peak: r.purcell_peak,
        quality_factor: mode.quality_factor(),
    })
}

/// Populations and output power under the configured pulse.
pub fn dynamics_json(text: &str, samples: usize) -> Result<String, String> {
    let mut cfg = config(text)?;
    cfg.n_t = samples.max(2);
    cfg.n_tau = cfg.n_t;
    let r = cfg.resolve().map_err(|e| e.to_string())?;
    let m = &r.model;
    let traj = evolve(m, &r.grid, &DensityOperator::ground(&m.space)).map_err(|e| e.to_string())?;
    let flows = power_flows(m, &traj);
    let h = traj.dt();
    to_json(&Dynamics {
        p1: m.mode.kappa / HBAR_EV_PS * trapezoid(&traj.n_c, h),
        pa: m.emitter.gamma / HBAR_EV_PS * trapezoid(&traj.n_a, h),
        tau_fwhm: m.pulse.fwhm(),
        t: traj.times,
        n_a: traj.n_a,
        n_c: traj.n_c,
        p_rad: flows.p_rad,
        p_nrad: flows.p_nrad,
    })
}

/// Indistinguishability and photon budget on a coarse `grid` × `grid` lattice.
pub fn explorer_json(text: &str, grid: usize) -> Result<String, String> {
    let mut cfg = config(text)?;
    let n = grid.clamp(11, MAX_EXPLORER_GRID);
    cfg.n_t = n;
    cfg.n_tau = n;
    cfg.sweep = None;
    let r = run_scenario(&cfg).map_err(|e| e.to_string())?;
    to_json(&Explorer {
        ind: r.ind.ind,
        d1: r.ind.d1,
        d2: r.ind.d2,
        p1: r.budget.p1,
        p1_rad: r.budget.p1_rad,
        p2: r.budget.p2,
        grid: n,
    })
}

#[wasm_bindgen]
pub fn purcell(config: &str, half_span: f64, points: usize) -> Result<String, JsError> {
    spectrum_json(config, half_span, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dynamics(config: &str, samples: usize) -> Result<String, JsError> {
    dynamics_json(config, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn explore(config: &str, grid: usize) -> Result<String, JsError> {
    explorer_json(config, grid).map_err(|e| JsError::new(&e))
}

/// Names of the built-in scenarios, comma separated.
#[wasm_bindgen]
pub fn presets() -> String {
    ScenarioConfig::PRESETS.join(",")
}
