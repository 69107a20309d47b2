//! Runs a built-in scenario and prints its figures of merit.
//!
//! cargo run --release -p qnm-sps --example preset -- fig2 [n] [n_fock] [gamma_prime_ev]

use std::time::Instant;

use qnm_sps::scenario::{run_scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "fig1".into());
    let mut cfg = ScenarioConfig::preset(&name)?;
    if let Some(n) = std::env::args().nth(2) {
        cfg.n_t = n.parse()?;
        cfg.n_tau = cfg.n_t;
    }
    if let Some(n) = std::env::args().nth(3) {
        cfg.n_fock = n.parse()?;
    }
    if let Some(g) = std::env::args().nth(4) {
        cfg.gamma_prime = g.parse()?;
    }
    let start = Instant::now();
    let r = run_scenario(&cfg)?;
    let b = &r.budget;
    println!(
        "{name}: ind = {:.4}  2D1 = {:.4}  2D2 = {:.4}  P1 = {:.4}  P1_rad = {:.4}  Pa = {:.5}  P2 = {:.5}  ({:.1} s)",
        r.ind.ind,
        2.0 * r.ind.d1,
        2.0 * r.ind.d2,
        b.p1,
        b.p1_rad,
        b.pa,
        b.p2,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
