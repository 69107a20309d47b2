//! Photon budgets and power flows.

use std::io::Write;

use crate::correlations::{CorrelationGrid, IndResult};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::liouvillian::SystemModel;
use crate::quadrature::{trapezoid, trapezoid_2d};
use crate::units::HBAR_EV_PS;

/// Integrands below this are treated as corrupted data rather than roundoff.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Emitted photon numbers per excitation pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionBudget {
    /// Photons leaving through the cavity mode, ∫κ n_c dt.
    pub p1: f64,
    pub p1_rad: f64,
    pub p1_nrad: f64,
    /// Photons emitted directly by the emitter, ∫γ n_a dt.
    pub pa: f64,
    /// Two-photon probability κ²∬_{τ≥0} G² dt dτ.
    pub p2: f64,
    pub p2_rad: f64,
    pub p2_nrad: f64,
    /// p1_rad / (p1 + pa).
    pub beta_total: f64,
    /// Single-photon number probability p1 − 2 p2.
    pub p1_num: f64,
}

impl EmissionBudget {
    pub const CSV_HEADER: [&'static str; 9] = [
        "p1", "p1_rad", "p1_nrad", "pa", "p2", "p2_rad", "p2_nrad", "beta_total", "p1_num",
    ];

    pub fn csv_fields(&self) -> [f64; 9] {
        [
            self.p1,
            self.p1_rad,
            self.p1_nrad,
            self.pa,
            self.p2,
            self.p2_rad,
            self.p2_nrad,
            self.beta_total,
            self.p1_num,
        ]
    }
}

fn check_non_negative(name: &str, values: impl IntoIterator<Item = f64>) -> Result<()> {
    for (i, v) in values.into_iter().enumerate() {
        if !(v >= -NEGATIVITY_TOL) {
            return Err(Error::DataCorruption(format!("{name}[{i}] = {v:e} is negative")));
        }
    }
    Ok(())
}

/// Brightness, background emission and two-photon probabilities.
pub fn emission_budget(model: &SystemModel, traj: &Trajectory, grid: &CorrelationGrid) -> Result<EmissionBudget> {
    check_non_negative("n_c", traj.n_c.iter().cloned())?;
    check_non_negative("n_a", traj.n_a.iter().cloned())?;
    check_non_negative("g2", grid.g2.iter().cloned())?;
    let kappa = model.mode.kappa / HBAR_EV_PS;
    let gamma = model.emitter.gamma / HBAR_EV_PS;
    let h = traj.dt();
    let p1 = kappa * trapezoid(&traj.n_c, h);
    let pa = gamma * trapezoid(&traj.n_a, h);
    let p2 = kappa * kappa * trapezoid_2d(&grid.g2, grid.dt(), grid.dtau());
    let b = model.mode.beta_rad;
    let bn = model.mode.beta_nrad();
    let p1_rad = b * p1;
    let total = p1 + pa;
    Ok(EmissionBudget {
        p1,
        p1_rad,
        p1_nrad: bn * p1,
        pa,
        p2,
        p2_rad: b * b * p2,
        p2_nrad: bn * bn * p2,
        beta_total: if total > 0.0 { p1_rad / total } else { 0.0 },
        p1_num: p1 - 2.0 * p2,
    })
}

/// Radiative and non-radiative output rates (ps⁻¹) on the trajectory times.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlows {
    pub times: Vec<f64>,
    pub p_rad: Vec<f64>,
    pub p_nrad: Vec<f64>,
}

/// p_rad = S²κ_rad n_c and p_nrad = S²κ_nrad n_c, with S = 1 unless the
/// model enables the S factor.
pub fn power_flows(model: &SystemModel, traj: &Trajectory) -> PowerFlows {
    let s2 = if model.apply_s_factor {
        model.mode.s_factor * model.mode.s_factor
    } else {
        1.0
    };
    let k_rad = s2 * model.mode.kappa_rad() / HBAR_EV_PS;
    let k_nrad = s2 * model.mode.kappa_nrad() / HBAR_EV_PS;
    PowerFlows {
        times: traj.times.clone(),
        p_rad: traj.n_c.iter().map(|n| k_rad * n).collect(),
        p_nrad: traj.n_c.iter().map(|n| k_nrad * n).collect(),
    }
}

/// Writes a one-row `budget.csv` including the indistinguishability figures.
pub fn write_budget_csv<W: Write>(writer: W, budget: &EmissionBudget, ind: &IndResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = EmissionBudget::CSV_HEADER.to_vec();
    header.extend(["ind", "d1", "d2"]);
    w.write_record(&header)?;
    let mut row: Vec<String> = budget.csv_fields().iter().map(|v| format!("{v:.12e}")).collect();
    row.extend([ind.ind, ind.d1, ind.d2].iter().map(|v| format!("{v:.12e}")));
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{HilbertSpace, C64};
    use crate::liouvillian::{DensityOperator, PulseSpec};
    use crate::qnm::{Emitter, QnmMode};
    use nalgebra::DMatrix;

    fn model(beta: f64) -> SystemModel {
        let mut mode = QnmMode::GOLD_DIMER;
        mode.beta_rad = beta;
        let emitter = Emitter {
            omega_a: 1.2067,
            dipole: 30.0,
            gamma: 1e-3,
            gamma_prime: 0.0,
        };
        let pulse = PulseSpec {
            area: 0.0,
            tau_p: 1.0,
            t_off: 1.0,
            omega_l: 1.2067,
        };
        SystemModel::new(mode, emitter, pulse, HilbertSpace::new(2).unwrap()).unwrap()
    }

    fn synthetic(n: usize, nc: impl Fn(f64) -> f64) -> (Trajectory, CorrelationGrid) {
        let s = HilbertSpace::new(2).unwrap();
        let times: Vec<f64> = (0..n).map(|i| i as f64 * 0.01).collect();
        let n_c: Vec<f64> = times.iter().map(|&t| nc(t)).collect();
        let traj = Trajectory {
            states: vec![DensityOperator::ground(&s); n],
            n_a: n_c.iter().map(|x| 0.5 * x).collect(),
            a_mean: vec![C64::new(0.0, 0.0); n],
            n_c: n_c.clone(),
            times: times.clone(),
            max_trace_drift: 0.0,
        };
        let grid = CorrelationGrid {
            t_samples: times.clone(),
            tau_samples: times.clone(),
            g1: DMatrix::zeros(n, n),
            g2: DMatrix::from_element(n, n, 1e-4),
            g2_pop: DMatrix::zeros(n, n),
            a_mean_t: vec![C64::new(0.0, 0.0); n],
            a_mean_ttau: DMatrix::zeros(n, n),
        };
        (traj, grid)
    }

    #[test]
    fn fully_radiative_mode() {
        let m = model(1.0);
        let (traj, grid) = synthetic(101, |t| (-t).exp() * 1e-3);
        let b = emission_budget(&m, &traj, &grid).unwrap();
        assert_eq!(b.p1_rad, b.p1);
        assert_eq!(b.p2_rad, b.p2);
        assert_eq!(b.p1_num, b.p1 - 2.0 * b.p2);
        assert!(b.beta_total <= 1.0 && b.beta_total > 0.0);
    }

    #[test]
    fn budget_closure_and_flows() {
        let m = model(0.6);
        let (traj, grid) = synthetic(101, |t| t * (1.0 - t) * 1e-3);
        let b = emission_budget(&m, &traj, &grid).unwrap();
        assert!((b.p1 - b.p1_rad - b.p1_nrad).abs() < 1e-12);
        let kappa = m.mode.kappa / HBAR_EV_PS;
        let exact = kappa * 1e-3 * (0.5 - 1.0 / 3.0);
        assert!((b.p1 - exact).abs() < 1e-4 * exact);
        let f = power_flows(&m, &traj);
        for i in 1..100 {
            assert!((f.p_rad[i] / f.p_nrad[i] - 0.6 / 0.4).abs() < 1e-12);
        }
        let total: Vec<f64> = f.p_rad.iter().zip(&f.p_nrad).map(|(a, b)| a + b).collect();
        assert!((trapezoid(&total, 0.01) - b.p1).abs() < 1e-12 * b.p1.max(1.0));
    }

    #[test]
    fn empty_cavity_has_no_flow() {
        let m = model(0.6);
        let (traj, _) = synthetic(11, |_| 0.0);
        let f = power_flows(&m, &traj);
        assert!(f.p_rad.iter().chain(&f.p_nrad).all(|v| *v == 0.0));
    }

    #[test]
    fn negative_population_is_corruption() {
        let m = model(0.6);
        let (traj, grid) = synthetic(11, |t| if t > 0.05 { -1e-6 } else { 0.0 });
        assert!(matches!(emission_budget(&m, &traj, &grid), Err(Error::DataCorruption(_))));
    }

    #[test]
    fn budget_csv_layout() {
        let b = EmissionBudget {
            p1: 1.0,
            p1_rad: 0.6,
            p1_nrad: 0.4,
            pa: 0.0,
            p2: 0.01,
            p2_rad: 0.0036,
            p2_nrad: 0.0016,
            beta_total: 0.6,
            p1_num: 0.98,
        };
        let mut buf = Vec::new();
        write_budget_csv(&mut buf, &b, &IndResult::from_parts(0.1, 0.1)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "p1,p1_rad,p1_nrad,pa,p2,p2_rad,p2_nrad,beta_total,p1_num,ind,d1,d2"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 12);
    }
}
