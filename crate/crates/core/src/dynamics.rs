//! Time integration of the master equation on a uniform sample grid.

use std::io::Write;

use crate::error::{Error, Result};
use crate::hilbert::{self, OperatorMatrix, C64};
use crate::liouvillian::{flatten, unflatten, DensityOperator, Generator, SystemModel};
use crate::ode::{DormandPrince, Tolerances};

/// Trace drift above which a trajectory is rejected.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;
/// Eigenvalue below which a sampled state counts as unphysical.
pub const MIN_EIGENVALUE: f64 = -1e-6;

/// Uniform sampling of [0, t_end].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    /// Window length T (ps).
    pub t_end: f64,
    /// Number of samples, including both end points.
    pub n_steps: usize,
    /// Integrator step ceiling (ps).
    pub dt_max: f64,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize, dt_max: f64) -> Result<Self> {
        let grid = Self {
            t_end,
            n_steps,
            dt_max,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::invalid("grid.t_end", "must be > 0"));
        }
        if self.n_steps < 2 {
            return Err(Error::invalid("grid.n_steps", "need at least 2 samples"));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::invalid("grid.dt_max", "must be > 0"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_end / (self.n_steps - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n_steps {
            self.t_end
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_steps).map(|k| self.time(k)).collect()
    }
}

/// Sampled density-operator trajectory with single-time observables.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
    /// ⟨σ⁺σ⁻⟩.
    pub n_a: Vec<f64>,
    /// ⟨a†a⟩.
    pub n_c: Vec<f64>,
    /// ⟨a⟩.
    pub a_mean: Vec<C64>,
    /// Largest |tr ρ − 1| seen before renormalization.
    pub max_trace_drift: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Sample spacing (uniform by construction).
    pub fn dt(&self) -> f64 {
        self.t_end() / (self.len().max(2) - 1) as f64
    }

    /// Writes `t,n_a,n_c,re_a,im_a`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "n_a", "n_c", "re_a", "im_a"])?;
        for i in 0..self.len() {
            w.write_record([
                format!("{:.12e}", self.times[i]),
                format!("{:.12e}", self.n_a[i]),
                format!("{:.12e}", self.n_c[i]),
                format!("{:.12e}", self.a_mean[i].re),
                format!("{:.12e}", self.a_mean[i].im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// tr(op·ρ).
pub fn expectation(rho: &DensityOperator, op: &OperatorMatrix) -> Result<C64> {
    if op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: op.dim(),
        });
    }
    Ok(crate::liouvillian::trace_product(op, rho.matrix().0.as_slice()))
}

fn hermitize(m: OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix((&m.0 + m.0.adjoint()) * C64::from(0.5))
}

/// Integrates the master equation from ρ(0) = `rho0` and samples it on `grid`.
pub fn evolve(model: &SystemModel, grid: &TimeGrid, rho0: &DensityOperator) -> Result<Trajectory> {
    let tol = Tolerances {
        h_max: grid.dt_max,
        ..Default::default()
    };
    evolve_with(model, grid, rho0, tol)
}

/// [`evolve`] with explicit integrator settings (`h_max` is taken from `tol`).
pub fn evolve_with(
    model: &SystemModel,
    grid: &TimeGrid,
    rho0: &DensityOperator,
    tol: Tolerances,
) -> Result<Trajectory> {
    model.validate()?;
    grid.validate()?;
    let dim = model.space.dim();
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rho0.dim(),
        });
    }
    let gen = Generator::new(model);
    let a = hilbert::annihilation(&model.space);
    let num = hilbert::number(&model.space);
    let pe = hilbert::excited_projector(&model.space);

    let f = |t: f64, x: &[C64], out: &mut [C64]| gen.apply(t, x, out);
    let mut solver = DormandPrince::new(f, 0.0, &flatten(rho0.matrix()), tol);

    let n = grid.n_steps;
    let mut traj = Trajectory {
        times: Vec::with_capacity(n),
        states: Vec::with_capacity(n),
        n_a: Vec::with_capacity(n),
        n_c: Vec::with_capacity(n),
        a_mean: Vec::with_capacity(n),
        max_trace_drift: 0.0,
    };
    for k in 0..n {
        let t = grid.time(k);
        let raw = unflatten(dim, solver.state_at(t)?);
        if !raw.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite state".into(),
            });
        }
        let tr = raw.trace();
        let drift = (tr - C64::from(1.0)).norm();
        traj.max_trace_drift = traj.max_trace_drift.max(drift);
        if drift > MAX_TRACE_DRIFT {
            return Err(Error::Integration {
                t,
                reason: format!("trace drift {drift:e} exceeds {MAX_TRACE_DRIFT:e}"),
            });
        }
        let rho = DensityOperator::from_unchecked(hermitize(raw.scale(C64::from(1.0 / tr.re))));
        let min = rho.min_eigenvalue();
        if min < MIN_EIGENVALUE {
            return Err(Error::Positivity {
                t,
                min_eigenvalue: min,
            });
        }
        traj.times.push(t);
        traj.n_a.push(expectation(&rho, &pe)?.re);
        traj.n_c.push(expectation(&rho, &num)?.re);
        traj.a_mean.push(expectation(&rho, &a)?);
        traj.states.push(rho);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::HilbertSpace;
    use crate::liouvillian::PulseSpec;
    use crate::qnm::{Emitter, QnmMode};
    use crate::units::HBAR_EV_PS;
    use std::f64::consts::PI;

    fn bare_model(n: usize) -> SystemModel {
        let emitter = Emitter {
            omega_a: 1.2067,
            dipole: 30.0,
            gamma: 0.0,
            gamma_prime: 0.0,
        };
        let pulse = PulseSpec {
            area: 0.0,
            tau_p: 1.0,
            t_off: 5.0,
            omega_l: 1.2067,
        };
        SystemModel::new(QnmMode::GOLD_DIMER, emitter, pulse, HilbertSpace::new(n).unwrap()).unwrap()
    }

    #[test]
    fn ground_state_stays_put() {
        let m = bare_model(3);
        let grid = TimeGrid::new(10.0, 21, 0.1).unwrap();
        let traj = evolve(&m, &grid, &DensityOperator::ground(&m.space)).unwrap();
        assert!(traj.n_a.iter().chain(&traj.n_c).all(|&x| x.abs() < 1e-14));
        assert_eq!(traj.len(), 21);
        assert_eq!(traj.times[20], 10.0);
    }

    #[test]
    fn emitter_decay_is_exponential() {
        let mut m = bare_model(2);
        m.emitter.gamma = 0.01;
        let rate = m.emitter.gamma / HBAR_EV_PS;
        let grid = TimeGrid::new(3.0 / rate, 31, 0.1 / rate).unwrap();
        let rho0 = DensityOperator::basis(&m.space, true, 0);
        let traj = evolve(&m, &grid, &rho0).unwrap();
        for (t, na) in traj.times.iter().zip(&traj.n_a) {
            let exact = (-rate * t).exp();
            assert!((na - exact).abs() < 1e-6 * exact, "{na} vs {exact}");
        }
    }

    #[test]
    fn cavity_decay_is_exponential() {
        let m = bare_model(3);
        let rate = m.mode.kappa / HBAR_EV_PS;
        let grid = TimeGrid::new(5.0 / rate, 26, 1.0).unwrap();
        let traj = evolve(&m, &grid, &DensityOperator::basis(&m.space, false, 1)).unwrap();
        for (t, nc) in traj.times.iter().zip(&traj.n_c) {
            let exact = (-rate * t).exp();
            assert!((nc - exact).abs() < 1e-6 * exact);
        }
        assert!(traj.max_trace_drift < 1e-9);
    }

    #[test]
    fn unitary_evolution_keeps_purity() {
        let mut m = bare_model(3);
        m.mode.kappa = 1e-12;
        m.mode.omega_c = 1.0;
        m.mode.g = 5e-3;
        m.pulse.area = PI;
        let grid = TimeGrid::new(10.0, 11, 0.05).unwrap();
        let traj = evolve(&m, &grid, &DensityOperator::ground(&m.space)).unwrap();
        for rho in &traj.states {
            assert!((rho.purity() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn expectation_checks() {
        let s = HilbertSpace::new(3).unwrap();
        let rho = DensityOperator::basis(&s, true, 0);
        let id = OperatorMatrix::identity(s.dim());
        assert!((expectation(&rho, &id).unwrap() - C64::from(1.0)).norm() < 1e-15);
        let pe = hilbert::excited_projector(&s);
        assert_eq!(expectation(&rho, &pe).unwrap(), C64::from(1.0));
        assert!(expectation(&rho, &OperatorMatrix::identity(3)).is_err());
        // Diagonal mixture: ⟨a†a⟩ = Σ p_n n.
        let p = [0.5, 0.3, 0.15, 0.05];
        let mix = OperatorMatrix::from_fn(s.dim(), |i, j| {
            if i == j && i < 4 {
                C64::from(p[i])
            } else {
                C64::from(0.0)
            }
        });
        let rho = DensityOperator::new(mix).unwrap();
        let n = expectation(&rho, &hilbert::number(&s)).unwrap();
        assert!((n.re - (0.3 + 0.3 + 0.15)).abs() < 1e-15);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let m = bare_model(1);
        let grid = TimeGrid::new(1.0, 3, 0.5).unwrap();
        let traj = evolve(&m, &grid, &DensityOperator::ground(&m.space)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,n_a,n_c,re_a,im_a\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 10, 0.1).is_err());
        assert!(TimeGrid::new(1.0, 1, 0.1).is_err());
        assert!(TimeGrid::new(1.0, 10, 0.0).is_err());
    }
}
