//! Rotating-frame Hamiltonian, Gaussian pump and the Lindblad generator.
//!
//! The dense [`apply_generator`] is the reference form; [`Generator`] is a
//! sparse precompiled version of the same map used by the integrators.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hilbert::{self, HilbertSpace, OperatorMatrix, C64};
use crate::qnm::{Emitter, QnmMode};
use crate::units::HBAR_EV_PS;

const I: C64 = C64::new(0.0, 1.0);

/// Gaussian pump pulse Ω(t) = Θ/(√π τ_p) exp(−(t − t_off)²/τ_p²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Pulse area Θ (rad).
    pub area: f64,
    /// Width τ_p (ps).
    pub tau_p: f64,
    /// Centre of the pulse (ps).
    pub t_off: f64,
    /// Laser carrier ħω_L (eV).
    pub omega_l: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_p > 0.0) || !self.tau_p.is_finite() {
            return Err(Error::invalid("pulse.tau_p", "must be > 0"));
        }
        if !(self.area >= 0.0) || !self.area.is_finite() {
            return Err(Error::invalid("pulse.area", "must be >= 0"));
        }
        if !(self.t_off > 0.0) || !self.t_off.is_finite() {
            return Err(Error::invalid("pulse.t_off", "must be > 0"));
        }
        if !self.omega_l.is_finite() {
            return Err(Error::invalid("pulse.omega_l", "must be finite"));
        }
        Ok(())
    }

    /// Full width at half maximum of Ω(t), 2√(ln 2)·τ_p.
    pub fn fwhm(&self) -> f64 {
        2.0 * 2f64.ln().sqrt() * self.tau_p
    }

    /// Ω(t) in ps⁻¹.
    pub fn rate(&self, t: f64) -> f64 {
        let x = (t - self.t_off) / self.tau_p;
        self.area / (PI.sqrt() * self.tau_p) * (-x * x).exp()
    }

    /// Half-width beyond which Ω is below ~1e-60 of its peak.
    pub(crate) fn support(&self) -> f64 {
        12.0 * self.tau_p
    }
}

/// Pump Rabi rate ħΩ(t) in eV.
pub fn pump_amplitude(pulse: &PulseSpec, t: f64) -> f64 {
    HBAR_EV_PS * pulse.rate(t)
}

/// Emitter–mode system in the frame rotating at the laser carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub mode: QnmMode,
    pub emitter: Emitter,
    pub pulse: PulseSpec,
    pub space: HilbertSpace,
    /// ω_c − ω_L (eV).
    pub detuning_c: f64,
    /// ω_a − ω_L (eV).
    pub detuning_a: f64,
    /// Repeat the pulse every `pulse_period` ps (pulse train) when set.
    pub pulse_period: Option<f64>,
    /// Scale the coupling by √S (and power flows by S²).
    pub apply_s_factor: bool,
}

impl SystemModel {
    /// Detunings taken from the mode, emitter and laser frequencies.
    pub fn new(mode: QnmMode, emitter: Emitter, pulse: PulseSpec, space: HilbertSpace) -> Result<Self> {
        let model = Self {
            mode,
            emitter,
            pulse,
            space,
            detuning_c: mode.omega_c - pulse.omega_l,
            detuning_a: emitter.omega_a - pulse.omega_l,
            pulse_period: None,
            apply_s_factor: false,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.mode.validate()?;
        self.emitter.validate()?;
        self.pulse.validate()?;
        if !self.detuning_c.is_finite() || !self.detuning_a.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        if let Some(p) = self.pulse_period {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::invalid("pulse_period", "must be > 0"));
            }
        }
        Ok(())
    }

    /// Coupling actually used in the Hamiltonian (eV).
    pub fn coupling(&self) -> f64 {
        if self.apply_s_factor {
            self.mode.g * self.mode.s_factor.sqrt()
        } else {
            self.mode.g
        }
    }

    /// Drive Ω(t) in ps⁻¹, summed over the pulse train if one is configured.
    pub fn drive(&self, t: f64) -> f64 {
        match self.pulse_period {
            None => self.pulse.rate(t),
            Some(period) => {
                let w = self.pulse.support();
                let lo = ((t - self.pulse.t_off - w) / period).ceil().max(0.0) as i64;
                let hi = ((t - self.pulse.t_off + w) / period).floor() as i64;
                (lo..=hi)
                    .map(|k| self.pulse.rate(t - k as f64 * period))
                    .sum()
            }
        }
    }

    /// Purcell-enhanced rate γ^P = 4g²/κ (eV).
    pub fn purcell_rate(&self) -> f64 {
        let g = self.coupling();
        4.0 * g * g / self.mode.kappa
    }
}

/// H(t) in eV: Δ_c a†a + Δ_a σ⁺σ⁻ + g(aσ⁺ + a†σ⁻) + (ħΩ(t)/2)(σ⁺ + σ⁻).
///
/// With the ½ the pulse area is the Bloch rotation angle, so Θ = π inverts
/// the emitter.
pub fn hamiltonian(model: &SystemModel, t: f64) -> OperatorMatrix {
    let s = &model.space;
    let a = hilbert::annihilation(s);
    let sm = hilbert::sigma_minus(s);
    let sp = sm.adjoint();
    let ad = a.adjoint();
    let g = model.coupling();
    let pump = 0.5 * HBAR_EV_PS * model.drive(t);
    let m = (&ad * &a).0 * C64::from(model.detuning_c)
        + (&sp * &sm).0 * C64::from(model.detuning_a)
        + ((&a * &sp).0 + (&ad * &sm).0) * C64::from(g)
        + (&sp + &sm).0 * C64::from(pump);
    OperatorMatrix(m)
}

/// Valid density operator on the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(OperatorMatrix);

impl DensityOperator {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const POSITIVITY_TOL: f64 = 1e-8;

    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(matrix: OperatorMatrix) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::invalid("rho", "non-finite entries"));
        }
        let defect = matrix.hermiticity_defect();
        if defect > Self::HERMITIAN_TOL {
            return Err(Error::invalid("rho", format!("not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::from(1.0)).norm() > Self::TRACE_TOL {
            return Err(Error::invalid("rho", format!("trace {tr} differs from 1")));
        }
        let rho = Self(matrix);
        let min = rho.min_eigenvalue();
        if min < -Self::POSITIVITY_TOL {
            return Err(Error::invalid("rho", format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_unchecked(matrix: OperatorMatrix) -> Self {
        Self(matrix)
    }

    /// |g,0⟩⟨g,0|.
    pub fn ground(space: &HilbertSpace) -> Self {
        Self::basis(space, false, 0)
    }

    pub fn basis(space: &HilbertSpace, excited: bool, n: usize) -> Self {
        Self(hilbert::basis_projector(space, excited, n))
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h: DMatrix<C64> = (&self.0 .0 + self.0 .0.adjoint()) * C64::from(0.5);
        SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn dissipator(a: &OperatorMatrix, x: &OperatorMatrix) -> OperatorMatrix {
    let ad = a.adjoint();
    let ada = &ad * a;
    let jump = &(a * x) * &ad;
    OperatorMatrix(jump.0 * C64::from(2.0) - ada.anticommutator(x).0)
}

/// L(t)x for an arbitrary operator x (ps⁻¹), dense reference form.
pub fn generator_action(model: &SystemModel, x: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    let s = &model.space;
    if x.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: x.dim(),
        });
    }
    let h = hamiltonian(model, t);
    let a = hilbert::annihilation(s);
    let sm = hilbert::sigma_minus(s);
    let pe = hilbert::excited_projector(s);
    let coherent = h.commutator(x).0 * (-I / HBAR_EV_PS);
    let k = model.mode.kappa / (2.0 * HBAR_EV_PS);
    let gm = model.emitter.gamma / (2.0 * HBAR_EV_PS);
    let gp = model.emitter.gamma_prime / (2.0 * HBAR_EV_PS);
    let out = coherent
        + dissipator(&a, x).0 * C64::from(k)
        + dissipator(&sm, x).0 * C64::from(gm)
        + dissipator(&pe, x).0 * C64::from(gp);
    Ok(OperatorMatrix(out))
}

/// dρ/dt = −(i/ħ)[H(t),ρ] + (κ/2)D[a]ρ + (γ/2)D[σ⁻]ρ + (γ′/2)D[σ⁺σ⁻]ρ in ps⁻¹.
pub fn apply_generator(model: &SystemModel, rho: &DensityOperator, t: f64) -> Result<OperatorMatrix> {
    generator_action(model, rho.matrix(), t)
}

type Entries = Vec<(usize, usize, C64)>;

#[derive(Debug, Clone)]
struct Jump {
    rate: f64,
    // (row, col, value) of A paired with (row, col, value) of A, pre-multiplied.
    pairs: Vec<(usize, usize, usize, usize, C64)>,
}

/// Sparse generator acting on column-major flattened operators.
///
/// Writes L(t)x as −i(K x − x K†) + Σ_j r_j A_j x A_j†, where
/// K = H/ħ − (i/2)Σ_j r_j A_j†A_j and the pump part of H is kept separate.
#[derive(Debug, Clone)]
pub struct Generator {
    dim: usize,
    k_static: Entries,
    pump: Entries,
    jumps: Vec<Jump>,
    model: SystemModel,
}

impl Generator {
    pub fn new(model: &SystemModel) -> Self {
        let s = &model.space;
        let dim = s.dim();
        let a = hilbert::annihilation(s);
        let sm = hilbert::sigma_minus(s);
        let sp = sm.adjoint();
        let pe = hilbert::excited_projector(s);
        let ops = [
            (model.mode.kappa / HBAR_EV_PS, a.clone()),
            (model.emitter.gamma / HBAR_EV_PS, sm.clone()),
            (model.emitter.gamma_prime / HBAR_EV_PS, pe),
        ];
        let mut h_static = hamiltonian(&SystemModel { pulse: PulseSpec { area: 0.0, ..model.pulse }, ..model.clone() }, 0.0)
            .0
            * C64::from(1.0 / HBAR_EV_PS);
        let mut jumps = Vec::new();
        for (rate, op) in ops.iter() {
            if *rate == 0.0 {
                continue;
            }
            let ada = &op.adjoint() * op;
            h_static -= ada.0 * (I * (0.5 * rate));
            let nz = op.nonzeros();
            let mut pairs = Vec::with_capacity(nz.len() * nz.len());
            for &(r, p, v1) in &nz {
                for &(c, q, v2) in &nz {
                    pairs.push((r, p, c, q, v1 * v2.conj() * *rate));
                }
            }
            jumps.push(Jump { rate: *rate, pairs });
        }
        let pump_op = (&sp + &sm).scale(C64::from(0.5));
        Self {
            dim,
            k_static: OperatorMatrix(h_static).nonzeros(),
            pump: pump_op.nonzeros(),
            jumps,
            model: model.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    /// Ω(t) in ps⁻¹.
    pub fn drive(&self, t: f64) -> f64 {
        self.model.drive(t)
    }

    /// Largest jump rate, a proxy for the stiffness of the problem (ps⁻¹).
    pub fn max_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate).fold(0.0, f64::max)
    }

    /// out = L x for one flattened operator, with the drive fixed to `drive`.
    pub fn apply_with_drive(&self, drive: f64, x: &[C64], out: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(x.len(), d * d);
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let mut commute = |i: usize, j: usize, v: C64| {
            let left = -I * v;
            let right = I * v.conj();
            for col in 0..d {
                out[i + col * d] += left * x[j + col * d];
            }
            let (src, dst) = (j * d, i * d);
            for row in 0..d {
                out[dst + row] += right * x[src + row];
            }
        };
        for &(i, j, v) in &self.k_static {
            commute(i, j, v);
        }
        if drive != 0.0 {
            for &(i, j, v) in &self.pump {
                commute(i, j, v * drive);
            }
        }
        for jump in &self.jumps {
            for &(r, p, c, q, w) in &jump.pairs {
                out[r + c * d] += w * x[p + q * d];
            }
        }
    }

    /// out = L(t) x where `x` may hold several stacked operators.
    pub fn apply(&self, t: f64, x: &[C64], out: &mut [C64]) {
        let block = self.dim * self.dim;
        let drive = self.drive(t);
        for (xb, ob) in x.chunks_exact(block).zip(out.chunks_exact_mut(block)) {
            self.apply_with_drive(drive, xb, ob);
        }
    }

    /// Dense dim²×dim² matrix of L at fixed drive (column-major vec convention).
    pub fn superoperator(&self, drive: f64) -> DMatrix<C64> {
        let n = self.dim * self.dim;
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            e[k] = C64::new(1.0, 0.0);
            self.apply_with_drive(drive, &e, &mut col);
            m.column_mut(k).copy_from_slice(&col);
            e[k] = C64::new(0.0, 0.0);
        }
        m
    }
}

/// Column-major flattening, matching nalgebra's storage.
pub fn flatten(m: &OperatorMatrix) -> Vec<C64> {
    m.0.as_slice().to_vec()
}

pub fn unflatten(dim: usize, v: &[C64]) -> OperatorMatrix {
    OperatorMatrix(DMatrix::from_column_slice(dim, dim, v))
}

/// tr(A x) for flattened x.
pub fn trace_product(a: &OperatorMatrix, x: &[C64]) -> C64 {
    let d = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..d {
        for i in 0..d {
            acc += a.get(j, i) * x[i + j * d];
        }
    }
    acc
}
