//! Two-time correlations from the quantum regression theorem and the
//! Hong–Ou–Mandel indistinguishability built from them.
//!
//! Every row of a correlation grid propagates an operator-valued initial
//! condition (ρ(t)a† for G¹, aρ(t)a† for G²) forward under the same generator
//! as the density operator. Rows are advanced together interval by interval on
//! a uniform lattice:
//!
//! * intervals that overlap the pump are integrated with the adaptive
//!   Dormand–Prince solver, either on the row states directly or, when many
//!   rows are active, on the basis of operator space to get that interval's
//!   propagator;
//! * pump-free intervals share one propagator Φ, computed once the same way;
//! * after the last pumped interval, values come from the Heisenberg-picture
//!   vectors (Φᵀ)ᵐ vec(Oᵀ), so the remaining τ samples are dot products.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{evolve_with, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::{self, OperatorMatrix, C64};
use crate::liouvillian::{flatten, trace_product, DensityOperator, Generator, SystemModel};
use crate::ode::{DormandPrince, Tolerances};
use crate::quadrature::{trapezoid_2d, trapezoid_weights};

const ZERO: C64 = C64::new(0.0, 0.0);
const ROW_CHUNK: usize = 8;
const COLUMN_CHUNK: usize = 16;
/// G² entries more negative than this are reported as a propagation failure.
pub const G2_NEGATIVITY_TOL: f64 = 1e-9;

/// Settings of the correlation propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrtOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Intervals where Ω(t) stays below `pump_cutoff`·max Ω are treated as pump-free.
    pub pump_cutoff: f64,
}

impl Default for QrtOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-8,
            pump_cutoff: 1e-10,
        }
    }
}

/// Sampled two-time correlators on a rectangular (t, τ) grid.
#[derive(Debug, Clone)]
pub struct CorrelationGrid {
    pub t_samples: Vec<f64>,
    pub tau_samples: Vec<f64>,
    /// G¹(t,τ) = ⟨a†(t)a(t+τ)⟩.
    pub g1: DMatrix<C64>,
    /// G²(t,τ) = ⟨a†(t)a†(t+τ)a(t+τ)a(t)⟩.
    pub g2: DMatrix<f64>,
    /// n_c(t)·n_c(t+τ).
    pub g2_pop: DMatrix<f64>,
    pub a_mean_t: Vec<C64>,
    /// ⟨a(t+τ)⟩ from the single-time trajectory.
    pub a_mean_ttau: DMatrix<C64>,
}

impl CorrelationGrid {
    pub fn dt(&self) -> f64 {
        spacing(&self.t_samples)
    }

    pub fn dtau(&self) -> f64 {
        spacing(&self.tau_samples)
    }

    pub fn t_end(&self) -> f64 {
        *self.t_samples.last().unwrap_or(&0.0)
    }

    /// Writes `t,tau,re_g1,im_g1,g2,g2_pop,g2_hom`, one row per grid point.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let hom = hom_correlation(self);
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "tau", "re_g1", "im_g1", "g2", "g2_pop", "g2_hom"])?;
        for (i, t) in self.t_samples.iter().enumerate() {
            for (j, tau) in self.tau_samples.iter().enumerate() {
                let g1 = self.g1[(i, j)];
                w.write_record([
                    format!("{t:.12e}"),
                    format!("{tau:.12e}"),
                    format!("{:.12e}", g1.re),
                    format!("{:.12e}", g1.im),
                    format!("{:.12e}", self.g2[(i, j)]),
                    format!("{:.12e}", self.g2_pop[(i, j)]),
                    format!("{:.12e}", hom[(i, j)]),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn spacing(v: &[f64]) -> f64 {
    if v.len() < 2 {
        0.0
    } else {
        (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
    }
}

/// Indistinguishability decomposition Ind = 1 − D1 − D2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndResult {
    /// First-order decoherence.
    pub d1: f64,
    /// Multi-photon contribution.
    pub d2: f64,
    pub ind: f64,
}

impl IndResult {
    pub fn from_parts(d1: f64, d2: f64) -> Self {
        Self {
            d1,
            d2,
            ind: 1.0 - d1 - d2,
        }
    }
}

/// One row of propagation: a start index on the lattice and the initial
/// operators (one per observable).
struct RowSpec {
    start: usize,
    blocks: Vec<Vec<C64>>,
}

struct Active {
    row: usize,
    start: usize,
    x: Vec<C64>,
    scale: Vec<f64>,
}

/// Interval-by-interval QRT propagation on a uniform lattice of `n` intervals.
struct Engine<'a> {
    gen: &'a Generator,
    h: f64,
    n: usize,
    d2: usize,
    pumped: Vec<bool>,
    tol: Tolerances,
    observables: Vec<Vec<C64>>,
    phi_free: Option<DMatrix<C64>>,
}

impl<'a> Engine<'a> {
    fn new(gen: &'a Generator, h: f64, n: usize, observables: &[OperatorMatrix], opts: &QrtOptions) -> Self {
        let model = gen.model();
        let pumped = pumped_intervals(model, h, n, opts.pump_cutoff);
        let d = gen.dim();
        let tol = Tolerances {
            atol: opts.atol,
            rtol: opts.rtol,
            h_max: h,
            ..Default::default()
        };
        Self {
            gen,
            h,
            n,
            d2: d * d,
            pumped,
            tol,
            observables: observables.iter().map(|o| flatten(&OperatorMatrix(o.0.transpose()))).collect(),
            phi_free: None,
        }
    }

    fn time(&self, idx: usize) -> f64 {
        idx as f64 * self.h
    }

    fn integrate(&self, t0: f64, t1: f64, x: &mut [C64], free: bool) -> Result<()> {
        let gen = self.gen;
        let block = self.d2;
        let f = |t: f64, y: &[C64], out: &mut [C64]| {
            if free {
                for (yb, ob) in y.chunks_exact(block).zip(out.chunks_exact_mut(block)) {
                    gen.apply_with_drive(0.0, yb, ob);
                }
            } else {
                gen.apply(t, y, out);
            }
        };
        let tol = Tolerances {
            h_max: (t1 - t0).min(self.tol.h_max),
            ..self.tol
        };
        let mut solver = DormandPrince::new(f, t0, x, tol);
        let y = solver.state_at(t1)?;
        x.copy_from_slice(y);
        Ok(())
    }

    /// Propagator of one interval starting at `t0`, as a d²×d² matrix.
    fn propagator(&self, t0: f64, free: bool) -> Result<DMatrix<C64>> {
        let n = self.d2;
        let chunks: Vec<usize> = (0..n).step_by(COLUMN_CHUNK).collect();
        let run = |&c0: &usize| -> Result<(usize, Vec<C64>)> {
            let c1 = (c0 + COLUMN_CHUNK).min(n);
            let mut x = vec![ZERO; (c1 - c0) * n];
            for (b, k) in (c0..c1).enumerate() {
                x[b * n + k] = C64::new(1.0, 0.0);
            }
            self.integrate(t0, t0 + self.h, &mut x, free)?;
            Ok((c0, x))
        };
        #[cfg(feature = "parallel")]
        let parts: Vec<Result<(usize, Vec<C64>)>> = {
            use rayon::prelude::*;
            chunks.par_iter().map(run).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<Result<(usize, Vec<C64>)>> = chunks.iter().map(run).collect();
        let mut phi = DMatrix::zeros(n, n);
        for part in parts {
            let (c0, x) = part?;
            for (b, col) in x.chunks_exact(n).enumerate() {
                phi.column_mut(c0 + b).copy_from_slice(col);
            }
        }
        Ok(phi)
    }

    fn free_propagator(&mut self) -> Result<&DMatrix<C64>> {
        if self.phi_free.is_none() {
            self.phi_free = Some(self.propagator(0.0, true)?);
        }
        Ok(self.phi_free.as_ref().unwrap())
    }

    fn matvec(phi: &DMatrix<C64>, x: &mut [C64], block: usize) {
        for xb in x.chunks_exact_mut(block) {
            let y = phi * DVector::from_column_slice(xb);
            xb.copy_from_slice(y.as_slice());
        }
    }

    fn record(&self, act: &Active, idx: usize, stride: usize, n_tau: usize, out: &mut [Vec<Vec<C64>>]) {
        let off = idx - act.start;
        if !off.is_multiple_of(stride) || off / stride >= n_tau {
            return;
        }
        let j = off / stride;
        for (b, obs) in self.observables.iter().enumerate() {
            if act.scale[b] == 0.0 {
                continue;
            }
            let xb = &act.x[b * self.d2..(b + 1) * self.d2];
            let v: C64 = obs.iter().zip(xb).map(|(o, x)| o * x).sum();
            out[act.row][b][j] = v * act.scale[b];
        }
    }

    fn step_rows(&self, i: usize, active: &mut [Active]) -> Result<()> {
        let t0 = self.time(i);
        let t1 = self.time(i + 1);
        let nblk = self.observables.len();
        let h = self.h;
        let run = |chunk: &mut [Active]| -> Result<()> {
            let mut x: Vec<C64> = chunk.iter().flat_map(|a| a.x.iter().cloned()).collect();
            self.integrate(t0, t1, &mut x, false).map_err(|e| Error::Propagation {
                t: chunk[0].start as f64 * h,
                tau: t1 - chunk[0].start as f64 * h,
                reason: e.to_string(),
            })?;
            for (a, xs) in chunk.iter_mut().zip(x.chunks_exact(nblk * self.d2)) {
                a.x.copy_from_slice(xs);
            }
            Ok(())
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            active.par_chunks_mut(ROW_CHUNK).try_for_each(run)
        }
        #[cfg(not(feature = "parallel"))]
        {
            active.chunks_mut(ROW_CHUNK).try_for_each(run)
        }
    }

    /// Runs all rows; returns values[row][observable][j] at lattice offsets j·stride.
    fn run(&mut self, mut rows: Vec<RowSpec>, stride: usize, n_tau: usize) -> Result<Vec<Vec<Vec<C64>>>> {
        let nblk = self.observables.len();
        let block = self.d2;
        let mut out = vec![vec![vec![ZERO; n_tau]; nblk]; rows.len()];
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&r| rows[r].start);
        let p_end = self.pumped.iter().rposition(|&p| p).map_or(0, |i| i + 1);

        let make_active = |row: usize, spec: &mut RowSpec| -> Active {
            let mut x = Vec::with_capacity(nblk * block);
            let mut scale = Vec::with_capacity(nblk);
            for b in spec.blocks.drain(..) {
                let m = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let s = if m > 0.0 && m.is_finite() { m } else { 0.0 };
                let inv = if s > 0.0 { 1.0 / s } else { 0.0 };
                x.extend(b.iter().map(|z| z * inv));
                scale.push(s);
            }
            Active {
                row,
                start: spec.start,
                x,
                scale,
            }
        };

        let mut next = 0;
        let mut active: Vec<Active> = Vec::new();
        for i in 0..p_end.min(self.n) {
            while next < order.len() && rows[order[next]].start == i {
                let r = order[next];
                let a = make_active(r, &mut rows[r]);
                self.record(&a, i, stride, n_tau, &mut out);
                active.push(a);
                next += 1;
            }
            // Rows that have already produced all their samples can leave.
            active.retain(|a| i - a.start < (n_tau - 1) * stride);
            if active.is_empty() {
                continue;
            }
            if self.pumped[i] {
                let n_blocks = active.len() * nblk;
                if n_blocks > block {
                    let phi = self.propagator(self.time(i), false)?;
                    for a in active.iter_mut() {
                        Self::matvec(&phi, &mut a.x, block);
                    }
                } else {
                    self.step_rows(i, &mut active)?;
                }
            } else {
                let phi = self.free_propagator()?.clone();
                for a in active.iter_mut() {
                    Self::matvec(&phi, &mut a.x, block);
                }
            }
            for a in &active {
                self.record(a, i + 1, stride, n_tau, &mut out);
            }
        }
        let here = p_end.min(self.n);
        let mut tail: Vec<(Active, usize)> = active.into_iter().map(|a| (a, here)).collect();
        while next < order.len() {
            let r = order[next];
            let start = rows[r].start;
            let a = make_active(r, &mut rows[r]);
            self.record(&a, start, stride, n_tau, &mut out);
            tail.push((a, start));
            next += 1;
        }
        if tail.is_empty() {
            return Ok(out);
        }
        // Heisenberg-picture vectors b_m = (Φᵀ)ᵐ vec(Oᵀ) for the pump-free tail.
        let max_m = tail.iter().map(|(_, s)| self.n - s).max().unwrap_or(0);
        let phi = self.free_propagator()?.clone();
        let mut heis: Vec<Vec<Vec<C64>>> = Vec::with_capacity(nblk);
        for obs in &self.observables {
            let mut v = Vec::with_capacity(max_m + 1);
            let mut b = DVector::from_column_slice(obs);
            v.push(obs.clone());
            for _ in 0..max_m {
                b = phi.tr_mul(&b);
                v.push(b.as_slice().to_vec());
            }
            heis.push(v);
        }
        for (a, s) in &tail {
            for m in 1..=(self.n - s) {
                let idx = s + m;
                let off = idx - a.start;
                if off % stride != 0 || off / stride >= n_tau {
                    continue;
                }
                let j = off / stride;
                for b in 0..nblk {
                    if a.scale[b] == 0.0 {
                        continue;
                    }
                    let xb = &a.x[b * block..(b + 1) * block];
                    let v: C64 = heis[b][m].iter().zip(xb).map(|(o, x)| o * x).sum();
                    out[a.row][b][j] = v * a.scale[b];
                }
            }
        }
        Ok(out)
    }
}

fn pumped_intervals(model: &SystemModel, h: f64, n: usize, cutoff: f64) -> Vec<bool> {
    let p = &model.pulse;
    if p.area == 0.0 {
        return vec![false; n];
    }
    let w = p.tau_p * (1.0 / cutoff.clamp(1e-300, 1.0)).ln().sqrt();
    let t_max = n as f64 * h;
    let centres: Vec<f64> = match model.pulse_period {
        None => vec![p.t_off],
        Some(period) => (0..)
            .map(|k| p.t_off + k as f64 * period)
            .take_while(|c| c - w <= t_max)
            .collect(),
    };
    (0..n)
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            centres.iter().any(|c| b >= c - w && a <= c + w)
        })
        .collect()
}

/// Lattice layout shared by a trajectory and a τ grid.
struct Layout {
    h: f64,
    n: usize,
    row_stride: usize,
    tau_stride: usize,
}

fn ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let k = r.round();
    ((r - k).abs() < 1e-6 * k.max(1.0) && k >= 1.0).then_some(k as usize)
}

fn uniform_tau(tau: &[f64]) -> Result<f64> {
    if tau.len() < 2 {
        return Err(Error::invalid("tau_grid", "need at least two samples"));
    }
    if tau[0].abs() > 1e-12 {
        return Err(Error::invalid("tau_grid", "must start at 0"));
    }
    let d = tau[1] - tau[0];
    if !(d > 0.0) {
        return Err(Error::invalid("tau_grid", "must be increasing"));
    }
    for (j, t) in tau.iter().enumerate() {
        if (t - j as f64 * d).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::invalid("tau_grid", "must be uniformly spaced"));
        }
    }
    Ok(d)
}

fn layout(traj: &Trajectory, dtau: f64) -> Result<Layout> {
    if traj.len() < 2 {
        return Err(Error::invalid("trajectory", "need at least two samples"));
    }
    let dt = traj.dt();
    if let Some(q) = ratio(dtau, dt) {
        Ok(Layout {
            h: dt,
            n: traj.len() - 1,
            row_stride: 1,
            tau_stride: q,
        })
    } else if let Some(r) = ratio(dt, dtau) {
        Ok(Layout {
            h: dtau,
            n: (traj.len() - 1) * r,
            row_stride: r,
            tau_stride: 1,
        })
    } else {
        Err(Error::invalid(
            "tau_grid",
            "τ spacing must be an integer multiple or divisor of the trajectory spacing",
        ))
    }
}

fn check_model(model: &SystemModel, traj: &Trajectory) -> Result<()> {
    model.validate()?;
    match traj.states.first() {
        Some(s) if s.dim() == model.space.dim() => Ok(()),
        Some(s) => Err(Error::DimensionMismatch {
            expected: model.space.dim(),
            got: s.dim(),
        }),
        None => Err(Error::invalid("trajectory", "empty")),
    }
}

fn g1_seed(rho: &DensityOperator, ad: &OperatorMatrix) -> Vec<C64> {
    flatten(&(rho.matrix() * ad))
}

fn g2_seed(rho: &DensityOperator, a: &OperatorMatrix, ad: &OperatorMatrix) -> Vec<C64> {
    flatten(&(&(a * rho.matrix()) * ad))
}

/// Runs the QRT on rows `row_indices` (trajectory samples) for the given observables.
fn qrt_rows(
    model: &SystemModel,
    traj: &Trajectory,
    lay: &Layout,
    row_indices: &[usize],
    n_tau: usize,
    seeds: &dyn Fn(&DensityOperator) -> Vec<Vec<C64>>,
    observables: &[OperatorMatrix],
    opts: &QrtOptions,
) -> Result<Vec<Vec<Vec<C64>>>> {
    let gen = Generator::new(model);
    let mut engine = Engine::new(&gen, lay.h, lay.n, observables, opts);
    let rows = row_indices
        .iter()
        .map(|&k| RowSpec {
            start: k * lay.row_stride,
            blocks: seeds(&traj.states[k]),
        })
        .collect();
    engine.run(rows, lay.tau_stride, n_tau)
}

/// G¹(t,τ) for every trajectory sample t and every τ in `tau_grid`.
///
/// Entries with t + τ beyond the trajectory window are zero.
pub fn qrt_g1(model: &SystemModel, traj: &Trajectory, tau_grid: &[f64]) -> Result<DMatrix<C64>> {
    check_model(model, traj)?;
    let lay = layout(traj, uniform_tau(tau_grid)?)?;
    let a = hilbert::annihilation(&model.space);
    let ad = a.adjoint();
    let rows: Vec<usize> = (0..traj.len()).collect();
    let vals = qrt_rows(
        model,
        traj,
        &lay,
        &rows,
        tau_grid.len(),
        &|rho| vec![g1_seed(rho, &ad)],
        std::slice::from_ref(&a),
        &QrtOptions::default(),
    )?;
    Ok(DMatrix::from_fn(rows.len(), tau_grid.len(), |i, j| vals[i][0][j]))
}

/// G²(t,τ) for every trajectory sample t and every τ in `tau_grid`.
pub fn qrt_g2(model: &SystemModel, traj: &Trajectory, tau_grid: &[f64]) -> Result<DMatrix<f64>> {
    check_model(model, traj)?;
    let lay = layout(traj, uniform_tau(tau_grid)?)?;
    let a = hilbert::annihilation(&model.space);
    let ad = a.adjoint();
    let n = hilbert::number(&model.space);
    let rows: Vec<usize> = (0..traj.len()).collect();
    let vals = qrt_rows(
        model,
        traj,
        &lay,
        &rows,
        tau_grid.len(),
        &|rho| vec![g2_seed(rho, &a, &ad)],
        &[n],
        &QrtOptions::default(),
    )?;
    let g2 = DMatrix::from_fn(rows.len(), tau_grid.len(), |i, j| vals[i][0][j].re);
    check_g2(&g2, &traj.times, tau_grid)?;
    Ok(g2)
}

fn check_g2(g2: &DMatrix<f64>, t: &[f64], tau: &[f64]) -> Result<()> {
    for i in 0..g2.nrows() {
        for j in 0..g2.ncols() {
            let v = g2[(i, j)];
            if !(v >= -G2_NEGATIVITY_TOL) {
                return Err(Error::Propagation {
                    t: t[i],
                    tau: tau[j],
                    reason: format!("G² = {v:e} is negative beyond tolerance"),
                });
            }
        }
    }
    Ok(())
}

/// Full correlation grid with `n_t` start times and `n_tau` delays, both
/// spanning the trajectory window.
///
/// The trajectory sample count minus one must be a multiple of both
/// `n_t − 1` and `n_tau − 1`.
pub fn correlation_grid(model: &SystemModel, traj: &Trajectory, n_t: usize, n_tau: usize) -> Result<CorrelationGrid> {
    correlation_grid_with(model, traj, n_t, n_tau, &QrtOptions::default())
}

pub fn correlation_grid_with(
    model: &SystemModel,
    traj: &Trajectory,
    n_t: usize,
    n_tau: usize,
    opts: &QrtOptions,
) -> Result<CorrelationGrid> {
    check_model(model, traj)?;
    if n_t < 2 || n_tau < 2 {
        return Err(Error::invalid("grid", "need at least two t and τ samples"));
    }
    let f = traj.len() - 1;
    if !f.is_multiple_of(n_t - 1) || !f.is_multiple_of(n_tau - 1) {
        return Err(Error::invalid(
            "grid",
            format!(
                "trajectory intervals ({f}) must be a multiple of n_t − 1 ({}) and n_tau − 1 ({})",
                n_t - 1,
                n_tau - 1
            ),
        ));
    }
    let s = f / (n_t - 1);
    let q = f / (n_tau - 1);
    let lay = Layout {
        h: traj.dt(),
        n: f,
        row_stride: s,
        tau_stride: q,
    };
    let a = hilbert::annihilation(&model.space);
    let ad = a.adjoint();
    let num = hilbert::number(&model.space);
    let row_idx: Vec<usize> = (0..n_t).collect();
    // Rows index the coarse t grid; map them to trajectory samples.
    let gen = Generator::new(model);
    let mut engine = Engine::new(&gen, lay.h, lay.n, &[a.clone(), num], opts);
    let rows = row_idx
        .iter()
        .map(|&k| {
            let rho = &traj.states[k * s];
            RowSpec {
                start: k * s,
                blocks: vec![g1_seed(rho, &ad), g2_seed(rho, &a, &ad)],
            }
        })
        .collect();
    let vals = engine.run(rows, q, n_tau)?;

    let t_samples: Vec<f64> = (0..n_t).map(|k| traj.times[k * s]).collect();
    let tau_samples: Vec<f64> = (0..n_tau).map(|j| traj.times[j * q] - traj.times[0]).collect();
    let inside = |k: usize, j: usize| k * s + j * q <= f;
    let g1 = DMatrix::from_fn(n_t, n_tau, |k, j| vals[k][0][j]);
    let g2 = DMatrix::from_fn(n_t, n_tau, |k, j| vals[k][1][j].re);
    check_g2(&g2, &t_samples, &tau_samples)?;
    let g2_pop = DMatrix::from_fn(n_t, n_tau, |k, j| {
        if inside(k, j) {
            traj.n_c[k * s] * traj.n_c[k * s + j * q]
        } else {
            0.0
        }
    });
    let a_mean_ttau = DMatrix::from_fn(n_t, n_tau, |k, j| {
        if inside(k, j) {
            traj.a_mean[k * s + j * q]
        } else {
            ZERO
        }
    });
    Ok(CorrelationGrid {
        a_mean_t: (0..n_t).map(|k| traj.a_mean[k * s]).collect(),
        t_samples,
        tau_samples,
        g1,
        g2,
        g2_pop,
        a_mean_ttau,
    })
}

/// G²_HOM(t,τ) = ½(G²_pop + G² − |G¹|²).
pub fn hom_correlation(grid: &CorrelationGrid) -> DMatrix<f64> {
    DMatrix::from_fn(grid.g1.nrows(), grid.g1.ncols(), |i, j| {
        0.5 * (grid.g2_pop[(i, j)] + grid.g2[(i, j)] - grid.g1[(i, j)].norm_sqr())
    })
}

/// D1, D2 and Ind from a grid spanning [0, T]×[0, T].
pub fn indistinguishability(grid: &CorrelationGrid, t_end: f64) -> Result<IndResult> {
    let span = grid.t_end() - grid.t_samples.first().copied().unwrap_or(0.0);
    let tau_span = grid.tau_samples.last().copied().unwrap_or(0.0);
    let tol = 1e-9 * t_end.abs().max(1.0);
    if (span - t_end).abs() > tol || (tau_span - t_end).abs() > tol {
        return Err(Error::invalid(
            "T",
            format!("grid spans t ∈ [0, {span}], τ ∈ [0, {tau_span}], expected [0, {t_end}]"),
        ));
    }
    let (m, k) = (grid.g1.nrows(), grid.g1.ncols());
    let coh = DMatrix::from_fn(m, k, |i, j| grid.g2_pop[(i, j)] - grid.g1[(i, j)].norm_sqr());
    let den = DMatrix::from_fn(m, k, |i, j| {
        2.0 * grid.g2_pop[(i, j)] - (grid.a_mean_t[i].conj() * grid.a_mean_ttau[(i, j)]).norm_sqr()
    });
    let (dt, dtau) = (grid.dt(), grid.dtau());
    let den = trapezoid_2d(&den, dt, dtau);
    if !(den > 0.0) || !den.is_finite() || den < 1e-300 {
        return Err(Error::Degenerate(format!(
            "normalization integral {den:e} vanishes (no emission)"
        )));
    }
    let d1 = trapezoid_2d(&coh, dt, dtau) / den;
    let d2 = trapezoid_2d(&grid.g2, dt, dtau) / den;
    Ok(IndResult::from_parts(d1, d2))
}

/// Result of the explicit pulse-train evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPulseResult {
    /// ∫dt∫dτ G²_HOM over the central peak, both τ signs.
    pub central: f64,
    /// ∫dt∫dτ G²_HOM over the peak at τ ≈ 2T.
    pub side: f64,
    pub ind: f64,
}

/// Indistinguishability from an explicit train of pulses spaced 2T apart,
/// normalising the central HOM peak by the side peak computed with the full
/// correlators rather than the single-pulse factorization.
///
/// `n_t` samples cover each window of length T.
pub fn two_pulse_indistinguishability(
    model: &SystemModel,
    t_end: f64,
    n_t: usize,
    dt_max: f64,
    opts: &QrtOptions,
) -> Result<TwoPulseResult> {
    if n_t < 2 {
        return Err(Error::invalid("n_t", "need at least two samples"));
    }
    let mut train = model.clone();
    train.pulse_period = Some(2.0 * t_end);
    let f = 3 * (n_t - 1);
    let grid = TimeGrid::new(3.0 * t_end, f + 1, dt_max)?;
    let tol = Tolerances {
        h_max: dt_max,
        ..Default::default()
    };
    let traj = evolve_with(&train, &grid, &DensityOperator::ground(&train.space), tol)?;
    let h = traj.dt();
    let a = hilbert::annihilation(&train.space);
    let ad = a.adjoint();
    let num = hilbert::number(&train.space);
    let gen = Generator::new(&train);
    let mut engine = Engine::new(&gen, h, f, &[a.clone(), num], opts);
    let rows = (0..n_t)
        .map(|k| {
            let rho = &traj.states[k];
            RowSpec {
                start: k,
                blocks: vec![g1_seed(rho, &ad), g2_seed(rho, &a, &ad)],
            }
        })
        .collect();
    let vals = engine.run(rows, 1, f + 1)?;
    let hom = |k: usize, j: usize| -> f64 {
        if k + j > f {
            return 0.0;
        }
        let pop = traj.n_c[k] * traj.n_c[k + j];
        0.5 * (pop + vals[k][1][j].re - vals[k][0][j].norm_sqr())
    };
    let wt = trapezoid_weights(n_t);
    let central_w = trapezoid_weights(n_t);
    let side_w = trapezoid_weights(2 * (n_t - 1) + 1);
    let mut central = 0.0;
    let mut side = 0.0;
    for k in 0..n_t {
        let mut c = 0.0;
        for (j, w) in central_w.iter().enumerate() {
            c += w * hom(k, j);
        }
        let mut s = 0.0;
        for (jj, w) in side_w.iter().enumerate() {
            s += w * hom(k, (n_t - 1) + jj);
        }
        central += wt[k] * c;
        side += wt[k] * s;
    }
    central *= 2.0 * h * h;
    side *= h * h;
    if !(side > 0.0) {
        return Err(Error::Degenerate("side peak vanishes (no emission)".into()));
    }
    Ok(TwoPulseResult {
        central,
        side,
        ind: 1.0 - central / side,
    })
}

/// Direct single-time ⟨a†a†aa⟩(t) from each trajectory state.
pub fn direct_g2_zero(model: &SystemModel, traj: &Trajectory) -> Vec<f64> {
    let a = hilbert::annihilation(&model.space);
    let ad = a.adjoint();
    let op = &(&ad * &ad) * &(&a * &a);
    traj.states
        .iter()
        .map(|rho| trace_product(&op, rho.matrix().0.as_slice()).re)
        .collect()
}
