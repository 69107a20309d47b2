//! Adaptive Dormand–Prince 5(4) integrator for complex-valued linear systems,
//! with the 4th-order continuous extension for output on arbitrary times.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
    /// Largest step the controller may take (ps).
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-8,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

/// Integrates `dy/dt = f(t, y)` forward in time.
///
/// `f` writes the derivative into its output slice (overwriting it).
pub struct DormandPrince<F>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    f: F,
    tol: Tolerances,
    t: f64,
    h: f64,
    y: Vec<C64>,
    k: [Vec<C64>; 7],
    scratch: Vec<C64>,
    y_new: Vec<C64>,
    // Dense output of the last accepted step [t_prev, t].
    t_prev: f64,
    h_last: f64,
    cont: [Vec<C64>; 5],
    has_step: bool,
    interp: Vec<C64>,
    fac_old: f64,
    steps: usize,
    rejected: usize,
}

impl<F> DormandPrince<F>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    pub fn new(f: F, t0: f64, y0: &[C64], tol: Tolerances) -> Self {
        let n = y0.len();
        let z = || vec![C64::new(0.0, 0.0); n];
        let mut s = Self {
            f,
            tol,
            t: t0,
            h: 0.0,
            y: y0.to_vec(),
            k: [z(), z(), z(), z(), z(), z(), z()],
            scratch: z(),
            y_new: z(),
            t_prev: t0,
            h_last: 0.0,
            cont: [z(), z(), z(), z(), z()],
            has_step: false,
            interp: z(),
            fac_old: 1e-4,
            steps: 0,
            rejected: 0,
        };
        (s.f)(t0, &s.y, &mut s.k[0]);
        s.h = s.initial_step();
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    fn weight(&self, a: C64, b: C64) -> f64 {
        self.tol.atol + self.tol.rtol * a.norm().max(b.norm())
    }

    fn initial_step(&self) -> f64 {
        let n = self.y.len().max(1) as f64;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (y, f) in self.y.iter().zip(&self.k[0]) {
            let sk = self.tol.atol + self.tol.rtol * y.norm();
            d0 += (y.norm() / sk).powi(2);
            d1 += (f.norm() / sk).powi(2);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h = if d1 < 1e-14 { self.tol.h_max } else { h };
        h.min(self.tol.h_max).max(1e-12)
    }

    fn stage(&mut self, idx: usize, c: f64, coeffs: &[(usize, f64)], h: f64) {
        for i in 0..self.y.len() {
            let mut acc = C64::new(0.0, 0.0);
            for &(j, a) in coeffs {
                acc += self.k[j][i] * a;
            }
            self.scratch[i] = self.y[i] + acc * h;
        }
        let (head, tail) = self.k.split_at_mut(idx);
        let _ = head;
        (self.f)(self.t + c * h, &self.scratch, &mut tail[0]);
    }

    /// Takes one accepted step (retrying internally on rejection).
    pub fn step(&mut self) -> Result<()> {
        loop {
            if self.steps + self.rejected >= self.tol.max_steps {
                return Err(Error::Integration {
                    t: self.t,
                    reason: format!("exceeded {} steps", self.tol.max_steps),
                });
            }
            let h = self.h.min(self.tol.h_max);
            if !(h > 0.0) || h < 1e-300 || !h.is_finite() {
                return Err(Error::Integration {
                    t: self.t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            self.stage(1, C2, &[(0, A21)], h);
            self.stage(2, C3, &[(0, A31), (1, A32)], h);
            self.stage(3, C4, &[(0, A41), (1, A42), (2, A43)], h);
            self.stage(4, C5, &[(0, A51), (1, A52), (2, A53), (3, A54)], h);
            self.stage(5, 1.0, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], h);
            for i in 0..self.y.len() {
                let k = &self.k;
                self.y_new[i] = self.y[i]
                    + (k[0][i] * A71 + k[2][i] * A73 + k[3][i] * A74 + k[4][i] * A75 + k[5][i] * A76) * h;
            }
            let (head, tail) = self.k.split_at_mut(6);
            let _ = head;
            (self.f)(self.t + h, &self.y_new, &mut tail[0]);

            let mut err = 0.0;
            let mut finite = true;
            for i in 0..self.y.len() {
                let k = &self.k;
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6
                    + k[6][i] * E7)
                    * h;
                let sk = self.weight(self.y[i], self.y_new[i]);
                let r = e.norm() / sk;
                finite &= r.is_finite();
                err += r * r;
            }
            if !finite {
                self.rejected += 1;
                self.h = h * FAC_MIN;
                continue;
            }
            let err = (err / self.y.len().max(1) as f64).sqrt();

            let expo = 0.2 - BETA * 0.75;
            let fac11 = err.powf(expo);
            let fac = (fac11 / self.fac_old.powf(BETA)) / SAFETY;
            let fac = fac.clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let h_new = h / fac;
            if err <= 1.0 {
                self.fac_old = err.max(1e-4);
                // Continuous extension.
                for i in 0..self.y.len() {
                    let k = &self.k;
                    let dy = self.y_new[i] - self.y[i];
                    let bspl = k[0][i] * h - dy;
                    self.cont[0][i] = self.y[i];
                    self.cont[1][i] = dy;
                    self.cont[2][i] = bspl;
                    self.cont[3][i] = dy - k[6][i] * h - bspl;
                    self.cont[4][i] = (k[0][i] * D1 + k[2][i] * D3 + k[3][i] * D4 + k[4][i] * D5
                        + k[5][i] * D6
                        + k[6][i] * D7)
                        * h;
                }
                self.t_prev = self.t;
                self.h_last = h;
                self.t += h;
                std::mem::swap(&mut self.y, &mut self.y_new);
                self.k.swap(0, 6);
                self.has_step = true;
                self.steps += 1;
                self.h = h_new.min(self.tol.h_max);
                return Ok(());
            }
            self.rejected += 1;
            self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }

    /// Solution at `t_out`, integrating forward as needed.
    ///
    /// `t_out` must not precede the start of the last accepted step.
    pub fn state_at(&mut self, t_out: f64) -> Result<&[C64]> {
        let tiny = 1e-12 * (1.0 + t_out.abs());
        if (t_out - self.t).abs() <= tiny {
            return Ok(&self.y);
        }
        while self.t < t_out {
            self.step()?;
        }
        if (t_out - self.t).abs() <= tiny {
            return Ok(&self.y);
        }
        if !self.has_step || t_out < self.t_prev - tiny {
            return Err(Error::Integration {
                t: t_out,
                reason: "dense output requested outside the last step".into(),
            });
        }
        let theta = (t_out - self.t_prev) / self.h_last;
        let theta1 = 1.0 - theta;
        for i in 0..self.y.len() {
            let c = &self.cont;
            self.interp[i] = c[0][i]
                + (c[1][i] + (c[2][i] + (c[3][i] + c[4][i] * theta1) * theta) * theta1) * theta;
        }
        Ok(&self.interp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_dense_output() {
        let lambda = C64::new(-1.3, 4.0);
        let f = move |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = lambda * y[0];
        let mut solver = DormandPrince::new(f, 0.0, &[C64::new(1.0, 0.0)], Tolerances::default());
        for i in 1..=40 {
            let t = i as f64 * 0.0731;
            let y = solver.state_at(t).unwrap()[0];
            let exact = (lambda * t).exp();
            assert!((y - exact).norm() < 1e-8, "t={t}: {y} vs {exact}");
        }
    }

    #[test]
    fn time_dependent_forcing() {
        // y' = cos t, y(0) = 0 → y = sin t
        let f = |t: f64, _y: &[C64], dy: &mut [C64]| dy[0] = C64::new(t.cos(), 0.0);
        let tol = Tolerances {
            h_max: 0.5,
            ..Default::default()
        };
        let mut solver = DormandPrince::new(f, 0.0, &[C64::new(0.0, 0.0)], tol);
        let y = solver.state_at(10.0).unwrap()[0];
        assert!((y.re - 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn stiff_decay_stays_stable() {
        let f = |_t: f64, y: &[C64], dy: &mut [C64]| {
            dy[0] = -2000.0 * y[0];
            dy[1] = -1.0 * y[1];
        };
        let y0 = [C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        let mut solver = DormandPrince::new(f, 0.0, &y0, Tolerances::default());
        let y = solver.state_at(3.0).unwrap().to_vec();
        assert!(y[0].norm() < 1e-9);
        assert!((y[1].re - (-3f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn step_limit_is_reported() {
        let f = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = -1e6 * y[0];
        let tol = Tolerances {
            max_steps: 10,
            ..Default::default()
        };
        let mut solver = DormandPrince::new(f, 0.0, &[C64::new(1.0, 0.0)], tol);
        assert!(matches!(solver.state_at(1.0), Err(Error::Integration { .. })));
    }
}
