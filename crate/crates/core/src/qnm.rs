//! Classical quasinormal-mode quantities.
//!
//! Everything here is a pure function of scalar mode/emitter parameters or
//! of pre-sampled field data: the Drude permittivity, the single-mode
//! spectral function and Purcell spectrum, the effective mode volume, the
//! homogeneous-medium decay rate, and the photon normalization (S) factors
//! with the radiative/non-radiative beta split they imply.
//!
//! Frequencies and rates are in eV (ħω), see [`crate::units`].

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::{DEBYE, EPSILON_0, HBAR_EV_S, HBAR_J_S, SPEED_OF_LIGHT};

/// Local Drude model of a metal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeModel {
    /// Plasma frequency ħω_p (eV).
    pub omega_p: f64,
    /// Collision rate ħγ_p (eV).
    pub gamma_p: f64,
}

impl DrudeModel {
    /// Gold parameters used for the nanorod dimer.
    pub const GOLD: DrudeModel = DrudeModel {
        omega_p: 8.3081,
        gamma_p: 0.0928,
    };

    pub fn new(omega_p: f64, gamma_p: f64) -> Result<Self> {
        if !(omega_p > 0.0) {
            return Err(Error::invalid("omega_p", "plasma frequency must be > 0"));
        }
        if !(gamma_p >= 0.0) {
            return Err(Error::invalid("gamma_p", "collision rate must be >= 0"));
        }
        Ok(Self { omega_p, gamma_p })
    }
}

/// ε(ω) = 1 − ω_p² / (ω(ω + iγ_p)).
pub fn drude_permittivity(model: &DrudeModel, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "permittivity needs a positive frequency, got {omega}"
        )));
    }
    let denom = Complex64::new(omega, 0.0) * Complex64::new(omega, model.gamma_p);
    Ok(Complex64::new(1.0, 0.0) - model.omega_p * model.omega_p / denom)
}

/// A single quasinormal mode with complex frequency ω̃_c = ω_c − iκ/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnmMode {
    /// Real part of the QNM frequency (eV).
    pub omega_c: f64,
    /// Total decay rate, full width (eV).
    pub kappa: f64,
    /// Radiative fraction of the decay.
    pub beta_rad: f64,
    /// Photon normalization factor S.
    pub s_factor: f64,
    /// Emitter–mode coupling g (eV).
    pub g: f64,
    /// Background refractive index.
    pub n_b: f64,
}

impl QnmMode {
    /// Gold nanorod dimer mode (ω̃_c = 1.2067 − 0.0829i eV) with the
    /// coupling left at zero.
    pub const GOLD_DIMER: QnmMode = QnmMode {
        omega_c: 1.2067,
        kappa: 0.1658,
        beta_rad: 0.6,
        s_factor: 1.0,
        g: 0.0,
        n_b: 1.5,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) || !self.omega_c.is_finite() {
            return Err(Error::invalid("mode.omega_c", "must be > 0"));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::invalid("mode.kappa", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.beta_rad) {
            return Err(Error::invalid("mode.beta_rad", "must lie in [0, 1]"));
        }
        if !(self.s_factor > 0.0) {
            return Err(Error::invalid("mode.s_factor", "must be > 0"));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::invalid("mode.g", "must be finite and >= 0"));
        }
        if !(self.n_b > 0.0) {
            return Err(Error::invalid("mode.n_b", "must be > 0"));
        }
        if self.quality_factor() <= 0.5 {
            return Err(Error::invalid(
                "mode.kappa",
                format!(
                    "Q = {:.3} is too low for the resonance approximation (needs Q > 0.5)",
                    self.quality_factor()
                ),
            ));
        }
        Ok(())
    }

    pub fn complex_frequency(&self) -> Complex64 {
        Complex64::new(self.omega_c, -0.5 * self.kappa)
    }

    pub fn quality_factor(&self) -> f64 {
        self.omega_c / self.kappa
    }

    pub fn beta_nrad(&self) -> f64 {
        1.0 - self.beta_rad
    }

    pub fn kappa_rad(&self) -> f64 {
        self.beta_rad * self.kappa
    }

    pub fn kappa_nrad(&self) -> f64 {
        self.kappa - self.kappa_rad()
    }
}

/// Two-level emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emitter {
    /// Transition frequency ħω_a (eV).
    pub omega_a: f64,
    /// Dipole moment magnitude (Debye).
    pub dipole: f64,
    /// Background spontaneous-emission rate ħγ (eV).
    pub gamma: f64,
    /// Pure-dephasing rate ħγ′ (eV).
    pub gamma_prime: f64,
}

impl Emitter {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a > 0.0) {
            return Err(Error::invalid("emitter.omega_a", "must be > 0"));
        }
        if !(self.dipole >= 0.0) {
            return Err(Error::invalid("emitter.dipole", "must be >= 0"));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::invalid("emitter.gamma", "must be >= 0"));
        }
        if !(self.gamma_prime >= 0.0) {
            return Err(Error::invalid("emitter.gamma_prime", "must be >= 0"));
        }
        Ok(())
    }
}

/// A(ω) = ω / (2(ω̃_c − ω)).
pub fn spectral_function(mode: &QnmMode, omega: f64) -> Complex64 {
    Complex64::new(omega, 0.0) / (2.0 * (mode.complex_frequency() - omega))
}

/// Normalization for [`purcell_spectrum`]: the on-resonance value and the
/// (unnormalized) projected field product (n_d·f̃(r₀))² at the emitter.
///
/// Only the phase of `field_sq` affects the spectrum shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurcellAnchor {
    pub peak: f64,
    pub field_sq: Complex64,
}

impl Default for PurcellAnchor {
    fn default() -> Self {
        Self {
            peak: 1470.0,
            field_sq: Complex64::new(1.0, 0.0),
        }
    }
}

fn purcell_shape(mode: &QnmMode, field_sq: Complex64, omega: f64) -> f64 {
    // 6πc³/(ω³ n_B) with c³ folded into `field_sq`.
    6.0 * PI / (omega.powi(3) * mode.n_b) * (spectral_function(mode, omega) * field_sq).im
}

/// Single-QNM Purcell factor on a frequency grid, scaled so that
/// F_P(ω_c) equals `anchor.peak`.
pub fn purcell_spectrum(
    mode: &QnmMode,
    anchor: &PurcellAnchor,
    omega_grid: &[f64],
) -> Result<Vec<f64>> {
    mode.validate()?;
    if let Some(bad) = omega_grid.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Domain(format!(
            "Purcell spectrum needs positive frequencies, got {bad}"
        )));
    }
    let reference = purcell_shape(mode, anchor.field_sq, mode.omega_c);
    if !(reference.abs() > 0.0) || !reference.is_finite() {
        return Err(Error::Singular(
            "field phase gives no on-resonance enhancement".into(),
        ));
    }
    let scale = anchor.peak / reference;
    Ok(omega_grid
        .iter()
        .map(|&w| scale * purcell_shape(mode, anchor.field_sq, w))
        .collect())
}

/// V_eff = 1 / Re[ε(r₀) f̃²(r₀)], in whatever length³ unit the field uses.
pub fn effective_mode_volume(eps_at_emitter: Complex64, f_sq_at_emitter: Complex64) -> Result<f64> {
    let re = (eps_at_emitter * f_sq_at_emitter).re;
    if re.abs() < 1e-300 || !re.is_finite() {
        return Err(Error::Singular(
            "Re[eps * f^2] vanishes at the emitter".into(),
        ));
    }
    Ok(1.0 / re)
}

/// Homogeneous-medium spontaneous emission rate
/// γ = d²ω_a³n_B / (3πε₀ħc³), returned as ħγ in eV.
pub fn free_space_decay(emitter: &Emitter, n_b: f64) -> f64 {
    let d = emitter.dipole * DEBYE;
    let omega = emitter.omega_a / HBAR_EV_S;
    let rate = d * d * omega.powi(3) * n_b
        / (3.0 * PI * EPSILON_0 * HBAR_J_S * SPEED_OF_LIGHT.powi(3));
    rate * HBAR_EV_S
}

/// Inverts the bad-cavity relation γ^P = 4g²/κ: g = √(F_P γ κ / 4).
pub fn coupling_from_purcell(peak_purcell: f64, gamma: f64, kappa: f64) -> Result<f64> {
    if !(peak_purcell >= 0.0) {
        return Err(Error::invalid("peak_purcell", "must be >= 0"));
    }
    if !(gamma >= 0.0) || !(kappa > 0.0) {
        return Err(Error::invalid("gamma/kappa", "need gamma >= 0 and kappa > 0"));
    }
    Ok((peak_purcell * gamma * kappa / 4.0).sqrt())
}

/// Bad-cavity Purcell factor implied by a coupling: 4g²/(κγ).
pub fn purcell_from_coupling(g: f64, gamma: f64, kappa: f64) -> f64 {
    4.0 * g * g / (kappa * gamma)
}

/// One volume element inside the absorbing material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeSample {
    /// Volume element (m³).
    pub weight: f64,
    /// Im ε at ω_c.
    pub eps_imag: f64,
    /// |f̃|² (m⁻³).
    pub f_abs_sq: f64,
}

/// One area element of the far-field surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    /// Area element (m²).
    pub weight: f64,
    /// |F̃(s, ω_c)|² (m⁻³).
    pub f_abs_sq: f64,
}

/// Sampled QNM field data for the S-factor quadratures.
///
/// Weights are precomputed volume/area elements in SI units; an empty list
/// means that channel contributes nothing (e.g. a lossless resonator has no
/// volume samples).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldSamples {
    pub volume: Vec<VolumeSample>,
    pub surface: Vec<SurfaceSample>,
}

impl FieldSamples {
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.volume.iter().enumerate() {
            if !(s.weight > 0.0) || !(s.eps_imag >= 0.0) || !(s.f_abs_sq >= 0.0) {
                return Err(Error::invalid(
                    "volume_samples",
                    format!("row {i}: need weight > 0, eps_imag >= 0, f_abs_sq >= 0"),
                ));
            }
        }
        for (i, s) in self.surface.iter().enumerate() {
            if !(s.weight > 0.0) || !(s.f_abs_sq >= 0.0) {
                return Err(Error::invalid(
                    "surface_samples",
                    format!("row {i}: need weight > 0, F_abs_sq >= 0"),
                ));
            }
        }
        Ok(())
    }

    /// Reads `weight,eps_imag,f_abs_sq` rows.
    pub fn read_volume<R: Read>(reader: R) -> Result<Vec<VolumeSample>> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        check_header(rdr.headers()?, &["weight", "eps_imag", "f_abs_sq"])?;
        let mut out = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let v = parse_row(&rec, 3)?;
            out.push(VolumeSample {
                weight: v[0],
                eps_imag: v[1],
                f_abs_sq: v[2],
            });
        }
        Ok(out)
    }

    /// Reads `weight,F_abs_sq` rows.
    pub fn read_surface<R: Read>(reader: R) -> Result<Vec<SurfaceSample>> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        check_header(rdr.headers()?, &["weight", "F_abs_sq"])?;
        let mut out = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let v = parse_row(&rec, 2)?;
            out.push(SurfaceSample {
                weight: v[0],
                f_abs_sq: v[1],
            });
        }
        Ok(out)
    }

    pub fn from_csv_files(volume: &Path, surface: &Path) -> Result<Self> {
        let samples = FieldSamples {
            volume: Self::read_volume(std::fs::File::open(volume)?)?,
            surface: Self::read_surface(std::fs::File::open(surface)?)?,
        };
        samples.validate()?;
        Ok(samples)
    }

    pub fn write_volume<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["weight", "eps_imag", "f_abs_sq"])?;
        for s in &self.volume {
            wtr.write_record(&[
                format!("{:e}", s.weight),
                format!("{:e}", s.eps_imag),
                format!("{:e}", s.f_abs_sq),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_surface<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["weight", "F_abs_sq"])?;
        for s in &self.surface {
            wtr.write_record(&[format!("{:e}", s.weight), format!("{:e}", s.f_abs_sq)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::invalid(
            "csv header",
            format!("expected `{}`, found `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn parse_row(rec: &csv::StringRecord, n: usize) -> Result<Vec<f64>> {
    if rec.len() != n {
        return Err(Error::invalid(
            "csv row",
            format!("expected {n} columns, found {}", rec.len()),
        ));
    }
    rec.iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| Error::invalid("csv value", format!("`{s}`: {e}")))
        })
        .collect()
}

/// Resonance-approximated S factors and the beta split they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SFactors {
    pub s_nrad: f64,
    pub s_rad: f64,
    pub s: f64,
    pub beta_rad: f64,
    pub beta_nrad: f64,
}

/// S^nrad = Q Σ w ε_I |f̃|², S^rad = (n_B c/κ) Σ w |F̃|².
///
/// κ is converted to an angular rate so that c/κ is a length in metres.
pub fn s_factors(samples: &FieldSamples, mode: &QnmMode) -> Result<SFactors> {
    samples.validate()?;
    if !(mode.kappa > 0.0) || !(mode.omega_c > 0.0) {
        return Err(Error::invalid("mode", "need omega_c > 0 and kappa > 0"));
    }
    let absorbed: f64 = samples
        .volume
        .iter()
        .map(|s| s.weight * s.eps_imag * s.f_abs_sq)
        .sum();
    let radiated: f64 = samples.surface.iter().map(|s| s.weight * s.f_abs_sq).sum();
    let s_nrad = mode.quality_factor() * absorbed;
    let length = SPEED_OF_LIGHT * HBAR_EV_S / mode.kappa;
    let s_rad = mode.n_b * length * radiated;
    let s = s_nrad + s_rad;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Degenerate("S = S_rad + S_nrad vanishes".into()));
    }
    let beta_rad = s_rad / s;
    Ok(SFactors {
        s_nrad,
        s_rad,
        s,
        beta_rad,
        beta_nrad: 1.0 - beta_rad,
    })
}

/// Geometry and targets for [`synthetic_dimer_samples`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerGeometry {
    /// Rod length (m).
    pub rod_length: f64,
    /// Rod radius (m).
    pub rod_radius: f64,
    /// Gap between rod tips (m).
    pub gap: f64,
    /// Radius of the far-field sphere (m).
    pub far_radius: f64,
    /// S^nrad the continuum profile integrates to.
    pub target_s_nrad: f64,
    /// S^rad the continuum profile integrates to.
    pub target_s_rad: f64,
    /// Mesh cells along each axis (rings, angles, slices).
    pub resolution: usize,
}

impl Default for DimerGeometry {
    fn default() -> Self {
        Self {
            rod_length: 100e-9,
            rod_radius: 15e-9,
            gap: 20e-9,
            far_radius: 10e-6,
            target_s_nrad: 0.40,
            target_s_rad: 0.56,
            resolution: 24,
        }
    }
}

/// Builds a mesh of field samples for a two-rod metal dimer.
///
/// Inside each rod |f̃|² follows sin²(πz/L) along the axis and is uniform
/// across the section; the far field is a dipole pattern |F̃|² ∝ sin²θ on a
/// sphere. Amplitudes are fixed from the closed-form continuum integrals so
/// the quadratures should land on the targets up to mesh error.
pub fn synthetic_dimer_samples(
    geometry: &DimerGeometry,
    drude: &DrudeModel,
    mode: &QnmMode,
) -> Result<FieldSamples> {
    let n = geometry.resolution.max(2);
    let eps_imag = drude_permittivity(drude, mode.omega_c)?.im;
    let l = geometry.rod_length;
    let r = geometry.rod_radius;

    // Continuum: Q ε_I A (2 rods · πr² · L/2) = target.
    let amp_volume =
        geometry.target_s_nrad / (mode.quality_factor() * eps_imag * PI * r * r * l);
    let mut volume = Vec::with_capacity(2 * n * n * n);
    let (dr, dphi, dz) = (r / n as f64, 2.0 * PI / n as f64, l / n as f64);
    for _rod in 0..2 {
        for ir in 0..n {
            let (r0, r1) = (ir as f64 * dr, (ir + 1) as f64 * dr);
            let area = 0.5 * (r1 * r1 - r0 * r0) * dphi;
            for _ip in 0..n {
                for iz in 0..n {
                    let z = (iz as f64 + 0.5) * dz;
                    let profile = (PI * z / l).sin().powi(2);
                    volume.push(VolumeSample {
                        weight: area * dz,
                        eps_imag,
                        f_abs_sq: amp_volume * profile,
                    });
                }
            }
        }
    }

    // Continuum: n_B (c/κ) B R² (8π/3) = target, with |F̃|² = B sin²θ.
    let length = SPEED_OF_LIGHT * HBAR_EV_S / mode.kappa;
    let big_r = geometry.far_radius;
    let amp_surface =
        geometry.target_s_rad / (mode.n_b * length * big_r * big_r * 8.0 * PI / 3.0);
    let n_theta = 2 * n;
    let dtheta = PI / n_theta as f64;
    let n_phi = 2 * n;
    let dphi_s = 2.0 * PI / n_phi as f64;
    let mut surface = Vec::with_capacity(n_theta * n_phi);
    for it in 0..n_theta {
        let (t0, t1) = (it as f64 * dtheta, (it + 1) as f64 * dtheta);
        let band = big_r * big_r * (t0.cos() - t1.cos()) * dphi_s;
        let theta = 0.5 * (t0 + t1);
        for _ip in 0..n_phi {
            surface.push(SurfaceSample {
                weight: band,
                f_abs_sq: amp_surface * theta.sin().powi(2),
            });
        }
    }
    Ok(FieldSamples { volume, surface })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mode() -> QnmMode {
        QnmMode::GOLD_DIMER
    }

    #[test]
    fn drude_high_frequency_limit() {
        let eps = drude_permittivity(&DrudeModel::GOLD, 1e6).unwrap();
        assert!((eps - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn drude_gold_at_resonance() {
        let eps = drude_permittivity(&DrudeModel::GOLD, 1.2067).unwrap();
        // Independent evaluation: real/imag parts written out by hand.
        let (wp, gp, w) = (8.3081f64, 0.0928f64, 1.2067f64);
        let re = 1.0 - wp * wp / (w * w + gp * gp);
        let im = wp * wp * gp / (w * (w * w + gp * gp));
        assert_relative_eq!(eps.re, re, epsilon = 1e-12);
        assert_relative_eq!(eps.im, im, epsilon = 1e-12);
        assert!((eps.re - -46.13).abs() < 0.01, "{eps}");
        assert!((eps.im - 3.62).abs() < 0.01, "{eps}");
    }

    #[test]
    fn drude_vanishes_at_plasma_frequency_when_lossless() {
        let m = DrudeModel::new(8.3081, 0.0).unwrap();
        let eps = drude_permittivity(&m, 8.3081).unwrap();
        assert!(eps.norm() < 1e-12);
    }

    #[test]
    fn drude_rejects_non_positive_frequency() {
        assert!(matches!(
            drude_permittivity(&DrudeModel::GOLD, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(drude_permittivity(&DrudeModel::GOLD, -1.0).is_err());
    }

    #[test]
    fn spectral_function_values() {
        let m = mode();
        assert_eq!(spectral_function(&m, 0.0), Complex64::new(0.0, 0.0));
        let at_peak = spectral_function(&m, m.omega_c);
        assert!(at_peak.re.abs() < 1e-12);
        assert!((at_peak.im - 7.278).abs() < 0.01);
        let w = m.omega_c + m.kappa / 2.0;
        let a = spectral_function(&m, w);
        // |ω̃_c − ω|² = (κ/2)² + (κ/2)² = κ²/2
        assert_relative_eq!(a.norm_sqr(), w * w / (2.0 * m.kappa * m.kappa), max_relative = 1e-12);
    }

    #[test]
    fn purcell_peak_and_tails() {
        let m = mode();
        let anchor = PurcellAnchor::default();
        let w = [m.omega_c, 10.0 * m.omega_c];
        let fp = purcell_spectrum(&m, &anchor, &w).unwrap();
        assert_relative_eq!(fp[0], 1470.0, max_relative = 1e-14);
        assert!(fp[1].abs() < 0.01 * 1470.0);
    }

    #[test]
    fn purcell_half_width_asymmetry() {
        // Frozen from the closed form peak·ω_c²(κ/2)²/(ω²((ω_c−ω)²+(κ/2)²))
        // for a real field product: the ω⁻² prefactor skews the profile.
        let m = mode();
        let w = [m.omega_c - m.kappa / 2.0, m.omega_c + m.kappa / 2.0];
        let fp = purcell_spectrum(&m, &PurcellAnchor::default(), &w).unwrap();
        let ratio_low = fp[0] / 735.0;
        let ratio_high = fp[1] / 735.0;
        assert_relative_eq!(ratio_low, (1.2067f64 / 1.1238).powi(2), max_relative = 1e-12);
        assert_relative_eq!(ratio_high, (1.2067f64 / 1.2896).powi(2), max_relative = 1e-12);
        assert!((ratio_high - 1.0).abs() < 0.15);
        assert!((ratio_low - 1.0).abs() < 0.16);
    }

    #[test]
    fn purcell_rejects_bad_grid() {
        let r = purcell_spectrum(&mode(), &PurcellAnchor::default(), &[1.0, 0.0]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn mode_volume_cases() {
        let one = Complex64::new(1.0, 0.0);
        assert_relative_eq!(effective_mode_volume(one, one).unwrap(), 1.0);
        let v = effective_mode_volume(Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.5)).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-15);
        assert!(matches!(
            effective_mode_volume(one, Complex64::new(0.0, 3.0)),
            Err(Error::Singular(_))
        ));
    }

    fn dimer_emitter(d: f64) -> Emitter {
        Emitter {
            omega_a: 1.2067,
            dipole: d,
            gamma: 0.0,
            gamma_prime: 0.0,
        }
    }

    #[test]
    fn free_space_decay_values() {
        assert_eq!(free_space_decay(&dimer_emitter(0.0), 1.5), 0.0);
        let gamma = free_space_decay(&dimer_emitter(30.0), 1.5);
        assert!((gamma - 2.57e-7).abs() < 0.01e-7, "{gamma}");
        let per_s = gamma / HBAR_EV_S;
        assert!((per_s - 3.90e8).abs() < 0.01e8);
        let tau_p = crate::units::HBAR_EV_PS / (1470.0 * gamma);
        assert!((tau_p - 1.76).abs() / 1.76 < 0.02, "{tau_p}");
        let doubled = free_space_decay(&dimer_emitter(60.0), 1.5);
        assert_relative_eq!(doubled, 4.0 * gamma, max_relative = 1e-12);
    }

    #[test]
    fn coupling_from_purcell_values() {
        let kappa = 0.1658;
        let g = coupling_from_purcell(1470.0, 2.57e-7, kappa).unwrap();
        assert!((g - 3.96e-3).abs() < 0.01e-3, "{g}");
        assert!((2.0 * g / kappa - 0.0475).abs() / 0.0475 < 0.02);
        let g100 = coupling_from_purcell(147_000.0, 2.57e-7, kappa).unwrap();
        assert_relative_eq!(g100 / g, 10.0, max_relative = 1e-12);
        assert!((2.0 * g100 / kappa - 0.475).abs() / 0.475 < 0.02);
        assert_eq!(coupling_from_purcell(0.0, 2.57e-7, kappa).unwrap(), 0.0);
    }

    #[test]
    fn s_factors_lossless_resonator() {
        let samples = FieldSamples {
            volume: vec![],
            surface: vec![SurfaceSample {
                weight: 1e-12,
                f_abs_sq: 1e18,
            }],
        };
        let s = s_factors(&samples, &mode()).unwrap();
        assert_eq!(s.beta_rad, 1.0);
        assert_eq!(s.beta_nrad, 0.0);
        assert_eq!(s.s_nrad, 0.0);
    }

    #[test]
    fn s_factors_uniform_half_half() {
        let m = mode();
        let length = SPEED_OF_LIGHT * HBAR_EV_S / m.kappa;
        // Four equal cells each; by hand: Q·4·w·ε·f = 0.5, n_B·c/κ·4·w·F = 0.5.
        let w_v = 1e-24;
        let f_v = 0.5 / (m.quality_factor() * 4.0 * w_v * 2.0);
        let w_s = 1e-12;
        let f_s = 0.5 / (m.n_b * length * 4.0 * w_s);
        let samples = FieldSamples {
            volume: vec![
                VolumeSample {
                    weight: w_v,
                    eps_imag: 2.0,
                    f_abs_sq: f_v
                };
                4
            ],
            surface: vec![
                SurfaceSample {
                    weight: w_s,
                    f_abs_sq: f_s
                };
                4
            ],
        };
        let s = s_factors(&samples, &m).unwrap();
        assert_relative_eq!(s.s, 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.beta_rad, 0.5, max_relative = 1e-12);
        assert_relative_eq!(s.beta_nrad, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn s_factors_degenerate() {
        let r = s_factors(&FieldSamples::default(), &mode());
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn synthetic_dimer_hits_targets() {
        let samples =
            synthetic_dimer_samples(&DimerGeometry::default(), &DrudeModel::GOLD, &mode()).unwrap();
        let s = s_factors(&samples, &mode()).unwrap();
        assert!((s.s_nrad - 0.40).abs() < 0.02, "{s:?}");
        assert!((s.s_rad - 0.56).abs() < 0.025, "{s:?}");
        assert!((s.beta_rad - 0.58).abs() < 0.03);
    }

    #[test]
    fn field_samples_csv_roundtrip() {
        let samples =
            synthetic_dimer_samples(&DimerGeometry { resolution: 3, ..Default::default() }, &DrudeModel::GOLD, &mode())
                .unwrap();
        let mut vbuf = Vec::new();
        let mut sbuf = Vec::new();
        samples.write_volume(&mut vbuf).unwrap();
        samples.write_surface(&mut sbuf).unwrap();
        let back = FieldSamples {
            volume: FieldSamples::read_volume(vbuf.as_slice()).unwrap(),
            surface: FieldSamples::read_surface(sbuf.as_slice()).unwrap(),
        };
        let a = s_factors(&samples, &mode()).unwrap();
        let b = s_factors(&back, &mode()).unwrap();
        assert_relative_eq!(a.s, b.s, max_relative = 1e-12);
    }

    #[test]
    fn csv_header_is_checked() {
        let r = FieldSamples::read_volume("w,eps,f\n1,2,3\n".as_bytes());
        assert!(r.is_err());
        let r = FieldSamples::read_surface("weight,F_abs_sq\n1,x\n".as_bytes());
        assert!(r.is_err());
    }
}
