//! Unit system: energies and rates in eV, times in ps.
//!
//! A rate `r` quoted in eV corresponds to `r / HBAR_EV_PS` in ps⁻¹.

/// Reduced Planck constant in eV·ps.
pub const HBAR_EV_PS: f64 = 6.582_119_569e-4;

/// Reduced Planck constant in eV·s (CODATA 2018).
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Reduced Planck constant in J·s.
pub const HBAR_J_S: f64 = 1.054_571_817e-34;

/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One Debye in C·m.
pub const DEBYE: f64 = 3.335_640_952e-30;

/// Converts a rate (or frequency) in eV to ps⁻¹.
#[inline]
pub fn ev_to_per_ps(rate_ev: f64) -> f64 {
    rate_ev / HBAR_EV_PS
}

/// Converts a rate in ps⁻¹ to eV.
#[inline]
pub fn per_ps_to_ev(rate: f64) -> f64 {
    rate * HBAR_EV_PS
}
