//! Physical constants (CODATA 2018 exact or recommended values).
//!
//! Pinned here so golden values are bit-reproducible across platforms.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, H/m.
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Electron gyromagnetic ratio γ_e/2π, Hz/T, rounded to the value used
/// throughout the color-center literature (28 GHz/T).
pub const GAMMA_E_OVER_2PI: f64 = 28.0e9;
/// Electron gyromagnetic ratio γ_e, rad/(s·T).
pub const GAMMA_E: f64 = 2.0 * PI * GAMMA_E_OVER_2PI;

/// Debye unit as tabulated alongside the color-center dipoles, C·m.
pub const DEBYE: f64 = 3.34e-30;

/// Refractive index of diamond.
pub const N_DIAMOND: f64 = 2.4;

/// Default transmission-line impedance, Ω.
pub const Z0_DEFAULT: f64 = 50.0;

/// Converts a frequency in Hz to angular frequency in rad/s.
#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

/// Converts angular frequency in rad/s to Hz.
#[inline]
pub fn rad_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Converts a vacuum wavelength to angular frequency.
#[inline]
pub fn wavelength_to_rad(lambda_m: f64) -> f64 {
    2.0 * PI * C_LIGHT / lambda_m
}

/// Converts millielectronvolts to joules.
#[inline]
pub fn mev_to_joule(e_mev: f64) -> f64 {
    e_mev * 1e-3 * E_CHARGE
}
