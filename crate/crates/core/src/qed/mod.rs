//! Cavity-QED reflection spectra and spin-photon entangling schemes.

mod schemes;
mod waveform;

pub use schemes::{
    amplitude_scheme, onoff_leading_order, onoff_scheme, pushpull_detuning,
    pushpull_leading_order, pushpull_params, pushpull_scheme, AmplitudeReport, Scheme,
    SchemeResult,
};
pub use waveform::{
    reflection_second_derivative, spectral_moments, waveform_fidelity_exact,
    waveform_fidelity_taylor, Pulse, ReflectionBranch, Spectrum, SpectrumOptions,
};

use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A two-level emitter coupled to a single-sided optical cavity.
///
/// All rates and frequencies are angular (rad/s). Loss rates are amplitude
/// decay rates in the convention of the reflection formula used here, so
/// the total field decay is `kappa_c + kappa_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityAtomParams {
    pub g: f64,
    pub kappa_c: f64,
    pub kappa_i: f64,
    pub gamma: f64,
    pub omega_c: f64,
    pub omega_a: f64,
}

impl CavityAtomParams {
    pub fn new(
        g: f64,
        kappa_c: f64,
        kappa_i: f64,
        gamma: f64,
        omega_c: f64,
        omega_a: f64,
    ) -> Result<Self> {
        let p = Self { g, kappa_c, kappa_i, gamma, omega_c, omega_a };
        p.validate()?;
        Ok(p)
    }

    /// Resonant emitter at critical coupling with a target cooperativity
    /// `C = g²/(κγ)`.
    pub fn critical_from_cooperativity(c: f64, kappa: f64, gamma: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(Error::domain("cooperativity must be non-negative"));
        }
        let g = (c * kappa * gamma).sqrt();
        Self::new(g, 0.5 * kappa, 0.5 * kappa, gamma, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g", self.g),
            ("kappa_c", self.kappa_c),
            ("kappa_i", self.kappa_i),
            ("gamma", self.gamma),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.omega_c.is_finite() || !self.omega_a.is_finite() {
            return Err(Error::domain("resonance frequencies must be finite"));
        }
        if self.kappa() <= 0.0 {
            return Err(Error::domain("total cavity loss kappa_c + kappa_i must be > 0"));
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_c + self.kappa_i
    }

    /// Emitter-cavity detuning `ω_a − ω_c`.
    pub fn detuning(&self) -> f64 {
        self.omega_a - self.omega_c
    }

    /// `C = g²/(κγ)`; infinite when γ = 0 and g > 0.
    pub fn cooperativity(&self) -> f64 {
        cooperativity_ratio(self.g, self.kappa(), self.gamma)
    }

    /// Cooperativity defined with the external coupling only, `g²/(κ_c γ)`.
    pub fn coupling_cooperativity(&self) -> f64 {
        cooperativity_ratio(self.g, self.kappa_c, self.gamma)
    }

    /// Same cavity with the emitter removed (g = 0).
    pub fn empty_cavity(&self) -> Self {
        Self { g: 0.0, ..*self }
    }
}

fn cooperativity_ratio(g: f64, kappa: f64, gamma: f64) -> f64 {
    let g2 = g * g;
    if g2 == 0.0 {
        0.0
    } else {
        g2 / (kappa * gamma)
    }
}

/// Complex reflection coefficient together with its power reflectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub r: Complex64,
    pub big_r: f64,
}

/// Reflection off the cavity at carrier frequency `omega`:
/// `r = 1 − 2κ_c / (i(ω−ω_c) + κ + g²/(i(ω−ω_a) + γ))`.
pub fn reflectivity(omega: f64, p: &CavityAtomParams) -> Result<Reflection> {
    reflectivity_with_inversion(omega, p, -1.0)
}

/// Mean-field reflection with the atomic term weighted by the population
/// inversion `⟨σ_z⟩`. `sigma_z = −1` is the weakly driven two-level result.
pub fn reflectivity_with_inversion(
    omega: f64,
    p: &CavityAtomParams,
    sigma_z: f64,
) -> Result<Reflection> {
    let i = Complex64::i();
    let cavity = i * (omega - p.omega_c) + p.kappa();
    let coupling = -p.g * p.g * sigma_z;
    let denom = if coupling == 0.0 {
        cavity
    } else {
        let atom = i * (omega - p.omega_a) + p.gamma;
        if atom == Complex64::new(0.0, 0.0) {
            return Err(Error::domain("singular response"));
        }
        cavity + coupling / atom
    };
    if denom.norm() == 0.0 || !denom.is_finite() {
        return Err(Error::domain("singular response"));
    }
    let r = Complex64::new(1.0, 0.0) - 2.0 * p.kappa_c / denom;
    Ok(Reflection { r, big_r: r.norm_sqr() })
}
