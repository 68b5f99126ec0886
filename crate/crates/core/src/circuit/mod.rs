//! Lumped-element microwave resonator analysis.
//!
//! The resonator is a parallel LC circuit capacitively coupled (C_k) to a
//! line of impedance Z₀. Its zero-point current fluctuations follow either
//! from the closed form `δI = ω_R √(ℏ/2Z)` or, without assuming a lumped
//! model, from the spectrum of the current-current susceptibility
//! `χ_II = I_L/I⁺` obtained from a sampled frequency response.

mod response;

pub use response::{synth_response, FrequencyResponse, ResponseSample};

use crate::constants::{HBAR, K_B, Z0_DEFAULT};
use crate::numeric::{argmax, trapezoid};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Resonator described both by (L, C) and by (ω_R, Z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorParams {
    pub omega_r: f64,
    pub z: f64,
    pub l: f64,
    pub c: f64,
    pub z0: f64,
    pub c_k: f64,
}

const CONSISTENCY_TOL: f64 = 1e-12;

impl ResonatorParams {
    pub fn from_lc(l: f64, c: f64, c_k: f64) -> Result<Self> {
        let p = Self {
            omega_r: 1.0 / (l * c).sqrt(),
            z: (l / c).sqrt(),
            l,
            c,
            z0: Z0_DEFAULT,
            c_k,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_omega_z(omega_r: f64, z: f64, c_k: f64) -> Result<Self> {
        let p = Self {
            omega_r,
            z,
            l: z / omega_r,
            c: 1.0 / (omega_r * z),
            z0: Z0_DEFAULT,
            c_k,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_z0(mut self, z0: f64) -> Result<Self> {
        self.z0 = z0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_r", self.omega_r),
            ("z", self.z),
            ("l", self.l),
            ("c", self.c),
            ("z0", self.z0),
            ("c_k", self.c_k),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("resonator {name} must be finite and > 0")));
            }
        }
        let omega = 1.0 / (self.l * self.c).sqrt();
        let z = (self.l / self.c).sqrt();
        if (omega / self.omega_r - 1.0).abs() > CONSISTENCY_TOL
            || (z / self.z - 1.0).abs() > CONSISTENCY_TOL
        {
            return Err(Error::domain("(omega_r, z) inconsistent with (l, c)"));
        }
        Ok(())
    }

    /// Resonance pulled down by the coupling capacitor, `ω_R/√(1 + C_k/C)`.
    pub fn loaded_resonance(&self) -> f64 {
        self.omega_r / (1.0 + self.c_k / self.c).sqrt()
    }

    /// Loaded quality factor of the capacitively coupled resonator,
    /// `2/(L′C′²)` with `L′ = ω_R L/Z₀`, `C′ = ω_R Z₀ C_k`.
    pub fn quality_factor(&self) -> f64 {
        let (lp, cp) = self.dimensionless();
        2.0 / (lp * cp * cp)
    }

    fn dimensionless(&self) -> (f64, f64) {
        (self.omega_r * self.l / self.z0, self.omega_r * self.z0 * self.c_k)
    }
}

/// `δI = ω_R √(ℏ/2Z)`.
pub fn zero_point_current_lc(omega_r: f64, z: f64) -> Result<f64> {
    if !(omega_r > 0.0) || !(z > 0.0) {
        return Err(Error::domain("omega_r and z must be > 0"));
    }
    Ok(omega_r * (HBAR / (2.0 * z)).sqrt())
}

/// Susceptibility `χ_II` sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledChi {
    pub omega: Vec<f64>,
    pub chi: Vec<Complex64>,
}

impl SampledChi {
    /// Multiplies every sample by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            omega: self.omega.clone(),
            chi: self.chi.iter().map(|c| c * factor).collect(),
        }
    }

    /// Frequency of the |χ| maximum, refined by a parabola through the three
    /// samples around the discrete peak.
    pub fn peak_omega(&self) -> Option<f64> {
        let mag: Vec<f64> = self.chi.iter().map(|c| c.norm_sqr()).collect();
        let i = argmax(&mag)?;
        if i == 0 || i + 1 == mag.len() {
            return Some(self.omega[i]);
        }
        let (x0, x1, x2) = (self.omega[i - 1], self.omega[i], self.omega[i + 1]);
        let (y0, y1, y2) = (mag[i - 1], mag[i], mag[i + 1]);
        let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
        let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
        let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
        if a >= 0.0 {
            return Some(x1);
        }
        Some((-b / (2.0 * a)).clamp(x0, x2))
    }
}

/// `χ_II = (I_L/I_in)(1 − S₁₁)` at every sample.
pub fn chi_from_response(fr: &FrequencyResponse) -> SampledChi {
    let (omega, chi) = fr
        .samples()
        .iter()
        .map(|s| (s.omega, s.current_ratio * (Complex64::new(1.0, 0.0) - s.s11)))
        .unzip();
    SampledChi { omega, chi }
}

/// Options for [`integrate_zero_point`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegrationOptions {
    /// Add Lorentzian `1/Δω²` tails beyond both sweep edges.
    pub tail_extrapolation: bool,
}

/// Zero-point current estimate from a sampled susceptibility.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPointEstimate {
    /// δI in amperes.
    pub delta_i: f64,
    /// Frequency of the |χ| maximum (rad/s).
    pub peak_omega: f64,
    /// `|χ|_max / max(|χ(first)|, |χ(last)|)`.
    pub peak_to_edge: f64,
    pub warnings: Vec<String>,
}

const PEAK_TO_EDGE_MIN: f64 = 100.0;

/// `δI² = (ℏω_R/2Z₀) ∫ 2|χ_II(ω)|² dω/2π` by the trapezoidal rule.
///
/// The sweep covers the positive-frequency resonance; its integral is the
/// full spectral weight of the mode and the factor 2 accounts for the
/// fluctuations entering from the second port.
pub fn integrate_zero_point(
    chi: &SampledChi,
    omega_r: f64,
    z0: f64,
    opts: IntegrationOptions,
) -> Result<ZeroPointEstimate> {
    if chi.omega.len() < 2 || chi.omega.len() != chi.chi.len() {
        return Err(Error::input("no samples"));
    }
    if !(omega_r > 0.0) || !(z0 > 0.0) {
        return Err(Error::domain("omega_r and z0 must be > 0"));
    }
    let mag2: Vec<f64> = chi.chi.iter().map(|c| c.norm_sqr()).collect();
    let peak = argmax(&mag2).ok_or_else(|| Error::input("susceptibility is not finite"))?;
    let n = mag2.len();
    if peak == 0 || peak == n - 1 {
        return Err(Error::input("resonance outside sweep"));
    }
    let peak_omega = chi.peak_omega().unwrap_or(chi.omega[peak]);

    let edge = mag2[0].max(mag2[n - 1]).sqrt();
    let peak_to_edge = if edge == 0.0 { f64::INFINITY } else { mag2[peak].sqrt() / edge };
    let mut warnings = Vec::new();
    if peak_to_edge < PEAK_TO_EDGE_MIN {
        let msg = format!(
            "susceptibility peak-to-edge ratio {peak_to_edge:.1} below {PEAK_TO_EDGE_MIN}; tails may be truncated"
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let integrand: Vec<f64> = mag2.iter().map(|m| 2.0 * m).collect();
    let mut integral = trapezoid(&chi.omega, &integrand);
    if opts.tail_extrapolation {
        let left = (peak_omega - chi.omega[0]).max(0.0);
        let right = (chi.omega[n - 1] - peak_omega).max(0.0);
        integral += 2.0 * (mag2[0] * left + mag2[n - 1] * right);
    }
    let delta_i2 = HBAR * omega_r / (2.0 * z0) * integral / (2.0 * PI);
    Ok(ZeroPointEstimate {
        delta_i: delta_i2.sqrt(),
        peak_omega,
        peak_to_edge,
        warnings,
    })
}

/// Lumped (L, C) consistent with a measured `δI` and `ω_R`:
/// `C = 2δI²/(ℏω_R³)`, `L = (ℏ/2) ω_R/δI²`.
pub fn extract_circuit_params(delta_i: f64, omega_r: f64) -> Result<(f64, f64)> {
    if !(delta_i > 0.0) || !(omega_r > 0.0) {
        return Err(Error::domain("delta_i and omega_r must be > 0"));
    }
    let di2 = delta_i * delta_i;
    let c = 2.0 * di2 / (HBAR * omega_r.powi(3));
    let l = 0.5 * HBAR * omega_r / di2;
    Ok((l, c))
}

/// Closed-form `χ_II(ω)` of the capacitively coupled LC resonator.
///
/// In the dimensionless variables `ω′ = ω/ω_R`, `C′ = ω_R Z₀ C_k`,
/// `L′ = ω_R L/Z₀`:
/// `χ_II = 2ω′C′ / (−2i + ω′C′ + 2iω′²(1+L′C′) − ω′³C′)`,
/// with the sign fixed by the impedance network used in [`synth_response`].
pub fn analytic_chi(omega: f64, p: &ResonatorParams) -> Complex64 {
    let (lp, cp) = p.dimensionless();
    let w = omega / p.omega_r;
    let i = Complex64::i();
    let denom = -2.0 * i + w * cp + 2.0 * i * w * w * (1.0 + lp * cp) - w * w * w * cp;
    Complex64::new(2.0 * w * cp, 0.0) / denom
}

/// `S₁₁ = (Z_R − Z₀)/(Z_R + Z₀)`. An infinite `z_r` gives the open-circuit
/// value 1.
pub fn s11_from_impedance(z_r: Complex64, z0: f64) -> Result<Complex64> {
    if z_r.re.is_infinite() || z_r.im.is_infinite() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let denom = z_r + z0;
    if denom.norm() == 0.0 {
        return Err(Error::domain("degenerate impedance: Z_R + Z0 = 0"));
    }
    Ok((z_r - z0) / denom)
}

/// Sheet kinetic inductance `L_K = (R_□ℏ/πΔ) coth(Δ/2k_BT)` in H/□.
///
/// `gap` is the superconducting gap Δ in joules; `t = 0` uses coth → 1.
pub fn kinetic_sheet_inductance(r_sq: f64, gap: f64, t: f64) -> Result<f64> {
    if !(r_sq > 0.0) || !(gap > 0.0) || !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain("sheet resistance and gap must be > 0, temperature >= 0"));
    }
    let zero_t = r_sq * HBAR / (PI * gap);
    let coth = if t == 0.0 {
        1.0
    } else {
        (gap / (2.0 * K_B * t)).tanh().recip()
    };
    Ok(zero_t * coth)
}
