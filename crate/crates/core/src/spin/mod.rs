//! Color-center catalog, optical and magnetic dipoles, and spin–resonator
//! coupling.

mod snv;

pub use snv::{snv_dipole_numeric, SnvNumeric, GAMMA_N_OVER_GAMMA_E_SN117};

use crate::constants::{hz_to_rad, wavelength_to_rad, C_LIGHT, DEBYE, EPSILON_0, GAMMA_E, HBAR, MU_0, N_DIAMOND};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// How the microwave magnetic dipole of a center is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipoleRule {
    /// Spin-1 ground state, `⟨0|S|±1⟩ = 1/√2`.
    SpinOne,
    /// Strain-mixed electron-nuclear qubit of ¹¹⁷SnV⁻.
    SnvHyperfine,
}

/// Catalog entry for a color center. Frequencies are in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorCenter {
    pub name: String,
    #[serde(rename = "tau_rad_s")]
    pub tau_rad: f64,
    pub debye_waller: f64,
    #[serde(rename = "zpl_wavelength_m")]
    pub zpl_wavelength: f64,
    #[serde(rename = "mw_freq_hz")]
    pub mw_freq: f64,
    pub dipole_rule: DipoleRule,
    #[serde(rename = "strain_alpha_hz", default)]
    pub strain_alpha: f64,
    #[serde(rename = "strain_phase_rad", default)]
    pub strain_phase: f64,
    #[serde(rename = "spin_orbit_lambda_hz", default)]
    pub spin_orbit_lambda: f64,
    #[serde(rename = "hyperfine_par_hz", default)]
    pub hyperfine_par: f64,
    #[serde(rename = "hyperfine_perp_hz", default)]
    pub hyperfine_perp: f64,
    /// Required DC field range `[min, max]` in tesla.
    #[serde(rename = "dc_field_t", default)]
    pub dc_field_req: [f64; 2],
    /// Optical pure dephasing γ* in rad/s.
    #[serde(rename = "dephasing_rate_rad_s", default)]
    pub dephasing_rate: f64,
}

/// Spin-orbit splitting of the SnV⁻ ground state.
pub const SNV_LAMBDA_HZ: f64 = 830e9;
/// Nominal ¹¹⁷Sn hyperfine constants. Only their order of magnitude matters
/// for the dipole; the qubit splitting scales linearly with `A⊥`.
pub const SNV117_A_PAR_HZ: f64 = 1.3e9;
pub const SNV117_A_PERP_HZ: f64 = 1.3e9;

impl ColorCenter {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::domain("center name must not be empty"));
        }
        if !(self.tau_rad > 0.0) || !self.tau_rad.is_finite() {
            return Err(Error::domain(format!("{}: tau_rad must be > 0", self.name)));
        }
        if !(self.debye_waller > 0.0 && self.debye_waller <= 1.0) {
            return Err(Error::domain(format!("{}: debye_waller must lie in (0, 1]", self.name)));
        }
        if !(self.zpl_wavelength > 0.0) || !self.zpl_wavelength.is_finite() {
            return Err(Error::domain(format!("{}: zpl_wavelength must be > 0", self.name)));
        }
        if !(self.mw_freq >= 0.0) || !self.mw_freq.is_finite() {
            return Err(Error::domain(format!("{}: mw_freq must be >= 0", self.name)));
        }
        if !(self.dephasing_rate >= 0.0) || !self.dephasing_rate.is_finite() {
            return Err(Error::domain(format!("{}: dephasing_rate must be >= 0", self.name)));
        }
        if !(self.dc_field_req[0] >= 0.0 && self.dc_field_req[1] >= self.dc_field_req[0]) {
            return Err(Error::domain(format!("{}: dc_field range must be ordered and >= 0", self.name)));
        }
        if self.dipole_rule == DipoleRule::SnvHyperfine {
            if !(self.strain_alpha >= 0.0) || !self.strain_alpha.is_finite() {
                return Err(Error::domain(format!("{}: strain_alpha must be >= 0", self.name)));
            }
            if !(self.spin_orbit_lambda > 0.0) || !self.spin_orbit_lambda.is_finite() {
                return Err(Error::domain(format!("{}: spin_orbit_lambda must be > 0", self.name)));
            }
            if !self.hyperfine_par.is_finite() || !self.hyperfine_perp.is_finite() || !self.strain_phase.is_finite() {
                return Err(Error::domain(format!("{}: hyperfine constants must be finite", self.name)));
            }
        }
        Ok(())
    }

    /// Angular ZPL frequency.
    pub fn zpl_omega(&self) -> f64 {
        wavelength_to_rad(self.zpl_wavelength)
    }

    pub fn mw_omega(&self) -> f64 {
        hz_to_rad(self.mw_freq)
    }

    pub fn dipoles(&self) -> Result<DipoleResult> {
        self.validate()?;
        Ok(DipoleResult {
            magnetic_moment: magnetic_dipole(self),
            electric_moment: optical_dipole(self.tau_rad, self.zpl_omega(), N_DIAMOND)?,
            linewidth_gamma: emitter_linewidth(self.tau_rad, self.debye_waller, self.dephasing_rate)?,
        })
    }
}

fn spin_one(name: &str, tau_rad: f64, xi: f64, zpl_nm: f64, mw_ghz: f64) -> ColorCenter {
    ColorCenter {
        name: name.to_owned(),
        tau_rad,
        debye_waller: xi,
        zpl_wavelength: zpl_nm * 1e-9,
        mw_freq: mw_ghz * 1e9,
        dipole_rule: DipoleRule::SpinOne,
        strain_alpha: 0.0,
        strain_phase: 0.0,
        spin_orbit_lambda: 0.0,
        hyperfine_par: 0.0,
        hyperfine_perp: 0.0,
        dc_field_req: [0.1e-3, 1e-3],
        dephasing_rate: 0.0,
    }
}

pub fn nv() -> ColorCenter {
    spin_one("nv", 13e-9, 0.03, 637.0, 2.9)
}

pub fn siv0() -> ColorCenter {
    spin_one("siv0", 2e-9, 0.9, 946.0, 1.0)
}

/// ¹¹⁷SnV⁻ with the engineered strain α = 928.4 GHz.
pub fn snv117() -> ColorCenter {
    ColorCenter {
        name: "snv117".to_owned(),
        tau_rad: 6e-9,
        debye_waller: 0.6,
        zpl_wavelength: 620e-9,
        mw_freq: 0.6e9,
        dipole_rule: DipoleRule::SnvHyperfine,
        strain_alpha: 928.4e9,
        strain_phase: 0.0,
        spin_orbit_lambda: SNV_LAMBDA_HZ,
        hyperfine_par: SNV117_A_PAR_HZ,
        hyperfine_perp: SNV117_A_PERP_HZ,
        dc_field_req: [0.0, 0.0],
        dephasing_rate: 0.0,
    }
}

/// ¹¹⁷SnV⁻ with the rounded strain α = 900 GHz.
pub fn snv117_rounded() -> ColorCenter {
    ColorCenter {
        name: "snv117-900".to_owned(),
        strain_alpha: 900e9,
        ..snv117()
    }
}

/// Built-in centers, keyed by name.
pub fn builtin_centers() -> Vec<ColorCenter> {
    vec![nv(), siv0(), snv117(), snv117_rounded()]
}

/// Dipoles and linewidth of a center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipoleResult {
    /// In units of γ_e.
    pub magnetic_moment: f64,
    /// C·m.
    pub electric_moment: f64,
    /// rad/s.
    pub linewidth_gamma: f64,
}

/// `μ = √(3πε₀ℏc³/(nω³τ_rad))`.
pub fn optical_dipole(tau_rad: f64, omega: f64, n: f64) -> Result<f64> {
    if !(tau_rad > 0.0) || !(omega > 0.0) || !(n > 0.0) {
        return Err(Error::domain("tau_rad, omega and n must be > 0"));
    }
    Ok((3.0 * PI * EPSILON_0 * HBAR * C_LIGHT.powi(3) / (n * omega.powi(3) * tau_rad)).sqrt())
}

/// Optical dipole expressed in debye.
pub fn to_debye(mu: f64) -> f64 {
    mu / DEBYE
}

/// `γ_tot = 1/(τ_rad ξ) + γ*`.
pub fn emitter_linewidth(tau_rad: f64, xi: f64, gamma_star: f64) -> Result<f64> {
    if !(tau_rad > 0.0) || !(xi > 0.0 && xi <= 1.0) || !(gamma_star >= 0.0) {
        return Err(Error::domain("need tau_rad > 0, 0 < xi <= 1, gamma_star >= 0"));
    }
    Ok(1.0 / (tau_rad * xi) + gamma_star)
}

/// Magnetic transition dipole in units of γ_e (magnitude).
pub fn magnetic_dipole(center: &ColorCenter) -> f64 {
    match center.dipole_rule {
        DipoleRule::SpinOne => 1.0 / SQRT_2,
        DipoleRule::SnvHyperfine => snv_dipole_analytic(center.strain_alpha, center.spin_orbit_lambda),
    }
}

/// `α/(2√2 √(α² + λ²))`.
pub fn snv_dipole_analytic(alpha: f64, lambda: f64) -> f64 {
    let delta = alpha.hypot(lambda);
    if delta == 0.0 {
        return 0.0;
    }
    alpha / (2.0 * SQRT_2 * delta)
}

/// Field at perpendicular distance `d` from the midpoint of a straight wire
/// segment; `None` means an infinitely long wire.
pub fn biot_savart(current: f64, distance: f64, wire_length: Option<f64>) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::domain("distance must be > 0"));
    }
    match wire_length {
        None => Ok(MU_0 * current / (2.0 * PI * distance)),
        Some(len) if len > 0.0 => {
            let half = 0.5 * len;
            Ok(MU_0 * current * len / (4.0 * PI * distance * half.hypot(distance)))
        }
        Some(_) => Err(Error::domain("wire length must be > 0")),
    }
}

/// `g_m = γ_e δB ⟨0|S|1⟩` in rad/s.
pub fn coupling_g_m(delta_i: f64, distance: f64, dipole: f64, wire_length: Option<f64>) -> Result<f64> {
    if !(delta_i >= 0.0) || !(dipole >= 0.0) {
        return Err(Error::domain("delta_i and dipole must be >= 0"));
    }
    Ok(GAMMA_E * biot_savart(delta_i, distance, wire_length)? * dipole)
}
