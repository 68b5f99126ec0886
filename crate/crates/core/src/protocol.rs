//! End-to-end figures of merit and the detection-time optimizer.

use crate::constants::hz_to_rad;
use crate::numeric::{argmax, golden_section_max_abs, logspace};
use crate::retrieval::{entanglement_fidelity_closed, matched_rate, retrieval_probability, ProtocolTimings};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Optical success factor `0.5·C²/(1+C)²`.
pub fn optical_success(c_opt: f64) -> f64 {
    0.5 * c_opt * c_opt / ((1.0 + c_opt) * (1.0 + c_opt))
}

/// `R = 0.5·C²/(1+C)² · (1 − e^{−Γτ})/(τ + T_reset)` in Hz.
pub fn herald_rate(c_opt: f64, gamma: f64, tau: f64, t_reset: f64) -> Result<f64> {
    if !(c_opt >= 0.0) || !(gamma >= 0.0) || !(tau >= 0.0) || !(t_reset >= 0.0) {
        return Err(Error::domain("herald_rate inputs must be >= 0"));
    }
    if !(tau + t_reset > 0.0) {
        return Err(Error::domain("tau + t_reset must be > 0"));
    }
    Ok(optical_success(c_opt) * retrieval_probability(gamma, tau)? / (tau + t_reset))
}

/// One point of the τ sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub tau: f64,
    pub rate: f64,
    pub fidelity: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeritReport {
    pub c_opt: f64,
    pub gamma_purcell: f64,
    pub tau_star: f64,
    pub rate_star: f64,
    pub fidelity_star: f64,
    pub prob_star: f64,
    pub sweep: Vec<SweepPoint>,
}

pub const TAU_MIN: f64 = 1e-8;
pub const TAU_MAX: f64 = 1e-2;
pub const TAU_GRID: usize = 200;
const TAU_REL_TOL: f64 = 1e-6;

/// Maximizes the heralding rate over τ.
///
/// A 200-point log grid on [10⁻⁸, 10⁻²] s brackets the optimum (ties go to
/// the smallest τ), then golden-section search narrows it to a relative
/// width of 10⁻⁶. `timings.tau` and `timings.gamma_purcell` are ignored.
pub fn optimize_tau(c_opt: f64, gamma: f64, t_reset: f64, timings: &ProtocolTimings) -> Result<MeritReport> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain("gamma must be > 0"));
    }
    let grid = logspace(TAU_MIN, TAU_MAX, TAU_GRID);
    let rate = |tau: f64| herald_rate(c_opt, gamma, tau, t_reset);
    let rates = grid.iter().map(|&t| rate(t)).collect::<Result<Vec<_>>>()?;
    let best = argmax(&rates).ok_or_else(|| Error::Numerical("rate sweep produced no finite values".into()))?;
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    // A width of 10⁻⁶ in ln τ is a relative width of 10⁻⁶ in τ.
    let ln_tau = golden_section_max_abs(|x| rate(x.exp()).unwrap_or(f64::NEG_INFINITY), lo.ln(), hi.ln(), TAU_REL_TOL);
    let refined = ln_tau.exp();
    let (mut tau_star, mut rate_star) = (grid[best], rates[best]);
    let refined_rate = rate(refined)?;
    if refined_rate > rate_star {
        tau_star = refined;
        rate_star = refined_rate;
    }

    let at = |tau: f64| -> Result<SweepPoint> {
        let t = ProtocolTimings { tau, t_reset, gamma_purcell: gamma, ..*timings };
        Ok(SweepPoint {
            tau,
            rate: rate(tau)?,
            fidelity: entanglement_fidelity_closed(&t)?,
            probability: optical_success(c_opt) * retrieval_probability(gamma, tau)?,
        })
    };
    let star = at(tau_star)?;
    let sweep = grid.iter().map(|&t| at(t)).collect::<Result<Vec<_>>>()?;
    Ok(MeritReport {
        c_opt,
        gamma_purcell: gamma,
        tau_star,
        rate_star,
        fidelity_star: star.fidelity,
        prob_star: star.probability,
        sweep,
    })
}

/// Probability and fidelity at a fixed detection time, with the matched
/// Purcell rate Γ = g_m.
pub fn figures_of_merit(c_opt: f64, g_m: f64, tau_fixed: f64, timings: &ProtocolTimings) -> Result<(f64, f64)> {
    if !(c_opt >= 0.0) || !(g_m >= 0.0) {
        return Err(Error::domain("c_opt and g_m must be >= 0"));
    }
    let gamma = matched_rate(g_m);
    let probability = optical_success(c_opt) * retrieval_probability(gamma, tau_fixed)?;
    let t = ProtocolTimings { tau: tau_fixed, gamma_purcell: gamma, ..*timings };
    Ok((probability, entanglement_fidelity_closed(&t)?))
}

/// Optical cooperativity, Purcell rate and coherence times of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolPreset {
    pub name: String,
    /// Color-center catalog entry this row belongs to.
    pub center: String,
    pub c_opt: f64,
    #[serde(rename = "gamma_over_2pi_hz")]
    pub gamma_over_2pi: f64,
    #[serde(rename = "t_reset_s")]
    pub t_reset: f64,
    #[serde(rename = "t1_transmon_s")]
    pub t1_transmon: f64,
    /// Absent means effectively infinite.
    #[serde(rename = "t2_spin_s", default = "default_t2")]
    pub t2_spin: f64,
}

fn default_t2() -> f64 {
    LONG_T2
}

/// Stand-in for an unbounded spin coherence time.
pub const LONG_T2: f64 = 1.0;
pub const T_RESET: f64 = 10e-6;
pub const T1_TRANSMON: f64 = 1e-3;

impl ProtocolPreset {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_opt >= 0.0) || !self.c_opt.is_finite() {
            return Err(Error::domain(format!("{}: c_opt must be >= 0", self.name)));
        }
        if !(self.gamma_over_2pi > 0.0) || !self.gamma_over_2pi.is_finite() {
            return Err(Error::domain(format!("{}: gamma_over_2pi_hz must be > 0", self.name)));
        }
        self.timings(0.0).validate()
    }

    pub fn gamma(&self) -> f64 {
        hz_to_rad(self.gamma_over_2pi)
    }

    pub fn timings(&self, tau: f64) -> ProtocolTimings {
        ProtocolTimings {
            tau,
            t_reset: self.t_reset,
            t1_transmon: self.t1_transmon,
            t2_spin: self.t2_spin,
            gamma_purcell: self.gamma(),
        }
    }

    pub fn optimize(&self) -> Result<MeritReport> {
        self.validate()?;
        optimize_tau(self.c_opt, self.gamma(), self.t_reset, &self.timings(0.0))
    }

    /// Fixed-τ figures of merit using this row's rate as the matched g_m.
    pub fn at_tau(&self, tau: f64) -> Result<(f64, f64)> {
        self.validate()?;
        figures_of_merit(self.c_opt, self.gamma(), tau, &self.timings(tau))
    }
}

fn row(name: &str, center: &str, c_opt: f64, khz: f64, t2: f64) -> ProtocolPreset {
    ProtocolPreset {
        name: name.to_owned(),
        center: center.to_owned(),
        c_opt,
        gamma_over_2pi: khz * 1e3,
        t_reset: T_RESET,
        t1_transmon: T1_TRANSMON,
        t2_spin: t2,
    }
}

/// Rows used for the rate optimization, one per center.
pub fn rate_presets() -> Vec<ProtocolPreset> {
    vec![
        row("snv117", "snv117", 43.1, 0.9, 2.5e-3),
        row("nv", "nv", 12.8, 3.9, 1e-3),
        row("siv0", "siv0", 232.4, 3.1, LONG_T2),
    ]
}

/// Spin positions A/B/C per center, given as (C, g_m/2π).
pub fn location_presets() -> Vec<ProtocolPreset> {
    let mut v = Vec::new();
    let table = [
        ("snv117", 2.5e-3, [(157.0, 0.630), (112.0, 0.767), (43.1, 0.904)]),
        ("nv", 1e-3, [(18.0, 3.18), (12.8, 3.78), (4.94, 4.35)]),
        ("siv0", LONG_T2, [(845.0, 2.10), (601.0, 2.55), (232.0, 3.01)]),
    ];
    for (center, t2, locs) in table {
        for (loc, (c, khz)) in ["a", "b", "c"].iter().zip(locs) {
            v.push(row(&format!("{center}-{loc}"), center, c, khz, t2));
        }
    }
    v
}
