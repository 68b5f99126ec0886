//! Run configuration. Every section rejects unknown keys; units are part of
//! the key names.

use serde::Deserialize;
use std::path::Path;
use transduction::numeric::{linspace, logspace};
use transduction::protocol::ProtocolPreset;
use transduction::spin::ColorCenter;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: Option<SchemeSection>,
    pub retrieval: Option<RetrievalSection>,
    pub lambda: Option<LambdaSection>,
    pub circuit: Option<CircuitSection>,
    pub resonator: Option<ResonatorSection>,
    pub mode: Option<ModeSection>,
    pub sweep: Option<SweepSection>,
    /// Inline color centers, added to the catalog.
    #[serde(default)]
    pub center: Vec<ColorCenter>,
    /// Inline protocol rows, added to the catalog.
    #[serde(default)]
    pub protocol: Vec<ProtocolPreset>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Amplitude,
    Onoff,
    Pushpull,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub kind: SchemeKind,
    pub cooperativity: Option<f64>,
    /// κ_i/κ_c; defaults to 1 (critical coupling) for the amplitude scheme
    /// and 0 otherwise.
    pub loss_ratio: Option<f64>,
    #[serde(default = "default_gamma_over_kappa_c")]
    pub gamma_over_kappa_c: f64,
}

fn default_gamma_over_kappa_c() -> f64 {
    1e-3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalSection {
    pub g_m_over_2pi_hz: f64,
    /// Resonator linewidth; when absent the matched rate Γ = g_m is used.
    pub kappa_m_over_2pi_hz: Option<f64>,
    pub t1_transmon_s: f64,
    pub t2_spin_s: f64,
    pub tau_s: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSection {
    pub g_rad_s: f64,
    pub kappa_rad_s: f64,
    pub gamma1_rad_s: f64,
    pub gamma2_rad_s: f64,
    pub t_final_s: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

fn default_sample_every() -> usize {
    100
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    pub z0_ohm: Option<f64>,
    #[serde(default)]
    pub tail_extrapolation: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorSection {
    pub l_h: f64,
    pub c_f: f64,
    pub c_k_f: f64,
    pub z0_ohm: Option<f64>,
    /// Sweep half-span in units of the resonance half-width.
    pub span_half_widths: f64,
    pub count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub center: Option<String>,
    pub emitter_m: Option<[f64; 3]>,
    pub kappa_over_2pi_hz: Option<f64>,
    pub shape: Option<[usize; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Lin,
    Log,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepSection {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.count < 2 {
            return Err(CliError::Config("sweep.count must be >= 2".into()));
        }
        if !self.from.is_finite() || !self.to.is_finite() {
            return Err(CliError::Config("sweep.from and sweep.to must be finite".into()));
        }
        Ok(match self.spacing {
            Spacing::Lin => linspace(self.from, self.to, self.count),
            Spacing::Log => {
                if !(self.from > 0.0 && self.to > 0.0) {
                    return Err(CliError::Config("sweep.from and sweep.to must be > 0 for log spacing".into()));
                }
                logspace(self.from, self.to, self.count)
            }
        })
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Requires a section, naming it in the error.
pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("missing [{name}] section")))
}

/// Parses a duration such as `107us`, `0.2ms`, `1e-4s` or `50ns`.
pub fn parse_duration(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (num, scale) = [("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9), ("s", 1.0)]
        .into_iter()
        .find_map(|(unit, scale)| t.strip_suffix(unit).map(|n| (n, scale)))
        .ok_or_else(|| format!("`{text}` needs a unit (s, ms, us, ns)"))?;
    let value: f64 = num.trim().parse().map_err(|_| format!("bad number in `{text}`"))?;
    let secs = value * scale;
    if secs < 0.0 || !secs.is_finite() {
        return Err(format!("`{text}` must be a finite non-negative time"));
    }
    Ok(secs)
}

/// Parses `a,b,c` into three values.
pub fn parse_triple<T: std::str::FromStr>(text: &str) -> Result<[T; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("`{text}` must have three comma-separated values"));
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<T>().map_err(|_| format!("bad value `{p}` in `{text}`"))?);
    }
    out.try_into().map_err(|_| "three values".to_string())
}
