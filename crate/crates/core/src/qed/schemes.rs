use super::{reflectivity, CavityAtomParams};
use crate::numeric::{argmax, golden_section_max_abs, linspace};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Amplitude,
    OnOff,
    PushPull,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Amplitude => "amplitude",
            Scheme::OnOff => "onoff",
            Scheme::PushPull => "pushpull",
        })
    }
}

/// Success probability and Bell-state fidelity of one entangling scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub success_probability: f64,
    pub bell_fidelity: f64,
    /// Spin-conditioned reflection coefficients: (reflective, non-reflective)
    /// for the amplitude scheme, (r_ON, r_OFF) for on-off, (r₊, r₋) for
    /// push-pull.
    pub r_values: [Complex64; 2],
    /// Emitter detuning ±Δ used by the push-pull scheme.
    pub detuning_used: Option<f64>,
    /// True when `bell_fidelity` comes from the R_max/(R_max + R_min)
    /// interpolation rather than an exact expression.
    pub fidelity_model_extension: bool,
}

/// Amplitude-scheme result with its operating point and closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeReport {
    pub result: SchemeResult,
    /// Carrier frequency at which both spin branches are evaluated.
    pub operating_omega: f64,
    /// Exact reflectivity of the coupled (bright) branch at the operating point.
    pub r_max: f64,
    /// Exact reflectivity of the uncoupled (dark) branch at the operating point.
    pub r_min: f64,
    /// `(κ_c − κ_i)²/κ²`
    pub r_min_closed: f64,
    /// `C²/(1+C)²`
    pub r_max_closed: f64,
}

const OPERATING_GRID: usize = 2048;

/// Amplitude (reflection-carving) scheme.
///
/// The spin state coupled to the cavity is the reflective branch; the other
/// spin state leaves an empty cavity. The carrier is chosen to maximise the
/// spin-conditioned contrast `R_coupled − R_empty` over `ω_c ± 3κ`, then
/// refined by golden-section search; both branches are evaluated at that
/// single carrier.
pub fn amplitude_scheme(p: &CavityAtomParams) -> Result<AmplitudeReport> {
    p.validate()?;
    let empty = p.empty_cavity();
    let kappa = p.kappa();

    let contrast = |omega: f64| -> f64 {
        match (reflectivity(omega, p), reflectivity(omega, &empty)) {
            (Ok(a), Ok(b)) => a.big_r - b.big_r,
            _ => f64::NEG_INFINITY,
        }
    };

    let grid = linspace(p.omega_c - 3.0 * kappa, p.omega_c + 3.0 * kappa, OPERATING_GRID);
    let values: Vec<f64> = grid.iter().map(|&w| contrast(w)).collect();
    let best = argmax(&values).ok_or_else(|| Error::domain("singular response"))?;
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let mut omega = golden_section_max_abs(contrast, lo, hi, 1e-12 * kappa);
    if contrast(grid[best]) > contrast(omega) {
        omega = grid[best];
    }
    // The peak is flat to machine precision; prefer the cavity line itself.
    if contrast(p.omega_c) >= contrast(omega) - 64.0 * f64::EPSILON {
        omega = p.omega_c;
    }

    let bright = reflectivity(omega, p)?;
    let dark = reflectivity(omega, &empty)?;
    let (r_max, r_min) = (bright.big_r, dark.big_r);

    let c = p.cooperativity();
    let r_max_closed = if c.is_infinite() { 1.0 } else { c * c / ((1.0 + c) * (1.0 + c)) };
    let r_min_closed = (p.kappa_c - p.kappa_i).powi(2) / (kappa * kappa);

    let (bell_fidelity, extension) = if r_min > 0.0 {
        (r_max / (r_max + r_min), true)
    } else {
        (1.0, false)
    };

    Ok(AmplitudeReport {
        result: SchemeResult {
            scheme: Scheme::Amplitude,
            success_probability: 0.5 * r_max,
            bell_fidelity,
            r_values: [bright.r, dark.r],
            detuning_used: None,
            fidelity_model_extension: extension,
        },
        operating_omega: omega,
        r_max,
        r_min,
        r_min_closed,
        r_max_closed,
    })
}

/// On-off phase scheme, evaluated exactly in terms of `𝒞 = g²/(κ_c γ)` and
/// the loss ratio `κ_i/κ_c`.
pub fn onoff_scheme(cal_c: f64, loss_ratio: f64) -> Result<SchemeResult> {
    if !(cal_c >= 0.0) || !cal_c.is_finite() {
        return Err(Error::domain("cooperativity must be finite and >= 0"));
    }
    if !(loss_ratio >= 0.0) || !loss_ratio.is_finite() {
        return Err(Error::domain("loss ratio must be finite and >= 0"));
    }
    let r_on = ((1.0 - loss_ratio) - cal_c) / ((1.0 + loss_ratio) + cal_c);
    let r_off = (1.0 - loss_ratio) / (1.0 + loss_ratio);
    let p = 0.25 * (r_on * r_on + r_off * r_off + 2.0);
    let f = (-r_on + r_off + 2.0).powi(2) / (16.0 * p);
    Ok(SchemeResult {
        scheme: Scheme::OnOff,
        success_probability: p,
        bell_fidelity: f,
        r_values: [Complex64::new(r_on, 0.0), Complex64::new(r_off, 0.0)],
        detuning_used: None,
        fidelity_model_extension: false,
    })
}

/// Lossless-limit (κ_i → 0) probability and fidelity of the on-off scheme.
pub fn onoff_leading_order(cal_c: f64) -> (f64, f64) {
    let p = 0.75 + (cal_c - 1.0).powi(2) / (4.0 * (cal_c + 1.0).powi(2));
    let f = (1.0 + 2.0 * cal_c).powi(2) / (4.0 * (1.0 + cal_c + cal_c * cal_c));
    (p, f)
}

/// Detuning Δ at which the two spin branches impose ±π/2 phase shifts at
/// the cavity resonance:
/// `Δ²/γ² = ((𝒞 + κ_i/κ_c)² − 1) / (1 − κ_i²/κ_c²)`.
pub fn pushpull_detuning(cal_c: f64, gamma: f64, kappa_c: f64, kappa_i: f64) -> Result<f64> {
    if !(gamma > 0.0) || !(kappa_c > 0.0) || !(kappa_i >= 0.0) || !(cal_c >= 0.0) {
        return Err(Error::domain("push-pull needs gamma, kappa_c > 0 and kappa_i, C >= 0"));
    }
    if kappa_i >= kappa_c {
        return Err(Error::domain("undercoupled regime unsupported"));
    }
    let k = kappa_i / kappa_c;
    let num = (cal_c + k).powi(2) - 1.0;
    if num < 0.0 {
        return Err(Error::domain("no real detuning satisfies push-pull condition"));
    }
    Ok(gamma * (num / (1.0 - k * k)).sqrt())
}

/// Cavity-emitter parameters of one push-pull branch (`sign = ±1` places
/// the emitter at `ω_c ± Δ`).
pub fn pushpull_params(
    cal_c: f64,
    gamma: f64,
    kappa_c: f64,
    kappa_i: f64,
    omega_c: f64,
    sign: f64,
) -> Result<CavityAtomParams> {
    let delta = pushpull_detuning(cal_c, gamma, kappa_c, kappa_i)?;
    let g = (cal_c * kappa_c * gamma).sqrt();
    CavityAtomParams::new(g, kappa_c, kappa_i, gamma, omega_c, omega_c + sign.signum() * delta)
}

const IMAG_TOLERANCE: f64 = 1e-10;

/// Push-pull phase scheme.
pub fn pushpull_scheme(cal_c: f64, gamma: f64, kappa_c: f64, kappa_i: f64) -> Result<SchemeResult> {
    let delta = pushpull_detuning(cal_c, gamma, kappa_c, kappa_i)?;
    // r± = ±iΔ(κ_c−κ_i) / (√(γ²κ_c² + Δ²(κ_c²−κ_i²)) + γκ_c), the
    // cancellation-free form of the closed expression; finite at Δ = 0.
    let root = (gamma * gamma * kappa_c * kappa_c + delta * delta * (kappa_c * kappa_c - kappa_i * kappa_i))
        .sqrt();
    let magnitude = delta * (kappa_c - kappa_i) / (root + gamma * kappa_c);
    let i = Complex64::i();
    let r_plus = i * magnitude;
    let r_minus = -i * magnitude;

    let p = 0.25 * (r_plus.norm_sqr() + r_minus.norm_sqr() + 2.0);
    let f = (-i * r_plus + i * r_minus + 2.0).powi(2) / (16.0 * p);
    if f.im.abs() > IMAG_TOLERANCE {
        return Err(Error::Numerical(format!(
            "push-pull fidelity has imaginary residue {:e}",
            f.im
        )));
    }
    Ok(SchemeResult {
        scheme: Scheme::PushPull,
        success_probability: p,
        bell_fidelity: f.re,
        r_values: [r_plus, r_minus],
        detuning_used: Some(delta),
        fidelity_model_extension: false,
    })
}

/// Lossless-limit probability `𝒞/(1+𝒞)` and fidelity
/// `(𝒞 + √(𝒞²−1))/(2𝒞)` of the push-pull scheme (𝒞 ≥ 1).
pub fn pushpull_leading_order(cal_c: f64) -> (f64, f64) {
    let p = cal_c / (1.0 + cal_c);
    let f = (cal_c + (cal_c * cal_c - 1.0).max(0.0).sqrt()) / (2.0 * cal_c);
    (p, f)
}
