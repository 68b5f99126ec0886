use super::ResonatorParams;
use crate::numeric::linspace;
use crate::{Error, Result};
use num_complex::Complex64;

/// One point of a simulated or measured two-port response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseSample {
    /// Angular frequency, rad/s.
    pub omega: f64,
    /// Inductor current over incident current, `I_L/I_in`.
    pub current_ratio: Complex64,
    pub s11: Complex64,
}

/// Frequency sweep with strictly increasing ω.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    samples: Vec<ResponseSample>,
}

pub const MIN_SAMPLES: usize = 16;

impl FrequencyResponse {
    pub fn new(samples: Vec<ResponseSample>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::input(format!(
                "insufficient resolution: {} samples, need at least {MIN_SAMPLES}",
                samples.len()
            )));
        }
        for s in &samples {
            let finite = s.omega.is_finite() && s.current_ratio.is_finite() && s.s11.is_finite();
            if !finite {
                return Err(Error::input("non-finite sample in frequency response"));
            }
            if s.omega <= 0.0 {
                return Err(Error::input("frequencies must be positive"));
            }
        }
        if samples.windows(2).any(|w| w[1].omega <= w[0].omega) {
            return Err(Error::input("frequencies must be strictly increasing"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[ResponseSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Network response of the capacitively coupled LC resonator on `n` points
/// spanning `±span` around the loaded resonance.
///
/// With `D = 1 − ω²LC` and `N = D − ω²LC_k` the coupled branch impedance is
/// `Z_k = N/(iωC_k D)`; the expressions below are rearranged so that they
/// stay finite at `D = 0`.
pub fn synth_response(p: &ResonatorParams, span: f64, n: usize) -> Result<FrequencyResponse> {
    p.validate()?;
    let center = p.loaded_resonance();
    if !(span > 0.0) || span >= center {
        return Err(Error::domain("span must be positive and below the resonance"));
    }
    let samples = linspace(center - span, center + span, n)
        .into_iter()
        .map(|omega| network_sample(omega, p))
        .collect();
    FrequencyResponse::new(samples)
}

fn network_sample(omega: f64, p: &ResonatorParams) -> ResponseSample {
    let i = Complex64::i();
    let d = 1.0 - omega * omega * p.l * p.c;
    let n = d - omega * omega * p.l * p.c_k;
    let y = i * omega * p.c_k * d;
    // Z0/(Z0 + Z_k) · 1/D
    let current_ratio = p.z0 * i * omega * p.c_k / (p.z0 * y + n);
    // −Z0/(2Z_k + Z0)
    let s11 = -p.z0 * y / (2.0 * n + p.z0 * y);
    ResponseSample { omega, current_ratio, s11 }
}
