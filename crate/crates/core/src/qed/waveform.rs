//! Distortion of a finite photon wavepacket on reflection.

use super::{reflectivity, CavityAtomParams};
use crate::numeric::second_derivative_5pt;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Which spin-conditioned response the pulse is reflected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionBranch {
    /// The emitter in the parameter set interacts with the cavity.
    Coupled,
    /// Empty cavity (emitter decoupled, g = 0).
    Uncoupled,
}

impl ReflectionBranch {
    fn params(self, p: &CavityAtomParams) -> CavityAtomParams {
        match self {
            ReflectionBranch::Coupled => *p,
            ReflectionBranch::Uncoupled => p.empty_cavity(),
        }
    }
}

/// Uniformly sampled complex baseband envelope `f(t)` of a photon pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    times: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

const MIN_SAMPLES: usize = 8;

impl Pulse {
    /// Builds a pulse from `(t, f(t))` samples. Times must be strictly
    /// increasing.
    pub fn new(samples: Vec<(f64, Complex64)>) -> Result<Self> {
        let (times, amplitudes): (Vec<_>, Vec<_>) = samples.into_iter().unzip();
        if times.iter().any(|t| !t.is_finite()) || amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::input("pulse samples must be finite"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("pulse sample times must be strictly increasing"));
        }
        Ok(Self { times, amplitudes })
    }

    /// Samples `envelope` on `n` points spanning `[t0, t1]`.
    pub fn from_fn<F>(t0: f64, t1: f64, n: usize, envelope: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let ts = crate::numeric::linspace(t0, t1, n);
        Self::new(ts.into_iter().map(|t| (t, envelope(t))).collect())
    }

    /// Gaussian intensity envelope `exp(−t²/(2σ_t²))` in amplitude, sampled
    /// on `±half_width_sigmas·σ_t`.
    pub fn gaussian(sigma_t: f64, half_width_sigmas: f64, n: usize) -> Result<Self> {
        if !(sigma_t > 0.0) {
            return Err(Error::domain("pulse duration must be > 0"));
        }
        let h = half_width_sigmas * sigma_t;
        Self::from_fn(-h, h, n, |t| Complex64::new((-t * t / (4.0 * sigma_t * sigma_t)).exp(), 0.0))
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.times.iter().copied().zip(self.amplitudes.iter().copied())
    }

    fn uniform_step(&self) -> Result<f64> {
        if self.len() < MIN_SAMPLES {
            return Err(Error::input("insufficient resolution"));
        }
        let dt = (self.times[self.len() - 1] - self.times[0]) / (self.len() - 1) as f64;
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-6 * dt);
        if !uniform {
            return Err(Error::input("pulse samples must be uniformly spaced"));
        }
        Ok(dt)
    }

    /// Rescales the amplitudes so that `∫|f(ω)|² dω = 1` on the sampled
    /// spectrum.
    pub fn normalize(&mut self) -> Result<()> {
        let dt = self.uniform_step()?;
        let energy: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * 2.0 * PI * dt;
        if energy == 0.0 {
            return Err(Error::input("pulse has zero energy"));
        }
        let scale = energy.sqrt().recip();
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok(())
    }

    /// Spectrum `f(ω) = ∫ f(t) e^{iωt} dt` on the zero-padded DFT grid.
    pub fn spectrum(&self, opts: SpectrumOptions) -> Result<Spectrum> {
        let dt = self.uniform_step()?;
        let n = self.len();
        let n_pad = n * opts.pad_factor.max(1);
        let mut buf = vec![Complex64::new(0.0, 0.0); n_pad];
        for (k, (&a, slot)) in self.amplitudes.iter().zip(buf.iter_mut()).enumerate() {
            let w = if opts.hann {
                0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos()
            } else {
                1.0
            };
            *slot = a * w;
        }
        // e^{+iωt} kernel: the unnormalised inverse transform.
        FftPlanner::new().plan_fft_inverse(n_pad).process(&mut buf);

        let d_omega = 2.0 * PI / (n_pad as f64 * dt);
        let t0 = self.times[0];
        let half = n_pad / 2;
        let mut omega = Vec::with_capacity(n_pad);
        let mut amplitude = Vec::with_capacity(n_pad);
        for j in 0..n_pad {
            // Reorder so frequencies increase from −π/dt.
            let k = (j + n_pad - half) % n_pad;
            let kk = if k >= n_pad - half { k as i64 - n_pad as i64 } else { k as i64 };
            let w = kk as f64 * d_omega;
            let phase = Complex64::from_polar(1.0, w * t0);
            omega.push(w);
            amplitude.push(buf[k] * dt * phase);
        }
        Ok(Spectrum { omega, amplitude, d_omega })
    }
}

/// Options for turning a sampled pulse into a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectrumOptions {
    /// Zero-padding factor applied before the transform.
    pub pad_factor: usize,
    /// Apply a Hann window to the time samples.
    pub hann: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { pad_factor: 4, hann: false }
    }
}

/// Baseband spectrum on a uniform frequency grid, increasing in ω.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub d_omega: f64,
}

impl Spectrum {
    /// `|f(ω)|²` scaled to unit integral.
    pub fn normalized_density(&self) -> Result<Vec<f64>> {
        let density: Vec<f64> = self.amplitude.iter().map(|a| a.norm_sqr()).collect();
        let norm: f64 = density.iter().sum::<f64>() * self.d_omega;
        if !(norm > 0.0) {
            return Err(Error::input("pulse has zero energy"));
        }
        Ok(density.into_iter().map(|d| d / norm).collect())
    }
}

/// Overlap fidelity `|∫ r(ω_c + ω)|f(ω)|² dω|²` of the reflected and
/// incident waveforms, with the pulse carrier at the cavity resonance.
pub fn waveform_fidelity_exact(
    pulse: &Pulse,
    p: &CavityAtomParams,
    branch: ReflectionBranch,
) -> Result<f64> {
    let params = branch.params(p);
    let spectrum = pulse.spectrum(SpectrumOptions::default())?;
    let density = spectrum.normalized_density()?;
    let mut overlap = Complex64::new(0.0, 0.0);
    for (&w, &d) in spectrum.omega.iter().zip(&density) {
        if d == 0.0 {
            continue;
        }
        overlap += reflectivity(params.omega_c + w, &params)?.r * d;
    }
    Ok((overlap * spectrum.d_omega).norm_sqr())
}

/// Second-moment approximation `|G₀ r(0) − π G̈(0) r″(0)|²` of the overlap
/// fidelity.
pub fn waveform_fidelity_taylor(g0: f64, gddot0: f64, r0: Complex64, rpp0: Complex64) -> f64 {
    (r0 * g0 - rpp0 * (PI * gddot0)).norm_sqr()
}

/// `(G₀, G̈(0))` of the pulse, normalised so that
/// `|f(ω)|² = G₀ δ(ω) − π G̈(0) δ″(ω) + …` in the distributional sense, i.e.
/// `G₀ = ∫|f|² dω` and `G̈(0) = −(1/2π) ∫ ω² |f|² dω` for a spectrum
/// normalised to unit weight.
pub fn spectral_moments(pulse: &Pulse) -> Result<(f64, f64)> {
    let spectrum = pulse.spectrum(SpectrumOptions::default())?;
    let density = spectrum.normalized_density()?;
    let second: f64 = spectrum
        .omega
        .iter()
        .zip(&density)
        .map(|(w, d)| w * w * d)
        .sum::<f64>()
        * spectrum.d_omega;
    Ok((1.0, -second / (2.0 * PI)))
}

/// `r″` at the cavity resonance by a five-point stencil with step `κ/100`.
pub fn reflection_second_derivative(p: &CavityAtomParams, branch: ReflectionBranch) -> Result<Complex64> {
    let params = branch.params(p);
    let h = params.kappa() / 100.0;
    // Surface singular points before differentiating.
    for k in -2..=2 {
        reflectivity(params.omega_c + k as f64 * h, &params)?;
    }
    Ok(second_derivative_5pt(
        |w| reflectivity(w, &params).map(|r| r.r).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        params.omega_c,
        h,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mirror_like() -> CavityAtomParams {
        // Over-coupled empty cavity far from the band: r ≈ −1 and flat.
        CavityAtomParams::new(0.0, 1e12, 0.0, 1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn rejects_short_pulses() {
        let p = Pulse::gaussian(1.0, 4.0, 7).unwrap();
        let params = mirror_like();
        assert!(matches!(
            waveform_fidelity_exact(&p, &params, ReflectionBranch::Coupled),
            Err(Error::Input(m)) if m.contains("insufficient resolution")
        ));
    }

    #[test]
    fn rejects_unsorted_samples() {
        let s = vec![(0.0, Complex64::new(1.0, 0.0)), (0.0, Complex64::new(1.0, 0.0))];
        assert!(Pulse::new(s).is_err());
    }

    #[test]
    fn normalize_gives_unit_spectral_weight() {
        let mut p = Pulse::gaussian(2e-9, 6.0, 256).unwrap();
        p.normalize().unwrap();
        let s = p.spectrum(SpectrumOptions::default()).unwrap();
        let weight: f64 = s.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * s.d_omega;
        assert!((weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_spectrum_matches_analytic_transform() {
        // f(t) = exp(−t²/4σ²) ⇒ |f(ω)|² ∝ exp(−2σ²ω²)
        let sigma = 1.0;
        let p = Pulse::gaussian(sigma, 8.0, 512).unwrap();
        let s = p.spectrum(SpectrumOptions::default()).unwrap();
        let peak = s.amplitude.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let expected_peak = 2.0 * (PI).sqrt() * sigma;
        assert!((peak - expected_peak).abs() / expected_peak < 1e-6);
        for (w, a) in s.omega.iter().zip(&s.amplitude) {
            let exp = expected_peak * (-sigma * sigma * w * w).exp();
            assert!((a.norm() - exp).abs() < 1e-6 * expected_peak);
        }
    }

    #[test]
    fn perfect_mirror_is_lossless() {
        let p = Pulse::gaussian(1e-9, 6.0, 128).unwrap();
        let f = waveform_fidelity_exact(&p, &mirror_like(), ReflectionBranch::Coupled).unwrap();
        assert!((f - 1.0).abs() < 1e-6);
    }

    #[test]
    fn narrow_spectrum_recovers_carrier_reflectivity() {
        let params = CavityAtomParams::critical_from_cooperativity(10.0, 1.0, 0.01).unwrap();
        let r0 = reflectivity(0.0, &params).unwrap().big_r;
        // Spectral width 1/(2σ) = 1e-5 of the atomic feature width.
        let p = Pulse::gaussian(1e5, 8.0, 512).unwrap();
        let f = waveform_fidelity_exact(&p, &params, ReflectionBranch::Coupled).unwrap();
        assert!((f - r0).abs() < 1e-6, "{f} vs {r0}");
    }

    #[test]
    fn taylor_trivial_limits() {
        let r0 = Complex64::new(0.3, -0.2);
        let g0 = 0.9;
        let base = (r0 * g0).norm_sqr();
        assert_eq!(waveform_fidelity_taylor(g0, 0.0, r0, Complex64::new(5.0, 1.0)), base);
        assert_eq!(waveform_fidelity_taylor(g0, -3.0, r0, Complex64::new(0.0, 0.0)), base);
    }

    #[test]
    fn moments_of_gaussian() {
        // |f(ω)|² ∝ exp(−2σ²ω²) ⇒ ⟨ω²⟩ = 1/(4σ²)
        let sigma = 0.5;
        let p = Pulse::gaussian(sigma, 10.0, 512).unwrap();
        let (g0, gdd) = spectral_moments(&p).unwrap();
        assert_eq!(g0, 1.0);
        let expected = -1.0 / (4.0 * sigma * sigma) / (2.0 * PI);
        assert!((gdd - expected).abs() / expected.abs() < 1e-8);
    }

    #[test]
    fn taylor_converges_to_exact_for_long_pulses() {
        let params = CavityAtomParams::critical_from_cooperativity(43.1, 1.0, 1e-3).unwrap();
        let r0 = reflectivity(0.0, &params).unwrap().r;
        let rpp = reflection_second_derivative(&params, ReflectionBranch::Coupled).unwrap();
        let mut prev = f64::INFINITY;
        // Spectral rms widths from 0.2κ down to 0.003κ.
        for sigma_t in [2.5, 10.0, 40.0, 160.0] {
            let p = Pulse::gaussian(sigma_t, 8.0, 1024).unwrap();
            let exact = waveform_fidelity_exact(&p, &params, ReflectionBranch::Coupled).unwrap();
            let (g0, gdd) = spectral_moments(&p).unwrap();
            let approx = waveform_fidelity_taylor(g0, gdd, r0, rpp);
            let err = (approx - exact).abs() / exact;
            assert!(err < prev, "error must shrink as pulses lengthen");
            prev = err;
        }
        assert!(prev < 0.01);
    }
}
