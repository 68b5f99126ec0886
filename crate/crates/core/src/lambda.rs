//! Λ-system oracle: one cavity photon, emitter with a ZPL branch (γ₁, back
//! to |g₁⟩) and a sideband branch (γ₂, to |g₂⟩).
//!
//! Basis: |1⟩ = |0,g₁⟩, |2⟩ = |0,g₂⟩, |3⟩ = |1,g₁⟩, |4⟩ = |0,e⟩. The photon
//! state |3⟩ leaks out of the cavity at κ into |1⟩; the excited state |4⟩
//! decays at γ₁ into |1⟩ and at γ₂ into |2⟩.

use crate::qed::{reflectivity_with_inversion, CavityAtomParams, Reflection};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl LambdaParams {
    pub fn new(g: f64, kappa: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        let p = Self { g, kappa, gamma1, gamma2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("kappa", self.kappa), ("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma1 + self.gamma2
    }

    /// Branching ratio `η = γ₁/γ₂`, if γ₂ > 0.
    pub fn branching_ratio(&self) -> Option<f64> {
        (self.gamma2 > 0.0).then(|| self.gamma1 / self.gamma2)
    }

    fn max_rate(&self) -> f64 {
        self.g.max(self.kappa).max(self.gamma())
    }
}

/// Density-matrix elements tracked by the closed equation set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho34: Complex64,
}

impl LambdaState {
    fn initial() -> Self {
        Self {
            rho11: 0.0,
            rho22: 0.0,
            rho33: 1.0,
            rho44: 0.0,
            rho34: Complex64::new(0.0, 0.0),
        }
    }

    pub fn rho43(&self) -> Complex64 {
        self.rho34.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22 + self.rho33 + self.rho44
    }

    fn axpy(&self, h: f64, d: &Self) -> Self {
        Self {
            rho11: self.rho11 + h * d.rho11,
            rho22: self.rho22 + h * d.rho22,
            rho33: self.rho33 + h * d.rho33,
            rho44: self.rho44 + h * d.rho44,
            rho34: self.rho34 + d.rho34 * h,
        }
    }
}

fn derivative(p: &LambdaParams, s: &LambdaState) -> LambdaState {
    let ig = Complex64::new(0.0, p.g);
    let half = 0.5 * (p.gamma() + p.kappa);
    let rho43 = s.rho43();
    // dρ₃₃ = −κρ₃₃ + igρ₄₃ − igρ₃₄ = −κρ₃₃ − 2g Im ρ₄₃
    let coupling = (ig * rho43 - ig * s.rho34).re;
    LambdaState {
        rho11: p.kappa * s.rho33 + p.gamma1 * s.rho44,
        rho22: p.gamma2 * s.rho44,
        rho33: -p.kappa * s.rho33 + coupling,
        rho44: -p.gamma() * s.rho44 - coupling,
        rho34: -ig * s.rho33 + ig * s.rho44 - s.rho34 * half,
    }
}

fn rk4_step(p: &LambdaParams, s: &LambdaState, h: f64) -> LambdaState {
    let k1 = derivative(p, s);
    let k2 = derivative(p, &s.axpy(0.5 * h, &k1));
    let k3 = derivative(p, &s.axpy(0.5 * h, &k2));
    let k4 = derivative(p, &s.axpy(h, &k3));
    LambdaState {
        rho11: s.rho11 + h / 6.0 * (k1.rho11 + 2.0 * k2.rho11 + 2.0 * k3.rho11 + k4.rho11),
        rho22: s.rho22 + h / 6.0 * (k1.rho22 + 2.0 * k2.rho22 + 2.0 * k3.rho22 + k4.rho22),
        rho33: s.rho33 + h / 6.0 * (k1.rho33 + 2.0 * k2.rho33 + 2.0 * k3.rho33 + k4.rho33),
        rho44: s.rho44 + h / 6.0 * (k1.rho44 + 2.0 * k2.rho44 + 2.0 * k3.rho44 + k4.rho44),
        rho34: s.rho34 + (k1.rho34 + k2.rho34 * 2.0 + k3.rho34 * 2.0 + k4.rho34) * (h / 6.0),
    }
}

/// Options for [`evolve_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Keep every n-th step in the trajectory (the final state is always kept).
    pub sample_every: usize,
    /// Stop once the largest per-step population change drops below
    /// `steady_tol` and the emitter-cavity states are empty to the same level.
    pub steady_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { sample_every: 1, steady_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<LambdaState>,
    pub step: f64,
    /// Largest |trace − 1| seen along the run.
    pub trace_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> &LambdaState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

const MAX_STIFFNESS: f64 = 1e8;
const TRACE_TOL: f64 = 1e-9;
const MAX_REFINEMENTS: u32 = 4;

/// Integrates the closed equation set from |3⟩ = |1,g₁⟩ with fixed-step RK4,
/// `h = 1/(20 max(g, κ, γ))`. If the trace drifts by more than 10⁻⁹ the run
/// is repeated with the step halved.
pub fn evolve_lambda(p: &LambdaParams, t_final: f64, opts: EvolveOptions) -> Result<Trajectory> {
    p.validate()?;
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::domain("t_final must be finite and >= 0"));
    }
    let max = p.max_rate();
    let rates = [p.g, p.kappa, p.gamma()];
    let min = rates.iter().copied().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
    if max > 0.0 && max / min > MAX_STIFFNESS {
        return Err(Error::Numerical(format!(
            "stiffness ratio {:.3e} exceeds {MAX_STIFFNESS:e}; use analytic steady state",
            max / min
        )));
    }
    if max == 0.0 {
        return Ok(Trajectory {
            times: vec![0.0],
            states: vec![LambdaState::initial()],
            step: 0.0,
            trace_drift: 0.0,
        });
    }
    let mut h = 1.0 / (20.0 * max);
    for _ in 0..=MAX_REFINEMENTS {
        let traj = integrate(p, t_final, h, opts);
        if traj.trace_drift <= TRACE_TOL {
            return Ok(traj);
        }
        log::debug!("trace drift {:.3e} at h = {h:e}; halving step", traj.trace_drift);
        h *= 0.5;
    }
    Err(Error::Numerical("trace drift above 1e-9 after step refinement".into()))
}

fn integrate(p: &LambdaParams, t_final: f64, h: f64, opts: EvolveOptions) -> Trajectory {
    let every = opts.sample_every.max(1);
    let mut state = LambdaState::initial();
    let mut times = vec![0.0];
    let mut states = vec![state];
    let mut drift: f64 = 0.0;
    let mut t = 0.0;
    let mut k = 0usize;
    while t < t_final {
        let dt = h.min(t_final - t);
        let next = rk4_step(p, &state, dt);
        k += 1;
        t = if dt < h { t_final } else { k as f64 * h };
        let change = [
            next.rho11 - state.rho11,
            next.rho22 - state.rho22,
            next.rho33 - state.rho33,
            next.rho44 - state.rho44,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        state = next;
        drift = drift.max((state.trace() - 1.0).abs());
        let settled = change < opts.steady_tol && state.rho33 + state.rho44 < opts.steady_tol;
        if k.is_multiple_of(every) || settled || t >= t_final {
            times.push(t);
            states.push(state);
        }
        if settled {
            break;
        }
    }
    Trajectory { times, states, step: h, trace_drift: drift }
}

/// Long-time ground populations `(P_g1, P_g2)`:
/// `P_g1 = [γκ(γ+κ) + 4g²(γ₁+κ)] / [(γ+κ)(4g²+γκ)]`,
/// `P_g2 = 4g²γ₂ / [(γ+κ)(4g²+γκ)]`.
pub fn steady_populations(p: &LambdaParams) -> Result<(f64, f64)> {
    p.validate()?;
    let gamma = p.gamma();
    let g2 = 4.0 * p.g * p.g;
    let denom = (gamma + p.kappa) * (g2 + gamma * p.kappa);
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::domain("degenerate rates: (γ+κ)(4g²+γκ) = 0"));
    }
    let pg1 = (gamma * p.kappa * (gamma + p.kappa) + g2 * (p.gamma1 + p.kappa)) / denom;
    let pg2 = g2 * p.gamma2 / denom;
    Ok((pg1, pg2))
}

/// Reflection with the atomic term weighted by `⟨σ_z⟩ ∈ [−1, 0]`.
pub fn effective_reflectivity(omega: f64, p: &CavityAtomParams, sigma_z: f64) -> Result<Reflection> {
    if !(-1.0..=0.0).contains(&sigma_z) {
        return Err(Error::domain("sigma_z must lie in [-1, 0]"));
    }
    p.validate()?;
    reflectivity_with_inversion(omega, p, sigma_z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qed::reflectivity;
    use proptest::prelude::*;

    fn run_to_steady(p: &LambdaParams) -> LambdaState {
        let slow = [p.g, p.kappa, p.gamma()].iter().copied().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
        let opts = EvolveOptions { sample_every: 1000, ..Default::default() };
        *evolve_lambda(p, 200.0 / slow, opts).unwrap().last()
    }

    #[test]
    fn symmetric_example() {
        let p = LambdaParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let (pg1, pg2) = steady_populations(&p).unwrap();
        assert!((pg1 - 0.8).abs() < 1e-15 && (pg2 - 0.2).abs() < 1e-15);
        let traj = evolve_lambda(&p, 50.0, EvolveOptions::default()).unwrap();
        let s = traj.last();
        assert!((s.rho11 - 0.8).abs() < 1e-6, "{}", s.rho11);
        assert!((s.rho22 - 0.2).abs() < 1e-6, "{}", s.rho22);
        assert!(traj.trace_drift < 1e-9);
    }

    #[test]
    fn decoupled_decay() {
        let p = LambdaParams::new(0.0, 2.0, 1.0, 0.0).unwrap();
        let s = run_to_steady(&p);
        assert!((s.rho11 - 1.0).abs() < 1e-9);
        assert_eq!(steady_populations(&p).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn cavity_dominated_regime() {
        // γ ≪ g ≪ κ: P_g2 ~ 4g²γ₂/κ³·… is small.
        let p = LambdaParams::new(1.0, 100.0, 0.003, 0.097).unwrap();
        let (pg1, pg2) = steady_populations(&p).unwrap();
        assert!(1.0 - pg1 < 10.0 * p.gamma() / p.kappa);
        assert!((pg1 + pg2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_rates_rejected() {
        let p = LambdaParams::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(steady_populations(&p).is_err());
        assert!(LambdaParams::new(-1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn stiffness_guard() {
        let p = LambdaParams::new(1.0, 1e9, 1e-1, 0.0).unwrap();
        let err = evolve_lambda(&p, 1.0, EvolveOptions::default());
        assert!(matches!(err, Err(Error::Numerical(m)) if m.contains("analytic steady state")));
    }

    #[test]
    fn trajectory_sampling_keeps_endpoints() {
        let p = LambdaParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let traj = evolve_lambda(&p, 3.0, EvolveOptions { sample_every: 7, steady_tol: 0.0 }).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert_eq!(*traj.times.last().unwrap(), 3.0);
        assert!(traj.states.iter().all(|s| s.rho33 >= -1e-12 && s.rho44 <= 1.0 + 1e-12));
    }

    #[test]
    fn inversion_limits() {
        let p = CavityAtomParams::new(3.0, 1.0, 0.5, 0.1, 0.0, 0.0).unwrap();
        for w in [-2.0, 0.0, 0.7] {
            let two_level = reflectivity(w, &p).unwrap();
            let eff = effective_reflectivity(w, &p, -1.0).unwrap();
            assert_eq!(two_level, eff);
            let empty = reflectivity(w, &p.empty_cavity()).unwrap();
            let dec = effective_reflectivity(w, &p, 0.0).unwrap();
            assert!((empty.big_r - dec.big_r).abs() < 1e-15);
        }
        assert!(effective_reflectivity(0.0, &p, 0.5).is_err());
    }

    #[test]
    fn inversion_correction_vanishes_with_gamma_over_kappa() {
        let mut last = f64::INFINITY;
        for ratio in [1e2, 1e3, 1e4] {
            let kappa: f64 = 1.0;
            let gamma = kappa / ratio;
            let g = (gamma * kappa).sqrt() * 3.0;
            let lp = LambdaParams::new(g, kappa, 0.03 * gamma, 0.97 * gamma).unwrap();
            let (pg1, _) = steady_populations(&lp).unwrap();
            let cp = CavityAtomParams::new(g, 0.5 * kappa, 0.5 * kappa, gamma, 0.0, 0.0).unwrap();
            let diff = (effective_reflectivity(0.0, &cp, -pg1).unwrap().big_r - reflectivity(0.0, &cp).unwrap().big_r).abs();
            assert!(diff < last);
            assert!(diff < 10.0 / ratio);
            last = diff;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn populations_sum_to_one(g in 0.0f64..10.0, k in 1e-3f64..10.0, g1 in 0.0f64..5.0, g2 in 0.0f64..5.0) {
            let p = LambdaParams::new(g, k, g1, g2).unwrap();
            let (a, b) = steady_populations(&p).unwrap();
            prop_assert!((a + b - 1.0).abs() < 1e-12);
            prop_assert!(a >= 0.0 && b >= 0.0);
        }

        #[test]
        fn pg2_increases_with_gamma2_for_narrow_emitters(g in 0.1f64..10.0, k in 0.1f64..10.0, s1 in 0.0f64..1.0, s2 in 0.01f64..1.0) {
            // Total linewidth stays below a tenth of both κ and 4g²/κ.
            let cap = 0.1 * k.min(4.0 * g * g / k) / 1.5;
            let (g1, g2) = (0.5 * s1 * cap, 0.5 * s2 * cap);
            let a = steady_populations(&LambdaParams::new(g, k, g1, g2).unwrap()).unwrap().1;
            let b = steady_populations(&LambdaParams::new(g, k, g1, g2 * 1.5).unwrap()).unwrap().1;
            prop_assert!(b > a);
        }

        #[test]
        fn pg2_slope_sign(g in 0.1f64..10.0, k in 0.1f64..10.0, g1 in 0.0f64..5.0, g2 in 0.01f64..5.0) {
            let p = |g2: f64| steady_populations(&LambdaParams::new(g, k, g1, g2).unwrap()).unwrap().1;
            let gamma = g1 + g2;
            let slope = 1.0 / g2 - 1.0 / (gamma + k) - k / (4.0 * g * g + gamma * k);
            let h = 1e-6 * g2;
            let diff = p(g2 + h) - p(g2 - h);
            prop_assume!(slope.abs() > 1e-3 / g2);
            prop_assert_eq!(diff > 0.0, slope > 0.0);
        }

        #[test]
        fn ode_matches_steady_state(g in 0.2f64..5.0, k in 0.2f64..5.0, g1 in 0.1f64..3.0, g2 in 0.1f64..3.0) {
            let p = LambdaParams::new(g, k, g1, g2).unwrap();
            let s = run_to_steady(&p);
            let (pg1, pg2) = steady_populations(&p).unwrap();
            prop_assert!((s.rho11 - pg1).abs() < 1e-6);
            prop_assert!((s.rho22 - pg2).abs() < 1e-6);
        }
    }
}
