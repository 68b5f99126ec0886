//! Microwave retrieval: Purcell emission, Kraus channels for transmon
//! relaxation and spin dephasing, and the fidelity of the heralded Bell pair.

use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-10;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Square, Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::input("density matrix must be square and non-empty"));
        }
        let herm_err = (&entries - entries.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm_err > HERMITIAN_TOL {
            return Err(Error::domain(format!("density matrix not Hermitian (deviation {herm_err:.2e})")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::domain(format!("density matrix trace {tr} != 1")));
        }
        let min_eig = entries.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -PSD_TOL {
            return Err(Error::domain(format!("density matrix not positive (min eigenvalue {min_eig:.2e})")));
        }
        Ok(Self { entries })
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain("state vector must be normalized"));
        }
        Self::new(&v * v.adjoint())
    }

    /// `(|E⟩|1⟩ + |L⟩|0⟩)/√2` with the optical time bin first.
    pub fn bell() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // |E⟩ = |0⟩_o, |L⟩ = |1⟩_o; index = 2·o + m
        let psi = [cx(0.0), cx(s), cx(s), cx(0.0)];
        Self::pure(&psi).expect("normalized")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &[Complex64]) -> Result<f64> {
        if psi.len() != self.dim() {
            return Err(Error::input("state dimension mismatch"));
        }
        let v = nalgebra::DVector::from_column_slice(psi);
        Ok((v.adjoint() * &self.entries * &v)[(0, 0)].re)
    }
}

/// Set of Kraus operators acting on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| Error::input("channel needs at least one operator"))?;
        let d = first.nrows();
        if operators.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::input("Kraus operators must be square and of equal size"));
        }
        let sum = operators.iter().fold(CMatrix::zeros(d, d), |acc, m| acc + m.adjoint() * m);
        let err = (sum - CMatrix::identity(d, d)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if err > COMPLETENESS_TOL {
            return Err(Error::domain(format!("Kraus operators incomplete (deviation {err:.2e})")));
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self { operators: vec![CMatrix::identity(dim, dim)] }
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// `F ∘ self`: apply `self` first, then `after`.
    pub fn then(&self, after: &KrausChannel) -> Result<Self> {
        if self.dim() != after.dim() {
            return Err(Error::input("cannot compose channels of different dimension"));
        }
        let ops = after
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .collect();
        Self::new(ops)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// `M₀ = √(1−p)I`, `M₁ = diag(√p, 0)`, `M₂ = diag(0, √p)`.
pub fn dephasing_channel(p_d: f64) -> Result<KrausChannel> {
    check_probability(p_d)?;
    if p_d == 0.0 {
        return Ok(KrausChannel::identity(2));
    }
    let s = p_d.sqrt();
    KrausChannel::new(vec![
        CMatrix::identity(2, 2) * cx((1.0 - p_d).sqrt()),
        CMatrix::from_row_slice(2, 2, &[cx(s), cx(0.0), cx(0.0), cx(0.0)]),
        CMatrix::from_row_slice(2, 2, &[cx(0.0), cx(0.0), cx(0.0), cx(s)]),
    ])
}

/// `M₀ = diag(1, √(1−p))`, `M₁ = √p |0⟩⟨1|`.
pub fn amplitude_damping_channel(p_a: f64) -> Result<KrausChannel> {
    check_probability(p_a)?;
    if p_a == 0.0 {
        return Ok(KrausChannel::identity(2));
    }
    KrausChannel::new(vec![
        CMatrix::from_row_slice(2, 2, &[cx(1.0), cx(0.0), cx(0.0), cx((1.0 - p_a).sqrt())]),
        CMatrix::from_row_slice(2, 2, &[cx(0.0), cx(p_a.sqrt()), cx(0.0), cx(0.0)]),
    ])
}

/// Embeds `m` acting on `subsystem` into the full tensor-product space.
fn embed(m: &CMatrix, subsystem: usize, dims: &[usize]) -> CMatrix {
    dims.iter().enumerate().fold(CMatrix::identity(1, 1), |acc, (k, &d)| {
        if k == subsystem {
            acc.kronecker(m)
        } else {
            acc.kronecker(&CMatrix::identity(d, d))
        }
    })
}

/// `Σ (I⊗M) ρ (I⊗M)†` with `M` acting on `subsystem` of the product space
/// with factor dimensions `dims`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix, subsystem: usize, dims: &[usize]) -> Result<DensityMatrix> {
    if dims.is_empty() || subsystem >= dims.len() {
        return Err(Error::input("subsystem index out of range"));
    }
    if dims.iter().product::<usize>() != rho.dim() {
        return Err(Error::input("subsystem dimensions do not match the state"));
    }
    if dims[subsystem] != ch.dim() {
        return Err(Error::input("channel dimension does not match the subsystem"));
    }
    let out = ch.operators.iter().fold(CMatrix::zeros(rho.dim(), rho.dim()), |acc, m| {
        let big = embed(m, subsystem, dims);
        acc + &big * &rho.entries * big.adjoint()
    });
    // Re-symmetrize to absorb rounding before validation.
    DensityMatrix::new((&out + out.adjoint()) * cx(0.5))
}

/// `Γ = 4g_m²/κ_m`. Logs a warning when `g_m > κ_m`.
pub fn purcell_rate(g_m: f64, kappa_m: f64) -> Result<f64> {
    if !(kappa_m > 0.0) || !(g_m >= 0.0) {
        return Err(Error::domain("need kappa_m > 0 and g_m >= 0"));
    }
    if g_m > kappa_m {
        log::warn!("outside Purcell regime: g_m = {g_m:e} > kappa_m = {kappa_m:e}");
    }
    Ok(4.0 * g_m * g_m / kappa_m)
}

/// Purcell rate at the matched condition κ_m = 4g_m, i.e. Γ = g_m.
pub fn matched_rate(g_m: f64) -> f64 {
    g_m
}

/// `1 − e^{−Γτ}`.
pub fn retrieval_probability(gamma: f64, tau: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !(tau >= 0.0) {
        return Err(Error::domain("gamma and tau must be >= 0"));
    }
    Ok(-(-gamma * tau).exp_m1())
}

/// Timing parameters of one entanglement attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTimings {
    pub tau: f64,
    pub t_reset: f64,
    pub t1_transmon: f64,
    /// May be `f64::INFINITY`.
    pub t2_spin: f64,
    pub gamma_purcell: f64,
}

impl ProtocolTimings {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.tau, self.t_reset, self.gamma_purcell];
        if finite.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain("tau, t_reset and gamma must be finite and >= 0"));
        }
        if !(self.t1_transmon > 0.0) || !(self.t2_spin > 0.0) {
            return Err(Error::domain("T1 and T2 must be > 0"));
        }
        Ok(())
    }

    /// `(p_a, p_d) = (1 − e^{−τ/T₁}, 1 − e^{−τ/T₂})`.
    pub fn error_probabilities(&self) -> (f64, f64) {
        (-(-self.tau / self.t1_transmon).exp_m1(), -(-self.tau / self.t2_spin).exp_m1())
    }
}

/// `¼(1 + (1−p_a) + 2√(1−p_a)(1−p_d))`.
pub fn fidelity_from_probabilities(p_a: f64, p_d: f64) -> f64 {
    0.25 * (1.0 + (1.0 - p_a) + 2.0 * (1.0 - p_a).sqrt() * (1.0 - p_d))
}

/// `F = ¼(1 + e^{−τ/T₁} + 2e^{−τ/2T₁}e^{−τ/T₂})`.
pub fn entanglement_fidelity_closed(t: &ProtocolTimings) -> Result<f64> {
    t.validate()?;
    let a = (-t.tau / t.t1_transmon).exp();
    let d = (-t.tau / t.t2_spin).exp();
    Ok(0.25 * (1.0 + a + 2.0 * (-0.5 * t.tau / t.t1_transmon).exp() * d))
}

/// Fidelity of the Bell pair after dephasing then amplitude damping on the
/// microwave half, by explicit channel application.
pub fn entanglement_fidelity_numeric(p_a: f64, p_d: f64) -> Result<f64> {
    let channel = dephasing_channel(p_d)?.then(&amplitude_damping_channel(p_a)?)?;
    let bell = DensityMatrix::bell();
    let out = apply_channel(&channel, &bell, 1, &[2, 2])?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    out.fidelity_with_pure(&[cx(0.0), cx(s), cx(s), cx(0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;
    use proptest::prelude::*;

    fn timings(tau: f64, t1: f64, t2: f64) -> ProtocolTimings {
        ProtocolTimings { tau, t_reset: 10e-6, t1_transmon: t1, t2_spin: t2, gamma_purcell: 0.0 }
    }

    #[test]
    fn purcell_basics() {
        assert_eq!(purcell_rate(1.0, 4.0).unwrap(), 1.0);
        assert_eq!(purcell_rate(0.0, 4.0).unwrap(), 0.0);
        assert!(purcell_rate(1.0, 0.0).is_err());
        let g = hz_to_rad(0.904e3);
        assert!((matched_rate(g) / hz_to_rad(0.9e3) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn retrieval_probability_values() {
        assert_eq!(retrieval_probability(1.0, 0.0).unwrap(), 0.0);
        assert!((retrieval_probability(1e9, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let p = retrieval_probability(hz_to_rad(3.9e3), 26e-6).unwrap();
        assert!((p - 0.471).abs() < 1e-3, "{p}");
    }

    #[test]
    fn fidelity_anchors() {
        let f = entanglement_fidelity_closed(&timings(107e-6, 1e-3, 1e-3)).unwrap();
        assert!((f - 0.90).abs() < 3e-3, "{f}");
        let f = entanglement_fidelity_closed(&timings(153e-6, 1e-3, 2.5e-3)).unwrap();
        assert!((f - 0.90).abs() < 3e-3, "{f}");
        assert_eq!(entanglement_fidelity_closed(&timings(0.0, 1e-3, 1e-3)).unwrap(), 1.0);
        let inf = entanglement_fidelity_closed(&timings(107e-6, 1e-3, f64::INFINITY)).unwrap();
        assert!((inf - 0.9485).abs() < 1e-3);
    }

    #[test]
    fn identity_channels_at_zero() {
        assert_eq!(dephasing_channel(0.0).unwrap().operators().len(), 1);
        assert_eq!(amplitude_damping_channel(0.0).unwrap().operators().len(), 1);
        assert!(dephasing_channel(1.5).is_err());
        assert!(amplitude_damping_channel(-0.1).is_err());
    }

    #[test]
    fn full_dephasing_kills_coherence() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(&[cx(s), cx(s)]).unwrap();
        let out = apply_channel(&dephasing_channel(1.0).unwrap(), &plus, 0, &[2]).unwrap();
        assert!(out.entries()[(0, 1)].norm() < 1e-15);
        assert!((out.entries()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn full_damping_relaxes_to_ground() {
        let one = DensityMatrix::pure(&[cx(0.0), cx(1.0)]).unwrap();
        let out = apply_channel(&amplitude_damping_channel(1.0).unwrap(), &one, 0, &[2]).unwrap();
        assert!((out.entries()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_channel_preserves_state() {
        let bell = DensityMatrix::bell();
        let out = apply_channel(&KrausChannel::identity(2), &bell, 0, &[2, 2]).unwrap();
        assert_eq!(out, bell);
    }

    #[test]
    fn dimension_mismatch() {
        let bell = DensityMatrix::bell();
        let ch = dephasing_channel(0.3).unwrap();
        assert!(apply_channel(&ch, &bell, 2, &[2, 2]).is_err());
        assert!(apply_channel(&ch, &bell, 0, &[2, 3]).is_err());
        assert!(apply_channel(&KrausChannel::identity(3), &bell, 0, &[2, 2]).is_err());
    }

    #[test]
    fn invalid_density_matrices() {
        let m = CMatrix::from_row_slice(2, 2, &[cx(1.0), cx(0.0), cx(0.0), cx(1.0)]);
        assert!(DensityMatrix::new(m).is_err());
        let m = CMatrix::from_row_slice(2, 2, &[cx(1.5), cx(0.0), cx(0.0), cx(-0.5)]);
        assert!(DensityMatrix::new(m).is_err());
        let m = CMatrix::from_row_slice(2, 2, &[cx(0.5), cx(0.3), cx(0.1), cx(0.5)]);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let half = CMatrix::identity(2, 2) * cx(0.5);
        assert!(KrausChannel::new(vec![half]).is_err());
    }

    proptest! {
        #[test]
        fn channel_matches_closed_form(p_a in 0.0f64..=1.0, p_d in 0.0f64..=1.0) {
            let numeric = entanglement_fidelity_numeric(p_a, p_d).unwrap();
            prop_assert!((numeric - fidelity_from_probabilities(p_a, p_d)).abs() < 1e-12);
        }

        #[test]
        fn channels_complete_and_positive(p in 0.0f64..=1.0, a in 0.0f64..1.0, phi in 0.0f64..6.3) {
            let psi = [cx(a.sqrt()), Complex64::from_polar((1.0 - a).sqrt(), phi)];
            let rho = DensityMatrix::pure(&psi).unwrap();
            for ch in [dephasing_channel(p).unwrap(), amplitude_damping_channel(p).unwrap()] {
                prop_assert!(apply_channel(&ch, &rho, 0, &[2]).is_ok());
            }
        }

        #[test]
        fn fidelity_monotone_and_bounded(tau in 0.0f64..1e-2, dt in 1e-7f64..1e-3, t1 in 1e-4f64..1e-2, t2 in 1e-4f64..1.0) {
            let a = entanglement_fidelity_closed(&timings(tau, t1, t2)).unwrap();
            let b = entanglement_fidelity_closed(&timings(tau + dt, t1, t2)).unwrap();
            prop_assert!(b <= a);
            prop_assert!(b >= 0.25);
        }

        #[test]
        fn retrieval_concave(g in 1e2f64..1e5, tau in 1e-7f64..1e-3, dt in 1e-7f64..1e-4) {
            let p0 = retrieval_probability(g, tau).unwrap();
            let p1 = retrieval_probability(g, tau + dt).unwrap();
            let p2 = retrieval_probability(g, tau + 2.0 * dt).unwrap();
            prop_assert!(p1 >= p0);
            prop_assert!(p2 - p1 <= p1 - p0 + 1e-15);
        }
    }
}
