//! Exact diagonalization of the ¹¹⁷SnV⁻ ground-state Hamiltonian on
//! orbital ⊗ electron spin ⊗ nuclear spin.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

/// |γ_n/γ_e| for ¹¹⁷Sn (γ_n/2π = −15.17 MHz/T against 28 GHz/T). Both
/// gyromagnetic ratios are negative, so the two spin terms add.
pub const GAMMA_N_OVER_GAMMA_E_SN117: f64 = 15.168e6 / 28.0e9;

const DIM: usize = 8;
const GAP_TOL: f64 = 1e-6;
/// Eigenvalues closer than this (in units of λ) are treated as degenerate.
const CLUSTER_TOL: f64 = 1e-9;

/// Result of [`snv_dipole_numeric`].
#[derive(Debug, Clone, PartialEq)]
pub struct SnvNumeric {
    /// `|⟨r|S_x + (γ_n/γ_e) I_x|0⟩|` in units of γ_e.
    pub dipole: f64,
    /// Electron-spin part alone, `|⟨r|S_x|0⟩|`.
    pub electron_dipole: f64,
    /// `|E(0′) − E(0″)|` in Hz.
    pub qubit_splitting: f64,
    /// All eight eigenvalues in Hz, ascending.
    pub eigenvalues: Vec<f64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> [DMatrix<Complex64>; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn kron3(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, d: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b).kronecker(d)
}

/// Basis index for orbital (0 = +L, 1 = −L), electron (0 = ↑, 1 = ↓) and
/// nuclear (0 = ⇑, 1 = ⇓) states.
fn idx(orb: usize, s: usize, n: usize) -> usize {
    4 * orb + 2 * s + n
}

/// Strain-mixed state of the lower manifold with electron spin `s`:
/// Ψ₃ (s = ↑) or Ψ₄ (s = ↓), tensored with nuclear state `n`.
fn lower_state(s: usize, n: usize, c1: f64, c2: f64, phase: Complex64) -> DVector<Complex64> {
    let mut v = DVector::from_element(DIM, c(0.0, 0.0));
    if s == 0 {
        v[idx(0, 0, n)] = phase.conj() * c2;
        v[idx(1, 0, n)] = c(c1, 0.0);
    } else {
        // e^{−iφ} makes this an exact eigenvector of H₀ for any strain angle.
        v[idx(0, 1, n)] = phase.conj() * c1;
        v[idx(1, 1, n)] = c(c2, 0.0);
    }
    v
}

/// Exact-diagonalization oracle for the ¹¹⁷SnV⁻ microwave dipole.
///
/// All energies in Hz. Builds
/// `H = ½λσ_z^Lσ_z^S − ½(α_x σ_x^L + α_y σ_y^L) + ¼A∥σ_z^Sσ_z^I + ¼A⊥(σ_x^Sσ_x^I + σ_y^Sσ_y^I)`
/// and identifies the readout state (aligned electron and nuclear spin) and
/// the qubit states by overlap with the strain-mixed zeroth-order states.
pub fn snv_dipole_numeric(alpha_x: f64, alpha_y: f64, lambda_so: f64, a_par: f64, a_perp: f64) -> Result<SnvNumeric> {
    if !(lambda_so > 0.0) || !lambda_so.is_finite() {
        return Err(Error::domain("spin-orbit lambda must be > 0"));
    }
    if ![alpha_x, alpha_y, a_par, a_perp].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("strain and hyperfine constants must be finite"));
    }
    // Work in units of λ.
    let (ax, ay, ap, at) = (alpha_x / lambda_so, alpha_y / lambda_so, a_par / lambda_so, a_perp / lambda_so);
    let [id, sx, sy, sz] = pauli();
    let h = kron3(&sz, &sz, &id) * c(0.5, 0.0)
        - (kron3(&sx, &id, &id) * c(ax, 0.0) + kron3(&sy, &id, &id) * c(ay, 0.0)) * c(0.5, 0.0)
        + kron3(&id, &sz, &sz) * c(0.25 * ap, 0.0)
        + (kron3(&id, &sx, &sx) + kron3(&id, &sy, &sy)) * c(0.25 * at, 0.0);

    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..DIM).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors: Vec<DVector<Complex64>> = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();

    if values[4] - values[3] < GAP_TOL {
        return Err(Error::Numerical("manifold identification ambiguous".into()));
    }

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..DIM {
        match clusters.last_mut() {
            Some(cl) if values[k] - values[*cl.last().unwrap()] < CLUSTER_TOL => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }

    let alpha = ax.hypot(ay);
    let delta = alpha.hypot(1.0);
    let c1 = ((delta + 1.0) / (2.0 * delta)).sqrt();
    let c2 = ((delta - 1.0) / (2.0 * delta)).sqrt();
    let phase = if alpha == 0.0 { c(1.0, 0.0) } else { c(ax / alpha, ay / alpha) };

    let readout = lower_state(0, 0, c1, c2, phase);
    let psi3_down = lower_state(0, 1, c1, c2, phase);
    let psi4_up = lower_state(1, 0, c1, c2, phase);
    let q0 = (&psi3_down + &psi4_up) * c(1.0 / SQRT_2, 0.0);
    let q1 = (&psi3_down - &psi4_up) * c(1.0 / SQRT_2, 0.0);

    let project = |target: &DVector<Complex64>| -> Result<(DVector<Complex64>, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (ci, cl) in clusters.iter().enumerate() {
            let w: f64 = cl.iter().map(|&k| vectors[k].dotc(target).norm_sqr()).sum();
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((ci, w));
            }
        }
        let (ci, w) = best.expect("eight eigenvalues");
        if w < 0.5 {
            return Err(Error::Numerical("manifold identification ambiguous".into()));
        }
        let cl = &clusters[ci];
        let mut v = DVector::from_element(DIM, c(0.0, 0.0));
        for &k in cl {
            v += &vectors[k] * vectors[k].dotc(target);
        }
        let norm = v.norm();
        let energy = cl.iter().map(|&k| values[k]).sum::<f64>() / cl.len() as f64;
        Ok((v / c(norm, 0.0), energy))
    };

    let (r, _) = project(&readout)?;
    let (zero, e0) = project(&q0)?;
    let (_, e1) = project(&q1)?;

    let half = c(0.5, 0.0);
    let s_x = kron3(&id, &sx, &id) * half;
    let i_x = kron3(&id, &id, &sx) * half;
    let electron = r.dotc(&(&s_x * &zero));
    let nuclear = r.dotc(&(&i_x * &zero));
    Ok(SnvNumeric {
        dipole: (electron + nuclear * GAMMA_N_OVER_GAMMA_E_SN117).norm(),
        electron_dipole: electron.norm(),
        qubit_splitting: (e0 - e1).abs() * lambda_so,
        eigenvalues: values.iter().map(|v| v * lambda_so).collect(),
    })
}
