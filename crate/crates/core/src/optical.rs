//! Optical cavity coupling from a sampled field profile.

use crate::constants::{EPSILON_0, HBAR};
use crate::{Error, Result};

/// Permittivity and |E|² on a rectilinear grid. Values are stored with
/// index `(i·ny + j)·nz + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    eps: Vec<f64>,
    e2: Vec<f64>,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::input(format!("axis {name} needs at least 2 points")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::input(format!("axis {name} has non-finite coordinates")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::input(format!("axis {name} must be strictly increasing")));
    }
    Ok(())
}

impl FieldGrid {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>, eps: Vec<f64>, e2: Vec<f64>) -> Result<Self> {
        check_axis("x", &x)?;
        check_axis("y", &y)?;
        check_axis("z", &z)?;
        let n = x
            .len()
            .checked_mul(y.len())
            .and_then(|v| v.checked_mul(z.len()))
            .ok_or_else(|| Error::input("grid too large"))?;
        if eps.len() != n || e2.len() != n {
            return Err(Error::input(format!(
                "grid shape {}x{}x{} needs {n} values, got eps={} e2={}",
                x.len(),
                y.len(),
                z.len(),
                eps.len(),
                e2.len()
            )));
        }
        if eps.iter().any(|v| !(*v >= 1.0) || !v.is_finite()) {
            return Err(Error::input("permittivity must be finite and >= 1"));
        }
        if e2.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::input("|E|^2 must be finite and >= 0"));
        }
        Ok(Self { x, y, z, eps, e2 })
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.x.len(), self.y.len(), self.z.len()]
    }

    pub fn axes(&self) -> [&[f64]; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn e2(&self) -> &[f64] {
        &self.e2
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.y.len() + j) * self.z.len() + k
    }

    fn energy_max(&self) -> Result<f64> {
        let max = self.eps.iter().zip(&self.e2).map(|(e, f)| e * f).fold(0.0f64, f64::max);
        if max <= 0.0 {
            return Err(Error::domain("field has zero maximum energy density"));
        }
        Ok(max)
    }

    /// `u(r) = √(ε|E|² / max ε|E|²)` at every node.
    pub fn mode_function(&self) -> Result<Vec<f64>> {
        let max = self.energy_max()?;
        Ok(self.eps.iter().zip(&self.e2).map(|(e, f)| (e * f / max).sqrt()).collect())
    }

    /// `u` at the grid node nearest to `point`.
    pub fn u_at(&self, point: [f64; 3]) -> Result<f64> {
        let max = self.energy_max()?;
        let i = nearest(&self.x, point[0]);
        let j = nearest(&self.y, point[1]);
        let k = nearest(&self.z, point[2]);
        let n = self.index(i, j, k);
        Ok((self.eps[n] * self.e2[n] / max).sqrt())
    }
}

fn nearest(axis: &[f64], v: f64) -> usize {
    match axis.binary_search_by(|a| a.total_cmp(&v)) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i == axis.len() => axis.len() - 1,
        Err(i) => {
            if v - axis[i - 1] <= axis[i] - v {
                i - 1
            } else {
                i
            }
        }
    }
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    let mut w = vec![0.0; n];
    for k in 0..n - 1 {
        let h = 0.5 * (axis[k + 1] - axis[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

/// `V = ∫ u² d³r` by the trapezoidal rule on the grid.
pub fn mode_volume(grid: &FieldGrid) -> Result<f64> {
    let max = grid.energy_max()?;
    let [wx, wy, wz] = [&grid.x, &grid.y, &grid.z].map(|a| trapezoid_weights(a));
    let mut v = 0.0;
    for (i, ax) in wx.iter().enumerate() {
        for (j, ay) in wy.iter().enumerate() {
            let base = grid.index(i, j, 0);
            let row: f64 = wz
                .iter()
                .enumerate()
                .map(|(k, az)| az * grid.eps[base + k] * grid.e2[base + k])
                .sum();
            v += ax * ay * row;
        }
    }
    Ok(v / max)
}

/// `g_o = √(μ²ω_o/(2ε₀ℏV)) · u`.
pub fn coupling_g(mu: f64, omega_o: f64, volume: f64, u_at_emitter: f64) -> Result<f64> {
    if !(mu >= 0.0) || !(omega_o > 0.0) || !(volume > 0.0) {
        return Err(Error::domain("need mu >= 0, omega_o > 0, volume > 0"));
    }
    if !(0.0..=1.0).contains(&u_at_emitter) {
        return Err(Error::domain("mode function must lie in [0, 1]"));
    }
    Ok((mu * mu * omega_o / (2.0 * EPSILON_0 * HBAR * volume)).sqrt() * u_at_emitter)
}

/// `C = g²/(κγ)`.
pub fn cooperativity(g: f64, kappa: f64, gamma: f64) -> Result<f64> {
    if !(kappa > 0.0) || !(gamma > 0.0) {
        return Err(Error::domain("kappa and gamma must be > 0"));
    }
    Ok(g * g / (kappa * gamma))
}

/// Total loss at critical coupling, `κ_o = κ_i + κ_e ≈ 2κ_i`.
pub fn critical_kappa(kappa_i: f64) -> f64 {
    2.0 * kappa_i
}

/// Intrinsic loss κ_{o,i}/2π (Hz) versus cavity-to-metal separation (nm).
pub const METAL_LOSS_TABLE: [(f64, f64); 4] = [(100.0, 230e9), (150.0, 77.7e9), (200.0, 36.5e9), (500.0, 25.8e9)];

/// κ_{o,i}/2π at separation `d_nm`, interpolating ln κ linearly in d.
pub fn intrinsic_loss_over_2pi(d_nm: f64) -> Result<f64> {
    let (lo, hi) = (METAL_LOSS_TABLE[0].0, METAL_LOSS_TABLE[METAL_LOSS_TABLE.len() - 1].0);
    if !(d_nm >= lo && d_nm <= hi) {
        return Err(Error::domain(format!("separation {d_nm} nm outside table range [{lo}, {hi}]")));
    }
    let seg = METAL_LOSS_TABLE
        .windows(2)
        .find(|w| d_nm <= w[1].0)
        .expect("range checked");
    let ((d0, k0), (d1, k1)) = (seg[0], seg[1]);
    if d_nm == d1 {
        return Ok(k1);
    }
    let t = (d_nm - d0) / (d1 - d0);
    Ok((k0.ln() + t * (k1.ln() - k0.ln())).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{wavelength_to_rad, DEBYE};
    use crate::numeric::linspace;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn gaussian_grid(n: usize, s: [f64; 3]) -> FieldGrid {
        let axes: Vec<Vec<f64>> = s.iter().map(|si| linspace(-6.0 * si, 6.0 * si, n)).collect();
        let mut e2 = Vec::with_capacity(n * n * n);
        for x in &axes[0] {
            for y in &axes[1] {
                for z in &axes[2] {
                    e2.push((-(x * x) / (2.0 * s[0] * s[0]) - y * y / (2.0 * s[1] * s[1]) - z * z / (2.0 * s[2] * s[2])).exp());
                }
            }
        }
        FieldGrid::new(axes[0].clone(), axes[1].clone(), axes[2].clone(), vec![1.0; n * n * n], e2).unwrap()
    }

    #[test]
    fn uniform_box() {
        let g = FieldGrid::new(vec![0.0, 2.0], vec![0.0, 1.0, 3.0], vec![-1.0, 1.0], vec![5.76; 12], vec![2.0; 12]).unwrap();
        assert!((mode_volume(&g).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_volume() {
        // u² is the Gaussian itself: V = (2π)^{3/2} σxσyσz.
        let s = [1e-7, 2e-7, 3e-7];
        let v = mode_volume(&gaussian_grid(61, s)).unwrap();
        let expected = (2.0 * PI).powf(1.5) * s[0] * s[1] * s[2];
        assert!((v / expected - 1.0).abs() < 1e-6, "{}", v / expected);
    }

    #[test]
    fn refinement_is_stable() {
        let s = [1e-7, 1e-7, 1e-7];
        let coarse = mode_volume(&gaussian_grid(25, s)).unwrap();
        let fine = mode_volume(&gaussian_grid(49, s)).unwrap();
        assert!((coarse / fine - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_field_rejected() {
        let g = FieldGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0; 8], vec![0.0; 8]).unwrap();
        assert!(matches!(mode_volume(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(FieldGrid::new(vec![0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0; 4], vec![1.0; 4]).is_err());
        assert!(FieldGrid::new(vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0; 8], vec![1.0; 8]).is_err());
        assert!(FieldGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.5; 8], vec![1.0; 8]).is_err());
        assert!(FieldGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0; 7], vec![1.0; 8]).is_err());
    }

    #[test]
    fn mode_function_peaks_at_one() {
        let g = gaussian_grid(21, [1.0, 1.0, 1.0]);
        let u = g.mode_function().unwrap();
        assert_eq!(u.iter().cloned().fold(0.0, f64::max), 1.0);
        assert!(u.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(g.u_at([0.0, 0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn coupling_constant_by_constant() {
        let lambda = 620e-9;
        let omega = wavelength_to_rad(lambda);
        let mu = 7.3 * DEBYE;
        let v = lambda.powi(3);
        let g = coupling_g(mu, omega, v, 1.0).unwrap();
        let by_hand = (7.3 * 3.34e-30) * (omega / (2.0 * 8.8541878128e-12 * 1.054571817e-34 * v)).sqrt();
        assert!((g / by_hand - 1.0).abs() < 1e-12);
        assert_eq!(coupling_g(mu, omega, v, 0.0).unwrap(), 0.0);
        let g2 = coupling_g(mu, omega, 2.0 * v, 1.0).unwrap();
        assert!((g / g2 - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn loss_table() {
        assert_eq!(intrinsic_loss_over_2pi(500.0).unwrap(), 25.8e9);
        assert!((intrinsic_loss_over_2pi(150.0).unwrap() - 77.7e9).abs() < 1.0);
        let mid = intrinsic_loss_over_2pi(175.0).unwrap();
        assert!((mid - (77.7e9f64 * 36.5e9).sqrt()).abs() / mid < 1e-12);
        assert!(intrinsic_loss_over_2pi(50.0).is_err());
        assert_eq!(critical_kappa(25.8e9), 51.6e9);
    }

    #[test]
    fn cooperativity_basics() {
        assert_eq!(cooperativity(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(cooperativity(1.0, 0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn cooperativity_halves_with_kappa(g in 0.0f64..1e10, k in 1e6f64..1e12, gm in 1e6f64..1e10) {
            let a = cooperativity(g, k, gm).unwrap();
            let b = cooperativity(g, 2.0 * k, gm).unwrap();
            prop_assert!((b - a / 2.0).abs() <= 1e-15 * a.max(1e-300));
        }

        #[test]
        fn volume_invariant_under_field_scale(scale in 1e-6f64..1e6) {
            let g = gaussian_grid(9, [1.0, 1.0, 1.0]);
            let e2: Vec<f64> = g.e2().iter().map(|v| v * scale).collect();
            let [x, y, z] = g.axes();
            let h = FieldGrid::new(x.to_vec(), y.to_vec(), z.to_vec(), g.eps().to_vec(), e2).unwrap();
            let (a, b) = (mode_volume(&g).unwrap(), mode_volume(&h).unwrap());
            prop_assert!((a / b - 1.0).abs() < 1e-12);
        }
    }
}
