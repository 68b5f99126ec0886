//! Small numerical building blocks shared by the physics modules.

use num_complex::Complex64;

/// Composite trapezoidal rule over an arbitrary (monotone) grid.
///
/// Returns 0 for fewer than two samples.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    _ if i == n - 1 => hi,
                    _ => (a + step * i as f64).exp(),
                })
                .collect()
        }
    }
}

/// `n` linearly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
///
/// Iterates until the bracket width falls below `rel_tol * |midpoint|`
/// (or `rel_tol` itself when the midpoint is zero). Returns the abscissa of
/// the best point evaluated.
pub fn golden_section_max<F>(f: F, a: f64, b: f64, rel_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    golden_section(f, a, b, |lo, hi| {
        let mid = 0.5 * (lo + hi);
        let scale = if mid == 0.0 { 1.0 } else { mid.abs() };
        hi - lo <= rel_tol * scale
    })
}

/// Golden-section maximisation terminated on an absolute bracket width.
pub fn golden_section_max_abs<F>(f: F, a: f64, b: f64, abs_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    golden_section(f, a, b, |lo, hi| hi - lo <= abs_tol)
}

fn golden_section<F, S>(mut f: F, mut a: f64, mut b: f64, done: S) -> f64
where
    F: FnMut(f64) -> f64,
    S: Fn(f64, f64) -> bool,
{
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // 400 iterations shrink any finite bracket far below f64 resolution.
    for _ in 0..400 {
        if done(a, b) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Index of the first maximum of `values` (ties resolve to the smallest index).
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Second derivative by the central five-point stencil.
pub fn second_derivative_5pt<F>(f: F, x: f64, h: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    (-f(x + 2.0 * h) + f(x + h) * 16.0 - f(x) * 30.0 + f(x - h) * 16.0 - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Relative difference `|a - b| / |b|`, falling back to the absolute
/// difference when `b` is zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let x = linspace(0.0, 2.0, 7);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        assert!((trapezoid(&x, &y) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_short_input() {
        assert_eq!(trapezoid(&[1.0], &[5.0]), 0.0);
        assert_eq!(trapezoid(&[], &[]), 0.0);
    }

    #[test]
    fn logspace_endpoints() {
        let v = logspace(1e-8, 1e-2, 200);
        assert_eq!(v.len(), 200);
        assert_eq!(v[0], 1e-8);
        assert_eq!(v[199], 1e-2);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let x = golden_section_max(|x| -(x - 1.234).powi(2), 0.0, 5.0, 1e-10);
        assert!((x - 1.234).abs() < 1e-8);
    }

    #[test]
    fn argmax_prefers_first_tie() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax(&[]), None);
    }

    #[test]
    fn five_point_second_derivative() {
        let d = second_derivative_5pt(|x| Complex64::new(x.sin(), x * x * x), 0.7, 1e-3);
        assert!((d.re + 0.7f64.sin()).abs() < 1e-8);
        assert!((d.im - 6.0 * 0.7).abs() < 1e-7);
    }
}
