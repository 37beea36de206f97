//! Adaptive Simpson quadrature and Gauss-Legendre rules.
//!
//! Everything here is deterministic: fixed orders, fixed recursion policy,
//! no randomness. Gauss-Legendre nodes come from Newton iteration on the
//! Legendre recurrence and are reproducible bit for bit on one platform.

use crate::error::{Error, Result};

/// Integrate `f` over `[a, b]` (signed; `a > b` flips the sign) by adaptive
/// Simpson refinement with the given relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite interval [{a}, {b}]")));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fl = f(lo);
    let fm = f(0.5 * (lo + hi));
    let fh = f(hi);
    let whole = simpson(lo, hi, fl, fm, fh);
    // Tolerance floor keeps near-zero integrals of non-zero functions from
    // demanding unbounded refinement.
    let scale = whole.abs().max((fl.abs() + fh.abs() + fm.abs()) * (hi - lo) * 0.25);
    let eps = rel_tol * scale.max(f64::MIN_POSITIVE);
    let value = adapt(&f, lo, hi, fl, fm, fh, whole, eps, MAX_DEPTH)?;
    Ok(sign * value)
}

const MAX_DEPTH: u32 = 60;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * eps || (b - a) < f64::EPSILON * (a.abs() + b.abs()) {
        return Ok(left + right + diff / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "max refinement depth reached on [{a}, {b}] (residual {:.3e})",
            diff.abs()
        )));
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?;
    Ok(l + r)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be at least 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = -p / d;
            x += dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                let (_, d2) = legendre_with_deriv(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_deriv(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// `n`-point Gauss-Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes = xs.iter().map(|x| mid + half * x).collect();
    let weights = ws.iter().map(|w| w * half).collect();
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn adaptive_simpson_matches_closed_forms() {
        let i = integrate(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((i - 1.0 / 3.0).abs() < 1e-12);
        let i = integrate(|x| x.sin(), 0.0, PI, 1e-12).unwrap();
        assert!((i - 2.0).abs() < 1e-11);
        // orientation flips the sign
        let i = integrate(|x| x.exp(), 1.0, 0.0, 1e-12).unwrap();
        assert!((i - (1.0 - std::f64::consts::E)).abs() < 1e-11);
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn adaptive_simpson_handles_peaked_integrand() {
        // int_0^1 dt / (1 + 100 (t - 1/2)^2)^... use a sharp Lorentzian with
        // known antiderivative: d/dx arctan(10(x-1/2))/10 = 1/(1+100(x-1/2)^2)
        let i = integrate(|x| 1.0 / (1.0 + 100.0 * (x - 0.5).powi(2)), 0.0, 1.0, 1e-11).unwrap();
        let exact = (10.0_f64 * 0.5).atan() / 10.0 * 2.0;
        assert!((i - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn gauss_legendre_low_orders() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - (0.6_f64).sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!(x[1].abs() < 1e-300);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // order n is exact through degree 2n-1
        let (x, w) = gauss_legendre(6);
        let int_x10: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((int_x10 - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn mapped_rule_integrates_on_interval() {
        let (x, w) = gauss_legendre_on(0.0, 2.0, 16);
        let val: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((val - (2.0_f64.exp() - 1.0)).abs() < 1e-12);
    }
}
