//! Spherical Bessel functions, associated Laguerre polynomials, spherical
//! harmonics, and the root tables that quantize the eigenmode families.
//!
//! Roots are isolated by guaranteed sign-change brackets (interlacing of
//! consecutive-order Bessel zeros, dense scans for Laguerre) and refined by
//! bisection to [`ROOT_ABS_TOL`] on the abscissa, so the n-th root really is
//! the n-th: nothing can be skipped or counted twice.

use crate::error::{Error, Result};
use crate::numerics::roots::bisect;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest spherical Bessel order accepted.
pub const L_MAX: u32 = 50;

/// Largest associated Laguerre degree accepted.
pub const P_MAX: u32 = 100;

/// Absolute abscissa tolerance of refined roots.
pub const ROOT_ABS_TOL: f64 = 1e-12;

/// Spherical Bessel function of the first kind `j_l(x)` for `x >= 0`.
///
/// Upward recurrence where it is stable (`x >= l`), Miller-type downward
/// recurrence normalized against `j_0 = sin x / x` otherwise.
pub fn spherical_bessel_j(l: u32, x: f64) -> Result<f64> {
    check_bessel_args(l, x)?;
    if x == 0.0 {
        return Ok(if l == 0 { 1.0 } else { 0.0 });
    }
    let j0 = x.sin() / x;
    if l == 0 {
        return Ok(j0);
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if l == 1 {
        return Ok(j1);
    }
    if x >= l as f64 {
        // upward recurrence: j_{k+1} = (2k+1)/x j_k - j_{k-1}
        let mut prev = j0;
        let mut cur = j1;
        for k in 1..l {
            let next = (2.0 * k as f64 + 1.0) / x * cur - prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    } else {
        // downward recurrence from well above l, rescaling to avoid overflow
        let start = l + 20 + x.ceil() as u32;
        let mut upper = 0.0_f64;
        let mut cur = f64::MIN_POSITIVE.sqrt();
        let mut at_l = 0.0;
        let mut rescales_after_l = 0i32;
        for k in (0..=start).rev() {
            let lower = (2.0 * k as f64 + 3.0) / x * cur - upper;
            upper = cur;
            cur = lower;
            // `cur` now holds f_k
            if k == l {
                at_l = cur;
                rescales_after_l = 0;
            }
            if cur.abs() > 1e250 {
                cur *= 1e-250;
                upper *= 1e-250;
                rescales_after_l += 1;
            }
        }
        // cur == f_0; j_l = f_l * (j_0 / f_0), undoing rescales applied after l
        Ok(at_l * 1e-250_f64.powi(rescales_after_l) * (j0 / cur))
    }
}

/// Derivative `j_l'(x)`, from `j_{l-1} - (l+1)/x j_l` (and `-j_1` for `l = 0`).
pub fn spherical_bessel_j_deriv(l: u32, x: f64) -> Result<f64> {
    check_bessel_args(l, x)?;
    if l == 0 {
        return Ok(-spherical_bessel_j(1, x)?);
    }
    if x == 0.0 {
        return Ok(if l == 1 { 1.0 / 3.0 } else { 0.0 });
    }
    Ok(spherical_bessel_j(l - 1, x)? - (l as f64 + 1.0) / x * spherical_bessel_j(l, x)?)
}

fn check_bessel_args(l: u32, x: f64) -> Result<()> {
    if l > L_MAX {
        return Err(Error::InvalidParameter(format!("bessel order {l} exceeds l_max = {L_MAX}")));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidParameter(format!("bessel argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// The `n`-th positive zero of `j_l` (`n >= 1`).
///
/// Zeros of `j_0` are exactly `n pi`; zeros of successive orders are isolated
/// by interlacing (`z_{l,i}` lies strictly between `z_{l-1,i}` and
/// `z_{l-1,i+1}`), bracketing each refinement with a guaranteed sign change.
pub fn spherical_bessel_zero(l: u32, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("zero index n must be >= 1".into()));
    }
    if l > L_MAX {
        return Err(Error::InvalidParameter(format!("bessel order {l} exceeds l_max = {L_MAX}")));
    }
    let mut zeros: Vec<f64> = (1..=n + l).map(|k| k as f64 * PI).collect();
    for level in 1..=l {
        let count = zeros.len() - 1;
        let mut next = Vec::with_capacity(count);
        for i in 0..count {
            let root = bisect(
                |x| spherical_bessel_j(level, x).unwrap_or(f64::NAN),
                zeros[i],
                zeros[i + 1],
                ROOT_ABS_TOL,
            )?;
            next.push(root);
        }
        zeros = next;
    }
    Ok(zeros[(n - 1) as usize])
}

/// Associated Laguerre polynomial `L_p^alpha(x)` (three-term recurrence).
pub fn assoc_laguerre(p: u32, alpha: f64, x: f64) -> Result<f64> {
    check_laguerre_args(p, alpha)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("laguerre argument must be finite, got {x}")));
    }
    let mut prev = 1.0;
    if p == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn check_laguerre_args(p: u32, alpha: f64) -> Result<()> {
    if p > P_MAX {
        return Err(Error::InvalidParameter(format!("laguerre degree {p} exceeds p_max = {P_MAX}")));
    }
    if !(alpha.is_finite() && alpha > -1.0) {
        return Err(Error::InvalidParameter(format!("laguerre alpha must exceed -1, got {alpha}")));
    }
    Ok(())
}

/// All `p` positive roots of `L_p^alpha`, in increasing order.
///
/// Roots live in `(0, 4p + 2 alpha + 2)`; the scan grid is uniform in
/// `sqrt(x)` because the small roots cluster near the origin.
pub fn assoc_laguerre_zeros(p: u32, alpha: f64) -> Result<Vec<f64>> {
    check_laguerre_args(p, alpha)?;
    if p < 1 {
        return Err(Error::InvalidParameter("laguerre zeros need degree p >= 1".into()));
    }
    let upper = 4.0 * p as f64 + 2.0 * alpha + 2.0;
    for density in [40usize, 160] {
        let n_scan = density * p as usize + 200;
        let mut roots = Vec::with_capacity(p as usize);
        let mut x_prev = 0.0;
        let mut f_prev = assoc_laguerre(p, alpha, 0.0)?; // = binom(p+alpha, p) > 0
        for i in 1..=n_scan {
            let u = i as f64 / n_scan as f64;
            let x = upper * u * u;
            let f = assoc_laguerre(p, alpha, x)?;
            if f == 0.0 {
                roots.push(x);
            } else if f.signum() != f_prev.signum() && f_prev != 0.0 {
                let root = bisect(
                    |y| assoc_laguerre(p, alpha, y).unwrap_or(f64::NAN),
                    x_prev,
                    x,
                    ROOT_ABS_TOL,
                )?;
                roots.push(root);
            }
            x_prev = x;
            f_prev = f;
        }
        if roots.len() == p as usize {
            return Ok(roots);
        }
    }
    Err(Error::RootFinding(format!(
        "found fewer than {p} sign changes for L_{p}^{alpha}; evaluation unstable"
    )))
}

/// The `s`-th positive root of `L_p^alpha` (`1 <= s <= p`).
pub fn assoc_laguerre_zero(p: u32, alpha: f64, s: u32) -> Result<f64> {
    if s < 1 || s > p {
        return Err(Error::InvalidParameter(format!("root index s = {s} outside [1, {p}]")));
    }
    Ok(assoc_laguerre_zeros(p, alpha)?[(s - 1) as usize])
}

/// Orthonormal spherical harmonic `Y_lm(theta, phi)` with the Condon-Shortley
/// phase, so `Y_00 = (4 pi)^(-1/2)` and `int |Y_lm|^2 dOmega = 1`.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidParameter(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    if l > L_MAX {
        return Err(Error::InvalidParameter(format!("harmonic degree {l} exceeds l_max = {L_MAX}")));
    }
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(Error::InvalidParameter("angles must be finite".into()));
    }
    let m_abs = m.unsigned_abs();
    let plm = normalized_assoc_legendre(l, m_abs, theta.cos(), theta.sin());
    let positive = plm * Complex64::from_polar(1.0, m_abs as f64 * phi);
    if m >= 0 {
        Ok(positive)
    } else {
        // Y_{l,-m} = (-1)^m conj(Y_{l,m})
        let sign = if m_abs % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * positive.conj())
    }
}

/// Associated Legendre `P_l^m(cos theta)` normalized so that
/// `int |N_l^m e^(i m phi)|^2 dOmega = 1`, Condon-Shortley phase included.
fn normalized_assoc_legendre(l: u32, m: u32, cos_t: f64, sin_t: f64) -> f64 {
    // diagonal seed: N_m^m
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * sin_t;
    }
    if l == m {
        return pmm;
    }
    // first off-diagonal: N_{m+1}^m
    let mut prev = pmm;
    let mut cur = (2.0 * m as f64 + 3.0).sqrt() * cos_t * pmm;
    if l == m + 1 {
        return cur;
    }
    for k in (m + 2)..=l {
        let kf = k as f64;
        let mf = m as f64;
        let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
        let b = (((kf - 1.0) * (kf - 1.0) - mf * mf) / (4.0 * (kf - 1.0) * (kf - 1.0) - 1.0))
            .sqrt();
        let next = a * (cos_t * cur - b * prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Which special-function family a root table quantizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootFamily {
    SphericalBessel { l: u32 },
    AssocLaguerre { p: u32, alpha: f64 },
}

/// An ordered table of positive roots with its refinement tolerance.
#[derive(Debug, Clone)]
pub struct RootTable {
    pub family: RootFamily,
    pub roots: Vec<f64>,
    pub tolerance: f64,
}

impl RootTable {
    /// First `count` zeros of `j_l`.
    pub fn spherical_bessel(l: u32, count: u32) -> Result<Self> {
        let roots: Result<Vec<f64>> =
            (1..=count).map(|n| spherical_bessel_zero(l, n)).collect();
        let table =
            Self { family: RootFamily::SphericalBessel { l }, roots: roots?, tolerance: ROOT_ABS_TOL };
        table.validate(|x| spherical_bessel_j(l, x), |x| spherical_bessel_j_deriv(l, x))?;
        Ok(table)
    }

    /// All `p` roots of `L_p^alpha`.
    pub fn assoc_laguerre(p: u32, alpha: f64) -> Result<Self> {
        let roots = assoc_laguerre_zeros(p, alpha)?;
        let table =
            Self { family: RootFamily::AssocLaguerre { p, alpha }, roots, tolerance: ROOT_ABS_TOL };
        table.validate(
            |x| assoc_laguerre(p, alpha, x),
            |x| {
                // dL_p^a/dx = -L_{p-1}^{a+1}
                if p == 0 { Ok(0.0) } else { Ok(-assoc_laguerre(p - 1, alpha + 1.0, x)?) }
            },
        )?;
        Ok(table)
    }

    fn validate(
        &self,
        f: impl Fn(f64) -> Result<f64>,
        df: impl Fn(f64) -> Result<f64>,
    ) -> Result<()> {
        for w in self.roots.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::RootFinding(format!(
                    "root table not strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for &r in &self.roots {
            if !(r > 0.0) {
                return Err(Error::RootFinding(format!("non-positive root {r}")));
            }
            let residual = f(r)?.abs();
            let slope_scale = (df(r)?.abs() * r).max(1.0);
            if residual > 100.0 * self.tolerance * slope_scale {
                return Err(Error::RootFinding(format!(
                    "root {r} has residual {residual:.3e} above tolerance"
                )));
            }
        }
        Ok(())
    }
}
