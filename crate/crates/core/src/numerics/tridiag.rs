//! Complex tridiagonal (Thomas) solve for the implicit half of each
//! propagation step.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Solve `T x = rhs` where `T` has diagonal `diag`, subdiagonal `lower` and
/// superdiagonal `upper` (each of length `n - 1`).
pub fn solve(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    assert!(n >= 1 && lower.len() == n - 1 && upper.len() == n - 1 && rhs.len() == n);

    let mut c_prime = vec![Complex64::default(); n - 1];
    let mut x = vec![Complex64::default(); n];

    let mut pivot = diag[0];
    if pivot.norm_sqr() < PIVOT_FLOOR {
        return Err(Error::SolveBreakdown("zero pivot at row 0".into()));
    }
    x[0] = rhs[0] / pivot;
    for i in 1..n {
        c_prime[i - 1] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i - 1] * c_prime[i - 1];
        if pivot.norm_sqr() < PIVOT_FLOOR {
            return Err(Error::SolveBreakdown(format!("zero pivot at row {i}")));
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c_prime[i] * next;
    }
    Ok(x)
}

const PIVOT_FLOOR: f64 = 1e-300;
