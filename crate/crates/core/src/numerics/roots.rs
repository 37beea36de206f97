//! Bracketed bisection. Every root used in the crate is isolated by a
//! guaranteed sign change first, so plain bisection is both sufficient and
//! immune to the convergence surprises of faster open methods.

use crate::error::{Error, Result};

/// Refine a root of `f` inside `[lo, hi]`, which must bracket a sign change.
/// Stops when the bracket width falls below `xtol` (absolute).
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::RootFinding(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{lo}, {hi}] (f = {fa:.3e}, {fb:.3e})"
        )));
    }
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        if b - a <= xtol || m <= a || m >= b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::RootFinding(format!(
        "bisection did not converge below {xtol:.3e} on [{lo}, {hi}]"
    )))
}

const MAX_ITER: usize = 200;
