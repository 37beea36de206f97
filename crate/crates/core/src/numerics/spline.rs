//! Natural cubic spline with continuous second derivative, used for
//! tabulated wall trajectories where the acceleration enters the potential
//! and must therefore be continuous.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots (natural: zero at both ends)
    d2: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::InvalidParameter("spline: x/y length mismatch".into()));
        }
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "spline needs at least 3 knots, got {n}"
            )));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "spline knots must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spline: non-finite sample".into()));
        }

        // Solve the tridiagonal system for interior second derivatives.
        let mut d2 = vec![0.0; n];
        let mut gamma = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h_lo = xs[i] - xs[i - 1];
            let h_hi = xs[i + 1] - xs[i];
            let sig = h_lo / (h_lo + h_hi);
            let p = sig * d2[i - 1] + 2.0;
            d2[i] = (sig - 1.0) / p;
            let slope_hi = (ys[i + 1] - ys[i]) / h_hi;
            let slope_lo = (ys[i] - ys[i - 1]) / h_lo;
            rhs[i] = (6.0 * (slope_hi - slope_lo) / (h_lo + h_hi) - sig * rhs[i - 1]) / p;
            gamma[i] = rhs[i];
        }
        let mut second = vec![0.0; n];
        for i in (1..n - 1).rev() {
            second[i] = d2[i] * second[i + 1] + gamma[i];
        }
        Ok(Self { xs, ys, d2: second })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        // binary search for the knot interval; clamp to the ends
        match self.xs.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.d2[i] + (b * b * b - b) * self.d2[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.d2[i + 1] - (3.0 * a * a - 1.0) * self.d2[i]) * h / 6.0
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.d2[i] + b * self.d2[i + 1]
    }
}
