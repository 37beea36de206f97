//! Wall-motion laws `a(t)` and every kinematic quantity derived from them:
//! the rates `a_dot`, `a_ddot`, the relative expansion rate `H = a_dot / a`,
//! the comoving forcing strength `alpha = a^3 a_ddot`, and the rescaled time
//! `tau(t) = int dt' / a^2(t')`.
//!
//! Trajectories are immutable after construction and all evaluation is pure,
//! so values can be shared freely across threads.

use crate::error::{Error, Result};
use crate::numerics::quadrature;
use crate::numerics::spline::CubicSpline;
use std::path::Path;
use std::sync::Arc;

/// Relative tolerance of the adaptive quadrature behind [`ScaleFactorTrajectory::tau_of_t`].
pub const TAU_REL_TOL: f64 = 1e-10;

/// Absolute abscissa tolerance of the monotone inversion in [`ScaleFactorTrajectory::t_of_tau`].
pub const T_OF_TAU_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    Uniform,
    ConstantAlpha,
    FriedmannFlat,
    Tabulated,
}

#[derive(Debug, Clone)]
enum Law {
    /// `a(t) = a0 + v t`
    Uniform { a0: f64, v: f64 },
    /// Solution of `a_ddot = alpha / a^3`, i.e. `a^2(t) = a0^2 + 2 a0 v0 t + c t^2`
    /// with `c = v0^2 + alpha / a0^2`. The square of the scale factor is an
    /// exact quadratic in time, so no numerical integration is involved.
    ConstantAlpha { a0: f64, v0: f64, alpha: f64, c: f64 },
    /// `a(t) = (t / t0)^(2/3)`, the matter-dominated flat-universe solution.
    FriedmannFlat { t0: f64 },
    /// Cubic-spline interpolant of a sampled `(t, a)` table.
    Tabulated { spline: Arc<CubicSpline> },
}

/// One wall-motion law together with its validity domain and the anchor of
/// the rescaled-time integral.
#[derive(Debug, Clone)]
pub struct ScaleFactorTrajectory {
    law: Law,
    /// open/closed domain bounds; infinities mean unbounded
    t_min: f64,
    t_max: f64,
    /// the domain is closed at the ends only for tabulated data
    closed: bool,
    /// `tau(t_ref) = tau_ref` anchors the additive constant of the integral
    t_ref: f64,
    tau_ref: f64,
}

/// All kinematic quantities of a trajectory at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub t: f64,
    pub a: f64,
    pub a_dot: f64,
    pub a_ddot: f64,
    pub h: f64,
    pub alpha: f64,
    pub tau: f64,
}

impl ScaleFactorTrajectory {
    /// Linear wall motion `a(t) = a0 + v t`; `a_ddot` and `alpha` vanish
    /// identically. The domain is the maximal interval where `a > 0`,
    /// with `tau(0) = 0`.
    pub fn uniform(a0: f64, v: f64) -> Result<Self> {
        if !(a0.is_finite() && a0 > 0.0) {
            return Err(Error::InvalidParameter(format!("a0 must be positive, got {a0}")));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter("v must be finite".into()));
        }
        let (t_min, t_max) = if v > 0.0 {
            (-a0 / v, f64::INFINITY)
        } else if v < 0.0 {
            (f64::NEG_INFINITY, -a0 / v)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        Ok(Self {
            law: Law::Uniform { a0, v },
            t_min,
            t_max,
            closed: false,
            t_ref: 0.0,
            tau_ref: 0.0,
        })
    }

    /// Wall motion with constant comoving forcing `alpha = a^3 a_ddot`,
    /// i.e. the solution of `a_ddot = alpha / a^3` with `a(0) = a0`,
    /// `a_dot(0) = v0`. `tau(0) = 0`.
    pub fn constant_alpha(alpha: f64, a0: f64, v0: f64) -> Result<Self> {
        if !(a0.is_finite() && a0 > 0.0) {
            return Err(Error::InvalidParameter(format!("a0 must be positive, got {a0}")));
        }
        if !(alpha.is_finite() && v0.is_finite()) {
            return Err(Error::InvalidParameter("alpha and v0 must be finite".into()));
        }
        let c = v0 * v0 + alpha / (a0 * a0);
        // positivity interval of w(t) = a0^2 + 2 a0 v0 t + c t^2 around t = 0
        let (t_min, t_max) = positivity_interval(a0 * a0, 2.0 * a0 * v0, c);
        Ok(Self {
            law: Law::ConstantAlpha { a0, v0, alpha, c },
            t_min,
            t_max,
            closed: false,
            t_ref: 0.0,
            tau_ref: 0.0,
        })
    }

    /// Matter-dominated flat-universe expansion `a(t) = (t / t0)^(2/3)` for
    /// `t > 0`. The rescaled-time constant is fixed by `tau(t0) = 3 t0`, the
    /// anchor for which the present-epoch dynamic phase is `-3 E t0 / hbar`.
    pub fn friedmann_flat(t0: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
        }
        Ok(Self {
            law: Law::FriedmannFlat { t0 },
            t_min: 0.0,
            t_max: f64::INFINITY,
            closed: false,
            t_ref: t0,
            tau_ref: 3.0 * t0,
        })
    }

    /// Trajectory interpolating a sampled `(t, a)` table with a natural cubic
    /// spline (continuous second derivative, so `a_ddot` is well defined).
    /// Times must be strictly increasing and all `a > 0`; `tau(first) = 0`.
    pub fn tabulated(ts: Vec<f64>, scales: Vec<f64>) -> Result<Self> {
        if ts.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "tabulated trajectory needs at least 4 rows, got {}",
                ts.len()
            )));
        }
        if let Some(bad) = scales.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "tabulated scale factor must be positive, got {bad}"
            )));
        }
        let t_first = ts[0];
        let t_last = *ts.last().unwrap();
        let spline = CubicSpline::natural(ts, scales)?;
        Ok(Self {
            law: Law::Tabulated { spline: Arc::new(spline) },
            t_min: t_first,
            t_max: t_last,
            closed: true,
            t_ref: t_first,
            tau_ref: 0.0,
        })
    }

    /// Load a tabulated trajectory from two-column CSV text `t,a` with one
    /// header line.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::TableFormat("empty trajectory table".into()))?;
        if header.split(',').count() < 2 {
            return Err(Error::TableFormat("expected a 't,a' header line".into()));
        }
        let mut ts = Vec::new();
        let mut scales = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (t, a) = match (cols.next(), cols.next()) {
                (Some(t), Some(a)) => (t.trim(), a.trim()),
                _ => {
                    return Err(Error::TableFormat(format!("row {}: expected two columns", i + 2)))
                }
            };
            let t: f64 = t
                .parse()
                .map_err(|_| Error::TableFormat(format!("row {}: bad time '{t}'", i + 2)))?;
            let a: f64 = a
                .parse()
                .map_err(|_| Error::TableFormat(format!("row {}: bad scale '{a}'", i + 2)))?;
            if let Some(prev) = ts.last() {
                if t <= *prev {
                    return Err(Error::TableFormat(format!(
                        "row {}: times must be strictly increasing ({prev} then {t})",
                        i + 2
                    )));
                }
            }
            ts.push(t);
            scales.push(a);
        }
        Self::tabulated(ts, scales)
    }

    /// Same as [`Self::from_csv_str`], reading from a file.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn kind(&self) -> TrajectoryKind {
        match self.law {
            Law::Uniform { .. } => TrajectoryKind::Uniform,
            Law::ConstantAlpha { .. } => TrajectoryKind::ConstantAlpha,
            Law::FriedmannFlat { .. } => TrajectoryKind::FriedmannFlat,
            Law::Tabulated { .. } => TrajectoryKind::Tabulated,
        }
    }

    /// Domain of validity `(t_min, t_max)`; open except for tabulated data.
    pub fn domain(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    /// `Some(alpha)` when `alpha(t)` is a constant of the motion law
    /// (uniform walls give zero, constant-forcing walls their parameter).
    pub fn constant_alpha_value(&self) -> Option<f64> {
        match self.law {
            Law::Uniform { .. } => Some(0.0),
            Law::ConstantAlpha { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let inside = if self.closed {
            t >= self.t_min && t <= self.t_max
        } else {
            t > self.t_min && t < self.t_max
        };
        if t.is_finite() && inside {
            Ok(())
        } else {
            Err(Error::OutOfDomain { t, min: self.t_min, max: self.t_max })
        }
    }

    fn a_raw(&self, t: f64) -> f64 {
        match &self.law {
            Law::Uniform { a0, v } => a0 + v * t,
            Law::ConstantAlpha { a0, v0, c, .. } => {
                (a0 * a0 + 2.0 * a0 * v0 * t + c * t * t).sqrt()
            }
            Law::FriedmannFlat { t0 } => (t / t0).powf(2.0 / 3.0),
            Law::Tabulated { spline } => spline.value(t),
        }
    }

    fn a_dot_raw(&self, t: f64) -> f64 {
        match &self.law {
            Law::Uniform { v, .. } => *v,
            Law::ConstantAlpha { a0, v0, c, .. } => {
                (a0 * v0 + c * t) / self.a_raw(t)
            }
            Law::FriedmannFlat { t0 } => 2.0 / (3.0 * t0) * (t / t0).powf(-1.0 / 3.0),
            Law::Tabulated { spline } => spline.deriv(t),
        }
    }

    fn a_ddot_raw(&self, t: f64) -> f64 {
        match &self.law {
            Law::Uniform { .. } => 0.0,
            Law::ConstantAlpha { alpha, .. } => {
                let a = self.a_raw(t);
                alpha / (a * a * a)
            }
            Law::FriedmannFlat { t0 } => -2.0 / (9.0 * t0 * t0) * (t / t0).powf(-4.0 / 3.0),
            Law::Tabulated { spline } => spline.second_deriv(t),
        }
    }

    /// `a(t)`.
    pub fn scale(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.a_raw(t))
    }

    /// `a_dot(t)`.
    pub fn scale_rate(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.a_dot_raw(t))
    }

    /// `a_ddot(t)`.
    pub fn scale_accel(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.a_ddot_raw(t))
    }

    /// `H(t) = a_dot / a`.
    pub fn hubble(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.a_dot_raw(t) / self.a_raw(t))
    }

    /// `alpha(t) = a^3 a_ddot`. Identically zero for uniform motion and the
    /// stored constant for constant-forcing walls.
    pub fn alpha(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match &self.law {
            Law::Uniform { .. } => 0.0,
            Law::ConstantAlpha { alpha, .. } => *alpha,
            _ => {
                let a = self.a_raw(t);
                a * a * a * self.a_ddot_raw(t)
            }
        })
    }

    /// Rescaled time `tau(t) = tau_ref + int_{t_ref}^{t} dt' / a^2(t')` by
    /// adaptive quadrature. Strictly increasing in `t`.
    pub fn tau_of_t(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        if t == self.t_ref {
            return Ok(self.tau_ref);
        }
        let integral = quadrature::integrate(
            |u| {
                let a = self.a_raw(u);
                1.0 / (a * a)
            },
            self.t_ref,
            t,
            TAU_REL_TOL,
        )?;
        Ok(self.tau_ref + integral)
    }

    /// Invert the monotone map `t -> tau` by bracketed bisection with
    /// absolute tolerance [`T_OF_TAU_TOL`] on `t`.
    pub fn t_of_tau(&self, tau: f64) -> Result<f64> {
        if !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau must be finite, got {tau}")));
        }
        if tau == self.tau_ref {
            return Ok(self.t_ref);
        }
        let forward = tau > self.tau_ref;
        // expand a bracket from the anchor toward the relevant domain end
        let a_ref = self.a_raw(self.t_ref);
        let mut step = (tau - self.tau_ref).abs() * a_ref * a_ref;
        if !step.is_finite() || step == 0.0 {
            step = 1.0;
        }
        let limit = if forward { self.t_max } else { self.t_min };
        let mut near = self.t_ref;
        let mut far = self.t_ref;
        let mut found = false;
        for _ in 0..MAX_BRACKET_EXPANSIONS {
            let candidate = if forward { self.t_ref + step } else { self.t_ref - step };
            let candidate = clamp_toward(candidate, limit, self.t_ref, self.closed);
            let tau_candidate = self.tau_of_t(candidate)?;
            if (forward && tau_candidate >= tau) || (!forward && tau_candidate <= tau) {
                far = candidate;
                found = true;
                break;
            }
            near = candidate;
            if candidate == limit {
                break;
            }
            step *= 2.0;
        }
        if !found {
            return Err(Error::OutOfDomain { t: f64::NAN, min: self.t_min, max: self.t_max });
        }
        let (lo, hi) = if forward { (near, far) } else { (far, near) };
        let scale = 1.0 + lo.abs().max(hi.abs());
        crate::numerics::roots::bisect(
            |t| self.tau_of_t(t).unwrap_or(f64::NAN) - tau,
            lo,
            hi,
            T_OF_TAU_TOL * scale,
        )
    }

    /// All kinematic quantities at `t`, mutually consistent by construction.
    pub fn sample(&self, t: f64) -> Result<KinematicSample> {
        self.check_domain(t)?;
        let a = self.a_raw(t);
        let a_dot = self.a_dot_raw(t);
        let a_ddot = self.a_ddot_raw(t);
        Ok(KinematicSample {
            t,
            a,
            a_dot,
            a_ddot,
            h: a_dot / a,
            alpha: self.alpha(t)?,
            tau: self.tau_of_t(t)?,
        })
    }
}

const MAX_BRACKET_EXPANSIONS: usize = 300;

/// Largest interval around zero on which `q(t) = c0 + c1 t + c2 t^2 > 0`,
/// assuming `q(0) = c0 > 0`.
fn positivity_interval(c0: f64, c1: f64, c2: f64) -> (f64, f64) {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        let root = -c0 / c1;
        return if c1 > 0.0 { (root, f64::INFINITY) } else { (f64::NEG_INFINITY, root) };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return if c2 > 0.0 {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            // cannot happen with q(0) > 0: a downward parabola always crosses
            (f64::NEG_INFINITY, f64::INFINITY)
        };
    }
    let sq = disc.sqrt();
    let r1 = (-c1 - sq) / (2.0 * c2);
    let r2 = (-c1 + sq) / (2.0 * c2);
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if c2 > 0.0 {
        // positive outside the roots; zero lies left or right of both
        if hi < 0.0 {
            (hi, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, lo)
        }
    } else {
        // positive between the roots
        (lo, hi)
    }
}

fn clamp_toward(candidate: f64, limit: f64, anchor: f64, closed: bool) -> f64 {
    if limit.is_infinite() {
        return candidate;
    }
    if closed {
        if candidate > anchor {
            candidate.min(limit)
        } else {
            candidate.max(limit)
        }
    } else {
        // keep a hair inside an open boundary
        let margin = 1e-12 * (1.0 + limit.abs());
        if candidate > anchor {
            candidate.min(limit - margin)
        } else {
            candidate.max(limit + margin)
        }
    }
}
