//! Lab-frame potentials paired with their comoving effective form.
//!
//! In the comoving frame the Schrodinger equation picks up the fictitious
//! harmonic term `(1/2) M alpha(t) |X|^2` with `alpha = a^3 a_ddot`. The
//! effective comoving potential of any lab potential `V` is therefore
//!
//! `U(X, t) = (1/2) M alpha(t) |X|^2 + a^2 V(a X, t)`.
//!
//! Choosing the lab potential
//!
//! `V(x, t) = (1/a^2) Vtilde(x/a) - (1/2) (a_ddot / a) M r^2`
//!
//! makes `U(X, t) = Vtilde(X)` for every `t`: the comoving problem becomes
//! time independent and the state simply rides the instantaneous eigenmode,
//! replicating adiabatic evolution in finite time. The second term is the
//! auxiliary potential that must be supplied by the driving apparatus; it
//! vanishes exactly when the wall moves uniformly.

use crate::error::{Error, Result};
use crate::scale_factor::ScaleFactorTrajectory;
use crate::units::Units;
use std::sync::Arc;

/// Time-independent comoving potential `Vtilde(X)`.
pub type ComovingPotentialFn = Arc<dyn Fn(&[f64; 3]) -> f64 + Send + Sync>;

/// General lab-frame potential `V(x, t)`.
pub type LabPotentialFn = Arc<dyn Fn(&[f64; 3], f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// The adiabaticity-replicating class built from a comoving `Vtilde`.
    Sta,
    /// A time-independent lab potential (possibly zero).
    LabStatic,
    /// Arbitrary user-supplied `V(x, t)`.
    Custom,
}

#[derive(Clone)]
enum Inner {
    Sta { v_tilde: ComovingPotentialFn, homogeneity_degree: Option<f64> },
    LabStatic { v: Option<ComovingPotentialFn> },
    Custom { v: LabPotentialFn },
}

/// A lab-frame potential, the trajectory it is tied to, and the units used
/// to form the fictitious term. Immutable; evaluation is pure.
#[derive(Clone)]
pub struct PotentialSpec {
    inner: Inner,
    traj: ScaleFactorTrajectory,
    units: Units,
}

impl std::fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("kind", &self.kind())
            .field("traj", &self.traj.kind())
            .finish()
    }
}

impl PotentialSpec {
    /// Build the finite-time adiabatic driving potential for a comoving
    /// `Vtilde`: `V(x, t) = Vtilde(x/a)/a^2 - (1/2)(a_ddot/a) M r^2`.
    pub fn sta(v_tilde: ComovingPotentialFn, traj: ScaleFactorTrajectory, units: Units) -> Self {
        Self { inner: Inner::Sta { v_tilde, homogeneity_degree: None }, traj, units }
    }

    /// Same as [`Self::sta`] with a declared homogeneity degree for
    /// `Vtilde`. The declaration is verified by sampling on a deterministic
    /// grid of points and scalings rather than trusted.
    pub fn sta_with_homogeneity(
        v_tilde: ComovingPotentialFn,
        degree: f64,
        traj: ScaleFactorTrajectory,
        units: Units,
    ) -> Result<Self> {
        let dirs: [[f64; 3]; 4] =
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.57735, 0.57735, 0.57735], [0.6, -0.8, 0.0]];
        for radius in [0.2, 0.5, 0.9] {
            for dir in &dirs {
                let x = [dir[0] * radius, dir[1] * radius, dir[2] * radius];
                let base = v_tilde(&x);
                for lambda in [0.5, 2.0, 3.7] {
                    let scaled = v_tilde(&[x[0] * lambda, x[1] * lambda, x[2] * lambda]);
                    let expect = lambda.powf(degree) * base;
                    if (scaled - expect).abs() > 1e-9 * expect.abs().max(1e-12) {
                        return Err(Error::InvalidParameter(format!(
                            "Vtilde not homogeneous of degree {degree} at |X| = {radius}"
                        )));
                    }
                }
            }
        }
        Ok(Self { inner: Inner::Sta { v_tilde, homogeneity_degree: Some(degree) }, traj, units })
    }

    /// Adiabatic driving toward the free comoving problem (`Vtilde = 0`);
    /// the lab potential is just the auxiliary term.
    pub fn sta_free(traj: ScaleFactorTrajectory, units: Units) -> Self {
        Self::sta(Arc::new(|_: &[f64; 3]| 0.0), traj, units)
    }

    /// Adiabatic driving toward a comoving harmonic trap
    /// `Vtilde = (1/2) M omega^2 |X|^2`.
    pub fn sta_harmonic(omega: f64, traj: ScaleFactorTrajectory, units: Units) -> Self {
        let half_m_omega_sq = 0.5 * units.mass * omega * omega;
        Self::sta(Arc::new(move |x: &[f64; 3]| half_m_omega_sq * norm_sqr(x)), traj, units)
    }

    /// No lab potential at all: the comoving frame still sees the fictitious
    /// harmonic term whenever the wall accelerates.
    pub fn zero(traj: ScaleFactorTrajectory, units: Units) -> Self {
        Self { inner: Inner::LabStatic { v: None }, traj, units }
    }

    /// A time-independent lab potential `V(x)`.
    pub fn lab_static(v: ComovingPotentialFn, traj: ScaleFactorTrajectory, units: Units) -> Self {
        Self { inner: Inner::LabStatic { v: Some(v) }, traj, units }
    }

    /// Arbitrary `V(x, t)`.
    pub fn custom(v: LabPotentialFn, traj: ScaleFactorTrajectory, units: Units) -> Self {
        Self { inner: Inner::Custom { v }, traj, units }
    }

    pub fn kind(&self) -> PotentialKind {
        match self.inner {
            Inner::Sta { .. } => PotentialKind::Sta,
            Inner::LabStatic { .. } => PotentialKind::LabStatic,
            Inner::Custom { .. } => PotentialKind::Custom,
        }
    }

    pub fn traj(&self) -> &ScaleFactorTrajectory {
        &self.traj
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn homogeneity_degree(&self) -> Option<f64> {
        match self.inner {
            Inner::Sta { homogeneity_degree, .. } => homogeneity_degree,
            _ => None,
        }
    }

    /// Lab-frame potential `V(x, t)`.
    pub fn lab_potential(&self, x: &[f64; 3], t: f64) -> Result<f64> {
        match &self.inner {
            Inner::Sta { v_tilde, .. } => {
                let a = self.traj.scale(t)?;
                let a_ddot = self.traj.scale_accel(t)?;
                let comoving = [x[0] / a, x[1] / a, x[2] / a];
                Ok(v_tilde(&comoving) / (a * a)
                    - 0.5 * (a_ddot / a) * self.units.mass * norm_sqr(x))
            }
            Inner::LabStatic { v } => {
                self.traj.scale(t)?; // domain check
                Ok(v.as_ref().map_or(0.0, |v| v(x)))
            }
            Inner::Custom { v } => {
                self.traj.scale(t)?;
                Ok(v(x, t))
            }
        }
    }

    /// Comoving effective potential
    /// `U(X, t) = (1/2) M alpha(t) |X|^2 + a^2 V(a X, t)`, assembled through
    /// the lab-frame form so the cancellation for the driving class is
    /// exercised rather than assumed.
    pub fn comoving_effective(&self, x_comoving: &[f64; 3], t: f64) -> Result<f64> {
        let a = self.traj.scale(t)?;
        let alpha = self.traj.alpha(t)?;
        let lab = [x_comoving[0] * a, x_comoving[1] * a, x_comoving[2] * a];
        Ok(0.5 * self.units.mass * alpha * norm_sqr(x_comoving)
            + a * a * self.lab_potential(&lab, t)?)
    }

    /// True when the comoving effective potential is time independent, so a
    /// propagation can evaluate it once: the driving class by construction,
    /// and a potential-free lab under walls of constant `alpha`.
    pub fn comoving_time_independent(&self) -> bool {
        match &self.inner {
            Inner::Sta { .. } => true,
            Inner::LabStatic { v: None } => self.traj.constant_alpha_value().is_some(),
            _ => false,
        }
    }

    /// Direct evaluation of the time-independent comoving potential when
    /// [`Self::comoving_time_independent`] holds.
    pub fn comoving_static(&self, x_comoving: &[f64; 3]) -> Option<f64> {
        match &self.inner {
            Inner::Sta { v_tilde, .. } => Some(v_tilde(&{ *x_comoving })),
            Inner::LabStatic { v: None } => self
                .traj
                .constant_alpha_value()
                .map(|alpha| 0.5 * self.units.mass * alpha * norm_sqr(x_comoving)),
            _ => None,
        }
    }
}

/// Inverse-square comoving potential `c / |X|^2` with a core cutoff: inside
/// `|X| < cutoff` the value is frozen at the cutoff radius, keeping the
/// numerics well posed away from the singular point.
pub fn inverse_square_potential(c: f64, cutoff: f64) -> ComovingPotentialFn {
    let floor = cutoff * cutoff;
    Arc::new(move |x: &[f64; 3]| c / norm_sqr(x).max(floor))
}

fn norm_sqr(x: &[f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: Units = Units { hbar: 1.0, mass: 1.0 };

    fn deterministic_points(count: usize) -> Vec<[f64; 3]> {
        // low-discrepancy-ish fixed sample, no randomness
        (0..count)
            .map(|i| {
                let t = i as f64 + 1.0;
                [
                    0.9 * (0.7548776662466927 * t).fract() - 0.45,
                    0.9 * (0.5698402909980532 * t).fract() - 0.45,
                    0.9 * (0.3028554126112899 * t).fract() - 0.45,
                ]
            })
            .collect()
    }

    #[test]
    fn zero_vtilde_uniform_wall_gives_zero_everywhere() {
        let traj = ScaleFactorTrajectory::uniform(1.0, 0.5).unwrap();
        let spec = PotentialSpec::sta_free(traj, U);
        for t in [0.0, 1.0, 3.0] {
            for x in deterministic_points(5) {
                assert_eq!(spec.lab_potential(&x, t).unwrap(), 0.0);
                assert!(spec.comoving_effective(&x, t).unwrap().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn auxiliary_term_matches_trajectory_sample() {
        // Vtilde = 0 over an accelerating wall: V = -(1/2)(a_ddot/a) M r^2
        let traj = ScaleFactorTrajectory::constant_alpha(2.0, 1.0, 0.0).unwrap();
        let spec = PotentialSpec::sta_free(traj.clone(), U);
        for t in [0.3, 1.1] {
            let s = traj.sample(t).unwrap();
            for x in deterministic_points(4) {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let expect = -0.5 * (s.a_ddot / s.a) * r2;
                assert!((spec.lab_potential(&x, t).unwrap() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn driving_class_cancels_in_the_comoving_frame() {
        // U(X, t) = Vtilde(X) for every sampled (X, t), for several Vtilde
        // and trajectories, through the full lab-frame round trip
        let trajs = vec![
            ScaleFactorTrajectory::uniform(1.0, 0.3).unwrap(),
            ScaleFactorTrajectory::constant_alpha(5.0, 1.0, 0.2).unwrap(),
            ScaleFactorTrajectory::friedmann_flat(1.0).unwrap(),
        ];
        let v_tildes: Vec<(ComovingPotentialFn, &str)> = vec![
            (Arc::new(|_: &[f64; 3]| 0.0), "zero"),
            (Arc::new(|x: &[f64; 3]| 0.5 * 4.0 * norm_sqr(x)), "harmonic"),
            (inverse_square_potential(0.3, 1e-6), "inverse-square"),
        ];
        for traj in &trajs {
            let (lo, hi) = traj.domain();
            let t_lo = if lo.is_finite() { lo + 0.3 } else { 0.25 };
            let t_hi = if hi.is_finite() { hi - 0.1 } else { t_lo + 2.0 };
            for (v_tilde, label) in &v_tildes {
                let spec = PotentialSpec::sta(v_tilde.clone(), traj.clone(), U);
                for i in 0..50 {
                    let t = t_lo + (t_hi - t_lo) * i as f64 / 49.0;
                    for x in deterministic_points(4) {
                        let expect = v_tilde(&x);
                        let got = spec.comoving_effective(&x, t).unwrap();
                        assert!(
                            (got - expect).abs() <= 1e-10 * expect.abs().max(1.0),
                            "{label} at t={t}: {got} vs {expect}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sta_identity_sweep_at_fixed_point() {
        let traj = ScaleFactorTrajectory::constant_alpha(3.0, 1.0, 0.1).unwrap();
        let spec = PotentialSpec::sta_harmonic(2.0, traj, U);
        let x = [0.4, -0.2, 0.3];
        let expect = 0.5 * 4.0 * norm_sqr(&x);
        let mut max_dev: f64 = 0.0;
        for i in 0..50 {
            let t = 0.02 + 0.05 * i as f64;
            let got = spec.comoving_effective(&x, t).unwrap();
            max_dev = max_dev.max((got - expect).abs());
        }
        assert!(max_dev < 1e-10 * expect.abs());
    }

    #[test]
    fn inverse_square_class_is_time_independent_in_the_lab() {
        // homogeneity degree -2 makes Vtilde(x/a)/a^2 = Vtilde(x) exactly
        let v = inverse_square_potential(0.7, 1e-9);
        for (i, x) in deterministic_points(100).iter().enumerate() {
            let scales = [0.5, 1.0, 1.7, 3.0, 8.0];
            let a = scales[i % scales.len()];
            let scaled = [x[0] / a, x[1] / a, x[2] / a];
            let lab_value = v(&scaled) / (a * a);
            assert!(
                (lab_value - v(x)).abs() <= 1e-12 * v(x).abs(),
                "x = {x:?}, a = {a}"
            );
        }
    }

    #[test]
    fn homogeneity_declaration_is_checked() {
        let good = inverse_square_potential(1.0, 1e-12);
        let traj = ScaleFactorTrajectory::uniform(1.0, 0.1).unwrap();
        assert!(PotentialSpec::sta_with_homogeneity(good, -2.0, traj.clone(), U).is_ok());
        let not_homogeneous: ComovingPotentialFn = Arc::new(|x: &[f64; 3]| norm_sqr(x) + 1.0);
        assert!(PotentialSpec::sta_with_homogeneity(not_homogeneous, 2.0, traj, U).is_err());
    }

    #[test]
    fn free_lab_under_constant_alpha_is_a_static_comoving_trap() {
        let alpha = 4.0;
        let traj = ScaleFactorTrajectory::constant_alpha(alpha, 1.0, 0.0).unwrap();
        let spec = PotentialSpec::zero(traj, U);
        assert!(spec.comoving_time_independent());
        for t in [0.1, 0.5, 1.3] {
            for x in deterministic_points(4) {
                let expect = 0.5 * alpha * norm_sqr(&x);
                assert!((spec.comoving_effective(&x, t).unwrap() - expect).abs() < 1e-10);
                assert!((spec.comoving_static(&x).unwrap() - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn auxiliary_term_vanishes_iff_wall_is_unaccelerated() {
        let uniform = ScaleFactorTrajectory::uniform(1.0, 0.7).unwrap();
        let spec = PotentialSpec::sta_free(uniform, U);
        for t in [0.0, 2.0] {
            for x in deterministic_points(6) {
                assert_eq!(spec.lab_potential(&x, t).unwrap(), 0.0);
            }
        }
        let accel = ScaleFactorTrajectory::constant_alpha(1.0, 1.0, 0.0).unwrap();
        let spec = PotentialSpec::sta_free(accel, U);
        let x = [0.5, 0.0, 0.0];
        assert!(spec.lab_potential(&x, 0.5).unwrap().abs() > 1e-3);
    }

    #[test]
    fn time_independence_detection() {
        let uniform = ScaleFactorTrajectory::uniform(1.0, 0.5).unwrap();
        let friedmann = ScaleFactorTrajectory::friedmann_flat(1.0).unwrap();
        assert!(PotentialSpec::sta_free(friedmann.clone(), U).comoving_time_independent());
        assert!(PotentialSpec::zero(uniform.clone(), U).comoving_time_independent());
        assert!(!PotentialSpec::zero(friedmann, U).comoving_time_independent());
        let v: ComovingPotentialFn = Arc::new(|x: &[f64; 3]| norm_sqr(x));
        assert!(!PotentialSpec::lab_static(v.clone(), uniform.clone(), U)
            .comoving_time_independent());
        let c: LabPotentialFn = Arc::new(|x: &[f64; 3], _t: f64| norm_sqr(x));
        assert!(!PotentialSpec::custom(c, uniform, U).comoving_time_independent());
    }

    #[test]
    fn domain_violations_surface() {
        let traj = ScaleFactorTrajectory::friedmann_flat(1.0).unwrap();
        let spec = PotentialSpec::sta_free(traj, U);
        assert!(spec.lab_potential(&[0.1, 0.0, 0.0], -1.0).is_err());
        assert!(spec.comoving_effective(&[0.1, 0.0, 0.0], 0.0).is_err());
    }
}
