//! Closed-form comoving eigenfunctions `u(X)` with their eigenvalues, the
//! geometric (Dirac) phase, and assembly of the full lab-frame wave function
//!
//! `psi(x, t) = a^(-3/2) u(x/a) exp(-i E tau / hbar + i gamma)`,
//!
//! where `gamma = M H r^2 / (2 hbar)` and the dynamic phase uses
//! `int E(t') dt' = E tau` because the instantaneous energy is `E / a^2`.
//!
//! Three families are provided: free modes of a sphere (spherical Bessel
//! zeros), free parity modes of a cube (per-axis sin for even indices, cos
//! for odd), and the isotropic-oscillator-in-a-sphere modes quantized by
//! associated Laguerre zeros.

use crate::error::{Error, Result};
use crate::numerics::quadrature;
use crate::scale_factor::ScaleFactorTrajectory;
use crate::special;
use crate::units::Units;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Fixed Gauss-Legendre order for radial normalization integrals.
const RADIAL_QUAD_ORDER: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Ball of comoving radius `r0`; the wall sits at `|X| = r0`.
    Sphere { r0: f64 },
    /// Cube of comoving side `x0` centered on the origin; walls at `X_i = +-x0/2`.
    Cube { x0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialClass {
    Free,
    OscillatorInSphere,
}

/// `(n, l, m)` plus the oscillator radial index `s` where applicable. For
/// cube modes the three entries are the per-axis integers (all >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub s: Option<u32>,
}

/// One analytic comoving eigenmode: geometry, quantum numbers, eigenvalue,
/// and enough data to evaluate `u(X)` anywhere inside the wall.
#[derive(Debug, Clone)]
pub struct Eigenmode {
    geometry: Geometry,
    potential_class: PotentialClass,
    qn: QuantumNumbers,
    /// comoving eigenvalue of the time-independent problem
    energy: f64,
    /// quantizing constant: the Bessel zero `k_nl`, the Laguerre zero
    /// `k_snl`, or `pi sqrt(n^2+l^2+m^2)` for the cube
    k: f64,
    /// radial prefactor (sphere) or `sqrt(8/x0^3)` (cube)
    normalization: f64,
    units: Units,
}

/// Free mode of a sphere of comoving radius `r0`:
/// `u = sqrt(2/r0^3) j_l(k_nl |X|/r0) Y_lm / j_{l+1}(k_nl)` with
/// `E = hbar^2 k_nl^2 / (2 M r0^2)`; `k_nl` is the n-th zero of `j_l`.
pub fn sphere_free_mode(n: u32, l: u32, m: i32, r0: f64, units: Units) -> Result<Eigenmode> {
    if n < 1 {
        return Err(Error::InvalidParameter("sphere mode needs n >= 1".into()));
    }
    if m.unsigned_abs() > l {
        return Err(Error::InvalidParameter(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    check_length("r0", r0)?;
    let k = special::spherical_bessel_zero(l, n)?;
    let energy = units.hbar * units.hbar * k * k / (2.0 * units.mass * r0 * r0);
    let normalization = (2.0 / r0.powi(3)).sqrt() / special::spherical_bessel_j(l + 1, k)?;
    Ok(Eigenmode {
        geometry: Geometry::Sphere { r0 },
        potential_class: PotentialClass::Free,
        qn: QuantumNumbers { n, l, m, s: None },
        energy,
        k,
        normalization,
        units,
    })
}

/// Free parity mode of a cube of comoving side `x0`. Each axis contributes
/// `sqrt(2/x0) f(q pi X_i / x0)` with `f = sin` for even `q` and `f = cos`
/// for odd `q`; `E = hbar^2 pi^2 (n^2 + l^2 + m^2) / (2 M x0^2)`.
pub fn cube_free_mode(n: u32, l: u32, m: u32, x0: f64, units: Units) -> Result<Eigenmode> {
    if n < 1 || l < 1 || m < 1 {
        return Err(Error::InvalidParameter("cube indices must all be >= 1".into()));
    }
    check_length("x0", x0)?;
    let sum_sq = (n * n + l * l + m * m) as f64;
    let energy = units.hbar * units.hbar * PI * PI * sum_sq / (2.0 * units.mass * x0 * x0);
    Ok(Eigenmode {
        geometry: Geometry::Cube { x0 },
        potential_class: PotentialClass::Free,
        qn: QuantumNumbers { n, l, m: m as i32, s: None },
        energy,
        k: PI * sum_sq.sqrt(),
        normalization: (8.0 / x0.powi(3)).sqrt(),
        units,
    })
}

/// Isotropic-oscillator mode confined to a sphere: the comoving potential is
/// `(1/2) M omega^2 |X|^2` with `omega = hbar k_snl / (M r0^2)`, where
/// `k_snl` is the s-th zero of `L_{(n-l)/2}^{l+1/2}`, so the wall condition
/// `u(r0) = 0` holds automatically. `E = (n + 3/2) hbar^2 k_snl / (M r0^2)`.
///
/// The radial index range is `n = l+2, l+4, ...` (degree-zero Laguerre
/// polynomials never vanish, so `n = l` cannot satisfy the wall condition)
/// and `1 <= s <= (n-l)/2`.
pub fn sphere_oscillator_mode(
    n: u32,
    l: u32,
    m: i32,
    s: u32,
    r0: f64,
    units: Units,
) -> Result<Eigenmode> {
    if n < l + 2 || (n - l) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "oscillator modes need n in {{l+2, l+4, ...}}, got n = {n}, l = {l}"
        )));
    }
    if m.unsigned_abs() > l {
        return Err(Error::InvalidParameter(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    check_length("r0", r0)?;
    let p = (n - l) / 2;
    let alpha = l as f64 + 0.5;
    let k = special::assoc_laguerre_zero(p, alpha, s)?;
    let energy = (n as f64 + 1.5) * units.hbar * units.hbar * k / (units.mass * r0 * r0);

    // normalize int_0^r0 R^2 r^2 dr = 1 by fixed-order Gauss quadrature
    let (nodes, weights) = quadrature::gauss_legendre_on(0.0, r0, RADIAL_QUAD_ORDER);
    let mut sq = 0.0;
    for (r, w) in nodes.iter().zip(&weights) {
        let raw = oscillator_radial_raw(*r, r0, k, l, p, alpha)?;
        sq += w * raw * raw * r * r;
    }
    if !(sq.is_finite() && sq > 0.0) {
        return Err(Error::InvalidParameter("oscillator mode normalization failed".into()));
    }
    Ok(Eigenmode {
        geometry: Geometry::Sphere { r0 },
        potential_class: PotentialClass::OscillatorInSphere,
        qn: QuantumNumbers { n, l, m, s: Some(s) },
        energy,
        k,
        normalization: 1.0 / sq.sqrt(),
        units,
    })
}

fn oscillator_radial_raw(r: f64, r0: f64, k: f64, l: u32, p: u32, alpha: f64) -> Result<f64> {
    let xi = k * r * r / (r0 * r0);
    Ok(r.powi(l as i32) * (-0.5 * xi).exp() * special::assoc_laguerre(p, alpha, xi)?)
}

fn check_length(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

impl Eigenmode {
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn potential_class(&self) -> PotentialClass {
        self.potential_class
    }

    pub fn quantum_numbers(&self) -> QuantumNumbers {
        self.qn
    }

    /// Comoving eigenvalue `E` of the time-independent problem.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// The quantizing root (see the struct docs).
    pub fn quantizing_root(&self) -> f64 {
        self.k
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn units(&self) -> Units {
        self.units
    }

    /// Oscillator frequency `omega` for oscillator modes, `None` for free ones.
    pub fn oscillator_frequency(&self) -> Option<f64> {
        match (self.potential_class, self.geometry) {
            (PotentialClass::OscillatorInSphere, Geometry::Sphere { r0 }) => {
                Some(self.units.hbar * self.k / (self.units.mass * r0 * r0))
            }
            _ => None,
        }
    }

    /// The comoving potential this mode diagonalizes, evaluated at radius /
    /// coordinate `x` (zero for free modes, the harmonic trap otherwise).
    pub fn tise_potential(&self, r: f64) -> f64 {
        match self.oscillator_frequency() {
            Some(omega) => 0.5 * self.units.mass * omega * omega * r * r,
            None => 0.0,
        }
    }

    /// Radial factor `R(r)` of a sphere mode, normalization included (the
    /// full mode is `R(r) Y_lm(theta, phi)`).
    pub fn radial(&self, r: f64) -> Result<f64> {
        let Geometry::Sphere { r0 } = self.geometry else {
            return Err(Error::IncompatibleGrid("radial part is defined for sphere modes".into()));
        };
        if !(r.is_finite() && (0.0..=r0).contains(&r)) {
            return Err(Error::OutsideWall(format!("radius {r} outside [0, {r0}]")));
        }
        match self.potential_class {
            PotentialClass::Free => {
                Ok(self.normalization * special::spherical_bessel_j(self.qn.l, self.k * r / r0)?)
            }
            PotentialClass::OscillatorInSphere => {
                let p = (self.qn.n - self.qn.l) / 2;
                let alpha = self.qn.l as f64 + 0.5;
                Ok(self.normalization * oscillator_radial_raw(r, r0, self.k, self.qn.l, p, alpha)?)
            }
        }
    }

    /// One axis factor `sqrt(2/x0) f(q pi x / x0)` of a cube mode
    /// (`axis` in `0..3`).
    pub fn axis_factor(&self, axis: usize, x: f64) -> Result<f64> {
        let Geometry::Cube { x0 } = self.geometry else {
            return Err(Error::IncompatibleGrid("axis factors are defined for cube modes".into()));
        };
        let q = self.axis_index(axis)?;
        if !(x.is_finite() && x.abs() <= 0.5 * x0) {
            return Err(Error::OutsideWall(format!("coordinate {x} outside [-{0}, {0}]", 0.5 * x0)));
        }
        let arg = q as f64 * PI * x / x0;
        let f = if q % 2 == 0 { arg.sin() } else { arg.cos() };
        Ok((2.0 / x0).sqrt() * f)
    }

    /// Per-axis integer of a cube mode.
    pub fn axis_index(&self, axis: usize) -> Result<u32> {
        if !matches!(self.geometry, Geometry::Cube { .. }) {
            return Err(Error::IncompatibleGrid("axis indices are defined for cube modes".into()));
        }
        match axis {
            0 => Ok(self.qn.n),
            1 => Ok(self.qn.l),
            2 => Ok(self.qn.m as u32),
            _ => Err(Error::InvalidParameter(format!("axis must be 0..3, got {axis}"))),
        }
    }

    /// Spatial parity of a cube mode: +1 if even, -1 if odd. Each sin factor
    /// (even index) is odd, so the parity is (-1)^(number of even indices).
    pub fn cube_parity(&self) -> Result<i32> {
        if !matches!(self.geometry, Geometry::Cube { .. }) {
            return Err(Error::IncompatibleGrid("parity is defined for cube modes".into()));
        }
        let mut sin_count = 0;
        for axis in 0..3 {
            if self.axis_index(axis)? % 2 == 0 {
                sin_count += 1;
            }
        }
        Ok(if sin_count % 2 == 0 { 1 } else { -1 })
    }

    /// True when the comoving point lies inside (or on) the wall.
    pub fn contains_comoving(&self, x: &[f64; 3]) -> bool {
        match self.geometry {
            Geometry::Sphere { r0 } => norm3(x) <= r0 * (1.0 + 1e-12),
            Geometry::Cube { x0 } => x.iter().all(|c| c.abs() <= 0.5 * x0 * (1.0 + 1e-12)),
        }
    }

    /// Full comoving eigenfunction `u(X)`.
    pub fn evaluate(&self, x: &[f64; 3]) -> Result<Complex64> {
        match self.geometry {
            Geometry::Sphere { .. } => {
                let r = norm3(x);
                let radial = self.radial(r)?;
                if self.qn.l == 0 {
                    // Y_00 is constant; avoid the undefined angles at r = 0
                    return Ok(Complex64::new(radial * (0.25 / PI).sqrt(), 0.0));
                }
                let (theta, phi) = if r == 0.0 { (0.0, 0.0) } else { angles(x, r) };
                Ok(radial * special::spherical_harmonic(self.qn.l, self.qn.m, theta, phi)?)
            }
            Geometry::Cube { .. } => {
                let v = self.axis_factor(0, x[0])? * self.axis_factor(1, x[1])?
                    * self.axis_factor(2, x[2])?;
                Ok(Complex64::new(v, 0.0))
            }
        }
    }
}

fn norm3(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn angles(x: &[f64; 3], r: f64) -> (f64, f64) {
    ((x[2] / r).clamp(-1.0, 1.0).acos(), x[1].atan2(x[0]))
}

/// Geometric (Dirac) phase `gamma = M H r^2 / (2 hbar)` picked up at lab
/// radius `r` when the wall moves with relative rate `H`. Depends on nothing
/// but `(M, H, r)`; in particular not on the wall shape.
pub fn dirac_phase(units: &Units, hubble: f64, r: f64) -> f64 {
    units.mass * hubble * r * r / (2.0 * units.hbar)
}

/// Dirac phase accumulated under flat-universe expansion `a = (t/t0)^(2/3)`:
/// `gamma = M r^2 / (3 hbar t)`, i.e. [`dirac_phase`] at `H = 2/(3t)`.
pub fn cosmic_dirac_phase(units: &Units, t: f64, r: f64, t0: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("cosmic time must be positive, got {t}")));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
    }
    Ok(units.mass * r * r / (3.0 * units.hbar * t))
}

/// Dynamic, geometric, and total phase of a lab-frame wave function at one
/// space-time point. `total = dynamic + dirac`, reported unwrapped; the
/// wrapped copy lives in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    pub dynamic: f64,
    pub dirac: f64,
    pub total: f64,
    pub total_wrapped: f64,
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Evaluate the lab-frame wave function of `mode` carried by `traj` at lab
/// position `x` and time `t`, together with its phase breakdown:
/// `psi = a^(-3/2) u(x/a) exp(i (dynamic + dirac))` with
/// `dynamic = -E tau(t) / hbar` and `dirac = M H(t) |x|^2 / (2 hbar)`.
pub fn assemble_lab_wavefunction(
    mode: &Eigenmode,
    traj: &ScaleFactorTrajectory,
    x: &[f64; 3],
    t: f64,
) -> Result<(Complex64, PhaseBreakdown)> {
    let a = traj.scale(t)?;
    let comoving = [x[0] / a, x[1] / a, x[2] / a];
    if !mode.contains_comoving(&comoving) {
        return Err(Error::OutsideWall(format!(
            "lab point ({}, {}, {}) outside the instantaneous wall at t = {t}",
            x[0], x[1], x[2]
        )));
    }
    let tau = traj.tau_of_t(t)?;
    let units = mode.units();
    let dynamic = -mode.energy() * tau / units.hbar;
    let dirac = dirac_phase(&units, traj.hubble(t)?, norm3(x));
    let total = dynamic + dirac;
    let u = mode.evaluate(&comoving)?;
    let amplitude = u * a.powf(-1.5) * Complex64::from_polar(1.0, total);
    Ok((amplitude, PhaseBreakdown { dynamic, dirac, total, total_wrapped: wrap_phase(total) }))
}

/// Instantaneous energy `E(t) = E / a^2(t)`.
pub fn instantaneous_energy(
    mode: &Eigenmode,
    traj: &ScaleFactorTrajectory,
    t: f64,
) -> Result<f64> {
    let a = traj.scale(t)?;
    Ok(mode.energy() / (a * a))
}

/// Quadrature inner product `<a, b> = int conj(u_a) u_b d^3X` of two modes of
/// the same geometry, factorized into radial x angular (sphere) or per-axis
/// (cube) one-dimensional rules.
pub fn mode_inner_product(a: &Eigenmode, b: &Eigenmode) -> Result<Complex64> {
    match (a.geometry, b.geometry) {
        (Geometry::Sphere { r0: ra }, Geometry::Sphere { r0: rb }) => {
            if (ra - rb).abs() > 1e-12 * ra.max(rb) {
                return Err(Error::IncompatibleGrid("sphere radii differ".into()));
            }
            let (nodes, weights) = quadrature::gauss_legendre_on(0.0, ra, RADIAL_QUAD_ORDER);
            let mut radial = 0.0;
            for (r, w) in nodes.iter().zip(&weights) {
                radial += w * a.radial(*r)? * b.radial(*r)? * r * r;
            }
            Ok(radial * angular_inner_product(a.qn.l, a.qn.m, b.qn.l, b.qn.m)?)
        }
        (Geometry::Cube { x0: xa }, Geometry::Cube { x0: xb }) => {
            if (xa - xb).abs() > 1e-12 * xa.max(xb) {
                return Err(Error::IncompatibleGrid("cube sides differ".into()));
            }
            let (nodes, weights) = quadrature::gauss_legendre_on(-0.5 * xa, 0.5 * xa, 64);
            let mut product = 1.0;
            for axis in 0..3 {
                let mut acc = 0.0;
                for (x, w) in nodes.iter().zip(&weights) {
                    acc += w * a.axis_factor(axis, *x)? * b.axis_factor(axis, *x)?;
                }
                product *= acc;
            }
            Ok(Complex64::new(product, 0.0))
        }
        _ => Err(Error::IncompatibleGrid("modes have different geometries".into())),
    }
}

fn angular_inner_product(l1: u32, m1: i32, l2: u32, m2: i32) -> Result<Complex64> {
    // 64-point Gauss-Legendre in cos(theta) x 64-point trapezoid in phi
    let (nodes, weights) = quadrature::gauss_legendre(64);
    let n_phi = 64;
    let mut acc = Complex64::default();
    for (x, w) in nodes.iter().zip(&weights) {
        let theta = x.acos();
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            let ya = special::spherical_harmonic(l1, m1, theta, phi)?;
            let yb = special::spherical_harmonic(l2, m2, theta, phi)?;
            acc += *w * (2.0 * PI / n_phi as f64) * ya.conj() * yb;
        }
    }
    Ok(acc)
}
