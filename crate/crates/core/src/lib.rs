//! Quantum mechanics of a particle confined by isotropically moving walls.
//!
//! All dynamics are formulated in the frame comoving with the wall, where the
//! boundary is fixed: positions rescale as `x = a(t) X` with a scale factor
//! `a(t)`, the relative expansion rate is `H = a_dot / a`, and the comoving
//! Schrodinger equation uses the rescaled time `tau = int dt / a^2`. Moving
//! the frame before quantization introduces the gauge potential `A = -M H x`
//! and with it the geometric (Dirac) phase `gamma = M H r^2 / (2 hbar)`, plus
//! a fictitious harmonic term `(1/2) M alpha |X|^2` with `alpha = a^3 a_ddot`.
//!
//! The crate provides:
//!
//! - [`scale_factor`]: wall-motion laws and derived kinematics,
//! - [`special`]: spherical Bessel / associated Laguerre / spherical harmonic
//!   evaluation and root tables,
//! - [`eigenmodes`]: the closed-form comoving eigenfunctions for spheres and
//!   cubes (free and oscillator-in-sphere families) and lab-frame assembly
//!   with the full phase breakdown,
//! - [`potentials`]: the lab-frame potential class that keeps the comoving
//!   problem time independent (the finite-time adiabatic driving protocol),
//! - [`propagator`]: a norm-preserving Crank-Nicolson integrator for the
//!   comoving equation on radial and Cartesian grids,
//! - [`verifier`]: residual, fidelity, and phase-fit checks tying the
//!   analytic layer to the numerical one.

pub mod eigenmodes;
pub mod error;
pub mod numerics;
pub mod potentials;
pub mod propagator;
pub mod scale_factor;
pub mod special;
pub mod units;
pub mod verifier;

pub use error::{Error, Result};
pub use units::Units;
