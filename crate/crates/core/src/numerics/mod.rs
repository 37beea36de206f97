//! Shared numerical kernels: quadrature, bracketed root refinement, cubic
//! splines, and the complex tridiagonal solve used by the propagator.

pub mod quadrature;
pub mod roots;
pub mod spline;
pub mod tridiag;
