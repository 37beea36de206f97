//! Physical constants threaded through every computation.

use crate::error::{Error, Result};

/// `hbar` and the particle mass. Defaults to natural units `hbar = M = 1`;
/// all times and lengths are then dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

impl Units {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    /// `hbar = M = 1`.
    pub fn natural() -> Self {
        Self::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_scalars() {
        assert!(Units::new(0.0, 1.0).is_err());
        assert!(Units::new(1.0, -2.0).is_err());
        assert!(Units::new(f64::NAN, 1.0).is_err());
        let u = Units::new(2.0, 3.0).unwrap();
        assert_eq!(u.hbar, 2.0);
        assert_eq!(u.mass, 3.0);
    }
}
