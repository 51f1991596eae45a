use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of a run. Atomic units (ħ = m = e = 1) by default.
///
/// The diffusion constant D = ħ/(2m) is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConstants", into = "RawConstants")]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
    charge: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstants {
    #[serde(default = "one")]
    hbar: f64,
    #[serde(default = "one")]
    mass: f64,
    #[serde(default = "one")]
    charge: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawConstants> for PhysicalConstants {
    type Error = Error;

    fn try_from(raw: RawConstants) -> Result<Self> {
        PhysicalConstants::with_charge(raw.hbar, raw.mass, raw.charge)
    }
}

impl From<PhysicalConstants> for RawConstants {
    fn from(c: PhysicalConstants) -> Self {
        RawConstants { hbar: c.hbar, mass: c.mass, charge: c.charge }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::ATOMIC
    }
}

impl PhysicalConstants {
    pub const ATOMIC: PhysicalConstants = PhysicalConstants { hbar: 1.0, mass: 1.0, charge: 1.0 };

    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        Self::with_charge(hbar, mass, 1.0)
    }

    pub fn with_charge(hbar: f64, mass: f64, charge: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidConstants(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidConstants(format!("mass must be positive, got {mass}")));
        }
        if !(charge.is_finite() && charge > 0.0) {
            return Err(Error::InvalidConstants(format!("charge must be positive, got {charge}")));
        }
        Ok(PhysicalConstants { hbar, mass, charge })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Elementary charge e, used only by the hydrogen scaling laws.
    pub fn charge(&self) -> f64 {
        self.charge
    }

    /// Quantum diffusion constant D = ħ/(2m).
    pub fn diffusion(&self) -> f64 {
        self.hbar / (2.0 * self.mass)
    }

    /// Variance rate of the quantum Wiener process, 2D = ħ/m.
    pub fn noise_variance_rate(&self) -> f64 {
        self.hbar / self.mass
    }

    /// Momentum calibration constant c_p of the real-valued momentum operator.
    pub fn momentum_calibration(&self) -> f64 {
        -self.hbar
    }

    /// Time calibration constant c_t.
    pub fn time_calibration(&self) -> f64 {
        1.0
    }

    /// Same mass and charge with ħ replaced.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::with_charge(hbar, self.mass, self.charge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diffusion_is_derived() {
        let c = PhysicalConstants::new(2.0, 4.0).unwrap();
        assert_eq!(c.diffusion(), 0.25);
        assert_eq!(c.noise_variance_rate(), 0.5);
        assert_eq!(c.momentum_calibration(), -2.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert!(PhysicalConstants::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn json_defaults_to_atomic_units() {
        let c: PhysicalConstants = serde_json::from_str("{}").unwrap();
        assert_eq!(c, PhysicalConstants::ATOMIC);
        let bad: std::result::Result<PhysicalConstants, _> = serde_json::from_str(r#"{"hbar": -1}"#);
        assert!(bad.is_err());
    }
}
