use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Two-level system parameters.
///
/// `omega0` is the transition frequency, `gamma1 = 1/T1` the depopulation
/// rate, `gamma2 = 1/T2` the decoherence rate and `delta0` the equilibrium
/// population difference `N1 - N2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TlsParams {
    pub omega0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta0: f64,
}

impl Default for TlsParams {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            gamma1: 0.0,
            gamma2: 0.0,
            delta0: 1.0,
        }
    }
}

impl TlsParams {
    /// Lossless system with the given transition frequency.
    pub fn lossless(omega0: f64) -> Self {
        Self {
            omega0,
            ..Self::default()
        }
    }

    /// Relaxation rates used for the dissipative pulse scenarios.
    pub fn dissipative() -> Self {
        Self {
            gamma1: 0.0002,
            gamma2: 0.02,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(invalid("omega0", format!("must be positive, got {}", self.omega0)));
        }
        if !(self.gamma1 >= 0.0 && self.gamma1.is_finite()) {
            return Err(invalid("gamma1", format!("must be >= 0, got {}", self.gamma1)));
        }
        if !(self.gamma2 >= 0.0 && self.gamma2.is_finite()) {
            return Err(invalid("gamma2", format!("must be >= 0, got {}", self.gamma2)));
        }
        if !(self.delta0.abs() <= 1.0) {
            return Err(invalid("delta0", format!("must lie in [-1, 1], got {}", self.delta0)));
        }
        Ok(())
    }

    /// Level energies with the symmetric origin `E1 = -ω₀/2`, `E2 = +ω₀/2`.
    pub fn energies(&self) -> (f64, f64) {
        (-0.5 * self.omega0, 0.5 * self.omega0)
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma1 == 0.0 && self.gamma2 == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_unit_frequency_ground_state_equilibrium() {
        let p = TlsParams::default();
        assert_eq!(p.omega0, 1.0);
        assert_eq!(p.delta0, 1.0);
        assert!(p.validate().is_ok());
        assert!(p.is_lossless());
    }

    #[test]
    fn rejects_out_of_range_fields() {
        let bad = [
            TlsParams {
                omega0: 0.0,
                ..Default::default()
            },
            TlsParams {
                gamma1: -1e-3,
                ..Default::default()
            },
            TlsParams {
                gamma2: f64::NAN,
                ..Default::default()
            },
            TlsParams {
                delta0: 1.5,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn energies_are_symmetric() {
        let (e1, e2) = TlsParams::lossless(2.0).energies();
        assert_eq!(e2 - e1, 2.0);
        assert_eq!(e1, -e2);
    }
}
