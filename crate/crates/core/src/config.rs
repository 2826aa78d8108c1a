//! Numerical tolerances shared by the whole crate.
//!
//! The values are read-only after start-up: a front end may call [`install`]
//! once before any computation, otherwise the defaults apply.

use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative slack for positive-semidefiniteness tests.
    pub psd: f64,
    /// Singular values below `rank * largest` are treated as zero.
    pub rank: f64,
    /// Skew values within this distance of 1 count as unit values.
    pub unit_skew: f64,
    /// Arguments of `f(t) = -sqrt(t^2 - 1)` this far below 1 are clamped to 1.
    pub purification_clamp: f64,
    /// Diagonal weight of the entangled purification pairs.
    pub xi: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd: 1e-9,
            rank: 1e-10,
            unit_skew: 1e-9,
            purification_clamp: 1e-12,
            xi: 1.25,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("psd", self.psd),
            ("rank", self.rank),
            ("unit_skew", self.unit_skew),
            ("purification_clamp", self.purification_clamp),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(format!("tolerance `{name}` must be positive, got {value}"));
            }
        }
        // Purification pairs need 2 xi - 2 sqrt(xi^2 - 1) = 1.
        let identity = 2.0 * self.xi - 2.0 * (self.xi * self.xi - 1.0).max(0.0).sqrt();
        if !(self.xi >= 1.0 && (identity - 1.0).abs() <= 1e-12) {
            return Err(format!(
                "xi = {} does not satisfy 2 xi - 2 sqrt(xi^2 - 1) = 1 (only 5/4 does)",
                self.xi
            ));
        }
        Ok(())
    }
}

static GLOBAL: OnceLock<Tolerances> = OnceLock::new();

/// Installs the process-wide tolerances. Fails if they were already fixed.
pub fn install(tolerances: Tolerances) -> Result<(), Tolerances> {
    GLOBAL.set(tolerances)
}

pub fn tolerances() -> &'static Tolerances {
    GLOBAL.get_or_init(Tolerances::default)
}
