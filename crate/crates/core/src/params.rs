use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, FlowError, Result};

/// Complex arguments and values (`ζ`, `η`, `z`, `p + iq`).
pub type ComplexValue = Complex64;

/// Critical inverse temperature in four dimensions, `2d/(d-2)` at `d = 4`.
pub const BETA_CRITICAL: f64 = 4.0;

/// Block-spin normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Abnormal scaling, `γ = d + 2 = 6`.
    Critical,
    /// Normal scaling, `γ = d = 4`.
    Normal,
}

impl Flavor {
    /// The scaling exponent `γ`.
    pub fn gamma(self) -> f64 {
        match self {
            Flavor::Critical => 6.0,
            Flavor::Normal => 4.0,
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "critical" => Ok(Flavor::Critical),
            "normal" => Ok(Flavor::Normal),
            other => Err(format!(
                "unknown flavor `{other}` (expected critical|normal)"
            )),
        }
    }
}

/// Parameters of one flow evaluation: inverse temperature, flavor and RG scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub beta: f64,
    pub flavor: Flavor,
    pub t: f64,
}

impl FlowParams {
    pub fn new(beta: f64, flavor: Flavor, t: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return domain(
                "FlowParams",
                format!("beta must be finite and > 0, got {beta}"),
            );
        }
        if !(t.is_finite() && t >= 0.0) {
            return domain("FlowParams", format!("t must be finite and >= 0, got {t}"));
        }
        Ok(FlowParams { beta, flavor, t })
    }

    /// Critical flavor at the critical temperature `β = 4`.
    pub fn critical(t: f64) -> Result<Self> {
        Self::new(BETA_CRITICAL, Flavor::Critical, t)
    }

    /// Normal flavor at inverse temperature `beta`.
    pub fn normal(beta: f64, t: f64) -> Result<Self> {
        Self::new(beta, Flavor::Normal, t)
    }

    pub fn at(self, t: f64) -> Result<Self> {
        Self::new(self.beta, self.flavor, t)
    }
}

pub(crate) fn check_finite(op: &'static str, z: ComplexValue) -> Result<ComplexValue> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(FlowError::NonFinite(op))
    }
}
