//! Exact state-vector simulation of probe qubits.
//!
//! Every probe lives in the two-dimensional span of the extreme eigenvectors
//! `|λ_m⟩` (bit 0) and `|λ_M⟩` (bit 1) of the phase generator. A register of
//! `n` probes is a dense vector of `2^n` amplitudes where bit `i` of the index
//! is the level of probe `i`.

mod rng;
mod state;

pub use rng::{derive_seed, splitmix64, SimRng};
pub use state::{
    eve_view_density_defect, eve_view_density_invariance_check, pure_state_phase_invariance_check, GhzMeasurement, GhzOutcome,
    JointState,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Register size used unless a caller asks for more.
pub const DEFAULT_PROBE_CAP: usize = 12;
/// Largest register the simulator will allocate.
pub const MAX_PROBE_CAP: usize = 24;
/// Absolute tolerance for every exactness check.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("probe count {n} outside 1..={cap}")]
    ProbeCount { n: usize, cap: usize },
    #[error("probe cap {0} exceeds hard maximum {MAX_PROBE_CAP}")]
    CapTooLarge(usize),
    #[error("probe index {index} out of range for {n} probes")]
    ProbeIndex { index: usize, n: usize },
    #[error("probe {0} listed twice")]
    DuplicateProbe(usize),
    #[error("spectrum ({lambda_min}, {lambda_max}) invalid: {reason}")]
    Spectrum {
        lambda_min: f64,
        lambda_max: f64,
        reason: &'static str,
    },
    #[error("states have different probe counts ({0} vs {1})")]
    SizeMismatch(usize, usize),
}

/// Sign of a GHZ-family state or outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `+1.0` or `-1.0`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_bool(minus: bool) -> Self {
        if minus {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

/// Measurement basis family.
///
/// On a single probe `GhzPlusMinus` is `(|0⟩±|1⟩)/√2` and `GhzPlusMinusI` is
/// `(|0⟩±i|1⟩)/√2`; on a group of probes they are the matching GHZ pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasBasis {
    GhzPlusMinus,
    Energy,
    GhzPlusMinusI,
}

/// Extreme eigenvalues of the phase generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    lambda_min: f64,
    lambda_max: f64,
    #[serde(default)]
    allow_unsafe: bool,
}

impl Default for Spectrum {
    fn default() -> Self {
        Self {
            lambda_min: 0.0,
            lambda_max: 1.0,
            allow_unsafe: false,
        }
    }
}

impl Spectrum {
    /// Accepts only spectra whose gap is an odd positive integer, the
    /// condition under which a check rotation by `mπ/N` maps the NOON pair
    /// onto itself with parity `m`.
    pub fn new(lambda_min: f64, lambda_max: f64) -> Result<Self, QsimError> {
        let s = Self {
            lambda_min,
            lambda_max,
            allow_unsafe: false,
        };
        s.validate()?;
        Ok(s)
    }

    /// Accepts any ordered pair; the flip rule is then only approximate.
    pub fn new_unsafe(lambda_min: f64, lambda_max: f64) -> Result<Self, QsimError> {
        let s = Self {
            lambda_min,
            lambda_max,
            allow_unsafe: true,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        let err = |reason| QsimError::Spectrum {
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            reason,
        };
        if !self.lambda_min.is_finite() || !self.lambda_max.is_finite() {
            return Err(err("eigenvalues must be finite"));
        }
        if self.lambda_max <= self.lambda_min {
            return Err(err("lambda_max must exceed lambda_min"));
        }
        if !self.allow_unsafe && !self.has_odd_gap() {
            return Err(err("gap must be an odd positive integer"));
        }
        Ok(())
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn is_unsafe(&self) -> bool {
        self.allow_unsafe
    }

    pub fn gap(&self) -> f64 {
        self.lambda_max - self.lambda_min
    }

    pub fn has_odd_gap(&self) -> bool {
        let g = self.gap();
        let r = g.round();
        (g - r).abs() < 1e-9 && r >= 1.0 && (r as i64) % 2 == 1
    }

    /// Eigenvalue attached to a probe level (false ↔ `λ_m`, true ↔ `λ_M`).
    pub fn level(&self, high: bool) -> f64 {
        if high {
            self.lambda_max
        } else {
            self.lambda_min
        }
    }
}
