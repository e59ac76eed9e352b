//! The three convergence transforms, finite-horizon verdicts and class
//! membership reports.

mod classify;
mod transforms;
mod verdict;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schemes::{BetaGammaScheme, WeightSequence};

pub use classify::{
    classify, n_ladder, CellVerdict, ConvergenceReport, Membership, ModeMembership, Trace,
    TracePoint,
};
pub use transforms::{
    absolute_partial, absolute_partial_via, ordinary_partial, ordinary_partial_via, sp_count,
    sp_count_via, sp_density, sp_density_via, window_total, Route,
};
pub use verdict::{verdict, Verdict, VerdictRule};

/// `θ`, `ε`, the scheme and the weights shared by all transforms.
#[derive(Debug, Clone)]
pub struct ModeParams {
    pub theta: f64,
    pub eps: f64,
    pub scheme: BetaGammaScheme,
    pub weights: WeightSequence,
}

impl ModeParams {
    pub fn new(
        theta: f64,
        eps: f64,
        scheme: BetaGammaScheme,
        weights: WeightSequence,
    ) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::Parameter(format!(
                "θ must lie in (0, 1], got {theta}"
            )));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Parameter(format!(
                "ε must be positive and finite, got {eps}"
            )));
        }
        Ok(ModeParams {
            theta,
            eps,
            scheme,
            weights,
        })
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(theta, self.eps, self.scheme.clone(), self.weights.clone())
    }
}

/// Which transform a trace follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Mode {
    /// Density of indices with `t_k d ≥ ε`.
    #[serde(rename = "sp")]
    Statistical,
    /// Weighted mean of metric deviations.
    #[serde(rename = "abs")]
    Absolute,
    /// Distance from the fuzzy weighted mean to the limit.
    #[serde(rename = "ord")]
    Ordinary,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Statistical, Mode::Absolute, Mode::Ordinary];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Statistical => "sp",
            Mode::Absolute => "abs",
            Mode::Ordinary => "ord",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sp" => Ok(Mode::Statistical),
            "abs" => Ok(Mode::Absolute),
            "ord" => Ok(Mode::Ordinary),
            other => Err(Error::parse(
                other,
                "unknown mode (expected sp, abs or ord)",
            )),
        }
    }
}
