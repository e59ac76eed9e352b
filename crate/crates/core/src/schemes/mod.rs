//! Index schemes `(β_n, γ_n)`, weight sequences and the weighted total
//! `T_{βγ(n)} = Σ_{k∈[β_n, γ_n]} t_k`.

mod ratio;
mod scheme;
mod weights;

use serde::Serialize;

use crate::error::{Error, Result};

pub use ratio::{ratio_condition, RatioCondition, RatioEstimate, RATIO_MARGIN};
pub use scheme::{
    parse_scheme, BetaGammaScheme, BuiltinScheme, LacunaryFormula, LambdaFormula, SchemeValidation,
    Window,
};
pub use weights::{parse_weights, WeightSequence};

/// Finite stand-in for `n → ∞`: indices `1..=n_max`, with tail statistics
/// taken over `[trend_window, n_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HorizonPolicy {
    n_max: u64,
    trend_window: u64,
}

impl HorizonPolicy {
    pub fn new(n_max: u64, trend_window: u64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Horizon("empty horizon (n_max = 0)".into()));
        }
        if trend_window == 0 || trend_window >= n_max {
            return Err(Error::Horizon(format!(
                "trend window must satisfy 1 ≤ trend_window < n_max, got {trend_window} with n_max = {n_max}"
            )));
        }
        Ok(HorizonPolicy {
            n_max,
            trend_window,
        })
    }

    /// Tail window `n_max / 2`.
    pub fn with_default_window(n_max: u64) -> Result<Self> {
        Self::new(n_max, (n_max / 2).max(1))
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn trend_window(&self) -> u64 {
        self.trend_window
    }
}

/// `T_{βγ(n)}`; an empty window is an error.
pub fn weighted_total(scheme: &BetaGammaScheme, weights: &WeightSequence, n: u64) -> Result<f64> {
    let w = scheme.window(n)?;
    if w.is_empty() {
        return Err(Error::EmptyWindow {
            n,
            beta: w.lo,
            gamma: w.hi,
        });
    }
    weights.range_sum(w.lo, w.hi)
}
