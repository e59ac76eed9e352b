use serde::Serialize;

use crate::error::{Error, Result};

use super::{BetaGammaScheme, HorizonPolicy, WeightSequence};

/// Strict-inequality margin for the "holds" thresholds.
pub const RATIO_MARGIN: f64 = 1e-9;

/// The four conditions on `T = T_{βγ(n)}` and `T' = T_{β([λγ])(n)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RatioCondition {
    /// `liminf T'/T > 1`, `λ > 1`.
    ExpansionGrowth,
    /// `liminf T/T' > 1`, `0 < λ < 1`.
    ContractionGrowth,
    /// `limsup T'/(T' − T) < ∞`, `λ > 1`.
    ExpansionBound,
    /// `limsup T'/(T − T') < ∞`, `0 < λ < 1`.
    ContractionBound,
}

impl RatioCondition {
    pub fn label(self) -> &'static str {
        match self {
            RatioCondition::ExpansionGrowth => "liminf T'/T > 1",
            RatioCondition::ContractionGrowth => "liminf T/T' > 1",
            RatioCondition::ExpansionBound => "limsup T'/(T' - T) < ∞",
            RatioCondition::ContractionBound => "limsup T'/(T - T') < ∞",
        }
    }

    fn needs_expansion(self) -> bool {
        matches!(
            self,
            RatioCondition::ExpansionGrowth | RatioCondition::ExpansionBound
        )
    }
}

/// Tail estimate of a ratio condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub condition: RatioCondition,
    pub lambda: f64,
    /// Minimum for the growth conditions, maximum for the bounds, over the tail window.
    pub estimate: f64,
    pub holds: bool,
    pub n_from: u64,
    pub n_to: u64,
    /// Indices where `[λγ_n] < β_n`; these count as `T' = 0`.
    pub empty_dilated_windows: Vec<u64>,
}

/// Estimates `liminf`/`limsup` of the chosen ratio as the min/max over
/// `[trend_window, n_max]`.
pub fn ratio_condition(
    scheme: &BetaGammaScheme,
    weights: &WeightSequence,
    lambda: f64,
    h: &HorizonPolicy,
    which: RatioCondition,
) -> Result<RatioEstimate> {
    let expanding = which.needs_expansion();
    if expanding && !(lambda > 1.0) {
        return Err(Error::Lambda {
            lambda,
            reason: format!("{} needs λ > 1", which.label()),
        });
    }
    if !expanding && !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Lambda {
            lambda,
            reason: format!("{} needs 0 < λ < 1", which.label()),
        });
    }
    let dilated = scheme.dilate(lambda)?;
    let mut empty = Vec::new();
    let mut estimate = match which {
        RatioCondition::ExpansionGrowth | RatioCondition::ContractionGrowth => f64::INFINITY,
        RatioCondition::ExpansionBound | RatioCondition::ContractionBound => f64::NEG_INFINITY,
    };
    for n in h.trend_window()..=h.n_max() {
        let t = super::weighted_total(scheme, weights, n)?;
        let w = dilated.window(n)?;
        if w.is_empty() {
            empty.push(n);
        }
        let td = weights.range_sum(w.lo, w.hi)?;
        let value = match which {
            RatioCondition::ExpansionGrowth => td / t,
            RatioCondition::ContractionGrowth => {
                if td > 0.0 {
                    t / td
                } else {
                    f64::INFINITY
                }
            }
            RatioCondition::ExpansionBound | RatioCondition::ContractionBound => {
                let denominator = if which == RatioCondition::ExpansionBound {
                    td - t
                } else {
                    t - td
                };
                if denominator <= 0.0 {
                    return Err(Error::DegenerateWindow { n, denominator });
                }
                td / denominator
            }
        };
        estimate = match which {
            RatioCondition::ExpansionGrowth | RatioCondition::ContractionGrowth => {
                estimate.min(value)
            }
            RatioCondition::ExpansionBound | RatioCondition::ContractionBound => {
                estimate.max(value)
            }
        };
    }
    let holds = match which {
        RatioCondition::ExpansionGrowth | RatioCondition::ContractionGrowth => {
            estimate > 1.0 + RATIO_MARGIN
        }
        RatioCondition::ExpansionBound | RatioCondition::ContractionBound => estimate.is_finite(),
    };
    Ok(RatioEstimate {
        condition: which,
        lambda,
        estimate,
        holds,
        n_from: h.trend_window(),
        n_to: h.n_max(),
        empty_dilated_windows: empty,
    })
}
