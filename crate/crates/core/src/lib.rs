//! Weighted βγ-summability and statistical convergence of order θ for
//! sequences of fuzzy-number-valued functions.
//!
//! Fuzzy numbers are stored as α-cut ladders on a uniform level grid. A
//! [`BetaGammaScheme`] picks the index windows `[β_n, γ_n]`, a
//! [`WeightSequence`] weights them, and the [`summability`] transforms turn a
//! [`FuzzyFunctionSequence`] into finite traces that are read into verdicts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fuzzy;
pub mod numeric;
pub mod schemes;
pub mod sequences;
pub mod summability;
mod table;
pub mod tauberian;

pub use error::{Error, Result};
pub use fuzzy::{eps_order_check, EpsOrderCheck, FuzzyNumber, Interval, LevelGrid};
pub use schemes::{
    parse_scheme, parse_weights, ratio_condition, weighted_total, BetaGammaScheme, HorizonPolicy,
    RatioCondition, RatioEstimate, WeightSequence, Window,
};
pub use sequences::{
    builtin_family, parse_family, BuiltinFamily, Domain, FuzzyFunctionSequence, XGrid,
};
pub use summability::{
    classify, verdict, ConvergenceReport, Membership, Mode, ModeParams, Verdict, VerdictRule,
};
pub use tauberian::{
    slowly_decreasing_check, tauberian_experiment, TauberianConfig, TauberianReport,
};
