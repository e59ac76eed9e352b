use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value must be finite, got {0}")]
    NonFinite(f64),

    #[error("negative spread {0} in triangular fuzzy number")]
    NegativeSpread(f64),

    #[error("invalid α-cut ladder: {0}")]
    InvalidCuts(String),

    #[error("level grid needs at least 2 levels, got {0}")]
    LevelGrid(usize),

    #[error("invalid horizon: {0}")]
    Horizon(String),

    #[error("index {n} is outside the horizon of {what}")]
    OutOfHorizon { what: String, n: u64 },

    #[error("empty window at n = {n}: γ = {gamma} < β = {beta}")]
    EmptyWindow { n: u64, beta: u64, gamma: u64 },

    #[error("{rule} violated: {detail}")]
    SchemeCondition { rule: &'static str, detail: String },

    #[error("invalid weight sequence: {0}")]
    Weights(String),

    #[error("invalid λ = {lambda}: {reason}")]
    Lambda { lambda: f64, reason: String },

    #[error("degenerate window at n = {n}: ratio denominator is {denominator}")]
    DegenerateWindow { n: u64, denominator: f64 },

    #[error("x = {x} lies outside the domain [{a}, {b}]")]
    OutsideDomain { x: f64, a: f64, b: f64 },

    #[error("invalid x-grid: {0}")]
    XGrid(String),

    #[error("index k must be at least 1")]
    ZeroIndex,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("{path}: {reason}")]
    Io { path: String, reason: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}
