use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{checked_pow, isqrt};
use crate::table;

use super::HorizonPolicy;

/// Closed integer index range `[lo, hi]`; empty when `hi < lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub lo: u64,
    pub hi: u64,
}

impl Window {
    pub fn new(lo: u64, hi: u64) -> Self {
        Window { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }
}

/// `λ_n` for λ-based windows `[n − λ_n + 1, n]`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaFormula {
    /// `λ_n = n`
    Identity,
    /// `λ_n = ⌊√n⌋`
    Sqrt,
    /// `λ_n = 1 + ⌊log₂ n⌋`
    Log2,
    /// `λ_n = ⌈n/2⌉`
    Half,
    /// `λ_1, λ_2, ...` listed explicitly.
    Table(Arc<[u64]>),
}

impl LambdaFormula {
    pub fn value(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::ZeroIndex);
        }
        Ok(match self {
            LambdaFormula::Identity => n,
            LambdaFormula::Sqrt => isqrt(n),
            LambdaFormula::Log2 => 1 + u64::from(n.ilog2()),
            LambdaFormula::Half => n.div_ceil(2),
            LambdaFormula::Table(v) => {
                *v.get(n as usize - 1).ok_or_else(|| Error::OutOfHorizon {
                    what: "λ table".into(),
                    n,
                })?
            }
        })
    }

    fn id(&self) -> &'static str {
        match self {
            LambdaFormula::Identity => "n",
            LambdaFormula::Sqrt => "sqrt",
            LambdaFormula::Log2 => "log2",
            LambdaFormula::Half => "half",
            LambdaFormula::Table(_) => "table",
        }
    }

    fn horizon(&self) -> Option<u64> {
        match self {
            LambdaFormula::Table(v) => Some(v.len() as u64),
            _ => None,
        }
    }
}

/// Increasing integer sequence `k_0 = 0 < k_1 < k_2 < ...` for lacunary windows.
#[derive(Debug, Clone, PartialEq)]
pub enum LacunaryFormula {
    /// `k_0 = 0`, `k_r = 2^r` for `r ≥ 1`.
    Pow2,
    /// `k_0, k_1, ...` listed explicitly.
    Table(Arc<[u64]>),
}

impl LacunaryFormula {
    pub fn value(&self, r: u64) -> Result<u64> {
        match self {
            LacunaryFormula::Pow2 => match r {
                0 => Ok(0),
                r if r < 64 => Ok(1u64 << r),
                _ => Err(Error::OutOfHorizon {
                    what: "lacunary:pow2".into(),
                    n: r,
                }),
            },
            LacunaryFormula::Table(v) => {
                v.get(r as usize)
                    .copied()
                    .ok_or_else(|| Error::OutOfHorizon {
                        what: "lacunary table".into(),
                        n: r,
                    })
            }
        }
    }

    fn horizon(&self) -> u64 {
        match self {
            LacunaryFormula::Pow2 => 63,
            LacunaryFormula::Table(v) => v.len().saturating_sub(1) as u64,
        }
    }
}

type IndexFn = Arc<dyn Fn(u64) -> u64 + Send + Sync>;

#[derive(Clone)]
enum SchemeKind {
    Classical,
    Power(u32),
    Lambda(LambdaFormula),
    Lacunary(LacunaryFormula),
    Table(Arc<[(u64, u64)]>),
    Custom {
        beta: IndexFn,
        gamma: IndexFn,
    },
    Dilated {
        inner: Box<BetaGammaScheme>,
        lambda: f64,
    },
}

/// A pair of index sequences `(β_n, γ_n)` selecting windows `[β_n, γ_n]`.
///
/// Schemes are total maps evaluated lazily; nothing is tabulated.
#[derive(Clone)]
pub struct BetaGammaScheme {
    kind: SchemeKind,
    label: String,
}

impl fmt::Debug for BetaGammaScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BetaGammaScheme")
            .field("label", &self.label)
            .finish()
    }
}

/// Schemes with a named construction.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinScheme {
    /// `β_n = 1`, `γ_n = n`.
    Classical,
    /// `β_n = n − λ_n + 1`, `γ_n = n`.
    LambdaBased(LambdaFormula),
    /// `β_r = k_{r−1} + 1`, `γ_r = k_r`.
    Lacunary(LacunaryFormula),
}

/// Horizon over which λ-based side conditions are checked when the formula
/// itself is unbounded.
const LAMBDA_CHECK_HORIZON: u64 = 1 << 12;

impl BetaGammaScheme {
    pub fn classical() -> Self {
        BetaGammaScheme {
            kind: SchemeKind::Classical,
            label: "classical".into(),
        }
    }

    /// `β_n = 1`, `γ_n = n^p`.
    pub fn power(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::Parameter("pow exponent must be at least 1".into()));
        }
        Ok(BetaGammaScheme {
            kind: SchemeKind::Power(p),
            label: format!("pow:{p}"),
        })
    }

    /// Builds a named scheme, rejecting λ or `k_r` sequences that break their
    /// side conditions.
    pub fn builtin(kind: BuiltinScheme) -> Result<Self> {
        match kind {
            BuiltinScheme::Classical => Ok(Self::classical()),
            BuiltinScheme::LambdaBased(f) => {
                check_lambda(&f)?;
                let label = format!("lambda:{}", f.id());
                Ok(BetaGammaScheme {
                    kind: SchemeKind::Lambda(f),
                    label,
                })
            }
            BuiltinScheme::Lacunary(f) => {
                check_lacunary(&f)?;
                let label = match f {
                    LacunaryFormula::Pow2 => "lacunary:pow2".to_string(),
                    LacunaryFormula::Table(_) => "lacunary:table".to_string(),
                };
                Ok(BetaGammaScheme {
                    kind: SchemeKind::Lacunary(f),
                    label,
                })
            }
        }
    }

    /// Rows `(β_n, γ_n)` for `n = 1, 2, ...`.
    pub fn from_table(label: impl Into<String>, rows: Vec<(u64, u64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Parameter("scheme table is empty".into()));
        }
        if let Some(n) = rows.iter().position(|&(b, _)| b == 0) {
            return Err(Error::Parameter(format!("β_{} must be positive", n + 1)));
        }
        Ok(BetaGammaScheme {
            kind: SchemeKind::Table(rows.into()),
            label: label.into(),
        })
    }

    pub fn from_fns(
        label: impl Into<String>,
        beta: impl Fn(u64) -> u64 + Send + Sync + 'static,
        gamma: impl Fn(u64) -> u64 + Send + Sync + 'static,
    ) -> Self {
        BetaGammaScheme {
            kind: SchemeKind::Custom {
                beta: Arc::new(beta),
                gamma: Arc::new(gamma),
            },
            label: label.into(),
        }
    }

    /// Loads a `n β_n γ_n` table.
    pub fn from_file(path: &Path) -> Result<Self> {
        let rows: Vec<Vec<u64>> = table::read_rows(path, 3)?;
        table::check_consecutive(rows.iter().map(|r| r[0]))?;
        Self::from_table(
            format!("file:{}", path.display()),
            rows.into_iter().map(|r| (r[1], r[2])).collect(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Largest `n` at which the scheme is defined, when finite.
    pub fn horizon(&self) -> Option<u64> {
        match &self.kind {
            SchemeKind::Table(rows) => Some(rows.len() as u64),
            SchemeKind::Lacunary(f) => Some(f.horizon()),
            SchemeKind::Lambda(f) => f.horizon(),
            SchemeKind::Dilated { inner, .. } => inner.horizon(),
            _ => None,
        }
    }

    /// `[β_n, γ_n]`; may be empty for tables, custom and dilated schemes.
    pub fn window(&self, n: u64) -> Result<Window> {
        if n == 0 {
            return Err(Error::ZeroIndex);
        }
        let out_of_horizon = || Error::OutOfHorizon {
            what: self.label.clone(),
            n,
        };
        match &self.kind {
            SchemeKind::Classical => Ok(Window::new(1, n)),
            SchemeKind::Power(p) => Ok(Window::new(
                1,
                checked_pow(n, *p).ok_or_else(out_of_horizon)?,
            )),
            SchemeKind::Lambda(f) => {
                let lambda = f.value(n)?;
                if lambda == 0 || lambda > n {
                    return Err(Error::SchemeCondition {
                        rule: "1 ≤ λ_n ≤ n",
                        detail: format!("λ_{n} = {lambda}"),
                    });
                }
                Ok(Window::new(n - lambda + 1, n))
            }
            SchemeKind::Lacunary(f) => Ok(Window::new(f.value(n - 1)? + 1, f.value(n)?)),
            SchemeKind::Table(rows) => {
                let (b, g) = *rows.get(n as usize - 1).ok_or_else(out_of_horizon)?;
                Ok(Window::new(b, g))
            }
            SchemeKind::Custom { beta, gamma } => Ok(Window::new(beta(n), gamma(n))),
            SchemeKind::Dilated { inner, lambda } => {
                let w = inner.window(n)?;
                let scaled = lambda * w.hi as f64;
                if scaled >= u64::MAX as f64 {
                    return Err(out_of_horizon());
                }
                Ok(Window::new(w.lo, scaled.floor() as u64))
            }
        }
    }

    pub fn beta(&self, n: u64) -> Result<u64> {
        Ok(self.window(n)?.lo)
    }

    pub fn gamma(&self, n: u64) -> Result<u64> {
        Ok(self.window(n)?.hi)
    }

    /// The scheme `(β_n, ⌊λ γ_n⌋)`.
    ///
    /// Indices where the dilated γ falls below β are reported as empty
    /// windows by [`window`](Self::window) and as failures by [`validate`](Self::validate).
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Lambda {
                lambda,
                reason: "must be positive and finite".into(),
            });
        }
        Ok(BetaGammaScheme {
            kind: SchemeKind::Dilated {
                inner: Box::new(self.clone()),
                lambda,
            },
            label: format!("[{lambda}·γ] of {}", self.label),
        })
    }

    /// Checks monotonicity, `γ_n ≥ β_n` and divergence of `γ_n − β_n` over
    /// `[1, n_max]`; the last is accepted when the gap is non-decreasing past
    /// `trend_window` and ends strictly larger than it started there.
    pub fn validate(&self, h: &HorizonPolicy) -> Result<SchemeValidation> {
        let mut report = SchemeValidation {
            non_decreasing: true,
            gamma_ge_beta: true,
            gap_diverges: true,
            failures: Vec::new(),
        };
        let mut prev: Option<Window> = None;
        let mut gaps = Vec::with_capacity((h.n_max() - h.trend_window() + 1) as usize);
        for n in 1..=h.n_max() {
            let w = self.window(n)?;
            if let Some(p) = prev {
                if report.non_decreasing && (w.lo < p.lo || w.hi < p.hi) {
                    report.non_decreasing = false;
                    report
                        .failures
                        .push(format!("β or γ decreases at n = {n}: {p:?} → {w:?}"));
                }
            }
            if report.gamma_ge_beta && w.hi < w.lo {
                report.gamma_ge_beta = false;
                report
                    .failures
                    .push(format!("γ_{n} = {} < β_{n} = {}", w.hi, w.lo));
            }
            if n >= h.trend_window() {
                gaps.push(w.hi as i128 - w.lo as i128);
            }
            prev = Some(w);
        }
        let monotone = gaps.windows(2).all(|g| g[1] >= g[0]);
        let grows = gaps.last() > gaps.first();
        if !(monotone && grows) {
            report.gap_diverges = false;
            report.failures.push(format!(
                "γ_n − β_n does not grow over [{}, {}] (from {:?} to {:?})",
                h.trend_window(),
                h.n_max(),
                gaps.first(),
                gaps.last()
            ));
        }
        Ok(report)
    }
}

/// Outcome of [`BetaGammaScheme::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeValidation {
    pub non_decreasing: bool,
    pub gamma_ge_beta: bool,
    pub gap_diverges: bool,
    pub failures: Vec<String>,
}

impl SchemeValidation {
    pub fn all_pass(&self) -> bool {
        self.non_decreasing && self.gamma_ge_beta && self.gap_diverges
    }
}

fn condition(rule: &'static str, detail: String) -> Error {
    Error::SchemeCondition { rule, detail }
}

fn check_lambda(f: &LambdaFormula) -> Result<()> {
    let horizon = f.horizon().unwrap_or(LAMBDA_CHECK_HORIZON);
    if horizon == 0 {
        return Err(condition("λ_1 = 1", "λ table is empty".into()));
    }
    let first = f.value(1)?;
    if first != 1 {
        return Err(condition("λ_1 = 1", format!("λ_1 = {first}")));
    }
    let mut prev = first;
    for n in 2..=horizon {
        let v = f.value(n)?;
        if v < prev {
            return Err(condition(
                "λ non-decreasing",
                format!("λ_{n} = {v} < λ_{} = {prev}", n - 1),
            ));
        }
        if v > prev + 1 {
            return Err(condition(
                "λ_{n+1} ≤ λ_n + 1",
                format!("λ_{n} = {v}, λ_{} = {prev}", n - 1),
            ));
        }
        prev = v;
    }
    let mid = f.value(horizon / 2 + 1)?;
    if prev <= mid {
        return Err(condition(
            "λ_n → ∞",
            format!("λ stays at {prev} over [{}, {horizon}]", horizon / 2 + 1),
        ));
    }
    Ok(())
}

fn check_lacunary(f: &LacunaryFormula) -> Result<()> {
    let k0 = f.value(0)?;
    if k0 != 0 {
        return Err(condition("k_0 = 0", format!("k_0 = {k0}")));
    }
    let horizon = f.horizon();
    if horizon == 0 {
        return Err(condition(
            "k_r increasing",
            "need at least k_0 and k_1".into(),
        ));
    }
    let mut prev = k0;
    for r in 1..=horizon {
        let k = f.value(r)?;
        if k <= prev {
            return Err(condition(
                "k_r increasing",
                format!("k_{r} = {k} ≤ k_{} = {prev}", r - 1),
            ));
        }
        prev = k;
    }
    Ok(())
}

/// Parses `classical`, `pow:p`, `lambda:<n|sqrt|log2|half>`, `lacunary:pow2`
/// or `file:<path>`.
pub fn parse_scheme(spec: &str) -> Result<BetaGammaScheme> {
    let spec = spec.trim();
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    match (head, arg) {
        ("classical", None) => Ok(BetaGammaScheme::classical()),
        ("pow", Some(p)) => {
            let p: u32 = p
                .parse()
                .map_err(|_| Error::parse(p, "pow exponent must be a positive integer"))?;
            BetaGammaScheme::power(p).map_err(|e| Error::parse(spec, e.to_string()))
        }
        ("lambda", Some(id)) => {
            let f = match id {
                "n" => LambdaFormula::Identity,
                "sqrt" => LambdaFormula::Sqrt,
                "log2" => LambdaFormula::Log2,
                "half" => LambdaFormula::Half,
                other => {
                    return Err(Error::parse(
                        other,
                        "unknown λ formula (expected n, sqrt, log2 or half)",
                    ))
                }
            };
            BetaGammaScheme::builtin(BuiltinScheme::LambdaBased(f))
        }
        ("lacunary", Some("pow2")) => {
            BetaGammaScheme::builtin(BuiltinScheme::Lacunary(LacunaryFormula::Pow2))
        }
        ("lacunary", Some(other)) => Err(Error::parse(
            other,
            "unknown lacunary sequence (expected pow2)",
        )),
        ("file", Some(path)) => BetaGammaScheme::from_file(Path::new(path)),
        _ => Err(Error::parse(
            spec,
            "unknown scheme (expected classical, pow:p, lambda:<id>, lacunary:pow2 or file:<path>)",
        )),
    }
}
