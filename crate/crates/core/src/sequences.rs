//! Sequences of fuzzy functions `k ↦ f̂_k(·)` on a closed interval, the
//! built-in example families and a boundedness probe.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyNumber;
use crate::numeric::{icbrt, is_cube, is_square, isqrt};
use crate::table;

/// Closed interval `[a, b]` on which a family is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

impl Domain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::XGrid(format!(
                "[{a}, {b}] is not a finite closed interval"
            )));
        }
        Ok(Domain { a, b })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

impl Default for Domain {
    fn default() -> Self {
        Domain { a: 1.0, b: 2.0 }
    }
}

/// Sample points, strictly increasing and inside the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XGrid {
    points: Vec<f64>,
}

impl XGrid {
    pub const DEFAULT_POINTS: usize = 5;

    pub fn new(points: Vec<f64>, domain: Domain) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::XGrid("grid is empty".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::XGrid("points must be strictly increasing".into()));
        }
        if let Some(&x) = points.iter().find(|&&x| !domain.contains(x)) {
            return Err(Error::OutsideDomain {
                x,
                a: domain.a,
                b: domain.b,
            });
        }
        Ok(XGrid { points })
    }

    /// `count` evenly spaced points including both endpoints.
    pub fn uniform(domain: Domain, count: usize) -> Result<Self> {
        match count {
            0 => Err(Error::XGrid("grid needs at least one point".into())),
            1 => Self::new(vec![domain.a], domain),
            _ if domain.a == domain.b => Err(Error::XGrid(format!(
                "{count} distinct points do not fit in the degenerate interval [{}, {}]",
                domain.a, domain.b
            ))),
            _ => {
                let step = (domain.b - domain.a) / (count - 1) as f64;
                let mut points: Vec<f64> = (0..count).map(|i| domain.a + step * i as f64).collect();
                points[count - 1] = domain.b;
                Self::new(points, domain)
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// A family `k ↦ f̂_k(x)`, `k ≥ 1`, `x ∈ [a, b]`.
///
/// Families that equal a single value outside a sparse index set can expose
/// it through [`base_value`](Self::base_value) and
/// [`for_each_exception`](Self::for_each_exception); window sums then cost
/// time proportional to the number of exceptions.
pub trait FuzzyFunctionSequence: Send + Sync {
    fn label(&self) -> String;

    fn domain(&self) -> Domain {
        Domain::default()
    }

    /// `f̂_k(x)` without argument checks.
    fn value(&self, k: u64, x: f64) -> FuzzyNumber;

    /// `f̂_k(x)`, rejecting `k = 0` and `x` outside the domain.
    fn eval(&self, k: u64, x: f64) -> Result<FuzzyNumber> {
        if k == 0 {
            return Err(Error::ZeroIndex);
        }
        let d = self.domain();
        if !d.contains(x) {
            return Err(Error::OutsideDomain { x, a: d.a, b: d.b });
        }
        Ok(self.value(k, x))
    }

    /// The limit function the family is meant to approach, if any.
    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        None
    }

    /// The value taken at every index outside the exceptional set.
    fn base_value(&self, _x: f64) -> Option<FuzzyNumber> {
        None
    }

    /// Calls `f(k, f̂_k(x))` for each exceptional `k ∈ [lo, hi]` in ascending
    /// order. Only meaningful when `base_value` is `Some`.
    fn for_each_exception(
        &self,
        _lo: u64,
        _hi: u64,
        _x: f64,
        _f: &mut dyn FnMut(u64, FuzzyNumber),
    ) {
    }
}

fn crisp(r: f64) -> FuzzyNumber {
    FuzzyNumber::crisp(r).expect("finite crisp value")
}

fn for_each_square(lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    if hi < lo {
        return;
    }
    let mut r = isqrt(lo.saturating_sub(1)) + 1;
    while let Some(k) = r.checked_mul(r).filter(|&k| k <= hi) {
        f(k);
        r += 1;
    }
}

fn for_each_cube(lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    if hi < lo {
        return;
    }
    let mut r = icbrt(lo.saturating_sub(1)) + 1;
    while let Some(k) = r
        .checked_mul(r)
        .and_then(|s| s.checked_mul(r))
        .filter(|&k| k <= hi)
    {
        f(k);
        r += 1;
    }
}

/// `0̄` at square `k`, `crisp(M)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareIndicator {
    pub m: f64,
}

impl FuzzyFunctionSequence for SquareIndicator {
    fn label(&self) -> String {
        format!("ex3.1:M={}", self.m)
    }

    fn value(&self, k: u64, _x: f64) -> FuzzyNumber {
        if is_square(k) {
            FuzzyNumber::zero()
        } else {
            crisp(self.m)
        }
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(crisp(self.m))
    }

    fn base_value(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(crisp(self.m))
    }

    fn for_each_exception(&self, lo: u64, hi: u64, _x: f64, f: &mut dyn FnMut(u64, FuzzyNumber)) {
        for_each_square(lo, hi, |k| f(k, FuzzyNumber::zero()));
    }
}

/// `triangular(0, xk, xk)` at square `k`, `0̄` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TriangularGrowing;

impl TriangularGrowing {
    fn at(k: u64, x: f64) -> FuzzyNumber {
        let s = x * k as f64;
        FuzzyNumber::triangular(0.0, s, s).expect("non-negative spread")
    }
}

impl FuzzyFunctionSequence for TriangularGrowing {
    fn label(&self) -> String {
        "ex3.2".into()
    }

    fn value(&self, k: u64, x: f64) -> FuzzyNumber {
        if is_square(k) {
            Self::at(k, x)
        } else {
            FuzzyNumber::zero()
        }
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(FuzzyNumber::zero())
    }

    fn base_value(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(FuzzyNumber::zero())
    }

    fn for_each_exception(&self, lo: u64, hi: u64, x: f64, f: &mut dyn FnMut(u64, FuzzyNumber)) {
        for_each_square(lo, hi, |k| f(k, Self::at(k, x)));
    }
}

/// `triangular(0, x/k, x/k)` at cube `k`, `0̄` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CubeTriangularDecaying;

impl CubeTriangularDecaying {
    fn at(k: u64, x: f64) -> FuzzyNumber {
        let s = x / k as f64;
        FuzzyNumber::triangular(0.0, s, s).expect("non-negative spread")
    }
}

impl FuzzyFunctionSequence for CubeTriangularDecaying {
    fn label(&self) -> String {
        "ex3.3".into()
    }

    fn value(&self, k: u64, x: f64) -> FuzzyNumber {
        if is_cube(k) {
            Self::at(k, x)
        } else {
            FuzzyNumber::zero()
        }
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(FuzzyNumber::zero())
    }

    fn base_value(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(FuzzyNumber::zero())
    }

    fn for_each_exception(&self, lo: u64, hi: u64, x: f64, f: &mut dyn FnMut(u64, FuzzyNumber)) {
        for_each_cube(lo, hi, |k| f(k, Self::at(k, x)));
    }
}

/// `crisp((−1)^{k+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlternatingCrisp;

impl FuzzyFunctionSequence for AlternatingCrisp {
    fn label(&self) -> String {
        "ex4.1".into()
    }

    fn value(&self, k: u64, _x: f64) -> FuzzyNumber {
        crisp(if k % 2 == 1 { 1.0 } else { -1.0 })
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(FuzzyNumber::zero())
    }
}

/// `0̄` when `k ≤ n` and `k` is a square, `crisp(M)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSquareIndicator {
    pub n: u64,
    pub m: f64,
}

impl FuzzyFunctionSequence for TruncatedSquareIndicator {
    fn label(&self) -> String {
        format!("remark3:n={},M={}", self.n, self.m)
    }

    fn value(&self, k: u64, _x: f64) -> FuzzyNumber {
        if k <= self.n && is_square(k) {
            FuzzyNumber::zero()
        } else {
            crisp(self.m)
        }
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(crisp(self.m))
    }

    fn base_value(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(crisp(self.m))
    }

    fn for_each_exception(&self, lo: u64, hi: u64, _x: f64, f: &mut dyn FnMut(u64, FuzzyNumber)) {
        for_each_square(lo, hi.min(self.n), |k| f(k, FuzzyNumber::zero()));
    }
}

/// `crisp(1/k)`, converging to `0̄`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Reciprocal;

impl FuzzyFunctionSequence for Reciprocal {
    fn label(&self) -> String {
        "recip".into()
    }

    fn value(&self, k: u64, _x: f64) -> FuzzyNumber {
        crisp(1.0 / k as f64)
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(FuzzyNumber::zero())
    }
}

/// The same value at every `k` and `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantFamily {
    pub value: FuzzyNumber,
    label: String,
}

impl ConstantFamily {
    pub fn new(label: impl Into<String>, value: FuzzyNumber) -> Self {
        ConstantFamily {
            value,
            label: label.into(),
        }
    }
}

impl FuzzyFunctionSequence for ConstantFamily {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn value(&self, _k: u64, _x: f64) -> FuzzyNumber {
        self.value.clone()
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(self.value.clone())
    }

    fn base_value(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(self.value.clone())
    }
}

/// Triangular values listed per `k`, constant in `x`; the last row repeats
/// for larger `k` and is also the claimed limit.
#[derive(Debug, Clone)]
pub struct TableFamily {
    values: Arc<[FuzzyNumber]>,
    label: String,
}

impl TableFamily {
    /// Rows `(center, spread)` for `k = 1, 2, ...`.
    pub fn new(label: impl Into<String>, rows: &[(f64, f64)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Parameter("family table is empty".into()));
        }
        let values = rows
            .iter()
            .map(|&(c, s)| FuzzyNumber::triangular(c, s, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(TableFamily {
            values: values.into(),
            label: label.into(),
        })
    }

    /// Loads a `k center spread` table.
    pub fn from_file(path: &Path) -> Result<Self> {
        let rows: Vec<Vec<f64>> = table::read_rows(path, 3)?;
        table::check_consecutive(rows.iter().map(|r| r[0] as u64))?;
        if let Some(r) = rows.iter().find(|r| r[0].fract() != 0.0) {
            return Err(Error::parse(
                r[0].to_string(),
                "row index must be an integer",
            ));
        }
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r[1], r[2])).collect();
        Self::new(format!("file:{}", path.display()), &pairs)
    }

    fn last(&self) -> &FuzzyNumber {
        self.values.last().expect("non-empty table")
    }
}

impl FuzzyFunctionSequence for TableFamily {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn value(&self, k: u64, _x: f64) -> FuzzyNumber {
        self.values
            .get(k as usize - 1)
            .unwrap_or_else(|| self.last())
            .clone()
    }

    fn claimed_limit(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(self.last().clone())
    }

    fn base_value(&self, _x: f64) -> Option<FuzzyNumber> {
        Some(self.last().clone())
    }

    fn for_each_exception(&self, lo: u64, hi: u64, _x: f64, f: &mut dyn FnMut(u64, FuzzyNumber)) {
        let top = hi.min(self.values.len() as u64 - 1);
        for k in lo..=top {
            f(k, self.values[k as usize - 1].clone());
        }
    }
}

type ValueFn = Arc<dyn Fn(u64, f64) -> FuzzyNumber + Send + Sync>;
type LimitFn = Arc<dyn Fn(f64) -> FuzzyNumber + Send + Sync>;

/// A family defined by closures.
#[derive(Clone)]
pub struct FnSequence {
    label: String,
    domain: Domain,
    value: ValueFn,
    limit: Option<LimitFn>,
}

impl FnSequence {
    pub fn new(
        label: impl Into<String>,
        domain: Domain,
        value: impl Fn(u64, f64) -> FuzzyNumber + Send + Sync + 'static,
    ) -> Self {
        FnSequence {
            label: label.into(),
            domain,
            value: Arc::new(value),
            limit: None,
        }
    }

    pub fn with_limit(
        mut self,
        limit: impl Fn(f64) -> FuzzyNumber + Send + Sync + 'static,
    ) -> Self {
        self.limit = Some(Arc::new(limit));
        self
    }
}

impl fmt::Debug for FnSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSequence")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl FuzzyFunctionSequence for FnSequence {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn value(&self, k: u64, x: f64) -> FuzzyNumber {
        (self.value)(k, x)
    }

    fn claimed_limit(&self, x: f64) -> Option<FuzzyNumber> {
        self.limit.as_ref().map(|l| l(x))
    }
}

/// The named example families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinFamily {
    SquareIndicator { m: f64 },
    TriangularGrowing,
    CubeTriangularDecaying,
    AlternatingCrisp,
    TruncatedSquareIndicator { n: u64, m: f64 },
}

pub fn builtin_family(kind: BuiltinFamily) -> Result<Arc<dyn FuzzyFunctionSequence>> {
    Ok(match kind {
        BuiltinFamily::SquareIndicator { m } => {
            finite(m)?;
            Arc::new(SquareIndicator { m })
        }
        BuiltinFamily::TriangularGrowing => Arc::new(TriangularGrowing),
        BuiltinFamily::CubeTriangularDecaying => Arc::new(CubeTriangularDecaying),
        BuiltinFamily::AlternatingCrisp => Arc::new(AlternatingCrisp),
        BuiltinFamily::TruncatedSquareIndicator { n, m } => {
            finite(m)?;
            Arc::new(TruncatedSquareIndicator { n, m })
        }
    })
}

fn finite(m: f64) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(m))
    }
}

fn parse_params<'a>(spec: &'a str, args: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    args.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::parse(kv, format!("expected key=value in `{spec}`")))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(token, format!("{what} must be a number")))
}

/// Parses `ex3.1[:M=<real>]`, `ex3.2`, `ex3.3`, `ex4.1`,
/// `remark3:n=<int>[,M=<real>]`, `recip`, `const:<real>` or `file:<path>`.
pub fn parse_family(spec: &str) -> Result<Arc<dyn FuzzyFunctionSequence>> {
    let spec = spec.trim();
    let (head, args) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    match (head, args) {
        ("ex3.1", args) => {
            let mut m = 1.0;
            for (k, v) in args.map(|a| parse_params(spec, a)).transpose()?.unwrap_or_default() {
                match k {
                    "M" => m = parse_num(v, "M")?,
                    other => return Err(Error::parse(other, "unknown parameter for ex3.1 (expected M)")),
                }
            }
            builtin_family(BuiltinFamily::SquareIndicator { m })
        }
        ("ex3.2", None) => builtin_family(BuiltinFamily::TriangularGrowing),
        ("ex3.3", None) => builtin_family(BuiltinFamily::CubeTriangularDecaying),
        ("ex4.1", None) => builtin_family(BuiltinFamily::AlternatingCrisp),
        ("remark3", Some(a)) => {
            let (mut n, mut m) = (None, 1.0);
            for (k, v) in parse_params(spec, a)? {
                match k {
                    "n" => n = Some(parse_num::<u64>(v, "n")?),
                    "M" => m = parse_num(v, "M")?,
                    other => return Err(Error::parse(other, "unknown parameter for remark3 (expected n or M)")),
                }
            }
            let n = n.ok_or_else(|| Error::parse(spec, "remark3 needs n=<int>"))?;
            builtin_family(BuiltinFamily::TruncatedSquareIndicator { n, m })
        }
        ("recip", None) => Ok(Arc::new(Reciprocal)),
        ("const", Some(c)) => {
            let v: f64 = parse_num(c, "constant")?;
            Ok(Arc::new(ConstantFamily::new(
                format!("const:{v}"),
                FuzzyNumber::crisp(v).map_err(|e| Error::parse(c, e.to_string()))?,
            )))
        }
        ("file", Some(path)) => Ok(Arc::new(TableFamily::from_file(Path::new(path))?)),
        _ => Err(Error::parse(
            spec,
            "unknown family (expected ex3.1[:M=..], ex3.2, ex3.3, ex4.1, remark3:n=.., recip, const:c or file:<path>)",
        )),
    }
}

/// Outcome of [`is_bounded`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Boundedness {
    pub bounded: bool,
    /// `max d(f̂_k(x), 0̄)` over the grid and `k ≤ k_max`.
    pub bound: f64,
    /// Index and point where the maximum was attained.
    pub witness_k: u64,
    pub witness_x: f64,
}

/// Samples `d(f̂_k(x), 0̄)` over `grid × [1, k_max]`. The family counts as
/// bounded when the running maximum at `k_max` equals the one at `k_max / 2`.
pub fn is_bounded(
    seq: &dyn FuzzyFunctionSequence,
    grid: &XGrid,
    k_max: u64,
) -> Result<Boundedness> {
    if k_max == 0 {
        return Err(Error::ZeroIndex);
    }
    let half = (k_max / 2).max(1);
    let (mut best, mut at_half) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut witness_k, mut witness_x) = (1, grid.points()[0]);
    for k in 1..=k_max {
        for &x in grid.points() {
            let v = seq.eval(k, x)?.magnitude();
            if v > best {
                best = v;
                witness_k = k;
                witness_x = x;
            }
        }
        if k == half {
            at_half = best;
        }
    }
    Ok(Boundedness {
        bounded: best <= at_half * (1.0 + 1e-12) + 1e-12,
        bound: best,
        witness_k,
        witness_x,
    })
}
