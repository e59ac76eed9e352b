//! Fuzzy numbers as ladders of nested α-cut intervals.
//!
//! A [`FuzzyNumber`] stores one closed interval per level of a uniform grid
//! `α_i = i / (L - 1)`, `i = 0..L`, so both α = 0 (support) and α = 1 (core)
//! are always present. The supremum over α in the metric becomes a maximum
//! over grid levels, which is exact for crisp, triangular and trapezoidal
//! values since their endpoints are affine in α.

use std::fmt;
use std::ops::{Add, Mul, Neg};

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute level-wise tolerance used by `PartialEq`.
pub const EQ_TOL: f64 = 1e-12;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Number of uniformly spaced α levels, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LevelGrid(usize);

impl LevelGrid {
    pub const DEFAULT_LEVELS: usize = 101;

    pub fn new(level_count: usize) -> Result<Self> {
        if level_count < 2 {
            return Err(Error::LevelGrid(level_count));
        }
        Ok(LevelGrid(level_count))
    }

    pub fn level_count(self) -> usize {
        self.0
    }

    pub fn alpha(self, i: usize) -> f64 {
        i as f64 / (self.0 - 1) as f64
    }

    pub fn alphas(self) -> impl Iterator<Item = f64> {
        (0..self.0).map(move |i| self.alpha(i))
    }
}

impl Default for LevelGrid {
    fn default() -> Self {
        LevelGrid(Self::DEFAULT_LEVELS)
    }
}

/// A normal, convex, compactly supported fuzzy real number.
#[derive(Debug, Clone)]
pub struct FuzzyNumber {
    cuts: Vec<Interval>,
}

impl FuzzyNumber {
    /// Builds a value from its cuts at `α_i = i / (len - 1)`.
    ///
    /// Rejects non-finite endpoints, inverted intervals and cuts that are not
    /// nested (a higher level must sit inside every lower one).
    pub fn from_cuts(cuts: Vec<Interval>) -> Result<Self> {
        LevelGrid::new(cuts.len())?;
        for (i, c) in cuts.iter().enumerate() {
            if !c.lo.is_finite() || !c.hi.is_finite() {
                return Err(Error::InvalidCuts(format!(
                    "non-finite endpoint at level {i}"
                )));
            }
            if c.lo > c.hi {
                return Err(Error::InvalidCuts(format!("lo > hi at level {i}: {c}")));
            }
        }
        for (i, w) in cuts.windows(2).enumerate() {
            if !w[0].contains(&w[1]) {
                return Err(Error::InvalidCuts(format!(
                    "level {} cut {} is not inside level {} cut {}",
                    i + 1,
                    w[1],
                    i,
                    w[0]
                )));
            }
        }
        Ok(FuzzyNumber { cuts })
    }

    /// The crisp number `r̄` on the default grid.
    pub fn crisp(r: f64) -> Result<Self> {
        Self::crisp_on(r, LevelGrid::default())
    }

    pub fn crisp_on(r: f64, grid: LevelGrid) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::NonFinite(r));
        }
        Ok(FuzzyNumber {
            cuts: vec![Interval::point(r); grid.level_count()],
        })
    }

    /// `0̄` on the default grid.
    pub fn zero() -> Self {
        Self::zero_on(LevelGrid::default())
    }

    pub fn zero_on(grid: LevelGrid) -> Self {
        FuzzyNumber {
            cuts: vec![Interval::point(0.0); grid.level_count()],
        }
    }

    /// Triangular number with peak `center`; the α-cut is
    /// `[center − (1−α)·left, center + (1−α)·right]`.
    pub fn triangular(center: f64, left_spread: f64, right_spread: f64) -> Result<Self> {
        Self::triangular_on(center, left_spread, right_spread, LevelGrid::default())
    }

    pub fn triangular_on(
        center: f64,
        left_spread: f64,
        right_spread: f64,
        grid: LevelGrid,
    ) -> Result<Self> {
        for v in [center, left_spread, right_spread] {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
        }
        for s in [left_spread, right_spread] {
            if s < 0.0 {
                return Err(Error::NegativeSpread(s));
            }
        }
        let cuts = grid
            .alphas()
            .map(|a| {
                let r = 1.0 - a;
                Interval::new(center - r * left_spread, center + r * right_spread)
            })
            .collect();
        Ok(FuzzyNumber { cuts })
    }

    pub fn grid(&self) -> LevelGrid {
        LevelGrid(self.cuts.len())
    }

    pub fn cuts(&self) -> &[Interval] {
        &self.cuts
    }

    /// `(α, [x]_α)` pairs in increasing α.
    pub fn levels(&self) -> impl Iterator<Item = (f64, Interval)> + '_ {
        let grid = self.grid();
        self.cuts
            .iter()
            .enumerate()
            .map(move |(i, c)| (grid.alpha(i), *c))
    }

    pub fn support(&self) -> Interval {
        self.cuts[0]
    }

    pub fn core(&self) -> Interval {
        self.cuts[self.cuts.len() - 1]
    }

    /// The α-cut at an arbitrary level, linearly interpolated between grid levels.
    pub fn cut_at(&self, alpha: f64) -> Interval {
        let alpha = alpha.clamp(0.0, 1.0);
        let m = self.cuts.len();
        let pos = alpha * (m - 1) as f64;
        let i = (pos.floor() as usize).min(m - 2);
        let w = pos - i as f64;
        let (a, b) = (self.cuts[i], self.cuts[i + 1]);
        let lo = ((1.0 - w) * a.lo + w * b.lo).clamp(a.lo, b.lo);
        let hi = ((1.0 - w) * a.hi + w * b.hi).clamp(b.hi, a.hi);
        Interval::new(lo, hi.max(lo))
    }

    pub fn is_crisp(&self) -> bool {
        let c = self.cuts[0];
        c.lo == c.hi
    }

    /// Resamples onto `grid` by linear interpolation of the endpoints.
    pub fn resample(&self, grid: LevelGrid) -> FuzzyNumber {
        if grid == self.grid() {
            return self.clone();
        }
        let mut cuts: Vec<Interval> = grid.alphas().map(|a| self.cut_at(a)).collect();
        // Rounding in the interpolation must not break nesting.
        for i in 1..cuts.len() {
            let prev = cuts[i - 1];
            let c = &mut cuts[i];
            c.lo = c.lo.max(prev.lo);
            c.hi = c.hi.min(prev.hi).max(c.lo);
        }
        FuzzyNumber { cuts }
    }

    /// Brings two operands onto the finer of their grids.
    fn aligned<'a>(
        &'a self,
        other: &'a FuzzyNumber,
    ) -> (
        std::borrow::Cow<'a, FuzzyNumber>,
        std::borrow::Cow<'a, FuzzyNumber>,
    ) {
        use std::borrow::Cow;
        let (m, n) = (self.cuts.len(), other.cuts.len());
        if m == n {
            (Cow::Borrowed(self), Cow::Borrowed(other))
        } else if m > n {
            (Cow::Borrowed(self), Cow::Owned(other.resample(self.grid())))
        } else {
            (
                Cow::Owned(self.resample(other.grid())),
                Cow::Borrowed(other),
            )
        }
    }

    /// Level-wise interval sum.
    pub fn add(&self, other: &FuzzyNumber) -> FuzzyNumber {
        let (x, y) = self.aligned(other);
        let cuts = x
            .cuts
            .iter()
            .zip(&y.cuts)
            .map(|(a, b)| Interval::new(a.lo + b.lo, a.hi + b.hi))
            .collect();
        FuzzyNumber { cuts }
    }

    /// `c · x`; endpoints swap when `c < 0`.
    ///
    /// Panics if `c` is not finite.
    pub fn scale(&self, c: f64) -> FuzzyNumber {
        assert!(c.is_finite(), "scale factor must be finite, got {c}");
        let cuts = self
            .cuts
            .iter()
            .map(|iv| {
                if c >= 0.0 {
                    Interval::new(c * iv.lo, c * iv.hi)
                } else {
                    Interval::new(c * iv.hi, c * iv.lo)
                }
            })
            .collect();
        FuzzyNumber { cuts }
    }

    /// Translation by the crisp number `r̄`, i.e. `x + r̄`.
    pub fn translate(&self, r: f64) -> FuzzyNumber {
        assert!(r.is_finite(), "translation must be finite, got {r}");
        let cuts = self
            .cuts
            .iter()
            .map(|iv| Interval::new(iv.lo + r, iv.hi + r))
            .collect();
        FuzzyNumber { cuts }
    }

    /// `self += c · other` for `c ≥ 0`, in place.
    pub(crate) fn add_scaled_assign(&mut self, c: f64, other: &FuzzyNumber) {
        debug_assert!(c >= 0.0);
        if other.cuts.len() != self.cuts.len() {
            let resampled = other.resample(self.grid());
            return self.add_scaled_assign(c, &resampled);
        }
        for (a, b) in self.cuts.iter_mut().zip(&other.cuts) {
            a.lo += c * b.lo;
            a.hi += c * b.hi;
        }
    }

    /// `sup_α max(|x⁻_α − y⁻_α|, |x⁺_α − y⁺_α|)` over the shared grid.
    pub fn distance(&self, other: &FuzzyNumber) -> f64 {
        let (x, y) = self.aligned(other);
        x.cuts.iter().zip(&y.cuts).fold(0.0_f64, |m, (a, b)| {
            m.max((a.lo - b.lo).abs()).max((a.hi - b.hi).abs())
        })
    }

    /// `d(x, 0̄)`.
    pub fn magnitude(&self) -> f64 {
        self.cuts
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.lo.abs()).max(c.hi.abs()))
    }

    /// `x ⪯ y`: both endpoints of every cut of `x` are at most those of `y`.
    pub fn partial_leq(&self, other: &FuzzyNumber) -> bool {
        let (x, y) = self.aligned(other);
        x.cuts
            .iter()
            .zip(&y.cuts)
            .all(|(a, b)| a.lo <= b.lo && a.hi <= b.hi)
    }

    pub fn approx_eq(&self, other: &FuzzyNumber, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

impl PartialEq for FuzzyNumber {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, EQ_TOL)
    }
}

impl fmt::Display for FuzzyNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_crisp() {
            write!(f, "crisp({})", self.cuts[0].lo)
        } else {
            write!(f, "fuzzy(support {}, core {})", self.support(), self.core())
        }
    }
}

impl Add for &FuzzyNumber {
    type Output = FuzzyNumber;

    fn add(self, rhs: &FuzzyNumber) -> FuzzyNumber {
        FuzzyNumber::add(self, rhs)
    }
}

impl Mul<&FuzzyNumber> for f64 {
    type Output = FuzzyNumber;

    fn mul(self, rhs: &FuzzyNumber) -> FuzzyNumber {
        rhs.scale(self)
    }
}

impl Neg for &FuzzyNumber {
    type Output = FuzzyNumber;

    fn neg(self) -> FuzzyNumber {
        self.scale(-1.0)
    }
}

/// Result of checking both sides of the metric/order equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpsOrderCheck {
    /// `d(x, y) ≤ ε`
    pub metric_side: bool,
    /// `x − ε̄ ⪯ y ⪯ x + ε̄`
    pub order_side: bool,
}

impl EpsOrderCheck {
    pub fn agrees(&self) -> bool {
        self.metric_side == self.order_side
    }
}

/// Evaluates `d(x,y) ≤ ε` and `x − ε̄ ⪯ y ⪯ x + ε̄` independently.
///
/// `x − ε̄` is translation by the crisp number `−ε`.
pub fn eps_order_check(x: &FuzzyNumber, y: &FuzzyNumber, eps: f64) -> Result<EpsOrderCheck> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!(
            "ε must be positive and finite, got {eps}"
        )));
    }
    let metric_side = x.distance(y) <= eps;
    let order_side = x.translate(-eps).partial_leq(y) && y.partial_leq(&x.translate(eps));
    Ok(EpsOrderCheck {
        metric_side,
        order_side,
    })
}
