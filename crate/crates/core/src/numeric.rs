//! Integer roots, harmonic numbers and compensated summation.

use std::sync::OnceLock;

/// Largest `r` with `r * r <= n`.
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

/// Largest `r` with `r^3 <= n`.
pub fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    while r > 0 && cube(r).is_none_or(|c| c > n) {
        r -= 1;
    }
    while cube(r + 1).is_some_and(|c| c <= n) {
        r += 1;
    }
    r
}

fn cube(r: u64) -> Option<u64> {
    r.checked_mul(r)?.checked_mul(r)
}

pub fn is_square(k: u64) -> bool {
    let r = isqrt(k);
    r * r == k
}

pub fn is_cube(k: u64) -> bool {
    let r = icbrt(k);
    r * r * r == k
}

/// Number of perfect squares in `[lo, hi]` (positive squares only).
pub fn count_squares(lo: u64, hi: u64) -> u64 {
    if hi < lo {
        return 0;
    }
    isqrt(hi) - isqrt(lo.saturating_sub(1))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

const HARMONIC_TABLE_LEN: usize = 1 << 20;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn harmonic_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(HARMONIC_TABLE_LEN + 1);
        let mut acc = CompensatedSum::new();
        table.push(0.0);
        for k in 1..=HARMONIC_TABLE_LEN {
            acc.add(1.0 / k as f64);
            table.push(acc.value());
        }
        table
    })
}

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
///
/// Tabulated up to 2^20; beyond that the asymptotic expansion is accurate to
/// well below one ulp.
pub fn harmonic(n: u64) -> f64 {
    if (n as usize) <= HARMONIC_TABLE_LEN {
        return harmonic_table()[n as usize];
    }
    let x = n as f64;
    let inv2 = 1.0 / (x * x);
    x.ln() + EULER_GAMMA + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0 - inv2 * inv2 * inv2 / 252.0
}

/// `n^p` for an integer exponent, `None` on overflow.
pub fn checked_pow(n: u64, p: u32) -> Option<u64> {
    n.checked_pow(p)
}
