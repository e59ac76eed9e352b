use crate::error::{Error, Result};
use crate::fuzzy::FuzzyNumber;
use crate::numeric::CompensatedSum;
use crate::schemes::Window;
use crate::sequences::FuzzyFunctionSequence;

use super::ModeParams;

/// How window sums are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Use the family's base value and exceptional indices when it has them.
    #[default]
    Auto,
    /// Visit every index.
    Dense,
}

/// `[β_n, γ_n]` and `T_{βγ(n)}`.
pub fn window_total(p: &ModeParams, n: u64) -> Result<(Window, f64)> {
    let w = p.scheme.window(n)?;
    if w.is_empty() {
        return Err(Error::EmptyWindow {
            n,
            beta: w.lo,
            gamma: w.hi,
        });
    }
    let total = p.weights.range_sum(w.lo, w.hi)?;
    if !(total > 0.0) {
        return Err(Error::Internal(format!(
            "T_{{βγ({n})}} = {total} is not positive"
        )));
    }
    Ok((w, total))
}

fn check_point(seq: &dyn FuzzyFunctionSequence, x: f64) -> Result<()> {
    let d = seq.domain();
    if d.contains(x) {
        Ok(())
    } else {
        Err(Error::OutsideDomain { x, a: d.a, b: d.b })
    }
}

/// `s_n(x) = T^{−θ} Σ_{k∈[β_n,γ_n]} t_k d(f̂_k(x), f̂(x))`.
pub fn absolute_partial(
    seq: &dyn FuzzyFunctionSequence,
    limit: &FuzzyNumber,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<f64> {
    absolute_partial_via(Route::Auto, seq, limit, p, n, x)
}

pub fn absolute_partial_via(
    route: Route,
    seq: &dyn FuzzyFunctionSequence,
    limit: &FuzzyNumber,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<f64> {
    check_point(seq, x)?;
    let (w, total) = window_total(p, n)?;
    let sum = match (route, seq.base_value(x)) {
        (Route::Auto, Some(base)) => {
            let d0 = base.distance(limit);
            let mut acc = CompensatedSum::new();
            acc.add(d0 * total);
            let mut failure = None;
            seq.for_each_exception(w.lo, w.hi, x, &mut |k, v| match p.weights.weight(k) {
                Ok(t) => acc.add(t * (v.distance(limit) - d0)),
                Err(e) => failure = failure.take().or(Some(e)),
            });
            if let Some(e) = failure {
                return Err(e);
            }
            acc.value().max(0.0)
        }
        _ => {
            let mut acc = CompensatedSum::new();
            for k in w.lo..=w.hi {
                acc.add(p.weights.weight(k)? * seq.value(k, x).distance(limit));
            }
            acc.value()
        }
    };
    Ok(sum / total.powf(p.theta))
}

/// `Ŝ_n(x) = T^{−θ} Σ_{k∈[β_n,γ_n]} t_k f̂_k(x)`, level by level.
pub fn ordinary_partial(
    seq: &dyn FuzzyFunctionSequence,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<FuzzyNumber> {
    ordinary_partial_via(Route::Auto, seq, p, n, x)
}

pub fn ordinary_partial_via(
    route: Route,
    seq: &dyn FuzzyFunctionSequence,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<FuzzyNumber> {
    check_point(seq, x)?;
    let (w, total) = window_total(p, n)?;
    let sum = match (route, seq.base_value(x)) {
        (Route::Auto, Some(base)) => {
            let mut exceptional = Vec::new();
            seq.for_each_exception(w.lo, w.hi, x, &mut |k, v| exceptional.push((k, v)));
            let mut exceptional_weight = CompensatedSum::new();
            let mut weighted = Vec::with_capacity(exceptional.len());
            for (k, v) in exceptional {
                let t = p.weights.weight(k)?;
                exceptional_weight.add(t);
                weighted.push((t, v));
            }
            let mut acc = base.scale((total - exceptional_weight.value()).max(0.0));
            for (t, v) in &weighted {
                acc.add_scaled_assign(*t, v);
            }
            acc
        }
        _ => {
            let mut acc = seq.value(w.lo, x).scale(p.weights.weight(w.lo)?);
            for k in w.lo + 1..=w.hi {
                acc.add_scaled_assign(p.weights.weight(k)?, &seq.value(k, x));
            }
            acc
        }
    };
    Ok(sum.scale(1.0 / total.powf(p.theta)))
}

/// `|{k ≤ ⌊T_{βγ(n)}⌋ : t_k d(f̂_k(x), f̂(x)) ≥ ε}|`.
pub fn sp_count(
    seq: &dyn FuzzyFunctionSequence,
    limit: &FuzzyNumber,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<u64> {
    sp_count_via(Route::Auto, seq, limit, p, n, x)
}

pub fn sp_count_via(
    route: Route,
    seq: &dyn FuzzyFunctionSequence,
    limit: &FuzzyNumber,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<u64> {
    check_point(seq, x)?;
    let (_, total) = window_total(p, n)?;
    let top = total.floor() as u64;
    if top == 0 {
        return Ok(0);
    }
    if route == Route::Auto {
        if let Some(base) = seq.base_value(x) {
            let d0 = base.distance(limit);
            let base_counts = match p.weights.constant_value() {
                Some(c) => Some(c * d0 >= p.eps),
                None if d0 == 0.0 => Some(false),
                None => None,
            };
            if let Some(base_counts) = base_counts {
                let (mut exceptions, mut hits) = (0u64, 0u64);
                let mut failure = None;
                seq.for_each_exception(1, top, x, &mut |k, v| {
                    exceptions += 1;
                    match p.weights.weight(k) {
                        Ok(t) if t * v.distance(limit) >= p.eps => hits += 1,
                        Ok(_) => {}
                        Err(e) => failure = failure.take().or(Some(e)),
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
                let regular = if base_counts { top - exceptions } else { 0 };
                return Ok(regular + hits);
            }
        }
    }
    let mut count = 0;
    for k in 1..=top {
        if p.weights.weight(k)? * seq.value(k, x).distance(limit) >= p.eps {
            count += 1;
        }
    }
    Ok(count)
}

/// [`sp_count`] divided by `T_{βγ(n)}^θ`.
pub fn sp_density(
    seq: &dyn FuzzyFunctionSequence,
    limit: &FuzzyNumber,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<f64> {
    sp_density_via(Route::Auto, seq, limit, p, n, x)
}

pub fn sp_density_via(
    route: Route,
    seq: &dyn FuzzyFunctionSequence,
    limit: &FuzzyNumber,
    p: &ModeParams,
    n: u64,
    x: f64,
) -> Result<f64> {
    let count = sp_count_via(route, seq, limit, p, n, x)?;
    let (_, total) = window_total(p, n)?;
    Ok(count as f64 / total.powf(p.theta))
}
