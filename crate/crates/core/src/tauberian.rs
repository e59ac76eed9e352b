//! Slowly decreasing sequences and the subsequence-convergence experiment.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyNumber;
use crate::schemes::{
    ratio_condition, BetaGammaScheme, HorizonPolicy, RatioCondition, RatioEstimate, WeightSequence,
};
use crate::sequences::{FuzzyFunctionSequence, XGrid};
use crate::summability::{
    classify, n_ladder, ordinary_partial, verdict, window_total, ConvergenceReport, Membership,
    Mode, ModeParams, TracePoint, Verdict, VerdictRule,
};

/// Every `(n, k)` with `n0 < n < k ≤ ⌊λn⌋`, `k ≤ horizon` at which
/// `û_k ⪰ û_n − ε̄` fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowDecreaseWitness {
    pub eps: f64,
    pub lambda: f64,
    pub n0: u64,
    pub horizon: u64,
    pub violations: Vec<(u64, u64)>,
}

impl SlowDecreaseWitness {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_slow_params(eps: f64, lambda: f64, n0: u64, horizon: u64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!(
            "ε must be positive and finite, got {eps}"
        )));
    }
    if n0 >= horizon {
        return Err(Error::Horizon(format!(
            "n0 = {n0} must be below the horizon {horizon}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::Lambda {
            lambda,
            reason: "must be finite".into(),
        });
    }
    Ok(())
}

fn values(seq: &dyn FuzzyFunctionSequence, x: f64, horizon: u64) -> Result<Vec<FuzzyNumber>> {
    (1..=horizon).map(|k| seq.eval(k, x)).collect()
}

fn dilated_index(lambda: f64, n: u64) -> u64 {
    (lambda * n as f64).floor() as u64
}

/// Exhaustive scan of the slowly-decreasing condition at `x`.
pub fn slowly_decreasing_check(
    seq: &dyn FuzzyFunctionSequence,
    x: f64,
    eps: f64,
    lambda: f64,
    n0: u64,
    horizon: u64,
) -> Result<SlowDecreaseWitness> {
    check_slow_params(eps, lambda, n0, horizon)?;
    if !(lambda > 1.0) {
        return Err(Error::Lambda {
            lambda,
            reason: "slow decrease needs λ > 1".into(),
        });
    }
    let u = values(seq, x, horizon)?;
    let violations = (n0 + 1..=horizon)
        .into_par_iter()
        .flat_map_iter(|n| {
            let lowered = u[n as usize - 1].translate(-eps);
            let top = dilated_index(lambda, n).min(horizon);
            let u = &u;
            (n + 1..=top)
                .filter(move |&k| !lowered.partial_leq(&u[k as usize - 1]))
                .map(move |k| (n, k))
        })
        .collect();
    Ok(SlowDecreaseWitness {
        eps,
        lambda,
        n0,
        horizon,
        violations,
    })
}

/// Backward form with `0 < λ < 1`: every `(k, n)` with `n0 < k`,
/// `⌊λn⌋ < k < n ≤ horizon` at which `û_n ⪰ û_k − ε̄` fails.
pub fn slowly_decreasing_check_backward(
    seq: &dyn FuzzyFunctionSequence,
    x: f64,
    eps: f64,
    lambda: f64,
    n0: u64,
    horizon: u64,
) -> Result<SlowDecreaseWitness> {
    check_slow_params(eps, lambda, n0, horizon)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Lambda {
            lambda,
            reason: "the backward form needs 0 < λ < 1".into(),
        });
    }
    let u = values(seq, x, horizon)?;
    let mut violations = (1..=horizon)
        .into_par_iter()
        .flat_map_iter(|n| {
            let u = &u;
            let start = (dilated_index(lambda, n) + 1).max(n0 + 1);
            (start..n)
                .filter(move |&k| {
                    !u[k as usize - 1]
                        .translate(-eps)
                        .partial_leq(&u[n as usize - 1])
                })
                .map(move |k| (k, n))
        })
        .collect::<Vec<_>>();
    violations.sort_unstable();
    Ok(SlowDecreaseWitness {
        eps,
        lambda,
        n0,
        horizon,
        violations,
    })
}

/// Condensed scan with `n0 = 0`: which starting indices `n` have at least one
/// violating partner `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowDecreaseScan {
    pub eps: f64,
    pub lambda: f64,
    pub horizon: u64,
    pub violating_starts: u64,
    pub first_violation: Option<(u64, u64)>,
    pub last_violating_start: Option<u64>,
}

/// Sliding-window minimum over each cut endpoint; `O(levels · horizon)`.
#[allow(clippy::needless_range_loop)]
fn scan_values(u: &[FuzzyNumber], eps: f64, lambda: f64) -> SlowDecreaseScan {
    let h = u.len();
    let mut bad = vec![false; h + 1];
    let levels = u.first().map_or(0, |v| v.cuts().len());
    for side in 0..2 {
        for level in 0..levels {
            let a = |k: usize| {
                let c = u[k - 1].cuts()[level];
                if side == 0 {
                    c.lo
                } else {
                    c.hi
                }
            };
            let mut window: VecDeque<usize> = VecDeque::new();
            let mut pushed = 0usize;
            for n in 1..=h {
                let top = dilated_index(lambda, n as u64).min(h as u64) as usize;
                while pushed < top {
                    pushed += 1;
                    if pushed <= n {
                        continue;
                    }
                    while window.back().is_some_and(|&j| a(j) >= a(pushed)) {
                        window.pop_back();
                    }
                    window.push_back(pushed);
                }
                while window.front().is_some_and(|&j| j <= n) {
                    window.pop_front();
                }
                if let Some(&j) = window.front() {
                    if a(n) - eps > a(j) {
                        bad[n] = true;
                    }
                }
            }
        }
    }
    let violating: Vec<usize> = (1..=h).filter(|&n| bad[n]).collect();
    let first_violation = violating.first().map(|&n| {
        let lowered = u[n - 1].translate(-eps);
        let top = dilated_index(lambda, n as u64).min(h as u64);
        let k = (n as u64 + 1..=top)
            .find(|&k| !lowered.partial_leq(&u[k as usize - 1]))
            .expect("flagged start has a violating partner");
        (n as u64, k)
    });
    SlowDecreaseScan {
        eps,
        lambda,
        horizon: h as u64,
        violating_starts: violating.len() as u64,
        first_violation,
        last_violating_start: violating.last().map(|&n| n as u64),
    }
}

/// [`SlowDecreaseScan`] for `seq` at `x`.
pub fn slowly_decreasing_scan(
    seq: &dyn FuzzyFunctionSequence,
    x: f64,
    eps: f64,
    lambda: f64,
    horizon: u64,
) -> Result<SlowDecreaseScan> {
    check_slow_params(eps, lambda, 0, horizon)?;
    if !(lambda > 1.0) {
        return Err(Error::Lambda {
            lambda,
            reason: "slow decrease needs λ > 1".into(),
        });
    }
    Ok(scan_values(&values(seq, x, horizon)?, eps, lambda))
}

/// One evaluation of the window-splitting identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub n: u64,
    pub x: f64,
    pub lambda: f64,
    pub defect: f64,
    pub tolerance: f64,
    pub holds: bool,
}

fn window_sum(
    seq: &dyn FuzzyFunctionSequence,
    weights: &WeightSequence,
    lo: u64,
    hi: u64,
    x: f64,
) -> Result<FuzzyNumber> {
    let mut acc = FuzzyNumber::zero();
    for k in lo..=hi {
        acc.add_scaled_assign(weights.weight(k)?, &seq.eval(k, x)?);
    }
    Ok(acc)
}

/// Checks the splitting identity relating `Ŝ_{βγ(n)}` and
/// `Ŝ_{β([λγ])(n)}` at `θ = 1`.
///
/// For `λ > 1`, with `A = T_{β([λγ])(n)}`, `B = T_{βγ(n)}`:
/// `A/(A−B)·Ŝ' + Ŝ = A/(A−B)·Ŝ + 1/(A−B)·Σ_{k∈[γ_n+1, [λγ_n]]} t_k f̂_k(x)`.
///
/// For `0 < λ < 1`:
/// `A/(B−A)·Ŝ' + 1/(B−A)·Σ_{k∈[[λγ_n]+1, γ_n]} t_k f̂_k(x) = A/(B−A)·Ŝ + Ŝ`,
/// where `A·Ŝ'` is `0̄` when the dilated window is empty.
pub fn identity_check(
    seq: &dyn FuzzyFunctionSequence,
    scheme: &BetaGammaScheme,
    weights: &WeightSequence,
    lambda: f64,
    n: u64,
    x: f64,
) -> Result<IdentityCheck> {
    if lambda == 1.0 {
        return Err(Error::Lambda {
            lambda,
            reason: "the identity needs λ ≠ 1".into(),
        });
    }
    let base = ModeParams::new(1.0, 1.0, scheme.clone(), weights.clone())?;
    let dilated = ModeParams::new(1.0, 1.0, scheme.dilate(lambda)?, weights.clone())?;
    let (w, b) = window_total(&base, n)?;
    let wd = dilated.scheme.window(n)?;
    if wd.hi + 1 < w.lo {
        return Err(Error::EmptyWindow {
            n,
            beta: wd.lo,
            gamma: wd.hi,
        });
    }
    let a = weights.range_sum(wd.lo, wd.hi)?;
    let s = ordinary_partial(seq, &base, n, x)?;
    let s_dilated = if wd.is_empty() {
        FuzzyNumber::zero()
    } else {
        ordinary_partial(seq, &dilated, n, x)?
    };
    let (lhs, rhs) = if lambda > 1.0 {
        let gap = a - b;
        if !(gap > 0.0) {
            return Err(Error::DegenerateWindow {
                n,
                denominator: gap,
            });
        }
        let c = a / gap;
        let tail = window_sum(seq, weights, w.hi + 1, wd.hi, x)?;
        (
            s_dilated.scale(c).add(&s),
            s.scale(c).add(&tail.scale(1.0 / gap)),
        )
    } else {
        let gap = b - a;
        if !(gap > 0.0) {
            return Err(Error::DegenerateWindow {
                n,
                denominator: gap,
            });
        }
        let c = a / gap;
        let tail = window_sum(seq, weights, wd.hi + 1, w.hi, x)?;
        (
            s_dilated.scale(c).add(&tail.scale(1.0 / gap)),
            s.scale(c).add(&s),
        )
    };
    let defect = lhs.distance(&rhs);
    let tolerance = 1e-9 * lhs.magnitude().max(rhs.magnitude()).max(1.0);
    Ok(IdentityCheck {
        n,
        x,
        lambda,
        defect,
        tolerance,
        holds: defect <= tolerance,
    })
}

/// Parameters of [`tauberian_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauberianConfig {
    pub eps_ladder: Vec<f64>,
    /// Candidate `λ > 1` for the slow-decrease search and the ratio growth check.
    pub lambdas: Vec<f64>,
    pub rule: VerdictRule,
}

impl Default for TauberianConfig {
    fn default() -> Self {
        TauberianConfig {
            eps_ladder: vec![0.1, 0.05, 0.01],
            lambdas: vec![1.25, 1.5, 2.0],
            rule: VerdictRule::default(),
        }
    }
}

/// Slow-decrease outcome for one grid point and one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowDecreaseResult {
    pub x: f64,
    pub eps: f64,
    pub holds: bool,
    /// `(λ, n0)` under which no violation was found.
    pub witness: Option<(f64, u64)>,
    /// A violating `(n, k)` with `n0 = 0` at the largest tested `λ`, when the
    /// property fails.
    pub counterexample: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypotheses {
    pub slowly_decreasing: Vec<SlowDecreaseResult>,
    pub slowly_decreasing_pass: bool,
    pub condition2: Vec<RatioEstimate>,
    pub condition2_pass: bool,
    pub summable: ConvergenceReport,
    pub summable_pass: bool,
}

impl Hypotheses {
    pub fn all_pass(&self) -> bool {
        self.slowly_decreasing_pass && self.condition2_pass && self.summable_pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsequenceTrace {
    pub x: f64,
    /// `d(f̂_{γ_n}(x), f̂(x))` along the n-ladder.
    pub points: Vec<TracePoint>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conclusion {
    pub traces: Vec<SubsequenceTrace>,
    pub converges: bool,
    /// When every hypothesis passes: whether each converging trace settles
    /// within the finest `ε` of the ladder.
    pub sandwich_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub checked: usize,
    pub max_defect: f64,
    pub failures: Vec<IdentityCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauberianReport {
    pub family: String,
    pub scheme: String,
    pub weights: String,
    pub horizon: u64,
    pub config: TauberianConfig,
    pub hypotheses: Hypotheses,
    pub conclusion: Conclusion,
    pub identities: IdentitySummary,
}

fn n0_for(last_violating_start: Option<u64>, cap: u64) -> Option<u64> {
    let Some(last) = last_violating_start else {
        return Some(0);
    };
    let n0 = last.next_power_of_two();
    (n0 <= cap).then_some(n0)
}

/// Checks each hypothesis of the subsequence-convergence result on the grid, then
/// measures `d(f̂_{γ_n}(x), f̂(x))` whatever the hypotheses say.
///
/// Slow decrease at `(x, ε)` passes when some tested `λ` admits an
/// `n0 ∈ {0, 1, 2, 4, ...}` no larger than `horizon / 4` with no violation
/// up to `horizon`.
pub fn tauberian_experiment(
    seq: &dyn FuzzyFunctionSequence,
    limit: Option<&(dyn Fn(f64) -> FuzzyNumber + Sync)>,
    scheme: &BetaGammaScheme,
    weights: &WeightSequence,
    grid: &XGrid,
    horizon: u64,
    config: &TauberianConfig,
) -> Result<TauberianReport> {
    if horizon < 4 {
        return Err(Error::Horizon(format!(
            "horizon must be at least 4, got {horizon}"
        )));
    }
    if config.eps_ladder.is_empty() || config.eps_ladder.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Parameter(
            "ε ladder must be non-empty and positive".into(),
        ));
    }
    if config.lambdas.is_empty() || config.lambdas.iter().any(|l| !(*l > 1.0)) {
        return Err(Error::Parameter(
            "λ candidates must be non-empty and above 1".into(),
        ));
    }
    let limit_at = |x: f64| -> Result<FuzzyNumber> {
        match limit {
            Some(f) => Ok(f(x)),
            None => seq.claimed_limit(x).ok_or_else(|| {
                Error::Parameter(format!(
                    "family {} has no limit to compare against",
                    seq.label()
                ))
            }),
        }
    };

    let cap = horizon / 4;
    let slowly_decreasing = grid
        .points()
        .par_iter()
        .map(|&x| {
            let u = values(seq, x, horizon)?;
            Ok(config
                .eps_ladder
                .iter()
                .map(|&eps| {
                    let mut witness = None;
                    let mut counterexample = None;
                    for &lambda in &config.lambdas {
                        let scan = scan_values(&u, eps, lambda);
                        if witness.is_none() {
                            witness = n0_for(scan.last_violating_start, cap).map(|n0| (lambda, n0));
                        }
                        if scan.first_violation.is_some() {
                            counterexample = scan.first_violation;
                        }
                    }
                    SlowDecreaseResult {
                        x,
                        eps,
                        holds: witness.is_some(),
                        witness,
                        counterexample: if witness.is_some() {
                            None
                        } else {
                            counterexample
                        },
                    }
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let slowly_decreasing_pass = slowly_decreasing.iter().all(|r| r.holds);

    let policy = HorizonPolicy::with_default_window(horizon)?;
    let condition2 = config
        .lambdas
        .iter()
        .map(|&l| ratio_condition(scheme, weights, l, &policy, RatioCondition::ExpansionGrowth))
        .collect::<Result<Vec<_>>>()?;
    let condition2_pass = condition2.iter().all(|r| r.holds);

    let params = ModeParams::new(1.0, config.eps_ladder[0], scheme.clone(), weights.clone())?;
    let summable = classify(
        seq,
        limit,
        &params,
        grid,
        horizon,
        &[Mode::Ordinary],
        &config.rule,
    )?;
    let summable_pass = summable.membership(Mode::Ordinary) == Some(Membership::Member);

    let ladder = n_ladder(horizon);
    let traces = grid
        .points()
        .par_iter()
        .map(|&x| {
            let lim = limit_at(x)?;
            let points = ladder
                .iter()
                .map(|&n| {
                    let g = scheme.gamma(n)?;
                    Ok(TracePoint {
                        n,
                        value: seq.eval(g, x)?.distance(&lim),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let pairs: Vec<(u64, f64)> = points.iter().map(|p| (p.n, p.value)).collect();
            Ok(SubsequenceTrace {
                x,
                verdict: verdict(&pairs, &config.rule),
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let converges = traces.iter().all(|t| t.verdict.is_null(config.rule.tol));
    let hypotheses = Hypotheses {
        slowly_decreasing,
        slowly_decreasing_pass,
        condition2,
        condition2_pass,
        summable,
        summable_pass,
    };
    let finest = config
        .eps_ladder
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sandwich_holds = hypotheses.all_pass().then(|| {
        traces.iter().all(|t| match t.verdict {
            Verdict::Converges(v) => v.abs() <= finest,
            _ => true,
        })
    });

    let mut lambdas: Vec<f64> = config.lambdas.clone();
    lambdas.extend(config.lambdas.iter().map(|l| 1.0 / l));
    let identity_n: Vec<u64> = ladder
        .iter()
        .copied()
        .filter(|&n| n <= horizon.min(1 << 10))
        .collect();
    let checks = grid
        .points()
        .par_iter()
        .map(|&x| {
            let mut out = Vec::new();
            for &lambda in &lambdas {
                for &n in &identity_n {
                    match identity_check(seq, scheme, weights, lambda, n, x) {
                        Ok(c) => out.push(c),
                        Err(Error::EmptyWindow { .. } | Error::DegenerateWindow { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let identities = IdentitySummary {
        checked: checks.len(),
        max_defect: checks.iter().map(|c| c.defect).fold(0.0, f64::max),
        failures: checks.into_iter().filter(|c| !c.holds).collect(),
    };

    Ok(TauberianReport {
        family: seq.label(),
        scheme: scheme.label().to_string(),
        weights: weights.label().to_string(),
        horizon,
        config: config.clone(),
        hypotheses,
        conclusion: Conclusion {
            traces,
            converges,
            sandwich_holds,
        },
        identities,
    })
}
