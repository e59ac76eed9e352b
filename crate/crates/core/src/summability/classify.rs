use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyNumber;
use crate::sequences::{FuzzyFunctionSequence, XGrid};

use super::{
    absolute_partial, ordinary_partial, sp_density, verdict, Mode, ModeParams, Verdict, VerdictRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub n: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub x: f64,
    pub mode: Mode,
    pub points: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellVerdict {
    pub x: f64,
    pub mode: Mode,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NotMember,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeMembership {
    pub mode: Mode,
    pub membership: Membership,
}

/// Verdicts and traces for one family, scheme, weight sequence and `θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub scheme: String,
    pub weights: String,
    pub theta: f64,
    pub eps: f64,
    pub grid: Vec<f64>,
    pub horizon: u64,
    pub rule: VerdictRule,
    pub verdicts: Vec<CellVerdict>,
    pub traces: Vec<Trace>,
    pub membership: Vec<ModeMembership>,
}

impl ConvergenceReport {
    pub fn membership(&self, mode: Mode) -> Option<Membership> {
        self.membership
            .iter()
            .find(|m| m.mode == mode)
            .map(|m| m.membership)
    }

    pub fn trace(&self, x: f64, mode: Mode) -> Option<&Trace> {
        self.traces.iter().find(|t| t.x == x && t.mode == mode)
    }
}

/// `1, 2, 4, ...` up to `horizon`, with `horizon` itself appended when it is
/// not a power of two.
pub fn n_ladder(horizon: u64) -> Vec<u64> {
    let mut ladder: Vec<u64> = (0..64)
        .map(|j| 1u64 << j)
        .take_while(|&n| n <= horizon)
        .collect();
    if ladder.last().is_some_and(|&n| n != horizon) {
        ladder.push(horizon);
    }
    ladder
}

/// Limit override: `x ↦ f̂(x)`.
pub type LimitFn<'a> = dyn Fn(f64) -> FuzzyNumber + Sync + 'a;

/// Samples each requested transform along [`n_ladder`] at every grid point and
/// reads a verdict from each trace.
///
/// A mode is `Member` when every grid point converges to within `tol` of 0,
/// `NotMember` when some point diverges or settles at a value above `tol`
/// without still decreasing, and `Inconclusive` otherwise.
pub fn classify(
    seq: &dyn FuzzyFunctionSequence,
    limit: Option<&LimitFn<'_>>,
    params: &ModeParams,
    grid: &XGrid,
    horizon: u64,
    modes: &[Mode],
    rule: &VerdictRule,
) -> Result<ConvergenceReport> {
    if horizon == 0 {
        return Err(Error::Horizon("empty horizon (0)".into()));
    }
    let mut modes = modes.to_vec();
    modes.sort();
    modes.dedup();
    let ladder = n_ladder(horizon);
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

    let per_x: Vec<Vec<Trace>> = grid
        .points()
        .par_iter()
        .map(|&x| {
            let lim = limit_at(x)?;
            modes
                .iter()
                .map(|&mode| {
                    let points = ladder
                        .iter()
                        .map(|&n| {
                            let value = match mode {
                                Mode::Statistical => sp_density(seq, &lim, params, n, x)?,
                                Mode::Absolute => absolute_partial(seq, &lim, params, n, x)?,
                                Mode::Ordinary => {
                                    ordinary_partial(seq, params, n, x)?.distance(&lim)
                                }
                            };
                            Ok(TracePoint { n, value })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Trace { x, mode, points })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let traces: Vec<Trace> = per_x.into_iter().flatten().collect();

    let verdicts: Vec<CellVerdict> = traces
        .iter()
        .map(|t| {
            let pairs: Vec<(u64, f64)> = t.points.iter().map(|p| (p.n, p.value)).collect();
            CellVerdict {
                x: t.x,
                mode: t.mode,
                verdict: verdict(&pairs, rule),
            }
        })
        .collect();

    let membership = modes
        .iter()
        .map(|&mode| {
            let cells: Vec<(&CellVerdict, &Trace)> = verdicts
                .iter()
                .zip(&traces)
                .filter(|(v, _)| v.mode == mode)
                .collect();
            let member = cells.iter().all(|(v, _)| v.verdict.is_null(rule.tol));
            let contradicted = cells.iter().any(|(v, t)| contradicts(&v.verdict, t, rule));
            let membership = if member {
                Membership::Member
            } else if contradicted {
                Membership::NotMember
            } else {
                Membership::Inconclusive
            };
            ModeMembership { mode, membership }
        })
        .collect();

    Ok(ConvergenceReport {
        family: seq.label(),
        scheme: params.scheme.label().to_string(),
        weights: params.weights.label().to_string(),
        theta: params.theta,
        eps: params.eps,
        grid: grid.points().to_vec(),
        horizon,
        rule: *rule,
        verdicts,
        traces,
        membership,
    })
}

fn contradicts(v: &Verdict, trace: &Trace, rule: &VerdictRule) -> bool {
    match *v {
        Verdict::Diverges => true,
        Verdict::Converges(value) if value.abs() > rule.tol => {
            let w = rule.window.max(2).min(trace.points.len());
            let tail = &trace.points[trace.points.len() - w..];
            !tail.windows(2).all(|p| p[1].value < p[0].value)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{BetaGammaScheme, WeightSequence};
    use crate::sequences::{AlternatingCrisp, Domain};

    #[test]
    fn ladder_shape() {
        assert_eq!(n_ladder(16), vec![1, 2, 4, 8, 16]);
        assert_eq!(n_ladder(20), vec![1, 2, 4, 8, 16, 20]);
        assert_eq!(n_ladder(1), vec![1]);
    }

    #[test]
    fn alternating_family_is_ordinary_but_not_absolute() {
        let p = ModeParams::new(
            1.0,
            0.1,
            BetaGammaScheme::classical(),
            WeightSequence::constant(1.0).unwrap(),
        )
        .unwrap();
        let grid = XGrid::uniform(Domain::default(), 3).unwrap();
        let r = classify(
            &AlternatingCrisp,
            None,
            &p,
            &grid,
            1024,
            &[Mode::Ordinary, Mode::Absolute],
            &VerdictRule::default(),
        )
        .unwrap();
        assert_eq!(r.membership(Mode::Ordinary), Some(Membership::Member));
        assert_eq!(r.membership(Mode::Absolute), Some(Membership::NotMember));
        assert_eq!(r.traces.len(), 6);
        assert_eq!(r.traces[0].mode, Mode::Absolute);
    }
}
