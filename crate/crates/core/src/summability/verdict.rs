use serde::Serialize;

/// Thresholds for reading a finite trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictRule {
    pub tol: f64,
    pub window: usize,
    pub divergence_factor: f64,
}

impl Default for VerdictRule {
    fn default() -> Self {
        VerdictRule {
            tol: 0.05,
            window: 4,
            divergence_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Verdict {
    Converges(f64),
    Diverges,
    Inconclusive,
}

impl Verdict {
    pub fn is_null(&self, tol: f64) -> bool {
        matches!(self, Verdict::Converges(v) if v.abs() <= tol)
    }
}

/// `Diverges` when the last `window` values strictly increase and the final
/// one reaches `divergence_factor · (|first| + 1)`; otherwise `Converges(v)`
/// when they all lie within `tol` of their mean `v`; otherwise `Inconclusive`.
///
/// Traces shorter than the window are inconclusive.
pub fn verdict(trace: &[(u64, f64)], rule: &VerdictRule) -> Verdict {
    let w = rule.window.max(1);
    if trace.len() < w || trace.iter().any(|(_, v)| !v.is_finite()) {
        return Verdict::Inconclusive;
    }
    let tail: Vec<f64> = trace[trace.len() - w..].iter().map(|&(_, v)| v).collect();
    let first = trace[0].1;
    let last = tail[w - 1];
    let increasing = w > 1 && tail.windows(2).all(|p| p[1] > p[0]);
    if increasing && last >= rule.divergence_factor * (first.abs() + 1.0) {
        return Verdict::Diverges;
    }
    let mean = tail.iter().sum::<f64>() / w as f64;
    if tail.iter().all(|v| (v - mean).abs() <= rule.tol) {
        return Verdict::Converges(mean);
    }
    Verdict::Inconclusive
}
