use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{harmonic, CompensatedSum};
use crate::table;

use super::HorizonPolicy;

#[derive(Clone)]
enum WeightKind {
    Const(f64),
    HarmonicPlus,
    Table { t: Arc<[f64]>, prefix: Arc<[f64]> },
}

/// Positive weights `t_k`, `k ≥ 1`, with O(1) range sums.
#[derive(Clone)]
pub struct WeightSequence {
    kind: WeightKind,
    label: String,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("label", &self.label)
            .finish()
    }
}

impl WeightSequence {
    /// `t_k = c`.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Weights(format!(
                "constant weight must be positive and finite, got {c}"
            )));
        }
        Ok(WeightSequence {
            kind: WeightKind::Const(c),
            label: format!("const:{c}"),
        })
    }

    /// `t_k = 1 + 1/k`.
    pub fn harmonic_plus() -> Self {
        WeightSequence {
            kind: WeightKind::HarmonicPlus,
            label: "harmonicplus".into(),
        }
    }

    /// `t_1, t_2, ...` listed explicitly; indices past the table are out of horizon.
    pub fn from_values(label: impl Into<String>, t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::Weights("weight table is empty".into()));
        }
        if let Some((i, v)) = t
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::Weights(format!(
                "t_{} = {v} is not a non-negative real",
                i + 1
            )));
        }
        if t[0] <= 0.0 {
            return Err(Error::Weights(format!(
                "t_1 must be positive, got {}",
                t[0]
            )));
        }
        let mut prefix = Vec::with_capacity(t.len() + 1);
        let mut acc = CompensatedSum::new();
        prefix.push(0.0);
        for &v in &t {
            acc.add(v);
            prefix.push(acc.value());
        }
        Ok(WeightSequence {
            kind: WeightKind::Table {
                t: t.into(),
                prefix: prefix.into(),
            },
            label: label.into(),
        })
    }

    /// Loads a `k t_k` table.
    pub fn from_file(path: &Path) -> Result<Self> {
        let rows: Vec<Vec<f64>> = table::read_rows(path, 2)?;
        for (expected, row) in (1u64..).zip(&rows) {
            if row[0] != expected as f64 {
                return Err(Error::parse(
                    row[0].to_string(),
                    format!(
                        "row indices must run 1, 2, 3, ...; expected {expected} (in {})",
                        path.display()
                    ),
                ));
            }
        }
        Self::from_values(
            format!("file:{}", path.display()),
            rows.into_iter().map(|r| r[1]).collect(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The common value when every weight is the same.
    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn horizon(&self) -> Option<u64> {
        match &self.kind {
            WeightKind::Table { t, .. } => Some(t.len() as u64),
            _ => None,
        }
    }

    pub fn weight(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::ZeroIndex);
        }
        match &self.kind {
            WeightKind::Const(c) => Ok(*c),
            WeightKind::HarmonicPlus => Ok(1.0 + 1.0 / k as f64),
            WeightKind::Table { t, .. } => {
                t.get(k as usize - 1)
                    .copied()
                    .ok_or_else(|| Error::OutOfHorizon {
                        what: self.label.clone(),
                        n: k,
                    })
            }
        }
    }

    /// `Σ_{k=lo}^{hi} t_k`, zero for an empty range.
    pub fn range_sum(&self, lo: u64, hi: u64) -> Result<f64> {
        if lo == 0 {
            return Err(Error::ZeroIndex);
        }
        if hi < lo {
            return Ok(0.0);
        }
        let count = (hi - lo + 1) as f64;
        match &self.kind {
            WeightKind::Const(c) => Ok(c * count),
            WeightKind::HarmonicPlus => Ok(count + (harmonic(hi) - harmonic(lo - 1))),
            WeightKind::Table { prefix, .. } => {
                let top = prefix.get(hi as usize).ok_or_else(|| Error::OutOfHorizon {
                    what: self.label.clone(),
                    n: hi,
                })?;
                Ok(top - prefix[lo as usize - 1])
            }
        }
    }

    /// Checks `t_1 > 0` and that the minimum weight over the tail window stays
    /// above a small margin (finite-horizon `liminf t_k > 0`).
    pub fn validate(&self, h: &HorizonPolicy) -> Result<()> {
        let first = self.weight(1)?;
        if first <= 0.0 {
            return Err(Error::Weights(format!("t_1 must be positive, got {first}")));
        }
        let tail_min = match &self.kind {
            WeightKind::Const(c) => *c,
            WeightKind::HarmonicPlus => 1.0,
            WeightKind::Table { .. } => (h.trend_window()..=h.n_max())
                .map(|k| self.weight(k))
                .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))?,
        };
        if tail_min <= super::RATIO_MARGIN {
            return Err(Error::Weights(format!(
                "liminf t_k is not bounded away from 0: min over [{}, {}] is {tail_min}",
                h.trend_window(),
                h.n_max()
            )));
        }
        Ok(())
    }
}

/// Parses `const:c`, `recip5`, `harmonicplus` or `file:<path>`.
pub fn parse_weights(spec: &str) -> Result<WeightSequence> {
    let spec = spec.trim();
    match spec.split_once(':') {
        None if spec == "recip5" => {
            let mut w = WeightSequence::constant(0.2)?;
            w.label = "recip5".into();
            Ok(w)
        }
        None if spec == "harmonicplus" => Ok(WeightSequence::harmonic_plus()),
        Some(("const", c)) => {
            let v: f64 = c
                .parse()
                .map_err(|_| Error::parse(c, "constant weight must be a number"))?;
            WeightSequence::constant(v).map_err(|e| Error::parse(c, e.to_string()))
        }
        Some(("file", path)) => WeightSequence::from_file(Path::new(path)),
        _ => Err(Error::parse(
            spec,
            "unknown weights (expected const:c, recip5, harmonicplus or file:<path>)",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(w: &WeightSequence, lo: u64, hi: u64) -> f64 {
        (lo..=hi).map(|k| w.weight(k).unwrap()).sum()
    }

    #[test]
    fn closed_form_range_sums_match_direct_summation() {
        let h = WeightSequence::harmonic_plus();
        for (lo, hi) in [(1, 1), (1, 4), (3, 17), (100, 5000), (1, 100_000)] {
            let direct = brute(&h, lo, hi);
            assert!((h.range_sum(lo, hi).unwrap() - direct).abs() < 1e-9 * direct.max(1.0));
        }
        assert_eq!(h.range_sum(5, 4).unwrap(), 0.0);
        let tab = WeightSequence::from_values("t", vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(tab.range_sum(2, 3).unwrap(), 5.0);
        assert!(tab.range_sum(2, 5).is_err());
    }

    #[test]
    fn validation_and_parsing() {
        let h = HorizonPolicy::new(100, 50).unwrap();
        assert!(parse_weights("recip5").unwrap().validate(&h).is_ok());
        assert_eq!(parse_weights("recip5").unwrap().weight(3).unwrap(), 0.2);
        assert!(parse_weights("harmonicplus").unwrap().validate(&h).is_ok());
        assert!(parse_weights("const:0").is_err());
        assert!(matches!(
            parse_weights("const:abc"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_weights("cesaro"), Err(Error::Parse { .. })));
        let mut t = vec![1.0; 100];
        t[60..].iter_mut().for_each(|v| *v = 0.0);
        let fading = WeightSequence::from_values("fading", t).unwrap();
        assert!(matches!(fading.validate(&h), Err(Error::Weights(_))));
        assert!(WeightSequence::from_values("z", vec![0.0, 1.0]).is_err());
    }
}
