//! Batch runs and the example reproduction table behind the `fuzzysum` binary.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use fuzzysum::summability::Trace;
use fuzzysum::{
    classify, parse_family, parse_scheme, parse_weights, tauberian_experiment, ConvergenceReport,
    Domain, FuzzyFunctionSequence, Membership, Mode, ModeParams, TauberianConfig, TauberianReport,
    Verdict, VerdictRule, XGrid,
};
use serde::Serialize;

pub const MIN_HORIZON: u64 = 64;

/// `2^20` for the square-indicator family, `2^12` otherwise.
pub fn default_horizon(family: &str) -> u64 {
    if family.trim().starts_with("ex3.1") {
        1 << 20
    } else {
        1 << 12
    }
}

/// A transform to classify or the Tauberian experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RunMode {
    Transform(Mode),
    Tauberian,
}

impl FromStr for RunMode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tauberian" => Ok(RunMode::Tauberian),
            other => Ok(RunMode::Transform(other.parse()?)),
        }
    }
}

/// `a,b,count`: `count` equally spaced points of `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            a: 1.0,
            b: 2.0,
            count: 5,
        }
    }
}

impl FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, count] = parts[..] else {
            bail!("grid `{s}`: expected a,b,count");
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .with_context(|| format!("grid `{s}`: `{t}` is not a number"))
        };
        Ok(GridSpec {
            a: num(a)?,
            b: num(b)?,
            count: count
                .parse()
                .with_context(|| format!("grid `{s}`: `{count}` is not a point count"))?,
        })
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<XGrid> {
        Ok(XGrid::uniform(Domain::new(self.a, self.b)?, self.count)?)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: String,
    pub scheme: String,
    pub weights: String,
    pub thetas: Vec<f64>,
    pub eps: f64,
    /// `None` picks [`default_horizon`].
    pub horizon: Option<u64>,
    pub grid: GridSpec,
    pub modes: Vec<RunMode>,
    pub out_dir: PathBuf,
    /// Overrides `<out_dir>/report.json`.
    pub json: Option<PathBuf>,
    /// Overrides `<out_dir>/traces.csv`.
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(family: impl Into<String>) -> Self {
        RunConfig {
            family: family.into(),
            scheme: "classical".into(),
            weights: "const:1".into(),
            thetas: vec![1.0],
            eps: 0.1,
            horizon: None,
            grid: GridSpec::default(),
            modes: vec![
                RunMode::Transform(Mode::Statistical),
                RunMode::Transform(Mode::Absolute),
                RunMode::Transform(Mode::Ordinary),
            ],
            out_dir: PathBuf::from("fuzzysum-out"),
            json: None,
            csv: None,
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
            .unwrap_or_else(|| default_horizon(&self.family))
    }

    pub fn json_path(&self) -> PathBuf {
        self.json
            .clone()
            .unwrap_or_else(|| self.out_dir.join("report.json"))
    }

    pub fn csv_path(&self) -> PathBuf {
        self.csv
            .clone()
            .unwrap_or_else(|| self.out_dir.join("traces.csv"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub family: String,
    pub scheme: String,
    pub weights: String,
    pub eps: f64,
    pub grid: Vec<f64>,
    pub horizon: u64,
    pub classifications: Vec<ConvergenceReport>,
    pub tauberian: Option<TauberianReport>,
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub x: f64,
    pub mode: String,
    /// Empty for the Tauberian subsequence trace.
    pub theta: Option<f64>,
    pub n: u64,
    pub value: f64,
}

fn cmp_rows(a: &TraceRow, b: &TraceRow) -> Ordering {
    a.x.total_cmp(&b.x)
        .then_with(|| a.mode.cmp(&b.mode))
        .then_with(|| match (a.theta, b.theta) {
            (Some(p), Some(q)) => p.total_cmp(&q),
            (p, q) => p.is_some().cmp(&q.is_some()),
        })
        .then_with(|| a.n.cmp(&b.n))
}

impl RunReport {
    /// Every trace point, sorted by `(x, mode, θ, n)`.
    pub fn rows(&self) -> Vec<TraceRow> {
        let mut rows: Vec<TraceRow> = self
            .classifications
            .iter()
            .flat_map(|r| {
                r.traces.iter().flat_map(move |t: &Trace| {
                    t.points.iter().map(move |p| TraceRow {
                        x: t.x,
                        mode: t.mode.to_string(),
                        theta: Some(r.theta),
                        n: p.n,
                        value: p.value,
                    })
                })
            })
            .collect();
        if let Some(tr) = &self.tauberian {
            for t in &tr.conclusion.traces {
                rows.extend(t.points.iter().map(|p| TraceRow {
                    x: t.x,
                    mode: "tauberian".into(),
                    theta: None,
                    n: p.n,
                    value: p.value,
                }));
            }
        }
        rows.sort_by(cmp_rows);
        rows
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "family {}  scheme {}  weights {}  eps {}  horizon {}\n",
            self.family, self.scheme, self.weights, self.eps, self.horizon
        );
        for r in &self.classifications {
            for m in &r.membership {
                out += &format!(
                    "θ={} {}: {}\n",
                    r.theta,
                    m.mode,
                    MembershipText(m.membership)
                );
                for c in r.verdicts.iter().filter(|c| c.mode == m.mode) {
                    out += &format!("    x={}: {}\n", c.x, VerdictText(c.verdict));
                }
            }
        }
        if let Some(t) = &self.tauberian {
            let h = &t.hypotheses;
            out += &format!(
                "tauberian: slowly decreasing {}, ratio growth {}, summable {}, subsequence converges {}\n",
                pass(h.slowly_decreasing_pass),
                pass(h.condition2_pass),
                pass(h.summable_pass),
                t.conclusion.converges
            );
            for s in h.slowly_decreasing.iter().filter(|s| !s.holds) {
                if let Some((n, k)) = s.counterexample {
                    out += &format!(
                        "    x={} ε={}: violation at (n, k) = ({n}, {k})\n",
                        s.x, s.eps
                    );
                }
            }
        }
        out
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

pub struct VerdictText(pub Verdict);

impl fmt::Display for VerdictText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Verdict::Converges(v) => write!(f, "converges({v:.4})"),
            Verdict::Diverges => f.write_str("diverges"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

pub struct MembershipText(pub Membership);

impl fmt::Display for MembershipText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            Membership::Member => "member",
            Membership::NotMember => "not a member",
            Membership::Inconclusive => "inconclusive",
        })
    }
}

/// Runs the configured classifications without touching the disk.
pub fn execute(config: &RunConfig) -> Result<RunReport> {
    let horizon = config.horizon();
    if horizon < MIN_HORIZON {
        bail!("horizon must be at least {MIN_HORIZON}, got {horizon}");
    }
    if config.thetas.is_empty() {
        bail!("at least one θ is required");
    }
    if config.modes.is_empty() {
        bail!("at least one mode is required");
    }
    let family = parse_family(&config.family)?;
    let scheme = parse_scheme(&config.scheme)?;
    let weights = parse_weights(&config.weights)?;
    let grid = config.grid.build()?;
    let transforms: Vec<Mode> = config
        .modes
        .iter()
        .filter_map(|m| match m {
            RunMode::Transform(t) => Some(*t),
            RunMode::Tauberian => None,
        })
        .collect();

    let rule = VerdictRule::default();
    let mut classifications = Vec::new();
    if !transforms.is_empty() {
        for &theta in &config.thetas {
            let params = ModeParams::new(theta, config.eps, scheme.clone(), weights.clone())?;
            classifications.push(classify(
                family.as_ref(),
                None,
                &params,
                &grid,
                horizon,
                &transforms,
                &rule,
            )?);
        }
    }
    let tauberian = if config.modes.contains(&RunMode::Tauberian) {
        let tc = TauberianConfig {
            eps_ladder: vec![config.eps, config.eps / 2.0, config.eps / 10.0],
            ..TauberianConfig::default()
        };
        Some(tauberian_experiment(
            family.as_ref(),
            None,
            &scheme,
            &weights,
            &grid,
            horizon,
            &tc,
        )?)
    } else {
        None
    };
    Ok(RunReport {
        family: family.label(),
        scheme: scheme.label().to_string(),
        weights: weights.label().to_string(),
        eps: config.eps,
        grid: grid.points().to_vec(),
        horizon,
        classifications,
        tauberian,
    })
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    Ok(())
}

pub fn write_csv(rows: &[TraceRow], path: &Path) -> Result<()> {
    create_parent(path)?;
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_json(report: &impl Serialize, path: &Path) -> Result<()> {
    create_parent(path)?;
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

/// Runs the configuration and writes the CSV traces and the JSON report.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let report = execute(config)?;
    write_csv(&report.rows(), &config.csv_path())?;
    write_json(&report, &config.json_path())?;
    Ok(report)
}

/// Expected class membership of one canned configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub family: String,
    pub scheme: String,
    pub weights: String,
    pub mode: Mode,
    pub theta: f64,
    pub expected: Membership,
    pub observed: Membership,
}

impl Claim {
    pub fn status(&self) -> Status {
        match (self.expected, self.observed) {
            (e, o) if e == o => Status::Agree,
            (_, Membership::Inconclusive) => Status::Inconclusive,
            _ => Status::Disagree,
        }
    }

    fn describe(&self) -> String {
        let class = match self.mode {
            Mode::Statistical => format!("SP^{}", self.theta),
            Mode::Absolute => format!("N^{}", self.theta),
            Mode::Ordinary => "N̄".to_string(),
        };
        format!("{} {} {class}", self.family, self.scheme)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Agree,
    Inconclusive,
    Disagree,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleRow {
    pub id: String,
    pub horizon: u64,
    pub claims: Vec<Claim>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproduceSummary {
    pub rows: Vec<ExampleRow>,
}

impl ReproduceSummary {
    pub fn agreements(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Agree)
            .count()
    }

    pub fn disagreements(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Disagree)
            .count()
    }

    pub fn inconclusive(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Inconclusive)
            .count()
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<8} {:<10} {:<40} {:<14} {:<14} status\n",
            "example", "horizon", "claim", "expected", "observed"
        );
        for row in &self.rows {
            for c in &row.claims {
                out += &format!(
                    "{:<8} {:<10} {:<40} {:<14} {:<14} {}\n",
                    row.id,
                    row.horizon,
                    c.describe(),
                    MembershipText(c.expected).to_string(),
                    MembershipText(c.observed).to_string(),
                    status_text(c.status())
                );
            }
        }
        out += &format!(
            "{}/{} agreements, {} inconclusive, {} disagreements\n",
            self.agreements(),
            self.rows.len(),
            self.inconclusive(),
            self.disagreements()
        );
        out
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Agree => "agree",
        Status::Inconclusive => "WARN inconclusive",
        Status::Disagree => "FAIL disagree",
    }
}

struct Canned {
    family: &'static str,
    scheme: &'static str,
    weights: &'static str,
    mode: Mode,
    theta: f64,
    expected: Membership,
}

const EXAMPLE_IDS: [&str; 5] = ["ex3.1", "ex3.2", "ex3.3", "ex4.1", "remark3"];

fn canned(id: &str) -> (u64, Vec<Canned>) {
    use Membership::{Member, NotMember};
    use Mode::{Absolute, Ordinary, Statistical};
    let c = |family, scheme, weights, mode, theta, expected| Canned {
        family,
        scheme,
        weights,
        mode,
        theta,
        expected,
    };
    match id {
        "ex3.1" => (
            1 << 20,
            vec![
                c("ex3.1:M=1", "classical", "const:1", Absolute, 0.75, Member),
                c(
                    "ex3.1:M=1",
                    "classical",
                    "const:1",
                    Absolute,
                    0.25,
                    NotMember,
                ),
            ],
        ),
        "ex3.2" => (
            1 << 12,
            vec![
                c("ex3.2", "pow:2", "recip5", Statistical, 1.0, Member),
                c("ex3.2", "pow:2", "recip5", Absolute, 0.25, NotMember),
            ],
        ),
        "ex3.3" => (
            1 << 12,
            vec![
                c("ex3.3", "pow:2", "harmonicplus", Absolute, 1.0, Member),
                c(
                    "ex3.3",
                    "pow:2",
                    "harmonicplus",
                    Statistical,
                    0.2,
                    NotMember,
                ),
            ],
        ),
        "ex4.1" => (
            1 << 12,
            vec![
                c("ex4.1", "classical", "const:1", Ordinary, 1.0, Member),
                c("ex4.1", "classical", "const:1", Absolute, 1.0, NotMember),
            ],
        ),
        "remark3" => (
            1 << 32,
            vec![
                c(
                    "remark3:n=4,M=1",
                    "classical",
                    "const:1",
                    Absolute,
                    0.25,
                    Member,
                ),
                c(
                    "remark3:n=16,M=1",
                    "classical",
                    "const:1",
                    Absolute,
                    0.25,
                    Member,
                ),
                c(
                    "remark3:n=64,M=1",
                    "classical",
                    "const:1",
                    Absolute,
                    0.25,
                    Member,
                ),
                c(
                    "ex3.1:M=1",
                    "classical",
                    "const:1",
                    Absolute,
                    0.25,
                    NotMember,
                ),
            ],
        ),
        _ => unreachable!("unknown example id"),
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReproduceConfig {
    /// Overrides every row's default horizon.
    pub horizon: Option<u64>,
    /// Example ids to keep; empty keeps all.
    pub only: Vec<String>,
}

fn observe(c: &Canned, horizon: u64, grid: &XGrid) -> Result<Membership> {
    let family: std::sync::Arc<dyn FuzzyFunctionSequence> = parse_family(c.family)?;
    let params = ModeParams::new(
        c.theta,
        0.1,
        parse_scheme(c.scheme)?,
        parse_weights(c.weights)?,
    )?;
    let report = classify(
        family.as_ref(),
        None,
        &params,
        grid,
        horizon,
        &[c.mode],
        &VerdictRule::default(),
    )?;
    Ok(report
        .membership(c.mode)
        .unwrap_or(Membership::Inconclusive))
}

/// Runs the canned example configurations and compares each observed class
/// membership with the stated one.
pub fn reproduce_examples(config: &ReproduceConfig) -> Result<ReproduceSummary> {
    for id in &config.only {
        if !EXAMPLE_IDS.contains(&id.as_str()) {
            bail!(
                "unknown example `{id}` (expected one of {})",
                EXAMPLE_IDS.join(", ")
            );
        }
    }
    if let Some(h) = config.horizon.filter(|&h| h < MIN_HORIZON) {
        bail!("horizon must be at least {MIN_HORIZON}, got {h}");
    }
    let grid = GridSpec::default().build()?;
    let mut rows = Vec::new();
    for id in EXAMPLE_IDS {
        if !config.only.is_empty() && !config.only.iter().any(|o| o == id) {
            continue;
        }
        let (default, canned) = canned(id);
        let horizon = config.horizon.unwrap_or(default);
        let claims = canned
            .iter()
            .map(|c| {
                Ok(Claim {
                    family: c.family.into(),
                    scheme: c.scheme.into(),
                    weights: c.weights.into(),
                    mode: c.mode,
                    theta: c.theta,
                    expected: c.expected,
                    observed: observe(c, horizon, &grid)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let status = claims
            .iter()
            .map(Claim::status)
            .max()
            .unwrap_or(Status::Agree);
        rows.push(ExampleRow {
            id: id.into(),
            horizon,
            claims,
            status,
        });
    }
    Ok(ReproduceSummary { rows })
}
