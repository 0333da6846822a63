//! Executable checks of the transform identities and maximal bounds over seeded
//! and adversarial densities, with JSON and text reports.

mod bounds;
mod random;
mod reduction;
mod spectral;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::ring::RingContext;
use crate::scalar::Scalar;

pub use bounds::{
    kakeya_indicators, verify_besicovitch, verify_besicovitch_sets, verify_main_theorem, verify_maxest, verify_maxest_with,
    verify_maxn, verify_rounding,
};
pub use random::{
    corpus_density, random_density, random_flat, random_integer_density, trial_seed, Distribution,
};
pub use reduction::{verify_divisor_reduction, verify_projmax};
pub use spectral::{verify_freqbound, verify_plancherel, verify_radius_n, verify_xray_l2};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lane {
    Exact,
    Float,
}

impl FromStr for Lane {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Lane::Exact),
            "float" => Ok(Lane::Float),
            _ => Err(format!("unknown lane `{s}` (expected exact or float)")),
        }
    }
}

/// `Equal`: slack is `|LHS - RHS|`. `AtLeast`: slack is `bigger - smaller` and must be nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Equal,
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    RadiusN,
    Plancherel,
    XrayL2,
    FreqBound,
    ProjMax,
    DivisorReduction,
    MaxEst,
    MaxN,
    Rounding,
    MainTheorem,
    Besicovitch,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        CheckId::RadiusN,
        CheckId::Plancherel,
        CheckId::XrayL2,
        CheckId::FreqBound,
        CheckId::ProjMax,
        CheckId::DivisorReduction,
        CheckId::MaxEst,
        CheckId::MaxN,
        CheckId::Rounding,
        CheckId::MainTheorem,
        CheckId::Besicovitch,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::RadiusN => "radiusN",
            CheckId::Plancherel => "plancherel",
            CheckId::XrayL2 => "xray-l2",
            CheckId::FreqBound => "freqbound",
            CheckId::ProjMax => "projmax",
            CheckId::DivisorReduction => "divisor-reduction",
            CheckId::MaxEst => "maxest",
            CheckId::MaxN => "maxn",
            CheckId::Rounding => "rounding",
            CheckId::MainTheorem => "main-theorem",
            CheckId::Besicovitch => "besicovitch",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub lane: Lane,
    /// Record wall time in reports (makes them non-reproducible).
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 100,
            lane: Lane::Exact,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub ring: String,
    pub lane: Lane,
    pub comparator: Comparator,
    pub tolerance: f64,
    pub trials: usize,
    pub worst_slack: String,
    pub pass: bool,
    pub witness: Value,
    pub details: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl VerificationReport {
    /// A check that does not apply to this ring; it passes vacuously.
    pub(crate) fn skipped(id: CheckId, ctx: &RingContext, lane: Lane, reason: &str) -> Self {
        let mut details = BTreeMap::new();
        details.insert("skipped".to_string(), Value::String(reason.to_string()));
        Self {
            check: id.to_string(),
            ring: ctx.summary(),
            lane,
            comparator: Comparator::Equal,
            tolerance: 0.0,
            trials: 0,
            worst_slack: "0".into(),
            pass: true,
            witness: Value::Null,
            details,
            wall_time_ms: None,
        }
    }

    pub fn detail(mut self, key: &str, value: Value) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn is_skipped(&self) -> bool {
        self.details.contains_key("skipped")
    }
}

/// One trial's slack and a description of its input.
pub struct Outcome<S> {
    pub slack: S,
    pub witness: Value,
}

impl<S> Outcome<S> {
    pub fn new(slack: S, witness: Value) -> Self {
        Self { slack, witness }
    }
}

/// Tolerance for a comparator in a lane: zero for exact, `1e-9` for float equalities
/// and `1e-12` for float inequalities.
pub fn tolerance(lane: Lane, cmp: Comparator) -> f64 {
    match (lane, cmp) {
        (Lane::Exact, _) => 0.0,
        (Lane::Float, Comparator::Equal) => 1e-9,
        (Lane::Float, Comparator::AtLeast) => 1e-12,
    }
}

fn passes<S: Scalar>(slack: &S, cmp: Comparator, tol: f64) -> bool {
    match cmp {
        Comparator::Equal if tol == 0.0 => slack.is_zero(),
        Comparator::Equal => slack.to_f64().abs() <= tol,
        Comparator::AtLeast if tol == 0.0 => !slack.is_negative(),
        Comparator::AtLeast => slack.to_f64() >= -tol,
    }
}

/// Folds trial outcomes in order; the first worst trial wins ties.
pub(crate) fn aggregate<S: Scalar>(
    id: CheckId,
    ctx: &RingContext,
    lane: Lane,
    cmp: Comparator,
    tol: f64,
    outcomes: Vec<Outcome<S>>,
) -> VerificationReport {
    let trials = outcomes.len();
    let mut worst: Option<Outcome<S>> = None;
    for o in outcomes {
        let replace = match (&worst, cmp) {
            (None, _) => true,
            (Some(w), Comparator::Equal) => o.slack.abs() > w.slack.abs(),
            (Some(w), Comparator::AtLeast) => o.slack < w.slack,
        };
        if replace {
            worst = Some(o);
        }
    }
    let (slack, witness, pass) = match worst {
        Some(w) => (w.slack.render(), w.witness, passes(&w.slack, cmp, tol)),
        None => ("0".to_string(), Value::Null, true),
    };
    VerificationReport {
        check: id.to_string(),
        ring: ctx.summary(),
        lane,
        comparator: cmp,
        tolerance: tol,
        trials,
        worst_slack: slack,
        pass,
        witness,
        details: BTreeMap::new(),
        wall_time_ms: None,
    }
}

pub(crate) fn corpus_witness(seed: u64, t: usize) -> Value {
    json!({
        "trial": t,
        "seed": trial_seed(seed, t),
        "distribution": Distribution::for_trial(t).as_str(),
    })
}

pub fn run_check(id: CheckId, ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = match id {
        CheckId::RadiusN => verify_radius_n(ctx)?,
        CheckId::Plancherel => verify_plancherel(ctx, cfg)?,
        CheckId::XrayL2 => verify_xray_l2(ctx, cfg)?,
        CheckId::FreqBound => {
            let n = ctx.dim() as u32;
            let mut exps = vec![2, 3, n - 1];
            exps.retain(|&p| p >= 2);
            exps.sort_unstable();
            exps.dedup();
            verify_freqbound(ctx, &exps, cfg)?
        }
        CheckId::ProjMax => verify_projmax(ctx, cfg)?,
        CheckId::DivisorReduction => verify_divisor_reduction(ctx, cfg)?,
        CheckId::MaxEst => verify_maxest(ctx, cfg)?,
        CheckId::MaxN => verify_maxn(ctx, cfg)?,
        CheckId::Rounding => verify_rounding(ctx, cfg)?,
        CheckId::MainTheorem => verify_main_theorem(ctx, cfg)?,
        CheckId::Besicovitch => verify_besicovitch(ctx, cfg)?,
    };
    if cfg.timings {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub ring: String,
    pub config: VerifyConfig,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
}

pub fn run_suite(ctx: &RingContext, cfg: &VerifyConfig, checks: &[CheckId]) -> Result<SuiteReport> {
    let reports = crate::parallel::map_slice(checks, |&id| run_check(id, ctx, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        schema: REPORT_SCHEMA,
        ring: ctx.summary(),
        config: cfg.clone(),
        pass: reports.iter().all(|r| r.pass),
        reports,
    })
}

impl SuiteReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text table, one row per check.
    pub fn to_table(&self) -> String {
        let header = ["check", "trials", "cmp", "worst slack", "result"];
        let rows: Vec<[String; 5]> = self
            .reports
            .iter()
            .map(|r| {
                let result = if r.is_skipped() {
                    "skip"
                } else if r.pass {
                    "pass"
                } else {
                    "FAIL"
                };
                let cmp = match r.comparator {
                    Comparator::Equal => "=",
                    Comparator::AtLeast => ">=",
                };
                [r.check.clone(), r.trials.to_string(), cmp.to_string(), r.worst_slack.clone(), result.to_string()]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = format!("{}\n", self.ring);
        out.push_str(&line(&header.map(String::from)));
        out.push('\n');
        for row in &rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out.push_str(if self.pass { "all checks passed\n" } else { "some checks FAILED\n" });
        out
    }
}
