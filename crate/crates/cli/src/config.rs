//! Run configuration: flags over the TOML file over built-in defaults.

use std::path::{Path, PathBuf};

use kakeya_core::verify::Lane;
use kakeya_core::{RingContext, ScaleSemantics};
use serde::Deserialize;

use crate::args::{FormatArg, LaneArg, ModeArg, RingArgs, RunArgs, SemanticsArg};
use crate::error::CliError;

/// Keys accepted in a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<ModeArg>,
    pub p: Option<u64>,
    pub l: Option<u32>,
    pub modulus: Option<u64>,
    pub n: Option<usize>,
    pub semantics: Option<SemanticsArg>,
    pub lane: Option<LaneArg>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub format: Option<FormatArg>,
    pub output: Option<PathBuf>,
    pub timings: Option<bool>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub struct RunConfig {
    pub ctx: RingContext,
    /// Whether the band semantics was chosen explicitly.
    pub semantics_set: bool,
    pub lane: Lane,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub format: Option<FormatArg>,
    pub output: Option<PathBuf>,
    pub timings: bool,
    pub jobs: Option<usize>,
}

pub const DEFAULT_P: u64 = 2;
pub const DEFAULT_LEVEL: u32 = 2;
pub const DEFAULT_DIM: usize = 3;

impl RunConfig {
    pub fn resolve(ring: &RingArgs, run: &RunArgs) -> Result<Self, CliError> {
        let file = match &run.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let p = ring.p.or(file.p);
        let l = ring.l.or(file.l);
        let modulus = ring.modulus.or(file.modulus);
        let n = ring.n.or(file.n).unwrap_or(DEFAULT_DIM);
        // a bare --modulus means a plain ring; everything else defaults to padic
        let mode = ring.mode.or(file.mode).unwrap_or(match (modulus, p, l) {
            (Some(_), None, None) => ModeArg::Plain,
            _ => ModeArg::Padic,
        });
        let ctx = match mode {
            ModeArg::Padic => {
                reject(modulus.is_some(), "--modulus applies to plain rings only")?;
                RingContext::padic(p.unwrap_or(DEFAULT_P), l.unwrap_or(DEFAULT_LEVEL), n)
            }
            ModeArg::Profinite => {
                reject(p.is_some(), "--prime applies to padic rings only")?;
                reject(modulus.is_some(), "--modulus applies to plain rings only")?;
                RingContext::profinite(l.unwrap_or(DEFAULT_LEVEL), n)
            }
            ModeArg::Plain => {
                reject(p.is_some() || l.is_some(), "plain rings take --modulus, not --prime or --level")?;
                let m = modulus.ok_or_else(|| CliError::usage("plain mode needs --modulus"))?;
                RingContext::plain(m, n)
            }
        }
        .map_err(CliError::from)?;
        let semantics = ring.semantics.or(file.semantics);
        let ctx = match semantics {
            Some(SemanticsArg::Numeric) => ctx.with_semantics(ScaleSemantics::Numeric),
            Some(SemanticsArg::Divisibility) => ctx.with_semantics(ScaleSemantics::Divisibility),
            None => ctx,
        };
        let lane = match run.lane.or(file.lane).unwrap_or(LaneArg::Exact) {
            LaneArg::Exact => Lane::Exact,
            LaneArg::Float => Lane::Float,
        };
        Ok(Self {
            ctx,
            semantics_set: semantics.is_some(),
            lane,
            seed: run.seed.or(file.seed),
            trials: run.trials.or(file.trials),
            format: run.format.or(file.format),
            output: run.output.clone().or(file.output),
            timings: run.timings || file.timings.unwrap_or(false),
            jobs: run.jobs.or(file.jobs),
        })
    }

    pub fn format_or(&self, default: FormatArg, allowed: &[FormatArg]) -> Result<FormatArg, CliError> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::usage(format!("format {f:?} is not available here (use one of {allowed:?})").to_lowercase()))
        }
    }
}

fn reject(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Err(CliError::usage(msg))
    } else {
        Ok(())
    }
}

/// CI mode is on when `CI` is set to anything but empty, `0` or `false`.
pub fn ci_mode() -> bool {
    std::env::var("CI").is_ok_and(|v| !matches!(v.trim(), "" | "0" | "false"))
}
