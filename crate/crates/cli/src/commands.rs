use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use kakeya_core::geometry::{ProjDirection, QuotientChart};
use kakeya_core::harmonic::io::{
    density_from_json, density_to_json, exact_spectrum_from_json, exact_spectrum_to_json, read_density_csv,
    spectrum_from_json, spectrum_to_json, write_density_csv,
};
use kakeya_core::harmonic::{band_project, fourier_exact, fourier_float, xray_transform};
use kakeya_core::maximal::{ConstantLedger, MaximalPlan};
use kakeya_core::parallel::configure_workers;
use kakeya_core::search::{exact_min_kakeya, greedy_kakeya, prime_line_lower_bound, KakeyaCertificate};
use kakeya_core::verify::{run_suite, verify_besicovitch_sets, CheckId, Lane, VerifyConfig};
use kakeya_core::{Density, Mode, RingContext, Scalar, ScaleSemantics, Q};
use serde_json::{json, Value};

use crate::args::{ConstantsArgs, FormatArg, SearchArgs, Strategy, TransformArgs, TransformOp, VerifyArgs};
use crate::config::{ci_mode, RunConfig};
use crate::error::{CliError, EXIT_FAIL, EXIT_PASS, EXIT_RESOURCE};

/// Writes `text` to the output path, or stdout.
fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

pub fn parse_checks(names: &[String]) -> Result<Vec<CheckId>, CliError> {
    let mut out: Vec<CheckId> = Vec::new();
    for name in names {
        let ids = if name == "all" {
            CheckId::ALL.to_vec()
        } else {
            vec![CheckId::from_str(name).map_err(|e| {
                let known: Vec<&str> = CheckId::ALL.iter().map(CheckId::as_str).collect();
                CliError::usage(format!("{e}; known checks: {}, all", known.join(", ")))
            })?]
        };
        for id in ids {
            if !out.contains(&id) {
                out.push(id);
            }
        }
    }
    Ok(out)
}

pub fn verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let checks = parse_checks(&args.checks)?;
    let cfg = RunConfig::resolve(&args.ring, &args.run)?;
    if cfg.seed.is_none() && ci_mode() {
        return Err(CliError::usage("--seed is required when CI is set"));
    }
    let format = cfg.format_or(FormatArg::Json, &[FormatArg::Json, FormatArg::Text])?;
    configure_workers(cfg.jobs);
    let vcfg = VerifyConfig {
        seed: cfg.seed.unwrap_or(0),
        trials: cfg.trials.unwrap_or(VerifyConfig::default().trials),
        lane: cfg.lane,
        timings: cfg.timings,
    };
    let suite = run_suite(&cfg.ctx, &vcfg, &checks)?;
    let text = match format {
        FormatArg::Text => suite.to_table(),
        _ => suite.to_json_string(),
    };
    emit(cfg.output.as_deref(), &with_newline(text))?;
    Ok(if suite.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn semantics_name(s: ScaleSemantics) -> &'static str {
    match s {
        ScaleSemantics::Numeric => "numeric",
        ScaleSemantics::Divisibility => "divisibility",
    }
}

pub fn constants(args: &ConstantsArgs) -> Result<u8, CliError> {
    let cfg = RunConfig::resolve(&args.ring, &args.run)?;
    let ctx = &cfg.ctx;
    let depth = match args.depth {
        Some(0) => return Err(CliError::usage("--depth must be at least 1")),
        Some(d) => d,
        None => ctx.num_bands().unwrap_or(1),
    };
    let semantics = if matches!(ctx.mode(), Mode::Profinite { .. }) && !cfg.semantics_set {
        vec![ScaleSemantics::Divisibility, ScaleSemantics::Numeric]
    } else {
        vec![ctx.semantics()]
    };
    let ledgers = semantics
        .iter()
        .map(|&s| ConstantLedger::new(&ctx.clone().with_semantics(s), depth))
        .collect::<kakeya_core::Result<Vec<_>>>()?;
    let text = match cfg.format_or(FormatArg::Csv, &[FormatArg::Csv, FormatArg::Json, FormatArg::Text])? {
        FormatArg::Json => {
            let v = json!({"schema": 1, "ring": ctx.summary(), "depth": depth, "ledgers": ledgers});
            serde_json::to_string_pretty(&v).expect("ledger serializes")
        }
        FormatArg::Csv => constants_rows(&ledgers)
            .iter()
            .map(|r| r.join(","))
            .collect::<Vec<_>>()
            .join("\n"),
        FormatArg::Text => {
            let head = &ledgers[0];
            let mut out = format!(
                "{}\nmaxN constant (weight {}): {:e}\nappendix D: {:e}\nappendix constant: {:e}\n\n",
                ctx.summary(),
                head.maxn_weight,
                head.maxn_constant,
                head.appendix_d,
                head.appendix_constant
            );
            out.push_str(&aligned(&constants_rows(&ledgers)));
            out
        }
    };
    emit(cfg.output.as_deref(), &with_newline(text))?;
    Ok(EXIT_PASS)
}

/// One row per band, the chain columns of each semantics side by side.
fn constants_rows(ledgers: &[ConstantLedger]) -> Vec<Vec<String>> {
    let mut header: Vec<String> = ["band", "scale", "next_scale", "appendix_constant"].map(String::from).to_vec();
    for l in ledgers {
        let s = semantics_name(l.semantics);
        for col in ["ratio", "term", "partial_sum", "chain_constant"] {
            header.push(format!("{s}_{col}"));
        }
    }
    let mut rows = vec![header];
    let Some(first) = ledgers[0].chain.as_ref() else {
        return rows;
    };
    let e = (ledgers[0].dim - 1) as i32;
    for (i, t) in first.terms.iter().enumerate() {
        let mut row = vec![
            t.band.to_string(),
            t.scale.to_string(),
            t.next_scale.to_string(),
            format!("{:e}", t.appendix_constant),
        ];
        for l in ledgers {
            let t = &l.chain.as_ref().expect("same dimension").terms[i];
            row.push(t.ratio.clone());
            row.push(format!("{:e}", t.term));
            row.push(format!("{:e}", t.partial_sum));
            row.push(format!("{:e}", t.partial_sum.powi(-e)));
        }
        rows.push(row);
    }
    rows
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(&widths)
                .map(|(s, &w)| format!("{s:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn search(args: &SearchArgs) -> Result<u8, CliError> {
    let cfg = RunConfig::resolve(&args.ring, &args.run)?;
    let ctx = &cfg.ctx;
    if args.k == 0 || args.k > ctx.dim() {
        return Err(CliError::usage(format!("k = {} must satisfy 1 <= k <= n = {}", args.k, ctx.dim())));
    }
    cfg.format_or(FormatArg::Json, &[FormatArg::Json])?;
    configure_workers(cfg.jobs);
    let cert = match args.strategy {
        Strategy::Greedy => greedy_kakeya(ctx, args.k)?,
        Strategy::Exact => exact_min_kakeya(ctx, args.k, args.budget)?,
    };
    let summary = search_summary(ctx, &cert)?;
    let body = with_newline(serde_json::to_string_pretty(&cert.to_json()).expect("certificate serializes"));
    match cfg.output.as_deref() {
        Some(path) => {
            emit(Some(path), &body)?;
            emit(None, &summary)?;
        }
        None => {
            emit(None, &body)?;
            eprint!("{summary}");
        }
    }
    if cert.optimal == Some(false) {
        eprintln!("search budget of {} nodes exhausted; the certificate is the best set found", args.budget);
        return Ok(EXIT_RESOURCE);
    }
    Ok(EXIT_PASS)
}

fn search_summary(ctx: &RingContext, cert: &KakeyaCertificate) -> Result<String, CliError> {
    let optimal = match cert.optimal {
        Some(true) => "minimum",
        Some(false) => "not proven minimal",
        None => "greedy",
    };
    let mut out = format!(
        "{}\nk = {}: size {} measure {} ({optimal})\n",
        ctx.summary(),
        cert.k,
        cert.size,
        cert.measure
    );
    if cert.k == 1 {
        if let Some(b) = prime_line_lower_bound(ctx.modulus(), ctx.dim()) {
            let ok = Q::from_integer(cert.size as i128) >= b;
            out.push_str(&format!(
                "prime line bound N^n/2^(n-1) = {}: {}\n",
                b.render(),
                if ok { "holds" } else { "VIOLATED" }
            ));
        }
    }
    if cert.k == 2 {
        let report = verify_besicovitch_sets(ctx, &[("certificate".to_string(), cert.indicator(ctx))])?;
        if !report.is_skipped() {
            let row = &report.witness;
            out.push_str(&format!(
                "2-flat bound: measure {} >= C delta^(2(n-1)) = {} (delta^2 = {}): {}\n",
                row["measure"].as_str().unwrap_or("?"),
                row["bound"],
                row["delta_sq"].as_str().unwrap_or("?"),
                if report.pass { "holds" } else { "VIOLATED" }
            ));
        }
    }
    Ok(out)
}

enum Input {
    Csv(String),
    Json(Value),
}

fn read_input(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let json_like = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    if json_like {
        serde_json::from_str(&text)
            .map(Input::Json)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    } else {
        Ok(Input::Csv(text))
    }
}

fn load_density<S: Scalar>(ctx: &RingContext, input: &Input) -> Result<Density<S>, CliError> {
    Ok(match input {
        Input::Csv(text) => read_density_csv(ctx, text.as_bytes())?,
        Input::Json(v) => density_from_json(ctx, v)?,
    })
}

fn render_density<S: Scalar>(f: &Density<S>, format: FormatArg) -> Result<String, CliError> {
    match format {
        FormatArg::Json => Ok(serde_json::to_string_pretty(&density_to_json(f)).expect("density serializes")),
        _ => {
            let mut buf = Vec::new();
            write_density_csv(f, &mut buf)?;
            Ok(String::from_utf8(buf).expect("csv is utf-8"))
        }
    }
}

pub fn transform(args: &TransformArgs) -> Result<u8, CliError> {
    let cfg = RunConfig::resolve(&args.ring, &args.run)?;
    configure_workers(cfg.jobs);
    let input = read_input(&args.input)?;
    let text = match cfg.lane {
        Lane::Exact => transform_lane::<Q>(&cfg, &args.op, &input)?,
        Lane::Float => transform_lane::<f64>(&cfg, &args.op, &input)?,
    };
    emit(cfg.output.as_deref(), &with_newline(text))?;
    Ok(EXIT_PASS)
}

fn transform_lane<S: Scalar>(cfg: &RunConfig, op: &TransformOp, input: &Input) -> Result<String, CliError> {
    let ctx = &cfg.ctx;
    let density_format = || cfg.format_or(FormatArg::Csv, &[FormatArg::Csv, FormatArg::Json]);
    match op {
        TransformOp::Fourier => {
            cfg.format_or(FormatArg::Json, &[FormatArg::Json])?;
            let v = if S::EXACT {
                exact_spectrum_to_json(&fourier_exact(&load_density::<Q>(ctx, input)?))
            } else {
                spectrum_to_json(&fourier_float(&load_density::<f64>(ctx, input)?))
            };
            Ok(serde_json::to_string_pretty(&v).expect("spectrum serializes"))
        }
        TransformOp::Inverse => {
            let Input::Json(v) = input else {
                return Err(CliError::usage("inverse expects a spectrum JSON written by `fourier`"));
            };
            // the spectrum's own lane decides the output lane
            if v["lane"].as_str() == Some("exact") {
                render_density(&exact_spectrum_from_json(ctx, v)?.inverse()?, density_format()?)
            } else {
                render_density(&spectrum_from_json(ctx, v)?.inverse_real(), density_format()?)
            }
        }
        TransformOp::Xray { direction } => {
            if direction.len() != ctx.dim() {
                return Err(CliError::usage(format!(
                    "--direction has {} coordinates, expected {}",
                    direction.len(),
                    ctx.dim()
                )));
            }
            let reduced: Vec<u64> = direction.iter().map(|&c| c % ctx.modulus()).collect();
            let u = ProjDirection::new(ctx, reduced)?;
            let f = load_density::<S>(ctx, input)?;
            render_density(&xray_transform(&f, &QuotientChart::new(ctx, &u)), density_format()?)
        }
        TransformOp::Band { index } => {
            let f = load_density::<S>(ctx, input)?;
            render_density(&band_project(&f, *index)?, density_format()?)
        }
        TransformOp::Maximal { k } => {
            if *k == 0 || *k > ctx.dim() {
                return Err(CliError::usage(format!("k = {k} must satisfy 1 <= k <= n = {}", ctx.dim())));
            }
            let f = load_density::<S>(ctx, input)?;
            let plan = MaximalPlan::new(ctx, *k)?;
            let profile = plan.evaluate(&f);
            match cfg.format_or(FormatArg::Json, &[FormatArg::Json, FormatArg::Csv])? {
                FormatArg::Csv => Ok(profile.to_csv()),
                _ => Ok(serde_json::to_string_pretty(&profile.to_json(plan.flats())).expect("profile serializes")),
            }
        }
    }
}
