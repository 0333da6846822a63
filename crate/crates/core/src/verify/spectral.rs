use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::{aggregate, corpus_density, corpus_witness, tolerance, CheckId, Comparator, Lane, Outcome, VerificationReport, VerifyConfig};
use crate::density::Density;
use crate::error::Result;
use crate::geometry::{enumerate_proj, proj_ratio};
use crate::harmonic::{band_constant, band_decomposition, charts, fourier_exact, fourier_float, weighted_energy, xray_power_average, xray_transform};
use crate::parallel::map_range;
use crate::ring::RingContext;
use crate::scalar::{render_q, Scalar, Q};

/// Orthogonal-direction fraction of every dual frequency against the projective ratio.
pub fn verify_radius_n(ctx: &RingContext) -> Result<VerificationReport> {
    let dirs = enumerate_proj(ctx)?;
    let n = ctx.dim();
    let outcomes = map_range(ctx.num_points(), |i| {
        let a = ctx.coords(i);
        let hits = dirs.iter().filter(|u| ctx.dot(u.rep(), &a) == 0).count();
        let frac = Q::new(hits as i128, dirs.len() as i128);
        let v = ctx.valuation(&a);
        let want = proj_ratio(v, n);
        Outcome::new(
            (frac - want).abs(),
            json!({"a": a, "valuation": v, "fraction": render_q(&frac), "ratio": render_q(&want)}),
        )
    });
    Ok(aggregate(CheckId::RadiusN, ctx, Lane::Exact, Comparator::Equal, 0.0, outcomes)
        .detail("directions", json!(dirs.len())))
}

/// Plancherel and the Fourier round trip on the seeded corpus.
pub fn verify_plancherel(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let id = CheckId::Plancherel;
    match cfg.lane {
        Lane::Exact => {
            let outcomes = collect(map_range(cfg.trials, |t| {
                let f = corpus_density(ctx, cfg.seed, t);
                let s = fourier_exact(&f);
                let energy = (s.plancherel_sum()? - f.power_integral(2)).abs();
                let round = s.inverse()?.max_abs_diff(&f);
                Ok(Outcome::new(energy + round, corpus_witness(cfg.seed, t)))
            }))?;
            Ok(aggregate(id, ctx, Lane::Exact, Comparator::Equal, 0.0, outcomes))
        }
        Lane::Float => {
            let outcomes = map_range(cfg.trials, |t| {
                let f = corpus_density(ctx, cfg.seed, t).to_f64();
                let s = fourier_float(&f);
                let energy = (s.plancherel_sum() - f.power_integral(2)).abs();
                let round = s.inverse_real().max_abs_diff(&f);
                Outcome::new(energy.max(round), corpus_witness(cfg.seed, t))
            });
            Ok(aggregate(id, ctx, Lane::Float, Comparator::Equal, 1e-10, outcomes))
        }
    }
}

fn collect<S>(results: Vec<Result<Outcome<S>>>) -> Result<Vec<Outcome<S>>> {
    results.into_iter().collect()
}

/// `avg_u ∫|f_u|^2 = Σ_a ratio(v(a)) |f̂(a)|^2`, plus the per-direction identity
/// `Σ_{a ∈ u^⊥} |f̂(a)|^2 = ∫|f_u|^2`. Slack adds both discrepancies.
pub fn verify_xray_l2(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let id = CheckId::XrayL2;
    let n = ctx.dim();
    let dirs = enumerate_proj(ctx)?;
    let charts = charts(ctx, &dirs);
    let count = dirs.len() as u64;
    match cfg.lane {
        Lane::Exact => {
            let outcomes = collect(map_range(cfg.trials, |t| {
                let f = corpus_density(ctx, cfg.seed, t);
                let s = fourier_exact(&f);
                let mut claim = Q::zero();
                let mut total = Q::zero();
                for (u, chart) in dirs.iter().zip(&charts) {
                    let l2 = xray_transform(&f, chart).power_integral(2);
                    claim = claim.max((s.uperp_sum(u.rep())? - l2).abs());
                    total += l2;
                }
                let lhs = total / Q::from_u64(count);
                let rhs = weighted_energy(&s.energies_by_valuation()?, n);
                let mut w = corpus_witness(cfg.seed, t);
                w["lhs"] = Value::String(render_q(&lhs));
                Ok(Outcome::new((lhs - rhs).abs() + claim, w))
            }))?;
            Ok(aggregate(id, ctx, Lane::Exact, Comparator::Equal, 0.0, outcomes))
        }
        Lane::Float => {
            let outcomes = map_range(cfg.trials, |t| {
                let f = corpus_density(ctx, cfg.seed, t).to_f64();
                let s = fourier_float(&f);
                let mut claim = 0.0f64;
                let mut total = 0.0;
                for (u, chart) in dirs.iter().zip(&charts) {
                    let l2 = xray_transform(&f, chart).power_integral(2);
                    claim = claim.max((s.uperp_sum(u.rep()) - l2).abs());
                    total += l2;
                }
                let lhs = total / count as f64;
                let rhs: f64 = s
                    .energies_by_valuation()
                    .iter()
                    .map(|(d, e)| proj_ratio(*d, n).to_f64() * e)
                    .sum();
                Outcome::new((lhs - rhs).abs().max(claim), corpus_witness(cfg.seed, t))
            });
            Ok(aggregate(id, ctx, Lane::Float, Comparator::Equal, tolerance(Lane::Float, Comparator::Equal), outcomes))
        }
    }
}

/// For every band `i` and exponent `p`:
/// `avg_u ∫|f_{i,u}|^p <= band_constant(i, n) ∫|f|^p`.
///
/// Details carry, per exponent, the worst slack and the largest observed
/// `LHS / RHS` per band.
pub fn verify_freqbound(ctx: &RingContext, exponents: &[u32], cfg: &VerifyConfig) -> Result<VerificationReport> {
    if ctx.num_bands().is_err() {
        return Ok(VerificationReport::skipped(CheckId::FreqBound, ctx, cfg.lane, "ring has no scale sequence"));
    }
    match cfg.lane {
        Lane::Exact => freqbound_lane::<Q>(ctx, exponents, cfg),
        Lane::Float => freqbound_lane::<f64>(ctx, exponents, cfg),
    }
}

struct BandTrial<S> {
    /// Per exponent: the trial's worst outcome and `LHS / RHS` per band.
    per_exponent: Vec<(Outcome<S>, Vec<f64>)>,
}

fn freqbound_lane<S: Scalar>(ctx: &RingContext, exponents: &[u32], cfg: &VerifyConfig) -> Result<VerificationReport> {
    let id = CheckId::FreqBound;
    let n = ctx.dim();
    let bands = ctx.num_bands()?;
    let dirs = enumerate_proj(ctx)?;
    let charts = charts(ctx, &dirs);
    let consts: Vec<S> = (0..bands)
        .map(|i| band_constant(ctx, i, n).map(|c| S::from_q(&c)))
        .collect::<Result<_>>()?;
    let trials: Vec<BandTrial<S>> = map_range(cfg.trials, |t| {
        let f: Density<S> = corpus_density(ctx, cfg.seed, t).map(S::from_q);
        let pieces = band_decomposition(&f)?;
        let per_exponent = exponents
            .iter()
            .map(|&p| {
                let norm = f.power_integral(p);
                let mut worst: Option<Outcome<S>> = None;
                let mut ratios = Vec::with_capacity(bands);
                for (i, fi) in pieces.iter().enumerate() {
                    let lhs = xray_power_average(fi, &charts, p);
                    let rhs = consts[i].clone() * norm.clone();
                    ratios.push(if rhs.is_zero() { 0.0 } else { lhs.to_f64() / rhs.to_f64() });
                    let slack = rhs - lhs;
                    if worst.as_ref().is_none_or(|w| slack < w.slack) {
                        let mut w = corpus_witness(cfg.seed, t);
                        w["p"] = json!(p);
                        w["band"] = json!(i);
                        worst = Some(Outcome::new(slack, w));
                    }
                }
                (worst.expect("at least one band"), ratios)
            })
            .collect();
        Ok(BandTrial { per_exponent })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let lane = cfg.lane;
    let cmp = Comparator::AtLeast;
    let tol = tolerance(lane, cmp);
    let mut by_exponent = Vec::new();
    let mut all = Vec::new();
    let mut per_exp: Vec<Vec<Outcome<S>>> = exponents.iter().map(|_| Vec::new()).collect();
    let mut max_ratio: Vec<Vec<f64>> = exponents.iter().map(|_| vec![0.0; bands]).collect();
    for trial in trials {
        for (k, (o, ratios)) in trial.per_exponent.into_iter().enumerate() {
            for (m, r) in max_ratio[k].iter_mut().zip(ratios) {
                *m = m.max(r);
            }
            per_exp[k].push(o);
        }
    }
    for ((&p, outcomes), ratios) in exponents.iter().zip(per_exp).zip(max_ratio) {
        let clones: Vec<Outcome<S>> = outcomes
            .iter()
            .map(|o| Outcome::new(o.slack.clone(), o.witness.clone()))
            .collect();
        let sub = aggregate(id, ctx, lane, cmp, tol, clones);
        by_exponent.push(json!({
            "p": p,
            "worst_slack": sub.worst_slack,
            "pass": sub.pass,
            "witness": sub.witness,
            "max_lhs_over_rhs_by_band": ratios,
        }));
        all.extend(outcomes);
    }
    let consts_q: Vec<String> = (0..bands)
        .map(|i| band_constant(ctx, i, n).map(|c| render_q(&c)))
        .collect::<Result<_>>()?;
    Ok(aggregate(id, ctx, lane, cmp, tol, all)
        .detail("exponents", json!(exponents))
        .detail("band_constants", json!(consts_q))
        .detail("by_exponent", Value::Array(by_exponent)))
}
