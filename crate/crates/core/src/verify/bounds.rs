use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{aggregate, corpus_density, corpus_witness, random_integer_density, tolerance, trial_seed, CheckId, Comparator, Lane, Outcome, VerificationReport, VerifyConfig};
use crate::density::Density;
use crate::error::Result;
use crate::geometry::Flat;
use crate::harmonic::{band_constant, band_decomposition};
use crate::maximal::{appendix_constant, chain_constant, maxn_constant, mweight_with_plan, normalize_for_rounding, rounding_g, MaximalPlan};
use crate::parallel::map_range;
use crate::ring::RingContext;
use crate::scalar::{render_q, Scalar, Q};
use crate::search::{exact_min_kakeya, greedy_kakeya};

/// Largest ring on which the checks also run the exact Kakeya search.
const EXACT_SEARCH_POINTS: usize = 64;
/// Node budget there; an exhausted search still yields its best set as an adversarial input.
const EXACT_SEARCH_BUDGET: u64 = 200_000;

/// Named indicator densities of small sets containing a translate of every `k`-flat.
pub fn kakeya_indicators(ctx: &RingContext, k: usize) -> Result<Vec<(String, Density<Q>)>> {
    let mut out = vec![(format!("greedy-k{k}"), greedy_kakeya(ctx, k)?.indicator(ctx))];
    if ctx.num_points() <= EXACT_SEARCH_POINTS {
        out.push((format!("exact-k{k}"), exact_min_kakeya(ctx, k, EXACT_SEARCH_BUDGET)?.indicator(ctx)));
    }
    Ok(out)
}

/// `E_x f^n >= C E_u (𝒩¹f)^n` with `C = D_{N,n} / (2^n + 1)`, on the seeded corpus
/// and on small Kakeya sets.
pub fn verify_maxest(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let extra = kakeya_indicators(ctx, 1)?;
    verify_maxest_with(ctx, cfg, &extra)
}

/// As [`verify_maxest`] with caller-supplied adversarial densities.
pub fn verify_maxest_with(ctx: &RingContext, cfg: &VerifyConfig, extra: &[(String, Density<Q>)]) -> Result<VerificationReport> {
    match cfg.lane {
        Lane::Exact => maxest_lane::<Q>(ctx, cfg, extra),
        Lane::Float => maxest_lane::<f64>(ctx, cfg, extra),
    }
}

fn maxest_lane<S: Scalar>(ctx: &RingContext, cfg: &VerifyConfig, extra: &[(String, Density<Q>)]) -> Result<VerificationReport> {
    let n = ctx.dim() as u32;
    let plan = MaximalPlan::new(ctx, 1)?;
    let c = appendix_constant(ctx.modulus(), n);
    let eval = |f: &Density<Q>, witness: Value| {
        let f: Density<S> = f.map(S::from_q);
        let lhs = f.power_integral(n).to_f64();
        let rhs = plan.evaluate(&f).power_mean(n).to_f64();
        (Outcome::new(lhs - c * rhs, witness), if rhs > 0.0 { lhs / rhs } else { f64::INFINITY })
    };
    let mut results = map_range(cfg.trials, |t| eval(&corpus_density(ctx, cfg.seed, t), corpus_witness(cfg.seed, t)));
    for (name, f) in extra {
        results.push(eval(f, json!({ "input": name })));
    }
    let min_ratio = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let outcomes = results.into_iter().map(|r| r.0).collect();
    let cmp = Comparator::AtLeast;
    Ok(aggregate(CheckId::MaxEst, ctx, cfg.lane, cmp, tolerance(cfg.lane, cmp), outcomes)
        .detail("constant", json!(c))
        .detail("min_lhs_over_maximal_mean", json!(min_ratio))
        .detail("adversarial", json!(extra.iter().map(|e| &e.0).collect::<Vec<_>>())))
}

/// `Σ_x f^n >= C_{N,n}(mweight(f, p_1)) E_u (f*)^n` on integer densities.
pub fn verify_maxn(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let n = ctx.dim() as u32;
    let plan = MaximalPlan::new(ctx, 1)?;
    let p1 = ctx.factors()[0].p;
    let big_n = Q::from_integer(ctx.modulus() as i128);
    let mut inputs: Vec<(Value, Density<Q>)> = (0..cfg.trials)
        .map(|t| {
            let max = 1 + (t % 3) as u64;
            let seed = trial_seed(cfg.seed, t);
            (json!({"trial": t, "seed": seed, "max_value": max}), random_integer_density(ctx, seed, max))
        })
        .collect();
    for (name, f) in kakeya_indicators(ctx, 1)? {
        inputs.push((json!({ "input": name }), f));
    }
    let results = map_range(inputs.len(), |i| {
        let (w, f) = &inputs[i];
        let weight = mweight_with_plan(&plan, f, p1)?;
        let c = maxn_constant(ctx.modulus(), n, weight);
        let lhs = f.values().iter().fold(Q::zero(), |a, v| a + v.powi(n));
        let rhs = plan.evaluate(f).power_mean(n) * big_n.powi(n);
        let mut w = w.clone();
        w["mweight"] = json!(weight);
        Ok((Outcome::new(lhs.to_f64() - c * rhs.to_f64(), w), weight))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let max_weight = results.iter().map(|r| r.1).max().unwrap_or(0);
    let outcomes = results.into_iter().map(|r| r.0).collect();
    Ok(aggregate(CheckId::MaxN, ctx, Lane::Exact, Comparator::AtLeast, 0.0, outcomes).detail("max_mweight", json!(max_weight)))
}

/// After scaling into the regime `f <= 1`, `Σ f^n >= 1`: `g = ⌈N f⌉ / N >= f` and
/// `Σ g^n <= (2^n + 1) Σ f^n`. Slack is the smaller of the two margins.
pub fn verify_rounding(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let n = ctx.dim() as u32;
    let factor = Q::from_integer((1i128 << n) + 1);
    let outcomes = map_range(cfg.trials, |t| {
        let h = normalize_for_rounding(&corpus_density(ctx, cfg.seed, t), n);
        let g = rounding_g(&h)?;
        let sum = |d: &Density<Q>| d.values().iter().fold(Q::zero(), |a, v| a + v.powi(n));
        let mass = factor * sum(&h) - sum(&g);
        let pointwise = g
            .values()
            .iter()
            .zip(h.values())
            .map(|(a, b)| a - b)
            .min()
            .unwrap_or_else(Q::zero);
        Ok(Outcome::new(mass.min(pointwise), corpus_witness(cfg.seed, t)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(CheckId::Rounding, ctx, Lane::Exact, Comparator::AtLeast, 0.0, outcomes))
}

fn needs_chain(id: CheckId, ctx: &RingContext, lane: Lane) -> Option<VerificationReport> {
    if ctx.num_bands().is_err() {
        Some(VerificationReport::skipped(id, ctx, lane, "ring has no scale sequence"))
    } else if ctx.dim() < 3 {
        Some(VerificationReport::skipped(id, ctx, lane, "needs n >= 3"))
    } else {
        None
    }
}

/// `C avg_U (𝒩²f)^{n-1} <= ∫ f^{n-1}` with `C` the chain constant over every band of
/// the truncation. The per-band inequality
/// `C_{M_{i+1},n-1} avg_U (𝒩²|f_i|)^{n-1} <= ratio_i ∫ f^{n-1}` is reported, not asserted.
pub fn verify_main_theorem(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    if let Some(r) = needs_chain(CheckId::MainTheorem, ctx, cfg.lane) {
        return Ok(r);
    }
    match cfg.lane {
        Lane::Exact => main_lane::<Q>(ctx, cfg),
        Lane::Float => main_lane::<f64>(ctx, cfg),
    }
}

struct MainTrial {
    outcome: Outcome<f64>,
    norm_ratio: f64,
    band_slack: (f64, usize),
}

fn main_lane<S: Scalar>(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let n = ctx.dim();
    let e = (n - 1) as u32;
    let bands = ctx.num_bands()?;
    let chain = chain_constant(ctx, bands)?;
    let c = chain.constant;
    let plan = MaximalPlan::new(ctx, 2)?;
    let mode = ctx.mode();
    let band_terms: Vec<(f64, f64)> = (0..bands)
        .map(|i| {
            let next = mode.scale_value(i + 1).ok_or(crate::Error::ScaleOverflow { index: i + 1 })?;
            Ok((appendix_constant(next, e), band_constant(ctx, i, n)?.to_f64()))
        })
        .collect::<Result<_>>()?;
    let run = |f: &Density<Q>, witness: Value| -> Result<MainTrial> {
        let f: Density<S> = f.map(S::from_q);
        let maximal = plan.evaluate(&f).power_mean(e).to_f64();
        let norm = f.power_integral(e).to_f64();
        let mut band_slack = (f64::INFINITY, 0);
        for (i, fi) in band_decomposition(&f)?.into_iter().enumerate() {
            let (ci, ratio) = band_terms[i];
            let s = ratio * norm - ci * plan.evaluate(&fi.abs()).power_mean(e).to_f64();
            if s < band_slack.0 {
                band_slack = (s, i);
            }
        }
        Ok(MainTrial {
            outcome: Outcome::new(norm - c * maximal, witness),
            norm_ratio: if norm > 0.0 { maximal / norm } else { 0.0 },
            band_slack,
        })
    };
    let trials = map_range(cfg.trials, |t| run(&corpus_density(ctx, cfg.seed, t), corpus_witness(cfg.seed, t)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let ball = run(&Density::indicator(ctx, &[vec![0; n]]), json!({ "input": "ball" }))?;
    let max_norm_ratio = trials.iter().map(|t| t.norm_ratio).fold(0.0, f64::max);
    let (band_min, band_at) = trials
        .iter()
        .enumerate()
        .map(|(t, r)| (r.band_slack.0, t, r.band_slack.1))
        .fold((f64::INFINITY, json!(null)), |acc, (s, t, i)| {
            if s < acc.0 {
                (s, json!({"trial": t, "band": i}))
            } else {
                acc
            }
        });
    let mut outcomes: Vec<Outcome<f64>> = trials.into_iter().map(|t| t.outcome).collect();
    let ball_ratio = c * ball.norm_ratio;
    outcomes.push(ball.outcome);
    let cmp = Comparator::AtLeast;
    Ok(aggregate(CheckId::MainTheorem, ctx, cfg.lane, cmp, tolerance(cfg.lane, cmp), outcomes)
        .detail("chain_constant", json!(c))
        .detail("chain_depth", json!(bands))
        .detail("max_maximal_over_norm", json!(max_norm_ratio))
        .detail("ball_lhs_over_rhs", json!(ball_ratio))
        .detail("ball_maximal_over_norm", json!(ball.norm_ratio))
        .detail(
            "per_band_inequality",
            json!({"min_slack": band_min, "holds": band_min >= 0.0, "at": band_at}),
        ))
}

/// For each set `S`: `|S| / N^n >= C δ^{2(n-1)}` where `δ² = min_U 𝒩²(1_S)(U)` and `C`
/// is the chain constant. Inputs: the whole space, one 2-flat, small Kakeya sets for
/// 2-flats, and the supports of the seeded corpus.
pub fn verify_besicovitch(ctx: &RingContext, cfg: &VerifyConfig) -> Result<VerificationReport> {
    if let Some(r) = needs_chain(CheckId::Besicovitch, ctx, Lane::Exact) {
        return Ok(r);
    }
    let n = ctx.dim();
    let mut sets: Vec<(String, Density<Q>)> = vec![("whole-space".into(), Density::constant(ctx, Q::one()))];
    let mut gens = vec![vec![0u64; n]; 2];
    gens[0][0] = 1;
    gens[1][1] = 1;
    let plane = Flat::new(ctx, gens)?;
    sets.push(("plane-e1-e2".into(), Density::indicator(ctx, &plane.points(ctx))));
    sets.extend(kakeya_indicators(ctx, 2)?);
    for t in 0..cfg.trials {
        let f = corpus_density(ctx, cfg.seed, t);
        sets.push((format!("support-{t}"), f.map(|v| if v.is_zero() { Q::zero() } else { Q::one() })));
    }
    verify_besicovitch_sets(ctx, &sets)
}

/// The measure bound on caller-supplied indicator densities.
pub fn verify_besicovitch_sets(ctx: &RingContext, sets: &[(String, Density<Q>)]) -> Result<VerificationReport> {
    if let Some(r) = needs_chain(CheckId::Besicovitch, ctx, Lane::Exact) {
        return Ok(r);
    }
    let e = (ctx.dim() - 1) as u32;
    let c = chain_constant(ctx, ctx.num_bands()?)?.constant;
    let plan = MaximalPlan::new(ctx, 2)?;
    let rows = map_range(sets.len(), |i| {
        let (name, s) = &sets[i];
        let delta_sq = plan.evaluate(s).min_value();
        let measure = s.integral();
        let bound = c * delta_sq.to_f64().powi(e as i32);
        let row = json!({
            "input": name,
            "measure": render_q(&measure),
            "delta_sq": render_q(&delta_sq),
            "bound": bound,
        });
        Outcome::new(measure.to_f64() - bound, row)
    });
    let named: Vec<Value> = rows
        .iter()
        .filter(|r| !r.witness["input"].as_str().unwrap_or("").starts_with("support-"))
        .map(|r| r.witness.clone())
        .collect();
    Ok(aggregate(CheckId::Besicovitch, ctx, Lane::Exact, Comparator::AtLeast, 0.0, rows)
        .detail("chain_constant", json!(c))
        .detail("sets", Value::Array(named)))
}
