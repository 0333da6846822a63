//! Acceptance run: one PASS/FAIL line per criterion, exit status nonzero on any failure.
//!
//! Built with `harness = false` so the lines reach the terminal under plain `cargo test`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use kakeya_core::geometry::{enumerate_grassmannian, enumerate_proj, gr_size, proj_size};
use kakeya_core::parallel::{set_execution, Execution};
use kakeya_core::ring::factorize;
use kakeya_core::search::{exact_min_kakeya, greedy_kakeya, prime_line_lower_bound};
use kakeya_core::verify::{
    kakeya_indicators, run_check, run_suite, verify_besicovitch_sets, verify_maxest_with, verify_radius_n, CheckId,
    Lane, VerificationReport, VerifyConfig,
};
use kakeya_core::{RingContext, Q};

/// Exact lane: zero tolerance everywhere.
const EXACT_TOL: f64 = 0.0;
/// Float lane: Plancherel and round trip.
const PLANCHEREL_FLOAT_TOL: f64 = 1e-10;
/// Float lane: other equalities.
const FLOAT_EQ_TOL: f64 = 1e-9;
/// Float lane: inequalities need slack >= -this.
const FLOAT_INEQ_TOL: f64 = 1e-12;
const SEED: u64 = 20_240_601;
const SEARCH_BUDGET: u64 = 50_000_000;
/// Enumerations above this size are checked by count only.
const DISTINCTNESS_LIMIT: usize = 250_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn cfg(trials: usize, lane: Lane) -> VerifyConfig {
    VerifyConfig {
        seed: SEED,
        trials,
        lane,
        timings: false,
    }
}

fn padic(p: u64, ell: u32, n: usize) -> RingContext {
    RingContext::padic(p, ell, n).unwrap()
}

fn plain(m: u64, n: usize) -> RingContext {
    RingContext::plain(m, n).unwrap()
}

/// Checks a report against the pinned tolerance of its lane and comparator.
fn expect(report: &VerificationReport, tol: f64) -> Result<(), String> {
    if report.tolerance != tol {
        return Err(format!("{} on {}: tolerance {} but {} is pinned", report.check, report.ring, report.tolerance, tol));
    }
    if !report.pass {
        return Err(format!(
            "{} on {}: worst slack {} at {}",
            report.check, report.ring, report.worst_slack, report.witness
        ));
    }
    Ok(())
}

fn tol_for(lane: Lane, equality: bool) -> f64 {
    match (lane, equality) {
        (Lane::Exact, _) => EXACT_TOL,
        (Lane::Float, true) => FLOAT_EQ_TOL,
        (Lane::Float, false) => FLOAT_INEQ_TOL,
    }
}

fn euler_phi(m: u64) -> u64 {
    factorize(m).iter().fold(m, |acc, &(p, _)| acc / p * (p - 1))
}

/// `#{v : v ≢ 0 mod p for every p | N} / φ(N)`, by scanning `(Z/NZ)^n`.
fn brute_proj_count(m: u64, n: usize) -> u128 {
    let primes: Vec<u64> = factorize(m).iter().map(|&(p, _)| p).collect();
    let total = (m as usize).pow(n as u32);
    let mut count = 0u128;
    for i in 0..total {
        let mut x = i;
        let v: Vec<u64> = (0..n)
            .map(|_| {
                let c = (x % m as usize) as u64;
                x /= m as usize;
                c
            })
            .collect();
        if primes.iter().all(|&p| v.iter().any(|&c| c % p != 0)) {
            count += 1;
        }
    }
    count / euler_phi(m) as u128
}

/// Pairs `(v, w)` whose `2 x n` matrix has a unit 2-minor modulo every prime, over `|GL_2(Z/NZ)|`.
fn brute_plane_count(m: u64, n: usize) -> u128 {
    let primes: Vec<u64> = factorize(m).iter().map(|&(p, _)| p).collect();
    let vecs: Vec<Vec<u64>> = (0..(m as usize).pow(n as u32))
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let c = (x % m as usize) as u64;
                    x /= m as usize;
                    c
                })
                .collect()
        })
        .collect();
    let mut pairs = 0u128;
    for v in &vecs {
        for w in &vecs {
            let ok = primes.iter().all(|&p| {
                (0..n).any(|i| {
                    (i + 1..n).any(|j| {
                        let d = (v[i] * w[j] + m * m - v[j] * w[i]) % m;
                        !d.is_multiple_of(p)
                    })
                })
            });
            if ok {
                pairs += 1;
            }
        }
    }
    // |GL_2(Z/NZ)| = Π_q q^4 (1 - 1/p)(1 - 1/p^2)
    let gl2: u128 = factorize(m)
        .iter()
        .map(|&(p, e)| {
            let q = (p as u128).pow(e);
            let p = p as u128;
            q.pow(4) / (p * p * p) * (p - 1) * (p * p - 1)
        })
        .product();
    pairs / gl2
}

fn criterion_1() -> Outcome {
    let (mut checked, mut spaces) = (0usize, 0usize);
    for m in 2..=30u64 {
        for n in 2..=4usize {
            let ctx = RingContext::plain(m, n).unwrap().with_enumeration_cap(u128::MAX);
            let factors = factorize(m);
            for k in 1..=n {
                let formula = gr_size(m, n, k);
                let crt: u128 = factors.iter().map(|&(p, e)| gr_size(p.pow(e), n, k)).product();
                if formula != crt {
                    return Err(format!("CRT law fails for Gr(({m})^{n}, {k}): {formula} vs {crt}"));
                }
                let flats = enumerate_grassmannian(&ctx, k).map_err(|e| e.to_string())?;
                if flats.len() as u128 != formula {
                    return Err(format!("Gr(({m})^{n}, {k}): enumerated {} but formula {formula}", flats.len()));
                }
                if flats.len() <= DISTINCTNESS_LIMIT {
                    let distinct: HashSet<_> = flats.iter().collect();
                    if distinct.len() != flats.len() {
                        return Err(format!("Gr(({m})^{n}, {k}): duplicate flats"));
                    }
                }
                checked += 1;
            }
            let dirs = enumerate_proj(&ctx).map_err(|e| e.to_string())?;
            let size = proj_size(m, n);
            if dirs.len() as u128 != size || size != gr_size(m, n, 1) {
                return Err(format!("P(({m})^{n}): enumerated {} but formula {size}", dirs.len()));
            }
            let distinct: HashSet<_> = dirs.iter().collect();
            if distinct.len() != dirs.len() {
                return Err(format!("P(({m})^{n}): duplicate directions"));
            }
            let brute = brute_proj_count(m, n);
            if brute != size {
                return Err(format!("P(({m})^{n}): brute force {brute} but formula {size}"));
            }
            spaces += 1;
            if n >= 2 && (m as u128).pow(2 * n as u32) <= 3_000_000 {
                let b = brute_plane_count(m, n);
                if b != gr_size(m, n, 2) {
                    return Err(format!("Gr(({m})^{n}, 2): brute force {b} but formula {}", gr_size(m, n, 2)));
                }
            }
        }
    }
    Ok(format!("{checked} Grassmannians and {spaces} projective spaces"))
}

fn criterion_2() -> Outcome {
    for m in [4u64, 6, 8, 9, 12] {
        for n in [2usize, 3] {
            expect(&verify_radius_n(&plain(m, n)).map_err(|e| e.to_string())?, EXACT_TOL)?;
        }
    }
    Ok("10 rings, every dual frequency".into())
}

fn over_small_rings(min_dim: usize, mut f: impl FnMut(&RingContext) -> Result<(), String>) -> Result<usize, String> {
    let mut count = 0;
    for m in 2..=12u64 {
        for n in min_dim..=3usize {
            f(&plain(m, n))?;
            count += 1;
        }
    }
    Ok(count)
}

fn criterion_3() -> Outcome {
    let rings = over_small_rings(2, |ctx| {
        let exact = run_check(CheckId::Plancherel, ctx, &cfg(100, Lane::Exact)).map_err(|e| e.to_string())?;
        expect(&exact, EXACT_TOL)?;
        let float = run_check(CheckId::Plancherel, ctx, &cfg(100, Lane::Float)).map_err(|e| e.to_string())?;
        expect(&float, PLANCHEREL_FLOAT_TOL)
    })?;
    Ok(format!("{rings} rings x 100 densities, both lanes"))
}

fn criterion_4() -> Outcome {
    let rings = over_small_rings(2, |ctx| {
        let r = run_check(CheckId::XrayL2, ctx, &cfg(100, Lane::Exact)).map_err(|e| e.to_string())?;
        expect(&r, EXACT_TOL)
    })?;
    Ok(format!("{rings} rings x 100 densities, exact, per-direction claim included"))
}

/// Rings with a scale sequence and `N <= 12`.
fn scaled_rings(n: usize) -> Vec<RingContext> {
    let mut out = vec![padic(2, 1, n), padic(2, 2, n), padic(2, 3, n), padic(3, 1, n), padic(3, 2, n)];
    out.extend([padic(5, 1, n), padic(7, 1, n), padic(11, 1, n)]);
    out.push(RingContext::profinite(1, n).unwrap());
    out.push(RingContext::profinite(2, n).unwrap());
    out
}

fn criterion_5() -> Outcome {
    let mut worst_p3 = f64::INFINITY;
    let mut rings = 0;
    for n in [2usize, 3] {
        for ctx in scaled_rings(n) {
            let r = run_check(CheckId::FreqBound, &ctx, &cfg(100, Lane::Exact)).map_err(|e| e.to_string())?;
            expect(&r, EXACT_TOL)?;
            for e in r.details["by_exponent"].as_array().unwrap() {
                if e["p"] == 3 {
                    let s: Q = kakeya_core::scalar::parse_q(e["worst_slack"].as_str().unwrap()).unwrap();
                    worst_p3 = worst_p3.min(kakeya_core::Scalar::to_f64(&s));
                }
            }
            rings += 1;
        }
    }
    Ok(format!("{rings} rings x 100 densities, p in {{2, 3, n-1}}; least p=3 slack {worst_p3:e}"))
}

fn reduction_rings() -> [RingContext; 2] {
    [padic(2, 2, 3), padic(2, 3, 3)]
}

fn criterion_6() -> Outcome {
    for ctx in reduction_rings() {
        for lane in [Lane::Exact, Lane::Float] {
            let r = run_check(CheckId::ProjMax, &ctx, &cfg(20, lane)).map_err(|e| e.to_string())?;
            expect(&r, tol_for(lane, true))?;
        }
    }
    Ok("(Z/4)^3 and (Z/8)^3, 20 densities, every band, every (u, w)".into())
}

fn criterion_7() -> Outcome {
    for ctx in reduction_rings() {
        let r = run_check(CheckId::DivisorReduction, &ctx, &cfg(20, Lane::Exact)).map_err(|e| e.to_string())?;
        expect(&r, EXACT_TOL)?;
        if r.details["max_constancy_defect"] != "0" {
            return Err(format!("{}: band pieces not constant on cosets", r.ring));
        }
    }
    Ok("(Z/4)^3 and (Z/8)^3, 20 densities, constancy defect 0".into())
}

fn criterion_8() -> Outcome {
    let mut extras = 0;
    for m in 2..=12u64 {
        for n in [2usize, 3] {
            let ctx = plain(m, n);
            let mut extra = kakeya_indicators(&ctx, 1).map_err(|e| e.to_string())?;
            if n == 3 {
                extra.extend(kakeya_indicators(&ctx, 2).map_err(|e| e.to_string())?);
            }
            extras += extra.len();
            let r = verify_maxest_with(&ctx, &cfg(1000, Lane::Exact), &extra).map_err(|e| e.to_string())?;
            expect(&r, EXACT_TOL)?;
        }
    }
    Ok(format!("22 rings x 1000 densities plus {extras} Kakeya indicators"))
}

fn criterion_9() -> Outcome {
    for ctx in [plain(5, 3), padic(2, 3, 3), plain(12, 2), plain(6, 3)] {
        let r = run_check(CheckId::Rounding, &ctx, &cfg(200, Lane::Exact)).map_err(|e| e.to_string())?;
        expect(&r, EXACT_TOL)?;
    }
    Ok("4 rings x 200 densities".into())
}

fn criterion_10() -> Outcome {
    let mut ratios = Vec::new();
    for ctx in [padic(2, 3, 3), padic(3, 2, 3)] {
        let r = run_check(CheckId::MainTheorem, &ctx, &cfg(200, Lane::Exact)).map_err(|e| e.to_string())?;
        expect(&r, EXACT_TOL)?;
        ratios.push(format!("N={} ball LHS/RHS {}", ctx.modulus(), r.details["ball_lhs_over_rhs"]));
    }
    Ok(format!("200 densities + ball; {}", ratios.join(", ")))
}

fn criterion_11() -> Outcome {
    let mut sizes = Vec::new();
    for (p, frozen) in [(2u64, 7usize), (3, 25)] {
        let ctx = padic(p, 1, 3);
        let cert = exact_min_kakeya(&ctx, 2, SEARCH_BUDGET).map_err(|e| e.to_string())?;
        if cert.optimal != Some(true) {
            return Err(format!("(Z/{p})^3: search budget exhausted"));
        }
        if cert.size != frozen {
            return Err(format!("(Z/{p})^3: minimum {} differs from the frozen {frozen}", cert.size));
        }
        let r = verify_besicovitch_sets(&ctx, &[("exact-k2".into(), cert.indicator(&ctx))]).map_err(|e| e.to_string())?;
        expect(&r, EXACT_TOL)?;
        if r.witness["delta_sq"] != "1" {
            return Err(format!("(Z/{p})^3: certificate does not contain every plane (delta^2 = {})", r.witness["delta_sq"]));
        }
        sizes.push(format!("|S|={} over (Z/{p})^3", cert.size));
    }
    let mut lines = 0;
    for p in [2u64, 3, 5, 7, 11] {
        for n in [2usize, 3] {
            let ctx = padic(p, 1, n);
            let bound = prime_line_lower_bound(p, n).unwrap();
            let mut certs = vec![greedy_kakeya(&ctx, 1).map_err(|e| e.to_string())?];
            if ctx.num_points() <= 64 {
                certs.push(exact_min_kakeya(&ctx, 1, SEARCH_BUDGET).map_err(|e| e.to_string())?);
            }
            for c in certs {
                if Q::from_integer(c.size as i128) < bound {
                    return Err(format!("(Z/{p})^{n}: line set of size {} below {bound}", c.size));
                }
                lines += 1;
            }
        }
    }
    Ok(format!("{}; {lines} line certificates over prime N", sizes.join(", ")))
}

fn criterion_12() -> Outcome {
    let checks = CheckId::ALL;
    let mut hashes = Vec::new();
    for ctx in [padic(2, 2, 3), RingContext::profinite(2, 3).unwrap()] {
        let c = cfg(12, Lane::Exact);
        set_execution(Execution::Parallel);
        let a = run_suite(&ctx, &c, &checks).map_err(|e| e.to_string())?.to_json_string();
        let b = run_suite(&ctx, &c, &checks).map_err(|e| e.to_string())?.to_json_string();
        set_execution(Execution::Sequential);
        let s = run_suite(&ctx, &c, &checks).map_err(|e| e.to_string())?.to_json_string();
        set_execution(Execution::Parallel);
        if a != b || a != s {
            return Err(format!("{}: reports differ between runs", ctx.summary()));
        }
        let float = cfg(12, Lane::Float);
        let fa = run_suite(&ctx, &float, &checks).map_err(|e| e.to_string())?.to_json_string();
        let fb = run_suite(&ctx, &float, &checks).map_err(|e| e.to_string())?.to_json_string();
        if fa != fb {
            return Err(format!("{}: float reports differ between runs", ctx.summary()));
        }
        hashes.push(a.len());
    }
    Ok(format!("2 rings, both lanes, parallel and sequential; report sizes {hashes:?} bytes"))
}

fn main() {
    // libtest flags such as `--nocapture` or test filters are accepted and ignored
    let criteria: [Criterion; 12] = [
        ("projective and Grassmannian counts", 60, criterion_1),
        ("orthogonal-direction fractions", 60, criterion_2),
        ("Plancherel and Fourier round trip", 120, criterion_3),
        ("X-ray l2 identity", 120, criterion_4),
        ("band X-ray bound", 180, criterion_5),
        ("plane maximal equals quotient line maximal", 120, criterion_6),
        ("divisor reduction of the line maximal", 120, criterion_7),
        ("integer maximal estimate", 300, criterion_8),
        ("rounding", 60, criterion_9),
        ("2-flat maximal bound end to end", 300, criterion_10),
        ("Besicovitch bound at truncation", 300, criterion_11),
        ("determinism", 300, criterion_12),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*limit);
        let (tag, msg) = match (&outcome, over) {
            (Ok(m), false) => ("PASS", m.clone()),
            (Ok(m), true) => ("FAIL", format!("{m}; over the {limit}s budget")),
            (Err(m), _) => ("FAIL", m.clone()),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!("[{tag}] {:>2} {name} ({:.1}s): {msg}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
