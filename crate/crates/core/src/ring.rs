//! Exact bookkeeping for the residue ring `Z/NZ` and the module `(Z/NZ)^n`.
//!
//! Points of `(Z/NZ)^n` are addressed by a mixed-radix index whose order agrees
//! with the lexicographic order of coordinate vectors, so "lexicographically
//! least" tie-breaks reduce to "smallest index".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of objects any enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Prime factorization by trial division, primes strictly increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Möbius function.
pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Least positive `v` with `v * a = 0` in `(Z/NZ)^n`, i.e. `N / gcd(a_1, ..., a_n, N)`.
/// The zero vector has valuation 1.
pub fn dual_valuation(a: &[u64], modulus: u64) -> u64 {
    let g = a.iter().fold(modulus, |g, &x| gcd(g, x % modulus));
    modulus / g
}

/// `base^exp` as `u64`, `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Truncation model of the ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mode {
    /// `Z/p^ell Z`, scales `M_i = p^i`.
    PAdic { p: u64, ell: u32 },
    /// `Z/(L+1)! Z`, scales `M_i = (i+1)!`.
    Profinite { l: u32 },
    /// A bare residue ring without a scale sequence.
    Plain,
}

impl Mode {
    /// The untruncated scale `M_i`, `None` on overflow or when there are no scales.
    pub fn scale_value(&self, i: usize) -> Option<u64> {
        match *self {
            Mode::PAdic { p, .. } => checked_pow(p, u32::try_from(i).ok()?),
            Mode::Profinite { .. } => (2..=(i as u64 + 1)).try_fold(1u64, |acc, k| acc.checked_mul(k)),
            Mode::Plain => None,
        }
    }
}

/// How dual valuations are assigned to Littlewood–Paley bands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSemantics {
    /// Band `i` holds valuations `M_i <= v < M_{i+1}`.
    Numeric,
    /// Band `i` holds valuations `v | M_i` with `v ∤ M_{i-1}` (band 0 is `v = 1`).
    Divisibility,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub exp: u32,
    /// `p^exp`
    pub q: u64,
}

/// The working module `(Z/NZ)^n`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingContext {
    modulus: u64,
    dim: usize,
    factors: Vec<PrimePower>,
    idempotents: Vec<u64>,
    mode: Mode,
    semantics: ScaleSemantics,
    cap: u128,
}

impl RingContext {
    pub fn padic(p: u64, ell: u32, dim: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("p = {p} is not prime")));
        }
        if ell == 0 {
            return Err(Error::InvalidRing("truncation depth ell must be >= 1".into()));
        }
        let modulus = checked_pow(p, ell)
            .ok_or_else(|| Error::InvalidRing(format!("{p}^{ell} overflows")))?;
        Self::build(modulus, dim, Mode::PAdic { p, ell }, ScaleSemantics::Numeric)
    }

    pub fn profinite(l: u32, dim: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidRing("profinite truncation L must be >= 1".into()));
        }
        let mode = Mode::Profinite { l };
        let modulus = mode
            .scale_value(l as usize)
            .ok_or_else(|| Error::InvalidRing(format!("({})! overflows", l + 1)))?;
        Self::build(modulus, dim, mode, ScaleSemantics::Divisibility)
    }

    pub fn plain(modulus: u64, dim: usize) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidRing("modulus must be positive".into()));
        }
        Self::build(modulus, dim, Mode::Plain, ScaleSemantics::Numeric)
    }

    fn build(modulus: u64, dim: usize, mode: Mode, semantics: ScaleSemantics) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidRing(format!("dimension n = {dim} must be >= 2")));
        }
        Ok(Self::build_unchecked(modulus, dim, mode, semantics))
    }

    fn build_unchecked(modulus: u64, dim: usize, mode: Mode, semantics: ScaleSemantics) -> Self {
        let factors: Vec<PrimePower> = factorize(modulus)
            .into_iter()
            .map(|(p, exp)| PrimePower { p, exp, q: p.pow(exp) })
            .collect();
        let idempotents = factors
            .iter()
            .map(|f| {
                let cofactor = modulus / f.q;
                let inv = mod_inverse(cofactor % f.q, f.q).expect("coprime cofactor");
                ((cofactor as u128 * inv as u128) % modulus as u128) as u64
            })
            .collect();
        Self {
            modulus,
            dim,
            factors,
            idempotents,
            mode,
            semantics,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn with_semantics(mut self, semantics: ScaleSemantics) -> Self {
        if semantics == ScaleSemantics::Numeric && matches!(self.mode, Mode::Profinite { .. }) {
            log::warn!(
                "numeric band semantics in profinite mode: bands may fail to be constant on cosets of M_(i+1)"
            );
        }
        self.semantics = semantics;
        self
    }

    pub fn with_enumeration_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    /// Same modulus, dimension `dim` (which may be 1), no scales. Used for quotients.
    pub fn with_dim(&self, dim: usize) -> Self {
        let mut ctx = Self::build_unchecked(self.modulus, dim.max(1), Mode::Plain, self.semantics);
        ctx.cap = self.cap;
        ctx
    }

    /// `(Z/MZ)^n` for a divisor `M` of `N`, no scales.
    pub fn reduced(&self, m: u64) -> Result<Self> {
        if m == 0 || !self.modulus.is_multiple_of(m) {
            return Err(Error::InvalidRing(format!(
                "{m} does not divide the modulus {}",
                self.modulus
            )));
        }
        let mut ctx = Self::build_unchecked(m, self.dim, Mode::Plain, self.semantics);
        ctx.cap = self.cap;
        Ok(ctx)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    /// CRT idempotents `e_j`: `e_j = 1 mod q_j`, `0` mod the other prime powers.
    pub fn idempotents(&self) -> &[u64] {
        &self.idempotents
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn semantics(&self) -> ScaleSemantics {
        self.semantics
    }

    pub fn enumeration_cap(&self) -> u128 {
        self.cap
    }

    /// `N^n`
    pub fn num_points(&self) -> usize {
        (self.modulus as usize).pow(self.dim as u32)
    }

    pub fn coords(&self, mut index: usize) -> Vec<u64> {
        let n = self.modulus as usize;
        let mut out = vec![0u64; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = (index % n) as u64;
            index /= n;
        }
        out
    }

    pub fn index(&self, x: &[u64]) -> usize {
        let n = self.modulus;
        x.iter().fold(0usize, |acc, &c| acc * n as usize + (c % n) as usize)
    }

    /// Advances `x` to the lexicographically next point; returns `false` after the last.
    pub fn next_point(&self, x: &mut [u64]) -> bool {
        for c in x.iter_mut().rev() {
            *c += 1;
            if *c < self.modulus {
                return true;
            }
            *c = 0;
        }
        false
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// `⟨x, a⟩ mod N`
    pub fn dot(&self, x: &[u64], a: &[u64]) -> u64 {
        let s: u128 = x.iter().zip(a).map(|(&u, &v)| u as u128 * v as u128).sum();
        (s % self.modulus as u128) as u64
    }

    /// Least `v` with `v a = 0`.
    pub fn valuation(&self, a: &[u64]) -> u64 {
        dual_valuation(a, self.modulus)
    }

    /// Splits a vector into its residues modulo each prime power `q_j`.
    pub fn crt_split(&self, x: &[u64]) -> Vec<Vec<u64>> {
        self.factors
            .iter()
            .map(|f| x.iter().map(|&c| c % f.q).collect())
            .collect()
    }

    /// Inverse of [`crt_split`](Self::crt_split).
    pub fn crt_combine(&self, parts: &[Vec<u64>]) -> Vec<u64> {
        let len = parts.first().map_or(self.dim, Vec::len);
        (0..len)
            .map(|i| {
                let residues: Vec<u64> = parts.iter().map(|p| p[i]).collect();
                self.crt_combine_scalar(&residues)
            })
            .collect()
    }

    pub fn crt_combine_scalar(&self, residues: &[u64]) -> u64 {
        let m = self.modulus as u128;
        let s = residues
            .iter()
            .zip(&self.idempotents)
            .fold(0u128, |acc, (&r, &e)| (acc + r as u128 * e as u128) % m);
        s as u64
    }

    /// The truncated scale `M_i`; errors past the truncation depth.
    pub fn scale(&self, i: usize) -> Result<u64> {
        let last = self.last_scale_index()?;
        if i > last {
            return Err(Error::ScaleBeyondTruncation { index: i, last });
        }
        self.mode.scale_value(i).ok_or(Error::ScaleOverflow { index: i })
    }

    fn last_scale_index(&self) -> Result<usize> {
        match self.mode {
            Mode::PAdic { ell, .. } => Ok(ell as usize),
            Mode::Profinite { l } => Ok(l as usize),
            Mode::Plain => Err(Error::NoScales),
        }
    }

    /// Number of Littlewood–Paley bands at this truncation (`M_0 ..= M_last`).
    pub fn num_bands(&self) -> Result<usize> {
        Ok(self.last_scale_index()? + 1)
    }

    /// Divisors of `N` whose frequencies fall in band `i`.
    pub fn band_valuations(&self, i: usize) -> Result<Vec<u64>> {
        let bands = self.num_bands()?;
        if i >= bands {
            return Err(Error::BandOutOfRange { index: i, bands });
        }
        Ok(divisors(self.modulus)
            .into_iter()
            .filter(|&d| band_contains(self.mode, self.semantics, i, d))
            .collect())
    }

    /// Band index of a valuation `v | N`.
    pub fn band_of(&self, v: u64) -> Result<usize> {
        let bands = self.num_bands()?;
        (0..bands)
            .find(|&i| band_contains(self.mode, self.semantics, i, v))
            .ok_or(Error::BandOutOfRange { index: bands, bands })
    }

    /// Modulus on whose cosets band `i` is constant: `gcd(M_{i+1}, N)`.
    pub fn band_constancy_modulus(&self, i: usize) -> Result<u64> {
        let next = self.mode.scale_value(i + 1).ok_or(Error::ScaleOverflow { index: i + 1 })?;
        Ok(gcd(next, self.modulus))
    }

    pub fn summary(&self) -> String {
        let mode = match self.mode {
            Mode::PAdic { p, ell } => format!("padic(p={p},ell={ell})"),
            Mode::Profinite { l } => format!("profinite(L={l})"),
            Mode::Plain => "plain".to_string(),
        };
        let sem = match self.semantics {
            ScaleSemantics::Numeric => "numeric",
            ScaleSemantics::Divisibility => "divisibility",
        };
        format!("{mode} N={} n={} bands={sem}", self.modulus, self.dim)
    }
}

/// Whether valuation `v` belongs to band `i` of the untruncated scale sequence.
pub fn band_contains(mode: Mode, semantics: ScaleSemantics, i: usize, v: u64) -> bool {
    let Some(lo) = mode.scale_value(i) else {
        return false;
    };
    match semantics {
        ScaleSemantics::Numeric => {
            let below_next = mode.scale_value(i + 1).is_none_or(|hi| v < hi);
            v >= lo && below_next
        }
        ScaleSemantics::Divisibility => {
            let prev_ok = i == 0 || mode.scale_value(i - 1).is_some_and(|prev| prev % v != 0);
            lo % v == 0 && prev_ok
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_oracle(mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut d = 2;
        while n > 1 {
            if n.is_multiple_of(d) {
                n /= d;
                match out.last_mut() {
                    Some((p, e)) if *p == d => *e += 1,
                    _ => out.push((d, 1)),
                }
            } else {
                d += 1;
            }
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(720), trial_division_oracle(720));
        assert_eq!(factorize(720), vec![(2, 4), (3, 2), (5, 1)]);
        for n in 1..2000 {
            assert_eq!(factorize(n), trial_division_oracle(n), "n={n}");
        }
    }

    #[test]
    fn crt_examples() {
        let ctx = RingContext::plain(12, 2).unwrap();
        let parts = ctx.crt_split(&[7, 0]);
        assert_eq!(parts, vec![vec![3, 0], vec![1, 0]]);
        assert_eq!(ctx.crt_combine(&parts), vec![7, 0]);
        assert_eq!(ctx.crt_split(&[0, 0]), vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn valuation_examples() {
        let scan = |a: &[u64], n: u64| (1..=n).find(|&m| a.iter().all(|&x| (m * x) % n == 0)).unwrap();
        assert_eq!(dual_valuation(&[2, 0], 4), 2);
        assert_eq!(scan(&[2, 0], 4), 2);
        assert_eq!(dual_valuation(&[0, 0, 0], 7), 1);
        assert_eq!(dual_valuation(&[3, 0], 9), 3);
        assert_eq!(scan(&[3, 0], 9), 3);
    }

    #[test]
    fn scale_examples() {
        let padic = RingContext::padic(2, 3, 2).unwrap();
        assert_eq!(padic.scale(3).unwrap(), 8);
        assert_eq!(padic.scale(0).unwrap(), 1);
        assert_eq!(
            padic.scale(4),
            Err(Error::ScaleBeyondTruncation { index: 4, last: 3 })
        );
        let prof = RingContext::profinite(3, 2).unwrap();
        assert_eq!(prof.modulus(), 24);
        assert_eq!(prof.scale(0).unwrap(), 1);
        assert_eq!(prof.scale(3).unwrap(), 24);
        assert_eq!(RingContext::plain(12, 2).unwrap().scale(0), Err(Error::NoScales));
    }

    #[test]
    fn invalid_rings_rejected() {
        assert!(RingContext::padic(4, 2, 2).is_err());
        assert!(RingContext::plain(6, 1).is_err());
        assert!(RingContext::profinite(0, 3).is_err());
    }

    #[test]
    fn profinite_divisibility_bands_partition() {
        let ctx = RingContext::profinite(2, 2).unwrap();
        assert_eq!(ctx.modulus(), 6);
        assert_eq!(ctx.band_valuations(0).unwrap(), vec![1]);
        assert_eq!(ctx.band_valuations(1).unwrap(), vec![2]);
        assert_eq!(ctx.band_valuations(2).unwrap(), vec![3, 6]);
        // every one of the 36 duals lands in exactly one band
        let mut x = vec![0u64; 2];
        let mut seen = 0;
        loop {
            let v = ctx.valuation(&x);
            let hits = (0..3).filter(|&i| band_contains(ctx.mode(), ctx.semantics(), i, v)).count();
            assert_eq!(hits, 1);
            seen += 1;
            if !ctx.next_point(&mut x) {
                break;
            }
        }
        assert_eq!(seen, 36);
    }

    #[test]
    fn padic_semantics_coincide() {
        let num = RingContext::padic(3, 3, 2).unwrap();
        let div = num.clone().with_semantics(ScaleSemantics::Divisibility);
        for i in 0..4 {
            assert_eq!(num.band_valuations(i).unwrap(), div.band_valuations(i).unwrap());
        }
    }

    #[test]
    fn numeric_profinite_breaks_constancy_at_24() {
        let ctx = RingContext::profinite(3, 2)
            .unwrap()
            .with_semantics(ScaleSemantics::Numeric);
        // band 1 is [2, 6): contains 4, which does not divide M_2 = 6
        assert_eq!(ctx.band_valuations(1).unwrap(), vec![2, 3, 4]);
        assert_eq!(ctx.band_constancy_modulus(1).unwrap(), 6);
    }

    #[test]
    fn moebius_and_divisors() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(30), -1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn valuation_is_least_annihilator(n in 1u64..60, a in proptest::collection::vec(0u64..1000, 1..4)) {
                let a: Vec<u64> = a.into_iter().map(|x| x % n).collect();
                let v = dual_valuation(&a, n);
                prop_assert_eq!(n % v, 0);
                prop_assert!(a.iter().all(|&x| (v * x).is_multiple_of(n)));
                for m in 1..v {
                    prop_assert!(a.iter().any(|&x| (m * x) % n != 0));
                }
            }

            #[test]
            fn crt_round_trip(n in 1u64..200, x in proptest::collection::vec(0u64..10_000, 2..4)) {
                let ctx = RingContext::plain(n, x.len()).unwrap();
                let x: Vec<u64> = x.into_iter().map(|c| c % n).collect();
                let parts = ctx.crt_split(&x);
                prop_assert_eq!(ctx.crt_combine(&parts), x);
            }

            #[test]
            fn scales_divide_each_other(p in prop::sample::select(vec![2u64, 3, 5, 7]), l in 1u32..4) {
                for ctx in [RingContext::padic(p, l, 2).unwrap(), RingContext::profinite(l, 2).unwrap()] {
                    let last = ctx.num_bands().unwrap() - 1;
                    for i in 0..last {
                        prop_assert_eq!(ctx.scale(i + 1).unwrap() % ctx.scale(i).unwrap(), 0);
                        prop_assert!(ctx.scale(i + 1).unwrap() > ctx.scale(i).unwrap());
                    }
                    for d in divisors(ctx.modulus()) {
                        prop_assert!((0..=last).any(|i| ctx.scale(i).unwrap() % d == 0));
                    }
                }
            }
        }
    }
}
