use std::f64::consts::TAU;

use num_complex::Complex64;

use super::cyclotomic;
use crate::density::Density;
use crate::error::{Error, Result};
use crate::parallel::map_range;
use crate::ring::RingContext;
use crate::scalar::Q;

/// Value type a transform runs over: `acc += ζ^k · e` is the only primitive needed.
pub trait TransformLane: Sync {
    type Elem: Clone + Send + Sync;

    fn zero(&self) -> Self::Elem;

    fn accumulate(&self, acc: &mut Self::Elem, e: &Self::Elem, k: u64);
}

/// Exact lane: elements of `Z[x]/(x^N - 1)`.
pub struct CyclotomicLane {
    modulus: usize,
}

impl CyclotomicLane {
    pub fn new(modulus: u64) -> Self {
        Self {
            modulus: modulus as usize,
        }
    }

    /// The group-algebra element `c · x^0`.
    pub fn constant(&self, c: i128) -> Vec<i128> {
        let mut e = vec![0; self.modulus];
        e[0] = c;
        e
    }
}

impl TransformLane for CyclotomicLane {
    type Elem = Vec<i128>;

    fn zero(&self) -> Vec<i128> {
        vec![0; self.modulus]
    }

    fn accumulate(&self, acc: &mut Vec<i128>, e: &Vec<i128>, k: u64) {
        cyclotomic::accumulate_rotated(acc, e, k);
    }
}

/// Float lane: `Complex64` with a precomputed table of `N`-th roots of unity.
pub struct ComplexLane {
    roots: Vec<Complex64>,
}

impl ComplexLane {
    pub fn new(modulus: u64) -> Self {
        let n = modulus as f64;
        Self {
            roots: (0..modulus)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n))
                .collect(),
        }
    }
}

impl TransformLane for ComplexLane {
    type Elem = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn accumulate(&self, acc: &mut Complex64, e: &Complex64, k: u64) {
        *acc += self.roots[k as usize % self.roots.len()] * e;
    }
}

/// Unnormalized character sum `out(a) = Σ_x ζ^{sign·⟨x,a⟩} in(x)`.
///
/// Each axis of length `N` is split by CRT into axes of length `q_j` with kernel
/// `ζ^{e_j x_j a_j}`, so one pass per (axis, prime power) costs `N^n · q_j`.
pub fn dft<L: TransformLane>(
    ctx: &RingContext,
    lane: &L,
    mut values: Vec<L::Elem>,
    inverse: bool,
) -> Vec<L::Elem> {
    let n = ctx.modulus();
    let dim = ctx.dim();
    let len = values.len();
    for axis in 0..dim {
        let stride = (n as usize).pow((dim - 1 - axis) as u32);
        for (f, &e) in ctx.factors().iter().zip(ctx.idempotents()) {
            let q = f.q;
            let input = &values;
            values = map_range(len, |idx| {
                let c = (idx / stride) as u64 % n;
                let base = idx - c as usize * stride;
                let own = c % q;
                let mut acc = lane.zero();
                for t in 0..q {
                    let ct = (c as i128 + e as i128 * (t as i128 - own as i128)).rem_euclid(n as i128);
                    let mut k = ((e as u128 * t as u128 % n as u128) * own as u128 % n as u128) as u64;
                    if inverse && k != 0 {
                        k = n - k;
                    }
                    lane.accumulate(&mut acc, &input[base + ct as usize * stride], k);
                }
                acc
            });
        }
    }
    values
}

/// Direct `O(N^{2n})` character sum, kept as a test oracle.
#[cfg(any(test, feature = "oracle"))]
pub fn naive_dft<L: TransformLane>(
    ctx: &RingContext,
    lane: &L,
    values: &[L::Elem],
    inverse: bool,
) -> Vec<L::Elem> {
    let n = ctx.modulus();
    (0..values.len())
        .map(|ai| {
            let a = ctx.coords(ai);
            let mut acc = lane.zero();
            for (xi, v) in values.iter().enumerate() {
                let d = ctx.dot(&ctx.coords(xi), &a);
                let k = if inverse && d != 0 { n - d } else { d };
                lane.accumulate(&mut acc, v, k);
            }
            acc
        })
        .collect()
}

/// `f̂` in the exact lane: `f̂(a) = scale · Σ_k c_k(a) ζ^k` with integer `c_k`.
#[derive(Clone, Debug)]
pub struct ExactSpectrum {
    ctx: RingContext,
    numerators: Vec<Vec<i128>>,
    scale: Q,
    phi: Vec<i128>,
}

/// `f̂` in the float lane.
#[derive(Clone, Debug)]
pub struct Spectrum {
    ctx: RingContext,
    coeffs: Vec<Complex64>,
}

fn common_denominator(values: &[Q]) -> i128 {
    values
        .iter()
        .fold(1i128, |d, v| num_integer::lcm(d, *v.denom()))
}

pub fn fourier_exact(f: &Density<Q>) -> ExactSpectrum {
    let ctx = f.ctx().clone();
    let lane = CyclotomicLane::new(ctx.modulus());
    let den = common_denominator(f.values());
    let input: Vec<Vec<i128>> = f
        .values()
        .iter()
        .map(|v| lane.constant(v.numer() * (den / v.denom())))
        .collect();
    let numerators = dft(&ctx, &lane, input, false);
    let scale = Q::new(1, den * ctx.num_points() as i128);
    ExactSpectrum {
        phi: cyclotomic::cyclotomic_polynomial(ctx.modulus()),
        ctx,
        numerators,
        scale,
    }
}

pub fn fourier_float(f: &Density<f64>) -> Spectrum {
    let ctx = f.ctx().clone();
    let lane = ComplexLane::new(ctx.modulus());
    let input: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let norm = ctx.num_points() as f64;
    let coeffs = dft(&ctx, &lane, input, false)
        .into_iter()
        .map(|c| c / norm)
        .collect();
    Spectrum { ctx, coeffs }
}

impl ExactSpectrum {
    /// Rebuilds a spectrum from `scale` and the `N` integer coefficients of each frequency.
    pub fn from_parts(ctx: RingContext, numerators: Vec<Vec<i128>>, scale: Q) -> Result<Self> {
        if numerators.len() != ctx.num_points() {
            return Err(Error::DimensionMismatch {
                expected: ctx.num_points(),
                got: numerators.len(),
            });
        }
        if let Some(bad) = numerators.iter().find(|e| e.len() != ctx.modulus() as usize) {
            return Err(Error::DimensionMismatch {
                expected: ctx.modulus() as usize,
                got: bad.len(),
            });
        }
        Ok(Self {
            phi: cyclotomic::cyclotomic_polynomial(ctx.modulus()),
            ctx,
            numerators,
            scale,
        })
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    pub fn scale(&self) -> Q {
        self.scale
    }

    /// Integer coefficients of `f̂(a) / scale` in powers of `ζ`.
    pub fn numerator(&self, index: usize) -> &[i128] {
        &self.numerators[index]
    }

    pub fn phi(&self) -> &[i128] {
        &self.phi
    }

    pub fn coefficient(&self, index: usize) -> Complex64 {
        cyclotomic::evaluate(&self.numerators[index], &self.scale)
    }

    pub fn to_float(&self) -> Spectrum {
        Spectrum {
            ctx: self.ctx.clone(),
            coeffs: (0..self.numerators.len()).map(|i| self.coefficient(i)).collect(),
        }
    }

    /// `Σ_{a ∈ indices} |f̂(a)|²`, exact. The index set must be stable under
    /// `a ↦ k a` for units `k`, otherwise the sum is generally irrational.
    pub fn energy_of<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<Q> {
        let mut acc = vec![0i128; self.ctx.modulus() as usize];
        for i in indices {
            for (s, v) in acc.iter_mut().zip(cyclotomic::norm_squared(&self.numerators[i])) {
                *s += v;
            }
        }
        let r = cyclotomic::to_rational(&acc, &self.phi)?;
        Ok(Q::from_integer(r) * self.scale * self.scale)
    }

    /// `Σ_a |f̂(a)|²`
    pub fn plancherel_sum(&self) -> Result<Q> {
        self.energy_of(0..self.numerators.len())
    }

    /// `T_d = Σ_{v(a) = d} |f̂(a)|²` for every divisor `d` of `N`.
    pub fn energies_by_valuation(&self) -> Result<Vec<(u64, Q)>> {
        let groups = valuation_classes(&self.ctx);
        groups
            .into_iter()
            .map(|(d, idx)| Ok((d, self.energy_of(idx)?)))
            .collect()
    }

    /// `Σ_{⟨u,a⟩ = 0} |f̂(a)|²`
    pub fn uperp_sum(&self, u: &[u64]) -> Result<Q> {
        self.energy_of(orthogonal_indices(&self.ctx, u))
    }

    /// `x ↦ Σ_{a : keep(a)} e(-⟨x,a⟩) f̂(a)`; `NotRational` unless every value is rational.
    pub fn restricted_inverse(&self, keep: impl Fn(&[u64]) -> bool) -> Result<Density<Q>> {
        let lane = CyclotomicLane::new(self.ctx.modulus());
        let masked: Vec<Vec<i128>> = (0..self.numerators.len())
            .map(|i| {
                if keep(&self.ctx.coords(i)) {
                    self.numerators[i].clone()
                } else {
                    lane.zero()
                }
            })
            .collect();
        let raw = dft(&self.ctx, &lane, masked, true);
        let values = raw
            .iter()
            .map(|e| Ok(Q::from_integer(cyclotomic::to_rational(e, &self.phi)?) * self.scale))
            .collect::<Result<Vec<Q>>>()?;
        Density::new(self.ctx.clone(), values)
    }

    pub fn inverse(&self) -> Result<Density<Q>> {
        self.restricted_inverse(|_| true)
    }

    /// Whether two spectra name the same complex coefficients.
    pub fn equals(&self, other: &ExactSpectrum) -> bool {
        if self.ctx != other.ctx {
            return false;
        }
        // compare s1·A - s2·B = 0 with s = p/q: clear denominators
        let (p1, q1) = (*self.scale.numer(), *self.scale.denom());
        let (p2, q2) = (*other.scale.numer(), *other.scale.denom());
        self.numerators.iter().zip(&other.numerators).all(|(a, b)| {
            let diff: Vec<i128> = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| x * p1 * q2 - y * p2 * q1)
                .collect();
            cyclotomic::is_zero(&diff, &self.phi)
        })
    }
}

impl Spectrum {
    pub fn new(ctx: RingContext, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != ctx.num_points() {
            return Err(Error::DimensionMismatch {
                expected: ctx.num_points(),
                got: coeffs.len(),
            });
        }
        Ok(Self { ctx, coeffs })
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn energy_of<I: IntoIterator<Item = usize>>(&self, indices: I) -> f64 {
        indices.into_iter().map(|i| self.coeffs[i].norm_sqr()).sum()
    }

    pub fn plancherel_sum(&self) -> f64 {
        self.energy_of(0..self.coeffs.len())
    }

    pub fn energies_by_valuation(&self) -> Vec<(u64, f64)> {
        valuation_classes(&self.ctx)
            .into_iter()
            .map(|(d, idx)| (d, self.energy_of(idx)))
            .collect()
    }

    pub fn uperp_sum(&self, u: &[u64]) -> f64 {
        self.energy_of(orthogonal_indices(&self.ctx, u))
    }

    /// Complex values of `x ↦ Σ_{a : keep(a)} e(-⟨x,a⟩) f̂(a)`.
    pub fn restricted_inverse(&self, keep: impl Fn(&[u64]) -> bool) -> Vec<Complex64> {
        let lane = ComplexLane::new(self.ctx.modulus());
        let masked: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if keep(&self.ctx.coords(i)) { c } else { lane.zero() })
            .collect();
        dft(&self.ctx, &lane, masked, true)
    }

    pub fn inverse(&self) -> Vec<Complex64> {
        self.restricted_inverse(|_| true)
    }

    /// Real part of the inverse transform as a density.
    pub fn inverse_real(&self) -> Density<f64> {
        let values = self.inverse().into_iter().map(|c| c.re).collect();
        Density::new(self.ctx.clone(), values).expect("length preserved")
    }
}

/// Dual indices grouped by valuation, ascending in the valuation.
pub fn valuation_classes(ctx: &RingContext) -> Vec<(u64, Vec<usize>)> {
    let mut map: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
    let mut a = vec![0u64; ctx.dim()];
    let mut i = 0;
    loop {
        map.entry(ctx.valuation(&a)).or_default().push(i);
        i += 1;
        if !ctx.next_point(&mut a) {
            break;
        }
    }
    map.into_iter().collect()
}

/// Indices of the duals `a` with `⟨u, a⟩ = 0`.
pub fn orthogonal_indices(ctx: &RingContext, u: &[u64]) -> Vec<usize> {
    let mut a = vec![0u64; ctx.dim()];
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        if ctx.dot(u, &a) == 0 {
            out.push(i);
        }
        i += 1;
        if !ctx.next_point(&mut a) {
            break;
        }
    }
    out
}
