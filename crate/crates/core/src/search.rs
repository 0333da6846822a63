//! Small sets containing a translate of every `k`-flat.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::Value;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_grassmannian, Flat, FlatQuotient};
use crate::parallel::map_range;
use crate::ring::{is_prime, RingContext};
use crate::scalar::{render_q, Q};

type Bits = Vec<u64>;

fn words(len: usize) -> usize {
    len.div_ceil(64)
}

fn set_bit(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn has_bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn new_points(t: &Bits, s: &Bits) -> usize {
    t.iter().zip(s).map(|(a, b)| (a & !b).count_ones() as usize).sum()
}

fn union_into(s: &mut Bits, t: &Bits) {
    for (a, b) in s.iter_mut().zip(t) {
        *a |= b;
    }
}

fn count(s: &Bits) -> usize {
    s.iter().map(|w| w.count_ones() as usize).sum()
}

/// A flat and the shift `a` with `a + U ⊆ S`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatWitness {
    pub flat: Flat,
    pub shift: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KakeyaCertificate {
    pub modulus: u64,
    pub dim: usize,
    pub k: usize,
    pub size: usize,
    /// `|S| / N^n` as `p/q`.
    pub measure: String,
    /// `Some(true)` for a proven minimum, `Some(false)` when a search budget ran out.
    pub optimal: Option<bool>,
    pub points: Vec<Vec<u64>>,
    pub witnesses: Vec<FlatWitness>,
}

impl KakeyaCertificate {
    pub fn measure_q(&self) -> Q {
        Q::new(self.size as i128, (self.modulus as i128).pow(self.dim as u32))
    }

    pub fn indicator(&self, ctx: &RingContext) -> Density<Q> {
        Density::indicator(ctx, &self.points)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

/// Reads the point set of a certificate JSON as an indicator density.
pub fn indicator_from_certificate(ctx: &RingContext, value: &Value) -> Result<Density<Q>> {
    let points = value
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("certificate has no `points` array".into()))?;
    let mut pts = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let coords: Option<Vec<u64>> = p
            .as_array()
            .and_then(|c| c.iter().map(Value::as_u64).collect::<Option<Vec<u64>>>());
        match coords {
            Some(c) if c.len() == ctx.dim() && c.iter().all(|&x| x < ctx.modulus()) => pts.push(c),
            _ => return Err(Error::Parse(format!("certificate point {i} is not in (Z/{}Z)^{}", ctx.modulus(), ctx.dim()))),
        }
    }
    Ok(Density::indicator(ctx, &pts))
}

/// `N^n / 2^{n-1}` for prime `N`: the lower bound on sets containing a line in every direction.
pub fn prime_line_lower_bound(modulus: u64, n: usize) -> Option<Q> {
    is_prime(modulus).then(|| Q::new((modulus as i128).pow(n as u32), 1i128 << (n - 1)))
}

/// Translates of every flat as bitsets over `(Z/NZ)^n`.
struct Layout {
    ctx: RingContext,
    k: usize,
    flats: Vec<Flat>,
    translates: Vec<Vec<Bits>>,
    /// Least point index of each translate.
    anchors: Vec<Vec<usize>>,
}

impl Layout {
    fn new(ctx: &RingContext, k: usize) -> Result<Self> {
        let flats = enumerate_grassmannian(ctx, k)?;
        let total = ctx.num_points();
        let per_flat: Vec<(Vec<Bits>, Vec<usize>)> = crate::parallel::map_slice(&flats, |u| {
            let labels = FlatQuotient::new(ctx, u).labels();
            let classes = total / (ctx.modulus() as usize).pow(k as u32);
            let mut ts = vec![vec![0u64; words(total)]; classes];
            let mut anchors = vec![usize::MAX; classes];
            for (i, &l) in labels.iter().enumerate() {
                set_bit(&mut ts[l], i);
                anchors[l] = anchors[l].min(i);
            }
            (ts, anchors)
        });
        let (translates, anchors) = per_flat.into_iter().unzip();
        Ok(Self {
            ctx: ctx.clone(),
            k,
            flats,
            translates,
            anchors,
        })
    }

    fn empty(&self) -> Bits {
        vec![0; words(self.ctx.num_points())]
    }

    /// Cheapest translate of flat `j` given `s`; ties go to the least anchor.
    fn cheapest(&self, j: usize, s: &Bits) -> (usize, usize) {
        self.translates[j]
            .iter()
            .enumerate()
            .map(|(l, t)| (new_points(t, s), self.anchors[j][l], l))
            .min()
            .map(|(c, _, l)| (c, l))
            .expect("every flat has a translate")
    }

    fn certificate(&self, s: &Bits, choices: &[usize], optimal: Option<bool>) -> KakeyaCertificate {
        let ctx = &self.ctx;
        let points: Vec<Vec<u64>> = (0..ctx.num_points())
            .filter(|&i| has_bit(s, i))
            .map(|i| ctx.coords(i))
            .collect();
        let witnesses = self
            .flats
            .iter()
            .zip(choices)
            .enumerate()
            .map(|(j, (u, &l))| FlatWitness {
                flat: u.clone(),
                shift: ctx.coords(self.anchors[j][l]),
            })
            .collect();
        let size = points.len();
        KakeyaCertificate {
            modulus: ctx.modulus(),
            dim: ctx.dim(),
            k: self.k,
            size,
            measure: render_q(&Q::new(size as i128, ctx.num_points() as i128)),
            optimal,
            points,
            witnesses,
        }
    }
}

/// Greedy cover: repeatedly take the flat whose cheapest translate adds the fewest
/// new points (ties: enumeration order, then least translate), and add that translate.
pub fn greedy_kakeya(ctx: &RingContext, k: usize) -> Result<KakeyaCertificate> {
    let layout = Layout::new(ctx, k)?;
    let (s, choices) = greedy_cover(&layout);
    Ok(layout.certificate(&s, &choices, None))
}

fn greedy_cover(layout: &Layout) -> (Bits, Vec<usize>) {
    let d = layout.flats.len();
    let mut s = layout.empty();
    let mut choices = vec![usize::MAX; d];
    for _ in 0..d {
        let (_, j, l) = (0..d)
            .filter(|&j| choices[j] == usize::MAX)
            .map(|j| {
                let (c, l) = layout.cheapest(j, &s);
                (c, j, l)
            })
            .min()
            .expect("a flat remains");
        union_into(&mut s, &layout.translates[j][l]);
        choices[j] = l;
    }
    (s, choices)
}

/// Branch and bound over one translate per flat.
///
/// The first flat is pinned to its translate through the origin (the problem is
/// translation invariant). At each node every flat with an already covered translate
/// takes it, then the flat with the most expensive cheapest translate is branched on;
/// that cost is also an admissible lower bound on the remaining growth.
/// `budget` caps the number of nodes; on exhaustion the best set found is returned
/// with `optimal = Some(false)`.
pub fn exact_min_kakeya(ctx: &RingContext, k: usize, budget: u64) -> Result<KakeyaCertificate> {
    let layout = Layout::new(ctx, k)?;
    let (greedy_s, greedy_choices) = greedy_cover(&layout);
    if layout.flats.len() == 1 {
        let l = layout.cheapest(0, &layout.empty()).1;
        let mut s = layout.empty();
        union_into(&mut s, &layout.translates[0][l]);
        return Ok(layout.certificate(&s, &[l], Some(true)));
    }
    let search = Search {
        layout: &layout,
        best: AtomicUsize::new(count(&greedy_s)),
        incumbent: Mutex::new((count(&greedy_s), greedy_choices)),
        nodes: AtomicU64::new(0),
        budget,
        exhausted: AtomicBool::new(false),
    };
    let (root_s, root_choices) = search.root();
    // split on the first branching flat so root branches run in parallel
    let (s, choices, size) = search.propagate(root_s, root_choices);
    let j = search.branch_flat(&s, &choices);
    if j == usize::MAX {
        search.offer(size, choices);
    } else {
        let mut branches: Vec<(usize, usize)> = layout.translates[j]
            .iter()
            .enumerate()
            .map(|(l, t)| (new_points(t, &s), l))
            .collect();
        branches.sort();
        map_range(branches.len(), |bi| {
            let l = branches[bi].1;
            let mut s2 = s.clone();
            union_into(&mut s2, &layout.translates[j][l]);
            let mut ch = choices.clone();
            ch[j] = l;
            search.dfs(s2, ch);
        });
    }
    let optimal = !search.exhausted.load(Ordering::SeqCst);
    let best = search.best.load(Ordering::SeqCst);
    if optimal {
        // the minimum is known; recover the first minimiser in a fixed order
        if let Some(choices) = search.first_with_size(best) {
            let s = layout_union(&layout, &choices);
            return Ok(layout.certificate(&s, &choices, Some(true)));
        }
    }
    let (_, choices) = search.incumbent.into_inner().expect("no poisoned lock");
    let s = layout_union(&layout, &choices);
    Ok(layout.certificate(&s, &choices, Some(optimal)))
}

fn layout_union(layout: &Layout, choices: &[usize]) -> Bits {
    let mut s = layout.empty();
    for (j, &l) in choices.iter().enumerate() {
        union_into(&mut s, &layout.translates[j][l]);
    }
    s
}

struct Search<'a> {
    layout: &'a Layout,
    best: AtomicUsize,
    incumbent: Mutex<(usize, Vec<usize>)>,
    nodes: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
}

impl Search<'_> {
    fn root(&self) -> (Bits, Vec<usize>) {
        let mut choices = vec![usize::MAX; self.layout.flats.len()];
        let l = self.layout.anchors[0]
            .iter()
            .position(|&a| a == 0)
            .expect("a translate contains the origin");
        choices[0] = l;
        let mut s = self.layout.empty();
        union_into(&mut s, &self.layout.translates[0][l]);
        (s, choices)
    }

    /// Assigns every open flat that has a covered translate. Returns the set size.
    fn propagate(&self, s: Bits, mut choices: Vec<usize>) -> (Bits, Vec<usize>, usize) {
        for (j, choice) in choices.iter_mut().enumerate() {
            if *choice == usize::MAX {
                let (c, l) = self.layout.cheapest(j, &s);
                if c == 0 {
                    *choice = l;
                }
            }
        }
        let size = count(&s);
        (s, choices, size)
    }

    /// Open flat with the largest cheapest-translate cost, or `usize::MAX` if none.
    fn branch_flat(&self, s: &Bits, choices: &[usize]) -> usize {
        self.bound(s, choices).1
    }

    fn bound(&self, s: &Bits, choices: &[usize]) -> (usize, usize) {
        let mut best = (0, usize::MAX);
        for (j, &c) in choices.iter().enumerate() {
            if c == usize::MAX {
                let cost = self.layout.cheapest(j, s).0;
                if best.1 == usize::MAX || cost > best.0 {
                    best = (cost, j);
                }
            }
        }
        best
    }

    fn dfs(&self, s: Bits, choices: Vec<usize>) {
        if self.exhausted.load(Ordering::Relaxed) {
            return;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return;
        }
        let (s, choices, size) = self.propagate(s, choices);
        let (lb, j) = self.bound(&s, &choices);
        if j == usize::MAX {
            self.offer(size, choices);
            return;
        }
        if size + lb >= self.best.load(Ordering::Relaxed) {
            return;
        }
        let mut branches: Vec<(usize, usize)> = self.layout.translates[j]
            .iter()
            .enumerate()
            .map(|(l, t)| (new_points(t, &s), l))
            .collect();
        branches.sort();
        for (c, l) in branches {
            if size + c >= self.best.load(Ordering::Relaxed) {
                break;
            }
            let mut s2 = s.clone();
            union_into(&mut s2, &self.layout.translates[j][l]);
            let mut ch = choices.clone();
            ch[j] = l;
            self.dfs(s2, ch);
        }
    }

    fn offer(&self, size: usize, choices: Vec<usize>) {
        let mut inc = self.incumbent.lock().expect("no poisoned lock");
        if size < inc.0 {
            *inc = (size, choices);
            self.best.fetch_min(size, Ordering::SeqCst);
        }
    }

    /// Sequential search for the first cover of exactly `target` points.
    fn first_with_size(&self, target: usize) -> Option<Vec<usize>> {
        let (s, choices) = self.root();
        self.first_dfs(s, choices, target)
    }

    fn first_dfs(&self, s: Bits, choices: Vec<usize>, target: usize) -> Option<Vec<usize>> {
        let (s, choices, size) = self.propagate(s, choices);
        let (lb, j) = self.bound(&s, &choices);
        if j == usize::MAX {
            return (size == target).then_some(choices);
        }
        if size + lb > target {
            return None;
        }
        let mut branches: Vec<(usize, usize)> = self.layout.translates[j]
            .iter()
            .enumerate()
            .map(|(l, t)| (new_points(t, &s), l))
            .collect();
        branches.sort();
        for (c, l) in branches {
            if size + c > target {
                break;
            }
            let mut s2 = s.clone();
            union_into(&mut s2, &self.layout.translates[j][l]);
            let mut ch = choices.clone();
            ch[j] = l;
            if let Some(found) = self.first_dfs(s2, ch, target) {
                return Some(found);
            }
        }
        None
    }
}

/// Checks that `points` contains a translate of every `k`-flat. On failure returns
/// the first uncovered flat in enumeration order.
pub fn certify(ctx: &RingContext, points: &[Vec<u64>], k: usize) -> Result<std::result::Result<KakeyaCertificate, Flat>> {
    let layout = Layout::new(ctx, k)?;
    let mut s = layout.empty();
    for x in points {
        if x.len() != ctx.dim() {
            return Err(Error::DimensionMismatch {
                expected: ctx.dim(),
                got: x.len(),
            });
        }
        let x: Vec<u64> = x.iter().map(|&c| c % ctx.modulus()).collect();
        set_bit(&mut s, ctx.index(&x));
    }
    let mut choices = Vec::with_capacity(layout.flats.len());
    for j in 0..layout.flats.len() {
        match layout.cheapest(j, &s) {
            (0, l) => choices.push(l),
            _ => return Ok(Err(layout.flats[j].clone())),
        }
    }
    Ok(Ok(layout.certificate(&s, &choices, None)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gr_size;

    /// Minimum size by trying every assignment of translates.
    fn brute_force_min(ctx: &RingContext, k: usize) -> usize {
        let layout = Layout::new(ctx, k).unwrap();
        let d = layout.flats.len();
        let t = layout.translates[0].len();
        let mut best = usize::MAX;
        let mut idx = vec![0usize; d];
        loop {
            let s = layout_union(&layout, &idx);
            best = best.min(count(&s));
            let mut i = 0;
            while i < d {
                idx[i] += 1;
                if idx[i] < t {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == d {
                return best;
            }
        }
    }

    fn valid(ctx: &RingContext, cert: &KakeyaCertificate) -> bool {
        cert.witnesses.iter().all(|w| {
            w.flat
                .translate(ctx, &w.shift)
                .points(ctx)
                .iter()
                .all(|x| cert.points.contains(x))
        })
    }

    #[test]
    fn whole_space_when_k_is_n() {
        let ctx = RingContext::plain(3, 2).unwrap();
        assert_eq!(greedy_kakeya(&ctx, 2).unwrap().size, 9);
        let exact = exact_min_kakeya(&ctx, 2, 1000).unwrap();
        assert_eq!((exact.size, exact.optimal), (9, Some(true)));
    }

    #[test]
    fn exact_matches_brute_force() {
        for (n, dim, k) in [(2u64, 2usize, 1usize), (3, 2, 1), (2, 3, 2), (2, 3, 1), (4, 2, 1)] {
            let ctx = RingContext::plain(n, dim).unwrap();
            let cert = exact_min_kakeya(&ctx, k, 10_000_000).unwrap();
            assert_eq!(cert.optimal, Some(true));
            assert_eq!(cert.size, brute_force_min(&ctx, k), "N={n} n={dim} k={k}");
            assert!(valid(&ctx, &cert));
        }
    }

    #[test]
    fn frozen_minima() {
        for (n, dim, k, want) in [(2u64, 2usize, 1usize, 3usize), (3, 2, 1, 7), (2, 3, 2, 7), (3, 3, 2, 25), (5, 2, 1, 17), (2, 3, 1, 5)] {
            let ctx = RingContext::plain(n, dim).unwrap();
            let cert = exact_min_kakeya(&ctx, k, 50_000_000).unwrap();
            assert_eq!((cert.size, cert.optimal), (want, Some(true)), "N={n} n={dim} k={k}");
        }
    }

    #[test]
    fn greedy_is_valid_and_not_below_minimum() {
        for (n, dim, k) in [(2u64, 2usize, 1usize), (3, 2, 1), (2, 3, 2), (3, 3, 2), (5, 2, 1), (4, 3, 2), (6, 2, 1)] {
            let ctx = RingContext::plain(n, dim).unwrap();
            let g = greedy_kakeya(&ctx, k).unwrap();
            assert!(valid(&ctx, &g));
            assert_eq!(g.witnesses.len() as u128, gr_size(n, dim, k));
            assert!(certify(&ctx, &g.points, k).unwrap().is_ok());
            if let Some(lb) = prime_line_lower_bound(n, dim).filter(|_| k == 1) {
                assert!(Q::from_integer(g.size as i128) >= lb);
            }
        }
        let ctx = RingContext::plain(2, 2).unwrap();
        let g = greedy_kakeya(&ctx, 1).unwrap();
        assert!((2..=4).contains(&g.size));
        let ctx = RingContext::plain(3, 2).unwrap();
        assert!(greedy_kakeya(&ctx, 1).unwrap().size >= 5);
    }

    #[test]
    fn certify_whole_space_and_single_line() {
        let ctx = RingContext::plain(3, 2).unwrap();
        let all: Vec<Vec<u64>> = (0..9).map(|i| ctx.coords(i)).collect();
        let cert = certify(&ctx, &all, 1).unwrap().unwrap();
        assert!(cert.witnesses.iter().all(|w| w.shift == vec![0, 0]));
        let line: Vec<Vec<u64>> = (0..3).map(|t| vec![t, 0]).collect();
        let missing = certify(&ctx, &line, 1).unwrap().unwrap_err();
        assert_ne!(missing, Flat::new(&ctx, vec![vec![1, 0]]).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let ctx = RingContext::plain(5, 2).unwrap();
        let cert = exact_min_kakeya(&ctx, 1, 3).unwrap();
        assert_eq!(cert.optimal, Some(false));
        assert!(valid(&ctx, &cert));
    }

    #[test]
    fn certificate_json_round_trips_to_indicator() {
        let ctx = RingContext::plain(3, 2).unwrap();
        let g = greedy_kakeya(&ctx, 1).unwrap();
        let f = indicator_from_certificate(&ctx, &g.to_json()).unwrap();
        assert_eq!(f, g.indicator(&ctx));
        assert!(indicator_from_certificate(&ctx, &serde_json::json!({"points": [[5, 0]]})).is_err());
    }
}
