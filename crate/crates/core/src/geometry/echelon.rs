//! Row reduction over the local ring `Z/p^e Z`.
//!
//! A `k x n` matrix spans an element of the Grassmannian iff greedy pivoting
//! finds `k` columns with a unit entry. The resulting form (pivot columns equal
//! to the identity, entries left of a row's pivot divisible by `p`) depends only
//! on the submodule, which makes it a canonical representative.

use crate::ring::mod_inverse;

/// Canonical echelon data of one CRT component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentForm {
    pub p: u64,
    pub q: u64,
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<u64>>,
}

impl ComponentForm {
    pub fn non_pivots(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Reduces `x` (mod q) to the representative of `x + span` with zeros at the pivots.
    pub fn reduce(&self, x: &mut [u64]) {
        let q = self.q as u128;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let factor = x[piv] as u128;
            if factor == 0 {
                continue;
            }
            for (xc, &rc) in x.iter_mut().zip(row) {
                let sub = (factor * rc as u128) % q;
                *xc = ((*xc as u128 + q - sub) % q) as u64;
            }
        }
    }
}

/// Greedy row reduction modulo `q = p^e`. Returns pivot columns, or `None` if
/// the rows do not contain a unit `k x k` minor modulo `p`.
pub fn echelonize(rows: &mut [Vec<u64>], p: u64, q: u64) -> Option<Vec<usize>> {
    let k = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let q128 = q as u128;
    for row in rows.iter_mut() {
        for c in row.iter_mut() {
            *c %= q;
        }
    }
    let mut pivots = Vec::with_capacity(k);
    for col in 0..n {
        let next = pivots.len();
        if next == k {
            break;
        }
        let Some(r) = (next..k).find(|&r| !rows[r][col].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(r, next);
        let inv = mod_inverse(rows[next][col], q).expect("unit entry");
        for c in rows[next].iter_mut() {
            *c = ((*c as u128 * inv as u128) % q128) as u64;
        }
        let pivot_row = rows[next].clone();
        for (r2, row) in rows.iter_mut().enumerate() {
            if r2 == next {
                continue;
            }
            let factor = row[col] as u128;
            if factor == 0 {
                continue;
            }
            for (c, &pc) in row.iter_mut().zip(&pivot_row) {
                let sub = (factor * pc as u128) % q128;
                *c = ((*c as u128 + q128 - sub) % q128) as u64;
            }
        }
        pivots.push(col);
    }
    (pivots.len() == k).then_some(pivots)
}

/// All canonical forms of rank-`k` free summands of `(Z/qZ)^n`, in a fixed order:
/// pivot sets lexicographically, then free entries as an odometer.
pub fn enumerate_component(p: u64, q: u64, n: usize, k: usize) -> Vec<ComponentForm> {
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        // (row, col, step) for every free slot; step p for slots left of the pivot
        let slots: Vec<(usize, usize, u64)> = (0..k)
            .flat_map(|r| {
                let pivots = &pivots;
                (0..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c, if c < pivots[r] { p } else { 1 }))
            })
            .collect();
        let mut counters = vec![0u64; slots.len()];
        loop {
            let mut rows = vec![vec![0u64; n]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for (&(r, c, step), &v) in slots.iter().zip(&counters) {
                rows[r][c] = v * step;
            }
            out.push(ComponentForm {
                p,
                q,
                pivots: pivots.clone(),
                rows,
            });
            // odometer, last slot fastest
            let mut advanced = false;
            for (i, &(_, _, step)) in slots.iter().enumerate().rev() {
                counters[i] += 1;
                if counters[i] * step < q {
                    advanced = true;
                    break;
                }
                counters[i] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_line_mod_4() {
        let forms = enumerate_component(2, 4, 2, 1);
        let reps: Vec<Vec<u64>> = forms.iter().map(|f| f.rows[0].clone()).collect();
        assert_eq!(
            reps,
            vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![1, 3], vec![0, 1], vec![2, 1]]
        );
    }

    #[test]
    fn enumerated_forms_are_fixed_points() {
        for (p, q, n, k) in [(2, 4, 3, 2), (3, 9, 3, 1), (2, 8, 3, 2), (5, 5, 4, 2)] {
            for form in enumerate_component(p, q, n, k) {
                let mut rows = form.rows.clone();
                let pivots = echelonize(&mut rows, p, q).unwrap();
                assert_eq!(pivots, form.pivots);
                assert_eq!(rows, form.rows);
            }
        }
    }

    #[test]
    fn rank_deficient_rejected() {
        let mut rows = vec![vec![2, 0], vec![0, 2]];
        assert!(echelonize(&mut rows, 2, 4).is_none());
        let mut rows = vec![vec![1, 1, 0], vec![2, 2, 0]];
        assert!(echelonize(&mut rows, 3, 3).is_none());
    }

    #[test]
    fn unit_scalar_multiples_canonicalize_identically() {
        let mut a = vec![vec![3, 6]];
        assert!(echelonize(&mut a, 3, 9).is_none());
        let mut b = vec![vec![1, 2]];
        let mut c = vec![vec![2, 4]];
        echelonize(&mut b, 3, 9).unwrap();
        echelonize(&mut c, 3, 9).unwrap();
        assert_eq!(b, c);
    }
}
