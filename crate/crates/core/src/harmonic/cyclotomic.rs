//! Integer group algebra `Z[x]/(x^N - 1)` and reduction to `Z[ζ_N]`.
//!
//! An element `Σ c_k x^k` stands for `Σ c_k ζ^k` with `ζ = e(1/N)`. Two elements
//! name the same complex number iff their difference vanishes modulo `Φ_N`.

use crate::error::{Error, Result};
use crate::ring::divisors;
use crate::scalar::Q;

/// Coefficients of the `N`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i128> {
    let n_us = n as usize;
    // x^N - 1
    let mut num = vec![0i128; n_us + 1];
    num[0] = -1;
    num[n_us] = 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        num = divide_exact(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn divide_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i128; num.len() - dn];
    for k in (dn..num.len()).rev() {
        let c = rem[k];
        if c == 0 {
            continue;
        }
        quot[k - dn] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k - dn + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Remainder of `elem` modulo the monic polynomial `phi`; length `deg phi`.
pub fn reduce(elem: &[i128], phi: &[i128]) -> Vec<i128> {
    let deg = phi.len() - 1;
    let mut r = elem.to_vec();
    if r.len() <= deg {
        r.resize(deg, 0);
        return r;
    }
    for k in (deg..r.len()).rev() {
        let c = r[k];
        if c == 0 {
            continue;
        }
        for (i, &p) in phi.iter().enumerate() {
            r[k - deg + i] -= c * p;
        }
    }
    r.truncate(deg);
    r
}

/// The rational number named by `elem`, or `NotRational` if it is not one.
pub fn to_rational(elem: &[i128], phi: &[i128]) -> Result<i128> {
    let r = reduce(elem, phi);
    if r.iter().skip(1).any(|&c| c != 0) {
        return Err(Error::NotRational);
    }
    Ok(r.first().copied().unwrap_or(0))
}

pub fn is_zero(elem: &[i128], phi: &[i128]) -> bool {
    reduce(elem, phi).iter().all(|&c| c == 0)
}

/// `acc += x^k · e` in `Z[x]/(x^N - 1)`.
pub fn accumulate_rotated(acc: &mut [i128], e: &[i128], k: u64) {
    let n = acc.len();
    let k = k as usize % n;
    for (i, &c) in e.iter().enumerate() {
        if c != 0 {
            let j = if i + k >= n { i + k - n } else { i + k };
            acc[j] += c;
        }
    }
}

/// `e · conj(e)`: the squared modulus as a group-algebra element.
pub fn norm_squared(e: &[i128]) -> Vec<i128> {
    let n = e.len();
    let mut out = vec![0i128; n];
    for (i, &a) in e.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in e.iter().enumerate() {
            if b != 0 {
                out[(i + n - j) % n] += a * b;
            }
        }
    }
    out
}

/// Numerical value of `scale · Σ c_k ζ^k`.
pub fn evaluate(elem: &[i128], scale: &Q) -> num_complex::Complex64 {
    let n = elem.len() as f64;
    let s = crate::scalar::Scalar::to_f64(scale);
    elem.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| num_complex::Complex64::from_polar(c as f64 * s, std::f64::consts::TAU * k as f64 / n))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(9), vec![1, 0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn degree_is_totient() {
        for n in 1..=40u64 {
            let phi = (1..=n).filter(|&k| crate::ring::gcd(k, n) == 1).count();
            assert_eq!(cyclotomic_polynomial(n).len() - 1, phi, "N = {n}");
        }
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for n in 2..=12u64 {
            let phi = cyclotomic_polynomial(n);
            assert!(is_zero(&vec![1; n as usize], &phi));
        }
    }

    #[test]
    fn norm_of_root_is_one() {
        let phi = cyclotomic_polynomial(12);
        let mut e = vec![0i128; 12];
        e[5] = 3;
        assert_eq!(to_rational(&norm_squared(&e), &phi).unwrap(), 9);
        // 1 + ζ is not real for N = 12
        e[0] = 1;
        e[5] = 0;
        e[1] = 1;
        assert!(to_rational(&e, &phi).is_err());
    }

    #[test]
    fn reduction_agrees_with_evaluation() {
        let phi = cyclotomic_polynomial(10);
        let e: Vec<i128> = (0..10).map(|k| (k * k % 7) as i128 - 3).collect();
        let r = reduce(&e, &phi);
        let mut padded = r.clone();
        padded.resize(10, 0);
        let one = Q::from_integer(1);
        assert!((evaluate(&e, &one) - evaluate(&padded, &one)).norm() < 1e-9);
    }
}
