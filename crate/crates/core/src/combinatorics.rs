//! Subset enumeration and exact binomials.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for t in i + 1..k {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

/// 0-based lexicographic rank of a sorted `k`-subset of `0..n`.
pub fn subset_rank(n: usize, set: &[usize]) -> usize {
    let k = set.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &x) in set.iter().enumerate() {
        for v in prev..x {
            rank += binom(n - v - 1, k - i - 1) as usize;
        }
        prev = x + 1;
    }
    rank
}

/// `C(n, k)` in `u64`; panics on overflow.
pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        let num = (n - i) as u64;
        let den = (i + 1) as u64;
        let g = acc.gcd(&den);
        acc = (acc / g)
            .checked_mul(num / (den / g))
            .expect("binomial overflows u64");
    }
    acc
}

/// Exact `C(n, k)` by the multiplicative formula with running reduction.
pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        let mut num = n - i;
        let mut den = i + 1;
        let g = num.gcd(&den);
        num /= g;
        den /= g;
        // `acc * num` is divisible by `den` and gcd(num, den) = 1, so den | acc.
        acc = (acc / den) * num;
    }
    acc
}

/// `log2(x)` for a positive big integer, exact to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}
