//! Helpers shared by the integration tests. Everything here is computed
//! without the library so it can serve as an independent check.
#![allow(dead_code)]

use steenq::PrimePower;

pub fn ctx(p: u32, e: u32) -> PrimePower {
    PrimePower::new(p, e).expect("valid prime power")
}

pub const CONTEXTS: [(u32, u32); 3] = [(2, 1), (3, 1), (2, 2)];

/// Pascal's triangle mod p, built by addition only.
pub struct Pascal {
    p: u64,
    rows: Vec<Vec<u64>>,
}

impl Pascal {
    pub fn new(p: u32, n: usize) -> Self {
        let p = p as u64;
        let mut rows: Vec<Vec<u64>> = vec![vec![1]];
        for i in 1..=n {
            let prev = &rows[i - 1];
            let mut row = vec![1u64; i + 1];
            for j in 1..i {
                row[j] = (prev[j - 1] + prev[j]) % p;
            }
            rows.push(row);
        }
        Pascal { p, rows }
    }

    pub fn binom(&self, a: u64, b: u64) -> u64 {
        if b > a {
            0
        } else {
            self.rows[a as usize][b as usize] % self.p
        }
    }
}

/// (q^i - 1)/(q - 1) for i = 1, 2, ... up to `bound`.
pub fn xi_weights(q: u64, bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut w = 1u64;
    while w <= bound {
        out.push(w);
        w = w * q + 1;
    }
    out
}

/// Number of sequences R with Σ r_i (q^i - 1)/(q - 1) = d, for every d ≤ bound.
pub fn partition_counts(q: u64, bound: u64) -> Vec<u64> {
    let mut c = vec![0u64; bound as usize + 1];
    c[0] = 1;
    for w in xi_weights(q, bound) {
        for d in w as usize..=bound as usize {
            c[d] += c[d - w as usize];
        }
    }
    c
}

/// Base-p digit sum.
pub fn digit_sum(mut a: u64, p: u64) -> u64 {
    let mut s = 0;
    while a > 0 {
        s += a % p;
        a /= p;
    }
    s
}
