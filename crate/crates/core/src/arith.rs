//! Base-p combinatorics and exact linear algebra over F_p.
//!
//! Every structure constant in this crate lies in the prime field, so scalars
//! are plain `u32` values reduced mod p. The field operations live on
//! [`PrimePower`], which every algebraic object carries around as its context.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An element of F_p, always stored reduced into `0..p`.
pub type FpScalar = u32;

const MAX_PRIME: u32 = 1 << 15;
const MAX_Q: u64 = 1 << 40;

/// A prime power q = p^e, the context of every element of A_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimePower {
    p: u32,
    e: u32,
    q: u64,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimePower {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= MAX_PRIME {
            return Err(Error::InvalidPrimePower {
                p,
                e,
                reason: "prime too large",
            });
        }
        if e == 0 {
            return Err(Error::InvalidPrimePower {
                p,
                e,
                reason: "exponent must be at least 1",
            });
        }
        let mut q = 1u64;
        for _ in 0..e {
            q = q.saturating_mul(p as u64);
            if q > MAX_Q {
                return Err(Error::InvalidPrimePower {
                    p,
                    e,
                    reason: "q too large",
                });
            }
        }
        Ok(PrimePower { p, e, q })
    }

    /// The prime field case q = p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> FpScalar {
        (x % self.p as u64) as FpScalar
    }

    /// Reduces a signed integer into `0..p`.
    #[inline]
    pub fn reduce_signed(&self, x: i64) -> FpScalar {
        x.rem_euclid(self.p as i64) as FpScalar
    }

    #[inline]
    pub fn add(&self, a: FpScalar, b: FpScalar) -> FpScalar {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: FpScalar, b: FpScalar) -> FpScalar {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: FpScalar) -> FpScalar {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: FpScalar, b: FpScalar) -> FpScalar {
        ((a as u64 * b as u64) % self.p as u64) as FpScalar
    }

    pub fn pow(&self, mut base: FpScalar, mut exp: u64) -> FpScalar {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero scalar.
    ///
    /// Panics on zero.
    pub fn inv(&self, a: FpScalar) -> FpScalar {
        assert!(a % self.p != 0, "zero has no inverse in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// `(-1)^k` as a field element.
    #[inline]
    pub fn sign(&self, k: u64) -> FpScalar {
        if k % 2 == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }

    pub fn binom(&self, a: u64, b: u64) -> FpScalar {
        binom_mod_p(a, b, self.p)
    }

    /// Degree (q^t - 1)/(q - 1) of the Milnor generator dual to xi_t.
    pub fn xi_degree(&self, t: usize) -> u64 {
        let mut d = 0u64;
        let mut pw = 1u64;
        for _ in 0..t {
            d += pw;
            pw = pw.saturating_mul(self.q);
        }
        d
    }

    /// Factor (q-1)/(p-1) relating the reduced grading of A_q to the grading
    /// of its copy inside A_p.
    pub fn grading_scale(&self) -> u64 {
        (self.q - 1) / (self.p as u64 - 1)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "q={}", self.p)
        } else {
            write!(f, "q={}^{}={}", self.p, self.e, self.q)
        }
    }
}

/// Base-p digits of `a`, least significant first. Zero has no digits.
pub fn digits(mut a: u64, p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut out = Vec::new();
    while a > 0 {
        out.push((a % p) as u32);
        a /= p;
    }
    out
}

/// Sum of the base-p digits of `a`.
pub fn alpha(mut a: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut s = 0u32;
    while a > 0 {
        s += (a % p) as u32;
        a /= p;
    }
    s
}

/// The multiset of powers of p making up `a`, in increasing order, each power
/// repeated as many times as its digit.
pub fn pin(a: u64, p: u32) -> Vec<u64> {
    let mut out = Vec::new();
    let mut pw = 1u64;
    for d in digits(a, p) {
        for _ in 0..d {
            out.push(pw);
        }
        pw = pw.saturating_mul(p as u64);
    }
    out
}

fn small_binom(n: u32, k: u32, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let p64 = p as u64;
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k as u64 {
        num = num * ((n as u64 - i) % p64) % p64;
        den = den * ((i + 1) % p64) % p64;
    }
    // den is a product of integers below p, hence invertible.
    let mut inv = 1u64;
    let mut base = den;
    let mut exp = p64 - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            inv = inv * base % p64;
        }
        base = base * base % p64;
        exp >>= 1;
    }
    (num * inv % p64) as u32
}

/// C(a, b) mod p via Lucas's theorem. Zero when b > a.
pub fn binom_mod_p(mut a: u64, mut b: u64, p: u32) -> FpScalar {
    if b > a {
        return 0;
    }
    if p == 2 {
        return u32::from(b & !a == 0);
    }
    let p64 = p as u64;
    let mut acc = 1u64;
    while b > 0 {
        let (ad, bd) = ((a % p64) as u32, (b % p64) as u32);
        if bd > ad {
            return 0;
        }
        acc = acc * small_binom(ad, bd, p) as u64 % p64;
        a /= p64;
        b /= p64;
    }
    acc as FpScalar
}

/// (sum parts)! / prod(part!) mod p, as an iterated product of binomials.
pub fn multinomial_mod_p(parts: &[u64], p: u32) -> FpScalar {
    let mut total = 0u64;
    let mut acc = 1 % p;
    for &part in parts {
        if part == 0 {
            continue;
        }
        total += part;
        let c = binom_mod_p(total, part, p);
        if c == 0 {
            return 0;
        }
        acc = ((acc as u64 * c as u64) % p as u64) as u32;
    }
    acc
}

/// Dense matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<FpScalar>,
}

/// Output of [`FpMatrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1 % p);
        }
        m
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Builds a matrix from row vectors; entries are reduced mod p.
    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(p, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has the wrong length");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, (x % p as u64) as u32);
            }
        }
        m
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FpScalar {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FpScalar) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[FpScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Reduced row-echelon form. Pivots are chosen leftmost column first, and
    /// within a column the first row with a nonzero entry is used.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let p = self.p as u64;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = inverse_mod(m.get(r, c), self.p);
            for j in c..m.cols {
                let v = (m.get(r, j) as u64 * inv as u64 % p) as u32;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let sub = f as u64 * m.get(r, j) as u64 % p;
                    let v = (m.get(i, j) as u64 + p - sub) % p;
                    m.data[i * m.cols + j] = v as u32;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        Rref {
            matrix: m,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }
}

fn inverse_mod(a: u32, p: u32) -> u32 {
    let p64 = p as u64;
    let mut acc = 1u64;
    let mut base = a as u64 % p64;
    let mut exp = p64 - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p64;
        }
        base = base * base % p64;
        exp >>= 1;
    }
    acc as u32
}

/// A subspace of F_p^n kept in fully reduced echelon form.
///
/// Rows are normalized to a leading 1 and every pivot column is zero in all
/// other rows, so [`EchelonBasis::reduce`] yields a canonical representative of
/// the coset v + span.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    p: u32,
    len: usize,
    rows: Vec<(usize, Vec<FpScalar>)>,
}

impl EchelonBasis {
    pub fn new(p: u32, len: usize) -> Self {
        EchelonBasis {
            p,
            len,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.len
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(c, _)| *c)
    }

    pub fn basis(&self) -> impl Iterator<Item = &[FpScalar]> + '_ {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }

    /// Reduces `v` in place to its canonical representative modulo the span.
    pub fn reduce(&self, v: &mut [FpScalar]) {
        let p = self.p as u64;
        for (c, row) in &self.rows {
            let f = v[*c];
            if f == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row.iter()).skip(*c) {
                if r != 0 {
                    *x = ((*x as u64 + p - f as u64 * r as u64 % p) % p) as u32;
                }
            }
        }
    }

    pub fn contains(&self, v: &[FpScalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span. Returns false if it was already there.
    pub fn insert(&mut self, v: &[FpScalar]) -> bool {
        assert_eq!(v.len(), self.len);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(c) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p as u64;
        let inv = inverse_mod(w[c], self.p) as u64;
        for x in w.iter_mut().skip(c) {
            *x = (*x as u64 * inv % p) as u32;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, &r) in row.iter_mut().zip(w.iter()).skip(c) {
                if r != 0 {
                    *x = ((*x as u64 + p - f as u64 * r as u64 % p) % p) as u32;
                }
            }
        }
        let at = self.rows.partition_point(|(pc, _)| *pc < c);
        self.rows.insert(at, (c, w));
        true
    }
}

/// Expresses vectors as linear combinations of a fixed independent family.
#[derive(Debug, Clone)]
pub struct SpanSolver {
    p: u32,
    len: usize,
    count: usize,
    rows: Vec<(usize, Vec<FpScalar>, Vec<FpScalar>)>,
}

impl SpanSolver {
    /// Fails if the vectors are linearly dependent.
    pub fn new(p: u32, len: usize, vectors: &[Vec<FpScalar>]) -> Result<Self> {
        let count = vectors.len();
        let mut s = SpanSolver {
            p,
            len,
            count,
            rows: Vec::new(),
        };
        for (i, v) in vectors.iter().enumerate() {
            let mut combo = vec![0; count];
            combo[i] = 1 % p;
            if !s.push(v.clone(), combo) {
                return Err(Error::Verification(format!(
                    "vector {i} is a combination of the previous ones"
                )));
            }
        }
        Ok(s)
    }

    fn push(&mut self, mut v: Vec<FpScalar>, mut combo: Vec<FpScalar>) -> bool {
        assert_eq!(v.len(), self.len);
        self.eliminate(&mut v, &mut combo);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p as u64;
        let inv = inverse_mod(v[c], self.p) as u64;
        for x in v.iter_mut().chain(combo.iter_mut()) {
            *x = (*x as u64 * inv % p) as u32;
        }
        let at = self.rows.partition_point(|(pc, _, _)| *pc < c);
        self.rows.insert(at, (c, v, combo));
        true
    }

    fn eliminate(&self, v: &mut [FpScalar], combo: &mut [FpScalar]) {
        let p = self.p as u64;
        for (c, row, rc) in &self.rows {
            let f = v[*c] as u64;
            if f == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row.iter()) {
                *x = ((*x as u64 + p - f * r as u64 % p) % p) as u32;
            }
            for (x, &r) in combo.iter_mut().zip(rc.iter()) {
                *x = ((*x as u64 + p - f * r as u64 % p) % p) as u32;
            }
        }
    }

    /// Coefficients `c` with `v = sum c_i vectors[i]`, or `None` when `v` is
    /// outside the span.
    pub fn coordinates(&self, v: &[FpScalar]) -> Option<Vec<FpScalar>> {
        let mut w = v.to_vec();
        let mut combo = vec![0; self.count];
        self.eliminate(&mut w, &mut combo);
        if w.iter().any(|&x| x != 0) {
            return None;
        }
        // w = v - sum combo_i vectors_i = 0
        let p = self.p;
        Some(combo.into_iter().map(|x| if x == 0 { 0 } else { p - x }).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact-integer Pascal triangle, reduced mod p at the end of each row.
    fn pascal_mod(n: usize, p: u32) -> Vec<Vec<u32>> {
        let mut rows: Vec<Vec<u32>> = vec![vec![1 % p]];
        for a in 1..=n {
            let prev = &rows[a - 1];
            let mut row = vec![1 % p; a + 1];
            for b in 1..a {
                row[b] = (prev[b - 1] + prev[b]) % p;
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn prime_power_validation() {
        assert!(PrimePower::new(4, 1).is_err());
        assert!(PrimePower::new(2, 0).is_err());
        let c = PrimePower::new(2, 2).unwrap();
        assert_eq!(c.q(), 4);
        assert_eq!(c.grading_scale(), 3);
        assert_eq!(PrimePower::new(3, 3).unwrap().q(), 27);
    }

    #[test]
    fn lucas_examples() {
        for s in 0..3u32 {
            let ps = 3u64.pow(s);
            assert_eq!(binom_mod_p(2 * ps, ps, 3), 2);
        }
        assert_eq!(binom_mod_p(123, 0, 5), 1);
        // 9 = 1001b, C(9,3) = 84, C(9,2) = 36
        assert_eq!(binom_mod_p(9, 3, 2), 0);
        assert_eq!(binom_mod_p(9, 2, 2), 0);
        assert_eq!(binom_mod_p(9, 1, 2), 1);
        assert_eq!(binom_mod_p(3, 5, 7), 0);
    }

    #[test]
    fn lucas_agrees_with_pascal() {
        for p in [2u32, 3, 5] {
            let table = pascal_mod(2000, p);
            for (a, row) in table.iter().enumerate() {
                for (b, &want) in row.iter().enumerate().take(a + 1) {
                    assert_eq!(
                        binom_mod_p(a as u64, b as u64, p),
                        want,
                        "C({a},{b}) mod {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_and_pin() {
        assert_eq!(alpha(25, 3), 5);
        assert_eq!(pin(25, 3), vec![1, 3, 3, 9, 9]);
        assert_eq!(alpha(0, 7), 0);
        assert!(pin(0, 3).is_empty());
        assert_eq!(pin(7, 2), vec![1, 2, 4]);
        for p in [2u32, 3, 5] {
            for k in 0..=10 {
                assert_eq!(alpha((p as u64).pow(k), p), 1);
            }
        }
    }

    fn is_submultiset(small: &[u64], big: &[u64]) -> bool {
        let mut big = big.to_vec();
        for x in small {
            match big.iter().position(|y| y == x) {
                Some(i) => {
                    big.remove(i);
                }
                None => return false,
            }
        }
        true
    }

    #[test]
    fn binomial_nonzero_iff_pin_submultiset() {
        for p in [2u32, 3, 5] {
            for a in 0..300u64 {
                let pa = pin(a, p);
                assert_eq!(pa.iter().sum::<u64>(), a);
                assert_eq!(pa.len() as u32, alpha(a, p));
                for b in 0..=a {
                    let nz = binom_mod_p(a, b, p) != 0;
                    assert_eq!(nz, is_submultiset(&pin(b, p), &pa), "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial_mod_p(&[17], 3), 1);
        assert_eq!(multinomial_mod_p(&[1, 1], 2), 0);
        for s in 0..3 {
            let ps = 3u64.pow(s);
            assert_eq!(multinomial_mod_p(&[ps, ps], 3), 2);
        }
        // 4!/(1!1!2!) = 12
        assert_eq!(multinomial_mod_p(&[1, 1, 2], 5), 2);
        assert_eq!(multinomial_mod_p(&[1, 1, 2], 3), 0);
    }

    #[test]
    fn rref_basics() {
        let id = FpMatrix::identity(3, 4);
        let r = id.rref();
        assert_eq!(r.rank, 4);
        assert_eq!(r.matrix, id);
        let z = FpMatrix::zeros(5, 3, 4);
        let r = z.rref();
        assert_eq!(r.rank, 0);
        assert_eq!(r.matrix, z);
    }

    #[test]
    fn rref_degree_nine_admissible_table() {
        let m = FpMatrix::from_rows(
            2,
            5,
            &[
                vec![1, 1, 1, 0, 0],
                vec![0, 1, 1, 1, 0],
                vec![0, 0, 1, 0, 0],
                vec![0, 0, 0, 1, 1],
                vec![0, 0, 0, 0, 1],
            ],
        );
        assert_eq!(m.rank(), 5);
        assert_eq!(m.rref().matrix, FpMatrix::identity(2, 5));
    }

    #[test]
    fn rref_idempotent_and_rank_is_pivot_count() {
        let m = FpMatrix::from_rows(
            3,
            4,
            &[vec![1, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 0, 1, 1]],
        );
        let r = m.rref();
        assert_eq!(r.rank, r.pivots.len());
        assert_eq!(r.rank, 2);
        assert_eq!(r.matrix.rref().matrix, r.matrix);
    }

    #[test]
    fn echelon_basis_and_solver() {
        let mut b = EchelonBasis::new(3, 3);
        assert!(b.insert(&[1, 2, 0]));
        assert!(b.insert(&[0, 1, 1]));
        assert!(!b.insert(&[1, 0, 1])); // 1,2,0 + 2*(0,1,1) = (1,4,2) = (1,1,2)? check below
        assert_eq!(b.dim(), 2);
        assert!(b.contains(&[2, 1, 0]));

        let vs = vec![vec![1, 2, 0], vec![0, 1, 1]];
        let s = SpanSolver::new(3, 3, &vs).unwrap();
        let c = s.coordinates(&[1, 0, 1]).unwrap();
        let mut w = [0u32; 3];
        for (ci, v) in c.iter().zip(&vs) {
            for k in 0..3 {
                w[k] = (w[k] + ci * v[k]) % 3;
            }
        }
        assert_eq!(w, [1, 0, 1]);
        assert!(s.coordinates(&[0, 0, 1]).is_none());
        assert!(SpanSolver::new(3, 3, &[vec![1, 1, 1], vec![2, 2, 2]]).is_err());
    }
}
