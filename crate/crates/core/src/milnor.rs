//! The Milnor basis of A_q and its Hopf algebra structure.
//!
//! A basis element P(R) is indexed by a finite sequence R = (r_1, r_2, ...).
//! Products are computed by enumerating Milnor matrices whose i-th row has
//! q-power weighted sum r_i and whose j-th column has plain sum s_j.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use crate::arith::{alpha, multinomial_mod_p, FpScalar, PrimePower};
use crate::error::{Error, Result};

/// Compares zero-padded sequences in the right order: at the last index
/// where they differ, the sequence with the larger entry is the smaller one.
pub fn cmp_right(a: &[u64], b: &[u64]) -> Ordering {
    let n = a.len().max(b.len());
    for k in (0..n).rev() {
        let x = a.get(k).copied().unwrap_or(0);
        let y = b.get(k).copied().unwrap_or(0);
        if x != y {
            return y.cmp(&x);
        }
    }
    Ordering::Equal
}

/// Left lexicographic order on zero-padded sequences.
pub fn cmp_left(a: &[u64], b: &[u64]) -> Ordering {
    let n = a.len().max(b.len());
    for k in 0..n {
        let x = a.get(k).copied().unwrap_or(0);
        let y = b.get(k).copied().unwrap_or(0);
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

/// Index sequence R of a Milnor basis element, without trailing zeros.
///
/// `Ord` is the right order, so ordered collections iterate in that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MilnorSeq(Vec<u64>);

impl MilnorSeq {
    pub fn new(mut r: Vec<u64>) -> Self {
        while r.last() == Some(&0) {
            r.pop();
        }
        MilnorSeq(r)
    }

    pub fn unit() -> Self {
        MilnorSeq(Vec::new())
    }

    /// The sequence with `value` in position `t` (1-based) and zeros elsewhere.
    pub fn single(t: usize, value: u64) -> Self {
        assert!(t >= 1, "positions start at 1");
        let mut r = vec![0; t];
        r[t - 1] = value;
        MilnorSeq::new(r)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// r_i with 1-based i; zero past the end.
    pub fn get(&self, i: usize) -> u64 {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn degree(&self, ctx: &PrimePower) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &r)| r * ctx.xi_degree(i + 1))
            .sum()
    }

    /// Componentwise sum.
    pub fn plus(&self, other: &MilnorSeq) -> MilnorSeq {
        let n = self.len().max(other.len());
        MilnorSeq::new((1..=n).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// Every pair (S, T) with S + T = self, S running through a product of
    /// ranges in lexicographic order.
    pub fn splittings(&self) -> Vec<(MilnorSeq, MilnorSeq)> {
        let mut out = Vec::new();
        let mut cur = vec![0u64; self.len()];
        fn rec(r: &[u64], i: usize, cur: &mut Vec<u64>, out: &mut Vec<(MilnorSeq, MilnorSeq)>) {
            if i == r.len() {
                let t: Vec<u64> = r.iter().zip(cur.iter()).map(|(a, b)| a - b).collect();
                out.push((MilnorSeq::new(cur.clone()), MilnorSeq::new(t)));
                return;
            }
            for v in 0..=r[i] {
                cur[i] = v;
                rec(r, i + 1, cur, out);
            }
            cur[i] = 0;
        }
        rec(&self.0, 0, &mut cur, &mut out);
        out
    }
}

impl From<Vec<u64>> for MilnorSeq {
    fn from(v: Vec<u64>) -> Self {
        MilnorSeq::new(v)
    }
}

impl Ord for MilnorSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_right(&self.0, &other.0)
    }
}

impl PartialOrd for MilnorSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MilnorSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// A finite F_p-linear combination of Milnor basis elements of A_q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MilnorElement {
    ctx: PrimePower,
    terms: BTreeMap<MilnorSeq, FpScalar>,
}

impl MilnorElement {
    pub fn zero(ctx: PrimePower) -> Self {
        MilnorElement {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(ctx: PrimePower) -> Self {
        Self::basis(ctx, MilnorSeq::unit())
    }

    pub fn basis(ctx: PrimePower, seq: MilnorSeq) -> Self {
        let mut x = Self::zero(ctx);
        x.add_term(seq, 1);
        x
    }

    /// P^a, which is P(a) in the Milnor basis.
    pub fn pa(ctx: PrimePower, a: u64) -> Self {
        Self::basis(ctx, MilnorSeq::new(vec![a]))
    }

    pub fn from_terms<I>(ctx: PrimePower, terms: I) -> Self
    where
        I: IntoIterator<Item = (MilnorSeq, u64)>,
    {
        let mut x = Self::zero(ctx);
        for (s, c) in terms {
            x.add_term(s, ctx.reduce(c));
        }
        x
    }

    #[inline]
    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MilnorSeq, FpScalar)> + '_ {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, seq: &MilnorSeq) -> FpScalar {
        self.terms.get(seq).copied().unwrap_or(0)
    }

    /// Adds c·P(seq) in place.
    pub fn add_term(&mut self, seq: MilnorSeq, c: FpScalar) {
        let c = c % self.ctx.p();
        if c == 0 {
            return;
        }
        let ctx = self.ctx;
        match self.terms.entry(seq) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = ctx.add(*o.get(), c);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
        }
    }

    /// Adds c·other in place.
    pub fn add_scaled(&mut self, other: &MilnorElement, c: FpScalar) {
        assert_eq!(self.ctx, other.ctx, "mixing elements of different algebras");
        if c % self.ctx.p() == 0 {
            return;
        }
        for (s, &v) in &other.terms {
            self.add_term(s.clone(), self.ctx.mul(v, c));
        }
    }

    pub fn scale(&self, c: FpScalar) -> Self {
        let mut out = Self::zero(self.ctx);
        out.add_scaled(self, c);
        out
    }

    fn check_ctx(&self, other: &MilnorElement) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch {
                left: self.ctx.q(),
                right: other.ctx.q(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MilnorElement) -> Result<Self> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        out.add_scaled(other, 1);
        Ok(out)
    }

    pub fn try_sub(&self, other: &MilnorElement) -> Result<Self> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        out.add_scaled(other, self.ctx.neg(1));
        Ok(out)
    }

    /// Common degree of all terms; `None` for zero.
    pub fn degree(&self) -> Result<Option<u64>> {
        let mut it = self.terms.keys().map(|s| s.degree(&self.ctx));
        let Some(d) = it.next() else {
            return Ok(None);
        };
        if it.any(|e| e != d) {
            return Err(Error::NotHomogeneous);
        }
        Ok(Some(d))
    }

    /// Coefficient of the unit P().
    pub fn counit(&self) -> FpScalar {
        self.coefficient(&MilnorSeq::unit())
    }

    /// Splits the element into its homogeneous components.
    pub fn homogeneous_parts(&self) -> BTreeMap<u64, MilnorElement> {
        let mut out: BTreeMap<u64, MilnorElement> = BTreeMap::new();
        for (s, &c) in &self.terms {
            out.entry(s.degree(&self.ctx))
                .or_insert_with(|| MilnorElement::zero(self.ctx))
                .add_term(s.clone(), c);
        }
        out
    }
}

impl fmt::Display for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c != 1 {
                write!(f, "{c}*")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Add for &MilnorElement {
    type Output = MilnorElement;
    fn add(self, rhs: &MilnorElement) -> MilnorElement {
        self.try_add(rhs).expect("context mismatch")
    }
}

impl Sub for &MilnorElement {
    type Output = MilnorElement;
    fn sub(self, rhs: &MilnorElement) -> MilnorElement {
        self.try_sub(rhs).expect("context mismatch")
    }
}

impl Neg for &MilnorElement {
    type Output = MilnorElement;
    fn neg(self) -> MilnorElement {
        self.scale(self.ctx.neg(1))
    }
}

impl Mul for &MilnorElement {
    type Output = MilnorElement;
    fn mul(self, rhs: &MilnorElement) -> MilnorElement {
        milnor_product(self, rhs).expect("context mismatch")
    }
}

/// Degree of a Milnor sequence, P^r having degree r.
pub fn degree(r: &MilnorSeq, ctx: &PrimePower) -> u64 {
    r.degree(ctx)
}

/// Converts a reduced degree of A_q into the degree of its copy inside A_p.
pub fn degree_in_ap(d: u64, ctx: &PrimePower) -> u64 {
    d * ctx.grading_scale()
}

type ProductKey = (PrimePower, MilnorSeq, MilnorSeq);
type ProductTerms = Arc<Vec<(MilnorSeq, FpScalar)>>;

const PRODUCT_CACHE_LIMIT: usize = 1 << 18;

fn product_cache() -> &'static RwLock<HashMap<ProductKey, ProductTerms>> {
    static CACHE: OnceLock<RwLock<HashMap<ProductKey, ProductTerms>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Product of two Milnor basis elements.
pub fn basis_product(ctx: &PrimePower, r: &MilnorSeq, s: &MilnorSeq) -> ProductTerms {
    if r.is_empty() {
        return Arc::new(vec![(s.clone(), 1)]);
    }
    if s.is_empty() {
        return Arc::new(vec![(r.clone(), 1)]);
    }
    let key = (*ctx, r.clone(), s.clone());
    if let Some(v) = product_cache().read().ok().and_then(|m| m.get(&key).cloned()) {
        return v;
    }
    let v = Arc::new(enumerate_product(ctx, r.as_slice(), s.as_slice()));
    if let Ok(mut m) = product_cache().write() {
        if m.len() >= PRODUCT_CACHE_LIMIT {
            m.clear();
        }
        m.insert(key, v.clone());
    }
    v
}

/// Walks every Milnor matrix for P(r)·P(s) and returns the nonzero terms,
/// sorted in the right order.
fn enumerate_product(ctx: &PrimePower, r: &[u64], s: &[u64]) -> Vec<(MilnorSeq, FpScalar)> {
    let rows = r.len();
    let cols = s.len();
    let width = cols + 1;
    let mut x = vec![0u64; (rows + 1) * width];
    let mut col_rem: Vec<u64> = s.to_vec();
    let mut acc: BTreeMap<MilnorSeq, FpScalar> = BTreeMap::new();

    // q^j for j = 0..=cols, saturating.
    let mut qpow = vec![1u64; width];
    for j in 1..width {
        qpow[j] = qpow[j - 1].saturating_mul(ctx.q());
    }

    struct St<'a> {
        ctx: &'a PrimePower,
        r: &'a [u64],
        rows: usize,
        cols: usize,
        width: usize,
        qpow: Vec<u64>,
    }

    fn finish(st: &St, x: &mut [u64], col_rem: &[u64], acc: &mut BTreeMap<MilnorSeq, FpScalar>) {
        x[1..=st.cols].copy_from_slice(&col_rem[..st.cols]);
        let p = st.ctx.p();
        let diag_max = st.rows + st.cols;
        let mut t = Vec::with_capacity(diag_max);
        let mut coeff = 1u32;
        let mut parts = Vec::with_capacity(st.rows + 1);
        for n in 1..=diag_max {
            parts.clear();
            let lo = n.saturating_sub(st.cols);
            let hi = n.min(st.rows);
            for i in lo..=hi {
                parts.push(x[i * st.width + (n - i)]);
            }
            let c = multinomial_mod_p(&parts, p);
            if c == 0 {
                return;
            }
            coeff = st.ctx.mul(coeff, c);
            t.push(parts.iter().sum());
        }
        let seq = MilnorSeq::new(t);
        let e = acc.entry(seq).or_insert(0);
        *e = st.ctx.add(*e, coeff);
    }

    // Fill row i, column j (descending from `cols` to 1), with `rem` of r_i left.
    #[allow(clippy::too_many_arguments)]
    fn rec(
        st: &St,
        i: usize,
        j: usize,
        rem: u64,
        x: &mut [u64],
        col_rem: &mut [u64],
        acc: &mut BTreeMap<MilnorSeq, FpScalar>,
    ) {
        if j == 0 {
            x[i * st.width] = rem;
            if i == st.rows {
                finish(st, x, col_rem, acc);
            } else {
                rec(st, i + 1, st.cols, st.r[i], x, col_rem, acc);
            }
            return;
        }
        let w = st.qpow[j];
        let max = (rem / w).min(col_rem[j - 1]);
        for v in (0..=max).rev() {
            x[i * st.width + j] = v;
            col_rem[j - 1] -= v;
            rec(st, i, j - 1, rem - v * w, x, col_rem, acc);
            col_rem[j - 1] += v;
        }
        x[i * st.width + j] = 0;
    }

    let st = St {
        ctx,
        r,
        rows,
        cols,
        width,
        qpow,
    };
    rec(&st, 1, cols, r[0], &mut x, &mut col_rem, &mut acc);
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// Product in A_q. Fails when the factors live in different algebras.
pub fn milnor_product(x: &MilnorElement, y: &MilnorElement) -> Result<MilnorElement> {
    x.check_ctx(y)?;
    let ctx = x.ctx;
    let mut out = MilnorElement::zero(ctx);
    for (r, &a) in &x.terms {
        for (s, &b) in &y.terms {
            let ab = ctx.mul(a, b);
            for (t, c) in basis_product(&ctx, r, s).iter() {
                out.add_term(t.clone(), ctx.mul(ab, *c));
            }
        }
    }
    Ok(out)
}

/// An element of A_q ⊗ A_q in the tensor square of the Milnor basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorTensor {
    ctx: PrimePower,
    terms: BTreeMap<(MilnorSeq, MilnorSeq), FpScalar>,
}

impl MilnorTensor {
    pub fn zero(ctx: PrimePower) -> Self {
        MilnorTensor {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn add_term(&mut self, l: MilnorSeq, r: MilnorSeq, c: FpScalar) {
        let c = c % self.ctx.p();
        if c == 0 {
            return;
        }
        let key = (l, r);
        let v = self.ctx.add(self.terms.get(&key).copied().unwrap_or(0), c);
        if v == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MilnorSeq, &MilnorSeq, FpScalar)> + '_ {
        self.terms.iter().map(|((l, r), &c)| (l, r, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, l: &MilnorSeq, r: &MilnorSeq) -> FpScalar {
        self.terms.get(&(l.clone(), r.clone())).copied().unwrap_or(0)
    }

    /// Applies `f` to the left factor and `g` to the right, then multiplies
    /// the two sides together.
    pub fn contract<F, G>(&self, f: F, g: G) -> MilnorElement
    where
        F: Fn(&MilnorSeq) -> MilnorElement,
        G: Fn(&MilnorSeq) -> MilnorElement,
    {
        let mut out = MilnorElement::zero(self.ctx);
        for ((l, r), &c) in &self.terms {
            let prod = &f(l) * &g(r);
            out.add_scaled(&prod, c);
        }
        out
    }
}

/// The coproduct, splitting each P(R) as Σ_{S+T=R} P(S) ⊗ P(T).
pub fn coproduct(x: &MilnorElement) -> MilnorTensor {
    let mut out = MilnorTensor::zero(x.ctx);
    for (r, &c) in &x.terms {
        for (s, t) in r.splittings() {
            out.add_term(s, t, c);
        }
    }
    out
}

fn antipode_cache() -> &'static RwLock<HashMap<(PrimePower, MilnorSeq), MilnorElement>> {
    static CACHE: OnceLock<RwLock<HashMap<(PrimePower, MilnorSeq), MilnorElement>>> =
        OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Antipode of a single basis element, from Σ_{S+T=R} P(S) χ(P(T)) = 0 for R ≠ 0.
pub fn antipode_basis(ctx: &PrimePower, r: &MilnorSeq) -> MilnorElement {
    if r.is_empty() {
        return MilnorElement::unit(*ctx);
    }
    let key = (*ctx, r.clone());
    if let Some(v) = antipode_cache().read().ok().and_then(|m| m.get(&key).cloned()) {
        return v;
    }
    let mut acc = MilnorElement::zero(*ctx);
    for (s, t) in r.splittings() {
        if s.is_empty() {
            continue;
        }
        let chi_t = antipode_basis(ctx, &t);
        let prod = &MilnorElement::basis(*ctx, s) * &chi_t;
        acc.add_scaled(&prod, 1);
    }
    let out = -&acc;
    if let Ok(mut m) = antipode_cache().write() {
        if m.len() >= PRODUCT_CACHE_LIMIT {
            m.clear();
        }
        m.insert(key, out.clone());
    }
    out
}

pub fn antipode(x: &MilnorElement) -> MilnorElement {
    let mut out = MilnorElement::zero(x.ctx);
    for (r, &c) in &x.terms {
        out.add_scaled(&antipode_basis(&x.ctx, r), c);
    }
    out
}

/// All Milnor sequences of degree `d`, in the right order.
pub fn milnor_basis(d: u64, ctx: &PrimePower) -> Vec<MilnorSeq> {
    milnor_basis_filtered(d, ctx, |_, _| true)
}

/// Upper bound, exclusive, on r_i for the subalgebra A_q(n); `None` when
/// the position is unconstrained. Positions past n+1 must be zero.
pub fn subalgebra_bound(i: usize, n: usize, ctx: &PrimePower) -> u64 {
    if i > n + 1 {
        return 1;
    }
    let mut b = 1u64;
    for _ in 0..(n + 2 - i) {
        b = b.saturating_mul(ctx.q());
    }
    b
}

/// Whether P(R) lies in A_q(n), the subalgebra generated by P^{p^j} with
/// j < e(n+1).
pub fn in_subalgebra(r: &MilnorSeq, n: usize, ctx: &PrimePower) -> bool {
    r.as_slice()
        .iter()
        .enumerate()
        .all(|(i, &v)| v < subalgebra_bound(i + 1, n, ctx))
}

/// Milnor basis of A_q(n) in degree `d`, in the right order.
pub fn milnor_basis_sub(d: u64, n: usize, ctx: &PrimePower) -> Vec<MilnorSeq> {
    milnor_basis_filtered(d, ctx, |i, v| v < subalgebra_bound(i, n, ctx))
}

fn milnor_basis_filtered<F>(d: u64, ctx: &PrimePower, allow: F) -> Vec<MilnorSeq>
where
    F: Fn(usize, u64) -> bool,
{
    if d == 0 {
        return vec![MilnorSeq::unit()];
    }
    let mut top = 0usize;
    while ctx.xi_degree(top + 1) <= d {
        top += 1;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; top];
    fn rec<F: Fn(usize, u64) -> bool>(
        ctx: &PrimePower,
        i: usize,
        rem: u64,
        cur: &mut Vec<u64>,
        allow: &F,
        out: &mut Vec<MilnorSeq>,
    ) {
        if i == 0 {
            if rem == 0 {
                out.push(MilnorSeq::new(cur.clone()));
            }
            return;
        }
        let w = ctx.xi_degree(i);
        for v in 0..=rem / w {
            if !allow(i, v) {
                if v == 0 {
                    continue;
                }
                break;
            }
            cur[i - 1] = v;
            rec(ctx, i - 1, rem - v * w, cur, allow, out);
        }
        cur[i - 1] = 0;
    }
    rec(ctx, top, d, &mut cur, &allow, &mut out);
    out.sort();
    out
}

/// May filtration of a single basis element, Σ i·α(r_i).
pub fn seq_filtration(r: &MilnorSeq, p: u32) -> u64 {
    r.as_slice()
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as u64 + 1) * alpha(v, p) as u64)
        .sum()
}
