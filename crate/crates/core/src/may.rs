//! The May filtration of A_q and its associated graded algebra E⁰(A_q).
//!
//! On a Milnor basis element the filtration is Σ i·α(r_i); on a general
//! element it is the minimum over the terms. [`FiltrationOracle`] recomputes
//! it from the definition as the largest m with θ ∈ (A_q^+)^m.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::arith::{digits, EchelonBasis, FpScalar, PrimePower};
use crate::error::{Error, Result};
use crate::milnor::{self, milnor_basis, milnor_product, MilnorElement, MilnorSeq};

/// May filtration value. Zero has infinite filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Filtration {
    Finite(u64),
    Infinite,
}

impl Filtration {
    pub fn finite(self) -> Option<u64> {
        match self {
            Filtration::Finite(m) => Some(m),
            Filtration::Infinite => None,
        }
    }
}

impl fmt::Display for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filtration::Finite(m) => write!(f, "{m}"),
            Filtration::Infinite => write!(f, "inf"),
        }
    }
}

pub fn filtration_of_seq(r: &MilnorSeq, ctx: &PrimePower) -> u64 {
    milnor::seq_filtration(r, ctx.p())
}

/// Minimum filtration over the terms of `x`.
pub fn filtration(x: &MilnorElement) -> Filtration {
    let ctx = x.ctx();
    x.terms()
        .map(|(r, _)| filtration_of_seq(r, &ctx))
        .min()
        .map_or(Filtration::Infinite, Filtration::Finite)
}

/// Like [`filtration`] but refuses the zero element.
pub fn try_filtration(x: &MilnorElement) -> Result<u64> {
    filtration(x).finite().ok_or(Error::ZeroElement)
}

/// Default degree ceiling for the oracle.
pub const ORACLE_DEGREE_LIMIT: u64 = 64;

/// Computes filtrations from the definition.
///
/// V_0(d) is the degree-d part of the (sub)algebra, generated from the unit by
/// left multiplication with the P^{p^j}. Since A^+ = Σ_j P^{p^j}·A, the power
/// (A^+)^m in degree d is V_m(d) = Σ_j P^{p^j}·V_{m-1}(d - p^j). Each space is
/// held as an echelon basis in Milnor coordinates.
pub struct FiltrationOracle {
    ctx: PrimePower,
    gens: Vec<u64>,
    degree_limit: u64,
    basis: HashMap<u64, (Vec<MilnorSeq>, HashMap<MilnorSeq, usize>)>,
    levels: HashMap<(u64, u64), EchelonBasis>,
}

impl FiltrationOracle {
    /// Oracle for all of A_q, or for A_q(n) when `n_cap` is given.
    pub fn new(ctx: PrimePower, n_cap: Option<usize>) -> Self {
        Self::with_limit(ctx, n_cap, ORACLE_DEGREE_LIMIT)
    }

    pub fn with_limit(ctx: PrimePower, n_cap: Option<usize>, degree_limit: u64) -> Self {
        let gen_count = n_cap.map(|n| ctx.e() as usize * (n + 1));
        let mut gens = Vec::new();
        let mut g = 1u64;
        while g <= degree_limit && gen_count.map_or(true, |c| gens.len() < c) {
            gens.push(g);
            g *= ctx.p() as u64;
        }
        FiltrationOracle {
            ctx,
            gens,
            degree_limit,
            basis: HashMap::new(),
            levels: HashMap::new(),
        }
    }

    fn coords(&mut self, d: u64) -> &(Vec<MilnorSeq>, HashMap<MilnorSeq, usize>) {
        let ctx = self.ctx;
        self.basis.entry(d).or_insert_with(|| {
            let b = milnor_basis(d, &ctx);
            let idx = b.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
            (b, idx)
        })
    }

    fn vector(&mut self, x: &MilnorElement, d: u64) -> Vec<FpScalar> {
        let (b, idx) = self.coords(d);
        let mut v = vec![0; b.len()];
        for (s, c) in x.terms() {
            v[idx[s]] = c;
        }
        v
    }

    fn element(&mut self, v: &[FpScalar], d: u64) -> MilnorElement {
        let ctx = self.ctx;
        let (b, _) = self.coords(d);
        MilnorElement::from_terms(
            ctx,
            b.iter()
                .zip(v)
                .filter(|(_, &c)| c != 0)
                .map(|(s, &c)| (s.clone(), c as u64)),
        )
    }

    /// (A^+)^m in degree d, with m = 0 standing for the whole (sub)algebra.
    pub fn level(&mut self, m: u64, d: u64) -> &EchelonBasis {
        if !self.levels.contains_key(&(m, d)) {
            let space = self.build_level(m, d);
            self.levels.insert((m, d), space);
        }
        &self.levels[&(m, d)]
    }

    fn build_level(&mut self, m: u64, d: u64) -> EchelonBasis {
        let dim = self.coords(d).0.len();
        let mut space = EchelonBasis::new(self.ctx.p(), dim);
        if d == 0 {
            if m == 0 {
                space.insert(&[1]);
            }
            return space;
        }
        if m > d {
            return space;
        }
        let prev_m = m.saturating_sub(1);
        for g in self.gens.clone() {
            if g > d {
                break;
            }
            let lower: Vec<Vec<FpScalar>> =
                self.level(prev_m, d - g).basis().map(|r| r.to_vec()).collect();
            let letter = MilnorElement::pa(self.ctx, g);
            for v in lower {
                let x = self.element(&v, d - g);
                let y = &letter * &x;
                let w = self.vector(&y, d);
                space.insert(&w);
                if space.dim() == dim {
                    return space;
                }
            }
        }
        space
    }

    /// Largest m with x ∈ (A^+)^m.
    pub fn filtration(&mut self, x: &MilnorElement) -> Result<Filtration> {
        if x.ctx() != self.ctx {
            return Err(Error::ContextMismatch {
                left: self.ctx.q(),
                right: x.ctx().q(),
            });
        }
        let mut best = Filtration::Infinite;
        for (d, part) in x.homogeneous_parts() {
            if d > self.degree_limit {
                return Err(Error::guard("oracle degree", d, self.degree_limit));
            }
            let v = self.vector(&part, d);
            if !self.level(0, d).contains(&v) {
                return Err(Error::NotInSubalgebra);
            }
            let mut m = 0;
            while m < d && self.level(m + 1, d).contains(&v) {
                m += 1;
            }
            best = best.min(Filtration::Finite(m));
        }
        Ok(best)
    }
}

/// Filtration from the definition, for A_q or its subalgebra A_q(n_cap).
pub fn filtration_oracle(x: &MilnorElement, n_cap: Option<usize>) -> Result<Filtration> {
    FiltrationOracle::new(x.ctx(), n_cap).filtration(x)
}

/// An element of E⁰(A_q): Milnor terms sharing one filtration value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E0Element {
    grading: u64,
    value: MilnorElement,
}

impl E0Element {
    pub fn zero(ctx: PrimePower, grading: u64) -> Self {
        E0Element {
            grading,
            value: MilnorElement::zero(ctx),
        }
    }

    pub fn unit(ctx: PrimePower) -> Self {
        E0Element {
            grading: 0,
            value: MilnorElement::unit(ctx),
        }
    }

    pub fn basis(ctx: PrimePower, r: MilnorSeq) -> Self {
        E0Element {
            grading: filtration_of_seq(&r, &ctx),
            value: MilnorElement::basis(ctx, r),
        }
    }

    /// The image of x in its lowest filtration quotient.
    pub fn leading(x: &MilnorElement) -> Self {
        Self::project(x, filtration(x).finite().unwrap_or(0))
    }

    /// The part of x of filtration exactly `grading`, read in that quotient.
    pub fn project(x: &MilnorElement, grading: u64) -> Self {
        let ctx = x.ctx();
        let value = MilnorElement::from_terms(
            ctx,
            x.terms()
                .filter(|(r, _)| filtration_of_seq(r, &ctx) == grading)
                .map(|(r, c)| (r.clone(), c as u64)),
        );
        E0Element { grading, value }
    }

    /// Wraps an element whose terms all have filtration `grading`.
    pub fn from_milnor(x: MilnorElement, grading: u64) -> Result<Self> {
        let ctx = x.ctx();
        if x.terms().any(|(r, _)| filtration_of_seq(r, &ctx) != grading) {
            return Err(Error::InvalidArgument(format!(
                "{x} is not concentrated in filtration {grading}"
            )));
        }
        Ok(E0Element { grading, value: x })
    }

    pub fn ctx(&self) -> PrimePower {
        self.value.ctx()
    }

    pub fn grading(&self) -> u64 {
        self.grading
    }

    pub fn value(&self) -> &MilnorElement {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn scale(&self, c: FpScalar) -> Self {
        E0Element {
            grading: self.grading,
            value: self.value.scale(c),
        }
    }

    pub fn try_sub(&self, other: &E0Element) -> Result<Self> {
        if self.grading != other.grading && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidArgument("gradings differ".into()));
        }
        Ok(E0Element {
            grading: self.grading.max(other.grading),
            value: self.value.try_sub(&other.value)?,
        })
    }

    pub fn try_add(&self, other: &E0Element) -> Result<Self> {
        if self.grading != other.grading && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidArgument("gradings differ".into()));
        }
        Ok(E0Element {
            grading: self.grading.max(other.grading),
            value: self.value.try_add(&other.value)?,
        })
    }
}

impl fmt::Display for E0Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Product in E⁰: the Milnor product with every term above the sum of the
/// gradings removed.
pub fn e0_product(x: &E0Element, y: &E0Element) -> Result<E0Element> {
    let prod = milnor_product(&x.value, &y.value)?;
    Ok(E0Element::project(&prod, x.grading + y.grading))
}

/// Y and Z orders on q-atomic numbers, and plain numeric order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AtomicOrder {
    Y,
    Z,
    Degree,
}

/// A q-atomic number a = p^s(q^t - 1)/(q - 1), naming the generator P[a] = P^s_t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AtomicGenerator {
    ctx: PrimePower,
    s: u32,
    t: u32,
    a: u64,
}

impl AtomicGenerator {
    pub fn new(ctx: PrimePower, s: u32, t: u32) -> Self {
        assert!(t >= 1, "t must be positive");
        let a = (ctx.p() as u64).pow(s) * ctx.xi_degree(t as usize);
        AtomicGenerator { ctx, s, t, a }
    }

    /// Recovers (s, t) from a, if a is q-atomic.
    pub fn from_degree(ctx: PrimePower, a: u64) -> Option<Self> {
        if a == 0 {
            return None;
        }
        let p = ctx.p() as u64;
        let mut s = 0u32;
        let mut rest = a;
        while rest % p == 0 {
            rest /= p;
            s += 1;
        }
        // rest must be 1 + q + ... + q^{t-1}.
        let mut t = 0u32;
        let mut acc = 0u64;
        let mut pw = 1u64;
        while acc < rest {
            acc += pw;
            pw = pw.saturating_mul(ctx.q());
            t += 1;
        }
        if acc == rest {
            // A factor p^k with k ≥ e could have been absorbed in `rest`
            // only if rest were divisible by p, which it is not.
            Some(AtomicGenerator::new(ctx, s, t))
        } else {
            None
        }
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn degree(&self) -> u64 {
        self.a
    }

    pub fn grading(&self) -> u64 {
        self.t as u64
    }

    /// P(0, ..., 0, p^s) with p^s in position t.
    pub fn milnor_seq(&self) -> MilnorSeq {
        MilnorSeq::single(self.t as usize, (self.ctx.p() as u64).pow(self.s))
    }

    pub fn element(&self) -> E0Element {
        E0Element::basis(self.ctx, self.milnor_seq())
    }

    /// P[a] with t = 1 is P^{p^s}, one of the algebra generators.
    pub fn is_p_power(&self) -> bool {
        self.t == 1
    }

    /// Key for the given order; compared lexicographically.
    fn key(&self, order: AtomicOrder) -> (u64, u64, u64) {
        let e = self.ctx.e();
        let (s1, s2) = ((self.s / e) as u64, (self.s % e) as u64);
        match order {
            AtomicOrder::Y => (s1, self.t as u64, s2),
            AtomicOrder::Z => (s1 + self.t as u64, s1, s2),
            AtomicOrder::Degree => (self.a, 0, 0),
        }
    }
}

impl fmt::Display for AtomicGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.ctx.p() == 2 { "Sq" } else { "P" };
        write!(f, "{name}[{}]", self.a)
    }
}

pub fn is_power_of_p(a: u64, p: u32) -> bool {
    let d = digits(a, p);
    d.iter().sum::<u32>() == 1
}

/// Compares q-atomic numbers in the Y order (triples (s', t, s'')) or the
/// Z order (triples (s'+t, s', s'')), where s = s'e + s''.
pub fn cmp_atomic(a: &AtomicGenerator, b: &AtomicGenerator, order: AtomicOrder) -> Ordering {
    a.key(order).cmp(&b.key(order))
}

/// All q-atomic generators of degree at most `bound`, in increasing degree.
pub fn atomic_numbers(ctx: PrimePower, bound: u64) -> Vec<AtomicGenerator> {
    let mut out = Vec::new();
    let p = ctx.p() as u64;
    let mut t = 1u32;
    while ctx.xi_degree(t as usize) <= bound {
        let mut s = 0u32;
        while p.pow(s).saturating_mul(ctx.xi_degree(t as usize)) <= bound {
            out.push(AtomicGenerator::new(ctx, s, t));
            s += 1;
        }
        t += 1;
    }
    out.sort_by_key(|g| g.a);
    out
}

/// Generators P[a] of A_q(n): those with p^s < q^{n+2-t}.
pub fn subalgebra_generators(ctx: PrimePower, n: usize) -> Vec<AtomicGenerator> {
    let mut out = Vec::new();
    for t in 1..=(n as u32 + 1) {
        for s in 0..ctx.e() * (n as u32 + 2 - t) {
            out.push(AtomicGenerator::new(ctx, s, t));
        }
    }
    out.sort_by_key(|g| g.a);
    out
}

/// The commutator predicted by the power-commutator presentation for
/// deg a > deg b: P[a+b] when a+b is q-atomic and not a power of p.
pub fn commutator_rule(a: &AtomicGenerator, b: &AtomicGenerator) -> Option<AtomicGenerator> {
    let sum = a.degree() + b.degree();
    if is_power_of_p(sum, a.ctx.p()) {
        return None;
    }
    AtomicGenerator::from_degree(a.ctx, sum)
}

/// [P[a], P[b]] computed in E⁰.
pub fn e0_commutator(a: &AtomicGenerator, b: &AtomicGenerator) -> Result<E0Element> {
    let (x, y) = (a.element(), b.element());
    e0_product(&x, &y)?.try_sub(&e0_product(&y, &x)?)
}

/// Whether the computed commutator agrees with [`commutator_rule`].
pub fn commutator_law_holds(a: &AtomicGenerator, b: &AtomicGenerator) -> Result<bool> {
    let got = e0_commutator(a, b)?;
    Ok(match commutator_rule(a, b) {
        Some(c) => got == c.element(),
        None => got.is_zero(),
    })
}

/// Whether P[a]^p vanishes in E⁰.
pub fn e0_power_is_zero(a: &AtomicGenerator) -> Result<bool> {
    let x = a.element();
    let mut acc = E0Element::unit(a.ctx);
    for _ in 0..a.ctx.p() {
        acc = e0_product(&acc, &x)?;
    }
    Ok(acc.is_zero())
}

/// A monomial in the generators P[a] with exponents in 1..p, factors taken
/// in increasing order for the chosen [`AtomicOrder`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenMonomial {
    ctx: PrimePower,
    order: AtomicOrder,
    factors: Vec<(AtomicGenerator, u32)>,
}

impl GenMonomial {
    /// Sorts and merges the factors; fails if an exponent reaches p.
    pub fn new(
        ctx: PrimePower,
        order: AtomicOrder,
        factors: impl IntoIterator<Item = (AtomicGenerator, u32)>,
    ) -> Result<Self> {
        let mut merged: Vec<(AtomicGenerator, u32)> = Vec::new();
        let mut all: Vec<(AtomicGenerator, u32)> =
            factors.into_iter().filter(|(_, k)| *k > 0).collect();
        all.sort_by(|x, y| cmp_atomic(&x.0, &y.0, order));
        for (g, k) in all {
            match merged.last_mut() {
                Some((h, m)) if *h == g => *m += k,
                _ => merged.push((g, k)),
            }
        }
        if let Some((g, k)) = merged.iter().find(|(_, k)| *k >= ctx.p()) {
            return Err(Error::InvalidArgument(format!(
                "{g} has exponent {k}, at least p = {}",
                ctx.p()
            )));
        }
        Ok(GenMonomial {
            ctx,
            order,
            factors: merged,
        })
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn order(&self) -> AtomicOrder {
        self.order
    }

    pub fn factors(&self) -> &[(AtomicGenerator, u32)] {
        &self.factors
    }

    /// The factors with multiplicity, in order.
    pub fn sequence(&self) -> Vec<AtomicGenerator> {
        self.factors
            .iter()
            .flat_map(|(g, k)| std::iter::repeat(*g).take(*k as usize))
            .collect()
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|(g, k)| g.degree() * *k as u64).sum()
    }

    pub fn grading(&self) -> u64 {
        self.factors.iter().map(|(g, k)| g.grading() * *k as u64).sum()
    }

    /// Monks correspondence: r_t = Σ k·p^s over factors (s, t)^k.
    pub fn to_milnor_seq(&self) -> MilnorSeq {
        let len = self.factors.iter().map(|(g, _)| g.t as usize).max().unwrap_or(0);
        let mut r = vec![0u64; len];
        for (g, k) in &self.factors {
            r[g.t as usize - 1] += *k as u64 * (self.ctx.p() as u64).pow(g.s);
        }
        MilnorSeq::new(r)
    }

    /// Inverse of the Monks correspondence: the base-p digits of r_t give
    /// the exponents of the generators (s, t).
    pub fn from_milnor_seq(r: &MilnorSeq, ctx: PrimePower, order: AtomicOrder) -> Self {
        let mut factors = Vec::new();
        for (i, &v) in r.as_slice().iter().enumerate() {
            for (s, &k) in digits(v, ctx.p()).iter().enumerate() {
                if k > 0 {
                    factors.push((AtomicGenerator::new(ctx, s as u32, i as u32 + 1), k));
                }
            }
        }
        GenMonomial::new(ctx, order, factors).expect("digits are below p")
    }

    /// The product of the factors computed in E⁰.
    pub fn e0_value(&self) -> E0Element {
        let mut acc = E0Element::unit(self.ctx);
        for g in self.sequence() {
            acc = e0_product(&acc, &g.element()).expect("same algebra");
        }
        acc
    }

    /// The product of the factors computed in A_q.
    pub fn milnor_value(&self) -> MilnorElement {
        let mut acc = MilnorElement::unit(self.ctx);
        for g in self.sequence() {
            acc = &acc * &MilnorElement::basis(self.ctx, g.milnor_seq());
        }
        acc
    }
}

impl fmt::Display for GenMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (g, k) in &self.factors {
            write!(f, "{g}")?;
            if *k > 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}

pub fn monks_correspondence(m: &GenMonomial) -> MilnorSeq {
    m.to_milnor_seq()
}

pub fn monks_inverse(r: &MilnorSeq, ctx: PrimePower, order: AtomicOrder) -> GenMonomial {
    GenMonomial::from_milnor_seq(r, ctx, order)
}

fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Poincaré polynomial of E⁰(A_q(n-2)) in the May grading:
/// (Π_{k=1}^{n-1} (1 + τ^k + ... + τ^{k(p-1)})^{n-k})^e.
pub fn poincare_e0(n: usize, ctx: &PrimePower) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let p = ctx.p() as usize;
    let mut base = vec![1u64];
    for k in 1..n {
        let mut factor = vec![0u64; k * (p - 1) + 1];
        for i in 0..p {
            factor[i * k] = 1;
        }
        for _ in 0..(n - k) {
            base = poly_mul(&base, &factor);
        }
    }
    let mut out = vec![1u64];
    for _ in 0..ctx.e() {
        out = poly_mul(&out, &base);
    }
    Ok(out)
}

/// Coefficients up to `bound` of Π_{j ≥ 1} 1/(1 - τ^{(q^j - 1)/(q - 1)}).
pub fn poincare_aq(ctx: &PrimePower, bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    let mut j = 1usize;
    loop {
        let w = ctx.xi_degree(j) as usize;
        if w > n {
            break;
        }
        for d in w..=n {
            c[d] += c[d - w];
        }
        j += 1;
    }
    c
}

/// Formats a polynomial as "1 + 2t + t^2".
pub fn format_poly(coeffs: &[u64]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => var,
            _ => format!("{c}{var}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Result of comparing E⁰ products with the power-commutator presentation.
#[derive(Debug, Clone, Serialize)]
pub struct PresentationReport {
    pub q: u64,
    pub n: usize,
    pub generators: Vec<u64>,
    pub basis_size: usize,
    pub pairs_checked: usize,
    pub mismatches: Vec<String>,
}

/// Sorts words in generator indices using xy = yx + [x, y] and x^p = 0.
struct NormalOrder<'a> {
    ctx: PrimePower,
    gens: &'a [AtomicGenerator],
    index: HashMap<u64, usize>,
}

impl NormalOrder<'_> {
    /// [g_i, g_j] as (index, coefficient), from the presentation.
    fn bracket(&self, i: usize, j: usize) -> Result<Option<(usize, FpScalar)>> {
        let (x, y) = (&self.gens[i], &self.gens[j]);
        let (hi, lo, sign) = match x.degree().cmp(&y.degree()) {
            Ordering::Greater => (x, y, 1),
            Ordering::Less => (y, x, self.ctx.neg(1)),
            Ordering::Equal => return Ok(None),
        };
        match commutator_rule(hi, lo) {
            None => Ok(None),
            Some(c) => match self.index.get(&c.degree()) {
                Some(&k) => Ok(Some((k, sign))),
                None => Err(Error::Verification(format!(
                    "commutator {c} leaves the generator set"
                ))),
            },
        }
    }

    fn normal_form(&self, word: Vec<usize>) -> Result<BTreeMap<Vec<usize>, FpScalar>> {
        let p = self.ctx.p() as usize;
        let mut out: BTreeMap<Vec<usize>, FpScalar> = BTreeMap::new();
        let mut stack = vec![(word, 1u32)];
        while let Some((w, c)) = stack.pop() {
            if let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                stack.push((swapped, c));
                if let Some((k, sign)) = self.bracket(w[i], w[i + 1])? {
                    let mut shorter = w[..i].to_vec();
                    shorter.push(k);
                    shorter.extend_from_slice(&w[i + 2..]);
                    stack.push((shorter, self.ctx.mul(c, sign)));
                }
                continue;
            }
            if w.windows(p).any(|run| run.iter().all(|&x| x == run[0])) {
                continue;
            }
            let e = out.entry(w).or_insert(0);
            *e = self.ctx.add(*e, c);
        }
        out.retain(|_, c| *c != 0);
        Ok(out)
    }
}

/// Checks that E⁰ products of A_q(n) are reproduced by the power-commutator
/// presentation: every product of two basis monomials is brought to normal
/// order using only the relations, and the result is compared with the
/// product computed from the Milnor basis.
pub fn presentation_check(ctx: PrimePower, n: usize, order: AtomicOrder) -> Result<PresentationReport> {
    let mut gens = subalgebra_generators(ctx, n);
    gens.sort_by(|a, b| cmp_atomic(a, b, order));
    let index: HashMap<u64, usize> = gens.iter().enumerate().map(|(i, g)| (g.degree(), i)).collect();
    let no = NormalOrder {
        ctx,
        gens: &gens,
        index,
    };

    // Basis monomials as sorted index words with exponents below p.
    let p = ctx.p();
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 0..gens.len() {
        let mut next = Vec::new();
        for w in &words {
            for k in 0..p {
                let mut v = w.clone();
                v.extend(std::iter::repeat(i).take(k as usize));
                next.push(v);
            }
        }
        words = next;
    }
    let mut values: HashMap<Vec<usize>, E0Element> = HashMap::new();
    for w in &words {
        let mut acc = E0Element::unit(ctx);
        for &i in w {
            acc = e0_product(&acc, &gens[i].element())?;
        }
        values.insert(w.clone(), acc);
    }

    let mut mismatches = Vec::new();
    let mut pairs = 0usize;
    for u in &words {
        for v in &words {
            pairs += 1;
            let direct = e0_product(&values[u], &values[v])?;
            let mut cat = u.clone();
            cat.extend_from_slice(v);
            let grading = direct.grading();
            let mut predicted = E0Element::zero(ctx, grading);
            for (w, c) in no.normal_form(cat)? {
                let val = values
                    .get(&w)
                    .ok_or_else(|| Error::Verification("normal form is not a basis word".into()))?;
                predicted = predicted.try_add(&val.scale(c))?;
            }
            if predicted.value() != direct.value() && mismatches.len() < 20 {
                let label = |w: &Vec<usize>| {
                    w.iter().map(|&i| gens[i].to_string()).collect::<Vec<_>>().join("")
                };
                mismatches.push(format!(
                    "{} * {}: presentation gives {}, Milnor gives {}",
                    label(u),
                    label(v),
                    predicted,
                    direct
                ));
            }
        }
    }
    Ok(PresentationReport {
        q: ctx.q(),
        n,
        generators: gens.iter().map(|g| g.degree()).collect(),
        basis_size: words.len(),
        pairs_checked: pairs,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adem::{word_to_milnor, Word};

    fn q(p: u32, e: u32) -> PrimePower {
        PrimePower::new(p, e).unwrap()
    }

    fn seq(v: &[u64]) -> MilnorSeq {
        MilnorSeq::new(v.to_vec())
    }

    #[test]
    fn formula_examples() {
        let c = q(2, 1);
        for (r, m) in [
            (&[0, 4][..], 2),
            (&[6, 2], 4),
            (&[5, 0, 1], 5),
            (&[2, 1, 1], 6),
            (&[3, 3], 6),
        ] {
            assert_eq!(filtration_of_seq(&seq(r), &c), m);
        }
        assert_eq!(filtration_of_seq(&seq(&[7, 2]), &q(3, 1)), 7);
        assert_eq!(filtration(&MilnorElement::zero(c)), Filtration::Infinite);
        assert!(try_filtration(&MilnorElement::zero(c)).is_err());
        let x = word_to_milnor(&Word::new(c, vec![8, 3, 1]));
        assert_eq!(filtration(&x), Filtration::Finite(4));
    }

    #[test]
    fn oracle_examples() {
        let c = q(2, 1);
        let mut o = FiltrationOracle::new(c, None);
        let m = |o: &mut FiltrationOracle, e: &[u64]| {
            o.filtration(&word_to_milnor(&Word::new(c, e.to_vec()))).unwrap()
        };
        assert_eq!(m(&mut o, &[2, 2]), Filtration::Finite(3));
        assert_eq!(m(&mut o, &[2, 1, 2]), Filtration::Finite(3));
        assert_eq!(m(&mut o, &[2, 1, 2, 1]), Filtration::Finite(4));
        assert_eq!(m(&mut o, &[]), Filtration::Finite(0));
        let mut sub = FiltrationOracle::new(c, Some(1));
        assert_eq!(
            sub.filtration(&MilnorElement::pa(c, 4)),
            Err(Error::NotInSubalgebra)
        );
    }

    #[test]
    fn e0_examples() {
        let c = q(2, 1);
        let x = E0Element::basis(c, seq(&[4, 2]));
        let y = E0Element::basis(c, seq(&[1, 2]));
        assert_eq!(e0_product(&x, &y).unwrap().to_string(), "P(4,2,1)");
        assert_eq!(e0_product(&E0Element::unit(c), &x).unwrap(), x);

        let c4 = q(2, 2);
        let p8 = AtomicGenerator::from_degree(c4, 8).unwrap();
        let sq = e0_product(&p8.element(), &p8.element()).unwrap();
        assert!(sq.is_zero());
    }

    #[test]
    fn atomic_lists() {
        let a3: Vec<u64> = atomic_numbers(q(3, 1), 40).iter().map(|g| g.degree()).collect();
        assert_eq!(a3, [1, 3, 4, 9, 12, 13, 27, 36, 39, 40]);
        let a4: Vec<u64> = atomic_numbers(q(2, 2), 85).iter().map(|g| g.degree()).collect();
        for x in [1, 2, 4, 8, 5, 10, 20, 40, 21, 42, 85] {
            assert!(a4.contains(&x));
        }
        assert!(!a4.contains(&3));
        assert!(AtomicGenerator::from_degree(q(5, 1), 1).is_some());
    }

    #[test]
    fn orders() {
        let c = q(3, 1);
        let mut g = atomic_numbers(c, 40);
        g.sort_by(|a, b| cmp_atomic(a, b, AtomicOrder::Z));
        let z: Vec<u64> = g.iter().map(|g| g.degree()).collect();
        assert_eq!(z, [1, 4, 3, 13, 12, 9, 40, 39, 36, 27]);
    }

    #[test]
    fn commutators() {
        let c4 = q(2, 2);
        let g = |a| AtomicGenerator::from_degree(c4, a).unwrap();
        assert_eq!(e0_commutator(&g(4), &g(1)).unwrap(), g(5).element());
        assert_eq!(e0_commutator(&g(8), &g(2)).unwrap(), g(10).element());
        assert!(e0_commutator(&g(8), &g(1)).unwrap().is_zero());
        assert!(e0_power_is_zero(&g(4)).unwrap());
        let c3 = q(3, 1);
        assert!(e0_power_is_zero(&AtomicGenerator::from_degree(c3, 1).unwrap()).unwrap());
    }

    #[test]
    fn monks() {
        let c3 = q(3, 1);
        let g = |a| AtomicGenerator::from_degree(c3, a).unwrap();
        let m = GenMonomial::new(c3, AtomicOrder::Z, [(g(1), 1), (g(4), 2), (g(3), 2)]).unwrap();
        assert_eq!(m.to_milnor_seq(), seq(&[7, 2]));
        assert_eq!(GenMonomial::from_milnor_seq(&seq(&[7, 2]), c3, AtomicOrder::Z), m);
        let c4 = q(2, 2);
        let g4 = |a| AtomicGenerator::from_degree(c4, a).unwrap();
        let m = GenMonomial::new(c4, AtomicOrder::Z, [(g4(1), 1), (g4(10), 1), (g4(8), 1)]).unwrap();
        assert_eq!(m.to_milnor_seq(), seq(&[9, 2]));
    }

    #[test]
    fn poincare() {
        assert_eq!(format_poly(&poincare_e0(3, &q(2, 1)).unwrap()), "1 + 2t + 2t^2 + 2t^3 + t^4");
        assert_eq!(
            poincare_e0(3, &q(2, 2)).unwrap(),
            [1, 4, 8, 12, 14, 12, 8, 4, 1]
        );
        let a2 = poincare_aq(&q(2, 1), 12);
        assert_eq!((a2[0], a2[9], a2[12]), (1, 5, 7));
    }

    #[test]
    fn presentation_small() {
        let r = presentation_check(q(2, 1), 1, AtomicOrder::Z).unwrap();
        assert_eq!(r.basis_size, 8);
        assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    }
}
