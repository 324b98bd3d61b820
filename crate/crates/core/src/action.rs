//! The action of A_q on polynomial rings F_p[x_1, x_2, ...].
//!
//! Every variable has grading 1 and P(x) = x + x^q. An operation of degree k
//! raises polynomial degree by (q - 1)k.

use std::collections::BTreeMap;
use std::fmt;

use crate::adem::Word;
use crate::arith::{alpha, multinomial_mod_p, FpScalar, PrimePower};
use crate::error::Result;
use crate::milnor::{milnor_basis, MilnorElement, MilnorSeq};

/// A monomial x_{i_1}^{d_1} ... x_{i_k}^{d_k}; variables are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<u32, u64>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(i: u32) -> Self {
        Monomial::power(i, 1)
    }

    pub fn power(i: u32, d: u64) -> Self {
        let mut m = BTreeMap::new();
        if d > 0 {
            m.insert(i, d);
        }
        Monomial(m)
    }

    pub fn from_exps<I: IntoIterator<Item = (u32, u64)>>(exps: I) -> Self {
        let mut m = Monomial::one();
        for (i, d) in exps {
            m = m.times(&Monomial::power(i, d));
        }
        m
    }

    pub fn exponent(&self, i: u32) -> u64 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn exps(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.0.iter().map(|(&i, &d)| (i, d))
    }

    pub fn degree(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (&i, &d) in &other.0 {
            *m.entry(i).or_insert(0) += d;
        }
        Monomial(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(i, d)| if *d == 1 { format!("x{i}") } else { format!("x{i}^{d}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// A polynomial with coefficients in F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    ctx: PrimePower,
    terms: BTreeMap<Monomial, FpScalar>,
}

impl Poly {
    pub fn zero(ctx: PrimePower) -> Self {
        Poly {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: PrimePower) -> Self {
        Poly::monomial(ctx, Monomial::one())
    }

    pub fn monomial(ctx: PrimePower, m: Monomial) -> Self {
        let mut p = Poly::zero(ctx);
        p.add_term(m, 1);
        p
    }

    pub fn var(ctx: PrimePower, i: u32) -> Self {
        Poly::monomial(ctx, Monomial::var(i))
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FpScalar)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> FpScalar {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: FpScalar) {
        let c = self.ctx.reduce(c as u64);
        if c == 0 {
            return;
        }
        let v = self.ctx.add(self.terms.get(&m).copied().unwrap_or(0), c);
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: FpScalar) {
        for (m, a) in other.terms() {
            self.add_term(m.clone(), self.ctx.mul(a, c));
        }
    }

    pub fn plus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, 1);
        out
    }

    /// Product, dropping monomials of degree above `cap` when one is given.
    pub fn times_capped(&self, other: &Poly, cap: Option<u64>) -> Poly {
        let mut out = Poly::zero(self.ctx);
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                let mn = m.times(n);
                if cap.is_some_and(|c| mn.degree() > c) {
                    continue;
                }
                out.add_term(mn, self.ctx.mul(a, b));
            }
        }
        out
    }

    pub fn times(&self, other: &Poly) -> Poly {
        self.times_capped(other, None)
    }

    /// The homogeneous part of degree d.
    pub fn part(&self, d: u64) -> Poly {
        let mut out = Poly::zero(self.ctx);
        for (m, c) in self.terms() {
            if m.degree() == d {
                out.add_term(m.clone(), c);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, &c)| if c == 1 { m.to_string() } else { format!("{c}*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// P^k(x^d) = C(d, k) x^{d + (q-1)k}, in the variable x_1.
pub fn pk_on_power(k: u64, d: u64, ctx: &PrimePower) -> Poly {
    let mut out = Poly::zero(*ctx);
    out.add_term(Monomial::power(1, d + (ctx.q() - 1) * k), ctx.binom(d, k));
    out
}

/// P(R) on a single power x^d: pick r_i of the d factors to raise to x^{q^i}.
fn milnor_on_power(r: &MilnorSeq, d: u64, ctx: &PrimePower) -> Option<(u64, FpScalar)> {
    let used: u64 = r.as_slice().iter().sum();
    if used > d {
        return None;
    }
    let mut parts = vec![d - used];
    parts.extend_from_slice(r.as_slice());
    let c = multinomial_mod_p(&parts, ctx.p());
    if c == 0 {
        return None;
    }
    Some((d + (ctx.q() - 1) * r.degree(ctx), c))
}

fn milnor_on_monomial(r: &MilnorSeq, vars: &[(u32, u64)], ctx: &PrimePower, out: &mut Poly, acc: Monomial, coeff: FpScalar) {
    let Some((&(i, d), rest)) = vars.split_first() else {
        if r.is_empty() {
            out.add_term(acc, coeff);
        }
        return;
    };
    if rest.is_empty() {
        if let Some((e, c)) = milnor_on_power(r, d, ctx) {
            out.add_term(acc.times(&Monomial::power(i, e)), ctx.mul(coeff, c));
        }
        return;
    }
    // Cartan formula: the coproduct of P(R) is the sum of P(S) (x) P(T), S + T = R.
    for (s, t) in r.splittings() {
        if let Some((e, c)) = milnor_on_power(&s, d, ctx) {
            milnor_on_monomial(&t, rest, ctx, out, acc.times(&Monomial::power(i, e)), ctx.mul(coeff, c));
        }
    }
}

/// The action of the Milnor basis element P(R).
pub fn milnor_action(r: &MilnorSeq, f: &Poly, ctx: &PrimePower) -> Poly {
    let mut out = Poly::zero(*ctx);
    for (m, c) in f.terms() {
        let vars: Vec<(u32, u64)> = m.exps().collect();
        milnor_on_monomial(r, &vars, ctx, &mut out, Monomial::one(), c);
    }
    out
}

pub fn element_action(x: &MilnorElement, f: &Poly) -> Poly {
    let ctx = x.ctx();
    let mut out = Poly::zero(ctx);
    for (r, c) in x.terms() {
        out.add_scaled(&milnor_action(r, f, &ctx), c);
    }
    out
}

/// Applies the letters of a word right to left, as composition of operators.
pub fn word_action(w: &Word, f: &Poly) -> Poly {
    let ctx = w.ctx();
    w.exps()
        .iter()
        .rev()
        .fold(f.clone(), |acc, &a| milnor_action(&MilnorSeq::single(1, a), &acc, &ctx))
}

/// The total operation P = sum of all P^k, multiplicative with P(x_i) = x_i + x_i^q.
/// Monomials of degree above `cap` are dropped.
pub fn total_power(f: &Poly, ctx: &PrimePower, cap: u64) -> Poly {
    let mut out = Poly::zero(*ctx);
    for (m, c) in f.terms() {
        let mut img = Poly::one(*ctx);
        for (i, d) in m.exps() {
            let mut base = Poly::var(*ctx, i);
            base.add_term(Monomial::power(i, ctx.q()), 1);
            for _ in 0..d {
                img = img.times_capped(&base, Some(cap));
            }
        }
        out.add_scaled(&img, c);
    }
    out
}

/// Whether P^k(x^d) is zero or lands in a degree with no larger digit sum.
pub fn alpha_monotone(k: u64, d: u64, ctx: &PrimePower) -> bool {
    ctx.binom(d, k) == 0 || alpha(d + (ctx.q() - 1) * k, ctx.p()) <= alpha(d, ctx.p())
}

/// P^{p^j} is indecomposable: it moves x^{p^j}, while every product P(S)P(T)
/// of positive degrees summing to p^j kills it.
pub fn indecomposability_witness(j: u32, ctx: &PrimePower) -> Result<bool> {
    let pj = (ctx.p() as u64).pow(j);
    let x = Poly::monomial(*ctx, Monomial::power(1, pj));
    if milnor_action(&MilnorSeq::single(1, pj), &x, ctx).is_zero() {
        return Ok(false);
    }
    for a in 1..pj {
        for t in milnor_basis(a, ctx) {
            let inner = milnor_action(&t, &x, ctx);
            if inner.is_zero() {
                continue;
            }
            for s in milnor_basis(pj - a, ctx) {
                if !milnor_action(&s, &inner, ctx).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
