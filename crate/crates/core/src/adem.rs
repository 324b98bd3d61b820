//! Words in the generators P^a, Adem rewriting, and admissible monomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::arith::{FpScalar, PrimePower};
use crate::error::{Error, Result};
use crate::milnor::{self, MilnorElement, MilnorSeq};

pub use crate::milnor::{cmp_left, cmp_right};

/// A formal monomial P^{a_1} ... P^{a_l} with every a_i ≥ 1.
///
/// `Ord` is the right order on exponent sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    ctx: PrimePower,
    exps: Vec<u64>,
}

impl Word {
    /// Builds a word, dropping P^0 letters.
    pub fn new(ctx: PrimePower, exps: Vec<u64>) -> Self {
        Word {
            ctx,
            exps: exps.into_iter().filter(|&a| a != 0).collect(),
        }
    }

    pub fn empty(ctx: PrimePower) -> Self {
        Word {
            ctx,
            exps: Vec::new(),
        }
    }

    pub fn letter(ctx: PrimePower, a: u64) -> Self {
        Self::new(ctx, vec![a])
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().sum()
    }

    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.ctx, other.ctx, "mixing words of different algebras");
        let mut exps = self.exps.clone();
        exps.extend_from_slice(&other.exps);
        Word {
            ctx: self.ctx,
            exps,
        }
    }

    pub fn is_admissible(&self) -> bool {
        is_admissible_exps(&self.exps, self.ctx.q())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_right(&self.exps, &other.exps).then_with(|| self.ctx.cmp(&other.ctx))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Letter prefix used when printing: "Sq" at p = 2, "P" otherwise.
pub fn letter_name(ctx: &PrimePower) -> &'static str {
    if ctx.p() == 2 {
        "Sq"
    } else {
        "P"
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let name = letter_name(&self.ctx);
        for (i, a) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{name}^{a}")?;
        }
        Ok(())
    }
}

fn is_admissible_exps(exps: &[u64], q: u64) -> bool {
    exps.windows(2).all(|w| w[0] >= q.saturating_mul(w[1]))
}

pub fn is_admissible(w: &Word) -> bool {
    w.is_admissible()
}

/// A linear combination of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSum {
    ctx: PrimePower,
    terms: BTreeMap<Word, FpScalar>,
}

impl WordSum {
    pub fn zero(ctx: PrimePower) -> Self {
        WordSum {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_word(w: Word) -> Self {
        let mut s = Self::zero(w.ctx);
        s.add_term(w, 1);
        s
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn add_term(&mut self, w: Word, c: FpScalar) {
        assert_eq!(w.ctx, self.ctx, "mixing words of different algebras");
        let c = c % self.ctx.p();
        if c == 0 {
            return;
        }
        let v = self.ctx.add(self.terms.get(&w).copied().unwrap_or(0), c);
        if v == 0 {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, v);
        }
    }

    pub fn add_scaled(&mut self, other: &WordSum, c: FpScalar) {
        for (w, &v) in &other.terms {
            self.add_term(w.clone(), self.ctx.mul(v, c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, FpScalar)> + '_ {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> FpScalar {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn to_milnor(&self) -> MilnorElement {
        let mut out = MilnorElement::zero(self.ctx);
        for (w, &c) in &self.terms {
            out.add_scaled(&word_to_milnor(w), c);
        }
        out
    }
}

impl fmt::Display for WordSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c != 1 {
                write!(f, "{c}*")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// The Adem relation for P^a P^b with 1 ≤ a < q·b:
/// Σ_j (-1)^{a+j} C((q-1)(b-j)-1, a-qj) P^{a+b-j} P^j.
pub fn adem_expand(a: u64, b: u64, ctx: &PrimePower) -> Result<WordSum> {
    let q = ctx.q();
    if a == 0 || b == 0 || a >= q.saturating_mul(b) {
        return Err(Error::AlreadyAdmissible { a, b, q });
    }
    let mut out = WordSum::zero(*ctx);
    for j in 0..=a / q {
        // j ≤ a/q < b, so the upper index below is at least q-2 ≥ 0.
        let top = (q - 1) * (b - j) - 1;
        let c = ctx.binom(top, a - q * j);
        if c == 0 {
            continue;
        }
        let c = ctx.mul(c, ctx.sign(a + j));
        out.add_term(Word::new(*ctx, vec![a + b - j, j]), c);
    }
    Ok(out)
}

type WordKey = (PrimePower, Vec<u64>);
const MEMO_LIMIT: usize = 1 << 17;

type Memo = RwLock<HashMap<WordKey, Arc<Vec<(Vec<u64>, FpScalar)>>>>;

fn rewrite_memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(|| RwLock::new(HashMap::new()))
}

fn milnor_memo() -> &'static RwLock<HashMap<WordKey, MilnorElement>> {
    static M: OnceLock<RwLock<HashMap<WordKey, MilnorElement>>> = OnceLock::new();
    M.get_or_init(|| RwLock::new(HashMap::new()))
}

fn memo_insert<V>(lock: &RwLock<HashMap<WordKey, V>>, key: WordKey, v: V) {
    if let Ok(mut m) = lock.write() {
        if m.len() >= MEMO_LIMIT {
            m.clear();
        }
        m.insert(key, v);
    }
}

/// Rewrites a word as a sum of admissible words, always applying an Adem
/// relation to the leftmost inadmissible pair.
pub fn rewrite_to_admissible(w: &Word) -> WordSum {
    let ctx = w.ctx;
    let mut out = WordSum::zero(ctx);
    for (exps, c) in rewrite_exps(&ctx, &w.exps).iter() {
        out.add_term(
            Word {
                ctx,
                exps: exps.clone(),
            },
            *c,
        );
    }
    out
}

fn rewrite_exps(ctx: &PrimePower, exps: &[u64]) -> Arc<Vec<(Vec<u64>, FpScalar)>> {
    let q = ctx.q();
    let Some(i) = exps.windows(2).position(|w| w[0] < q.saturating_mul(w[1])) else {
        return Arc::new(vec![(exps.to_vec(), 1)]);
    };
    let key = (*ctx, exps.to_vec());
    if let Some(v) = rewrite_memo().read().ok().and_then(|m| m.get(&key).cloned()) {
        return v;
    }
    let relation = adem_expand(exps[i], exps[i + 1], ctx).expect("pair is inadmissible");
    let mut acc: BTreeMap<Vec<u64>, FpScalar> = BTreeMap::new();
    for (u, c) in relation.terms() {
        let mut next = exps[..i].to_vec();
        next.extend_from_slice(u.exps());
        next.extend_from_slice(&exps[i + 2..]);
        for (v, d) in rewrite_exps(ctx, &next).iter() {
            let e = acc.entry(v.clone()).or_insert(0);
            *e = ctx.add(*e, ctx.mul(c, *d));
        }
    }
    let v: Arc<Vec<_>> = Arc::new(acc.into_iter().filter(|(_, c)| *c != 0).collect());
    memo_insert(rewrite_memo(), key, v.clone());
    v
}

/// Milnor basis expansion of a word, P^a being P(a).
pub fn word_to_milnor(w: &Word) -> MilnorElement {
    exps_to_milnor(&w.ctx, &w.exps)
}

fn exps_to_milnor(ctx: &PrimePower, exps: &[u64]) -> MilnorElement {
    match exps.len() {
        0 => return MilnorElement::unit(*ctx),
        1 => return MilnorElement::pa(*ctx, exps[0]),
        _ => {}
    }
    let key = (*ctx, exps.to_vec());
    if let Some(v) = milnor_memo().read().ok().and_then(|m| m.get(&key).cloned()) {
        return v;
    }
    let (last, head) = exps.split_last().expect("nonempty");
    let prefix = exps_to_milnor(ctx, head);
    let v = &prefix * &MilnorElement::pa(*ctx, *last);
    memo_insert(milnor_memo(), key, v.clone());
    v
}

/// The sequence r_j = a_j - q·a_{j+1} of an admissible word.
pub fn milnor_seq_of_admissible(w: &Word) -> Result<MilnorSeq> {
    if !w.is_admissible() {
        return Err(Error::NotAdmissible(w.to_string()));
    }
    let q = w.ctx.q();
    let n = w.exps.len();
    let r = (0..n)
        .map(|j| w.exps[j] - if j + 1 < n { q * w.exps[j + 1] } else { 0 })
        .collect();
    Ok(MilnorSeq::new(r))
}

/// Inverse of [`milnor_seq_of_admissible`]: a_j = Σ_{i ≥ j} q^{i-j} r_i.
pub fn admissible_of_milnor_seq(r: &MilnorSeq, ctx: &PrimePower) -> Word {
    let q = ctx.q();
    let mut exps = vec![0u64; r.len()];
    let mut acc = 0u64;
    for j in (0..r.len()).rev() {
        acc = acc * q + r.as_slice()[j];
        exps[j] = acc;
    }
    Word { ctx: *ctx, exps }
}

/// Admissible words of degree `d` in the right order.
pub fn admissible_basis(d: u64, ctx: &PrimePower) -> Vec<Word> {
    let mut v: Vec<Word> = milnor::milnor_basis(d, ctx)
        .iter()
        .map(|r| admissible_of_milnor_seq(r, ctx))
        .collect();
    v.sort();
    v
}

/// Every word of degree `d` with at most `max_len` letters, in the right order.
pub fn all_words(d: u64, max_len: usize, ctx: &PrimePower) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: u64, max_len: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() == max_len {
            return;
        }
        for a in 1..=rem {
            cur.push(a);
            rec(rem - a, max_len, cur, out);
            cur.pop();
        }
    }
    rec(d, max_len, &mut cur, &mut out);
    let mut words: Vec<Word> = out.into_iter().map(|e| Word { ctx: *ctx, exps: e }).collect();
    words.sort();
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u32, e: u32) -> PrimePower {
        PrimePower::new(p, e).unwrap()
    }

    fn w(c: PrimePower, e: &[u64]) -> Word {
        Word::new(c, e.to_vec())
    }

    #[test]
    fn admissibility() {
        let c = q(2, 1);
        assert!(w(c, &[6, 2, 1]).is_admissible());
        assert!(Word::empty(c).is_admissible());
        assert!(!w(c, &[2, 4, 2, 1]).is_admissible());
        assert_eq!(w(c, &[3, 0, 1]).exps(), &[3, 1]);
    }

    #[test]
    fn adem_examples() {
        let c = q(2, 1);
        assert_eq!(adem_expand(2, 2, &c).unwrap().to_string(), "Sq^3 Sq^1");
        assert!(adem_expand(1, 1, &c).unwrap().is_zero());
        assert!(adem_expand(2, 1, &c).is_err());
    }

    #[test]
    fn rewrite_examples() {
        let c = q(2, 1);
        assert_eq!(rewrite_to_admissible(&w(c, &[2, 2])).to_string(), "Sq^3 Sq^1");
        assert_eq!(rewrite_to_admissible(&w(c, &[4])).to_string(), "Sq^4");
    }

    #[test]
    fn degree_nine_rows() {
        let c = q(2, 1);
        assert_eq!(
            word_to_milnor(&w(c, &[6, 2, 1])).to_string(),
            "P(2,0,1) + P(0,3) + P(3,2)"
        );
        assert_eq!(word_to_milnor(&w(c, &[7, 2])).to_string(), "P(3,2)");
        assert_eq!(word_to_milnor(&w(c, &[5])).to_string(), "P(5)");
        let basis: Vec<String> = admissible_basis(9, &c).iter().map(|x| x.to_string()).collect();
        assert_eq!(
            basis,
            ["Sq^6 Sq^2 Sq^1", "Sq^6 Sq^3", "Sq^7 Sq^2", "Sq^8 Sq^1", "Sq^9"]
        );
        assert_eq!(admissible_basis(0, &c), vec![Word::empty(c)]);
    }

    #[test]
    fn bijection() {
        let c = q(2, 1);
        let r = milnor_seq_of_admissible(&w(c, &[6, 2, 1])).unwrap();
        assert_eq!(r, MilnorSeq::new(vec![2, 0, 1]));
        assert_eq!(admissible_of_milnor_seq(&r, &c), w(c, &[6, 2, 1]));
        assert_eq!(
            admissible_of_milnor_seq(&MilnorSeq::new(vec![5]), &c),
            w(c, &[5])
        );
        assert!(milnor_seq_of_admissible(&w(c, &[1, 1])).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(cmp_right(&[3, 1], &[1, 1, 2]), Ordering::Greater);
        assert_eq!(cmp_left(&[1, 2], &[1, 2]), Ordering::Equal);
        assert_eq!(cmp_left(&[1, 2], &[1, 3]), Ordering::Less);
    }
}
