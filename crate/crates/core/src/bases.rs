//! P^s_t bases and Arnon A bases of A_q, their change-of-basis matrices to
//! the Milnor basis, and the minimal-monomial description of the Y-Arnon basis.
//!
//! Both families are indexed by the same data as the Milnor basis: a monomial
//! in the q-atomic generators with exponents below p. A P^s_t monomial takes
//! the product of the elements P(0, ..., 0, p^s); an Arnon monomial replaces
//! each generator (s, t) by the block X^n_s = P^{p^n} P^{p^{n-e}} ... P^{p^s}
//! with n = s + (t-1)e.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::adem::{admissible_basis, milnor_seq_of_admissible, word_to_milnor, Word};
use crate::arith::{EchelonBasis, FpMatrix, FpScalar, PrimePower};
use crate::error::{Error, Result};
use crate::may::{filtration_of_seq, E0Element, GenMonomial};
use crate::milnor::{cmp_left, cmp_right, milnor_basis, MilnorElement, MilnorSeq};

pub use crate::may::{cmp_atomic, AtomicGenerator, AtomicOrder};

/// Default ceiling on the number of words enumerated by [`minimal_monomials`].
pub const WORD_LIMIT: u64 = 2_000_000;

/// Default ceiling on the dimension of a change-of-basis matrix.
pub const BASIS_LIMIT: u64 = 5000;

/// Right-justified order: pad on the left, then compare from the right.
/// Documented for comparison only; triangularity uses the right order.
pub fn cmp_right_justified(a: &[u64], b: &[u64]) -> Ordering {
    let n = a.len().max(b.len());
    for k in 0..n {
        let x = if k < a.len() { a[a.len() - 1 - k] } else { 0 };
        let y = if k < b.len() { b[b.len() - 1 - k] } else { 0 };
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

/// A product of the elements P^s_t in the chosen order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PstMonomial(pub GenMonomial);

impl PstMonomial {
    pub fn milnor_value(&self) -> MilnorElement {
        self.0.milnor_value()
    }

    /// The Milnor sequence paired with this monomial.
    pub fn milnor_seq(&self) -> MilnorSeq {
        self.0.to_milnor_seq()
    }

    pub fn atomic_sequence(&self) -> Vec<AtomicGenerator> {
        self.0.sequence()
    }
}

impl fmt::Display for PstMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.0.ctx().p() == 2 { "Sq" } else { "P" };
        let seq: Vec<String> = self.0.sequence().iter().map(|g| g.degree().to_string()).collect();
        if seq.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{name}[{}]", seq.join(","))
        }
    }
}

/// The elementary Arnon monomial X^n_k = P^{p^n} P^{p^{n-e}} ... P^{p^k}.
pub fn arnon_block(ctx: PrimePower, n: u32, k: u32) -> Result<Word> {
    let e = ctx.e();
    if n < k || (n - k) % e != 0 {
        return Err(Error::InvalidArgument(format!(
            "X^{n}_{k} needs n >= k and n = k mod {e}"
        )));
    }
    let p = ctx.p() as u64;
    let exps = (0..=(n - k) / e).map(|i| p.pow(n - i * e)).collect();
    Ok(Word::new(ctx, exps))
}

/// The block X^n_s for the generator (s, t).
fn block_of(g: &AtomicGenerator) -> Word {
    let n = g.s() + (g.t() - 1) * g.ctx().e();
    arnon_block(g.ctx(), n, g.s()).expect("valid block")
}

/// A product of elementary Arnon monomials in the chosen order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArnonMonomial(pub GenMonomial);

impl ArnonMonomial {
    pub fn blocks(&self) -> Vec<Word> {
        self.0.sequence().iter().map(block_of).collect()
    }

    /// The monomial as a plain word in the generators P^{p^j}.
    pub fn flat_word(&self) -> Word {
        self.blocks()
            .iter()
            .fold(Word::empty(self.0.ctx()), |acc, b| acc.concat(b))
    }

    pub fn milnor_seq(&self) -> MilnorSeq {
        self.0.to_milnor_seq()
    }

    pub fn milnor_value(&self) -> MilnorElement {
        word_to_milnor(&self.flat_word())
    }

    pub fn atomic_sequence(&self) -> Vec<AtomicGenerator> {
        self.0.sequence()
    }
}

impl fmt::Display for ArnonMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self.blocks().iter().map(|b| b.to_string()).collect();
        if blocks.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", blocks.join(" * "))
        }
    }
}

/// The Arnon monomial paired with P(R): one block per element of pin(r_j).
pub fn milnor_to_arnon(r: &MilnorSeq, ctx: PrimePower, order: AtomicOrder) -> ArnonMonomial {
    ArnonMonomial(GenMonomial::from_milnor_seq(r, ctx, order))
}

pub fn arnon_to_milnor(m: &ArnonMonomial) -> MilnorSeq {
    m.milnor_seq()
}

/// P^s_t monomials of degree d, in the right order of their Milnor sequences.
pub fn pst_basis(d: u64, order: AtomicOrder, ctx: &PrimePower) -> Vec<PstMonomial> {
    milnor_basis(d, ctx)
        .iter()
        .map(|r| PstMonomial(GenMonomial::from_milnor_seq(r, *ctx, order)))
        .collect()
}

/// Arnon monomials of degree d, in increasing right order of the flat words.
pub fn arnon_basis(d: u64, order: AtomicOrder, ctx: &PrimePower) -> Vec<ArnonMonomial> {
    let mut v: Vec<ArnonMonomial> = milnor_basis(d, ctx)
        .iter()
        .map(|r| milnor_to_arnon(r, *ctx, order))
        .collect();
    v.sort_by_key(|m| m.flat_word());
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasisKind {
    Admissible,
    PstY,
    PstZ,
    ArnonY,
    ArnonZ,
    Milnor,
}

impl FromStr for BasisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "admissible" => BasisKind::Admissible,
            "pstY" => BasisKind::PstY,
            "pstZ" => BasisKind::PstZ,
            "arnonY" => BasisKind::ArnonY,
            "arnonZ" => BasisKind::ArnonZ,
            "milnor" => BasisKind::Milnor,
            _ => return Err(Error::InvalidArgument(format!("unknown basis kind {s}"))),
        })
    }
}

/// How rows of a change-of-basis matrix are sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RowOrder {
    /// Left lexicographic order on exponent sequences.
    Left,
    /// Right order on exponent sequences.
    Right,
    /// Lexicographic order on atomic sequences, compared in the Z order.
    Zlex,
    /// May filtration of the paired Milnor element, then its right order.
    Filtration,
}

impl FromStr for RowOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "left" => RowOrder::Left,
            "right" => RowOrder::Right,
            "zlex" => RowOrder::Zlex,
            "filtration" => RowOrder::Filtration,
            _ => return Err(Error::InvalidArgument(format!("unknown row order {s}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Ascending,
    Descending,
}

/// Direction used when none is given. Arnon tables list the right order
/// from the top down and the Z-lex table from the largest sequence.
pub fn default_direction(kind: BasisKind, order: RowOrder) -> Direction {
    match (kind, order) {
        (BasisKind::ArnonY | BasisKind::ArnonZ, RowOrder::Right) => Direction::Descending,
        (_, RowOrder::Zlex) => Direction::Descending,
        _ => Direction::Ascending,
    }
}

/// Coefficients of a basis in terms of the Milnor basis in one degree.
#[derive(Debug, Clone, Serialize)]
pub struct BasisMatrix {
    pub q: u64,
    pub degree: u64,
    pub kind: BasisKind,
    pub order: RowOrder,
    pub direction: Direction,
    pub row_labels: Vec<String>,
    #[serde(serialize_with = "ser_seqs")]
    pub columns: Vec<MilnorSeq>,
    #[serde(skip)]
    pub entries: FpMatrix,
}

fn ser_seqs<S: serde::Serializer>(v: &[MilnorSeq], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl BasisMatrix {
    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> Vec<FpScalar> {
        self.entries.row(i).to_vec()
    }

    pub fn rows(&self) -> Vec<Vec<FpScalar>> {
        (0..self.size()).map(|i| self.row(i)).collect()
    }

    pub fn column_labels(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.to_string()).collect()
    }

    /// CSV with the Milnor labels as header and row labels in the first column.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.column_labels());
        w.write_record(&header)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        for (i, label) in self.row_labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(self.entries.row(i).iter().map(|x| x.to_string()));
            w.write_record(&rec)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Aligned text table.
    pub fn to_text(&self) -> String {
        let cols = self.column_labels();
        let lw = self.row_labels.iter().map(|s| s.len()).max().unwrap_or(0);
        let widths: Vec<usize> = cols.iter().map(|c| c.len().max(1)).collect();
        let mut out = format!("{:lw$}", "");
        for (c, w) in cols.iter().zip(&widths) {
            out.push_str(&format!("  {c:>w$}"));
        }
        out.push('\n');
        for (i, label) in self.row_labels.iter().enumerate() {
            out.push_str(&format!("{label:lw$}"));
            for (x, w) in self.entries.row(i).iter().zip(&widths) {
                out.push_str(&format!("  {x:>w$}"));
            }
            out.push('\n');
        }
        out
    }
}

struct Row {
    label: String,
    column: MilnorSeq,
    word: Option<Word>,
    atoms: Vec<AtomicGenerator>,
    value: MilnorElement,
}

fn rows_for(d: u64, kind: BasisKind, ctx: &PrimePower) -> Vec<Row> {
    match kind {
        BasisKind::Admissible => admissible_basis(d, ctx)
            .into_iter()
            .map(|w| Row {
                label: w.to_string(),
                column: milnor_seq_of_admissible(&w).expect("admissible"),
                value: word_to_milnor(&w),
                word: Some(w),
                atoms: Vec::new(),
            })
            .collect(),
        BasisKind::Milnor => milnor_basis(d, ctx)
            .into_iter()
            .map(|r| Row {
                label: r.to_string(),
                value: MilnorElement::basis(*ctx, r.clone()),
                atoms: GenMonomial::from_milnor_seq(&r, *ctx, AtomicOrder::Z).sequence(),
                column: r,
                word: None,
            })
            .collect(),
        BasisKind::PstY | BasisKind::PstZ => {
            let order = if kind == BasisKind::PstY { AtomicOrder::Y } else { AtomicOrder::Z };
            pst_basis(d, order, ctx)
                .into_iter()
                .map(|m| Row {
                    label: m.to_string(),
                    column: m.milnor_seq(),
                    value: m.milnor_value(),
                    atoms: m.atomic_sequence(),
                    word: None,
                })
                .collect()
        }
        BasisKind::ArnonY | BasisKind::ArnonZ => {
            let order = if kind == BasisKind::ArnonY { AtomicOrder::Y } else { AtomicOrder::Z };
            arnon_basis(d, order, ctx)
                .into_iter()
                .map(|m| Row {
                    label: m.to_string(),
                    column: m.milnor_seq(),
                    value: m.milnor_value(),
                    atoms: m.atomic_sequence(),
                    word: Some(m.flat_word()),
                })
                .collect()
        }
    }
}

fn cmp_atoms(a: &[AtomicGenerator], b: &[AtomicGenerator], order: AtomicOrder) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = cmp_atomic(x, y, order);
        if c != Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// Change-of-basis matrix from `kind` to the Milnor basis in degree `d`.
///
/// Rows are sorted by `order` in `direction` (or [`default_direction`]);
/// column j is the Milnor element paired with row j.
pub fn change_of_basis(
    d: u64,
    kind: BasisKind,
    order: RowOrder,
    direction: Option<Direction>,
    ctx: &PrimePower,
) -> Result<BasisMatrix> {
    change_of_basis_capped(d, kind, order, direction, ctx, BASIS_LIMIT)
}

/// [`change_of_basis`] with an explicit ceiling on the basis size.
pub fn change_of_basis_capped(
    d: u64,
    kind: BasisKind,
    order: RowOrder,
    direction: Option<Direction>,
    ctx: &PrimePower,
    cap: u64,
) -> Result<BasisMatrix> {
    let dim = crate::may::poincare_aq(ctx, d)[d as usize];
    if dim > cap {
        return Err(Error::guard("basis size", dim, cap));
    }
    let mut rows = rows_for(d, kind, ctx);
    let has_words = rows.iter().all(|r| r.word.is_some());
    let key_seq = |r: &Row| -> Vec<u64> {
        match &r.word {
            Some(w) if has_words => w.exps().to_vec(),
            _ => r.column.as_slice().to_vec(),
        }
    };
    match order {
        RowOrder::Left => rows.sort_by(|a, b| cmp_left(&key_seq(a), &key_seq(b))),
        RowOrder::Right => rows.sort_by(|a, b| cmp_right(&key_seq(a), &key_seq(b))),
        RowOrder::Zlex => {
            if kind == BasisKind::Admissible {
                return Err(Error::InvalidArgument(
                    "admissible monomials have no atomic sequence".into(),
                ));
            }
            rows.sort_by(|a, b| cmp_atoms(&a.atoms, &b.atoms, AtomicOrder::Z))
        }
        RowOrder::Filtration => rows.sort_by(|a, b| {
            filtration_of_seq(&a.column, ctx)
                .cmp(&filtration_of_seq(&b.column, ctx))
                .then_with(|| a.column.cmp(&b.column))
        }),
    }
    let direction = direction.unwrap_or_else(|| default_direction(kind, order));
    if direction == Direction::Descending {
        rows.reverse();
    }
    let columns: Vec<MilnorSeq> = rows.iter().map(|r| r.column.clone()).collect();
    let index: HashMap<&MilnorSeq, usize> = columns.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let n = rows.len();
    let mut entries = FpMatrix::zeros(ctx.p(), n, n);
    for (i, r) in rows.iter().enumerate() {
        for (s, c) in r.value.terms() {
            let j = *index.get(s).ok_or_else(|| {
                Error::Verification(format!("{s} is not paired with any row"))
            })?;
            entries.set(i, j, c);
        }
    }
    Ok(BasisMatrix {
        q: ctx.q(),
        degree: d,
        kind,
        order,
        direction,
        row_labels: rows.into_iter().map(|r| r.label).collect(),
        columns,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    Upper,
    Lower,
}

/// Outcome of [`verify_triangular`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triangularity {
    pub triangular: bool,
    pub shape: Option<Shape>,
    /// Every diagonal entry is 1 (always so for q = 2).
    pub unit_diagonal: bool,
    /// First offending (row, column) for the upper-triangular reading.
    pub violation: Option<(usize, usize)>,
}

fn first_violation(m: &FpMatrix, upper: bool) -> Option<(usize, usize)> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.get(i, j);
            let bad = if i == j {
                v == 0
            } else if upper {
                i > j && v != 0
            } else {
                i < j && v != 0
            };
            if bad {
                return Some((i, j));
            }
        }
    }
    None
}

/// Nonzero diagonal with zeros on one side of it. For odd p the diagonal
/// carries scalars such as (P^1)^2 = 2P(2), so units are reported separately.
pub fn verify_triangular(m: &BasisMatrix) -> Triangularity {
    let e = &m.entries;
    let unit_diagonal = e.rows() == e.cols() && (0..e.rows()).all(|i| e.get(i, i) == 1);
    let up = first_violation(&m.entries, true);
    if up.is_none() {
        return Triangularity {
            triangular: true,
            shape: Some(Shape::Upper),
            unit_diagonal,
            violation: None,
        };
    }
    if first_violation(&m.entries, false).is_none() {
        return Triangularity {
            triangular: true,
            shape: Some(Shape::Lower),
            unit_diagonal,
            violation: None,
        };
    }
    Triangularity {
        triangular: false,
        shape: None,
        unit_diagonal,
        violation: up,
    }
}

/// Whether every P^s_t monomial of degree d is a nonzero multiple of its
/// Monks partner plus terms of strictly higher May filtration.
pub fn pst_e0_agreement(d: u64, order: AtomicOrder, ctx: &PrimePower) -> Result<bool> {
    for m in pst_basis(d, order, ctx) {
        let r = m.milnor_seq();
        let base = filtration_of_seq(&r, ctx);
        let v = m.milnor_value();
        if v.coefficient(&r) == 0 {
            return Ok(false);
        }
        if v.terms().any(|(s, _)| s != &r && filtration_of_seq(s, ctx) <= base) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every word of degree d in the letters P^{p^j}, in increasing right order.
pub fn p_power_words(d: u64, ctx: &PrimePower, limit: u64) -> Result<Vec<Word>> {
    let p = ctx.p() as u64;
    let mut letters = vec![1u64];
    while letters.last().expect("nonempty") * p <= d {
        letters.push(letters.last().expect("nonempty") * p);
    }
    // Count first so the guard refuses before allocating.
    let mut count = vec![0u64; d as usize + 1];
    count[0] = 1;
    for k in 1..=d as usize {
        count[k] = letters
            .iter()
            .filter(|&&l| l as usize <= k)
            .map(|&l| count[k - l as usize])
            .fold(0u64, |a, b| a.saturating_add(b));
    }
    if count[d as usize] > limit {
        return Err(Error::guard("word count", count[d as usize], limit));
    }
    let mut out = Vec::with_capacity(count[d as usize] as usize);
    let mut cur = Vec::new();
    fn rec(rem: u64, letters: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for &l in letters {
            if l > rem {
                break;
            }
            cur.push(l);
            rec(rem - l, letters, cur, out);
            cur.pop();
        }
    }
    rec(d, &letters, &mut cur, &mut out);
    let mut words: Vec<Word> = out.into_iter().map(|e| Word::new(*ctx, e)).collect();
    words.sort();
    Ok(words)
}

/// Greedy basis from words in the P^{p^j} taken in increasing right order:
/// a word is kept when its Milnor expansion is independent of those kept.
pub fn minimal_monomials(d: u64, ctx: &PrimePower, limit: u64) -> Result<Vec<Word>> {
    let basis = milnor_basis(d, ctx);
    let index: HashMap<&MilnorSeq, usize> = basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut span = EchelonBasis::new(ctx.p(), basis.len());
    let mut kept = Vec::new();
    for w in p_power_words(d, ctx, limit)? {
        if span.dim() == basis.len() {
            break;
        }
        let mut v = vec![0; basis.len()];
        for (s, c) in word_to_milnor(&w).terms() {
            v[index[s]] = c;
        }
        if span.insert(&v) {
            kept.push(w);
        }
    }
    Ok(kept)
}

fn e0_word(w: &Word) -> E0Element {
    E0Element::project(&word_to_milnor(w), w.len() as u64)
}

/// Checks in E⁰(A_q): X^{k+te}_k = Σ_{r=0}^{t} X^{(r-1)e+k}_k · P[p^k(q^{t+1} - q^r)/(q-1)],
/// with X^{k-e}_k = 1.
pub fn xn0_expansion_check(k: u32, t: u32, ctx: &PrimePower) -> Result<bool> {
    let e = ctx.e();
    let lhs = arnon_block(*ctx, k + t * e, k)?;
    let grading = t as u64 + 1;
    let lhs_val = word_to_milnor(&lhs);
    let mut rhs = MilnorElement::zero(*ctx);
    for r in 0..=t {
        let head = if r == 0 {
            Word::empty(*ctx)
        } else {
            arnon_block(*ctx, k + (r - 1) * e, k)?
        };
        // p^k (q^{t+1} - q^r)/(q - 1) = p^{k+re} (q^{t+1-r} - 1)/(q - 1)
        let g = AtomicGenerator::new(*ctx, k + r * e, t + 1 - r);
        let term = &word_to_milnor(&head) * &MilnorElement::basis(*ctx, g.milnor_seq());
        rhs.add_scaled(&term, 1);
    }
    let in_grading = |x: &MilnorElement| {
        x.terms()
            .all(|(s, _)| filtration_of_seq(s, ctx) >= grading)
    };
    Ok(in_grading(&lhs_val)
        && in_grading(&rhs)
        && E0Element::project(&lhs_val, grading) == E0Element::project(&rhs, grading))
}

/// Whether w, read in E⁰, is a combination of strictly smaller words (right
/// order) in the letters P^{p^j} with the same degree and length.
pub fn reducible_in_right_order(w: &Word) -> Result<bool> {
    let ctx = w.ctx();
    let d = w.degree();
    let len = w.len();
    let basis = milnor_basis(d, &ctx);
    let index: HashMap<&MilnorSeq, usize> = basis.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let vec_of = |x: &E0Element| {
        let mut v = vec![0; basis.len()];
        for (s, c) in x.value().terms() {
            v[index[s]] = c;
        }
        v
    };
    let mut span = EchelonBasis::new(ctx.p(), basis.len());
    for u in p_power_words(d, &ctx, WORD_LIMIT)? {
        if u.len() != len || u.cmp(w) != Ordering::Less {
            continue;
        }
        span.insert(&vec_of(&e0_word(&u)));
    }
    Ok(span.contains(&vec_of(&e0_word(w))))
}
