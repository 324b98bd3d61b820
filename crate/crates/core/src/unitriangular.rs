//! Unitriangular groups over F_p, their group algebras filtered by powers of
//! the augmentation ideal, and the comparison of E⁰(F_p U(n)) with
//! E⁰(A_p(n-2)).
//!
//! Group-algebra elements are dense vectors over the enumerated group. The
//! q = p^e variant works in the pattern subgroup of U(ne) whose entries sit
//! on superdiagonals divisible by e.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::arith::{EchelonBasis, FpScalar, PrimePower, SpanSolver};
use crate::error::{Error, Result};
use crate::may::{
    commutator_rule, e0_product, poincare_e0, subalgebra_generators, AtomicGenerator, AtomicOrder,
    E0Element, GenMonomial,
};
use crate::milnor::{cmp_left, milnor_basis, MilnorSeq};

/// Largest group that will be enumerated.
pub const GROUP_LIMIT: u64 = 100_000;
/// Largest group whose group algebra is handled with dense linear algebra.
pub const DENSE_LIMIT: u64 = 4096;

/// An upper unitriangular matrix over F_p, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniMatrix {
    n: usize,
    p: u32,
    entries: Vec<FpScalar>,
}

impl UniMatrix {
    pub fn identity(n: usize, p: u32) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        UniMatrix { n, p, entries }
    }

    /// I + v·E_{i,j}, with 1-based indices i < j.
    pub fn elementary(n: usize, p: u32, i: usize, j: usize, v: FpScalar) -> Self {
        assert!(1 <= i && i < j && j <= n, "E_{{{i},{j}}} is not strictly upper triangular");
        let mut m = UniMatrix::identity(n, p);
        m.entries[(i - 1) * n + (j - 1)] = v % p;
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry (i, j), 1-based.
    pub fn get(&self, i: usize, j: usize) -> FpScalar {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn mul(&self, other: &UniMatrix) -> UniMatrix {
        let n = self.n;
        let p = self.p as u64;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut s = 0u64;
                for k in i..=j {
                    s += self.entries[i * n + k] as u64 * other.entries[k * n + j] as u64;
                }
                entries[i * n + j] = (s % p) as FpScalar;
            }
        }
        UniMatrix {
            n,
            p: self.p,
            entries,
        }
    }

    /// Inverse by back substitution.
    pub fn inverse(&self) -> UniMatrix {
        let n = self.n;
        let p = self.p as u64;
        let mut inv = UniMatrix::identity(n, self.p);
        for j in 0..n {
            for i in (0..j).rev() {
                let mut s = 0u64;
                for k in i + 1..=j {
                    s += self.entries[i * n + k] as u64 * inv.entries[k * n + j] as u64;
                }
                inv.entries[i * n + j] = ((p - s % p) % p) as FpScalar;
            }
        }
        inv
    }

    /// (x, y) = x⁻¹ y⁻¹ x y.
    pub fn commutator(&self, other: &UniMatrix) -> UniMatrix {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    pub fn is_identity(&self) -> bool {
        *self == UniMatrix::identity(self.n, self.p)
    }

    /// Smallest d ≥ 1 with a nonzero entry on the d-th superdiagonal.
    pub fn first_nonzero_diagonal(&self) -> Option<usize> {
        (1..self.n).find(|&d| (1..=self.n - d).any(|i| self.get(i, i + d) != 0))
    }
}

impl fmt::Display for UniMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let r: Vec<String> = (0..self.n).map(|j| self.entries[i * self.n + j].to_string()).collect();
                r.join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// The unitriangular matrices of size n whose off-diagonal support lies on
/// superdiagonals j - i divisible by `step`. With step 1 this is U(n).
#[derive(Debug, Clone)]
pub struct PatternGroup {
    n: usize,
    p: u32,
    step: usize,
    positions: Vec<(usize, usize)>,
    elements: Vec<UniMatrix>,
}

impl PatternGroup {
    pub fn new(n: usize, p: u32, step: usize, cap: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 || step == 0 {
            return Err(Error::InvalidArgument("size and step must be positive".into()));
        }
        let mut positions = Vec::new();
        for d in (step..n).step_by(step) {
            for i in 1..=n - d {
                positions.push((i, i + d));
            }
        }
        let order = (p as u64)
            .checked_pow(positions.len() as u32)
            .filter(|&o| o <= cap)
            .ok_or_else(|| Error::guard("group order", (p as u64).saturating_pow(positions.len() as u32), cap))?;
        let mut elements = Vec::with_capacity(order as usize);
        for k in 0..order {
            let mut m = UniMatrix::identity(n, p);
            let mut x = k;
            for &(i, j) in &positions {
                m.entries[(i - 1) * n + (j - 1)] = (x % p as u64) as FpScalar;
                x /= p as u64;
            }
            elements.push(m);
        }
        Ok(PatternGroup {
            n,
            p,
            step,
            positions,
            elements,
        })
    }

    /// U(n, F_p).
    pub fn unitriangular(n: usize, p: u32) -> Result<Self> {
        PatternGroup::new(n, p, 1, GROUP_LIMIT)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[UniMatrix] {
        &self.elements
    }

    /// Free entries (i, j), ordered by superdiagonal and then by row.
    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn index_of(&self, m: &UniMatrix) -> usize {
        let mut idx = 0u64;
        for &(i, j) in self.positions.iter().rev() {
            idx = idx * self.p as u64 + m.get(i, j) as u64;
        }
        idx as usize
    }

    pub fn elementary(&self, pos: (usize, usize)) -> UniMatrix {
        UniMatrix::elementary(self.n, self.p, pos.0, pos.1, 1)
    }

    /// Filtration weight of position (i, j): the superdiagonal index over the step.
    pub fn weight(&self, pos: (usize, usize)) -> u64 {
        ((pos.1 - pos.0) / self.step) as u64
    }

    /// Elementary matrices on the lowest allowed superdiagonal; they generate the group.
    pub fn generators(&self) -> Vec<UniMatrix> {
        self.positions
            .iter()
            .filter(|&&(i, j)| j - i == self.step)
            .map(|&pos| self.elementary(pos))
            .collect()
    }

    /// g ↦ index of g·s, for each g.
    pub fn right_table(&self, s: &UniMatrix) -> Vec<usize> {
        self.elements.iter().map(|g| self.index_of(&g.mul(s))).collect()
    }

    /// Members whose support avoids the first k - 1 allowed superdiagonals.
    pub fn deep_members(&self, k: u64) -> Vec<usize> {
        (0..self.order())
            .filter(|&g| {
                self.positions
                    .iter()
                    .all(|&pos| self.weight(pos) >= k || self.elements[g].get(pos.0, pos.1) == 0)
            })
            .collect()
    }

    /// The label of position (i, j) as a q-atomic generator, q = p^step.
    pub fn label(&self, pos: (usize, usize)) -> Result<AtomicGenerator> {
        let ctx = PrimePower::new(self.p, self.step as u32)?;
        Ok(AtomicGenerator::new(ctx, pos.0 as u32 - 1, self.weight(pos) as u32))
    }
}

/// Lists U(n, F_p) in a fixed order.
pub fn enumerate_group(n: usize, p: u32) -> Result<Vec<UniMatrix>> {
    Ok(PatternGroup::unitriangular(n, p)?.elements)
}

/// An element of F_p G, dense over the enumerated group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    p: u32,
    coeffs: Vec<FpScalar>,
}

impl GroupAlgebraElement {
    pub fn zero(group: &PatternGroup) -> Self {
        GroupAlgebraElement {
            p: group.p,
            coeffs: vec![0; group.order()],
        }
    }

    pub fn group_element(group: &PatternGroup, g: &UniMatrix) -> Self {
        let mut x = GroupAlgebraElement::zero(group);
        x.coeffs[group.index_of(g)] = 1;
        x
    }

    pub fn one(group: &PatternGroup) -> Self {
        GroupAlgebraElement::group_element(group, &UniMatrix::identity(group.n, group.p))
    }

    /// f = 1 - g.
    pub fn one_minus(group: &PatternGroup, g: &UniMatrix) -> Self {
        let one = GroupAlgebraElement::one(group);
        one.sub(&GroupAlgebraElement::group_element(group, g))
    }

    pub fn coeffs(&self) -> &[FpScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Nonzero terms as (group element, coefficient).
    pub fn terms<'g>(&'g self, group: &'g PatternGroup) -> impl Iterator<Item = (&'g UniMatrix, FpScalar)> + 'g {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (&group.elements[i], c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.p as u64;
        GroupAlgebraElement {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| ((a as u64 + b as u64) % p) as FpScalar)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.p as u64;
        GroupAlgebraElement {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| ((a as u64 + p - b as u64) % p) as FpScalar)
                .collect(),
        }
    }

    /// Right multiplication by a group element given as a table g ↦ g·s.
    pub fn times_table(&self, table: &[usize]) -> Self {
        let mut coeffs = vec![0; self.coeffs.len()];
        for (g, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                coeffs[table[g]] = c;
            }
        }
        GroupAlgebraElement { p: self.p, coeffs }
    }

    pub fn mul(&self, other: &Self, group: &PatternGroup) -> Self {
        let p = self.p as u64;
        let mut acc = vec![0u64; self.coeffs.len()];
        for (g, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (h, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let gh = group.index_of(&group.elements[g].mul(&group.elements[h]));
                acc[gh] = (acc[gh] + a as u64 * b as u64) % p;
            }
        }
        GroupAlgebraElement {
            p: self.p,
            coeffs: acc.into_iter().map(|c| c as FpScalar).collect(),
        }
    }

    /// The antipode g ↦ g⁻¹.
    pub fn antipode(&self, group: &PatternGroup) -> Self {
        let mut coeffs = vec![0; self.coeffs.len()];
        for (g, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                coeffs[group.index_of(&group.elements[g].inverse())] = c;
            }
        }
        GroupAlgebraElement { p: self.p, coeffs }
    }
}

/// The powers A^0 ⊇ A^1 ⊇ ... ⊇ A^top ⊋ 0 of the augmentation ideal.
#[derive(Debug, Clone)]
pub struct FiltrationBasis {
    levels: Vec<EchelonBasis>,
}

impl FiltrationBasis {
    /// A^k, which is zero beyond the last stored level.
    pub fn level(&self, k: usize) -> Option<&EchelonBasis> {
        self.levels.get(k)
    }

    /// dim A^k for k = 0, 1, ..., ending with 0.
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|b| b.dim()).collect()
    }

    /// dim A^k / A^{k+1}.
    pub fn quotient_dims(&self) -> Vec<u64> {
        self.levels
            .windows(2)
            .map(|w| (w[0].dim() - w[1].dim()) as u64)
            .collect()
    }

    /// Largest k with v ∈ A^k, or None for v = 0.
    pub fn level_of(&self, v: &[FpScalar]) -> Option<usize> {
        if v.iter().all(|&c| c == 0) {
            return None;
        }
        (0..self.levels.len()).rev().find(|&k| self.levels[k].contains(v))
    }

    /// Canonical representative of v modulo A^k.
    pub fn reduce(&self, v: &[FpScalar], k: usize) -> Vec<FpScalar> {
        match self.levels.get(k) {
            Some(b) => {
                let mut w = v.to_vec();
                b.reduce(&mut w);
                w
            }
            None => v.to_vec(),
        }
    }
}

/// Computes every power of the augmentation ideal of F_p G.
pub fn augmentation_powers(group: &PatternGroup) -> Result<FiltrationBasis> {
    let n = group.order();
    if n as u64 > DENSE_LIMIT {
        return Err(Error::guard("dense group algebra", n as u64, DENSE_LIMIT));
    }
    let p = group.p;
    let tables: Vec<Vec<usize>> = group.generators().iter().map(|s| group.right_table(s)).collect();
    let mut full = EchelonBasis::new(p, n);
    for g in 0..n {
        let mut v = vec![0; n];
        v[g] = 1;
        full.insert(&v);
    }
    let mut levels = vec![full];
    let mut current: Vec<Vec<FpScalar>> = (0..n)
        .map(|g| {
            let mut v = vec![0; n];
            v[g] = 1;
            v
        })
        .collect();
    loop {
        // A^{k+1} = A^k·A, the right ideal generated by v(s - 1).
        let mut next = EchelonBasis::new(p, n);
        let mut queue = Vec::new();
        for v in &current {
            let x = GroupAlgebraElement { p, coeffs: v.clone() };
            for t in &tables {
                let w = x.times_table(t).sub(&x).coeffs;
                if next.insert(&w) {
                    queue.push(w);
                }
            }
        }
        let mut spanning = queue.clone();
        while let Some(w) = queue.pop() {
            let x = GroupAlgebraElement { p, coeffs: w };
            for t in &tables {
                let u = x.times_table(t).coeffs;
                if next.insert(&u) {
                    queue.push(u.clone());
                    spanning.push(u);
                }
            }
        }
        let done = next.dim() == 0;
        levels.push(next);
        if done {
            break;
        }
        current = spanning;
    }
    Ok(FiltrationBasis { levels })
}

/// D_k = {g : g - 1 ∈ A^k}, computed from the filtration and compared with
/// the explicit description by vanishing superdiagonals.
pub fn dimension_subgroup(group: &PatternGroup, filt: &FiltrationBasis, k: usize) -> Result<Vec<UniMatrix>> {
    let one = GroupAlgebraElement::one(group);
    let by_ideal: Vec<usize> = (0..group.order())
        .filter(|&g| {
            let v = GroupAlgebraElement::group_element(group, &group.elements[g]).sub(&one);
            match filt.level(k) {
                Some(b) => b.contains(v.coeffs()),
                None => v.is_zero(),
            }
        })
        .collect();
    let explicit = group.deep_members(k as u64);
    if by_ideal != explicit {
        return Err(Error::Verification(format!(
            "D_{k} has {} elements by the ideal, {} by superdiagonals",
            by_ideal.len(),
            explicit.len()
        )));
    }
    Ok(by_ideal.into_iter().map(|g| group.elements[g].clone()).collect())
}

/// Terms γ_1 = G, γ_{k+1} = (G, γ_k) of the lower central series, as sorted index sets.
pub fn lower_central_series(group: &PatternGroup) -> Result<Vec<Vec<usize>>> {
    let n = group.order();
    if n as u64 > DENSE_LIMIT {
        return Err(Error::guard("commutator enumeration", n as u64, DENSE_LIMIT));
    }
    let mut series = vec![(0..n).collect::<Vec<_>>()];
    loop {
        let last = series.last().expect("nonempty");
        let mut gens = HashSet::new();
        for g in &group.elements {
            for &h in last {
                gens.insert(group.index_of(&g.commutator(&group.elements[h])));
            }
        }
        let gens: Vec<usize> = gens.into_iter().collect();
        let id = group.index_of(&UniMatrix::identity(group.n, group.p));
        let mut seen: HashSet<usize> = HashSet::from([id]);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for &s in &gens {
                let y = group.index_of(&group.elements[x].mul(&group.elements[s]));
                if seen.insert(y) {
                    queue.push(y);
                }
            }
        }
        let mut next: Vec<usize> = seen.into_iter().collect();
        next.sort_unstable();
        let stop = next.len() == 1;
        series.push(next);
        if stop {
            return Ok(series);
        }
    }
}

/// The product of cosets x + A^{i+1} and y + A^{j+1} in E⁰, reduced modulo A^{i+j+1}.
pub fn e0_group_product(
    group: &PatternGroup,
    filt: &FiltrationBasis,
    x: (&GroupAlgebraElement, usize),
    y: (&GroupAlgebraElement, usize),
) -> Result<Vec<FpScalar>> {
    let xy = x.0.mul(y.0, group);
    let g = x.1 + y.1;
    if let Some(b) = filt.level(g) {
        if !b.contains(xy.coeffs()) {
            return Err(Error::InvalidArgument(format!("product is not in A^{g}")));
        }
    } else if !xy.is_zero() {
        return Err(Error::InvalidArgument(format!("product is not in A^{g}")));
    }
    Ok(filt.reduce(xy.coeffs(), g + 1))
}

/// Checks every commutator of elementary matrices against the labels: for
/// a < b with abutting blocks (e_a, e_b) = e_{a+b}, for a > b it is the
/// inverse, and otherwise the two commute.
pub fn commutator_law_check(group: &PatternGroup) -> Result<bool> {
    for &x in group.positions() {
        for &y in group.positions() {
            let (ex, ey) = (group.elementary(x), group.elementary(y));
            let (a, b) = (group.label(x)?, group.label(y)?);
            let (hi, lo) = if a.degree() >= b.degree() { (a, b) } else { (b, a) };
            let expected = match commutator_rule(&hi, &lo) {
                Some(c) if a.degree() != b.degree() => {
                    let pos = (c.s() as usize + 1, c.s() as usize + 1 + c.t() as usize * group.step);
                    let e = group.elementary(pos);
                    if a.degree() < b.degree() {
                        e
                    } else {
                        e.inverse()
                    }
                }
                _ => UniMatrix::identity(group.n, group.p),
            };
            if ex.commutator(&ey) != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of comparing E⁰ of a group algebra with E⁰ of a sub-Hopf algebra of A_q.
#[derive(Debug, Clone, Serialize)]
pub struct PriddyReport {
    pub n: usize,
    pub p: u32,
    pub e: u32,
    pub group_order: usize,
    pub generators: Vec<u64>,
    pub group_dims: Vec<u64>,
    pub steenrod_dims: Vec<u64>,
    pub basis_size: usize,
    pub pairs_checked: usize,
    pub primitive: bool,
    pub antipode: bool,
    pub group_table: Vec<Vec<String>>,
    pub steenrod_table: Vec<Vec<String>>,
    pub mismatches: Vec<String>,
}

impl PriddyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
            && self.primitive
            && self.antipode
            && self.group_dims == self.steenrod_dims
            && self.basis_size == self.group_order
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Formats a grading table as "1 | f1, f2 | ...".
pub fn format_table(table: &[Vec<String>]) -> String {
    table.iter().map(|row| row.join(", ")).collect::<Vec<_>>().join(" | ")
}

struct GroupSide<'g> {
    group: &'g PatternGroup,
    filt: FiltrationBasis,
    tables: HashMap<(usize, usize), Vec<usize>>,
    by_label: HashMap<u64, (usize, usize)>,
}

impl GroupSide<'_> {
    /// f_{a_1} ... f_{a_r} computed by right multiplication.
    fn word(&self, seq: &[AtomicGenerator]) -> GroupAlgebraElement {
        let mut v = GroupAlgebraElement::one(self.group);
        for g in seq {
            let t = &self.tables[&self.by_label[&g.degree()]];
            v = v.sub(&v.times_table(t));
        }
        v
    }
}

/// Coordinates in the monomials of one grading, modulo the next power of the ideal.
struct GradingSolver {
    solver: SpanSolver,
    deep: usize,
    members: Vec<usize>,
}

fn label_of(g: &AtomicGenerator, k: u32) -> String {
    if k == 1 {
        format!("f{}", g.degree())
    } else {
        format!("f{}^{k}", g.degree())
    }
}

fn milnor_name(r: &MilnorSeq, ctx: &PrimePower) -> String {
    if r.is_empty() {
        return "1".into();
    }
    let s = r.to_string();
    if ctx.p() == 2 {
        s.replacen('P', "Sq", 1)
    } else {
        s
    }
}

/// Compares E⁰(F_p H) with E⁰(A_q(n-2)) under f_a ↦ P[a], where H is U(n)
/// for q = p and the pattern subgroup of U(ne) on superdiagonals divisible
/// by e otherwise. Factors of basis monomials are taken in `order`.
pub fn priddy_check_with_order(n: usize, ctx: PrimePower, order: AtomicOrder, cap: u64) -> Result<PriddyReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let (p, e) = (ctx.p(), ctx.e());
    let group = PatternGroup::new(n * e as usize, p, e as usize, cap)?;
    let filt = augmentation_powers(&group)?;
    let gens = subalgebra_generators(ctx, n - 2);

    let mut by_label = HashMap::new();
    let mut tables = HashMap::new();
    for &pos in group.positions() {
        let g = group.label(pos)?;
        by_label.insert(g.degree(), pos);
        tables.insert(pos, group.right_table(&group.elementary(pos)));
    }
    let mut labels: Vec<u64> = by_label.keys().copied().collect();
    labels.sort_unstable();
    let generators: Vec<u64> = gens.iter().map(|g| g.degree()).collect();
    if labels != generators {
        return Err(Error::Verification(format!(
            "group labels {labels:?} differ from generators {generators:?}"
        )));
    }
    let side = GroupSide {
        group: &group,
        filt,
        tables,
        by_label,
    };

    // Every monomial with exponents below p.
    let mut monomials = Vec::new();
    let total = (p as u64).pow(gens.len() as u32);
    for k in 0..total {
        let mut x = k;
        let mut factors = Vec::new();
        for g in &gens {
            factors.push((*g, (x % p as u64) as u32));
            x /= p as u64;
        }
        monomials.push(GenMonomial::new(ctx, order, factors)?);
    }
    let group_vecs: Vec<GroupAlgebraElement> = monomials.iter().map(|m| side.word(&m.sequence())).collect();
    let steen_vals: Vec<E0Element> = monomials.iter().map(|m| m.e0_value()).collect();

    let mut mismatches = Vec::new();
    let group_dims = side.filt.quotient_dims();
    let steenrod_dims = poincare_e0(n, &ctx)?;

    // Group side: monomials of grading k plus A^{k+1} must span A^k.
    let mut by_grading: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, m) in monomials.iter().enumerate() {
        by_grading.entry(m.grading()).or_default().push(i);
    }
    let len = group.order();
    let mut group_solvers: HashMap<u64, GradingSolver> = HashMap::new();
    for (&g, members) in &by_grading {
        let deep: Vec<Vec<FpScalar>> = side
            .filt
            .level(g as usize + 1)
            .map(|b| b.basis().map(|r| r.to_vec()).collect())
            .unwrap_or_default();
        let mut rows = deep.clone();
        for &i in members {
            if side.filt.level(g as usize).map_or(true, |b| !b.contains(group_vecs[i].coeffs())) {
                mismatches.push(format!("{} is not in A^{g}", monomials[i]));
            }
            rows.push(group_vecs[i].coeffs().to_vec());
        }
        match SpanSolver::new(p, len, &rows) {
            Ok(solver) => {
                group_solvers.insert(
                    g,
                    GradingSolver {
                        solver,
                        deep: deep.len(),
                        members: members.clone(),
                    },
                );
            }
            Err(_) => mismatches.push(format!("grading {g} monomials are dependent modulo A^{}", g + 1)),
        }
    }

    // Steenrod side: E⁰ values of the monomials of one degree and grading.
    let mut steen_groups: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (i, m) in monomials.iter().enumerate() {
        steen_groups.entry((m.degree(), m.grading())).or_default().push(i);
    }
    type Solver = (SpanSolver, Vec<usize>, HashMap<MilnorSeq, usize>);
    let mut steen_solvers: HashMap<(u64, u64), Solver> = HashMap::new();
    for (&(d, g), members) in &steen_groups {
        let basis = milnor_basis(d, &ctx);
        let index: HashMap<MilnorSeq, usize> = basis.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let rows: Vec<Vec<FpScalar>> = members
            .iter()
            .map(|&i| milnor_vector(&steen_vals[i], &index))
            .collect();
        match SpanSolver::new(p, basis.len(), &rows) {
            Ok(s) => {
                steen_solvers.insert((d, g), (s, members.clone(), index));
            }
            Err(_) => mismatches.push(format!("E0 values in degree {d}, grading {g} are dependent")),
        }
    }

    let mut pairs_checked = 0;
    if mismatches.is_empty() {
        for (i, x) in monomials.iter().enumerate() {
            for (j, y) in monomials.iter().enumerate() {
                pairs_checked += 1;
                let g = x.grading() + y.grading();
                let d = x.degree() + y.degree();
                let mut seq = x.sequence();
                seq.extend(y.sequence());
                let lhs = group_coordinates(&side, &group_solvers, &seq, g, len)?;
                let prod = e0_product(&steen_vals[i], &steen_vals[j])?;
                let rhs = match steen_solvers.get(&(d, g)) {
                    Some((s, members, index)) => {
                        let v = milnor_vector(&prod, index);
                        let c = s.coordinates(&v).ok_or_else(|| {
                            Error::Verification(format!("{x}·{y} leaves the monomial span"))
                        })?;
                        members.iter().zip(c).filter(|(_, c)| *c != 0).map(|(&m, c)| (m, c)).collect()
                    }
                    None if prod.is_zero() => BTreeMap::new(),
                    None => {
                        mismatches.push(format!("{x}·{y} is nonzero outside the monomial basis"));
                        continue;
                    }
                };
                if lhs != rhs {
                    mismatches.push(format!(
                        "{x}·{y}: group side {}, Steenrod side {}",
                        describe(&lhs, &monomials),
                        describe(&rhs, &monomials)
                    ));
                }
            }
        }
    }

    // Generators are primitive and χ(f_a) = -f_a, both modulo higher filtration.
    let adapted = adapted_basis(&side.filt, p, len);
    let mut primitive = true;
    let mut antipode = true;
    for g in &gens {
        let f = side.word(&[*g]);
        let t = g.grading() as usize;
        let delta_f = coproduct_residual(&f, &group, &adapted);
        if delta_f.is_some_and(|m| m <= t) {
            primitive = false;
        }
        let chi = f.antipode(&group).add(&f);
        if side.filt.level(t + 1).is_some_and(|b| !b.contains(chi.coeffs())) {
            antipode = false;
        }
    }

    let (group_table, steenrod_table) = tables_by_grading(&monomials, &ctx);
    Ok(PriddyReport {
        n,
        p,
        e,
        group_order: group.order(),
        generators,
        group_dims,
        steenrod_dims,
        basis_size: monomials.len(),
        pairs_checked,
        primitive,
        antipode,
        group_table,
        steenrod_table,
        mismatches,
    })
}

/// The comparison with factors in increasing order of their labels.
pub fn priddy_check(n: usize, ctx: PrimePower) -> Result<PriddyReport> {
    priddy_check_with_order(n, ctx, AtomicOrder::Degree, GROUP_LIMIT)
}

fn milnor_vector(x: &E0Element, index: &HashMap<MilnorSeq, usize>) -> Vec<FpScalar> {
    let mut v = vec![0; index.len()];
    for (r, c) in x.value().terms() {
        v[index[r]] = c;
    }
    v
}

fn group_coordinates(
    side: &GroupSide<'_>,
    solvers: &HashMap<u64, GradingSolver>,
    seq: &[AtomicGenerator],
    g: u64,
    len: usize,
) -> Result<BTreeMap<usize, FpScalar>> {
    let v = side.word(seq);
    match solvers.get(&g) {
        Some(s) => {
            let c = s
                .solver
                .coordinates(v.coeffs())
                .ok_or_else(|| Error::Verification(format!("product of grading {g} is not in A^{g}")))?;
            Ok(s.members
                .iter()
                .zip(&c[s.deep..])
                .filter(|(_, c)| **c != 0)
                .map(|(&m, &c)| (m, c))
                .collect())
        }
        None => {
            // No monomials here, so A^g = 0 and the product must vanish.
            debug_assert_eq!(v.coeffs().len(), len);
            if v.is_zero() {
                Ok(BTreeMap::new())
            } else {
                Err(Error::Verification(format!("nonzero product in empty grading {g}")))
            }
        }
    }
}

fn describe(c: &BTreeMap<usize, FpScalar>, monomials: &[GenMonomial]) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.iter()
        .map(|(&m, &k)| if k == 1 { monomials[m].to_string() } else { format!("{k}*{}", monomials[m]) })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A basis b_1, ..., b_N of F_p G with levels, such that A^k is spanned by
/// the b_i of level at least k, and a solver for coordinates in it.
struct Adapted {
    solver: SpanSolver,
    levels: Vec<usize>,
}

fn adapted_basis(filt: &FiltrationBasis, p: u32, len: usize) -> Adapted {
    let mut acc = EchelonBasis::new(p, len);
    let mut vectors = Vec::new();
    let mut levels = Vec::new();
    for k in (0..filt.levels.len()).rev() {
        for v in filt.levels[k].basis() {
            if acc.insert(v) {
                vectors.push(v.to_vec());
                levels.push(k);
            }
        }
    }
    Adapted {
        solver: SpanSolver::new(p, len, &vectors).expect("independent by construction"),
        levels,
    }
}

/// Filtration of Δ(f) - f⊗1 - 1⊗f in F_p G ⊗ F_p G, or None if it vanishes.
fn coproduct_residual(f: &GroupAlgebraElement, group: &PatternGroup, adapted: &Adapted) -> Option<usize> {
    let n = group.order();
    let p = group.p as u64;
    let id = group.index_of(&UniMatrix::identity(group.n, group.p));
    // Coefficient matrix over pairs (g, h) in the group basis.
    let mut m: HashMap<(usize, usize), u64> = HashMap::new();
    for (g, &c) in f.coeffs().iter().enumerate() {
        if c == 0 {
            continue;
        }
        *m.entry((g, g)).or_insert(0) += c as u64;
        *m.entry((g, id)).or_insert(0) += (p - c as u64) % p;
        *m.entry((id, g)).or_insert(0) += (p - c as u64) % p;
    }
    m.retain(|_, c| *c % p != 0);
    if m.is_empty() {
        return None;
    }
    // Change basis on each side: coordinates of each group element.
    let coords: HashMap<usize, Vec<FpScalar>> = m
        .keys()
        .flat_map(|&(g, h)| [g, h])
        .collect::<HashSet<_>>()
        .into_iter()
        .map(|g| {
            let mut v = vec![0; n];
            v[g] = 1;
            (g, adapted.solver.coordinates(&v).expect("basis spans"))
        })
        .collect();
    let mut out = vec![vec![0u64; n]; n];
    for (&(g, h), &c) in &m {
        for (b, &x) in coords[&g].iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (b2, &y) in coords[&h].iter().enumerate() {
                if y != 0 {
                    out[b][b2] = (out[b][b2] + c % p * x as u64 % p * y as u64) % p;
                }
            }
        }
    }
    let mut best: Option<usize> = None;
    for (b, row) in out.iter().enumerate() {
        for (b2, &c) in row.iter().enumerate() {
            if c != 0 {
                let lv = adapted.levels[b] + adapted.levels[b2];
                best = Some(best.map_or(lv, |x| x.min(lv)));
            }
        }
    }
    best
}

/// Monomial labels per grading, sorted within a grading by the left order
/// of their Milnor images.
fn tables_by_grading(monomials: &[GenMonomial], ctx: &PrimePower) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let top = monomials.iter().map(|m| m.grading()).max().unwrap_or(0);
    let mut group = vec![Vec::new(); top as usize + 1];
    let mut steen = vec![Vec::new(); top as usize + 1];
    let mut sorted: Vec<&GenMonomial> = monomials.iter().collect();
    sorted.sort_by(|a, b| cmp_left(a.to_milnor_seq().as_slice(), b.to_milnor_seq().as_slice()));
    for m in sorted {
        let g = m.grading() as usize;
        let name = if m.factors().is_empty() {
            "1".to_string()
        } else {
            m.factors().iter().map(|(a, k)| label_of(a, *k)).collect()
        };
        group[g].push(name);
        steen[g].push(milnor_name(&m.to_milnor_seq(), ctx));
    }
    (group, steen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u32, e: u32) -> PrimePower {
        PrimePower::new(p, e).unwrap()
    }

    #[test]
    fn group_orders() {
        assert_eq!(enumerate_group(3, 2).unwrap().len(), 8);
        assert_eq!(enumerate_group(2, 5).unwrap().len(), 5);
        assert_eq!(enumerate_group(4, 2).unwrap().len(), 64);
        assert!(matches!(
            PatternGroup::new(7, 2, 1, GROUP_LIMIT),
            Err(Error::ResourceGuard { .. })
        ));
    }

    #[test]
    fn inverse_and_commutator() {
        let g = PatternGroup::unitriangular(3, 3).unwrap();
        for x in g.elements() {
            assert!(x.mul(&x.inverse()).is_identity());
        }
        let (e1, e2) = (g.elementary((1, 2)), g.elementary((2, 3)));
        assert_eq!(e1.commutator(&e2), g.elementary((1, 3)));
        assert_eq!(e2.commutator(&e1), g.elementary((1, 3)).inverse());
        assert!(e1.commutator(&e1).is_identity());
    }

    #[test]
    fn augmentation_dims() {
        let g = PatternGroup::unitriangular(3, 2).unwrap();
        assert_eq!(augmentation_powers(&g).unwrap().dims(), [8, 7, 5, 3, 1, 0]);
        let g = PatternGroup::unitriangular(2, 2).unwrap();
        assert_eq!(augmentation_powers(&g).unwrap().dims(), [2, 1, 0]);
    }

    #[test]
    fn dimension_subgroups_u3() {
        let g = PatternGroup::unitriangular(3, 2).unwrap();
        let f = augmentation_powers(&g).unwrap();
        assert_eq!(dimension_subgroup(&g, &f, 1).unwrap().len(), 8);
        let d2 = dimension_subgroup(&g, &f, 2).unwrap();
        assert_eq!(d2.len(), 2);
        assert!(d2.contains(&g.elementary((1, 3))));
        assert_eq!(dimension_subgroup(&g, &f, 3).unwrap().len(), 1);
    }

    #[test]
    fn e0_relations_u3() {
        let g = PatternGroup::unitriangular(3, 2).unwrap();
        let filt = augmentation_powers(&g).unwrap();
        let f = |i, j| GroupAlgebraElement::one_minus(&g, &g.elementary((i, j)));
        let (f1, f2, f3) = (f(1, 2), f(2, 3), f(1, 3));
        let ab = e0_group_product(&g, &filt, (&f1, 1), (&f2, 1)).unwrap();
        let ba = e0_group_product(&g, &filt, (&f2, 1), (&f1, 1)).unwrap();
        let bracket: Vec<u32> = ab.iter().zip(&ba).map(|(a, b)| (a + b) % 2).collect();
        assert_eq!(bracket, filt.reduce(f3.coeffs(), 3));
        assert!(e0_group_product(&g, &filt, (&f1, 1), (&f1, 1)).unwrap().iter().all(|&c| c == 0));
        let one = GroupAlgebraElement::one(&g);
        assert_eq!(e0_group_product(&g, &filt, (&f1, 1), (&one, 0)).unwrap(), filt.reduce(f1.coeffs(), 2));
    }

    #[test]
    fn commutator_laws() {
        for (n, p, step) in [(3, 2, 1), (4, 3, 1), (4, 2, 1), (6, 2, 2)] {
            let g = PatternGroup::new(n, p, step, GROUP_LIMIT).unwrap();
            assert!(commutator_law_check(&g).unwrap(), "n={n} p={p} step={step}");
        }
    }

    #[test]
    fn priddy_small() {
        let r = priddy_check(3, q(2, 1)).unwrap();
        assert!(r.passed(), "{:?}", r.mismatches);
        assert_eq!(format_table(&r.group_table), "1 | f1, f2 | f3, f1f2 | f1f3, f2f3 | f1f2f3");
        assert_eq!(
            format_table(&r.steenrod_table),
            "1 | Sq(1), Sq(2) | Sq(0,1), Sq(3) | Sq(1,1), Sq(2,1) | Sq(3,1)"
        );
        let r = priddy_check(2, q(2, 1)).unwrap();
        assert!(r.passed());
        assert_eq!(r.group_dims, [1, 1]);
    }

    #[test]
    fn priddy_q4() {
        let r = priddy_check(3, q(2, 2)).unwrap();
        assert_eq!(r.generators, [1, 2, 4, 5, 8, 10]);
        assert!(r.passed(), "{:?}", r.mismatches);
    }
}
