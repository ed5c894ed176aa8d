//! Sparse exact linear algebra over Q.
//!
//! Rank and cokernel counts run a fraction-free elimination on integer rows (each rational
//! row is scaled by the lcm of its denominators). Coefficients start as `i128` with checked
//! arithmetic; on overflow the whole computation restarts on `BigInt`. Solving and nullspaces
//! use a plain rational Gauss-Jordan pass, which only ever sees small systems.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{format_rational, lcm_of_denominators, Rational};
use crate::ring::Monomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index {index} out of range for size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("duplicate label {0}")]
    DuplicateLabel(Label),
}

/// Row or column label of an assembled matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Index(usize),
    Mono(Monomial),
    /// A monomial in one summand of a direct sum. For Koszul terms the summand is the
    /// subset of row components, encoded as a bit mask.
    Comp(u32, Monomial),
    /// Generator `g * N * g^-1 - N` identifying two g-layer representations of `N`,
    /// in the summand given by the mask.
    Relation(u32, Monomial),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "#{i}"),
            Label::Mono(m) => write!(f, "{m}"),
            Label::Comp(c, m) => write!(f, "[{c}]{m}"),
            Label::Relation(c, m) => write!(f, "rel[{c}]({m})"),
        }
    }
}

/// Interns labels into dense indices in first-seen order.
#[derive(Debug, Clone, Default)]
pub struct LabelIndex {
    map: HashMap<Label, usize>,
    labels: Vec<Label>,
}

impl LabelIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: Label) -> usize {
        if let Some(&i) = self.map.get(&label) {
            return i;
        }
        let i = self.labels.len();
        self.map.insert(label.clone(), i);
        self.labels.push(label);
        i
    }

    pub fn get(&self, label: &Label) -> Option<usize> {
        self.map.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<Label> {
        self.labels
    }
}

/// Sparse matrix with exact rational entries, stored by rows (sorted, no zeros).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrixQ {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, Rational)>>,
    row_labels: Vec<Label>,
    col_labels: Vec<Label>,
}

fn index_labels(n: usize) -> Vec<Label> {
    (0..n).map(Label::Index).collect()
}

impl SparseMatrixQ {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrixQ {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
            row_labels: index_labels(nrows),
            col_labels: index_labels(ncols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for (i, row) in m.rows.iter_mut().enumerate() {
            row.push((i, Rational::one()));
        }
        m
    }

    /// Sums duplicate positions and drops zeros.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut acc: Vec<HashMap<usize, Rational>> = vec![HashMap::new(); nrows];
        for (r, c, q) in triplets {
            if r >= nrows {
                return Err(LinalgError::OutOfRange { index: r, size: nrows });
            }
            if c >= ncols {
                return Err(LinalgError::OutOfRange { index: c, size: ncols });
            }
            *acc[r].entry(c).or_insert_with(Rational::zero) += q;
        }
        let rows = acc
            .into_iter()
            .map(|m| {
                let mut row: Vec<_> = m.into_iter().filter(|(_, q)| !q.is_zero()).collect();
                row.sort_by_key(|e| e.0);
                row
            })
            .collect();
        Ok(SparseMatrixQ {
            nrows,
            ncols,
            rows,
            row_labels: index_labels(nrows),
            col_labels: index_labels(ncols),
        })
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::Dimension { expected: ncols, found: row.len() });
            }
            for (c, q) in row.iter().enumerate() {
                trip.push((r, c, q.clone()));
            }
        }
        Self::from_triplets(rows.len(), ncols, trip)
    }

    /// Builds a matrix from sparse columns.
    pub fn from_columns(nrows: usize, cols: &[Vec<(usize, Rational)>]) -> Result<Self, LinalgError> {
        let trip = cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, q)| (*r, c, q.clone())));
        Self::from_triplets(nrows, cols.len(), trip)
    }

    pub fn with_labels(mut self, row_labels: Vec<Label>, col_labels: Vec<Label>) -> Result<Self, LinalgError> {
        for (labels, n) in [(&row_labels, self.nrows), (&col_labels, self.ncols)] {
            if labels.len() != n {
                return Err(LinalgError::Dimension { expected: n, found: labels.len() });
            }
            let mut seen = std::collections::HashSet::with_capacity(n);
            for l in labels {
                if !seen.insert(l) {
                    return Err(LinalgError::DuplicateLabel(l.clone()));
                }
            }
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.rows[r]
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.col_labels
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.rows[r][i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, q) in row {
                rows[*c].push((r, q.clone()));
            }
        }
        SparseMatrixQ {
            nrows: self.ncols,
            ncols: self.nrows,
            rows,
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.ncols {
            return Err(LinalgError::Dimension { expected: self.ncols, found: v.len() });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |acc, (c, q)| acc + q * &v[*c]))
            .collect())
    }

    /// Writes one `row col num/den` line per stored entry (zero-based indices).
    pub fn write_triplets<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {} {}", self.nrows, self.ncols)?;
        for (r, row) in self.rows.iter().enumerate() {
            for (c, q) in row {
                let text = if q.denom().is_one() {
                    format!("{}/1", q.numer())
                } else {
                    format_rational(q)
                };
                writeln!(w, "{r} {c} {text}")?;
            }
        }
        Ok(())
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        let rows = self.int_rows(0..self.nrows);
        if let Some(r) = to_small(&rows).and_then(|small| rank_ff(small, self.ncols)) {
            return r;
        }
        rank_ff(rows, self.ncols).expect("bigint elimination cannot overflow")
    }

    /// Number of target directions independent of the column space:
    /// `|T| - (rank(A) - rank(A without the target rows))`.
    pub fn cokernel_dim_on(&self, target_rows: &[usize]) -> Result<usize, LinalgError> {
        let mut is_target = vec![false; self.nrows];
        for &r in target_rows {
            if r >= self.nrows {
                return Err(LinalgError::OutOfRange { index: r, size: self.nrows });
            }
            is_target[r] = true;
        }
        let ntargets = is_target.iter().filter(|b| **b).count();
        let rest = self.int_rows((0..self.nrows).filter(|r| !is_target[*r]));
        let tgt = self.int_rows((0..self.nrows).filter(|r| is_target[*r]));
        if let (Some(a), Some(b)) = (to_small(&rest), to_small(&tgt)) {
            if let Some(inc) = rank_increment(a, b, self.ncols) {
                return Ok(ntargets - inc);
            }
        }
        let inc = rank_increment(rest, tgt, self.ncols).expect("bigint elimination cannot overflow");
        Ok(ntargets - inc)
    }

    /// One solution of `A x = b`, or `None` when `b` is outside the column space.
    /// Free variables are set to zero, so the answer is deterministic.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
        if b.len() != self.nrows {
            return Err(LinalgError::Dimension { expected: self.nrows, found: b.len() });
        }
        let rows: Vec<Vec<(usize, Rational)>> = self
            .rows
            .iter()
            .zip(b)
            .map(|(row, rhs)| {
                let mut row = row.clone();
                if !rhs.is_zero() {
                    row.push((self.ncols, rhs.clone()));
                }
                row
            })
            .collect();
        let pivots = rref(rows, self.ncols + 1);
        let mut x = vec![Rational::zero(); self.ncols];
        for (pc, row) in pivots {
            if pc == self.ncols {
                return Ok(None);
            }
            if let Some((_, q)) = row.last().filter(|(c, _)| *c == self.ncols) {
                x[pc] = q.clone();
            }
        }
        Ok(Some(x))
    }

    /// A basis of the right nullspace, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let pivots = rref(self.rows.clone(), self.ncols);
        let mut is_pivot = vec![false; self.ncols];
        for (pc, _) in &pivots {
            is_pivot[*pc] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|c| !is_pivot[*c]) {
            let mut v = vec![Rational::zero(); self.ncols];
            v[free] = Rational::one();
            for (pc, row) in &pivots {
                if let Ok(i) = row.binary_search_by_key(&free, |e| e.0) {
                    v[*pc] = -row[i].1.clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    fn int_rows(&self, which: impl Iterator<Item = usize>) -> Vec<Vec<(u32, BigInt)>> {
        which
            .map(|r| {
                let row = &self.rows[r];
                let l = lcm_of_denominators(row.iter().map(|e| &e.1));
                let mut out: Vec<(u32, BigInt)> = row
                    .iter()
                    .map(|(c, q)| (*c as u32, q.numer() * (&l / q.denom())))
                    .collect();
                normalize_content(&mut out);
                out
            })
            .filter(|row| !row.is_empty())
            .collect()
    }
}

pub fn rank(a: &SparseMatrixQ) -> usize {
    a.rank()
}

pub fn solve(a: &SparseMatrixQ, b: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
    a.solve(b)
}

pub fn cokernel_dim_on(a: &SparseMatrixQ, target_rows: &[usize]) -> Result<usize, LinalgError> {
    a.cokernel_dim_on(target_rows)
}

/// Rational Gauss-Jordan. Columns are visited in order; the pivot row is the shortest row
/// holding the column (lowest index on ties). Returns `(pivot column, reduced row)` pairs.
fn rref(rows: Vec<Vec<(usize, Rational)>>, ncols: usize) -> Vec<(usize, Vec<(usize, Rational)>)> {
    let mut pending: Vec<Vec<(usize, Rational)>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut done: Vec<(usize, Vec<(usize, Rational)>)> = Vec::new();
    for c in 0..ncols {
        let holder = |row: &Vec<(usize, Rational)>| row.binary_search_by_key(&c, |e| e.0).ok();
        let pick = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| holder(r).is_some())
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, _)| i);
        let Some(pi) = pick else { continue };
        let mut prow = pending.swap_remove(pi);
        let lead = prow[holder(&prow).unwrap()].1.clone();
        for e in prow.iter_mut() {
            e.1 /= &lead;
        }
        for row in pending.iter_mut().chain(done.iter_mut().map(|(_, r)| r)) {
            if let Some(i) = holder(row) {
                let factor = row[i].1.clone();
                *row = axpy_rat(row, &factor, &prow);
            }
        }
        pending.retain(|r| !r.is_empty());
        done.push((c, prow));
    }
    done
}

/// `row - factor * p`.
fn axpy_rat(row: &[(usize, Rational)], factor: &Rational, p: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    let mut out = Vec::with_capacity(row.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < p.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = p.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push(row[i].clone());
            i += 1;
        } else if cj < ci {
            out.push((cj, -(factor * &p[j].1)));
            j += 1;
        } else {
            let v = &row[i].1 - factor * &p[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Integer coefficient for the fraction-free kernel. Arithmetic returns `None` on overflow.
trait Coef: Clone + Send + Sync {
    fn is_zero_c(&self) -> bool;
    fn mul_c(&self, o: &Self) -> Option<Self>;
    fn sub_c(&self, o: &Self) -> Option<Self>;
    fn neg_c(&self) -> Self;
    fn gcd_c(&self, o: &Self) -> Self;
    fn div_c(&self, o: &Self) -> Self;
    fn is_unit_c(&self) -> bool;
    fn bits_c(&self) -> u64;
}

const SMALL_LIMIT: u128 = 1 << 125;

impl Coef for i128 {
    fn is_zero_c(&self) -> bool {
        *self == 0
    }
    fn mul_c(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o).filter(|v| v.unsigned_abs() < SMALL_LIMIT)
    }
    fn sub_c(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o).filter(|v| v.unsigned_abs() < SMALL_LIMIT)
    }
    fn neg_c(&self) -> Self {
        -*self
    }
    fn gcd_c(&self, o: &Self) -> Self {
        self.gcd(o)
    }
    fn div_c(&self, o: &Self) -> Self {
        *self / *o
    }
    fn is_unit_c(&self) -> bool {
        self.unsigned_abs() == 1
    }
    fn bits_c(&self) -> u64 {
        128 - u64::from(self.unsigned_abs().leading_zeros())
    }
}

impl Coef for BigInt {
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn mul_c(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub_c(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn gcd_c(&self, o: &Self) -> Self {
        self.gcd(o)
    }
    fn div_c(&self, o: &Self) -> Self {
        self / o
    }
    fn is_unit_c(&self) -> bool {
        self.abs().is_one()
    }
    fn bits_c(&self) -> u64 {
        self.bits()
    }
}

type Row<C> = Vec<(u32, C)>;

fn to_small(rows: &[Row<BigInt>]) -> Option<Vec<Row<i128>>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|(c, v)| v.to_i128().filter(|x| x.unsigned_abs() < SMALL_LIMIT).map(|x| (*c, x)))
                .collect()
        })
        .collect()
}

fn normalize_content<C: Coef>(row: &mut Row<C>) {
    let Some(first) = row.first() else { return };
    let mut g = first.1.clone();
    for (_, v) in row.iter().skip(1) {
        if g.is_unit_c() {
            return;
        }
        g = g.gcd_c(v);
    }
    if g.is_unit_c() {
        return;
    }
    for e in row.iter_mut() {
        e.1 = e.1.div_c(&g);
    }
}

/// `(pv/g) r - (a/g) p` with `g = gcd(pv, a)`, content removed. Also reports columns that
/// appeared (fill-in) and columns that vanished.
fn combine<C: Coef>(r: &Row<C>, a: &C, p: &Row<C>, pv: &C) -> Option<(Row<C>, Vec<u32>, Vec<u32>)> {
    let g = pv.gcd_c(a);
    let sp = pv.div_c(&g);
    let sa = a.div_c(&g);
    let mut out = Vec::with_capacity(r.len() + p.len());
    let mut fills = Vec::new();
    let mut drops = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map_or(u32::MAX, |e| e.0);
        let cj = p.get(j).map_or(u32::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, r[i].1.mul_c(&sp)?));
            i += 1;
        } else if cj < ci {
            out.push((cj, p[j].1.mul_c(&sa)?.neg_c()));
            fills.push(cj);
            j += 1;
        } else {
            let v = r[i].1.mul_c(&sp)?.sub_c(&p[j].1.mul_c(&sa)?)?;
            if v.is_zero_c() {
                drops.push(ci);
            } else {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    normalize_content(&mut out);
    Some((out, fills, drops))
}

/// Number of short rows inspected per pivot search.
const PIVOT_SEARCH_ROWS: usize = 4;

/// Forward elimination with Markowitz pivoting. Pivot rows come back in elimination order;
/// row `k` is zero in the pivot columns of rows `0..k`.
fn eliminate<C: Coef>(rows: Vec<Row<C>>, ncols: usize) -> Option<Vec<(u32, Row<C>)>> {
    let mut active: Vec<Option<Row<C>>> = rows.into_iter().map(|r| (!r.is_empty()).then_some(r)).collect();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    let mut col_count: Vec<u32> = vec![0; ncols];
    for (i, row) in active.iter().enumerate() {
        for (c, _) in row.iter().flatten() {
            col_rows[*c as usize].push(i as u32);
            col_count[*c as usize] += 1;
        }
    }
    let mut alive: Vec<usize> = (0..active.len()).filter(|i| active[*i].is_some()).collect();
    let mut pivots = Vec::new();
    loop {
        alive.retain(|i| active[*i].is_some());
        if alive.is_empty() {
            break;
        }
        let mut shortest: Vec<(usize, usize)> = Vec::with_capacity(PIVOT_SEARCH_ROWS + 1);
        for &i in &alive {
            let len = active[i].as_ref().map_or(0, Vec::len);
            if shortest.len() < PIVOT_SEARCH_ROWS || len < shortest[shortest.len() - 1].0 {
                let at = shortest.partition_point(|e| e.0 <= len);
                shortest.insert(at, (len, i));
                shortest.truncate(PIVOT_SEARCH_ROWS);
            }
        }
        let mut best: Option<((u64, u64, usize, u32), usize, usize)> = None;
        for &(len, i) in &shortest {
            let row = active[i].as_ref().unwrap();
            for (pos, (c, v)) in row.iter().enumerate() {
                let cost = (len as u64 - 1) * (u64::from(col_count[*c as usize]) - 1);
                let key = (cost, v.bits_c(), i, *c);
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, i, pos));
                }
            }
        }
        let (_, pi, ppos) = best.unwrap();
        let prow = active[pi].take().unwrap();
        let (pc, pv) = (prow[ppos].0, prow[ppos].1.clone());
        for (c, _) in &prow {
            col_count[*c as usize] -= 1;
        }
        for r in std::mem::take(&mut col_rows[pc as usize]) {
            let r = r as usize;
            let Some(row) = active[r].as_ref() else { continue };
            let Ok(pos) = row.binary_search_by_key(&pc, |e| e.0) else { continue };
            let a = row[pos].1.clone();
            let (next, fills, drops) = combine(row, &a, &prow, &pv)?;
            for c in fills {
                col_count[c as usize] += 1;
                col_rows[c as usize].push(r as u32);
            }
            for c in drops {
                col_count[c as usize] -= 1;
            }
            active[r] = (!next.is_empty()).then_some(next);
        }
        pivots.push((pc, prow));
    }
    Some(pivots)
}

fn rank_ff<C: Coef>(rows: Vec<Row<C>>, ncols: usize) -> Option<usize> {
    eliminate(rows, ncols).map(|p| p.len())
}

/// Reduces `row` against pivot rows, always clearing the earliest pivot still present.
fn reduce<C: Coef>(mut row: Row<C>, pivots: &[(u32, Row<C>)], pivot_of: &HashMap<u32, usize>) -> Option<Row<C>> {
    loop {
        let next = row
            .iter()
            .enumerate()
            .filter_map(|(pos, (c, _))| pivot_of.get(c).map(|k| (*k, pos)))
            .min();
        let Some((k, pos)) = next else { return Some(row) };
        let (pc, prow) = &pivots[k];
        let ppos = prow.binary_search_by_key(pc, |e| e.0).ok()?;
        let a = row[pos].1.clone();
        row = combine(&row, &a, prow, &prow[ppos].1)?.0;
    }
}

/// `rank([rest; extra]) - rank(rest)`.
fn rank_increment<C: Coef>(rest: Vec<Row<C>>, extra: Vec<Row<C>>, ncols: usize) -> Option<usize> {
    let pivots = eliminate(rest, ncols)?;
    let pivot_of: HashMap<u32, usize> = pivots.iter().enumerate().map(|(k, (c, _))| (*c, k)).collect();
    let mut reduced = Vec::with_capacity(extra.len());
    for row in extra {
        let r = reduce(row, &pivots, &pivot_of)?;
        if !r.is_empty() {
            reduced.push(r);
        }
    }
    rank_ff(reduced, ncols)
}
