//! Truncated surjectivity test for `Phi = (f - t, d_1 + f'_1 phi_alpha, ..., d_n + f'_n phi_alpha)`
//! and the interior cohomology of the Koszul complex on the same row.
//!
//! A window fixes the source monomials. Image rows with `t > tmax` are dropped: they sit in
//! `t^(tmax+1) k[[t]]`, which the recursion for degree-raising perturbations reaches anyway.
//! Every other row is a constraint, and the cokernel is counted on the interior rows only.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Label, LabelIndex, LinalgError, SparseMatrixQ};
use crate::operators::{apply, OperatorError, OperatorSpec};
use crate::par::ExecMode;
use crate::rational::{int, is_integer, Rational};
use crate::ring::{exponents_of_degree, DegreeWindow, Monomial, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("schedule has {0} windows; at least 2 are required")]
    ScheduleTooShort(usize),
    #[error("schedule windows must be strictly increasing")]
    ScheduleNotIncreasing,
    #[error("output window does not contain the image monomial {0}")]
    WindowTooSmall(Monomial),
    #[error("matrix of {cells} cells exceeds the limit of {limit}")]
    ResourceLimit { cells: u64, limit: u64 },
    #[error("row components do not commute on {0}")]
    CommutationFailure(Monomial),
    #[error("per-degree solver needs g = 1")]
    PathUnavailable,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Data of the test: `f in k[x, g^-1]` without t, a polynomial `g`, and the class `alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    n: usize,
    f: RingElement,
    g: RingElement,
    alpha: Rational,
    derivatives: Vec<RingElement>,
}

impl ProblemInstance {
    /// Validates and normalizes. A constant `g` is folded into the coefficients of `f`.
    pub fn new(f: RingElement, g: RingElement, alpha: Rational) -> Result<Self, EngineError> {
        let n = f.nvars();
        if g.nvars() != n {
            return Err(RingError::VarCountMismatch { left: n, right: g.nvars() }.into());
        }
        if g.is_zero() {
            return Err(EngineError::InvalidInstance("g must be nonzero".into()));
        }
        if !g.is_pure_polynomial() {
            return Err(EngineError::InvalidInstance("g must be a polynomial in x".into()));
        }
        if f.has_t() {
            return Err(EngineError::InvalidInstance("f must not depend on t".into()));
        }
        let (f, g) = if g.x_degree() == 0 {
            let c = g.coefficient(&Monomial::one(n));
            let f = f.map_monomials(|m| {
                let scale = pow_rational(&c.recip(), m.gpow);
                Some((scale, Monomial::new(m.tdeg, m.xdeg.clone(), 0)))
            });
            (f, RingElement::one(n))
        } else {
            (f.clear_g(&g)?, g)
        };
        let derivatives = (0..n)
            .map(|i| f.partial_x(i, &g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProblemInstance {
            n,
            f,
            g,
            alpha,
            derivatives,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &RingElement {
        &self.f
    }

    pub fn g(&self) -> &RingElement {
        &self.g
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn derivatives(&self) -> &[RingElement] {
        &self.derivatives
    }

    pub fn with_alpha(&self, alpha: Rational) -> Self {
        ProblemInstance { alpha, ..self.clone() }
    }

    pub fn g_is_trivial(&self) -> bool {
        self.g.x_degree() == 0
    }

    /// The `e` in `f = p g^-e` with `g` not dividing `p`.
    pub fn denominator_power(&self) -> u32 {
        self.f.max_gpow()
    }

    /// Total x-degree of the numerator of `f` times `g`.
    pub fn degree_margin(&self) -> u32 {
        let e = self.denominator_power();
        let dg = self.g.x_degree();
        let numer = self
            .f
            .terms()
            .map(|(m, _)| m.x_degree() + (e - m.gpow) * dg)
            .max()
            .unwrap_or(0);
        if self.g_is_trivial() {
            numer
        } else {
            numer + dg
        }
    }

    /// Whether `f` is a polynomial and `g = 1`, the shape the per-degree solver handles.
    pub fn per_degree_applicable(&self) -> bool {
        self.g_is_trivial() && self.n > 0
    }
}

fn pow_rational(q: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * q)
}

/// `[f - t, d_1 + f'_1 PhiC(-alpha), ..., d_n + f'_n PhiC(-alpha)]`.
pub fn phi_row(p: &ProblemInstance) -> Vec<OperatorSpec> {
    let mut row = vec![OperatorSpec::sum([
        OperatorSpec::MulByElem(p.f.clone()),
        OperatorSpec::scale(int(-1), OperatorSpec::MulByT),
    ])];
    for (i, df) in p.derivatives.iter().enumerate() {
        row.push(OperatorSpec::sum([
            OperatorSpec::PartialX(i),
            OperatorSpec::compose([OperatorSpec::MulByElem(df.clone()), OperatorSpec::PhiC(-p.alpha.clone())]),
        ]));
    }
    row
}

/// Matrix of `Phi` from `(n+1)` copies of the `win_in` basis to the `win_out` basis.
pub fn assemble_phi(p: &ProblemInstance, win_in: &DegreeWindow, win_out: &DegreeWindow) -> Result<SparseMatrixQ, EngineError> {
    let ops = phi_row(p);
    let mut rows = LabelIndex::new();
    for m in win_out.monomials(p.n) {
        rows.intern(Label::Mono(m));
    }
    let sources = win_in.monomials(p.n);
    let mut cols = Vec::new();
    let mut trip = Vec::new();
    for (c, op) in ops.iter().enumerate() {
        for m in &sources {
            let col = cols.len();
            cols.push(Label::Comp(c as u32, m.clone()));
            let image = apply(op, &RingElement::from_monomial(m.clone()), &p.g)?;
            for (mono, q) in image.into_terms() {
                let Some(r) = rows.get(&Label::Mono(mono.clone())) else {
                    return Err(EngineError::WindowTooSmall(mono));
                };
                trip.push((r, col, q));
            }
        }
    }
    let nrows = rows.len();
    Ok(SparseMatrixQ::from_triplets(nrows, cols.len(), trip)?.with_labels(rows.into_labels(), cols)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverPath {
    /// Per-degree solver when applicable, generic otherwise.
    Auto,
    Generic,
    PerDegree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineOptions {
    pub path: SolverPath,
    pub exec: ExecMode,
    /// Compute interior Koszul dimensions on the last window used.
    pub koszul: bool,
    /// Stop as soon as two consecutive windows agree.
    pub early_stop: bool,
    /// Upper bound on `rows * cols` of any assembled matrix.
    pub max_cells: Option<u64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            path: SolverPath::Auto,
            exec: ExecMode::default(),
            koszul: false,
            early_stop: true,
            max_cells: None,
        }
    }
}

pub const MAX_CELLS_ENV: &str = "GM_MAX_WINDOW_CELLS";

impl EngineOptions {
    /// Defaults, with `max_cells` read from `GM_MAX_WINDOW_CELLS` when set.
    pub fn from_env() -> Self {
        let max_cells = std::env::var(MAX_CELLS_ENV).ok().and_then(|v| v.trim().parse().ok());
        EngineOptions {
            max_cells,
            ..Default::default()
        }
    }

    fn check_cells(&self, nrows: usize, ncols: usize) -> Result<(), EngineError> {
        let cells = nrows as u64 * ncols as u64;
        match self.max_cells {
            Some(limit) if cells > limit => Err(EngineError::ResourceLimit { cells, limit }),
            _ => Ok(()),
        }
    }
}

/// Nested windows: round `i` has `tmax = t_start + i t_step`, `tmin = -tmax`,
/// `xmax = x_start + i x_step`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub t_start: i64,
    /// Defaults to `deg_x(f g) + 2`.
    pub x_start: Option<u32>,
    pub t_step: i64,
    pub x_step: u32,
    pub max_rounds: usize,
}

impl Default for WindowSchedule {
    fn default() -> Self {
        WindowSchedule {
            t_start: 2,
            x_start: None,
            t_step: 2,
            x_step: 3,
            max_rounds: 4,
        }
    }
}

impl WindowSchedule {
    pub fn windows(&self, p: &ProblemInstance) -> Vec<DegreeWindow> {
        let x_start = self.x_start.unwrap_or(p.degree_margin() + 2);
        (0..self.max_rounds)
            .map(|i| {
                let tmax = self.t_start + self.t_step * i as i64;
                let xmax = x_start + self.x_step * i as u32;
                DegreeWindow {
                    tmin: -tmax,
                    tmax,
                    xmax,
                    gmax: default_gmax(p, tmax, xmax),
                }
            })
            .collect()
    }
}

/// Denominator bound for a window. Powers of `g^-1` beyond `tmax - 1` would let an element
/// trade x-degree for g-degree faster than the t-range can absorb, so the bound is capped.
pub fn default_gmax(p: &ProblemInstance, tmax: i64, xmax: u32) -> u32 {
    if p.g_is_trivial() {
        0
    } else {
        xmax.min((tmax - 1).max(0) as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Exponent,
    NotExponent,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    pub verdict: Verdict,
    /// Number of Jordan blocks for the class, once stabilized.
    pub cokernel_dim: Option<usize>,
    pub windows_used: Vec<DegreeWindow>,
    /// Interior cokernel estimate per window used.
    pub estimates: Vec<usize>,
    pub stabilized: bool,
    pub path: SolverPath,
    pub koszul_dims: Option<BTreeMap<usize, usize>>,
    pub koszul_window: Option<DegreeWindow>,
    /// Integer classes may lose copies of the structure sheaf in the reduction, so their
    /// multiplicity is a lower bound for the original family.
    pub multiplicity_is_lower_bound: bool,
}

pub fn exponent_test(p: &ProblemInstance, schedule: &[DegreeWindow]) -> Result<ExponentReport, EngineError> {
    exponent_test_with(p, schedule, &EngineOptions::default())
}

fn resolve_path(p: &ProblemInstance, path: SolverPath) -> Result<SolverPath, EngineError> {
    match path {
        SolverPath::Auto if p.per_degree_applicable() => Ok(SolverPath::PerDegree),
        SolverPath::Auto => Ok(SolverPath::Generic),
        SolverPath::PerDegree if !p.per_degree_applicable() => Err(EngineError::PathUnavailable),
        other => Ok(other),
    }
}

pub fn exponent_test_with(
    p: &ProblemInstance,
    schedule: &[DegreeWindow],
    opts: &EngineOptions,
) -> Result<ExponentReport, EngineError> {
    if schedule.len() < 2 {
        return Err(EngineError::ScheduleTooShort(schedule.len()));
    }
    for pair in schedule.windows(2) {
        if !pair[1].contains_window(&pair[0]) || pair[0] == pair[1] {
            return Err(EngineError::ScheduleNotIncreasing);
        }
    }
    let path = resolve_path(p, opts.path)?;
    let mut windows_used = Vec::new();
    let mut estimates: Vec<usize> = Vec::new();
    for w in schedule {
        estimates.push(window_estimate(p, w, path, opts)?);
        windows_used.push(*w);
        let n = estimates.len();
        if opts.early_stop && n >= 2 && estimates[n - 1] == estimates[n - 2] {
            break;
        }
    }
    let n = estimates.len();
    let stabilized = estimates[n - 1] == estimates[n - 2];
    let (verdict, cokernel_dim) = match (stabilized, estimates[n - 1]) {
        (false, _) => (Verdict::Undetermined, None),
        (true, 0) => (Verdict::NotExponent, Some(0)),
        (true, v) => (Verdict::Exponent, Some(v)),
    };
    // On the last window used the top degree reproduces the final estimate; earlier windows
    // can be too narrow to hold the cokernel classes at all.
    let (koszul_dims, koszul_window) = if opts.koszul {
        let w = *windows_used.last().expect("at least two windows");
        (Some(koszul_cohomology_with(p, &w, opts)?), Some(w))
    } else {
        (None, None)
    };
    Ok(ExponentReport {
        verdict,
        cokernel_dim,
        windows_used,
        estimates,
        stabilized,
        path,
        koszul_dims,
        koszul_window,
        multiplicity_is_lower_bound: is_integer(&p.alpha),
    })
}

/// Runs the test for each class in `alphas`, in parallel under `opts.exec`.
pub fn scan_alphas(
    template: &ProblemInstance,
    alphas: &[Rational],
    schedule: &[DegreeWindow],
    opts: &EngineOptions,
) -> Vec<Result<ExponentReport, EngineError>> {
    let inner = EngineOptions {
        exec: ExecMode::Sequential,
        ..opts.clone()
    };
    opts.exec.map(alphas.to_vec(), |a| {
        exponent_test_with(&template.with_alpha(a), schedule, &inner)
    })
}

/// Interior cokernel estimate on one window.
pub fn window_estimate(p: &ProblemInstance, w: &DegreeWindow, path: SolverPath, opts: &EngineOptions) -> Result<usize, EngineError> {
    match resolve_path(p, path)? {
        SolverPath::PerDegree => per_degree_estimate(p, w, opts),
        _ => generic_estimate(p, w, opts),
    }
}

const T_MARGIN: i64 = 2;

fn t_interior(w: &DegreeWindow, k: i64) -> bool {
    w.tmin + T_MARGIN <= k && k <= w.tmax - T_MARGIN
}

fn is_interior(p: &ProblemInstance, w: &DegreeWindow, m: &Monomial) -> bool {
    let xcap = w.xmax.checked_sub(p.degree_margin());
    let gpow_ok = if p.g_is_trivial() {
        m.gpow == 0
    } else {
        m.gpow + p.denominator_power() < w.gmax
    };
    t_interior(w, m.tdeg) && xcap.is_some_and(|cap| m.x_degree() <= cap) && gpow_ok
}

/// Images of the source coordinates under the row, computed in parallel.
fn images(
    p: &ProblemInstance,
    ops: &[OperatorSpec],
    sources: Vec<(usize, Monomial)>,
    exec: ExecMode,
) -> Result<Vec<((usize, Monomial), RingElement)>, EngineError> {
    exec.map(sources, |(c, m)| {
        let e = apply(&ops[c], &RingElement::from_monomial(m.clone()), &p.g)?;
        Ok(((c, m), e))
    })
    .into_iter()
    .collect()
}

fn split_label(l: &Label) -> Option<(u32, &Monomial)> {
    match l {
        Label::Mono(m) => Some((0, m)),
        Label::Comp(s, m) => Some((*s, m)),
        _ => None,
    }
}

/// Columns `g N g^-1 - N` for every row monomial `N` that has a neighbouring g-layer.
/// `mk` turns a (summand, monomial) pair back into a row label.
fn relation_columns(
    g: &RingElement,
    rows: &mut LabelIndex,
    mk: impl Fn(u32, Monomial) -> Label,
) -> Vec<(Label, Vec<(usize, Rational)>)> {
    let keys: Vec<(u32, Monomial)> = rows
        .labels()
        .iter()
        .filter_map(|l| split_label(l).map(|(s, m)| (s, m.clone())))
        .collect();
    let gtop = keys.iter().map(|(_, m)| m.gpow).max().unwrap_or(0);
    let mut rels: BTreeSet<(u32, Monomial)> = BTreeSet::new();
    for (s, m) in keys {
        if m.gpow >= 1 {
            rels.insert((s, m.clone()));
        }
        if m.gpow < gtop {
            let mut up = m;
            up.gpow += 1;
            rels.insert((s, up));
        }
    }
    rels.into_iter()
        .map(|(s, m)| {
            let mut lower = m.clone();
            lower.gpow -= 1;
            let mut col = vec![(rows.intern(mk(s, lower)), -Rational::one())];
            for (gm, gc) in g.terms() {
                col.push((rows.intern(mk(s, m.mul(gm))), gc.clone()));
            }
            (Label::Relation(s, m), col)
        })
        .collect()
}

/// The full-window system behind the generic path: columns are images of window sources
/// (plus g-relations), rows are labelled monomials with `t <= tmax`. Returns the matrix and
/// the indices of its interior rows.
pub fn generic_system(p: &ProblemInstance, w: &DegreeWindow, opts: &EngineOptions) -> Result<(SparseMatrixQ, Vec<usize>), EngineError> {
    let ops = phi_row(p);
    let sources: Vec<(usize, Monomial)> = (0..=p.n)
        .flat_map(|c| w.monomials(p.n).into_iter().map(move |m| (c, m)))
        .collect();
    let mut rows = LabelIndex::new();
    let mut cols: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut col_labels = Vec::new();
    for ((c, m), image) in images(p, &ops, sources, opts.exec)? {
        let col = image
            .into_terms()
            .filter(|(m, _)| m.tdeg <= w.tmax)
            .map(|(m, q)| (rows.intern(Label::Mono(m)), q))
            .collect();
        cols.push(col);
        col_labels.push(Label::Comp(c as u32, m));
    }
    if !p.g_is_trivial() {
        for (label, col) in relation_columns(&p.g, &mut rows, |_, m| Label::Mono(m)) {
            cols.push(col);
            col_labels.push(label);
        }
    }
    opts.check_cells(rows.len(), cols.len())?;
    let targets: Vec<usize> = rows
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, Label::Mono(m) if is_interior(p, w, m)))
        .map(|(i, _)| i)
        .collect();
    let a = SparseMatrixQ::from_columns(rows.len(), &cols)?.with_labels(rows.into_labels(), col_labels)?;
    Ok((a, targets))
}

fn generic_estimate(p: &ProblemInstance, w: &DegreeWindow, opts: &EngineOptions) -> Result<usize, EngineError> {
    let (a, targets) = generic_system(p, w, opts)?;
    Ok(a.cokernel_dim_on(&targets)?)
}

/// Sum over target x-degrees `m` of the cokernel of a band-limited system. For `g = 1`,
/// `Phi` moves total x-degree by at most `deg f`, so rows of degree `m` only see sources of
/// degree within one band of `m`; rows of lower degree are quotiented out.
fn per_degree_estimate(p: &ProblemInstance, w: &DegreeWindow, opts: &EngineOptions) -> Result<usize, EngineError> {
    let d = p.f.x_degree();
    let Some(top) = w.xmax.checked_sub(d) else { return Ok(0) };
    let degrees: Vec<u32> = (0..=top).collect();
    let ops = phi_row(p);
    let counts = opts.exec.map(degrees, |m| degree_slice_count(p, &ops, w, m, d, opts));
    counts.into_iter().sum()
}

fn degree_slice_count(
    p: &ProblemInstance,
    ops: &[OperatorSpec],
    w: &DegreeWindow,
    m: u32,
    d: u32,
    opts: &EngineOptions,
) -> Result<usize, EngineError> {
    let mut sources = Vec::new();
    for k in w.tmin..=w.tmax {
        for c in 0..=p.n {
            let (lo, hi) = if c == 0 {
                (m.saturating_sub(d), m + d)
            } else {
                ((m + 1).saturating_sub(d), m + d + 1)
            };
            for deg in lo..=hi {
                for x in exponents_of_degree(p.n, deg) {
                    sources.push((c, Monomial::new(k, x, 0)));
                }
            }
        }
    }
    let free = |mono: &Monomial| mono.tdeg > w.tmax || (mono.x_degree() < m && t_interior(w, mono.tdeg));
    let mut rows = LabelIndex::new();
    let mut cols: Vec<Vec<(usize, Rational)>> = Vec::new();
    for (_, image) in images(p, ops, sources, ExecMode::Sequential)? {
        let col = image
            .into_terms()
            .filter(|(mono, _)| !free(mono))
            .map(|(mono, q)| (rows.intern(Label::Mono(mono)), q))
            .collect();
        cols.push(col);
    }
    opts.check_cells(rows.len(), cols.len())?;
    let targets: Vec<usize> = rows
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, Label::Mono(mono) if mono.x_degree() == m && t_interior(w, mono.tdeg)))
        .map(|(i, _)| i)
        .collect();
    let a = SparseMatrixQ::from_columns(rows.len(), &cols)?;
    Ok(a.cokernel_dim_on(&targets)?)
}

/// Checks `a_i a_j = a_j a_i` on every interior monomial, comparing normalized images.
pub fn check_row_commutation(p: &ProblemInstance, w: &DegreeWindow) -> Result<(), EngineError> {
    let ops = phi_row(p);
    for m in w.monomials(p.n).into_iter().filter(|m| is_interior(p, w, m)) {
        let e = RingElement::from_monomial(m.clone());
        let single: Vec<RingElement> = ops.iter().map(|o| apply(o, &e, &p.g)).collect::<Result<_, _>>()?;
        for i in 0..ops.len() {
            for j in (i + 1)..ops.len() {
                let ij = apply(&ops[i], &single[j], &p.g)?;
                let ji = apply(&ops[j], &single[i], &p.g)?;
                if !(&ij - &ji).clear_g(&p.g)?.is_zero() {
                    return Err(EngineError::CommutationFailure(m));
                }
            }
        }
    }
    Ok(())
}

fn masks_of_size(total: usize, j: usize) -> Vec<u32> {
    (0u32..(1 << total)).filter(|s| s.count_ones() as usize == j).collect()
}

/// `d(v e_S) = sum over i not in S of (-1)^{#{s in S : s < i}} a_i(v) e_{S+i}`.
fn koszul_image(
    p: &ProblemInstance,
    ops: &[OperatorSpec],
    mask: u32,
    m: &Monomial,
) -> Result<Vec<(u32, RingElement)>, EngineError> {
    let e = RingElement::from_monomial(m.clone());
    let mut out = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        if mask & (1 << i) != 0 {
            continue;
        }
        let below = (mask & ((1 << i) - 1)).count_ones();
        let image = apply(op, &e, &p.g)?;
        let image = if below % 2 == 1 { -image } else { image };
        out.push((mask | (1 << i), image));
    }
    Ok(out)
}

pub fn koszul_cohomology(p: &ProblemInstance, w: &DegreeWindow) -> Result<BTreeMap<usize, usize>, EngineError> {
    koszul_cohomology_with(p, w, &EngineOptions::default())
}

/// Interior cohomology dimensions of `K(R; a_0, ..., a_n)` in degrees `0..=n+1`.
///
/// Degree `j` counts interior cochains that are cocycles modulo dropped rows, taken modulo
/// coboundaries of window cochains (and g-layer relations).
pub fn koszul_cohomology_with(
    p: &ProblemInstance,
    w: &DegreeWindow,
    opts: &EngineOptions,
) -> Result<BTreeMap<usize, usize>, EngineError> {
    check_row_commutation(p, w)?;
    let degrees: Vec<usize> = (0..=p.n + 1).collect();
    let dims = opts.exec.map(degrees, |j| koszul_degree(p, w, j, opts).map(|d| (j, d)));
    dims.into_iter().collect()
}

fn koszul_degree(p: &ProblemInstance, w: &DegreeWindow, j: usize, opts: &EngineOptions) -> Result<usize, EngineError> {
    let ops = phi_row(p);
    let total = p.n + 1;
    let window = w.monomials(p.n);
    let interior: Vec<(u32, Monomial)> = masks_of_size(total, j)
        .into_iter()
        .flat_map(|s| window.iter().filter(|m| is_interior(p, w, m)).map(move |m| (s, m.clone())))
        .collect();
    let mk = |s: u32, m: Monomial| Label::Comp(s, m);

    // Interior cocycles, as vectors over the interior coordinates.
    let cocycles: Vec<Vec<(usize, Rational)>> = if j == total {
        (0..interior.len()).map(|i| vec![(i, Rational::one())]).collect()
    } else {
        let mut rows = LabelIndex::new();
        let mut cols: Vec<Vec<(usize, Rational)>> = Vec::new();
        for (s, m) in &interior {
            let mut col = Vec::new();
            for (s2, image) in koszul_image(p, &ops, *s, m)? {
                for (mono, q) in image.into_terms().filter(|(mono, _)| mono.tdeg <= w.tmax) {
                    col.push((rows.intern(mk(s2, mono)), q));
                }
            }
            cols.push(col);
        }
        if !p.g_is_trivial() {
            cols.extend(relation_columns(&p.g, &mut rows, mk).into_iter().map(|(_, c)| c));
        }
        opts.check_cells(rows.len(), cols.len())?;
        let d = SparseMatrixQ::from_columns(rows.len(), &cols)?;
        d.nullspace()
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .take(interior.len())
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .collect::<Vec<_>>()
            })
            .filter(|v| !v.is_empty())
            .collect()
    };

    // Coboundaries of window cochains plus relations, in coordinates where the interior
    // cochains come first.
    let mut rows = LabelIndex::new();
    for (s, m) in &interior {
        rows.intern(mk(*s, m.clone()));
    }
    let mut bcols: Vec<Vec<(usize, Rational)>> = Vec::new();
    if j > 0 {
        for s in masks_of_size(total, j - 1) {
            for m in &window {
                let mut col = Vec::new();
                for (s2, image) in koszul_image(p, &ops, s, m)? {
                    for (mono, q) in image.into_terms().filter(|(mono, _)| mono.tdeg <= w.tmax) {
                        col.push((rows.intern(mk(s2, mono)), q));
                    }
                }
                bcols.push(col);
            }
        }
    }
    if !p.g_is_trivial() {
        bcols.extend(relation_columns(&p.g, &mut rows, mk).into_iter().map(|(_, c)| c));
    }
    opts.check_cells(rows.len(), bcols.len() + cocycles.len())?;
    let b = SparseMatrixQ::from_columns(rows.len(), &bcols)?;
    let mut all = bcols;
    all.extend(cocycles);
    let bz = SparseMatrixQ::from_columns(rows.len(), &all)?;
    Ok(bz.rank() - b.rank())
}

/// `true` iff vanishing top cohomology comes with vanishing cohomology in every degree.
pub fn check_corollary_dominance(p: &ProblemInstance, w: &DegreeWindow) -> Result<bool, EngineError> {
    let dims = koszul_cohomology(p, w)?;
    Ok(dominance_holds(&dims))
}

pub fn dominance_holds(dims: &BTreeMap<usize, usize>) -> bool {
    let top = dims.keys().max().and_then(|k| dims.get(k)).copied().unwrap_or(0);
    top != 0 || dims.values().all(|d| *d == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn x(n: usize, i: usize) -> RingElement {
        RingElement::var(n, i)
    }

    fn one(n: usize) -> RingElement {
        RingElement::one(n)
    }

    fn cubic() -> RingElement {
        // x^2 (1 - x)
        &(&x(1, 0) * &x(1, 0)) * &(&one(1) - &x(1, 0))
    }

    fn schedule(p: &ProblemInstance) -> Vec<DegreeWindow> {
        WindowSchedule::default().windows(p)
    }

    #[test]
    fn phi_row_of_identity() {
        let p = ProblemInstance::new(x(1, 0), one(1), rat(1, 2)).unwrap();
        let row = phi_row(&p);
        assert_eq!(row.len(), 2);
        let e = RingElement::t_pow(1, 1);
        let a0 = apply(&row[0], &e, p.g()).unwrap();
        assert_eq!(a0, &(&x(1, 0) * &e) - &RingElement::t_pow(1, 2));
        // d_1 t + 1 * (1 - 1/2) t^0
        let a1 = apply(&row[1], &e, p.g()).unwrap();
        assert_eq!(a1, RingElement::constant(1, rat(1, 2)));
    }

    #[test]
    fn phi_row_derivative_of_plane_arrangement() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let f = &(&x1 * &x2) * &(&(&one(2) - &x1) - &x2);
        let p = ProblemInstance::new(f, one(2), rat(1, 3)).unwrap();
        let expect = &x2 * &(&(&one(2) - &x1.scale(&int(2))) - &x2);
        assert_eq!(p.derivatives()[0], expect);
    }

    #[test]
    fn normalization_clears_g() {
        // x^2 g^-1 with g = x is x.
        let mut m = Monomial::new(0, vec![2], 1);
        let f = RingElement::from_monomial(m.clone());
        let p = ProblemInstance::new(f, x(1, 0), int(0)).unwrap();
        m.xdeg[0] = 1;
        m.gpow = 0;
        assert_eq!(p.f(), &RingElement::from_monomial(m));
    }

    #[test]
    fn assemble_small_window() {
        let p = ProblemInstance::new(x(1, 0), one(1), rat(1, 2)).unwrap();
        let win_in = DegreeWindow::new(-1, 1, 1, 0).unwrap();
        let win_out = DegreeWindow::new(-2, 2, 2, 0).unwrap();
        let a = assemble_phi(&p, &win_in, &win_out).unwrap();
        assert_eq!(a.ncols(), 2 * 6);
        assert_eq!(a.nrows(), 15);
        assert!(matches!(
            assemble_phi(&p, &win_in, &win_in),
            Err(EngineError::WindowTooSmall(_))
        ));
    }

    #[test]
    fn identity_map_verdicts() {
        let p = ProblemInstance::new(x(1, 0), one(1), rat(1, 2)).unwrap();
        let r = exponent_test(&p, &schedule(&p)).unwrap();
        assert_eq!(r.verdict, Verdict::NotExponent);
        let p = p.with_alpha(int(0));
        let r = exponent_test(&p, &schedule(&p)).unwrap();
        assert_eq!(r.verdict, Verdict::Exponent);
        assert_eq!(r.cokernel_dim, Some(1));
        assert!(r.multiplicity_is_lower_bound);
    }

    #[test]
    fn cubic_verdicts_on_both_paths() {
        for path in [SolverPath::Generic, SolverPath::PerDegree] {
            let opts = EngineOptions { path, ..Default::default() };
            let p = ProblemInstance::new(cubic(), one(1), rat(1, 2)).unwrap();
            let r = exponent_test_with(&p, &schedule(&p), &opts).unwrap();
            assert_eq!((r.verdict, r.cokernel_dim), (Verdict::Exponent, Some(1)), "{path:?}");
            let p = p.with_alpha(rat(1, 3));
            let r = exponent_test_with(&p, &schedule(&p), &opts).unwrap();
            assert_eq!(r.verdict, Verdict::NotExponent, "{path:?}");
        }
    }

    #[test]
    fn monomial_with_nontrivial_g() {
        let f = &x(1, 0) * &x(1, 0);
        for (alpha, expect) in [(rat(1, 2), Verdict::Exponent), (int(1), Verdict::Exponent), (rat(1, 3), Verdict::NotExponent)] {
            let p = ProblemInstance::new(f.clone(), x(1, 0), alpha).unwrap();
            let r = exponent_test(&p, &schedule(&p)).unwrap();
            assert_eq!(r.verdict, expect, "{r:?}");
        }
    }

    #[test]
    fn koszul_dims_of_small_cases() {
        let w = DegreeWindow::new(-3, 3, 3, 0).unwrap();
        let p = ProblemInstance::new(x(1, 0), one(1), rat(1, 2)).unwrap();
        let dims = koszul_cohomology(&p, &w).unwrap();
        assert_eq!(dims.values().copied().collect::<Vec<_>>(), vec![0, 0, 0]);
        let dims = koszul_cohomology(&p.with_alpha(int(0)), &w).unwrap();
        assert_eq!(dims.values().copied().collect::<Vec<_>>(), vec![0, 1, 1]);
        let w = DegreeWindow::new(-3, 3, 5, 0).unwrap();
        let p = ProblemInstance::new(cubic(), one(1), rat(1, 2)).unwrap();
        let dims = koszul_cohomology(&p, &w).unwrap();
        assert_eq!(dims[&2], 1);
        assert!(check_corollary_dominance(&p, &w).unwrap());
    }

    #[test]
    fn schedule_validation() {
        let p = ProblemInstance::new(x(1, 0), one(1), rat(1, 2)).unwrap();
        let w = schedule(&p);
        assert_eq!(exponent_test(&p, &w[..1]), Err(EngineError::ScheduleTooShort(1)));
        assert_eq!(exponent_test(&p, &[w[1], w[0]]), Err(EngineError::ScheduleNotIncreasing));
    }

    #[test]
    fn cell_limit_is_enforced() {
        let p = ProblemInstance::new(cubic(), one(1), rat(1, 2)).unwrap();
        let opts = EngineOptions {
            max_cells: Some(10),
            ..Default::default()
        };
        let r = exponent_test_with(&p, &schedule(&p), &opts);
        assert!(matches!(r, Err(EngineError::ResourceLimit { .. })));
    }

    #[test]
    fn invalid_instances() {
        assert!(ProblemInstance::new(x(1, 0), RingElement::zero(1), int(0)).is_err());
        assert!(ProblemInstance::new(RingElement::t_pow(1, 1), one(1), int(0)).is_err());
        assert!(ProblemInstance::new(x(1, 0), one(2), int(0)).is_err());
    }
}
