//! Operator calculus on `k((t))[x, g^-1]`.
//!
//! Conventions: `PhiC(c)` is `d/dt + c t^-1`; the theorem's `phi_alpha = d/dt - alpha t^-1`
//! is therefore `PhiC(-alpha)`. `Dtr(r)` is `t d/dt + r`. `ArS(alpha, r, s)` is
//! `t + r PhiC(alpha + s)^-1` and `AbetaD` replaces the scalar `r` by `beta (x_i d_i + r)`.
//! Composition lists are applied right to left, like written operator products.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{int, is_integer, to_i64, Rational};
use crate::ring::{DegreeWindow, Monomial, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("PhiC({0}) has no inverse: its parameter is an integer")]
    UndefinedInverse(Rational),
    #[error("operator is not monomial-diagonal: {0}")]
    NonDiagonal(String),
    #[error("eigenvalue vanishes at monomial {0}")]
    VanishingEigenvalue(Monomial),
    #[error("parameter precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorSpec {
    Identity,
    PartialT,
    /// Zero-based variable index.
    PartialX(usize),
    MulByT,
    MulByElem(RingElement),
    PhiC(Rational),
    Dtr(Rational),
    ArS {
        alpha: Rational,
        r: Rational,
        s: Rational,
    },
    AbetaD {
        alpha: Rational,
        beta: Rational,
        i: usize,
        r: Rational,
        s: Rational,
    },
    Sum(Vec<OperatorSpec>),
    /// `Compose([A, B])` is `A B`: `B` acts first.
    Compose(Vec<OperatorSpec>),
    Scale(Rational, Box<OperatorSpec>),
}

impl OperatorSpec {
    pub fn compose(ops: impl IntoIterator<Item = OperatorSpec>) -> Self {
        OperatorSpec::Compose(ops.into_iter().collect())
    }

    pub fn sum(ops: impl IntoIterator<Item = OperatorSpec>) -> Self {
        OperatorSpec::Sum(ops.into_iter().collect())
    }

    pub fn scale(c: Rational, op: OperatorSpec) -> Self {
        OperatorSpec::Scale(c, Box::new(op))
    }

    pub fn ars(alpha: Rational, r: Rational, s: Rational) -> Self {
        OperatorSpec::ArS { alpha, r, s }
    }

    /// `x_i d_i + r` on the variable with zero-based index `i`.
    pub fn euler_x(nvars: usize, i: usize, r: Rational) -> Self {
        OperatorSpec::sum([
            OperatorSpec::compose([
                OperatorSpec::MulByElem(RingElement::var(nvars, i)),
                OperatorSpec::PartialX(i),
            ]),
            OperatorSpec::scale(r, OperatorSpec::Identity),
        ])
    }
}

/// `PhiC(c)^-1` on a single power: `t^k -> t^(k+1) / (k + 1 + c)`.
pub fn phi_inverse(c: &Rational, e: &RingElement) -> Result<RingElement, OperatorError> {
    if is_integer(c) {
        return Err(OperatorError::UndefinedInverse(c.clone()));
    }
    Ok(e.map_monomials(|m| {
        let ev = int(m.tdeg + 1) + c;
        Some((ev.recip(), m.with_tdeg(m.tdeg + 1)))
    }))
}

/// Exact action of `op` on `e`. Terms produced outside any window are kept.
pub fn apply(op: &OperatorSpec, e: &RingElement, g: &RingElement) -> Result<RingElement, OperatorError> {
    use OperatorSpec::*;
    let n = e.nvars();
    Ok(match op {
        Identity => e.clone(),
        PartialT => e.partial_t(),
        PartialX(i) => e.partial_x(*i, g)?,
        MulByT => e.shift_t(1),
        MulByElem(a) => a.checked_mul(e)?,
        PhiC(c) => e.map_monomials(|m| Some((int(m.tdeg) + c, m.with_tdeg(m.tdeg - 1)))),
        Dtr(r) => e.map_monomials(|m| Some((int(m.tdeg) + r, m.clone()))),
        ArS { alpha, r, s } => {
            let c = alpha + s;
            if is_integer(&c) {
                return Err(OperatorError::UndefinedInverse(c));
            }
            e.map_monomials(|m| {
                let base = int(m.tdeg + 1) + &c;
                Some(((&base + r) / &base, m.with_tdeg(m.tdeg + 1)))
            })
        }
        AbetaD { alpha, beta, i, r, s } => {
            let c = alpha + s;
            let inv = phi_inverse(&c, e)?;
            let euler = apply(&OperatorSpec::euler_x(n, *i, r.clone()), &inv, g)?;
            e.shift_t(1).checked_add(&euler.scale(beta))?
        }
        Sum(ops) => {
            let mut acc = RingElement::zero(n);
            for o in ops {
                acc = acc.checked_add(&apply(o, e, g)?)?;
            }
            acc
        }
        Compose(ops) => {
            let mut acc = e.clone();
            for o in ops.iter().rev() {
                acc = apply(o, &acc, g)?;
            }
            acc
        }
        Scale(c, o) => apply(o, e, g)?.scale(c),
    })
}

/// A monomial on which a diagonal operator has eigenvalue zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub monomial: Monomial,
    pub eigenvalue: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvertibilityVerdict {
    pub invertible: bool,
    pub witness: Option<Witness>,
    /// Whether the witness monomial lies inside the queried window.
    pub witness_in_window: bool,
}

/// Monomial-diagonal operator: `t^k x^u -> eigen(k, u) t^(k + shift) x^u`.
#[derive(Debug, Clone)]
enum DiagLeaf {
    Scalar(Rational),
    ShiftT,
    Phi(Rational),
    Euler(Rational),
    Ars { c: Rational, r: Rational },
    AbetaD { c: Rational, beta: Rational, i: usize, r: Rational },
}

impl DiagLeaf {
    fn shift(&self) -> i64 {
        match self {
            DiagLeaf::Scalar(_) | DiagLeaf::Euler(_) => 0,
            DiagLeaf::Phi(_) => -1,
            DiagLeaf::ShiftT | DiagLeaf::Ars { .. } | DiagLeaf::AbetaD { .. } => 1,
        }
    }

    fn eigen(&self, m: &Monomial) -> Rational {
        let k = int(m.tdeg);
        match self {
            DiagLeaf::Scalar(c) => c.clone(),
            DiagLeaf::ShiftT => Rational::one(),
            DiagLeaf::Phi(c) => k + c,
            DiagLeaf::Euler(r) => k + r,
            DiagLeaf::Ars { c, r } => {
                let base = k + int(1) + c;
                (&base + r) / base
            }
            DiagLeaf::AbetaD { c, beta, i, r } => {
                let base = k + int(1) + c;
                let u = int(m.xdeg.get(*i).copied().unwrap_or(0) as i64);
                (&base + beta * (u + r)) / base
            }
        }
    }

    /// A monomial (in `nvars` variables) where the eigenvalue vanishes, if one exists.
    fn zero_at(&self, nvars: usize, near: &DegreeWindow) -> Option<Monomial> {
        let t_root = |q: Rational| to_i64(&q).map(|k| Monomial::t_pow(k, nvars));
        match self {
            DiagLeaf::Scalar(c) => c.is_zero().then(|| Monomial::t_pow(near.tmin, nvars)),
            DiagLeaf::ShiftT => None,
            DiagLeaf::Phi(c) | DiagLeaf::Euler(c) => t_root(-c.clone()),
            // (k + 1 + c + r) = 0
            DiagLeaf::Ars { c, r } => t_root(-(c + r) - int(1)),
            DiagLeaf::AbetaD { c, beta, i, r } => {
                // beta (l + r) + c + k + 1 = 0 for some natural l and integer k. The fractional
                // part of beta * l has period den(beta), so scanning one period decides it.
                let period: u64 = if beta.is_zero() {
                    1
                } else {
                    beta.denom().try_into().unwrap_or(u64::MAX).min(1 << 20)
                };
                (0..period).find_map(|l| {
                    let val = beta * (int(l as i64) + r) + c;
                    to_i64(&val).map(|v| {
                        let mut m = Monomial::t_pow(-v - 1, nvars);
                        if *i < nvars {
                            m.xdeg[*i] = l as u32;
                        }
                        m
                    })
                })
            }
        }
    }
}

fn diagonal_factors(op: &OperatorSpec, out: &mut Vec<DiagLeaf>) -> Result<(), OperatorError> {
    use OperatorSpec::*;
    match op {
        Identity => out.push(DiagLeaf::Scalar(Rational::one())),
        MulByT => out.push(DiagLeaf::ShiftT),
        PartialT => out.push(DiagLeaf::Phi(Rational::zero())),
        PhiC(c) => out.push(DiagLeaf::Phi(c.clone())),
        Dtr(r) => out.push(DiagLeaf::Euler(r.clone())),
        ArS { alpha, r, s } => {
            let c = alpha + s;
            if is_integer(&c) {
                return Err(OperatorError::UndefinedInverse(c));
            }
            out.push(DiagLeaf::Ars { c, r: r.clone() })
        }
        AbetaD { alpha, beta, i, r, s } => {
            let c = alpha + s;
            if is_integer(&c) {
                return Err(OperatorError::UndefinedInverse(c));
            }
            out.push(DiagLeaf::AbetaD {
                c,
                beta: beta.clone(),
                i: *i,
                r: r.clone(),
            })
        }
        Scale(c, o) => {
            out.push(DiagLeaf::Scalar(c.clone()));
            diagonal_factors(o, out)?;
        }
        Compose(ops) => {
            for o in ops {
                diagonal_factors(o, out)?;
            }
        }
        PartialX(_) | MulByElem(_) | Sum(_) => {
            return Err(OperatorError::NonDiagonal(format!("{op:?}")));
        }
    }
    Ok(())
}

/// The leaves of a diagonal operator in application order (rightmost factor first).
fn diagonal_chain(op: &OperatorSpec) -> Result<Vec<DiagLeaf>, OperatorError> {
    let mut leaves = Vec::new();
    diagonal_factors(op, &mut leaves)?;
    leaves.reverse();
    Ok(leaves)
}

fn chain_shift(chain: &[DiagLeaf]) -> i64 {
    chain.iter().map(DiagLeaf::shift).sum()
}

/// Eigenvalue of the chain on `m` (image is `m` shifted by the total shift).
fn chain_eigen(chain: &[DiagLeaf], m: &Monomial) -> Rational {
    let mut cur = m.clone();
    let mut acc = Rational::one();
    for leaf in chain {
        acc *= leaf.eigen(&cur);
        cur.tdeg += leaf.shift();
    }
    acc
}

/// Global invertibility on `k((t))[x]` together with a witness monomial.
///
/// `Dtr(r)` and `PhiC(r)` are invertible iff `r` is not an integer, `ArS` iff
/// `alpha + r + s` is not an integer, and `AbetaD` iff `beta (l + r) + alpha + s` is never
/// an integer. Compositions are invertible iff every factor is.
pub fn invertible_on(op: &OperatorSpec, w: &DegreeWindow, nvars: usize) -> Result<InvertibilityVerdict, OperatorError> {
    let chain = diagonal_chain(op)?;
    let mut offset = 0i64;
    for leaf in &chain {
        if let Some(mut m) = leaf.zero_at(nvars, w) {
            // Pull the witness back through the factors applied before this one.
            m.tdeg -= offset;
            let eigenvalue = chain_eigen(&chain, &m);
            let in_window = w.contains(&m);
            return Ok(InvertibilityVerdict {
                invertible: false,
                witness: Some(Witness { monomial: m, eigenvalue }),
                witness_in_window: in_window,
            });
        }
        offset += leaf.shift();
    }
    Ok(InvertibilityVerdict {
        invertible: true,
        witness: None,
        witness_in_window: false,
    })
}

/// Inverse of a diagonal operator, applied monomial by monomial and truncated to `w`.
pub fn invert_diagonal(op: &OperatorSpec, e: &RingElement, w: &DegreeWindow) -> Result<RingElement, OperatorError> {
    let chain = diagonal_chain(op)?;
    let shift = chain_shift(&chain);
    let mut out = RingElement::zero(e.nvars());
    for (m, c) in e.terms() {
        let pre = m.with_tdeg(m.tdeg - shift);
        let ev = chain_eigen(&chain, &pre);
        if ev.is_zero() {
            return Err(OperatorError::VanishingEigenvalue(pre));
        }
        out.add_term(pre, c / ev);
    }
    Ok(out.truncate(w))
}

/// Parameters for the commutation suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub r: Rational,
    pub r2: Rational,
    pub s: Rational,
    pub s2: Rational,
}

/// Evaluates every displayed commutation relation on each monomial `t^k x^u` of the window
/// (one x variable, `u <= w.xmax`). Returns one verdict per relation.
pub fn check_commutation(w: &DegreeWindow, p: &CommutationParams) -> Result<Vec<(String, bool)>, OperatorError> {
    use OperatorSpec::*;
    let a_s = &p.alpha + &p.s;
    let a_s2 = &p.alpha + &p.s2;
    if is_integer(&a_s) || is_integer(&a_s2) {
        return Err(OperatorError::Precondition(
            "alpha + s and alpha + s' must not be integers".into(),
        ));
    }
    let n = 1;
    let g = RingElement::one(n);
    let one = int(1);
    let (alpha, beta, r, r2, s, s2) = (&p.alpha, &p.beta, &p.r, &p.r2, &p.s, &p.s2);
    let ars = |r: &Rational, s: &Rational| ArS {
        alpha: alpha.clone(),
        r: r.clone(),
        s: s.clone(),
    };
    let abd = |r: &Rational| AbetaD {
        alpha: alpha.clone(),
        beta: beta.clone(),
        i: 0,
        r: r.clone(),
        s: s.clone(),
    };
    let tinv = MulByElem(RingElement::t_pow(n, -1));
    let x1 = MulByElem(RingElement::var(n, 0));
    let dt = |c: Rational| Dtr(c);
    let phi = |c: Rational| PhiC(c);
    let c = OperatorSpec::compose;

    let relations: Vec<(&str, OperatorSpec, OperatorSpec)> = vec![
        ("A_{r,s} phi_{a+s} = D_{t,a+r+s}", c([ars(r, s), phi(a_s.clone())]), dt(&a_s + r)),
        (
            "phi_{a+s} A_{r,s} = D_{t,a+r+s+1}",
            c([phi(a_s.clone()), ars(r, s)]),
            dt(&a_s + r + &one),
        ),
        (
            "phi_a = t^-1 D_{t,a} = D_{t,a+1} t^-1",
            c([tinv.clone(), dt(alpha.clone())]),
            c([dt(alpha + &one), tinv.clone()]),
        ),
        ("t phi_a = phi_{a-1} t", c([MulByT, phi(alpha.clone())]), c([phi(alpha - &one), MulByT])),
        (
            "D_{t,a} phi_b = phi_{a-1} D_{t,b}",
            c([dt(alpha.clone()), phi(beta.clone())]),
            c([phi(alpha - &one), dt(beta.clone())]),
        ),
        (
            "D_{t,a} D_{t,b} = D_{t,b} D_{t,a}",
            c([dt(alpha.clone()), dt(beta.clone())]),
            c([dt(beta.clone()), dt(alpha.clone())]),
        ),
        (
            "phi_a phi_b = phi_{b+1} phi_{a-1}",
            c([phi(alpha.clone()), phi(beta.clone())]),
            c([phi(beta + &one), phi(alpha - &one)]),
        ),
        (
            "A_{r,s} A_{r',s'} = A_{r',s'-1} A_{r,s+1}",
            c([ars(r, s), ars(r2, s2)]),
            c([ars(r2, &(s2 - &one)), ars(r, &(s + &one))]),
        ),
        ("A_{r,s} t = t A_{r,s+1}", c([ars(r, s), MulByT]), c([MulByT, ars(r, &(s + &one))])),
        (
            "A_{bD_{i,r},s} x_i = x_i A_{bD_{i,r+1},s}",
            c([abd(r), x1.clone()]),
            c([x1, abd(&(r + &one))]),
        ),
    ];
    // The phi_a identity also asserts phi_a = t^-1 D_{t,a} directly.
    let first_half = (
        c([tinv, dt(alpha.clone())]),
        phi(alpha.clone()),
    );

    let monos: Vec<Monomial> = (w.tmin..=w.tmax)
        .flat_map(|k| (0..=w.xmax).map(move |u| Monomial::new(k, vec![u], 0)))
        .collect();
    let mut verdicts = Vec::with_capacity(relations.len());
    for (idx, (name, lhs, rhs)) in relations.iter().enumerate() {
        let mut holds = true;
        for m in &monos {
            let e = RingElement::from_monomial(m.clone());
            if apply(lhs, &e, &g)? != apply(rhs, &e, &g)? {
                holds = false;
                break;
            }
            if idx == 2 && apply(&first_half.0, &e, &g)? != apply(&first_half.1, &e, &g)? {
                holds = false;
                break;
            }
        }
        verdicts.push((name.to_string(), holds));
    }
    Ok(verdicts)
}

/// Truncated solution of `(phi + psi) a = b` obtained by the order-by-order recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationSolution {
    pub solution: RingElement,
    /// Residual `b - (phi + psi) a`; only terms above `tmax` may remain.
    pub residual: RingElement,
    pub residual_clean: bool,
}

/// Solves `(phi + psi) a = b` for each target, where `phi` preserves t-degree and is invertible
/// on the window and `psi` raises t-degree by at least one. Works in one x variable or more;
/// every t-slice is inverted through `phi` and the remainder pushed one degree up.
pub fn perturbation_invertibility_probe(
    phi: &OperatorSpec,
    psi: &OperatorSpec,
    w: &DegreeWindow,
    targets: &[RingElement],
) -> Result<Vec<PerturbationSolution>, OperatorError> {
    let chain = diagonal_chain(phi)?;
    if chain_shift(&chain) != 0 {
        return Err(OperatorError::Precondition("phi must preserve t-degree".into()));
    }
    let sum = OperatorSpec::sum([phi.clone(), psi.clone()]);
    targets
        .iter()
        .map(|b| {
            let n = b.nvars();
            let g = RingElement::one(n);
            let mut a = RingElement::zero(n);
            let mut residual = b.clone();
            while let Some((lo, _)) = residual.t_range() {
                if lo > w.tmax {
                    break;
                }
                let slice = residual.t_slice(lo);
                let mut delta = RingElement::zero(n);
                for (m, c) in slice.terms() {
                    let ev = chain_eigen(&chain, m);
                    if ev.is_zero() {
                        return Err(OperatorError::VanishingEigenvalue(m.clone()));
                    }
                    delta.add_term(m.clone(), c / ev);
                }
                let image = apply(&sum, &delta, &g)?;
                if let Some((ilo, _)) = (&image - &slice).t_range() {
                    if ilo <= lo {
                        return Err(OperatorError::Precondition(
                            "psi must raise t-degree by at least one".into(),
                        ));
                    }
                }
                a = &a + &delta;
                residual = &residual - &image;
            }
            let residual_clean = residual.terms().all(|(m, _)| m.tdeg > w.tmax);
            Ok(PerturbationSolution {
                solution: a,
                residual,
                residual_clean,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn t(k: i64) -> RingElement {
        RingElement::t_pow(1, k)
    }

    fn g1() -> RingElement {
        RingElement::one(1)
    }

    fn win(tmin: i64, tmax: i64) -> DegreeWindow {
        DegreeWindow::new(tmin, tmax, 2, 0).unwrap()
    }

    #[test]
    fn apply_examples() {
        let out = apply(&OperatorSpec::Dtr(rat(1, 2)), &t(2), &g1()).unwrap();
        assert_eq!(out, t(2).scale(&rat(5, 2)));
        let out = apply(&OperatorSpec::PhiC(rat(-1, 2)), &t(1), &g1()).unwrap();
        assert_eq!(out, t(0).scale(&rat(1, 2)));
        let ars = OperatorSpec::ars(rat(1, 2), int(1), int(0));
        let out = apply(&ars, &t(0), &g1()).unwrap();
        assert_eq!(out, t(1).scale(&rat(5, 3)));
    }

    #[test]
    fn ars_undefined_inverse() {
        let ars = OperatorSpec::ars(rat(1, 2), int(1), rat(1, 2));
        assert_eq!(
            apply(&ars, &t(0), &g1()),
            Err(OperatorError::UndefinedInverse(int(1)))
        );
    }

    #[test]
    fn invertibility_examples() {
        let w = win(-5, 5);
        let v = invertible_on(&OperatorSpec::Dtr(int(-2)), &w, 1).unwrap();
        assert!(!v.invertible);
        let wit = v.witness.unwrap();
        assert_eq!(wit.monomial, Monomial::t_pow(2, 1));
        assert!(wit.eigenvalue.is_zero());
        assert!(v.witness_in_window);

        let v = invertible_on(&OperatorSpec::ars(rat(1, 3), rat(1, 3), int(0)), &w, 1).unwrap();
        assert!(v.invertible);
        let v = invertible_on(&OperatorSpec::ars(rat(1, 3), rat(2, 3), int(0)), &w, 1).unwrap();
        assert!(!v.invertible);
        assert_eq!(v.witness.unwrap().monomial, Monomial::t_pow(-2, 1));

        let abd = OperatorSpec::AbetaD {
            alpha: rat(1, 2),
            beta: rat(1, 3),
            i: 0,
            r: int(0),
            s: int(0),
        };
        assert!(invertible_on(&abd, &w, 1).unwrap().invertible);
    }

    #[test]
    fn non_diagonal_rejected() {
        let op = OperatorSpec::sum([OperatorSpec::Identity, OperatorSpec::MulByT]);
        assert!(matches!(
            invertible_on(&op, &win(0, 1), 1),
            Err(OperatorError::NonDiagonal(_))
        ));
    }

    #[test]
    fn composed_witness_is_pulled_back() {
        // Dtr(-2) after MulByT: kills t^1.
        let op = OperatorSpec::compose([OperatorSpec::Dtr(int(-2)), OperatorSpec::MulByT]);
        let v = invertible_on(&op, &win(-3, 3), 1).unwrap();
        let m = v.witness.unwrap().monomial;
        assert_eq!(m, Monomial::t_pow(1, 1));
        assert!(apply(&op, &RingElement::from_monomial(m), &g1()).unwrap().is_zero());
    }

    #[test]
    fn invert_examples() {
        let w = win(-4, 4);
        let inv = invert_diagonal(&OperatorSpec::Dtr(rat(1, 2)), &t(2), &w).unwrap();
        assert_eq!(inv, t(2).scale(&rat(2, 5)));
        let ars = OperatorSpec::ars(rat(1, 2), int(1), int(0));
        let inv = invert_diagonal(&ars, &t(1).scale(&rat(5, 3)), &w).unwrap();
        assert_eq!(inv, t(0));
        let inv = invert_diagonal(&OperatorSpec::Dtr(rat(1, 3)), &t(0), &w).unwrap();
        assert_eq!(inv, t(0).scale(&int(3)));
        assert!(matches!(
            invert_diagonal(&OperatorSpec::Dtr(int(-2)), &t(2), &w),
            Err(OperatorError::VanishingEigenvalue(_))
        ));
    }

    #[test]
    fn commutation_examples_hold() {
        let p = CommutationParams {
            alpha: rat(1, 3),
            beta: rat(2, 5),
            r: int(1),
            r2: rat(-3, 7),
            s: int(0),
            s2: rat(1, 4),
        };
        let w = DegreeWindow::new(-3, 3, 3, 0).unwrap();
        let verdicts = check_commutation(&w, &p).unwrap();
        assert_eq!(verdicts.len(), 10);
        for (name, ok) in verdicts {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn commutation_rejects_integer_shift() {
        let p = CommutationParams {
            alpha: rat(1, 2),
            beta: int(1),
            r: int(1),
            r2: int(1),
            s: rat(1, 2),
            s2: int(0),
        };
        assert!(check_commutation(&win(-1, 1), &p).is_err());
    }

    #[test]
    fn perturbation_geometric_series() {
        let w = win(0, 5);
        let sols = perturbation_invertibility_probe(&OperatorSpec::Identity, &OperatorSpec::MulByT, &w, &[t(0)]).unwrap();
        let expected = (0..=5).fold(RingElement::zero(1), |acc, k| {
            &acc + &t(k).scale(&int(if k % 2 == 0 { 1 } else { -1 }))
        });
        assert_eq!(sols[0].solution, expected);
        assert!(sols[0].residual_clean);
    }

    #[test]
    fn perturbation_with_dtr() {
        let w = win(0, 3);
        let psi_zero = OperatorSpec::scale(int(0), OperatorSpec::Identity);
        let sols = perturbation_invertibility_probe(&OperatorSpec::Dtr(rat(1, 2)), &psi_zero, &w, &[t(1)]).unwrap();
        assert_eq!(sols[0].solution, t(1).scale(&rat(2, 3)));

        let sols = perturbation_invertibility_probe(&OperatorSpec::Dtr(rat(1, 2)), &OperatorSpec::MulByT, &w, &[t(0)]).unwrap();
        let a = &sols[0].solution;
        assert_eq!(a.coefficient(&Monomial::t_pow(0, 1)), int(2));
        assert_eq!(a.coefficient(&Monomial::t_pow(1, 1)), rat(-4, 3));
        assert!(sols[0].residual_clean);
    }

    #[test]
    fn perturbation_rejects_degree_lowering_psi() {
        let w = win(0, 3);
        let err = perturbation_invertibility_probe(&OperatorSpec::Identity, &OperatorSpec::PhiC(rat(1, 2)), &w, &[t(1)]);
        assert!(err.is_err());
    }
}
