//! Truncated elements of `k((t))[x_1, ..., x_n, g^-1]` with exact rational coefficients.
//!
//! An element is a finite sum of monomials `t^k * x^u * g^-m`. The `g^-m` layers are
//! carried symbolically; products add layer exponents and never cancel against
//! numerator factors of `g`. [`RingElement::clear_g`] brings an element to a
//! canonical form in which equal elements of the ring compare equal.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("expected a pure polynomial in x (no t and no g^-1 terms)")]
    NotPolynomial,
    #[error("invalid degree window: tmin {tmin} > tmax {tmax}")]
    InvalidWindow { tmin: i64, tmax: i64 },
}

/// `t^tdeg * x^xdeg * g^-gpow`.
///
/// The derived ordering is lexicographic on `(tdeg, xdeg, gpow)`, which is also the
/// order used for serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub tdeg: i64,
    pub xdeg: Vec<u32>,
    pub gpow: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            tdeg: 0,
            xdeg: vec![0; nvars],
            gpow: 0,
        }
    }

    pub fn new(tdeg: i64, xdeg: Vec<u32>, gpow: u32) -> Self {
        Monomial { tdeg, xdeg, gpow }
    }

    pub fn t_pow(tdeg: i64, nvars: usize) -> Self {
        Monomial {
            tdeg,
            ..Monomial::one(nvars)
        }
    }

    pub fn nvars(&self) -> usize {
        self.xdeg.len()
    }

    /// Total degree in the x variables.
    pub fn x_degree(&self) -> u32 {
        self.xdeg.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            tdeg: self.tdeg + other.tdeg,
            xdeg: self
                .xdeg
                .iter()
                .zip(&other.xdeg)
                .map(|(a, b)| a + b)
                .collect(),
            gpow: self.gpow + other.gpow,
        }
    }

    pub fn with_tdeg(&self, tdeg: i64) -> Monomial {
        Monomial {
            tdeg,
            xdeg: self.xdeg.clone(),
            gpow: self.gpow,
        }
    }

    fn write_factors(&self, f: &mut impl fmt::Write) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut dyn fmt::Write| -> fmt::Result {
            if !first {
                f.write_char('*')?;
            }
            first = false;
            Ok(())
        };
        if self.tdeg != 0 {
            sep(f)?;
            if self.tdeg == 1 {
                f.write_str("t")?;
            } else {
                write!(f, "t^{}", self.tdeg)?;
            }
        }
        for (i, &e) in self.xdeg.iter().enumerate() {
            if e == 0 {
                continue;
            }
            sep(f)?;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if self.gpow != 0 {
            sep(f)?;
            write!(f, "ginv^{}", self.gpow)?;
        }
        Ok(())
    }

    fn is_one(&self) -> bool {
        self.tdeg == 0 && self.gpow == 0 && self.xdeg.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        self.write_factors(f)
    }
}

/// Finite truncation region of the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeWindow {
    pub tmin: i64,
    pub tmax: i64,
    /// Bound on the total x-degree of the numerator.
    pub xmax: u32,
    /// Bound on the denominator power `m` in `g^-m`.
    pub gmax: u32,
}

impl DegreeWindow {
    pub fn new(tmin: i64, tmax: i64, xmax: u32, gmax: u32) -> Result<Self, RingError> {
        if tmin > tmax {
            return Err(RingError::InvalidWindow { tmin, tmax });
        }
        Ok(DegreeWindow {
            tmin,
            tmax,
            xmax,
            gmax,
        })
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        (self.tmin..=self.tmax).contains(&m.tdeg) && m.x_degree() <= self.xmax && m.gpow <= self.gmax
    }

    /// Every monomial of the window, in canonical order.
    pub fn monomials(&self, nvars: usize) -> Vec<Monomial> {
        let xs = exponents_up_to(nvars, self.xmax);
        let mut out = Vec::new();
        for tdeg in self.tmin..=self.tmax {
            for x in &xs {
                for gpow in 0..=self.gmax {
                    out.push(Monomial::new(tdeg, x.clone(), gpow));
                }
            }
        }
        out
    }

    pub fn contains_window(&self, other: &DegreeWindow) -> bool {
        self.tmin <= other.tmin
            && self.tmax >= other.tmax
            && self.xmax >= other.xmax
            && self.gmax >= other.gmax
    }
}

/// Exponent vectors in `nvars` variables with total degree exactly `deg`, in lex order.
pub fn exponents_of_degree(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    if nvars == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=deg {
        for mut rest in exponents_of_degree(nvars - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn exponents_up_to(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut all: Vec<Vec<u32>> = (0..=deg)
        .flat_map(|d| exponents_of_degree(nvars, d))
        .collect();
    all.sort();
    all
}

/// Element of `R = k((t))[x, g^-1]` restricted to finitely many monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl RingElement {
    pub fn zero(nvars: usize) -> Self {
        RingElement {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(nvars, Monomial::one(nvars), c)
    }

    /// `c * mono`. Panics if `mono` lives in a different number of variables.
    pub fn term(nvars: usize, mono: Monomial, c: Rational) -> Self {
        assert_eq!(mono.nvars(), nvars, "monomial variable count");
        let mut e = Self::zero(nvars);
        e.add_term(mono, c);
        e
    }

    pub fn from_monomial(mono: Monomial) -> Self {
        Self::term(mono.nvars(), mono, Rational::one())
    }

    /// The variable `x_{i+1}` (indices are zero-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut mono = Monomial::one(nvars);
        mono.xdeg[i] = 1;
        Self::from_monomial(mono)
    }

    pub fn t_pow(nvars: usize, k: i64) -> Self {
        Self::from_monomial(Monomial::t_pow(k, nvars))
    }

    /// `g^-m` as a formal layer.
    pub fn ginv(nvars: usize, m: u32) -> Self {
        let mut mono = Monomial::one(nvars);
        mono.gpow = m;
        Self::from_monomial(mono)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut e = Self::zero(nvars);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, c: Rational) {
        debug_assert_eq!(mono.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check_same(&self, other: &RingElement) -> Result<(), RingError> {
        if self.nvars != other.nvars {
            return Err(RingError::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_same(other)?;
        let mut out = RingElement::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> RingElement {
        if c.is_zero() {
            return RingElement::zero(self.nvars);
        }
        RingElement {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> RingElement {
        let mut acc = RingElement::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by `t^k`.
    pub fn shift_t(&self, k: i64) -> RingElement {
        RingElement {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.with_tdeg(m.tdeg + k), c.clone()))
                .collect(),
        }
    }

    /// Applies a per-monomial map `m -> (c, m')`, summing collisions.
    pub fn map_monomials(&self, mut f: impl FnMut(&Monomial) -> Option<(Rational, Monomial)>) -> RingElement {
        let mut out = RingElement::zero(self.nvars);
        for (m, c) in &self.terms {
            if let Some((k, m2)) = f(m) {
                out.add_term(m2, c * k);
            }
        }
        out
    }

    pub fn is_pure_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.tdeg == 0 && m.gpow == 0)
    }

    pub fn has_t(&self) -> bool {
        self.terms.keys().any(|m| m.tdeg != 0)
    }

    /// Maximal total x-degree of any term; zero for the zero element.
    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::x_degree).max().unwrap_or(0)
    }

    pub fn max_gpow(&self) -> u32 {
        self.terms.keys().map(|m| m.gpow).max().unwrap_or(0)
    }

    pub fn t_range(&self) -> Option<(i64, i64)> {
        let lo = self.terms.keys().map(|m| m.tdeg).min()?;
        let hi = self.terms.keys().map(|m| m.tdeg).max()?;
        Some((lo, hi))
    }

    /// Terms whose t-degree equals `k`.
    pub fn t_slice(&self, k: i64) -> RingElement {
        RingElement {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.tdeg == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Derivative in `t`: `t^k -> k t^(k-1)`.
    pub fn partial_t(&self) -> RingElement {
        self.map_monomials(|m| Some((int(m.tdeg), m.with_tdeg(m.tdeg - 1))))
    }

    /// Leibniz derivative in `x_{i+1}`. On `a * g^-m` this is
    /// `(d_i a) g^-m - m a (d_i g) g^-(m+1)`.
    pub fn partial_x(&self, i: usize, g: &RingElement) -> Result<RingElement, RingError> {
        if i >= self.nvars {
            return Err(RingError::IndexOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        self.check_same(g)?;
        if !g.is_pure_polynomial() {
            return Err(RingError::NotPolynomial);
        }
        let dg = poly_derivative(g, i);
        let mut out = RingElement::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.xdeg[i];
            if e > 0 {
                let mut m2 = m.clone();
                m2.xdeg[i] -= 1;
                out.add_term(m2, c * int(e as i64));
            }
            if m.gpow > 0 {
                let k = c * int(m.gpow as i64);
                for (gm, gc) in &dg.terms {
                    let mut m2 = m.mul(gm);
                    m2.gpow += 1;
                    out.add_term(m2, -(&k * gc));
                }
            }
        }
        Ok(out)
    }

    /// Drops every term outside the window.
    pub fn truncate(&self, w: &DegreeWindow) -> RingElement {
        RingElement {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.contains(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical form: within each t-slice, all terms are written over a single power of `g`
    /// which is then lowered while `g` divides the numerator.
    pub fn clear_g(&self, g: &RingElement) -> Result<RingElement, RingError> {
        self.check_same(g)?;
        if !g.is_pure_polynomial() {
            return Err(RingError::NotPolynomial);
        }
        if self.max_gpow() == 0 {
            return Ok(self.clone());
        }
        let gpoly = XPoly::from_element(g);
        let mut slices: BTreeMap<i64, Vec<(&Monomial, &Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            slices.entry(m.tdeg).or_default().push((m, c));
        }
        let mut out = RingElement::zero(self.nvars);
        for (tdeg, terms) in slices {
            let top = terms.iter().map(|(m, _)| m.gpow).max().unwrap_or(0);
            let mut numer = XPoly::default();
            let mut gpowers = vec![XPoly::one(self.nvars)];
            for _ in 0..top {
                let next = gpowers.last().unwrap().mul(&gpoly);
                gpowers.push(next);
            }
            for (m, c) in terms {
                let lift = &gpowers[(top - m.gpow) as usize];
                for (x, gc) in &lift.0 {
                    let xs: Vec<u32> = x.iter().zip(&m.xdeg).map(|(a, b)| a + b).collect();
                    numer.add(xs, c * gc);
                }
            }
            let mut level = top;
            while level > 0 {
                match numer.exact_div(&gpoly) {
                    Some(q) => {
                        numer = q;
                        level -= 1;
                    }
                    None => break,
                }
            }
            for (x, c) in numer.0 {
                out.add_term(Monomial::new(tdeg, x, level), c);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&format_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", format_rational(&abs))?;
                }
                m.write_factors(f)?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&RingElement> for &RingElement {
            type Output = RingElement;
            /// Panics on a variable-count mismatch; use the `checked_*` form to handle it.
            fn $method(self, rhs: &RingElement) -> RingElement {
                self.$checked(rhs).expect("ring operands must share variables")
            }
        }
        impl std::ops::$tr<RingElement> for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: RingElement) -> RingElement {
                (&self).$checked(&rhs).expect("ring operands must share variables")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.scale(&-Rational::one())
    }
}

impl std::ops::Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

pub fn ring_add(a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
    a.checked_add(b)
}

pub fn ring_mul(a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
    a.checked_mul(b)
}

/// `i` is zero-based: `partial_x(0, ..)` differentiates in `x1`.
pub fn partial_x(i: usize, e: &RingElement, g: &RingElement) -> Result<RingElement, RingError> {
    e.partial_x(i, g)
}

pub fn truncate(e: &RingElement, w: &DegreeWindow) -> RingElement {
    e.truncate(w)
}

fn poly_derivative(p: &RingElement, i: usize) -> RingElement {
    p.map_monomials(|m| {
        let e = m.xdeg[i];
        if e == 0 {
            return None;
        }
        let mut m2 = m.clone();
        m2.xdeg[i] -= 1;
        Some((int(e as i64), m2))
    })
}

/// Plain polynomial in x used for exact division by `g`.
#[derive(Debug, Clone, Default)]
struct XPoly(BTreeMap<Vec<u32>, Rational>);

impl XPoly {
    fn one(nvars: usize) -> Self {
        let mut p = XPoly::default();
        p.add(vec![0; nvars], Rational::one());
        p
    }

    fn from_element(e: &RingElement) -> Self {
        let mut p = XPoly::default();
        for (m, c) in e.terms() {
            p.add(m.xdeg.clone(), c.clone());
        }
        p
    }

    fn add(&mut self, x: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(x.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&x);
        }
    }

    fn mul(&self, other: &XPoly) -> XPoly {
        let mut out = XPoly::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add(a.iter().zip(b).map(|(p, q)| p + q).collect(), ca * cb);
            }
        }
        out
    }

    /// Quotient when `d` divides `self` exactly (lex division; a single divisor is its own Groebner basis).
    fn exact_div(&self, d: &XPoly) -> Option<XPoly> {
        let (dlead, dcoef) = d.0.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = XPoly::default();
        while let Some((lead, coef)) = rem.0.iter().next_back().map(|(x, c)| (x.clone(), c.clone())) {
            if lead.iter().zip(dlead).any(|(a, b)| a < b) {
                return None;
            }
            let shift: Vec<u32> = lead.iter().zip(dlead).map(|(a, b)| a - b).collect();
            let q = coef / dcoef;
            for (x, c) in &d.0 {
                rem.add(x.iter().zip(&shift).map(|(a, b)| a + b).collect(), -(c * &q));
            }
            quot.add(shift, q);
        }
        Some(quot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn x(n: usize, i: usize) -> RingElement {
        RingElement::var(n, i)
    }

    #[test]
    fn add_cancels_and_merges() {
        let t = RingElement::t_pow(2, 1);
        let e = &t + &x(2, 0);
        assert_eq!(&e + &(-&t), x(2, 0));
        let z = RingElement::zero(2);
        assert_eq!(&e + &z, e);
        let mut m = Monomial::t_pow(2, 1);
        m.xdeg[0] = 1;
        m.gpow = 1;
        let half = RingElement::term(1, m.clone(), rat(1, 2));
        assert_eq!(&half + &half, RingElement::from_monomial(m));
    }

    #[test]
    fn mismatched_variables_error() {
        let a = RingElement::one(1);
        let b = RingElement::one(2);
        assert_eq!(
            ring_add(&a, &b),
            Err(RingError::VarCountMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn multiplication_examples() {
        let t = RingElement::t_pow(1, 1);
        let tinv = RingElement::t_pow(1, -1);
        assert_eq!(&t * &tinv, RingElement::one(1));

        let a = &x(2, 0) * &RingElement::ginv(2, 1);
        let b = &x(2, 1) * &RingElement::ginv(2, 1);
        let prod = &a * &b;
        assert_eq!(prod.to_string(), "x1*x2*ginv^2");

        let one_minus = &RingElement::one(1) - &x(1, 0);
        assert_eq!(one_minus.pow(2).to_string(), "1 - 2*x1 + x1^2");
    }

    #[test]
    fn partial_x_examples() {
        let g1 = RingElement::one(2);
        let e = &x(2, 0).pow(2) * &x(2, 1);
        assert_eq!(partial_x(0, &e, &g1).unwrap(), (&x(2, 0) * &x(2, 1)).scale(&int(2)));

        let g = x(1, 0);
        let d = partial_x(0, &RingElement::ginv(1, 1), &g).unwrap();
        assert_eq!(d, RingElement::ginv(1, 2).scale(&int(-1)));

        let e = &RingElement::t_pow(2, 3) * &x(2, 0);
        assert!(partial_x(1, &e, &g1).unwrap().is_zero());
        assert_eq!(
            partial_x(2, &e, &g1),
            Err(RingError::IndexOutOfRange { index: 2, nvars: 2 })
        );
    }

    #[test]
    fn truncate_examples() {
        let w = DegreeWindow::new(-2, 3, 2, 0).unwrap();
        let e = &RingElement::t_pow(1, -5) + &RingElement::one(1);
        assert_eq!(e.truncate(&w), RingElement::one(1));
        let inside = &RingElement::t_pow(1, 2) + &x(1, 0);
        assert_eq!(inside.truncate(&w), inside);
        assert!(x(1, 0).pow(3).truncate(&w).is_zero());
        let once = e.truncate(&w);
        assert_eq!(once.truncate(&w), once);
    }

    #[test]
    fn clear_g_identifies_representations() {
        let g = x(1, 0);
        let lhs = &(&x(1, 0) * &RingElement::ginv(1, 1)) - &RingElement::one(1);
        assert!(lhs.clear_g(&g).unwrap().is_zero());

        let g = &x(2, 1) + &RingElement::one(2);
        let a = &(&x(2, 1) * &RingElement::ginv(2, 1)) + &RingElement::ginv(2, 1);
        assert_eq!(a.clear_g(&g).unwrap(), RingElement::one(2));
        let b = (&x(2, 0) * &RingElement::ginv(2, 1)).clear_g(&g).unwrap();
        assert_eq!(b, &x(2, 0) * &RingElement::ginv(2, 1));
    }

    #[test]
    fn display_is_canonical() {
        let mut m = Monomial::new(-1, vec![2, 1], 1);
        let e = RingElement::term(2, m.clone(), rat(3, 2));
        assert_eq!(e.to_string(), "3/2*t^-1*x1^2*x2*ginv^1");
        m.tdeg = 0;
        let e2 = &e - &RingElement::term(2, m, int(1));
        assert_eq!(e2.to_string(), "3/2*t^-1*x1^2*x2*ginv^1 - x1^2*x2*ginv^1");
        assert_eq!(RingElement::zero(1).to_string(), "0");
    }

    #[test]
    fn window_enumeration() {
        let w = DegreeWindow::new(-1, 1, 1, 0).unwrap();
        assert_eq!(w.monomials(1).len(), 6);
        assert_eq!(exponents_of_degree(2, 2).len(), 3);
        assert_eq!(exponents_up_to(3, 2).len(), 10);
        assert!(DegreeWindow::new(2, 1, 0, 0).is_err());
    }
}
