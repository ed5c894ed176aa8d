//! Arrangements `lambda = x_1^{w_1} ... x_n^{w_n} (1 - x_1 - ... - x_n)^{w_0}` and the closed-form
//! quantities attached to them: candidate exponent sets, the convolution candidate set, the
//! gcd criterion, the scalar `d_{alpha,l}`, and the alternating binomial sum.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::koszul::{exponent_test_with, EngineError, EngineOptions, ExponentReport, ProblemInstance, Verdict, WindowSchedule};
use crate::rational::{binomial, int, is_integer, rat, unit_interval_rep, Rational};
use crate::ring::RingElement;
use crate::upoly::UPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("weights must be non-empty with at least one positive entry")]
    NoPositiveWeight,
    #[error("weight w_{0} is zero")]
    ZeroWeight(usize),
    #[error("need at least {needed} weights, got {got}")]
    TooFewWeights { needed: usize, got: usize },
    #[error("w_0 = {0}; the determinant needs w_0 >= 2")]
    SmallLeadingWeight(u32),
    #[error("alpha + l = 0 is a pole of the prefactor")]
    Pole,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Weights `(w_0, w_1, ..., w_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Arrangement {
    weights: Vec<u32>,
}

impl Arrangement {
    pub fn new(weights: Vec<u32>) -> Result<Self, ArrangementError> {
        if weights.iter().all(|w| *w == 0) {
            return Err(ArrangementError::NoPositiveWeight);
        }
        Ok(Arrangement { weights })
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn d(&self) -> u32 {
        self.weights.iter().sum()
    }
}

pub fn lambda_poly(a: &Arrangement) -> Result<RingElement, ArrangementError> {
    let n = a.n();
    if let Some(i) = (1..=n).find(|i| a.weights[*i] == 0) {
        return Err(ArrangementError::ZeroWeight(i));
    }
    let sigma = (0..n).fold(RingElement::zero(n), |acc, i| &acc + &RingElement::var(n, i));
    let base = &RingElement::one(n) - &sigma;
    let mono = (0..n).fold(RingElement::one(n), |acc, i| &acc * &RingElement::var(n, i).pow(a.weights[i + 1]));
    Ok(&mono * &base.pow(a.weights[0]))
}

/// `{ j / w_i : 1 <= j <= w_i }` over all positive weights, as representatives in `(0, 1]`.
pub fn candidate_exponents(a: &Arrangement) -> BTreeSet<Rational> {
    a.weights
        .iter()
        .filter(|w| **w > 0)
        .flat_map(|&w| (1..=w).map(move |j| rat(j as i64, w as i64)))
        .collect()
}

fn fractions_of(w: u32) -> BTreeSet<Rational> {
    (1..=w).map(|i| rat(i as i64, w as i64)).collect()
}

/// Intersection of `{ i / w : 1 <= i <= w }` over `weights[r..]`.
pub fn convolution_candidate_set(weights: &[u32], r: usize) -> Result<BTreeSet<Rational>, ArrangementError> {
    let tail = weights.get(r..).unwrap_or(&[]);
    if tail.is_empty() {
        return Err(ArrangementError::TooFewWeights { needed: r + 1, got: weights.len() });
    }
    if let Some(pos) = tail.iter().position(|w| *w == 0) {
        return Err(ArrangementError::ZeroWeight(r + pos));
    }
    let mut sets = tail.iter().map(|w| fractions_of(*w));
    let first = sets.next().unwrap();
    Ok(sets.fold(first, |acc, s| acc.intersection(&s).cloned().collect()))
}

/// `true` iff the weights are coprime as a family.
pub fn gcd_criterion(weights: &[u32]) -> Result<bool, ArrangementError> {
    if weights.len() < 2 {
        return Err(ArrangementError::TooFewWeights { needed: 2, got: weights.len() });
    }
    if let Some(pos) = weights.iter().position(|w| *w == 0) {
        return Err(ArrangementError::ZeroWeight(pos));
    }
    Ok(weights.iter().fold(0u32, |g, w| g.gcd(w)) == 1)
}

/// The polynomial part of `d_{alpha,l}` as a polynomial in `alpha`:
/// `sum_r C(w0-1, w0-r) (-1)^(w0-r) prod_{k<r} (d(a+l) + c - k) prod_{k>=r} ((d-w0)(a+l) + c - k - 1)`
/// with `c = m + d + n`.
pub fn determinant_poly(a: &Arrangement, l: i64, m: u64) -> Result<UPoly, ArrangementError> {
    let w0 = a.weights[0];
    if w0 < 2 {
        return Err(ArrangementError::SmallLeadingWeight(w0));
    }
    let d = a.d() as i64;
    let c = m as i64 + d + a.n() as i64;
    // alpha + l as a polynomial in alpha
    let shifted = UPoly::new(vec![int(l), int(1)]);
    let mut total = UPoly::zero();
    for r in 1..=w0 as u64 {
        let sign = if (w0 as u64 - r).is_multiple_of(2) { int(1) } else { int(-1) };
        let coeff = Rational::from_integer(binomial(w0 as u64 - 1, w0 as u64 - r)) * sign;
        let mut term = UPoly::constant(coeff);
        for k in 1..r {
            let lin = shifted.scale(&int(d)).add(&UPoly::constant(int(c - k as i64)));
            term = term.mul(&lin);
        }
        for k in r..w0 as u64 {
            let lin = shifted
                .scale(&int(d - w0 as i64))
                .add(&UPoly::constant(int(c - k as i64 - 1)));
            term = term.mul(&lin);
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// `d_{alpha,l} = (alpha / (l + alpha))^(w0-1)` times the polynomial part.
pub fn determinant_d(a: &Arrangement, alpha: &Rational, l: i64, m: u64) -> Result<Rational, ArrangementError> {
    let poly = determinant_poly(a, l, m)?;
    let shifted = alpha + int(l);
    if shifted.is_zero() {
        return Err(ArrangementError::Pole);
    }
    let ratio = alpha / shifted;
    let pref = (1..a.weights[0]).fold(Rational::one(), |acc, _| acc * &ratio);
    Ok(pref * poly.eval(alpha))
}

/// `sum_{k=1}^{n} C(n-1, n-k) (-1)^(n-k) k^m`.
pub fn alternating_sum(n: u64, m: u32) -> BigInt {
    (1..=n).fold(BigInt::zero(), |acc, k| {
        let term = binomial(n - 1, n - k) * BigInt::from(k).pow(m);
        if (n - k).is_multiple_of(2) {
            acc + term
        } else {
            acc - term
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    /// Serialized as `a/b`.
    pub alpha: String,
    pub candidate: bool,
    pub verdict: Verdict,
    pub cokernel_dim: Option<usize>,
    /// `None` when the engine did not stabilize.
    pub agree: Option<bool>,
    #[serde(skip)]
    pub report: ExponentReport,
}

/// Engine verdicts on `lambda` for every candidate class and every extra class, compared
/// against candidate membership. Classes are taken mod Z; duplicates are dropped.
pub fn oracle_suite(
    a: &Arrangement,
    extra_alphas: &[Rational],
    schedule: &WindowSchedule,
    opts: &EngineOptions,
) -> Result<Vec<OracleRow>, ArrangementError> {
    let f = lambda_poly(a)?;
    let n = a.n();
    let template = ProblemInstance::new(f, RingElement::one(n), int(0))?;
    let candidates = candidate_exponents(a);
    let mut alphas: BTreeSet<Rational> = candidates.clone();
    alphas.extend(extra_alphas.iter().map(unit_interval_rep));
    let alphas: Vec<Rational> = alphas.into_iter().collect();
    let windows = schedule.windows(&template);
    let inner = EngineOptions {
        exec: crate::par::ExecMode::Sequential,
        ..opts.clone()
    };
    let reports = opts.exec.map(alphas.clone(), |alpha| {
        exponent_test_with(&template.with_alpha(alpha), &windows, &inner)
    });
    alphas
        .into_iter()
        .zip(reports)
        .map(|(alpha, report)| {
            let report = report?;
            let candidate = is_candidate(a, &alpha);
            let agree = match report.verdict {
                Verdict::Undetermined => None,
                Verdict::Exponent => Some(candidate),
                Verdict::NotExponent => Some(!candidate),
            };
            Ok(OracleRow {
                alpha: crate::rational::format_rational(&alpha),
                candidate,
                verdict: report.verdict,
                cokernel_dim: report.cokernel_dim,
                agree,
                report,
            })
        })
        .collect()
}

/// `w_i alpha` is an integer for some positive weight.
pub fn is_candidate(a: &Arrangement, alpha: &Rational) -> bool {
    a.weights
        .iter()
        .filter(|w| **w > 0)
        .any(|w| is_integer(&(alpha * int(*w as i64))))
}
