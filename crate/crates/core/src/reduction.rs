//! Front-end reductions: a family `p - lambda^d q = 0` to engine data, exponent scaling under
//! the `d`-th power map, and the indicial oracle for univariate operators.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::koszul::{EngineError, ProblemInstance};
use crate::rational::{int, unit_interval_rep, Rational};
use crate::ring::{Monomial, RingElement, RingError};
use crate::upoly::UPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("q is zero after clearing denominators")]
    ZeroDenominator,
    #[error("r must be a nonzero polynomial")]
    BadDenominator,
    #[error("d must be positive")]
    ZeroPower,
    #[error("A0 is zero; the regular rank is undefined")]
    ZeroLeadingOperator,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// `p` and `q` may carry powers of `r^-1` (their g-layer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub p: RingElement,
    pub q: RingElement,
    pub r: RingElement,
    pub d: u32,
}

/// `sum c x^u r^-m` times `r^big` as a polynomial, for `big >= max m`.
fn clear_layer(e: &RingElement, r: &RingElement, big: u32) -> RingElement {
    let n = e.nvars();
    let mut out = RingElement::zero(n);
    for (m, c) in e.terms() {
        let plain = RingElement::term(n, Monomial::new(m.tdeg, m.xdeg.clone(), 0), c.clone());
        out = &out + &(&plain * &r.pow(big - m.gpow));
    }
    out
}

/// Returns the engine template (`alpha = 0`) with `f = pbar / qbar`, `g = r qbar`, and the scale `d`.
pub fn reduce_family(fam: &FamilySpec) -> Result<(ProblemInstance, u32), ReductionError> {
    if fam.d == 0 {
        return Err(ReductionError::ZeroPower);
    }
    if fam.r.is_zero() || !fam.r.is_pure_polynomial() {
        return Err(ReductionError::BadDenominator);
    }
    let big = fam.p.max_gpow().max(fam.q.max_gpow());
    let pbar = clear_layer(&fam.p, &fam.r, big);
    let qbar = clear_layer(&fam.q, &fam.r, big);
    if qbar.is_zero() {
        return Err(ReductionError::ZeroDenominator);
    }
    let g = fam.r.checked_mul(&qbar)?;
    // pbar / qbar = pbar r / g
    let n = g.nvars();
    let f = pbar.checked_mul(&fam.r)?.checked_mul(&RingElement::ginv(n, 1))?;
    let instance = ProblemInstance::new(f, g, int(0))?;
    Ok((instance, fam.d))
}

/// `alpha -> d alpha` on each class, returned sorted as representatives in `(0, 1]`.
pub fn scale_exponents(exps: &[Rational], d: u32) -> Vec<Rational> {
    let mut out: Vec<Rational> = exps.iter().map(|a| unit_interval_rep(&(a * int(d as i64)))).collect();
    out.sort();
    out
}

/// `L = sum_i t^i A_i(D)`, keyed by `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnivariateOperator {
    pub coefficients: BTreeMap<usize, UPoly>,
}

impl UnivariateOperator {
    pub fn new(coefficients: BTreeMap<usize, UPoly>) -> Self {
        UnivariateOperator { coefficients }
    }

    pub fn a0(&self) -> UPoly {
        self.coefficients.get(&0).cloned().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularPart {
    pub rank: usize,
    /// Serialized as `a/b` strings.
    #[serde(serialize_with = "serialize_roots")]
    pub rational_roots: Vec<(Rational, usize)>,
    #[serde(serialize_with = "serialize_poly")]
    pub residual_factor: UPoly,
}

fn serialize_roots<S: serde::Serializer>(roots: &[(Rational, usize)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(roots.len()))?;
    for (r, k) in roots {
        seq.serialize_element(&(crate::rational::format_rational(r), k))?;
    }
    seq.end()
}

fn serialize_poly<S: serde::Serializer>(p: &UPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// Rank of the regular part (`deg A0`) and the rational roots of `A0`.
pub fn univariate_regular_exponents(l: &UnivariateOperator) -> Result<RegularPart, ReductionError> {
    let a0 = l.a0();
    let Some(rank) = a0.degree() else {
        return Err(ReductionError::ZeroLeadingOperator);
    };
    let (rational_roots, residual_factor) = a0.rational_roots();
    Ok(RegularPart {
        rank,
        rational_roots,
        residual_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn x(n: usize, i: usize) -> RingElement {
        RingElement::var(n, i)
    }

    #[test]
    fn reduce_trivial() {
        let fam = FamilySpec {
            p: x(2, 0),
            q: RingElement::one(2),
            r: RingElement::one(2),
            d: 1,
        };
        let (inst, scale) = reduce_family(&fam).unwrap();
        assert_eq!(inst.f(), &x(2, 0));
        assert!(inst.g_is_trivial());
        assert_eq!(scale, 1);
    }

    #[test]
    fn reduce_with_denominator() {
        let fam = FamilySpec {
            p: &x(2, 0) * &x(2, 0),
            q: x(2, 1),
            r: RingElement::one(2),
            d: 3,
        };
        let (inst, scale) = reduce_family(&fam).unwrap();
        assert_eq!(inst.g(), &x(2, 1));
        let expect = &(&x(2, 0) * &x(2, 0)) * &RingElement::ginv(2, 1);
        assert_eq!(inst.f(), &expect);
        assert_eq!(scale, 3);
    }

    #[test]
    fn reduce_clears_common_denominator() {
        // p = x / r, q = 1 / r with r = x
        let r = x(1, 0);
        let fam = FamilySpec {
            p: &x(1, 0) * &RingElement::ginv(1, 1),
            q: RingElement::ginv(1, 1),
            r: r.clone(),
            d: 1,
        };
        let (inst, _) = reduce_family(&fam).unwrap();
        assert_eq!(inst.f(), &x(1, 0));
        assert_eq!(inst.g(), &r);
        let bad = FamilySpec {
            q: RingElement::zero(1),
            ..fam
        };
        assert_eq!(reduce_family(&bad).unwrap_err(), ReductionError::ZeroDenominator);
    }

    #[test]
    fn scaling_examples() {
        assert_eq!(scale_exponents(&[rat(1, 2)], 2), vec![int(1)]);
        assert_eq!(scale_exponents(&[rat(1, 3), rat(2, 3)], 1), vec![rat(1, 3), rat(2, 3)]);
        assert_eq!(scale_exponents(&[rat(1, 4)], 2), vec![rat(1, 2)]);
    }

    #[test]
    fn univariate_examples() {
        let a0 = UPoly::from_roots(&[(rat(1, 2), 1), (rat(1, 3), 1)]);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, a0);
        coeffs.insert(1, UPoly::x().pow(5));
        let rp = univariate_regular_exponents(&UnivariateOperator::new(coeffs)).unwrap();
        assert_eq!(rp.rank, 2);
        assert_eq!(rp.rational_roots, vec![(rat(1, 3), 1), (rat(1, 2), 1)]);

        let kummer = UnivariateOperator::new([(0, UPoly::linear(&rat(2, 7)))].into_iter().collect());
        let rp = univariate_regular_exponents(&kummer).unwrap();
        assert_eq!((rp.rank, rp.rational_roots), (1, vec![(rat(2, 7), 1)]));

        let sq = UnivariateOperator::new([(0, UPoly::linear(&rat(1, 2)).pow(2))].into_iter().collect());
        assert_eq!(univariate_regular_exponents(&sq).unwrap().rational_roots, vec![(rat(1, 2), 2)]);

        assert_eq!(
            univariate_regular_exponents(&UnivariateOperator::default()),
            Err(ReductionError::ZeroLeadingOperator)
        );
    }
}
