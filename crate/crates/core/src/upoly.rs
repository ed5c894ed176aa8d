//! Dense univariate polynomials over Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{format_rational, lcm_of_denominators, Rational};

/// Coefficients in ascending order, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        UPoly::new(vec![c])
    }

    pub fn one() -> Self {
        UPoly::constant(Rational::one())
    }

    /// The variable itself.
    pub fn x() -> Self {
        UPoly::new(vec![Rational::zero(), Rational::one()])
    }

    /// `x - r`.
    pub fn linear(r: &Rational) -> Self {
        UPoly::new(vec![-r.clone(), Rational::one()])
    }

    /// `prod (x - r)^mult`.
    pub fn from_roots(roots: &[(Rational, usize)]) -> Self {
        roots.iter().fold(UPoly::one(), |acc, (r, k)| acc.mul(&UPoly::linear(r).pow(*k)))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn pow(&self, e: usize) -> UPoly {
        (0..e).fold(UPoly::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder of division by `x - r`.
    pub fn div_linear(&self, r: &Rational) -> (UPoly, Rational) {
        if self.is_zero() {
            return (UPoly::zero(), Rational::zero());
        }
        let mut quot = vec![Rational::zero(); self.coeffs.len() - 1];
        let mut carry = Rational::zero();
        for i in (0..self.coeffs.len()).rev() {
            carry = &self.coeffs[i] + carry * r;
            if i > 0 {
                quot[i - 1] = carry.clone();
            }
        }
        (UPoly::new(quot), carry)
    }

    /// Rational roots with multiplicities (ascending) and the cofactor left after deflation.
    /// Candidates `p/q` come from the rational root theorem on the integer-scaled polynomial;
    /// each is screened by the root bound and by `(q - p) | F(1)`, `(q + p) | F(-1)` before
    /// the exact test `q^n F(p/q) = 0`.
    pub fn rational_roots(&self) -> (Vec<(Rational, usize)>, UPoly) {
        let mut roots = Vec::new();
        if self.is_zero() {
            return (roots, self.clone());
        }
        let lead = self.leading();
        let zero_mult = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if zero_mult > 0 {
            roots.push((Rational::zero(), zero_mult));
        }
        let l = lcm_of_denominators(self.coeffs.iter());
        let mut ints: Vec<BigInt> = self.coeffs[zero_mult..].iter().map(|c| c.numer() * (&l / c.denom())).collect();
        if ints.len() > 1 {
            let nums = divisors(&ints[0]);
            let dens = divisors(ints.last().unwrap());
            for q in &dens {
                for p in &nums {
                    if !p.gcd(q).is_one() {
                        continue;
                    }
                    for p in [p.clone(), -p] {
                        let mut k = 0;
                        while ints.len() > 1 && is_root_screened(&ints, &p, q) {
                            ints = deflate(&ints, &p, q);
                            k += 1;
                        }
                        if k > 0 {
                            roots.push((Rational::new(p, q.clone()), k));
                        }
                    }
                }
            }
        }
        roots.sort();
        // keep the original leading coefficient on the cofactor
        let rest = UPoly::new(ints.into_iter().map(Rational::from_integer).collect());
        let rest = rest.scale(&(lead / rest.leading()));
        (roots, rest)
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            match (a.is_one(), mono.is_empty()) {
                (true, false) => out.push_str(&mono),
                (_, true) => out.push_str(&format_rational(&a)),
                (false, false) => out.push_str(&format!("{}*{mono}", format_rational(&a))),
            }
        }
        out
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("D"))
    }
}

/// `q^n F(p/q)` for integer coefficients `F`, ascending.
fn homogeneous_eval(f: &[BigInt], p: &BigInt, q: &BigInt) -> BigInt {
    let n = f.len() - 1;
    let mut acc = f[n].clone();
    let mut qpow = BigInt::one();
    for i in (0..n).rev() {
        qpow *= q;
        acc = acc * p + &f[i] * &qpow;
    }
    acc
}

fn is_root_screened(f: &[BigInt], p: &BigInt, q: &BigInt) -> bool {
    // Cauchy bound: |p/q| <= 1 + max |a_i / a_n|
    let an = f.last().unwrap().abs();
    let big = f.iter().map(|c| c.abs()).max().unwrap();
    if p.abs() * &an > q * (&an + big) {
        return false;
    }
    let at_one: BigInt = f.iter().sum();
    let at_minus_one: BigInt = f.iter().enumerate().map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c }).sum();
    let divides = |d: BigInt, v: &BigInt| v.is_zero() || (!d.is_zero() && (v % d).is_zero());
    if !divides(q - p, &at_one) || !divides(q + p, &at_minus_one) {
        return false;
    }
    homogeneous_eval(f, p, q).is_zero()
}

/// Exact quotient of `F` by `q x - p`, which has integer coefficients by Gauss's lemma.
fn deflate(f: &[BigInt], p: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let n = f.len() - 1;
    let mut out = vec![BigInt::zero(); n];
    // f = (q x - p) g: top-down, g_{i-1} = (f_i + p g_i) / q
    let mut carry = BigInt::zero();
    for i in (1..=n).rev() {
        let num = &f[i] + p * &carry;
        carry = num / q;
        out[i - 1] = carry.clone();
    }
    out
}

/// Positive divisors of `|n|` by trial division. `n = 0` yields only 1.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    if let Some(v) = n.to_u64() {
        let mut small = Vec::new();
        let mut large = Vec::new();
        let mut i = 1u64;
        while i.saturating_mul(i) <= v {
            if v % i == 0 {
                small.push(BigInt::from(i));
                if i != v / i {
                    large.push(BigInt::from(v / i));
                }
            }
            i += 1;
        }
        small.extend(large.into_iter().rev());
        return small;
    }
    // Beyond u64: fall back to the prime-power structure of small factors only.
    let mut out = vec![BigInt::one()];
    let mut rest = n;
    let mut p = BigInt::from(2u8);
    while &p * &p <= rest && p < BigInt::from(1u32 << 20) {
        let mut k = 0;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            k += 1;
        }
        if k > 0 {
            let base = out.clone();
            let mut pk = BigInt::one();
            for _ in 0..k {
                pk *= &p;
                out.extend(base.iter().map(|d| d * &pk));
            }
        }
        p += 1;
    }
    if !rest.is_one() {
        let base = out.clone();
        out.extend(base.iter().map(|d| d * &rest));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn roots_of_product() {
        let p = UPoly::from_roots(&[(rat(1, 2), 1), (rat(1, 3), 1)]).scale(&int(6));
        let (roots, rest) = p.rational_roots();
        assert_eq!(roots, vec![(rat(1, 3), 1), (rat(1, 2), 1)]);
        assert_eq!(rest.degree(), Some(0));
    }

    #[test]
    fn repeated_and_zero_roots() {
        let p = UPoly::from_roots(&[(rat(1, 2), 2), (int(0), 1), (int(-3), 1)]);
        let (roots, _) = p.rational_roots();
        assert_eq!(roots, vec![(int(-3), 1), (int(0), 1), (rat(1, 2), 2)]);
    }

    #[test]
    fn irrational_residual() {
        // (x^2 - 2)(x - 1)
        let p = UPoly::new(vec![int(-2), int(0), int(1)]).mul(&UPoly::linear(&int(1)));
        let (roots, rest) = p.rational_roots();
        assert_eq!(roots, vec![(int(1), 1)]);
        assert_eq!(rest, UPoly::new(vec![int(-2), int(0), int(1)]));
    }

    #[test]
    fn division_and_display() {
        let p = UPoly::new(vec![int(1), int(-1), rat(3, 2)]);
        assert_eq!(p.to_string(), "3/2*D^2 - D + 1");
        let (q, r) = p.div_linear(&int(2));
        assert_eq!(r, p.eval(&int(2)));
        assert_eq!(q.mul(&UPoly::linear(&int(2))).add(&UPoly::constant(r)), p);
    }
}
