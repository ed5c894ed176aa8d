//! Recursive-descent parsers for ring elements, univariate `A_i(D)` and operator expressions.
//!
//! ```text
//! sum    := ['+'|'-'] term (('+'|'-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ['^' ['-'] INT]
//! atom   := INT ['/' INT] | x<i> | t | ginv | '(' sum ')'
//! ```
//!
//! Negative exponents are accepted only on a bare power of `t`. Whitespace is ignored.

use std::collections::BTreeMap;
use std::fmt;

use gm_exponents::operators::OperatorSpec;
use gm_exponents::rational::{format_rational, parse_rational};
use gm_exponents::ring::RingElement;
use gm_exponents::upoly::UPoly;
use gm_exponents::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownVariable,
    BadLiteral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source.
    pub pos: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownVariable => "unknown variable",
            ParseErrorKind::BadLiteral => "bad literal",
        };
        write!(f, "{what} at position {}: expected {}, found {}", self.pos, self.expected, self.found)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(src[start..i].parse().expect("digits"))));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    pos: start,
                    expected: "an expression".into(),
                    found: format!("'{ch}'"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

/// How identifiers map to ring generators.
#[derive(Debug, Clone, Copy)]
enum Vars {
    /// `x1..xn`, `t`, `ginv`.
    Ring(usize),
    /// `D` only, read as the single ring variable.
    Euler,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    vars: Vars,
}

impl Parser {
    fn new(src: &str, vars: Vars) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
            vars,
        })
    }

    fn nvars(&self) -> usize {
        match self.vars {
            Vars::Ring(n) => n,
            Vars::Euler => 1,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind, expected: &str) -> ParseError {
        ParseError {
            kind,
            pos: self.pos(),
            expected: expected.into(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Syntax, &tok.to_string()))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Syntax, "an operator or end of input"))
        }
    }

    fn sum(&mut self) -> Result<RingElement, ParseError> {
        let mut acc = match self.peek() {
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            Tok::Minus => {
                self.bump();
                -self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RingElement, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RingElement, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RingElement, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let epos = self.pos();
        let Tok::Int(e) = self.peek().clone() else {
            return Err(self.err(ParseErrorKind::Syntax, "an integer exponent"));
        };
        self.bump();
        let e: u32 = e.try_into().map_err(|_| ParseError {
            kind: ParseErrorKind::BadLiteral,
            pos: epos,
            expected: "an exponent below 2^32".into(),
            found: "a larger integer".into(),
        })?;
        if !neg {
            return Ok(base.pow(e));
        }
        match bare_t_power(&base) {
            Some(k) => Ok(RingElement::t_pow(self.nvars(), -k * e as i64)),
            None => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                pos: epos,
                expected: "a nonnegative exponent (negative powers only apply to t)".into(),
                found: format!("'-{e}'"),
            }),
        }
    }

    /// `INT ['/' INT]`, with the leading integer already consumed.
    fn literal_tail(&mut self, num: BigInt, start: usize) -> Result<Rational, ParseError> {
        if *self.peek() != Tok::Slash {
            return Ok(Rational::from_integer(num));
        }
        self.bump();
        let Tok::Int(den) = self.peek().clone() else {
            return Err(self.err(ParseErrorKind::BadLiteral, "an integer denominator"));
        };
        if den.is_zero() {
            return Err(ParseError {
                kind: ParseErrorKind::BadLiteral,
                pos: start,
                expected: "a nonzero denominator".into(),
                found: "'0'".into(),
            });
        }
        self.bump();
        Ok(Rational::new(num, den))
    }

    fn atom(&mut self) -> Result<RingElement, ParseError> {
        let n = self.nvars();
        let start = self.pos();
        match self.peek().clone() {
            Tok::Int(num) => {
                self.bump();
                let q = self.literal_tail(num, start)?;
                Ok(RingElement::constant(n, q))
            }
            Tok::LParen => {
                self.bump();
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let e = self.ident(&name)?;
                self.bump();
                Ok(e)
            }
            _ => Err(self.err(ParseErrorKind::Syntax, "a number, variable or '('")),
        }
    }

    fn ident(&self, name: &str) -> Result<RingElement, ParseError> {
        let unknown = |expected: String| ParseError {
            kind: ParseErrorKind::UnknownVariable,
            pos: self.pos(),
            expected,
            found: format!("'{name}'"),
        };
        match self.vars {
            Vars::Euler => match name {
                "D" => Ok(RingElement::var(1, 0)),
                _ => Err(unknown("'D'".into())),
            },
            Vars::Ring(n) => {
                let allowed = || format!("one of x1..x{n}, t, ginv");
                match name {
                    "t" => Ok(RingElement::t_pow(n, 1)),
                    "ginv" => Ok(RingElement::ginv(n, 1)),
                    _ => {
                        let idx = name
                            .strip_prefix('x')
                            .filter(|d| !d.is_empty() && !d.starts_with('0') && d.bytes().all(|b| b.is_ascii_digit()))
                            .and_then(|d| d.parse::<usize>().ok())
                            .filter(|&i| (1..=n).contains(&i))
                            .ok_or_else(|| unknown(allowed()))?;
                        Ok(RingElement::var(n, idx - 1))
                    }
                }
            }
        }
    }

    /// Signed rational `['-'] INT ['/' INT]`.
    fn rational(&mut self) -> Result<Rational, ParseError> {
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let start = self.pos();
        let Tok::Int(num) = self.peek().clone() else {
            return Err(self.err(ParseErrorKind::BadLiteral, "a rational literal"));
        };
        self.bump();
        let q = self.literal_tail(num, start)?;
        Ok(if neg { -q } else { q })
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        let n = self.nvars();
        let Tok::Int(i) = self.peek().clone() else {
            return Err(self.err(ParseErrorKind::Syntax, "a variable index"));
        };
        match usize::try_from(i) {
            Ok(i) if (1..=n).contains(&i) => {
                self.bump();
                Ok(i - 1)
            }
            _ => Err(self.err(ParseErrorKind::UnknownVariable, &format!("an index in 1..={n}"))),
        }
    }

    fn args<T>(&mut self, mut each: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = vec![each(self)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(each(self)?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn rationals(&mut self, k: usize, what: &str) -> Result<Vec<Rational>, ParseError> {
        let pos = self.pos();
        let qs = self.args(Self::rational)?;
        if qs.len() != k {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax,
                pos,
                expected: format!("{k} argument(s) for {what}"),
                found: format!("{}", qs.len()),
            });
        }
        Ok(qs)
    }

    fn operator(&mut self) -> Result<OperatorSpec, ParseError> {
        let Tok::Ident(name) = self.peek().clone() else {
            return Err(self.err(ParseErrorKind::Syntax, "an operator name"));
        };
        let name_pos = self.pos();
        self.bump();
        Ok(match name.as_str() {
            "id" => OperatorSpec::Identity,
            "t" => OperatorSpec::MulByT,
            "dt" => OperatorSpec::PartialT,
            "dx" => {
                self.expect(Tok::LParen)?;
                let i = self.index()?;
                self.expect(Tok::RParen)?;
                OperatorSpec::PartialX(i)
            }
            "Phi" => OperatorSpec::PhiC(self.rationals(1, "Phi")?.remove(0)),
            "Dtr" => OperatorSpec::Dtr(self.rationals(1, "Dtr")?.remove(0)),
            "ArS" => {
                let mut q = self.rationals(3, "ArS")?.into_iter();
                let (a, r, s) = (q.next().unwrap(), q.next().unwrap(), q.next().unwrap());
                OperatorSpec::ars(a, r, s)
            }
            "AbetaD" => {
                self.expect(Tok::LParen)?;
                let alpha = self.rational()?;
                self.expect(Tok::Comma)?;
                let beta = self.rational()?;
                self.expect(Tok::Comma)?;
                let i = self.index()?;
                self.expect(Tok::Comma)?;
                let r = self.rational()?;
                self.expect(Tok::Comma)?;
                let s = self.rational()?;
                self.expect(Tok::RParen)?;
                OperatorSpec::AbetaD { alpha, beta, i, r, s }
            }
            "mul" => {
                self.expect(Tok::LParen)?;
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                OperatorSpec::MulByElem(e)
            }
            "scale" => {
                self.expect(Tok::LParen)?;
                let c = self.rational()?;
                self.expect(Tok::Comma)?;
                let op = self.operator()?;
                self.expect(Tok::RParen)?;
                OperatorSpec::scale(c, op)
            }
            "compose" => OperatorSpec::Compose(self.args(Self::operator)?),
            "sum" => OperatorSpec::Sum(self.args(Self::operator)?),
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownVariable,
                    pos: name_pos,
                    expected: "id, t, dt, dx, Phi, Dtr, ArS, AbetaD, mul, scale, compose or sum".into(),
                    found: format!("'{name}'"),
                })
            }
        })
    }
}

/// `Some(k)` when `e` is exactly `t^k`.
fn bare_t_power(e: &RingElement) -> Option<i64> {
    let mut terms = e.terms();
    let (m, c) = terms.next()?;
    if terms.next().is_some() || !c.is_one() || m.gpow != 0 || m.xdeg.iter().any(|&d| d != 0) {
        return None;
    }
    Some(m.tdeg)
}

/// Parses a ring element in `n` variables.
pub fn parse_poly(src: &str, n: usize) -> Result<RingElement, ParseError> {
    let mut p = Parser::new(src, Vars::Ring(n))?;
    let e = p.sum()?;
    p.finish()?;
    Ok(e)
}

/// Parses a polynomial in the Euler operator `D`.
pub fn parse_upoly(src: &str) -> Result<UPoly, ParseError> {
    let mut p = Parser::new(src, Vars::Euler)?;
    let start = p.pos();
    let e = p.sum()?;
    p.finish()?;
    let mut coeffs: Vec<Rational> = Vec::new();
    for (m, c) in e.terms() {
        if m.tdeg != 0 || m.gpow != 0 {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax,
                pos: start,
                expected: "a polynomial in D".into(),
                found: m.to_string(),
            });
        }
        let k = m.xdeg[0] as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rational::zero());
        }
        coeffs[k] = c.clone();
    }
    Ok(UPoly::new(coeffs))
}

/// Parses `A0=...; A1=...` into `t`-power keyed polynomials in `D`.
pub fn parse_univariate(src: &str) -> Result<BTreeMap<usize, UPoly>, ParseError> {
    let mut out = BTreeMap::new();
    let mut offset = 0;
    for part in src.split(';') {
        let here = offset;
        offset += part.len() + 1;
        if part.trim().is_empty() {
            continue;
        }
        let lead = part.len() - part.trim_start().len();
        let bad = |expected: &str, found: &str| ParseError {
            kind: ParseErrorKind::Syntax,
            pos: here + lead,
            expected: expected.into(),
            found: format!("'{found}'"),
        };
        let (key, body) = part.split_once('=').ok_or_else(|| bad("'A<i>=...'", part.trim()))?;
        let i: usize = key
            .trim()
            .strip_prefix('A')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| bad("'A<i>'", key.trim()))?;
        let body_at = here + key.len() + 1;
        let poly = parse_upoly(body).map_err(|mut e| {
            e.pos += body_at;
            e
        })?;
        if out.insert(i, poly).is_some() {
            return Err(bad("each A<i> at most once", key.trim()));
        }
    }
    Ok(out)
}

/// Parses an operator expression such as `compose(Dtr(1/2), ArS(1/3,1,0))`.
pub fn parse_operator(src: &str, n: usize) -> Result<OperatorSpec, ParseError> {
    let mut p = Parser::new(src, Vars::Ring(n))?;
    let op = p.operator()?;
    p.finish()?;
    Ok(op)
}

/// Canonical text of an operator, accepted back by [`parse_operator`].
pub fn format_operator(op: &OperatorSpec) -> String {
    let q = format_rational;
    let list = |ops: &[OperatorSpec]| ops.iter().map(format_operator).collect::<Vec<_>>().join(", ");
    match op {
        OperatorSpec::Identity => "id".into(),
        OperatorSpec::PartialT => "dt".into(),
        OperatorSpec::PartialX(i) => format!("dx({})", i + 1),
        OperatorSpec::MulByT => "t".into(),
        OperatorSpec::MulByElem(e) => format!("mul({e})"),
        OperatorSpec::PhiC(c) => format!("Phi({})", q(c)),
        OperatorSpec::Dtr(r) => format!("Dtr({})", q(r)),
        OperatorSpec::ArS { alpha, r, s } => format!("ArS({}, {}, {})", q(alpha), q(r), q(s)),
        OperatorSpec::AbetaD { alpha, beta, i, r, s } => {
            format!("AbetaD({}, {}, {}, {}, {})", q(alpha), q(beta), i + 1, q(r), q(s))
        }
        OperatorSpec::Sum(ops) => format!("sum({})", list(ops)),
        OperatorSpec::Compose(ops) => format!("compose({})", list(ops)),
        OperatorSpec::Scale(c, o) => format!("scale({}, {})", q(c), format_operator(o)),
    }
}

/// Parses a signed rational such as `-3/4`.
pub fn parse_alpha(src: &str) -> Result<Rational, ParseError> {
    parse_rational(src).ok_or_else(|| ParseError {
        kind: ParseErrorKind::BadLiteral,
        pos: 0,
        expected: "a rational a or a/b".into(),
        found: format!("'{src}'"),
    })
}

/// Largest `xi` index mentioned in any source, at least 1.
pub fn infer_nvars<'a>(sources: impl IntoIterator<Item = &'a str>) -> usize {
    let mut n = 1;
    for src in sources {
        let b = src.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let word_start = i == 0 || !(b[i - 1].is_ascii_alphanumeric() || b[i - 1] == b'_');
            if b[i] == b'x' && word_start {
                let mut j = i + 1;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                let tail_ok = j == b.len() || !(b[j].is_ascii_alphanumeric() || b[j] == b'_');
                if j > i + 1 && tail_ok {
                    if let Ok(k) = src[i + 1..j].parse::<usize>() {
                        n = n.max(k);
                    }
                }
                i = j;
            } else {
                i += 1;
            }
        }
    }
    n
}


#[cfg(test)]
mod tests {
    use super::*;
    use gm_exponents::rational::{int, rat};

    fn x(n: usize, i: usize) -> RingElement {
        RingElement::var(n, i)
    }

    #[test]
    fn expands_products() {
        let e = parse_poly("x1^2*(1-x1)", 1).unwrap();
        let expect = &(&x(1, 0) * &x(1, 0)) - &x(1, 0).pow(3);
        assert_eq!(e, expect);
        assert_eq!(parse_poly("x1*x2*(1-x1-x2)", 2).unwrap().len(), 3);
        let e = parse_poly("3/2*x1 + x2^0", 2).unwrap();
        assert_eq!(e, &x(2, 0).scale(&rat(3, 2)) + &RingElement::one(2));
    }

    #[test]
    fn negative_t_powers_only() {
        let e = parse_poly("t^-2*x1", 1).unwrap();
        assert_eq!(e, &RingElement::t_pow(1, -2) * &x(1, 0));
        let err = parse_poly("x1^-1", 1).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.pos, 4);
    }

    #[test]
    fn error_positions() {
        let err = parse_poly("x1 + x3", 2).unwrap_err();
        assert_eq!((err.kind, err.pos), (ParseErrorKind::UnknownVariable, 5));
        let err = parse_poly("1/0", 1).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BadLiteral);
        let err = parse_poly("(x1", 1).unwrap_err();
        assert_eq!((err.kind, err.pos, err.expected.as_str()), (ParseErrorKind::Syntax, 3, "')'"));
        let err = parse_poly("x1 x1", 1).unwrap_err();
        assert_eq!(err.pos, 3);
        assert!(parse_poly("x1 $", 1).is_err());
    }

    #[test]
    fn euler_polynomials() {
        let p = parse_upoly("(D-1/2)*(D-1/3)").unwrap();
        assert_eq!(p, UPoly::from_roots(&[(rat(1, 2), 1), (rat(1, 3), 1)]));
        assert_eq!(parse_upoly("x1").unwrap_err().kind, ParseErrorKind::UnknownVariable);
        let sys = parse_univariate("A0=(D-1/2)*(D-1/3); A1=D^5").unwrap();
        assert_eq!(sys[&1], UPoly::x().pow(5));
        let err = parse_univariate("A0=D; A1=D+").unwrap_err();
        assert_eq!(err.pos, 11);
    }

    #[test]
    fn operators() {
        assert_eq!(parse_operator("Dtr(1/2)", 1).unwrap(), OperatorSpec::Dtr(rat(1, 2)));
        assert_eq!(parse_operator("Phi(-1/3)", 1).unwrap(), OperatorSpec::PhiC(rat(-1, 3)));
        assert_eq!(
            parse_operator("ArS(1/3,1,0)", 1).unwrap(),
            OperatorSpec::ars(rat(1, 3), int(1), int(0))
        );
        let op = parse_operator("compose(Dtr(1), sum(t, scale(2, dx(2))), AbetaD(1/2, 1, 1, 0, 0))", 2).unwrap();
        let OperatorSpec::Compose(parts) = op else { panic!() };
        assert_eq!(parts.len(), 3);
        assert_eq!(
            parts[2],
            OperatorSpec::AbetaD {
                alpha: rat(1, 2),
                beta: int(1),
                i: 0,
                r: int(0),
                s: int(0)
            }
        );
        let src = "compose(Dtr(1), sum(t, scale(2, dx(2))), AbetaD(1/2, 1, 1, 0, 0), mul(-1 + x1))";
        let op = parse_operator(src, 2).unwrap();
        assert_eq!(format_operator(&op), src);
        assert!(parse_operator("Foo(1)", 1).is_err());
        assert!(parse_operator("ArS(1,2)", 1).is_err());
        assert!(parse_operator("dx(3)", 2).is_err());
    }

    #[test]
    fn nvars_inference() {
        assert_eq!(infer_nvars(["x1*x3 + 1", "x2"]), 3);
        assert_eq!(infer_nvars(["t + 1"]), 1);
        assert_eq!(infer_nvars(["max1 + x12y"]), 1);
    }
}
