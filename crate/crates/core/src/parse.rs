//! Text grammar for coefficients and series literals.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'i' | 'x' index | 'l' | '(' expr ')'
//! ```
//!
//! `x1..xd` are the real variables, `i` the imaginary unit and `l` the
//! formal parameter (series literals only). Division by an expression with
//! non-constant classical part produces a rational function.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::{CoeffRing, Coefficient, GaussianRational};
use crate::error::{Error, Result};
use crate::series::FormalSeries;

/// Parses a classical coefficient (no `l` allowed).
pub fn parse_coefficient(src: &str, ring: CoeffRing) -> Result<Coefficient> {
    let s = Parser::new(src, ring, 0, false).run()?;
    Ok(s.coeff(0).clone())
}

/// Parses a series literal such as `1 + x1*l - 1/2*l^2`, truncated at `order`.
pub fn parse_series(src: &str, ring: CoeffRing, order: usize) -> Result<FormalSeries> {
    Parser::new(src, ring, order, true).run()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    I,
    Var(usize),
    Lambda,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ring: CoeffRing,
    order: usize,
    allow_lambda: bool,
    src_len: usize,
    lex_error: Option<Error>,
}

fn err(column: usize, message: impl Into<String>) -> Error {
    Error::Parse { column, message: message.into() }
}

impl Parser {
    fn new(src: &str, ring: CoeffRing, order: usize, allow_lambda: bool) -> Self {
        let mut p = Self { toks: Vec::new(), pos: 0, ring, order, allow_lambda, src_len: src.chars().count(), lex_error: None };
        if let Err(e) = p.lex(src) {
            p.lex_error = Some(e);
        }
        p
    }

    fn lex(&mut self, src: &str) -> Result<()> {
        let chars: Vec<char> = src.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k];
            let col = k + 1;
            match c {
                ' ' | '\t' | '\n' | '\r' => {
                    k += 1;
                    continue;
                }
                '0'..='9' => {
                    let start = k;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    let s: String = chars[start..k].iter().collect();
                    self.toks.push((Tok::Int(s.parse().expect("digits")), col));
                    continue;
                }
                'x' => {
                    let start = k + 1;
                    k += 1;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    if start == k {
                        return Err(err(col, "expected variable index after 'x'"));
                    }
                    let idx: usize = chars[start..k].iter().collect::<String>().parse().map_err(|_| err(col, "bad variable index"))?;
                    if idx == 0 || idx > self.ring.nvars {
                        return Err(err(col, format!("unknown variable x{idx} (ring has {} variables)", self.ring.nvars)));
                    }
                    self.toks.push((Tok::Var(idx - 1), col));
                    continue;
                }
                'i' => self.toks.push((Tok::I, col)),
                'l' => {
                    if !self.allow_lambda {
                        return Err(err(col, "formal parameter 'l' not allowed in a coefficient"));
                    }
                    self.toks.push((Tok::Lambda, col))
                }
                '+' => self.toks.push((Tok::Plus, col)),
                '-' => self.toks.push((Tok::Minus, col)),
                '*' => self.toks.push((Tok::Star, col)),
                '/' => self.toks.push((Tok::Slash, col)),
                '^' => self.toks.push((Tok::Caret, col)),
                '(' => self.toks.push((Tok::LParen, col)),
                ')' => self.toks.push((Tok::RParen, col)),
                other => return Err(err(col, format!("unexpected character '{other}'"))),
            }
            k += 1;
        }
        Ok(())
    }

    fn run(mut self) -> Result<FormalSeries> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        if self.toks.is_empty() {
            return Err(err(1, "empty expression"));
        }
        let v = self.expr()?;
        if let Some((_, col)) = self.toks.get(self.pos) {
            return Err(err(*col, "unexpected trailing input"));
        }
        Ok(v)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.src_len + 1)
    }

    fn expr(&mut self) -> Result<FormalSeries> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.try_add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FormalSeries> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.try_cauchy_mul(&self.unary()?)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.col();
                    let d = self.unary()?;
                    let inv = commutative_inverse(&d).map_err(|e| err(col, format!("cannot divide: {e}")))?;
                    acc = acc.try_cauchy_mul(&inv)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<FormalSeries> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<FormalSeries> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let col = self.col();
            let e = match self.toks.get(self.pos) {
                Some((Tok::Int(n), _)) => n.clone(),
                _ => return Err(err(col, "expected non-negative integer exponent")),
            };
            self.pos += 1;
            let e: u32 = e.try_into().map_err(|_| err(col, "exponent too large"))?;
            let mut acc = FormalSeries::one(self.ring, self.order);
            for _ in 0..e {
                acc = acc.try_cauchy_mul(&base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FormalSeries> {
        let col = self.col();
        let (tok, _) = self.toks.get(self.pos).cloned().ok_or_else(|| err(col, "unexpected end of input"))?;
        self.pos += 1;
        let ring = self.ring;
        let n = self.order;
        match tok {
            Tok::Int(v) => Ok(FormalSeries::scalar(ring, GaussianRational::real(BigRational::from_integer(v)), n)),
            Tok::I => Ok(FormalSeries::scalar(ring, GaussianRational::i(), n)),
            Tok::Var(k) => Ok(FormalSeries::constant(ring.var(k)?, n)),
            Tok::Lambda => Ok(FormalSeries::monomial(ring.one(), 1, n)),
            Tok::LParen => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err(err(self.col(), "expected ')'")),
                }
            }
            _ => Err(err(col, "expected a number, variable, 'i', 'l' or '('")),
        }
    }
}

/// Inverse for the commutative Cauchy product, by order recursion.
fn commutative_inverse(d: &FormalSeries) -> Result<FormalSeries> {
    let inv0 = d.classical_part().invert()?;
    let n = d.order();
    let mut out = FormalSeries::constant(inv0.clone(), n);
    for r in 1..=n {
        let mut acc = d.ring().zero();
        for s in 1..=r {
            acc = &acc + &(d.coeff(s) * out.coeff(r - s));
        }
        out.set_coeff(r, -&(&acc * &inv0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Poly;

    #[test]
    fn bott_denominator() {
        let ring = CoeffRing::rational(2);
        let c = parse_coefficient("(1)/(1 + x1^2 + x2^2)", ring).unwrap();
        let q = parse_coefficient("1 + x1^2 + x2^2", ring).unwrap();
        assert!((&c * &q).is_one());
    }

    #[test]
    fn rationals_and_imaginary_unit() {
        let ring = CoeffRing::polynomial(1);
        let c = parse_coefficient("3/2 - 2*i*x1", ring).unwrap();
        let x = Poly::var(1, 0).unwrap();
        let want = Poly::constant(1, GaussianRational::from_frac(3, 2))
            .try_sub(&x.scale(&(GaussianRational::from_int(2) * GaussianRational::i())))
            .unwrap();
        assert_eq!(c, Coefficient::Poly(want));
    }

    #[test]
    fn series_literal() {
        let ring = CoeffRing::polynomial(2);
        let s = parse_series("3 + x2*l - l^2/2 + l^5", ring, 3).unwrap();
        assert_eq!(s.coeff(0), &ring.int(3));
        assert_eq!(s.coeff(1), &ring.var(1).unwrap());
        assert_eq!(s.coeff(2), &ring.constant(GaussianRational::from_frac(-1, 2)));
        assert!(s.coeff(3).is_zero());
    }

    #[test]
    fn errors_carry_columns() {
        let ring = CoeffRing::rational(2);
        assert_eq!(
            parse_coefficient("1 + x3", ring).unwrap_err(),
            Error::Parse { column: 5, message: "unknown variable x3 (ring has 2 variables)".into() }
        );
        assert!(matches!(parse_coefficient("1 + * 2", ring), Err(Error::Parse { column: 5, .. })));
        assert!(matches!(parse_coefficient("(1 + x1", ring), Err(Error::Parse { column: 8, .. })));
        assert!(matches!(parse_coefficient("x1 l", ring), Err(Error::Parse { column: 4, .. })));
        assert!(matches!(parse_coefficient("1/0", ring), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(parse_coefficient("1 $", ring), Err(Error::Parse { column: 3, .. })));
    }

    #[test]
    fn polynomial_ring_rejects_nonconstant_division() {
        let ring = CoeffRing::polynomial(1);
        assert!(parse_coefficient("1/x1", ring).is_err());
        assert!(parse_coefficient("x1/2", ring).is_ok());
    }

    #[test]
    fn display_roundtrip() {
        let ring = CoeffRing::rational(2);
        let c = parse_coefficient("(x1 - i*x2)/(1 + x1^2 + x2^2) + 3/7", ring).unwrap();
        let again = parse_coefficient(&c.to_string(), ring).unwrap();
        assert_eq!(c, again);
    }
}
