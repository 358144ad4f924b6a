//! Exact commutative coefficient algebras: polynomials and rational
//! functions in real variables `x1..xd` over the Gaussian rationals.

mod gauss;
mod poly;
mod ratfunc;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use gauss::GaussianRational;
pub use poly::{Monomial, Poly, MAX_VARS};
pub use ratfunc::RatFunc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffKind {
    Polynomial,
    Rational,
}

/// Descriptor of a coefficient algebra: number of real variables and
/// whether elements are polynomials or rational functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoeffRing {
    pub nvars: usize,
    pub kind: CoeffKind,
}

impl CoeffRing {
    pub fn new(nvars: usize, kind: CoeffKind) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::Dimension(format!("at most {MAX_VARS} variables supported, got {nvars}")));
        }
        Ok(Self { nvars, kind })
    }

    pub fn rational(nvars: usize) -> Self {
        Self::new(nvars, CoeffKind::Rational).expect("variable count in range")
    }

    pub fn polynomial(nvars: usize) -> Self {
        Self::new(nvars, CoeffKind::Polynomial).expect("variable count in range")
    }

    pub fn from_poly(&self, p: Poly) -> Coefficient {
        match self.kind {
            CoeffKind::Polynomial => Coefficient::Poly(p),
            CoeffKind::Rational => Coefficient::Rat(RatFunc::from_poly(p)),
        }
    }

    pub fn zero(&self) -> Coefficient {
        self.from_poly(Poly::zero(self.nvars))
    }

    pub fn one(&self) -> Coefficient {
        self.from_poly(Poly::one(self.nvars))
    }

    pub fn constant(&self, c: GaussianRational) -> Coefficient {
        self.from_poly(Poly::constant(self.nvars, c))
    }

    pub fn int(&self, n: i64) -> Coefficient {
        self.constant(GaussianRational::from_int(n))
    }

    pub fn var(&self, k: usize) -> Result<Coefficient> {
        Ok(self.from_poly(Poly::var(self.nvars, k)?))
    }

    /// Brings `c` into this ring: polynomials lift to rational functions;
    /// rational functions with trivial denominator drop to polynomials.
    pub fn coerce(&self, c: Coefficient) -> Result<Coefficient> {
        if c.nvars() != self.nvars {
            return Err(Error::VariableMismatch(self.nvars, c.nvars()));
        }
        match (self.kind, c) {
            (CoeffKind::Polynomial, Coefficient::Rat(r)) => match r.as_polynomial() {
                Some(p) => Ok(Coefficient::Poly(p.clone())),
                None => Err(Error::NonUnit(format!("rational function {r} in polynomial ring"))),
            },
            (CoeffKind::Rational, Coefficient::Poly(p)) => Ok(Coefficient::Rat(RatFunc::from_poly(p))),
            (_, c) => Ok(c),
        }
    }

    pub fn contains(&self, c: &Coefficient) -> bool {
        c.nvars() == self.nvars && c.kind() == self.kind
    }
}

/// An element of a coefficient algebra.
#[derive(Clone)]
pub enum Coefficient {
    Poly(Poly),
    Rat(RatFunc),
}

impl Coefficient {
    pub fn kind(&self) -> CoeffKind {
        match self {
            Coefficient::Poly(_) => CoeffKind::Polynomial,
            Coefficient::Rat(_) => CoeffKind::Rational,
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Coefficient::Poly(p) => p.nvars(),
            Coefficient::Rat(r) => r.nvars(),
        }
    }

    pub fn ring(&self) -> CoeffRing {
        CoeffRing { nvars: self.nvars(), kind: self.kind() }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Poly(p) => p.is_zero(),
            Coefficient::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Coefficient::Poly(p) => p.is_constant(),
            Coefficient::Rat(r) => r.is_constant(),
        }
    }

    /// The value of a constant element.
    pub fn constant_value(&self) -> Option<GaussianRational> {
        match self {
            Coefficient::Poly(p) if p.is_constant() => Some(p.constant_value()),
            Coefficient::Rat(r) if r.is_constant() => Some(r.numerator().constant_value()),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    fn as_rat(&self) -> RatFunc {
        match self {
            Coefficient::Poly(p) => RatFunc::from_poly(p.clone()),
            Coefficient::Rat(r) => r.clone(),
        }
    }

    pub fn try_add(&self, o: &Coefficient) -> Result<Coefficient> {
        match (self, o) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Ok(Coefficient::Poly(a.try_add(b)?)),
            _ => Ok(Coefficient::Rat(self.as_rat().try_add(&o.as_rat())?)),
        }
    }

    /// Like `try_add`, leaving common factors of rational functions in
    /// place. Finish a run of these with [`Coefficient::reduced`].
    pub(crate) fn add_unreduced(&self, o: &Coefficient) -> Result<Coefficient> {
        match (self, o) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Ok(Coefficient::Poly(a.try_add(b)?)),
            _ => Ok(Coefficient::Rat(self.as_rat().add_unreduced(&o.as_rat())?)),
        }
    }

    pub(crate) fn reduced(self) -> Coefficient {
        match self {
            Coefficient::Rat(mut r) => {
                r.reduce();
                Coefficient::Rat(r)
            }
            c => c,
        }
    }

    pub fn try_sub(&self, o: &Coefficient) -> Result<Coefficient> {
        match (self, o) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Ok(Coefficient::Poly(a.try_sub(b)?)),
            _ => Ok(Coefficient::Rat(self.as_rat().try_sub(&o.as_rat())?)),
        }
    }

    pub fn try_mul(&self, o: &Coefficient) -> Result<Coefficient> {
        match (self, o) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Ok(Coefficient::Poly(a.try_mul(b)?)),
            (Coefficient::Rat(a), Coefficient::Poly(b)) | (Coefficient::Poly(b), Coefficient::Rat(a)) => {
                if b.is_constant() {
                    Ok(Coefficient::Rat(a.scale(&b.constant_value())))
                } else {
                    Ok(Coefficient::Rat(a.try_mul(&RatFunc::from_poly(b.clone()))?))
                }
            }
            (Coefficient::Rat(a), Coefficient::Rat(b)) => Ok(Coefficient::Rat(a.try_mul(b)?)),
        }
    }

    /// Exact equality; rational functions compare by cross-multiplication.
    pub fn try_eq(&self, o: &Coefficient) -> Result<bool> {
        if self.nvars() != o.nvars() {
            return Err(Error::VariableMismatch(self.nvars(), o.nvars()));
        }
        Ok(match (self, o) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => a == b,
            _ => self.as_rat() == o.as_rat(),
        })
    }

    pub fn scale(&self, s: &GaussianRational) -> Coefficient {
        match self {
            Coefficient::Poly(p) => Coefficient::Poly(p.scale(s)),
            Coefficient::Rat(r) => Coefficient::Rat(r.scale(s)),
        }
    }

    pub fn conj(&self) -> Coefficient {
        match self {
            Coefficient::Poly(p) => Coefficient::Poly(p.conj()),
            Coefficient::Rat(r) => Coefficient::Rat(r.conj()),
        }
    }

    pub fn derivative(&self, var: usize) -> Result<Coefficient> {
        match self {
            Coefficient::Poly(p) => Ok(Coefficient::Poly(p.derivative(var)?)),
            Coefficient::Rat(r) => Ok(Coefficient::Rat(r.derivative(var)?)),
        }
    }

    /// Mixed partial derivative `d^alpha`.
    pub fn derivative_multi(&self, alpha: &Monomial) -> Result<Coefficient> {
        let mut c = self.clone();
        for (k, &e) in alpha.0.iter().enumerate() {
            for _ in 0..e {
                if c.is_zero() {
                    return Ok(c);
                }
                c = c.derivative(k)?;
            }
        }
        Ok(c)
    }

    /// Multiplicative inverse. In the polynomial ring only nonzero constants
    /// are units.
    pub fn invert(&self) -> Result<Coefficient> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Coefficient::Poly(p) => {
                if !p.is_constant() {
                    return Err(Error::NonUnit(p.to_string()));
                }
                Ok(Coefficient::Poly(Poly::constant(p.nvars(), p.constant_value().inv()?)))
            }
            Coefficient::Rat(r) => Ok(Coefficient::Rat(r.inv()?)),
        }
    }

    pub fn evaluate_at(&self, point: &[BigRational]) -> Result<GaussianRational> {
        match self {
            Coefficient::Poly(p) => p.evaluate(point),
            Coefficient::Rat(r) => r.evaluate(point),
        }
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        let mut acc = self.ring().one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, o: &Coefficient) -> bool {
        self.try_eq(o).unwrap_or(false)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Poly(p) => fmt::Display::fmt(p, f),
            Coefficient::Rat(r) => fmt::Display::fmt(r, f),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Operator forms panic on a ring mismatch; engine code only combines
// coefficients drawn from one validated ring.
impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        self.try_add(o).expect("coefficient ring mismatch")
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        self.try_sub(o).expect("coefficient ring mismatch")
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        self.try_mul(o).expect("coefficient ring mismatch")
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Poly(p) => Coefficient::Poly(p.neg()),
            Coefficient::Rat(r) => Coefficient::Rat(r.neg()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_non_unit() {
        let ring = CoeffRing::polynomial(1);
        let x = ring.var(0).unwrap();
        assert!(matches!(x.invert(), Err(Error::NonUnit(_))));
        assert_eq!(ring.int(4).invert().unwrap(), ring.constant(GaussianRational::from_frac(1, 4)));
    }

    #[test]
    fn rational_inverse() {
        let ring = CoeffRing::rational(1);
        let x = ring.var(0).unwrap();
        let q = &ring.one() + &(&x * &x);
        let inv = q.invert().unwrap();
        assert!((&inv * &q).is_one());
    }

    #[test]
    fn mixed_kinds_lift() {
        let p = CoeffRing::polynomial(2).var(0).unwrap();
        let r = CoeffRing::rational(2).var(0).unwrap();
        assert_eq!(p, r);
        assert_eq!((&p + &r).kind(), CoeffKind::Rational);
    }

    #[test]
    fn conj_of_complex_multiple() {
        let ring = CoeffRing::polynomial(2);
        let z = GaussianRational::from_int(2) + GaussianRational::from_int(3) * GaussianRational::i();
        let a = ring.var(0).unwrap().scale(&z);
        assert_eq!(a.conj(), ring.var(0).unwrap().scale(&z.conj()));
    }

    #[test]
    fn ring_rejects_too_many_vars() {
        assert!(CoeffRing::new(MAX_VARS + 1, CoeffKind::Rational).is_err());
    }
}
