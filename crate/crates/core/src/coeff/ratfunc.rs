//! Rational functions `num / den` over the Gaussian rationals.
//!
//! The denominator is kept as a product of powers of monic base polynomials.
//! Sums use the factorwise least common multiple of the two denominators, and
//! common factors are cancelled by exact trial division. No GCD is ever
//! computed, so the representation is not canonical; equality compares the
//! numerators over a common denominator, which is cross-multiplication.

use std::fmt;

use num_rational::BigRational;

use super::gauss::GaussianRational;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct RatFunc {
    num: Poly,
    /// Monic, nonconstant, pairwise distinct bases with positive exponents.
    den: Vec<(Poly, u32)>,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Vec::new() }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Poly::one(nvars))
    }

    /// `num / den`; fails if `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.nvars() != den.nvars() {
            return Err(Error::VariableMismatch(num.nvars(), den.nvars()));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (c, base) = den.monic_split();
        let num = num.scale(&c.inv()?);
        let mut r = if base.is_constant() {
            Self::from_poly(num)
        } else {
            Self { num, den: vec![(base, 1)] }
        };
        r.cancel();
        Ok(r)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    /// The expanded denominator polynomial.
    pub fn denominator(&self) -> Poly {
        let mut d = Poly::one(self.nvars());
        for (b, e) in &self.den {
            d = d.try_mul(&b.pow(*e)).expect("same ring");
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Poly> {
        if self.den.is_empty() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_empty() && self.num.is_constant()
    }

    fn check(&self, o: &RatFunc) -> Result<()> {
        if self.nvars() != o.nvars() {
            return Err(Error::VariableMismatch(self.nvars(), o.nvars()));
        }
        Ok(())
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (base, exp) in self.den.iter_mut() {
            while *exp > 0 {
                match self.num.exact_div(base) {
                    Some(q) => {
                        self.num = q;
                        *exp -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
    }

    pub fn try_mul(&self, o: &RatFunc) -> Result<RatFunc> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(self.nvars()));
        }
        let num = self.num.try_mul(&o.num)?;
        let mut den = self.den.clone();
        for (b, e) in &o.den {
            match den.iter_mut().find(|(x, _)| x == b) {
                Some((_, ex)) => *ex += e,
                None => den.push((b.clone(), *e)),
            }
        }
        let mut r = Self { num, den };
        // Only cancellations between the two operands are possible.
        if !(self.den.is_empty() && o.den.is_empty()) {
            r.cancel();
        }
        Ok(r)
    }

    fn combine(&self, o: &RatFunc, negate: bool, reduce: bool) -> Result<RatFunc> {
        self.check(o)?;
        let onum = if negate { o.num.neg() } else { o.num.clone() };
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(Self { num: onum, den: o.den.clone() });
        }
        if same_den(&self.den, &o.den) {
            let mut r = Self { num: self.num.try_add(&onum)?, den: self.den.clone() };
            if reduce {
                r.cancel();
            }
            return Ok(r);
        }
        // Factorwise lcm of the two denominators.
        let mut lcm: Vec<(Poly, u32)> = self.den.clone();
        for (b, e) in &o.den {
            match lcm.iter_mut().find(|(x, _)| x == b) {
                Some((_, ex)) => *ex = (*ex).max(*e),
                None => lcm.push((b.clone(), *e)),
            }
        }
        let lift = |num: &Poly, den: &[(Poly, u32)]| -> Poly {
            let mut n = num.clone();
            for (b, e) in &lcm {
                let have = den.iter().find(|(x, _)| x == b).map(|(_, k)| *k).unwrap_or(0);
                if *e > have {
                    n = n.try_mul(&b.pow(e - have)).expect("same ring");
                }
            }
            n
        };
        let num = lift(&self.num, &self.den).try_add(&lift(&onum, &o.den))?;
        let mut r = Self { num, den: lcm };
        if reduce {
            r.cancel();
        }
        Ok(r)
    }

    pub fn try_add(&self, o: &RatFunc) -> Result<RatFunc> {
        self.combine(o, false, true)
    }

    pub fn try_sub(&self, o: &RatFunc) -> Result<RatFunc> {
        self.combine(o, true, true)
    }

    /// Sum without cancelling common factors; follow a run of these with
    /// [`RatFunc::reduce`].
    pub(crate) fn add_unreduced(&self, o: &RatFunc) -> Result<RatFunc> {
        self.combine(o, false, false)
    }

    pub(crate) fn reduce(&mut self) {
        self.cancel();
    }

    pub fn neg(&self) -> RatFunc {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, s: &GaussianRational) -> RatFunc {
        if s.is_zero() {
            return Self::zero(self.nvars());
        }
        Self { num: self.num.scale(s), den: self.den.clone() }
    }

    pub fn conj(&self) -> RatFunc {
        // Conjugating a monic polynomial keeps it monic.
        Self { num: self.num.conj(), den: self.den.iter().map(|(b, e)| (b.conj(), *e)).collect() }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (c, base) = self.num.monic_split();
        let mut num = Poly::one(self.nvars()).scale(&c.inv()?);
        for (b, e) in &self.den {
            num = num.try_mul(&b.pow(*e))?;
        }
        if base.is_constant() {
            return Ok(Self::from_poly(num));
        }
        let mut r = Self { num, den: vec![(base, 1)] };
        r.cancel();
        Ok(r)
    }

    pub fn derivative(&self, var: usize) -> Result<RatFunc> {
        let dn = self.num.derivative(var)?;
        if self.den.is_empty() {
            return Ok(Self::from_poly(dn));
        }
        // d(p/D) with D = prod b_i^e_i and F = prod b_i:
        //   (p' F - p sum_i e_i b_i' F/b_i) / (D F)
        let nv = self.nvars();
        let mut f = Poly::one(nv);
        for (b, _) in &self.den {
            f = f.try_mul(b)?;
        }
        let mut num = dn.try_mul(&f)?;
        for (i, (b, e)) in self.den.iter().enumerate() {
            let db = b.derivative(var)?;
            if db.is_zero() {
                continue;
            }
            let mut others = Poly::one(nv);
            for (j, (bj, _)) in self.den.iter().enumerate() {
                if j != i {
                    others = others.try_mul(bj)?;
                }
            }
            let term = self.num.try_mul(&db)?.try_mul(&others)?.scale(&GaussianRational::from_int(*e as i64));
            num = num.try_sub(&term)?;
        }
        // A reduced p/D stays reduced after differentiation up to factors
        // shared by p and b_i', which are rare enough not to chase here.
        let den = self.den.iter().map(|(b, e)| (b.clone(), e + 1)).collect();
        Ok(Self { num, den })
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<GaussianRational> {
        let n = self.num.evaluate(point)?;
        let mut d = GaussianRational::one();
        for (b, e) in &self.den {
            let v = b.evaluate(point)?;
            if v.is_zero() {
                return Err(Error::Pole);
            }
            d = &d * &v.pow(*e);
        }
        Ok(&n * &d.inv()?)
    }

    pub(crate) fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.den.is_empty() {
            return self.num.fmt_with(f, names);
        }
        write!(f, "(")?;
        self.num.fmt_with(f, names)?;
        write!(f, ")/(")?;
        for (i, (b, e)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "(")?;
            b.fmt_with(f, names)?;
            write!(f, ")")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        write!(f, ")")
    }
}

fn same_den(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> bool {
    a.len() == b.len() && a.iter().all(|(x, e)| b.iter().any(|(y, f)| x == y && e == f))
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &RatFunc) -> bool {
        if self.nvars() != o.nvars() {
            return false;
        }
        if same_den(&self.den, &o.den) {
            return self.num == o.num;
        }
        self.try_sub(o).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &|k| format!("x{}", k + 1))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize, nv: usize) -> Poly {
        Poly::var(nv, k).unwrap()
    }

    #[test]
    fn cancels_common_factor() {
        // (x^2 - 1)/(x - 1) = x + 1
        let num = x(0, 1).pow(2).try_sub(&Poly::one(1)).unwrap();
        let den = x(0, 1).try_sub(&Poly::one(1)).unwrap();
        let r = RatFunc::new(num, den).unwrap();
        let expected = RatFunc::from_poly(x(0, 1).try_add(&Poly::one(1)).unwrap());
        assert_eq!(r, expected);
        assert!(r.is_polynomial());
    }

    #[test]
    fn quotient_rule() {
        // d/dx2 1/(1+x1^2+x2^2) = -2 x2/(1+x1^2+x2^2)^2
        let q = Poly::one(2).try_add(&x(0, 2).pow(2)).unwrap().try_add(&x(1, 2).pow(2)).unwrap();
        let r = RatFunc::new(Poly::one(2), q.clone()).unwrap();
        let d = r.derivative(1).unwrap();
        let expected = RatFunc::new(x(1, 2).scale(&GaussianRational::from_int(-2)), q.pow(2)).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(RatFunc::new(Poly::one(1), Poly::zero(1)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn pole_detected() {
        let r = RatFunc::new(Poly::one(1), x(0, 1)).unwrap();
        assert_eq!(r.evaluate(&[BigRational::from_integer(0.into())]), Err(Error::Pole));
    }

    #[test]
    fn inverse_roundtrip() {
        let q = Poly::one(1).try_add(&x(0, 1).pow(2)).unwrap();
        let r = RatFunc::from_poly(q.clone());
        let inv = r.inv().unwrap();
        assert_eq!(inv.try_mul(&r).unwrap(), RatFunc::one(1));
    }
}
