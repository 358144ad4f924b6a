//! Truncated formal power series `c0 + c1 l + ... + cN l^N` in the formal
//! parameter, with coefficients in a commutative coefficient algebra.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;

use crate::coeff::{CoeffRing, Coefficient, GaussianRational};
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct FormalSeries {
    coeffs: Vec<Coefficient>,
}

impl FormalSeries {
    /// Builds a series from its coefficient list; the truncation order is
    /// `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Coefficient>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| Error::Dimension("empty series".into()))?;
        let ring = first.ring();
        if let Some(bad) = coeffs.iter().find(|c| !ring.contains(c)) {
            return Err(Error::VariableMismatch(ring.nvars, bad.nvars()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(ring: CoeffRing, order: usize) -> Self {
        Self { coeffs: vec![ring.zero(); order + 1] }
    }

    pub fn one(ring: CoeffRing, order: usize) -> Self {
        Self::constant(ring.one(), order)
    }

    /// A lambda-constant series.
    pub fn constant(c: Coefficient, order: usize) -> Self {
        let ring = c.ring();
        let mut coeffs = vec![ring.zero(); order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    pub fn scalar(ring: CoeffRing, s: GaussianRational, order: usize) -> Self {
        Self::constant(ring.constant(s), order)
    }

    /// `c * l^k` truncated at `order`.
    pub fn monomial(c: Coefficient, k: usize, order: usize) -> Self {
        let mut s = Self::zero(c.ring(), order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ring(&self) -> CoeffRing {
        self.coeffs[0].ring()
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn coeff(&self, r: usize) -> &Coefficient {
        &self.coeffs[r]
    }

    pub fn set_coeff(&mut self, r: usize, c: Coefficient) {
        self.coeffs[r] = c;
    }

    pub fn classical_part(&self) -> &Coefficient {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when all positive-order coefficients vanish.
    pub fn is_classical(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Index of the first nonvanishing coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check(&self, o: &FormalSeries) -> Result<()> {
        if self.order() != o.order() {
            return Err(Error::OrderMismatch(self.order(), o.order()));
        }
        if self.ring().nvars != o.ring().nvars {
            return Err(Error::VariableMismatch(self.ring().nvars, o.ring().nvars));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &FormalSeries) -> Result<FormalSeries> {
        self.check(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    pub fn try_sub(&self, o: &FormalSeries) -> Result<FormalSeries> {
        self.check(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    /// Cauchy product for the commutative (undeformed) multiplication.
    pub fn try_cauchy_mul(&self, o: &FormalSeries) -> Result<FormalSeries> {
        self.check(o)?;
        let n = self.order();
        let mut coeffs = vec![self.ring().zero(); n + 1];
        for (s, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, b) in o.coeffs.iter().enumerate().take(n + 1 - s) {
                if !b.is_zero() {
                    coeffs[s + t] = coeffs[s + t].try_add(&a.try_mul(b)?)?;
                }
            }
        }
        Ok(Self { coeffs })
    }

    pub fn try_eq(&self, o: &FormalSeries) -> Result<bool> {
        self.check(o)?;
        for (a, b) in self.coeffs.iter().zip(&o.coeffs) {
            if !a.try_eq(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First order at which two series differ.
    pub fn first_difference(&self, o: &FormalSeries) -> Result<Option<usize>> {
        self.check(o)?;
        for (r, (a, b)) in self.coeffs.iter().zip(&o.coeffs).enumerate() {
            if !a.try_eq(b)? {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }

    pub fn scale(&self, s: &GaussianRational) -> FormalSeries {
        Self { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Multiplies every coefficient by a classical element.
    pub fn mul_coefficient(&self, c: &Coefficient) -> Result<FormalSeries> {
        let coeffs = self.coeffs.iter().map(|a| a.try_mul(c)).collect::<Result<_>>()?;
        Ok(Self { coeffs })
    }

    /// Coefficientwise complex conjugation; the formal parameter is real.
    pub fn conj(&self) -> FormalSeries {
        Self { coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coefficient) -> Result<Coefficient>) -> Result<FormalSeries> {
        Ok(Self { coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()? })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Result<FormalSeries> {
        if order > self.order() {
            return Err(Error::OrderMismatch(order, self.order()));
        }
        Ok(Self { coeffs: self.coeffs[..=order].to_vec() })
    }

    /// Re-truncation to any order: drops or zero-pads coefficients.
    pub fn with_order(&self, order: usize) -> FormalSeries {
        let ring = self.ring();
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, ring.zero());
        Self { coeffs }
    }

    /// Multiplication by `l^k`.
    pub fn shift(&self, k: usize) -> FormalSeries {
        let n = self.order();
        let mut coeffs = vec![self.ring().zero(); n + 1];
        if k <= n {
            coeffs[k..].clone_from_slice(&self.coeffs[..=n - k]);
        }
        Self { coeffs }
    }

    pub fn evaluate_at(&self, point: &[BigRational]) -> Result<Vec<GaussianRational>> {
        self.coeffs.iter().map(|c| c.evaluate_at(point)).collect()
    }

    /// Sign in the ordered ring R[[l]]: the sign of the first nonvanishing
    /// coefficient. Every coefficient must be a real constant.
    pub fn sign(&self) -> Result<i32> {
        let mut values = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            match c.constant_value() {
                Some(v) if v.is_real() => values.push(v),
                _ => return Err(Error::NotRealConstant(c.to_string())),
            }
        }
        Ok(values.iter().map(|v| v.real_sign().unwrap_or(0)).find(|&s| s != 0).unwrap_or(0))
    }
}

/// Sign of an evaluated (constant) series `v0 + v1 l + ...`.
pub fn sign_of_values(values: &[GaussianRational]) -> Result<i32> {
    for v in values {
        match v.real_sign() {
            None => return Err(Error::NotRealConstant(v.to_string())),
            Some(0) => {}
            Some(s) => return Ok(s),
        }
    }
    Ok(0)
}

impl PartialEq for FormalSeries {
    fn eq(&self, o: &FormalSeries) -> bool {
        self.try_eq(o).unwrap_or(false)
    }
}

impl<'a> Add<&'a FormalSeries> for &'a FormalSeries {
    type Output = FormalSeries;
    fn add(self, o: &FormalSeries) -> FormalSeries {
        self.try_add(o).expect("series shape mismatch")
    }
}

impl<'a> Sub<&'a FormalSeries> for &'a FormalSeries {
    type Output = FormalSeries;
    fn sub(self, o: &FormalSeries) -> FormalSeries {
        self.try_sub(o).expect("series shape mismatch")
    }
}

impl Neg for &FormalSeries {
    type Output = FormalSeries;
    fn neg(self) -> FormalSeries {
        FormalSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for FormalSeries {
    /// Renders in the series literal grammar, `c0 + (c1)*l + (c2)*l^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (r, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match r {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*l")?,
                _ => write!(f, "({c})*l^{r}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> CoeffRing {
        CoeffRing::polynomial(2)
    }

    fn lin(c0: Coefficient, c1: Coefficient, c2: Coefficient) -> FormalSeries {
        FormalSeries::from_coeffs(vec![c0, c1, c2]).unwrap()
    }

    #[test]
    fn cauchy_product() {
        let r = ring();
        let x = r.var(0).unwrap();
        let a = lin(r.one(), x.clone(), r.zero());
        let b = lin(r.one(), -&x, r.zero());
        let expected = lin(r.one(), r.zero(), -&(&x * &x));
        assert_eq!(a.try_cauchy_mul(&b).unwrap(), expected);
    }

    #[test]
    fn classical_part_and_truncate() {
        let r = ring();
        let s = lin(r.int(3), r.var(1).unwrap(), r.zero());
        assert_eq!(s.classical_part(), &r.int(3));
        let t = lin(r.one(), r.one(), r.one());
        let want = FormalSeries::from_coeffs(vec![r.one(), r.one()]).unwrap();
        assert_eq!(t.truncate(1).unwrap(), want);
    }

    #[test]
    fn order_mismatch() {
        let r = ring();
        let a = FormalSeries::one(r, 2);
        let b = FormalSeries::one(r, 3);
        assert_eq!(a.try_add(&b).unwrap_err(), Error::OrderMismatch(2, 3));
    }

    #[test]
    fn sign_rule() {
        let r = ring();
        let s = lin(r.zero(), r.zero(), r.int(3));
        assert_eq!(s.sign().unwrap(), 1);
        let s = lin(r.constant(GaussianRational::from_frac(-1, 2)), r.int(7), r.zero());
        assert_eq!(s.sign().unwrap(), -1);
        let s = lin(r.zero(), r.constant(GaussianRational::i()), r.zero());
        assert!(matches!(s.sign(), Err(Error::NotRealConstant(_))));
        assert_eq!(FormalSeries::zero(r, 2).sign().unwrap(), 0);
        let s = lin(r.var(0).unwrap(), r.zero(), r.zero());
        assert!(s.sign().is_err());
    }
}
