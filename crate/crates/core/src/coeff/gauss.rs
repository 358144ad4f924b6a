//! Gaussian rationals `a + b i` with `a, b` in Q.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

// num-rational normalises with a binary gcd on every operation, even when
// both denominators are 1. Integer operands are by far the common case in
// polynomial arithmetic, so they bypass it.
fn q_add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() {
        b.clone()
    } else if b.is_zero() {
        a.clone()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn q_sub(a: &BigRational, b: &BigRational) -> BigRational {
    if b.is_zero() {
        a.clone()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() - b.numer())
    } else {
        a - b
    }
}

fn q_mul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        BigRational::zero()
    } else if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

fn q_add_assign(a: &mut BigRational, b: &BigRational) {
    if b.is_zero() {
        return;
    }
    if a.is_integer() && b.is_integer() {
        *a = BigRational::from_integer(a.numer() + b.numer());
    } else {
        *a += b;
    }
}

fn q_sub_assign(a: &mut BigRational, b: &BigRational) {
    if b.is_zero() {
        return;
    }
    if a.is_integer() && b.is_integer() {
        *a = BigRational::from_integer(a.numer() - b.numer());
    } else {
        *a -= b;
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_frac(p: i64, q: i64) -> Self {
        Self::new(BigRational::new(p.into(), q.into()), BigRational::zero())
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// |z|^2 = z * conj(z).
    pub fn norm_sqr(&self) -> BigRational {
        q_add(&q_mul(&self.re, &self.re), &q_mul(&self.im, &self.im))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(q_mul(&self.re, r), q_mul(&self.im, r))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Sign of a real value; `None` when the imaginary part is nonzero.
    pub fn real_sign(&self) -> Option<i32> {
        if !self.im.is_zero() {
            return None;
        }
        Some(if self.re.is_zero() {
            0
        } else if self.re.is_positive() {
            1
        } else {
            -1
        })
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        Self::real(r)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(q_add(&self.re, &o.re), q_add(&self.im, &o.im))
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(q_sub(&self.re, &o.re), q_sub(&self.im, &o.im))
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::real(q_mul(&self.re, &o.re));
        }
        GaussianRational::new(
            q_sub(&q_mul(&self.re, &o.re), &q_mul(&self.im, &o.im)),
            q_add(&q_mul(&self.re, &o.im), &q_mul(&self.im, &o.re)),
        )
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: GaussianRational) -> GaussianRational {
        &self + &o
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: GaussianRational) -> GaussianRational {
        &self - &o
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: GaussianRational) -> GaussianRational {
        &self * &o
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        q_add_assign(&mut self.re, &o.re);
        q_add_assign(&mut self.im, &o.im);
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        q_sub_assign(&mut self.re, &o.re);
        q_sub_assign(&mut self.im, &o.im);
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Grammar-compatible rendering, e.g. `3/2`, `-i`, `(1/2 + 3*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", fmt_rational(&self.im))
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                let abs = self.im.abs();
                if abs.is_one() {
                    write!(f, "({} {} i)", fmt_rational(&self.re), sign)
                } else {
                    write!(f, "({} {} {}*i)", fmt_rational(&self.re), sign, fmt_rational(&abs))
                }
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_plus_i() {
        let z = GaussianRational::new(BigRational::from_integer(2.into()), BigRational::one());
        let expected = GaussianRational::new(
            BigRational::new(2.into(), 5.into()),
            BigRational::new((-1).into(), 5.into()),
        );
        assert_eq!(z.inv().unwrap(), expected);
        assert!((&z * &expected).is_one());
    }

    #[test]
    fn conj_of_i() {
        assert_eq!(GaussianRational::i().conj(), -GaussianRational::i());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(GaussianRational::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussianRational::from_frac(3, 2).to_string(), "3/2");
        assert_eq!((-GaussianRational::i()).to_string(), "-i");
        let z = &GaussianRational::from_int(1) + &GaussianRational::i();
        assert_eq!(z.to_string(), "(1 + i)");
    }
}
