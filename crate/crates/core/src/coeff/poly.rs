//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Coefficients are Gaussian integers over one positive common denominator
//! that shares no factor with them, so integer polynomials multiply without
//! a single gcd.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::gauss::GaussianRational;
use crate::error::{Error, Result};

/// Maximum number of real variables a ring may carry.
pub const MAX_VARS: usize = 6;

/// Dense exponent vector. The derived `Ord` is lexicographic, which is a
/// monomial order; the last key of a term map is the leading monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub [u16; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(k: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[k] = 1;
        Monomial(e)
    }

    pub fn from_slice(exps: &[u16]) -> Self {
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        Monomial(e)
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// `o / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        let mut e = o.0;
        for (a, b) in e.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn one() -> Self {
        GaussInt { re: BigInt::one(), im: BigInt::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn is_unit(&self) -> bool {
        let unit = |a: &BigInt, b: &BigInt| b.is_zero() && (a.is_one() || (-a).is_one());
        unit(&self.re, &self.im) || unit(&self.im, &self.re)
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussInt { re: &self.re * &o.re, im: BigInt::zero() };
        }
        GaussInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn scale(&self, k: &BigInt) -> GaussInt {
        GaussInt { re: &self.re * k, im: &self.im * k }
    }

    fn neg(&self) -> GaussInt {
        GaussInt { re: -&self.re, im: -&self.im }
    }

    fn conj(&self) -> GaussInt {
        GaussInt { re: self.re.clone(), im: -&self.im }
    }

    fn over(&self, den: &BigInt) -> GaussianRational {
        if den.is_one() {
            return GaussianRational::new(BigRational::from_integer(self.re.clone()), BigRational::from_integer(self.im.clone()));
        }
        GaussianRational::new(BigRational::new(self.re.clone(), den.clone()), BigRational::new(self.im.clone(), den.clone()))
    }
}

/// `c = g / d` with `g` a Gaussian integer and `d > 0`.
fn split(c: &GaussianRational) -> (GaussInt, BigInt) {
    let (rd, id) = (c.re.denom(), c.im.denom());
    let d = rd.lcm(id);
    let g = GaussInt { re: c.re.numer() * (&d / rd), im: c.im.numer() * (&d / id) };
    (g, d)
}

fn add_into(terms: &mut BTreeMap<Monomial, GaussInt>, m: Monomial, c: GaussInt) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let t = o.get_mut();
            t.re += c.re;
            t.im += c.im;
            if t.is_zero() {
                o.remove();
            }
        }
    }
}

// Arithmetic modulo a prime p = 1 (mod 4), where i maps to a square root of -1.
const P: u64 = 998_244_353;

fn mul_mod(a: u64, b: u64) -> u64 {
    a * b % P
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    acc
}

fn reduce_mod(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(P)).to_u64().expect("residue fits")
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    den: BigInt,
    terms: BTreeMap<Monomial, GaussInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables supported");
        Self { nvars, den: BigInt::one(), terms: BTreeMap::new() }
    }

    fn from_parts(nvars: usize, den: BigInt, terms: BTreeMap<Monomial, GaussInt>) -> Self {
        let mut p = Self { nvars, den, terms };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        if self.terms.is_empty() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in self.terms.values() {
            g = g.gcd(&c.re);
            if g.is_one() {
                return;
            }
            g = g.gcd(&c.im);
            if g.is_one() {
                return;
            }
        }
        self.den /= &g;
        for c in self.terms.values_mut() {
            c.re /= &g;
            c.im /= &g;
        }
    }

    fn from_rational_map(nvars: usize, map: BTreeMap<Monomial, GaussianRational>) -> Self {
        let mut den = BigInt::one();
        for c in map.values() {
            den = den.lcm(c.re.denom()).lcm(c.im.denom());
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, GaussInt { re: c.re.numer() * (&den / c.re.denom()), im: c.im.numer() * (&den / c.im.denom()) }))
            .collect();
        Self::from_parts(nvars, den, terms)
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        Self::monomial(nvars, Monomial::one(), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    /// The coordinate function `x_{k+1}` (0-based `k`).
    pub fn var(nvars: usize, k: usize) -> Result<Self> {
        if k >= nvars {
            return Err(Error::UnknownVariable(k, nvars));
        }
        Ok(Self::monomial(nvars, Monomial::var(k), GaussianRational::one()))
    }

    pub fn monomial(nvars: usize, m: Monomial, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            let (g, d) = split(&c);
            p.terms.insert(m, g);
            p.den = d;
            p.normalize();
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, GaussianRational)>) -> Self {
        let mut map: BTreeMap<Monomial, GaussianRational> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_default() += &c;
        }
        Self::from_rational_map(nvars, map)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Monomial, GaussianRational)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c.over(&self.den)))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.den.is_one() && self.terms.get(&Monomial::one()) == Some(&GaussInt::one())
    }

    pub fn constant_value(&self) -> GaussianRational {
        self.terms.get(&Monomial::one()).map(|c| c.over(&self.den)).unwrap_or_default()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    pub fn leading(&self) -> Option<(Monomial, GaussianRational)> {
        self.terms().next_back()
    }

    pub fn trailing(&self) -> Option<(Monomial, GaussianRational)> {
        self.terms().next()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Maximum exponent of variable `k`.
    pub fn degree_in(&self, k: usize) -> u16 {
        self.terms.keys().map(|m| m.0[k]).max().unwrap_or(0)
    }

    fn check(&self, o: &Poly) -> Result<()> {
        if self.nvars != o.nvars {
            return Err(Error::VariableMismatch(self.nvars, o.nvars));
        }
        Ok(())
    }

    fn combine(&self, o: &Poly, negate: bool) -> Result<Poly> {
        self.check(o)?;
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(if negate { o.neg() } else { o.clone() });
        }
        let den = self.den.lcm(&o.den);
        let ms = &den / &self.den;
        let mo = &den / &o.den;
        let mut terms = if ms.is_one() { self.terms.clone() } else { self.terms.iter().map(|(m, c)| (*m, c.scale(&ms))).collect() };
        for (m, c) in &o.terms {
            let c = if mo.is_one() { c.clone() } else { c.scale(&mo) };
            add_into(&mut terms, *m, if negate { c.neg() } else { c });
        }
        Ok(Poly::from_parts(self.nvars, den, terms))
    }

    pub fn try_add(&self, o: &Poly) -> Result<Poly> {
        self.combine(o, false)
    }

    pub fn try_sub(&self, o: &Poly) -> Result<Poly> {
        self.combine(o, true)
    }

    pub fn try_mul(&self, o: &Poly) -> Result<Poly> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Poly::zero(self.nvars));
        }
        if self.is_constant() {
            return Ok(o.scale(&self.constant_value()));
        }
        if o.is_constant() {
            return Ok(self.scale(&o.constant_value()));
        }
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                add_into(&mut terms, ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(Poly::from_parts(self.nvars, &self.den * &o.den, terms))
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, den: self.den.clone(), terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn scale(&self, s: &GaussianRational) -> Poly {
        self.mul_monomial(&Monomial::one(), s)
    }

    pub fn scale_rational(&self, s: &BigRational) -> Poly {
        self.scale(&GaussianRational::real(s.clone()))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        if c.is_one() && m.is_one() {
            return self.clone();
        }
        let (g, d) = split(c);
        let terms = self.terms.iter().map(|(k, v)| (k.mul(m), v.mul(&g))).collect();
        Poly::from_parts(self.nvars, &self.den * d, terms)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = acc.try_mul(self).expect("same ring");
        }
        acc
    }

    pub fn conj(&self) -> Poly {
        Poly { nvars: self.nvars, den: self.den.clone(), terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect() }
    }

    pub fn derivative(&self, var: usize) -> Result<Poly> {
        if var >= self.nvars {
            return Err(Error::UnknownVariable(var, self.nvars));
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut nm = *m;
            nm.0[var] -= 1;
            terms.insert(nm, c.scale(&BigInt::from(e)));
        }
        Ok(Poly::from_parts(self.nvars, self.den.clone(), terms))
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<GaussianRational> {
        if point.len() != self.nvars {
            return Err(Error::PointDimension { expected: self.nvars, got: point.len() });
        }
        let mut acc = GaussianRational::zero();
        for (m, c) in self.terms() {
            let mut v = BigRational::one();
            for (k, x) in point.iter().enumerate() {
                for _ in 0..m.0[k] {
                    v *= x;
                }
            }
            acc += &c.scale(&v);
        }
        Ok(acc)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() || self.nvars != d.nvars {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if d.is_constant() {
            return Some(self.scale(&d.constant_value().inv().ok()?));
        }
        let (lm, lc) = d.terms.iter().next_back().map(|(m, c)| (*m, c.clone()))?;
        let tm = *d.terms.keys().next()?;
        // Cheap filters: leading and trailing terms of a product are the
        // products of the leading and trailing terms.
        if !lm.divides(self.terms.keys().next_back()?) || !tm.divides(self.terms.keys().next()?) {
            return None;
        }
        for k in 0..self.nvars {
            if d.degree_in(k) > self.degree_in(k) {
                return None;
            }
        }
        if !self.modular_divisible(d, lm, &lc) {
            return None;
        }
        // self / d = (N1 / N2) * (d2 / d1) on the integer numerators.
        if lc.is_unit() {
            let inv = lc.conj();
            let mut rem = self.terms.clone();
            let mut quot = BTreeMap::new();
            while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
                if !lm.divides(&rm) {
                    return None;
                }
                let qm = lm.quotient_of(&rm);
                let qc = rc.mul(&inv);
                for (m, c) in &d.terms {
                    add_into(&mut rem, m.mul(&qm), c.mul(&qc).neg());
                }
                quot.insert(qm, qc.scale(&d.den));
            }
            return Some(Poly::from_parts(self.nvars, self.den.clone(), quot));
        }
        let one = BigInt::one();
        let lc_inv = lc.over(&one).inv().ok()?;
        let mut rem: BTreeMap<Monomial, GaussianRational> = self.terms.iter().map(|(m, c)| (*m, c.over(&one))).collect();
        let mut quot = BTreeMap::new();
        while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            if !lm.divides(&rm) {
                return None;
            }
            let qm = lm.quotient_of(&rm);
            let qc = &rc * &lc_inv;
            for (m, c) in &d.terms {
                let t = &c.over(&one) * &qc;
                let slot = rem.entry(m.mul(&qm)).or_default();
                *slot -= &t;
                if slot.is_zero() {
                    rem.remove(&m.mul(&qm));
                }
            }
            quot.insert(qm, qc);
        }
        let ratio = GaussianRational::real(BigRational::new(d.den.clone(), self.den.clone()));
        Some(Poly::from_rational_map(self.nvars, quot).scale(&ratio))
    }

    /// Necessary condition for `d | self`: the numerators, reduced modulo a
    /// prime and with every variable but one fixed at small integers, must
    /// still divide. The quotient has denominators dividing powers of the
    /// norm of `lc`, so the test is sound whenever that norm is a unit mod p.
    fn modular_divisible(&self, d: &Poly, lm: Monomial, lc: &GaussInt) -> bool {
        let Some(k) = (0..self.nvars).find(|&k| lm.0[k] > 0) else { return true };
        let (a, b) = (reduce_mod(&lc.re), reduce_mod(&lc.im));
        if (mul_mod(a, a) + mul_mod(b, b)).is_multiple_of(P) {
            return true;
        }
        let s = pow_mod(3, (P - 1) / 4);
        let values: Vec<u64> = (0..self.nvars).map(|j| 2 * j as u64 + 3).collect();
        let dd = d.specialize_mod(k, &values, s);
        let Some(ddeg) = dd.iter().rposition(|&c| c != 0) else { return true };
        if ddeg == 0 {
            return true;
        }
        let mut rem = self.specialize_mod(k, &values, s);
        let inv = pow_mod(dd[ddeg], P - 2);
        while let Some(top) = rem.iter().rposition(|&c| c != 0) {
            if top < ddeg {
                return false;
            }
            let q = mul_mod(rem[top], inv);
            for (i, &c) in dd.iter().enumerate().take(ddeg + 1) {
                let slot = &mut rem[top - ddeg + i];
                *slot = (*slot + P - mul_mod(c, q)) % P;
            }
            rem.truncate(top);
        }
        true
    }

    /// Dense numerator coefficients in `x_k` modulo p after substituting
    /// `x_j = values[j]` for every `j != k` and `i = s`.
    fn specialize_mod(&self, k: usize, values: &[u64], s: u64) -> Vec<u64> {
        let powers: Vec<Vec<u64>> = (0..self.nvars)
            .map(|j| {
                let mut row = vec![1u64];
                for _ in 0..self.degree_in(j) {
                    let last = *row.last().expect("nonempty");
                    row.push(mul_mod(last, values[j]));
                }
                row
            })
            .collect();
        let mut out = vec![0u64; self.degree_in(k) as usize + 1];
        for (m, c) in &self.terms {
            let mut v = (reduce_mod(&c.re) + mul_mod(s, reduce_mod(&c.im))) % P;
            for j in 0..self.nvars {
                if j != k {
                    v = mul_mod(v, powers[j][m.0[j] as usize]);
                }
            }
            let slot = &mut out[m.0[k] as usize];
            *slot = (*slot + v) % P;
        }
        out
    }

    /// Returns `(c, q)` with `self = c * q` and `q` having leading coefficient 1.
    pub fn monic_split(&self) -> (GaussianRational, Poly) {
        match self.leading() {
            None => (GaussianRational::zero(), self.clone()),
            Some((_, lc)) => {
                let inv = lc.inv().expect("nonzero leading coefficient");
                (lc, self.scale(&inv))
            }
        }
    }

    pub(crate) fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms().rev() {
            let mut factors = Vec::new();
            for k in 0..self.nvars {
                match m.0[k] {
                    0 => {}
                    1 => factors.push(names(k)),
                    e => factors.push(format!("{}^{}", names(k), e)),
                }
            }
            let zero = BigRational::zero();
            let purely_negative = (c.im == zero && c.re < zero) || (c.re == zero && c.im < zero);
            let (neg, mag) = if purely_negative { (true, -c) } else { (false, c) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &|k| format!("x{}", k + 1))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> Poly {
        Poly::var(2, k).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = x(0).try_add(&x(1)).unwrap();
        let b = x(0).try_sub(&x(1)).unwrap();
        let lhs = a.try_mul(&b).unwrap();
        let rhs = x(0).pow(2).try_sub(&x(1).pow(2)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_of_x1_squared_x2() {
        let p = x(0).pow(2).try_mul(&x(1)).unwrap();
        let d = p.derivative(0).unwrap();
        let expected = x(0).try_mul(&x(1)).unwrap().scale(&GaussianRational::from_int(2));
        assert_eq!(d, expected);
        assert_eq!(p.derivative(2), Err(Error::UnknownVariable(2, 2)));
    }

    #[test]
    fn exact_division() {
        let f = Poly::one(2).try_add(&x(0).pow(2)).unwrap().try_add(&x(1).pow(2)).unwrap();
        let g = x(0).try_sub(&x(1)).unwrap();
        let prod = f.try_mul(&g).unwrap();
        assert_eq!(prod.exact_div(&f), Some(g.clone()));
        assert_eq!(prod.exact_div(&g), Some(f.clone()));
        assert_eq!(f.exact_div(&g), None);
        assert_eq!(prod.try_add(&Poly::one(2)).unwrap().exact_div(&f), None);
    }

    #[test]
    fn division_with_rational_and_gaussian_coefficients() {
        let third = GaussianRational::from_frac(1, 3);
        let f = x(0).scale(&GaussianRational::new(BigRational::from_integer(2.into()), BigRational::one())).try_add(&Poly::one(2)).unwrap();
        let g = x(0).pow(2).scale(&third).try_add(&x(1)).unwrap();
        let prod = f.try_mul(&g).unwrap();
        assert_eq!(prod.exact_div(&f), Some(g.clone()));
        assert_eq!(prod.exact_div(&g), Some(f.clone()));
        assert_eq!(prod.try_add(&x(1)).unwrap().exact_div(&g), None);
        let half = prod.scale(&GaussianRational::from_frac(1, 2));
        assert_eq!(half.exact_div(&g), Some(f.scale(&GaussianRational::from_frac(1, 2))));
    }

    #[test]
    fn canonical_denominator() {
        let a = x(0).scale(&GaussianRational::from_frac(1, 2));
        let b = x(0).scale(&GaussianRational::from_frac(3, 2));
        assert_eq!(a.try_add(&b).unwrap(), x(0).scale(&GaussianRational::from_int(2)));
        assert_eq!(a.try_sub(&a).unwrap(), Poly::zero(2));
    }

    #[test]
    fn mismatched_rings() {
        let a = Poly::one(2);
        let b = Poly::one(3);
        assert_eq!(a.try_add(&b), Err(Error::VariableMismatch(2, 3)));
    }

    #[test]
    fn evaluate_simple() {
        let p = x(0).pow(2).try_add(&x(1)).unwrap();
        let pt = [BigRational::from_integer(2.into()), BigRational::from_integer(3.into())];
        assert_eq!(p.evaluate(&pt).unwrap(), GaussianRational::from_int(7));
    }
}
