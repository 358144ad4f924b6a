//! Star-functional calculus: inverses and the binomial series for
//! `(1 + B)^{-1/2}`.

use num_rational::BigRational;

use super::StarAlgebra;
use crate::coeff::GaussianRational;
use crate::error::{Error, Result};
use crate::series::FormalSeries;

/// Elements of `A[[l]]`-algebras the calculus can act on: series and
/// matrices of series.
pub trait StarElement: Clone {
    fn star(&self, alg: &StarAlgebra, o: &Self) -> Result<Self>;
    fn plus(&self, o: &Self) -> Result<Self>;
    fn scaled(&self, s: &GaussianRational) -> Self;
    /// The unit of the algebra this element lives in.
    fn unit_like(&self) -> Self;
    fn classical_vanishes(&self) -> bool;
    fn vanishes(&self) -> bool;
}

impl StarElement for FormalSeries {
    fn star(&self, alg: &StarAlgebra, o: &Self) -> Result<Self> {
        alg.star_mul(self, o)
    }

    fn plus(&self, o: &Self) -> Result<Self> {
        self.try_add(o)
    }

    fn scaled(&self, s: &GaussianRational) -> Self {
        self.scale(s)
    }

    fn unit_like(&self) -> Self {
        FormalSeries::one(self.ring(), self.order())
    }

    fn classical_vanishes(&self) -> bool {
        self.classical_part().is_zero()
    }

    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

/// `binom(-1/2, k)`.
pub fn binomial_minus_half(k: usize) -> BigRational {
    let mut acc = BigRational::from_integer(1.into());
    for j in 0..k {
        let num = BigRational::new((-1 - 2 * j as i64).into(), 2.into());
        acc = acc * num / BigRational::from_integer((j as i64 + 1).into());
    }
    acc
}

/// `(1 + B)^{-1/2} = sum_k binom(-1/2, k) B^k` for `B = O(l)`, the
/// principal branch with classical part 1. The sum is finite at every order.
pub fn binomial_half_inverse<E: StarElement>(alg: &StarAlgebra, b: &E) -> Result<E> {
    if !b.classical_vanishes() {
        return Err(Error::NonzeroClassicalPart);
    }
    let mut acc = b.unit_like();
    let mut power = b.unit_like();
    for k in 1..=alg.order() {
        power = power.star(alg, b)?;
        if power.vanishes() {
            break;
        }
        acc = acc.plus(&power.scaled(&GaussianRational::real(binomial_minus_half(k))))?;
    }
    Ok(acc)
}

/// Two-sided star inverse of a series with invertible classical part,
/// solved order by order: `g_r = -f_0^{-1} (f * g_{<r})_r`.
pub fn star_inverse(alg: &StarAlgebra, f: &FormalSeries) -> Result<FormalSeries> {
    alg.check_series(f)?;
    let inv0 = f.classical_part().invert().map_err(|e| match e {
        Error::DivisionByZero | Error::NonUnit(_) => Error::NotInvertible,
        other => other,
    })?;
    let fj = alg.jets_left(f)?;
    let mut g = FormalSeries::constant(inv0.clone(), alg.order());
    for r in 1..=alg.order() {
        let gj = alg.jets_right(&g)?;
        let residual = alg.product_coeff(&fj, &gj, r)?;
        g.set_coeff(r, -&(&inv0 * &residual));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffKind;
    use crate::parse::parse_series;
    use crate::star::standard_theta;

    fn moyal(kind: CoeffKind) -> StarAlgebra {
        StarAlgebra::moyal(1, &standard_theta(1), kind, 3).unwrap()
    }

    #[test]
    fn binomial_coefficients() {
        // (1+z)^{-1/2} = 1 - z/2 + 3 z^2/8 - 5 z^3/16 + ...
        assert_eq!(binomial_minus_half(0), BigRational::from_integer(1.into()));
        assert_eq!(binomial_minus_half(1), BigRational::new((-1).into(), 2.into()));
        assert_eq!(binomial_minus_half(2), BigRational::new(3.into(), 8.into()));
        assert_eq!(binomial_minus_half(3), BigRational::new((-5).into(), 16.into()));
    }

    #[test]
    fn geometric_inverse() {
        let alg = moyal(CoeffKind::Polynomial);
        let f = parse_series("1 + x1*l", alg.ring(), 3).unwrap();
        let g = star_inverse(&alg, &f).unwrap();
        assert_eq!(g, parse_series("1 - x1*l + x1^2*l^2 - x1^3*l^3", alg.ring(), 3).unwrap());
        assert_eq!(alg.star_mul(&f, &g).unwrap(), alg.one());
        assert_eq!(alg.star_mul(&g, &f).unwrap(), alg.one());
    }

    #[test]
    fn polynomial_non_unit_rejected() {
        let alg = moyal(CoeffKind::Polynomial);
        let x = parse_series("x1", alg.ring(), 3).unwrap();
        assert_eq!(star_inverse(&alg, &x).unwrap_err(), Error::NotInvertible);
        assert_eq!(star_inverse(&alg, &alg.one()).unwrap(), alg.one());
    }

    #[test]
    fn scalar_half_inverse() {
        let alg = moyal(CoeffKind::Polynomial);
        let b = parse_series("x1*l", alg.ring(), 3).unwrap();
        let x = binomial_half_inverse(&alg, &b).unwrap();
        let want = parse_series("1 - 1/2*x1*l + 3/8*x1^2*l^2 - 5/16*x1^3*l^3", alg.ring(), 3).unwrap();
        assert_eq!(x, want);
        let zero = alg.zero();
        assert_eq!(binomial_half_inverse(&alg, &zero).unwrap(), alg.one());
        assert_eq!(binomial_half_inverse(&alg, &alg.one()).unwrap_err(), Error::NonzeroClassicalPart);
    }

    #[test]
    fn half_inverse_identity_noncommuting() {
        let alg = moyal(CoeffKind::Rational);
        let b = parse_series("x2*l + x1^2*l^2 - i*x1*x2*l^3", alg.ring(), 3).unwrap();
        let x = binomial_half_inverse(&alg, &b).unwrap();
        let one_plus_b = alg.one().try_add(&b).unwrap();
        let lhs = alg.star_mul(&alg.star_mul(&x, &x).unwrap(), &one_plus_b).unwrap();
        assert_eq!(lhs, alg.one());
    }
}
