//! Order-by-order constructions in matrix algebras over a deformed algebra.

use num_rational::BigRational;

use super::StarMatrix;
use crate::coeff::{CoeffRing, GaussianRational};
use crate::error::{Error, Result};
use crate::star::{binomial_half_inverse, StarAlgebra};

/// A unital algebra of matrices with a deformed product and the
/// conjugate-transpose involution. Implemented by `M_n(A[[l]])` and by the
/// deformed endomorphism algebra of a projective module.
pub trait MatrixAlgebra: Sync {
    fn ring(&self) -> CoeffRing;
    fn order(&self) -> usize;
    fn mul(&self, a: &StarMatrix, b: &StarMatrix) -> Result<StarMatrix>;
    /// Unit of the algebra of `n x n` matrices.
    fn unit(&self, n: usize) -> StarMatrix;
    /// Inverse of a classical element in the undeformed algebra.
    fn classical_inverse(&self, a0: &StarMatrix) -> Result<StarMatrix>;
}

impl MatrixAlgebra for StarAlgebra {
    fn ring(&self) -> CoeffRing {
        StarAlgebra::ring(self)
    }

    fn order(&self) -> usize {
        StarAlgebra::order(self)
    }

    fn mul(&self, a: &StarMatrix, b: &StarMatrix) -> Result<StarMatrix> {
        a.star_mul(self, b)
    }

    fn unit(&self, n: usize) -> StarMatrix {
        StarMatrix::identity(StarAlgebra::ring(self), StarAlgebra::order(self), n)
    }

    fn classical_inverse(&self, a0: &StarMatrix) -> Result<StarMatrix> {
        a0.classical_inverse()
    }
}

fn half() -> GaussianRational {
    GaussianRational::real(BigRational::new(1.into(), 2.into()))
}

fn classical_product(a: &StarMatrix, b: &StarMatrix) -> Result<StarMatrix> {
    a.classical_part().cauchy_mul(&b.classical_part())
}

fn require_classical_projection(p0: &StarMatrix) -> Result<()> {
    if !p0.is_square() {
        return Err(Error::Dimension("projection must be square".into()));
    }
    if !p0.is_classical() {
        return Err(Error::Constraint("the classical projection must be constant in the formal parameter".into()));
    }
    if let Some(d) = p0.cauchy_mul(p0)?.first_difference(p0)? {
        return Err(Error::NotIdempotent(format!("P0 P0 != P0 at entry {}", d.location())));
    }
    Ok(())
}

/// The defect `B = 4 (P0 * P0 - P0)`, which is `O(l)` for a classical
/// idempotent.
pub fn projection_defect(alg: &StarAlgebra, p0: &StarMatrix) -> Result<StarMatrix> {
    Ok(p0.star_mul(alg, p0)?.try_sub(p0)?.scale(&GaussianRational::from_int(4)))
}

/// Closed-form deformed idempotent
/// `P = 1/2 + (P0 - 1/2) * (1 + B)^{-1/2}`, principal branch.
pub fn deform_projection_fedosov(alg: &StarAlgebra, p0: &StarMatrix, hermitian: bool) -> Result<StarMatrix> {
    require_classical_projection(p0)?;
    if hermitian {
        if !p0.is_hermitian()? {
            return Err(Error::NotHermitian("P0".into()));
        }
        if !alg.is_hermitian() {
            return Err(Error::NotHermitian("the star product".into()));
        }
    }
    let b = projection_defect(alg, p0)?;
    let root = binomial_half_inverse(alg, &b)?;
    let h = alg.unit(p0.rows()).scale(&half());
    h.try_add(&p0.try_sub(&h)?.star_mul(alg, &root)?)
}

/// Idempotent lift by successive corrections. At step `k` the defect
/// `P*P - P = l^k E_k + ...` satisfies `P0 E_k = E_k P0`, and adding
/// `l^k (E_k - P0 E_k - E_k P0)` removes it.
pub fn deform_projection_recursive<A: MatrixAlgebra>(alg: &A, p0: &StarMatrix) -> Result<StarMatrix> {
    require_classical_projection(p0)?;
    let mut p = p0.clone();
    for k in 1..=alg.order() {
        let defect = alg.mul(&p, &p)?.try_sub(&p)?;
        if let Some(d) = (0..k).find(|&r| !defect.coefficient_matrix(r).is_zero()) {
            return Err(Error::Inconsistent(format!("idempotent defect at order {d} before step {k}")));
        }
        let e = defect.coefficient_matrix(k);
        let pe = classical_product(p0, &e)?;
        let ep = classical_product(&e, p0)?;
        if let Some(d) = pe.first_difference(&ep)? {
            return Err(Error::Inconsistent(format!("P0 E_{k} != E_{k} P0 at entry {}", d.location())));
        }
        let correction = e.try_sub(&pe)?.try_sub(&ep)?;
        p.set_coefficient_matrix(k, &correction);
    }
    Ok(p)
}

/// `U = P' * P + (1 - P') * (1 - P)`, which satisfies `U * P = P' * U` and
/// has classical part the identity.
pub fn idempotent_intertwiner<A: MatrixAlgebra>(alg: &A, p: &StarMatrix, p_prime: &StarMatrix) -> Result<StarMatrix> {
    if let Some(d) = p.classical_part().first_difference(&p_prime.classical_part())? {
        return Err(Error::Mismatch(format!("classical parts differ at entry {}", d.location())));
    }
    let one = alg.unit(p.rows());
    let a = alg.mul(p_prime, p)?;
    let b = alg.mul(&one.try_sub(p_prime)?, &one.try_sub(p)?)?;
    a.try_add(&b)
}

/// Solves `L* * L = S` for `L = L0 + sum_r L_r l^r` with
/// `L_k = 1/2 (b_k L0^{-1})*`, `b_k` the leading coefficient of
/// `S - L_{(k-1)}* * L_{(k-1)}`.
pub fn hermitian_factorization<A: MatrixAlgebra>(alg: &A, s: &StarMatrix, l0: &StarMatrix) -> Result<StarMatrix> {
    if !s.is_hermitian()? {
        return Err(Error::NotHermitian("S".into()));
    }
    if !l0.is_classical() {
        return Err(Error::Constraint("L0 must be constant in the formal parameter".into()));
    }
    if let Some(d) = classical_product(&l0.adjoint(), l0)?.first_difference(&s.classical_part())? {
        return Err(Error::Constraint(format!("S0 != L0* L0 at entry {}", d.location())));
    }
    let l0_inv = alg.classical_inverse(l0)?;
    let mut l = l0.clone();
    for k in 1..=alg.order() {
        let b = s.try_sub(&alg.mul(&l.adjoint(), &l)?)?.coefficient_matrix(k);
        if b.is_zero() {
            continue;
        }
        let lk = classical_product(&b, &l0_inv)?.adjoint().scale(&half());
        l.set_coefficient_matrix(k, &lk);
    }
    Ok(l)
}

/// Deforms a classical unitary into `U` with `U* * U = U * U* = 1`.
pub fn deform_unitary<A: MatrixAlgebra>(alg: &A, u0: &StarMatrix) -> Result<StarMatrix> {
    if !u0.is_classical() {
        return Err(Error::Constraint("U0 must be constant in the formal parameter".into()));
    }
    let one = alg.unit(u0.rows()).classical_part();
    let left = classical_product(&u0.adjoint(), u0)?;
    let right = classical_product(u0, &u0.adjoint())?;
    if !left.try_eq(&one)? || !right.try_eq(&one)? {
        return Err(Error::NotUnitary("U0".into()));
    }
    hermitian_factorization(alg, &alg.unit(u0.rows()), u0)
}

/// Two-sided inverse by order recursion `G_r = A0^{-1} (1 - A * G_{<r})_r`,
/// where `1` is the unit of the algebra.
pub fn mat_series_inverse<A: MatrixAlgebra>(alg: &A, a: &StarMatrix) -> Result<StarMatrix> {
    let inv0 = alg.classical_inverse(&a.classical_part())?;
    let unit = alg.unit(a.rows());
    let mut g = inv0.clone();
    for r in 1..=alg.order() {
        let residual = unit.try_sub(&alg.mul(a, &g)?)?.coefficient_matrix(r);
        if residual.is_zero() {
            continue;
        }
        g.set_coefficient_matrix(r, &classical_product(&inv0, &residual)?);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffKind;
    use crate::parse::parse_series;
    use crate::star::standard_theta;

    fn moyal(kind: CoeffKind, order: usize) -> StarAlgebra {
        StarAlgebra::moyal(1, &standard_theta(1), kind, order).unwrap()
    }

    fn mat(alg: &StarAlgebra, n: usize, src: &[&str]) -> StarMatrix {
        StarMatrix::square(n, src.iter().map(|s| parse_series(s, alg.ring(), alg.order()).unwrap()).collect()).unwrap()
    }

    #[test]
    fn scalar_factorization() {
        let alg = moyal(CoeffKind::Polynomial, 3);
        let s = mat(&alg, 1, &["1 + l*x1"]);
        let l = hermitian_factorization(&alg, &s, &mat(&alg, 1, &["1"])).unwrap();
        let expected = mat(&alg, 1, &["1 + (1/2)*x1*l - (1/8)*x1^2*l^2 + (1/16)*x1^3*l^3"]);
        assert_eq!(l, expected);
        assert!(alg.mul(&l.adjoint(), &l).unwrap().try_eq(&s).unwrap());
    }

    #[test]
    fn factorization_of_exact_square() {
        let alg = moyal(CoeffKind::Polynomial, 2);
        let l0 = mat(&alg, 2, &["1", "x1", "0", "1"]);
        let s = l0.adjoint().cauchy_mul(&l0).unwrap();
        assert_eq!(hermitian_factorization(&alg, &s, &l0).unwrap(), l0);
    }

    #[test]
    fn factorization_errors() {
        let alg = moyal(CoeffKind::Polynomial, 2);
        let s = mat(&alg, 1, &["1 + i*l"]);
        assert!(matches!(hermitian_factorization(&alg, &s, &mat(&alg, 1, &["1"])), Err(Error::NotHermitian(_))));
        let s = mat(&alg, 1, &["2"]);
        assert!(matches!(hermitian_factorization(&alg, &s, &mat(&alg, 1, &["1"])), Err(Error::Constraint(_))));
    }

    #[test]
    fn swap_unitary() {
        let alg = moyal(CoeffKind::Polynomial, 3);
        let u = deform_unitary(&alg, &mat(&alg, 2, &["0", "1", "1", "0"])).unwrap();
        let one = alg.unit(2);
        assert!(alg.mul(&u.adjoint(), &u).unwrap().try_eq(&one).unwrap());
        assert!(alg.mul(&u, &u.adjoint()).unwrap().try_eq(&one).unwrap());
        assert!(matches!(deform_unitary(&alg, &mat(&alg, 1, &["2"])), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn constant_projection_is_rigid() {
        let alg = moyal(CoeffKind::Polynomial, 3);
        let p0 = mat(&alg, 2, &["1", "0", "0", "0"]);
        assert_eq!(deform_projection_fedosov(&alg, &p0, true).unwrap(), p0);
        assert_eq!(deform_projection_recursive(&alg, &p0).unwrap(), p0);
        let u = idempotent_intertwiner(&alg, &p0, &p0).unwrap();
        assert_eq!(u, alg.unit(2));
    }

    #[test]
    fn rejects_non_idempotent() {
        let alg = moyal(CoeffKind::Polynomial, 1);
        let p0 = mat(&alg, 1, &["x1"]);
        assert!(matches!(deform_projection_fedosov(&alg, &p0, false), Err(Error::NotIdempotent(_))));
        assert!(matches!(deform_projection_recursive(&alg, &p0), Err(Error::NotIdempotent(_))));
    }

    #[test]
    fn series_inverse() {
        let alg = moyal(CoeffKind::Polynomial, 3);
        let a = mat(&alg, 2, &["1 + l*x1", "x2", "l*x1*x2", "1"]);
        let g = mat_series_inverse(&alg, &a).unwrap();
        assert!(alg.mul(&a, &g).unwrap().try_eq(&alg.unit(2)).unwrap());
        assert!(alg.mul(&g, &a).unwrap().try_eq(&alg.unit(2)).unwrap());
        let singular = mat(&alg, 2, &["x1", "x1", "1", "1"]);
        assert_eq!(mat_series_inverse(&alg, &singular).unwrap_err(), Error::NotInvertible);
    }
}
