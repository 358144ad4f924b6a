//! Strongly full projections, Theta operators and the identities behind the
//! equivalence bimodule structure of `P0 A^n`.

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::matrix::StarMatrix;
use crate::module::DeformedModule;
use crate::report::{CheckReport, Finding};
use crate::series::FormalSeries;
use crate::star::{binomial_half_inverse, StarAlgebra};

/// `<x, y> = sum_i x_i^* * y_i`.
pub fn canonical_inner(alg: &StarAlgebra, x: &StarMatrix, y: &StarMatrix) -> Result<FormalSeries> {
    check_columns(x, y)?;
    Ok(x.adjoint().star_mul(alg, y)?.get(0, 0).clone())
}

/// `<x, y>` with the pointwise product.
pub fn canonical_inner_classical(x: &StarMatrix, y: &StarMatrix) -> Result<FormalSeries> {
    check_columns(x, y)?;
    Ok(x.adjoint().cauchy_mul(y)?.get(0, 0).clone())
}

fn check_columns(x: &StarMatrix, y: &StarMatrix) -> Result<()> {
    if x.cols() != 1 || y.cols() != 1 || x.rows() != y.rows() {
        return Err(Error::Dimension(format!("inner product of {}x{} and {}x{}", x.rows(), x.cols(), y.rows(), y.cols())));
    }
    if x.order() != y.order() {
        return Err(Error::OrderMismatch(x.order(), y.order()));
    }
    Ok(())
}

/// A witness `tau` for `tau^* * Str(P) * tau = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FullnessWitness {
    pub tau: FormalSeries,
}

impl FullnessWitness {
    pub fn new(tau: FormalSeries) -> Result<Self> {
        if tau.classical_part().is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(Self { tau })
    }
}

fn residual_report(name: &str, residual: &FormalSeries) -> CheckReport {
    let mut report = CheckReport::new(name, 1);
    if let Some(k) = residual.valuation() {
        report.push(Finding::at(0, k).with_message(format!("residual {}", residual.coeff(k))));
    }
    report
}

/// Checks `tr P0 * tau tau^* = 1` pointwise.
pub fn verify_strongly_full_classical(p0: &StarMatrix, tau: &Coefficient) -> Result<CheckReport> {
    let tr = p0.classical_part().trace()?;
    let lhs = tr.try_mul(&tau.try_mul(&tau.conj())?)?;
    let residual = FormalSeries::constant(lhs.try_sub(&tr.ring().one())?, 0);
    Ok(residual_report("strong_fullness", &residual))
}

/// Checks `tau^* * Str(P) * tau = 1` to the truncation order.
pub fn verify_strongly_full(alg: &StarAlgebra, p: &StarMatrix, witness: &FullnessWitness) -> Result<CheckReport> {
    let s = p.star_trace()?;
    let lhs = alg.star_mul(&alg.star_mul(&witness.tau.conj(), &s)?, &witness.tau)?;
    Ok(residual_report("strong_fullness", &lhs.try_sub(&alg.one())?))
}

/// Deforms a classical witness: with `M = tau0^* * Str(P) * tau0 = 1 + B`,
/// `tau = tau0 * (1 + B)^{-1/2}` satisfies the deformed identity.
pub fn deform_full_witness(dm: &DeformedModule, tau0: &Coefficient) -> Result<FullnessWitness> {
    if !verify_strongly_full_classical(dm.p0(), tau0)?.passed() {
        return Err(Error::Constraint("classical witness does not satisfy tr P0 tau tau^* = 1".into()));
    }
    let alg = dm.alg();
    let t0 = FormalSeries::constant(tau0.clone(), alg.order());
    let m = alg.star_mul(&alg.star_mul(&t0.conj(), &dm.p().star_trace()?)?, &t0)?;
    let b = m.try_sub(&alg.one())?;
    let tau = alg.star_mul(&t0, &binomial_half_inverse(alg, &b)?)?;
    FullnessWitness::new(tau)
}

/// A right module with an algebra-valued inner product, in which the
/// Morita identities are evaluated.
pub trait InnerProductModule {
    fn act(&self, x: &StarMatrix, a: &FormalSeries) -> Result<StarMatrix>;
    fn inner(&self, x: &StarMatrix, y: &StarMatrix) -> Result<FormalSeries>;
    fn mul(&self, a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries>;
    fn one(&self) -> FormalSeries;
    /// Generators `u_i` with `sum_i <u_i, u_i> = Str(P)`.
    fn generators(&self) -> Result<Vec<StarMatrix>>;

    /// `Theta_{x,y} z = x . <y, z>`.
    fn theta(&self, x: &StarMatrix, y: &StarMatrix, z: &StarMatrix) -> Result<StarMatrix> {
        self.act(x, &self.inner(y, z)?)
    }
}

/// `P0 A^n` with pointwise products.
pub struct ClassicalModule {
    p0: StarMatrix,
}

impl ClassicalModule {
    pub fn new(p0: &StarMatrix) -> Self {
        Self { p0: p0.classical_part() }
    }
}

impl InnerProductModule for ClassicalModule {
    fn act(&self, x: &StarMatrix, a: &FormalSeries) -> Result<StarMatrix> {
        x.map_entries(|e| e.try_cauchy_mul(a))
    }

    fn inner(&self, x: &StarMatrix, y: &StarMatrix) -> Result<FormalSeries> {
        canonical_inner_classical(x, y)
    }

    fn mul(&self, a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries> {
        a.try_cauchy_mul(b)
    }

    fn one(&self) -> FormalSeries {
        FormalSeries::one(self.p0.ring(), self.p0.order())
    }

    fn generators(&self) -> Result<Vec<StarMatrix>> {
        Ok((0..self.p0.rows()).map(|j| self.p0.column(j)).collect())
    }
}

impl InnerProductModule for DeformedModule {
    fn act(&self, x: &StarMatrix, a: &FormalSeries) -> Result<StarMatrix> {
        self.action(x, a)
    }

    fn inner(&self, x: &StarMatrix, y: &StarMatrix) -> Result<FormalSeries> {
        self.metric(x, y)
    }

    fn mul(&self, a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries> {
        self.alg().star_mul(a, b)
    }

    fn one(&self) -> FormalSeries {
        self.alg().one()
    }

    /// `u_i = I^{-1}(P * e_i)`, so that `<u_i, u_i> = P_ii`.
    fn generators(&self) -> Result<Vec<StarMatrix>> {
        let ring = self.alg().ring();
        (0..self.n())
            .map(|i| self.unembed(&self.p().star_mul(self.alg(), &StarMatrix::basis_column(ring, self.alg().order(), self.n(), i))?))
            .collect()
    }
}

/// Checks
/// `NiceII: sum_i <u_i tau, u_i tau> = 1` and
/// `NiceI: sum_i Theta_{x, u_i tau} Theta_{u_i tau, y} = Theta_{x,y}`,
/// the latter on every generator.
pub fn verify_nice_identities<M: InnerProductModule>(
    m: &M,
    tau: &FormalSeries,
    x: &StarMatrix,
    y: &StarMatrix,
) -> Result<Vec<CheckReport>> {
    let gens = m.generators()?;
    let scaled: Vec<StarMatrix> = gens.iter().map(|u| m.act(u, tau)).collect::<Result<_>>()?;
    let mut sum = m.one().try_sub(&m.one())?;
    for w in &scaled {
        sum = sum.try_add(&m.inner(w, w)?)?;
    }
    let nice2 = residual_report("nice_identities/NiceII", &sum.try_sub(&m.one())?);

    let mut nice1 = CheckReport::new("nice_identities/NiceI", gens.len());
    for (j, z) in gens.iter().enumerate() {
        let rhs = m.theta(x, y, z)?;
        let mut lhs = rhs.try_sub(&rhs)?;
        for w in &scaled {
            lhs = lhs.try_add(&m.theta(x, w, &m.theta(w, y, z)?)?)?;
        }
        if let Some(d) = lhs.first_difference(&rhs)? {
            nice1.push(Finding::at(j, d.order).with_location(format!("basis {j}, component {}", d.row)));
        }
    }
    Ok(vec![nice2, nice1])
}

/// Checks `<Theta_{x,y} z, w> = <z, Theta_{y,x} w>`.
pub fn theta_adjointability<M: InnerProductModule>(
    m: &M,
    x: &StarMatrix,
    y: &StarMatrix,
    z: &StarMatrix,
    w: &StarMatrix,
) -> Result<CheckReport> {
    let lhs = m.inner(&m.theta(x, y, z)?, w)?;
    let rhs = m.inner(z, &m.theta(y, x, w)?)?;
    let mut report = CheckReport::new("theta_adjoint", 1);
    if let Some(k) = lhs.first_difference(&rhs)? {
        report.push(Finding::at(0, k));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::moyal_plane;

    fn diag(alg: &StarAlgebra, a: i64, b: i64) -> StarMatrix {
        let r = alg.ring();
        StarMatrix::from_classical(2, 2, vec![r.int(a), r.int(0), r.int(0), r.int(b)], alg.order()).unwrap()
    }

    #[test]
    fn inner_product_basics() {
        let alg = moyal_plane(2).unwrap();
        let e1 = StarMatrix::basis_column(alg.ring(), 2, 2, 0);
        assert!(canonical_inner(&alg, &e1, &e1).unwrap().try_eq(&alg.one()).unwrap());
        let short = StarMatrix::basis_column(alg.ring(), 2, 1, 0);
        assert!(canonical_inner(&alg, &e1, &short).is_err());
    }

    #[test]
    fn fullness_of_constant_projections() {
        let alg = moyal_plane(2).unwrap();
        let one = alg.ring().one();
        assert!(verify_strongly_full_classical(&diag(&alg, 1, 0), &one).unwrap().passed());
        let report = verify_strongly_full_classical(&diag(&alg, 1, 1), &one).unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures[0].message.as_deref(), Some("residual 1"));

        let dm = DeformedModule::fedosov(&alg, &diag(&alg, 1, 0)).unwrap();
        let w = deform_full_witness(&dm, &one).unwrap();
        assert!(w.tau.try_eq(&alg.one()).unwrap());
        assert!(verify_strongly_full(&alg, dm.p(), &w).unwrap().passed());
        let bad = DeformedModule::fedosov(&alg, &diag(&alg, 1, 1)).unwrap();
        assert!(deform_full_witness(&bad, &one).is_err());
    }

    #[test]
    fn constant_nice_identities() {
        let alg = moyal_plane(2).unwrap();
        let p0 = diag(&alg, 1, 0);
        let x = p0.column(0);
        let cm = ClassicalModule::new(&p0);
        let reports = verify_nice_identities(&cm, &alg.one(), &x, &x).unwrap();
        assert!(reports.iter().all(|r| r.passed()));
        let z = StarMatrix::zero(alg.ring(), 2, 2, 1);
        assert!(theta_adjointability(&cm, &x, &x, &z, &x).unwrap().passed());
    }
}
