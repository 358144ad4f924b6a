//! Validity checkers for star products. Each sample is compared exactly,
//! order by order; failures are reported, never raised.

use serde::Serialize;

use super::{StarAlgebra, StarProduct};
use crate::error::Result;
use crate::par;
use crate::report::{CheckReport, Finding};
use crate::series::FormalSeries;

/// `(f*g)*h = f*(g*h)` on every sample triple.
pub fn check_associativity<P: StarProduct>(
    alg: &P,
    samples: &[(FormalSeries, FormalSeries, FormalSeries)],
) -> Result<CheckReport> {
    let outcomes = par::try_map_range(samples.len(), |k| {
        let (f, g, h) = &samples[k];
        let lhs = alg.star(&alg.star(f, g)?, h)?;
        let rhs = alg.star(f, &alg.star(g, h)?)?;
        Ok(lhs.first_difference(&rhs)?.map(|r| Finding::at(k, r)))
    })?;
    Ok(CheckReport::from_findings("associativity", samples.len(), outcomes))
}

/// `conj(f*g) = conj(g)*conj(f)` on every sample pair.
pub fn check_hermitian<P: StarProduct>(alg: &P, samples: &[(FormalSeries, FormalSeries)]) -> Result<CheckReport> {
    let outcomes = par::try_map_range(samples.len(), |k| {
        let (f, g) = &samples[k];
        let lhs = alg.star(f, g)?.conj();
        let rhs = alg.star(&g.conj(), &f.conj())?;
        Ok(lhs.first_difference(&rhs)?.map(|r| Finding::at(k, r)))
    })?;
    Ok(CheckReport::from_findings("hermitian", samples.len(), outcomes))
}

/// `1*f = f*1 = f` on every sample.
pub fn check_unit<P: StarProduct>(alg: &P, samples: &[FormalSeries]) -> Result<CheckReport> {
    let one = FormalSeries::one(alg.ring(), alg.order());
    let outcomes = par::try_map_range(samples.len(), |k| {
        let f = &samples[k];
        let left = alg.star(&one, f)?.first_difference(f)?;
        let right = alg.star(f, &one)?.first_difference(f)?;
        Ok(match (left, right) {
            (None, None) => None,
            (a, b) => Some(Finding::at(k, a.into_iter().chain(b).min().unwrap_or(0)).with_location(if a.is_some() { "left" } else { "right" })),
        })
    })?;
    Ok(CheckReport::from_findings("unit", samples.len(), outcomes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VeyLevel {
    pub r: usize,
    pub left_order: u32,
    pub right_order: u32,
    pub declared: Option<u32>,
    /// Both orders are at most `r`.
    pub within_bound: bool,
    /// The measured order matches the declared one (when declared).
    pub matches_declared: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VeyReport {
    pub levels: Vec<VeyLevel>,
}

impl VeyReport {
    /// Every `C_r` is differential of order at most `r` in each argument.
    pub fn is_vey(&self) -> bool {
        self.levels.iter().all(|l| l.within_bound)
    }

    pub fn declared_consistent(&self) -> bool {
        self.levels.iter().all(|l| l.matches_declared)
    }

    pub fn to_check(&self) -> CheckReport {
        let mut rep = CheckReport::new("vey", self.levels.len());
        for l in &self.levels {
            if !l.within_bound || !l.matches_declared {
                rep.push(Finding::at(l.r, l.r).with_message(format!(
                    "C_{} has orders ({}, {}), declared {:?}",
                    l.r, l.left_order, l.right_order, l.declared
                )));
            }
        }
        rep
    }
}

/// Measures the derivative order of each `C_r` in each argument.
pub fn check_vey(alg: &StarAlgebra) -> VeyReport {
    let stack = alg.stack();
    let levels = (0..=alg.order())
        .map(|r| {
            let (left_order, right_order) = stack.cochain(r).map(|c| c.orders()).unwrap_or((0, 0));
            let declared = stack.vey_orders.get(r).copied();
            let zero = stack.cochain(r).map(|c| c.is_zero()).unwrap_or(true);
            VeyLevel {
                r,
                left_order,
                right_order,
                declared,
                within_bound: left_order as usize <= r && right_order as usize <= r,
                // A vanishing level is consistent with any declaration.
                matches_declared: zero || declared.map(|d| d == left_order.max(right_order)).unwrap_or(true),
            }
        })
        .collect();
    VeyReport { levels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoeffKind, CoeffRing, GaussianRational, Monomial};
    use crate::parse::parse_series;
    use crate::star::{standard_theta, Cochain, CochainStack, CochainTerm};

    fn series(alg: &StarAlgebra, src: &str) -> FormalSeries {
        parse_series(src, alg.ring(), alg.order()).unwrap()
    }

    fn symmetric_stack() -> StarAlgebra {
        // C_1 = d_x (x) d_x: a symmetric biderivation.
        let c1 = Cochain::new([CochainTerm { weight: GaussianRational::one(), left: Monomial::var(0), right: Monomial::var(0) }]);
        let stack = CochainStack { dim: 2, cochains: vec![Cochain::pointwise(), c1], hermitian: false, vey_orders: vec![0, 1] };
        StarAlgebra::new(CoeffRing::polynomial(2), stack, 3).unwrap()
    }

    #[test]
    fn moyal_passes() {
        let alg = StarAlgebra::moyal(1, &standard_theta(1), CoeffKind::Polynomial, 4).unwrap();
        let (x, p, xxp) = (series(&alg, "x1"), series(&alg, "x2"), series(&alg, "x1^2*x2"));
        assert!(check_associativity(&alg, &[(x.clone(), p.clone(), xxp.clone())]).unwrap().passed());
        assert!(check_hermitian(&alg, &[(x.clone(), p.clone()), (xxp.clone(), x.clone())]).unwrap().passed());
        assert!(check_unit(&alg, &[xxp]).unwrap().passed());
        let vey = check_vey(&alg);
        assert!(vey.is_vey() && vey.declared_consistent());
        assert_eq!(vey.levels[0].left_order, 0);
        assert!(vey.levels.iter().all(|l| l.left_order as usize == l.r && l.right_order as usize == l.r));
    }

    #[test]
    fn symmetric_biderivation_control() {
        // On (x, x, x p) the second-order defect f_xx g_x h_x - f_x g_x h_xx
        // vanishes; on (x^2, x, x) it equals 2.
        let alg = symmetric_stack();
        let pass = (series(&alg, "x1"), series(&alg, "x1"), series(&alg, "x1*x2"));
        assert!(check_associativity(&alg, &[pass]).unwrap().passed());
        let fail = (series(&alg, "x1^2"), series(&alg, "x1"), series(&alg, "x1"));
        let rep = check_associativity(&alg, &[fail]).unwrap();
        assert_eq!(rep.first_failing_order(), Some(2));
        // Real weights and a symmetric cochain: conj(f*g) = conj(g)*conj(f) holds.
        assert!(check_hermitian(&alg, &[(series(&alg, "i*x1"), series(&alg, "x1^2"))]).unwrap().passed());
    }

    #[test]
    fn non_vey_flagged() {
        let c2 = Cochain::new([CochainTerm {
            weight: GaussianRational::one(),
            left: Monomial::from_slice(&[3, 0]),
            right: Monomial::var(1),
        }]);
        let stack = CochainStack { dim: 2, cochains: vec![Cochain::pointwise(), Cochain::default(), c2], hermitian: false, vey_orders: vec![0, 1, 2] };
        let alg = StarAlgebra::new(CoeffRing::polynomial(2), stack, 2).unwrap();
        let rep = check_vey(&alg);
        assert!(!rep.is_vey());
        assert_eq!(rep.levels[2].left_order, 3);
        assert!(!rep.to_check().passed());
    }

    #[test]
    fn non_hermitian_detected() {
        // Real weight on a skew cochain breaks the involution property.
        let c1 = Cochain::new([
            CochainTerm { weight: GaussianRational::one(), left: Monomial::var(0), right: Monomial::var(1) },
            CochainTerm { weight: -GaussianRational::one(), left: Monomial::var(1), right: Monomial::var(0) },
        ]);
        let stack = CochainStack { dim: 2, cochains: vec![Cochain::pointwise(), c1], hermitian: false, vey_orders: vec![0, 1] };
        let alg = StarAlgebra::new(CoeffRing::polynomial(2), stack, 2).unwrap();
        let rep = check_hermitian(&alg, &[(series(&alg, "x1"), series(&alg, "x2"))]).unwrap();
        assert_eq!(rep.first_failing_order(), Some(1));
    }
}
