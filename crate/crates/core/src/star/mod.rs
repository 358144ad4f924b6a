//! Formal deformations given by stacks of bidifferential cochains.
//!
//! A product is `f * g = sum_r C_r(f, g) l^r` where every `C_r` is a finite
//! sum `sum w (d^a f)(d^b g)` with exact weights. Keeping the cochains in
//! this extensional form makes their differential order inspectable.

mod calculus;
mod checks;
mod equivalence;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

pub use calculus::{binomial_half_inverse, binomial_minus_half, star_inverse, StarElement};
pub use checks::{check_associativity, check_hermitian, check_unit, check_vey, VeyLevel, VeyReport};
pub use equivalence::{apply_equivalence, DiffOperator, EquivalenceTransform, TransportedProduct};

use crate::coeff::{CoeffRing, Coefficient, GaussianRational, Monomial};
use crate::error::{Error, Result};
use crate::series::FormalSeries;

/// One term `weight * (d^left f) (d^right g)` of a bidifferential cochain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainTerm {
    pub weight: GaussianRational,
    pub left: Monomial,
    pub right: Monomial,
}

/// A bidifferential cochain; terms are merged by multi-index pair and
/// zero weights dropped.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cochain {
    terms: Vec<CochainTerm>,
}

impl Cochain {
    pub fn new(terms: impl IntoIterator<Item = CochainTerm>) -> Self {
        let mut merged: BTreeMap<(Monomial, Monomial), GaussianRational> = BTreeMap::new();
        for t in terms {
            *merged.entry((t.left, t.right)).or_default() += &t.weight;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|((left, right), weight)| CochainTerm { weight, left, right })
            .collect();
        Self { terms }
    }

    pub fn pointwise() -> Self {
        Self::new([CochainTerm { weight: GaussianRational::one(), left: Monomial::one(), right: Monomial::one() }])
    }

    pub fn terms(&self) -> &[CochainTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum derivative order in the left and right argument.
    pub fn orders(&self) -> (u32, u32) {
        let l = self.terms.iter().map(|t| t.left.degree()).max().unwrap_or(0);
        let r = self.terms.iter().map(|t| t.right.degree()).max().unwrap_or(0);
        (l, r)
    }

    /// `C(g, f)` as a cochain in `(f, g)`.
    pub fn transpose(&self) -> Cochain {
        Cochain::new(self.terms.iter().map(|t| CochainTerm { weight: t.weight.clone(), left: t.right, right: t.left }))
    }

    pub fn is_skew(&self) -> bool {
        let neg = Cochain::new(self.transpose().terms.into_iter().map(|t| CochainTerm { weight: -t.weight, ..t }));
        neg == *self
    }

    /// Evaluates `C(f, g)` on classical elements.
    pub fn apply(&self, f: &Coefficient, g: &Coefficient) -> Result<Coefficient> {
        let mut acc = f.ring().zero();
        for t in &self.terms {
            let df = f.derivative_multi(&t.left)?;
            if df.is_zero() {
                continue;
            }
            let dg = g.derivative_multi(&t.right)?;
            if dg.is_zero() {
                continue;
            }
            acc = acc.try_add(&df.try_mul(&dg)?.scale(&t.weight))?;
        }
        Ok(acc)
    }
}

/// The cochains `C_0..C_N` of a formal deformation plus metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainStack {
    pub dim: usize,
    /// `cochains[r]` is `C_r`; missing levels are zero.
    pub cochains: Vec<Cochain>,
    pub hermitian: bool,
    /// Declared differential order of each `C_r` in each argument.
    pub vey_orders: Vec<u32>,
}

impl CochainStack {
    pub fn cochain(&self, r: usize) -> Option<&Cochain> {
        self.cochains.get(r)
    }
}

/// Common interface of star products on `A[[l]]`, so validity checkers run
/// against cochain stacks and transported products alike.
pub trait StarProduct: Sync {
    fn ring(&self) -> CoeffRing;
    fn order(&self) -> usize;
    fn star(&self, f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries>;
}

/// A deformed algebra `(A[[l]], *)` truncated at order `N`.
#[derive(Clone, Debug)]
pub struct StarAlgebra {
    ring: CoeffRing,
    stack: CochainStack,
    order: usize,
    left_indices: Vec<Monomial>,
    right_indices: Vec<Monomial>,
}

impl StarAlgebra {
    pub fn new(ring: CoeffRing, stack: CochainStack, order: usize) -> Result<Self> {
        if stack.dim != ring.nvars {
            return Err(Error::VariableMismatch(stack.dim, ring.nvars));
        }
        match stack.cochains.first() {
            Some(c0) if *c0 == Cochain::pointwise() => {}
            _ => return Err(Error::InvalidStack("C_0 must be the pointwise product".into())),
        }
        for (r, c) in stack.cochains.iter().enumerate().skip(1) {
            for t in c.terms() {
                if t.left.is_one() || t.right.is_one() {
                    return Err(Error::InvalidStack(format!("C_{r} does not annihilate the unit")));
                }
                if t.left.0[ring.nvars..].iter().chain(&t.right.0[ring.nvars..]).any(|&e| e != 0) {
                    return Err(Error::InvalidStack(format!("C_{r} differentiates an unknown variable")));
                }
            }
        }
        let collect = |side: fn(&CochainTerm) -> Monomial| {
            let mut set: Vec<Monomial> = stack
                .cochains
                .iter()
                .take(order + 1)
                .flat_map(|c| c.terms().iter().map(side))
                .collect();
            set.sort();
            set.dedup();
            set
        };
        let left_indices = collect(|t| t.left);
        let right_indices = collect(|t| t.right);
        Ok(Self { ring, stack, order, left_indices, right_indices })
    }

    /// The Moyal-Weyl product for a constant antisymmetric Poisson tensor,
    /// `C_r(f,g) = (1/r!) (i/2)^r theta^{i1 j1}..theta^{ir jr} (d_I f)(d_J g)`.
    pub fn moyal(n: usize, theta: &[Vec<BigRational>], kind: crate::coeff::CoeffKind, order: usize) -> Result<Self> {
        let dim = 2 * n;
        let ring = CoeffRing::new(dim, kind)?;
        Self::new(ring, moyal_stack(n, theta, order)?, order)
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stack(&self) -> &CochainStack {
        &self.stack
    }

    /// `C_r`, or `None` if the stack is zero at that level.
    pub fn cochain(&self, r: usize) -> Option<&Cochain> {
        self.stack.cochain(r).filter(|c| !c.is_zero())
    }

    pub fn is_hermitian(&self) -> bool {
        self.stack.hermitian
    }

    /// True when every `C_r` with `r >= 1` vanishes.
    pub fn is_undeformed(&self) -> bool {
        self.stack.cochains.iter().skip(1).take(self.order).all(|c| c.is_zero())
    }

    /// Same product at another truncation order.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        Self::new(self.ring, self.stack.clone(), order)
    }

    pub fn zero(&self) -> FormalSeries {
        FormalSeries::zero(self.ring, self.order)
    }

    pub fn one(&self) -> FormalSeries {
        FormalSeries::one(self.ring, self.order)
    }

    pub fn constant(&self, c: Coefficient) -> FormalSeries {
        FormalSeries::constant(c, self.order)
    }

    pub(crate) fn check_series(&self, f: &FormalSeries) -> Result<()> {
        if f.order() != self.order {
            return Err(Error::OrderMismatch(f.order(), self.order));
        }
        if f.ring().nvars != self.ring.nvars {
            return Err(Error::VariableMismatch(f.ring().nvars, self.ring.nvars));
        }
        Ok(())
    }

    pub fn jets_left(&self, f: &FormalSeries) -> Result<Jets> {
        Jets::new(f, &self.left_indices)
    }

    pub fn jets_right(&self, f: &FormalSeries) -> Result<Jets> {
        Jets::new(f, &self.right_indices)
    }

    /// `(f * g)_r` from precomputed jets.
    pub(crate) fn product_coeff(&self, fj: &Jets, gj: &Jets, r: usize) -> Result<Coefficient> {
        let mut acc = self.ring.zero();
        for u in 0..=r {
            let Some(c) = self.cochain(u) else { continue };
            for s in 0..=(r - u) {
                let t = r - u - s;
                for term in c.terms() {
                    let Some(df) = fj.get(s, &term.left) else { continue };
                    let Some(dg) = gj.get(t, &term.right) else { continue };
                    acc = acc.add_unreduced(&df.try_mul(dg)?.scale(&term.weight))?;
                }
            }
        }
        Ok(acc.reduced())
    }

    /// `C_u(f, g)` on classical elements.
    pub fn apply_cochain(&self, u: usize, f: &Coefficient, g: &Coefficient) -> Result<Coefficient> {
        match self.cochain(u) {
            Some(c) => c.apply(f, g),
            None => Ok(self.ring.zero()),
        }
    }

    /// The star product `(f * g)_r = sum_{s+t+u=r} C_u(f_s, g_t)`.
    pub fn star_mul(&self, f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
        self.check_series(f)?;
        self.check_series(g)?;
        let fj = self.jets_left(f)?;
        let gj = self.jets_right(g)?;
        let coeffs = (0..=self.order).map(|r| self.product_coeff(&fj, &gj, r)).collect::<Result<Vec<_>>>()?;
        FormalSeries::from_coeffs(coeffs)
    }
}

impl StarProduct for StarAlgebra {
    fn ring(&self) -> CoeffRing {
        self.ring
    }

    fn order(&self) -> usize {
        self.order
    }

    fn star(&self, f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
        self.star_mul(f, g)
    }
}

/// Precomputed partial derivatives `d^a f_s` of every coefficient of a
/// series, for a fixed set of multi-indices. Zero derivatives are omitted.
#[derive(Clone, Debug)]
pub struct Jets {
    by_order: Vec<HashMap<Monomial, Coefficient>>,
}

impl Jets {
    pub fn new(f: &FormalSeries, indices: &[Monomial]) -> Result<Self> {
        let by_order = f.coeffs().iter().map(|c| derivative_table(c, indices)).collect::<Result<_>>()?;
        Ok(Self { by_order })
    }

    pub fn get(&self, s: usize, alpha: &Monomial) -> Option<&Coefficient> {
        self.by_order.get(s).and_then(|m| m.get(alpha))
    }
}

fn derivative_table(c: &Coefficient, indices: &[Monomial]) -> Result<HashMap<Monomial, Coefficient>> {
    let mut memo: HashMap<Monomial, Coefficient> = HashMap::new();
    if c.is_zero() {
        return Ok(memo);
    }
    memo.insert(Monomial::one(), c.clone());
    let mut zero_set: std::collections::HashSet<Monomial> = Default::default();
    let mut sorted: Vec<Monomial> = indices.to_vec();
    sorted.sort_by_key(|m| m.degree());
    fn compute(
        alpha: Monomial,
        memo: &mut HashMap<Monomial, Coefficient>,
        zero_set: &mut std::collections::HashSet<Monomial>,
    ) -> Result<bool> {
        if memo.contains_key(&alpha) {
            return Ok(true);
        }
        if zero_set.contains(&alpha) {
            return Ok(false);
        }
        let k = alpha.0.iter().position(|&e| e > 0).expect("nonzero multi-index");
        let mut prev = alpha;
        prev.0[k] -= 1;
        if !compute(prev, memo, zero_set)? {
            zero_set.insert(alpha);
            return Ok(false);
        }
        let d = memo[&prev].derivative(k)?;
        if d.is_zero() {
            zero_set.insert(alpha);
            Ok(false)
        } else {
            memo.insert(alpha, d);
            Ok(true)
        }
    }
    for a in sorted {
        compute(a, &mut memo, &mut zero_set)?;
    }
    let wanted: std::collections::HashSet<Monomial> = indices.iter().copied().collect();
    memo.retain(|k, _| wanted.contains(k));
    Ok(memo)
}

/// Builds the Moyal-Weyl cochain stack to order `order`.
pub fn moyal_stack(n: usize, theta: &[Vec<BigRational>], order: usize) -> Result<CochainStack> {
    let dim = 2 * n;
    if theta.len() != dim || theta.iter().any(|row| row.len() != dim) {
        return Err(Error::Dimension(format!("poisson tensor must be {dim}x{dim}")));
    }
    if (0..dim).any(|a| (0..dim).any(|b| theta[a][b] != -theta[b][a].clone())) {
        return Err(Error::NotAntisymmetric);
    }
    let pairs: Vec<(usize, usize, GaussianRational)> = (0..dim)
        .flat_map(|a| (0..dim).map(move |b| (a, b)))
        .filter(|&(a, b)| theta[a][b] != BigRational::from_integer(0.into()))
        .map(|(a, b)| (a, b, GaussianRational::real(theta[a][b].clone())))
        .collect();
    let half_i = GaussianRational::new(BigRational::from_integer(0.into()), BigRational::new(1.into(), 2.into()));
    let mut cochains = vec![Cochain::pointwise()];
    let mut factorial = BigInt::one();
    for r in 1..=order {
        factorial *= r;
        let prefactor = half_i.pow(r as u32).scale(&BigRational::new(1.into(), factorial.clone()));
        // Enumerate all r-tuples of nonzero tensor entries.
        let mut terms = Vec::new();
        let mut idx = vec![0usize; r];
        if !pairs.is_empty() {
            loop {
                let mut left = Monomial::one();
                let mut right = Monomial::one();
                let mut w = prefactor.clone();
                for &p in &idx {
                    let (a, b, ref t) = pairs[p];
                    left.0[a] += 1;
                    right.0[b] += 1;
                    w = &w * t;
                }
                terms.push(CochainTerm { weight: w, left, right });
                let mut k = 0;
                while k < r {
                    idx[k] += 1;
                    if idx[k] < pairs.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == r {
                    break;
                }
            }
        }
        cochains.push(Cochain::new(terms));
    }
    Ok(CochainStack { dim, cochains, hermitian: true, vey_orders: (0..=order as u32).collect() })
}

/// The standard symplectic tensor `((0, 1), (-1, 0))` on `R^{2n}` in the
/// variable order `(x1..xn, p1..pn)`.
pub fn standard_theta(n: usize) -> Vec<Vec<BigRational>> {
    let z = BigRational::from_integer(0.into());
    let mut t = vec![vec![z; 2 * n]; 2 * n];
    for k in 0..n {
        t[k][n + k] = BigRational::from_integer(1.into());
        t[n + k][k] = BigRational::from_integer((-1).into());
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffKind;
    use crate::parse::parse_series;

    fn moyal(order: usize) -> StarAlgebra {
        StarAlgebra::moyal(1, &standard_theta(1), CoeffKind::Polynomial, order).unwrap()
    }

    fn s(alg: &StarAlgebra, src: &str) -> FormalSeries {
        parse_series(src, alg.ring(), alg.order()).unwrap()
    }

    #[test]
    fn x_star_p() {
        let alg = moyal(3);
        let x = s(&alg, "x1");
        let p = s(&alg, "x2");
        assert_eq!(alg.star_mul(&x, &p).unwrap(), s(&alg, "x1*x2 + i/2*l"));
        let comm = alg.star_mul(&x, &p).unwrap().try_sub(&alg.star_mul(&p, &x).unwrap()).unwrap();
        assert_eq!(comm, s(&alg, "i*l"));
    }

    #[test]
    fn x_squared_star_p_squared() {
        let alg = moyal(3);
        let lhs = alg.star_mul(&s(&alg, "x1^2"), &s(&alg, "x2^2")).unwrap();
        assert_eq!(lhs, s(&alg, "x1^2*x2^2 + 2*i*x1*x2*l - 1/2*l^2"));
    }

    #[test]
    fn constants_multiply_pointwise() {
        let alg = moyal(3);
        assert_eq!(alg.star_mul(&s(&alg, "5"), &s(&alg, "7")).unwrap(), s(&alg, "35"));
    }

    #[test]
    fn zero_tensor_is_pointwise() {
        let z = BigRational::from_integer(0.into());
        let theta = vec![vec![z.clone(), z.clone()], vec![z.clone(), z]];
        let alg = StarAlgebra::moyal(1, &theta, CoeffKind::Polynomial, 3).unwrap();
        assert!(alg.is_undeformed());
        let f = s(&alg, "x1^2*x2 + x2");
        let g = s(&alg, "x1 - x2^3");
        assert_eq!(alg.star_mul(&f, &g).unwrap(), f.try_cauchy_mul(&g).unwrap());
    }

    #[test]
    fn non_antisymmetric_rejected() {
        let one = BigRational::from_integer(1.into());
        let theta = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
        assert_eq!(moyal_stack(1, &theta, 2).unwrap_err(), Error::NotAntisymmetric);
    }

    #[test]
    fn unit_annihilation_is_enforced() {
        let ring = CoeffRing::polynomial(2);
        let bad = Cochain::new([CochainTerm { weight: GaussianRational::one(), left: Monomial::one(), right: Monomial::var(0) }]);
        let stack = CochainStack { dim: 2, cochains: vec![Cochain::pointwise(), bad], hermitian: false, vey_orders: vec![0, 1] };
        assert!(matches!(StarAlgebra::new(ring, stack, 2), Err(Error::InvalidStack(_))));
    }

    #[test]
    fn moyal_first_cochain_is_skew() {
        let alg = moyal(2);
        assert!(alg.cochain(1).unwrap().is_skew());
        assert!(!alg.cochain(2).unwrap().is_skew());
    }
}
