//! Equivalence transformations `T = id + sum_r T_r l^r` and the products
//! they transport.

use std::collections::BTreeMap;

use super::{StarAlgebra, StarProduct};
use crate::coeff::{CoeffRing, Coefficient, Monomial};
use crate::error::{Error, Result};
use crate::series::FormalSeries;

/// A finite differential operator `sum_k a_k d^{alpha_k}` with coefficients
/// in the coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOperator {
    terms: Vec<(Coefficient, Monomial)>,
}

impl DiffOperator {
    /// Merges repeated multi-indices and drops vanishing terms.
    pub fn new(terms: impl IntoIterator<Item = (Coefficient, Monomial)>) -> Result<Self> {
        let mut acc: BTreeMap<Monomial, Coefficient> = BTreeMap::new();
        for (c, a) in terms {
            match acc.remove(&a) {
                Some(prev) => {
                    acc.insert(a, prev.try_add(&c)?);
                }
                None => {
                    acc.insert(a, c);
                }
            }
        }
        Ok(Self { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(a, c)| (c, a)).collect() })
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn identity(ring: CoeffRing) -> Self {
        Self { terms: vec![(ring.one(), Monomial::one())] }
    }

    /// `sum_k d_k^2` in the first `n` variables.
    pub fn laplacian(ring: CoeffRing) -> Self {
        let terms = (0..ring.nvars)
            .map(|k| {
                let mut m = Monomial::one();
                m.0[k] = 2;
                (ring.one(), m)
            })
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[(Coefficient, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.terms.as_slice(), [(c, a)] if a.is_one() && c.is_one())
    }

    pub fn apply(&self, f: &Coefficient) -> Result<Coefficient> {
        let mut acc = f.ring().zero();
        for (c, a) in &self.terms {
            let d = f.derivative_multi(a)?;
            if !d.is_zero() {
                acc = acc.try_add(&c.try_mul(&d)?)?;
            }
        }
        Ok(acc)
    }
}

/// `T = sum_r T_r l^r` with `T_0 = id`.
#[derive(Clone, Debug)]
pub struct EquivalenceTransform {
    ring: CoeffRing,
    order: usize,
    // ops[r] is T_r; ops[0] is the identity.
    ops: Vec<DiffOperator>,
}

impl EquivalenceTransform {
    /// Builds `T` from `T_1, ..., T_k`; missing higher orders are zero.
    pub fn new(ring: CoeffRing, order: usize, higher: Vec<DiffOperator>) -> Self {
        let mut ops = Vec::with_capacity(order + 1);
        ops.push(DiffOperator::identity(ring));
        ops.extend(higher.into_iter().take(order));
        ops.resize(order + 1, DiffOperator::zero());
        Self { ring, order, ops }
    }

    /// Builds `T` from the full list `T_0, ..., T_k`, rejecting a classical
    /// part other than the identity.
    pub fn from_operators(ring: CoeffRing, order: usize, mut ops: Vec<DiffOperator>) -> Result<Self> {
        match ops.first() {
            Some(t0) if t0.is_identity() => {}
            _ => return Err(Error::NotIdentityClassical),
        }
        let higher = ops.split_off(1);
        Ok(Self::new(ring, order, higher))
    }

    pub fn identity(ring: CoeffRing, order: usize) -> Self {
        Self::new(ring, order, Vec::new())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn operator(&self, r: usize) -> Option<&DiffOperator> {
        self.ops.get(r)
    }

    fn check(&self, f: &FormalSeries) -> Result<()> {
        if f.order() != self.order {
            return Err(Error::OrderMismatch(f.order(), self.order));
        }
        if f.ring().nvars != self.ring.nvars {
            return Err(Error::VariableMismatch(f.ring().nvars, self.ring.nvars));
        }
        Ok(())
    }

    /// `(T f)_r = sum_k T_k f_{r-k}`.
    pub fn apply(&self, f: &FormalSeries) -> Result<FormalSeries> {
        self.check(f)?;
        let coeffs = (0..=self.order)
            .map(|r| {
                let mut acc = f.coeff(r).clone();
                for k in 1..=r {
                    if !self.ops[k].is_zero() {
                        acc = acc.try_add(&self.ops[k].apply(f.coeff(r - k))?)?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        FormalSeries::from_coeffs(coeffs)
    }

    /// `T^{-1} g` by order recursion: `f_r = g_r - sum_{k>=1} T_k f_{r-k}`.
    pub fn apply_inverse(&self, g: &FormalSeries) -> Result<FormalSeries> {
        self.check(g)?;
        let mut out: Vec<Coefficient> = Vec::with_capacity(self.order + 1);
        for r in 0..=self.order {
            let mut acc = g.coeff(r).clone();
            for k in 1..=r {
                if !self.ops[k].is_zero() {
                    acc = acc.try_sub(&self.ops[k].apply(&out[r - k])?)?;
                }
            }
            out.push(acc);
        }
        FormalSeries::from_coeffs(out)
    }
}

/// The pulled-back product `f *_1 g = T^{-1}(T f *_2 T g)`.
#[derive(Clone, Debug)]
pub struct TransportedProduct {
    pub transform: EquivalenceTransform,
    pub base: StarAlgebra,
}

impl TransportedProduct {
    pub fn new(transform: EquivalenceTransform, base: StarAlgebra) -> Result<Self> {
        if transform.order != base.order() {
            return Err(Error::OrderMismatch(transform.order, base.order()));
        }
        if transform.ring.nvars != base.ring().nvars {
            return Err(Error::VariableMismatch(transform.ring.nvars, base.ring().nvars));
        }
        Ok(Self { transform, base })
    }
}

impl StarProduct for TransportedProduct {
    fn ring(&self) -> CoeffRing {
        self.base.ring()
    }

    fn order(&self) -> usize {
        self.base.order()
    }

    fn star(&self, f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
        let tf = self.transform.apply(f)?;
        let tg = self.transform.apply(g)?;
        self.transform.apply_inverse(&self.base.star_mul(&tf, &tg)?)
    }
}

/// `f *_1 g` for the product transported along `T` from `alg2`.
pub fn apply_equivalence(t: &EquivalenceTransform, alg2: &StarAlgebra, f: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
    TransportedProduct::new(t.clone(), alg2.clone())?.star(f, g)
}
