//! First-order geometry of a deformation: the Poisson bracket, the module
//! bracket on `P0 A^n`, the Levi-Civita connection `P0 o d`, curvatures and
//! the fibred bracket on endomorphisms.
//!
//! Hamiltonian vector fields follow `X_f(h) = {h, f}`, the convention under
//! which `{x, f}_E = nabla_{X_f} x`. With it the module curvature is
//! `R_E(f, g) = -R(X_f, X_g) = R(X_g, X_f)`.

use crate::coeff::{CoeffRing, Coefficient, GaussianRational};
use crate::error::{Error, Result};
use crate::matrix::{MatrixAlgebra, StarMatrix};
use crate::module::DeformedModule;
use crate::star::{Cochain, StarAlgebra};

/// `1/i`, the normalisation making the bracket real.
fn minus_i() -> GaussianRational {
    -GaussianRational::i()
}

/// The bracket `{f, g} = (1/i)(C_1(f, g) - C_1(g, f))` of a deformation.
#[derive(Clone, Debug)]
pub struct PoissonData {
    ring: CoeffRing,
    c1: Cochain,
}

impl PoissonData {
    pub fn new(alg: &StarAlgebra) -> Self {
        Self { ring: alg.ring(), c1: alg.cochain(1).cloned().unwrap_or_default() }
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn is_skew(&self) -> bool {
        self.c1.is_skew()
    }

    pub fn bracket(&self, f: &Coefficient, g: &Coefficient) -> Result<Coefficient> {
        let fg = self.c1.apply(f, g)?;
        let gf = self.c1.apply(g, f)?;
        Ok(fg.try_sub(&gf)?.scale(&minus_i()))
    }

    /// `theta^{ab} = {x_a, x_b}`.
    pub fn tensor(&self) -> Result<Vec<Vec<Coefficient>>> {
        let n = self.ring.nvars;
        let vars: Vec<Coefficient> = (0..n).map(|k| self.ring.var(k)).collect::<Result<_>>()?;
        vars.iter().map(|a| vars.iter().map(|b| self.bracket(a, b)).collect()).collect()
    }

    /// `X_f` with components `{x_a, f}`.
    pub fn hamiltonian(&self, f: &Coefficient) -> Result<VectorField> {
        let comps = (0..self.ring.nvars).map(|k| self.bracket(&self.ring.var(k)?, f)).collect::<Result<_>>()?;
        Ok(VectorField { components: comps })
    }
}

pub fn poisson_bracket(alg: &StarAlgebra, f: &Coefficient, g: &Coefficient) -> Result<Coefficient> {
    PoissonData::new(alg).bracket(f, g)
}

/// A derivation `sum_a X^a d_a` with coefficient components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub components: Vec<Coefficient>,
}

impl VectorField {
    pub fn new(components: Vec<Coefficient>) -> Self {
        Self { components }
    }

    pub fn coordinate(ring: CoeffRing, k: usize) -> Result<Self> {
        if k >= ring.nvars {
            return Err(Error::UnknownVariable(k, ring.nvars));
        }
        Ok(Self { components: (0..ring.nvars).map(|j| ring.int(i64::from(j == k))).collect() })
    }

    pub fn apply(&self, f: &Coefficient) -> Result<Coefficient> {
        let mut acc = f.ring().zero();
        for (k, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.try_add(&c.try_mul(&f.derivative(k)?)?)?;
        }
        Ok(acc)
    }

    /// `[X, Y]^a = X(Y^a) - Y(X^a)`.
    pub fn commutator(&self, o: &VectorField) -> Result<VectorField> {
        let comps = self
            .components
            .iter()
            .zip(&o.components)
            .map(|(xa, ya)| self.apply(ya)?.try_sub(&o.apply(xa)?))
            .collect::<Result<_>>()?;
        Ok(VectorField { components: comps })
    }
}

/// The Grassmann connection `nabla = P0 o d` on the image of `P0`.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    p0: StarMatrix,
}

impl ConnectionData {
    pub fn new(p0: &StarMatrix) -> Result<Self> {
        if !p0.is_square() {
            return Err(Error::Dimension("projection must be square".into()));
        }
        Ok(Self { p0: p0.classical_part() })
    }

    pub fn p0(&self) -> &StarMatrix {
        &self.p0
    }

    /// Componentwise directional derivative `d_X x`.
    pub fn d(&self, x: &StarMatrix, v: &VectorField) -> Result<StarMatrix> {
        x.classical_part().map_entries(|e| Ok(crate::series::FormalSeries::constant(v.apply(e.classical_part())?, e.order())))
    }

    fn require_section(&self, x: &StarMatrix) -> Result<()> {
        let x0 = x.classical_part();
        if x0.cols() != 1 || x0.rows() != self.p0.rows() {
            return Err(Error::Dimension(format!("expected a {}x1 column", self.p0.rows())));
        }
        if !self.p0.cauchy_mul(&x0)?.try_eq(&x0)? {
            return Err(Error::Constraint("P0 x != x".into()));
        }
        Ok(())
    }

    pub fn covariant(&self, v: &VectorField, x: &StarMatrix) -> Result<StarMatrix> {
        self.require_section(x)?;
        self.p0.cauchy_mul(&self.d(x, v)?)
    }

    /// `R(X, Y) x = nabla_X nabla_Y x - nabla_Y nabla_X x - nabla_{[X,Y]} x`.
    pub fn curvature(&self, a: &VectorField, b: &VectorField, x: &StarMatrix) -> Result<StarMatrix> {
        let ab = self.covariant(a, &self.covariant(b, x)?)?;
        let ba = self.covariant(b, &self.covariant(a, x)?)?;
        let c = self.covariant(&a.commutator(b)?, x)?;
        ab.try_sub(&ba)?.try_sub(&c)
    }
}

pub fn levi_civita(cd: &ConnectionData, v: &VectorField, x: &StarMatrix) -> Result<StarMatrix> {
    cd.covariant(v, x)
}

pub fn connection_curvature(cd: &ConnectionData, a: &VectorField, b: &VectorField, x: &StarMatrix) -> Result<StarMatrix> {
    cd.curvature(a, b, x)
}

/// `{x, A}_E = P0 {x, A}` with the bracket taken componentwise.
pub fn module_bracket(dm: &DeformedModule, x: &StarMatrix, a: &Coefficient) -> Result<StarMatrix> {
    let pd = PoissonData::new(dm.alg());
    if !pd.is_skew() {
        return Err(Error::NotSkew);
    }
    bracket_with(&pd, dm.p0(), x, a)
}

fn bracket_with(pd: &PoissonData, p0: &StarMatrix, x: &StarMatrix, a: &Coefficient) -> Result<StarMatrix> {
    ConnectionData::new(p0)?.require_section(x)?;
    let raw = x.classical_part().map_entries(|e| Ok(crate::series::FormalSeries::constant(pd.bracket(e.classical_part(), a)?, e.order())))?;
    p0.classical_part().cauchy_mul(&raw)
}

/// `R_E(A1, A2) x = {{x, A1}_E, A2}_E - {{x, A2}_E, A1}_E - {x, {A1, A2}}_E`.
pub fn module_curvature(dm: &DeformedModule, a1: &Coefficient, a2: &Coefficient, x: &StarMatrix) -> Result<StarMatrix> {
    let pd = PoissonData::new(dm.alg());
    if !pd.is_skew() {
        return Err(Error::NotSkew);
    }
    let p0 = dm.p0();
    let first = bracket_with(&pd, p0, &bracket_with(&pd, p0, x, a1)?, a2)?;
    let second = bracket_with(&pd, p0, &bracket_with(&pd, p0, x, a2)?, a1)?;
    let third = bracket_with(&pd, p0, x, &pd.bracket(a1, a2)?)?;
    first.try_sub(&second)?.try_sub(&third)
}

/// The fibred bracket `{L0, u}'` computed from the first-order part of the
/// endomorphism product and directly as `P0 {L0, u} P0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FibredBracket {
    pub from_product: StarMatrix,
    pub direct: StarMatrix,
}

impl FibredBracket {
    pub fn agrees(&self) -> Result<bool> {
        self.from_product.try_eq(&self.direct)
    }
}

/// The matrix bracket `{L, S}_{ij} = (1/i) sum_r (C_1(L_ir, S_rj) - C_1(S_ir, L_rj))`.
pub fn matrix_bracket(alg: &StarAlgebra, l: &StarMatrix, s: &StarMatrix) -> Result<StarMatrix> {
    let pd = PoissonData::new(alg);
    let c1 = |a: &StarMatrix, b: &StarMatrix, i: usize, j: usize| -> Result<Coefficient> {
        let mut acc = alg.ring().zero();
        for r in 0..a.cols() {
            acc = acc.try_add(&pd.c1.apply(a.get(i, r).classical_part(), b.get(r, j).classical_part())?)?;
        }
        Ok(acc)
    };
    if l.cols() != s.rows() || s.cols() != l.rows() {
        return Err(Error::Dimension("bracket of incompatible matrices".into()));
    }
    let mut entries = Vec::with_capacity(l.rows() * s.cols());
    for i in 0..l.rows() {
        for j in 0..s.cols() {
            entries.push(c1(l, s, i, j)?.try_sub(&c1(s, l, i, j)?)?.scale(&minus_i()));
        }
    }
    StarMatrix::from_classical(l.rows(), s.cols(), entries, alg.order())
}

/// Recovers `f` from a center element `u = f P0`.
pub fn center_coefficient(p0: &StarMatrix, u: &StarMatrix) -> Result<Coefficient> {
    let p0 = p0.classical_part();
    let u0 = u.classical_part();
    if !u.is_classical() || u0.rows() != p0.rows() || u0.cols() != p0.cols() {
        return Err(Error::Constraint("not of the form f P0".into()));
    }
    let n = p0.rows();
    let (i, j) = (0..n * n)
        .map(|k| (k / n, k % n))
        .find(|&(i, j)| !p0.get(i, j).classical_part().is_zero())
        .ok_or_else(|| Error::Constraint("P0 is zero".into()))?;
    let f = u0.get(i, j).classical_part().try_mul(&p0.get(i, j).classical_part().invert()?)?;
    let fp0 = p0.map_entries(|e| e.mul_coefficient(&f))?;
    if !fp0.try_eq(&u0)? {
        return Err(Error::Constraint("not of the form f P0".into()));
    }
    Ok(f)
}

pub fn fibred_bracket(dm: &DeformedModule, l0: &StarMatrix, u: &StarMatrix) -> Result<FibredBracket> {
    let alg = dm.alg();
    center_coefficient(dm.p0(), u)?;
    let p0 = dm.p0();
    let l0 = l0.classical_part();
    if !p0.cauchy_mul(&l0)?.cauchy_mul(p0)?.try_eq(&l0)? {
        return Err(Error::Constraint("L0 is not in P0 M P0".into()));
    }
    let end = dm.endo();
    let b1 = |a: &StarMatrix, b: &StarMatrix| -> Result<StarMatrix> { Ok(end.mul(a, b)?.coefficient_matrix(1)) };
    let from_product = b1(&l0, u)?.try_sub(&b1(u, &l0)?)?.scale(&minus_i());
    let direct = p0.cauchy_mul(&matrix_bracket(alg, &l0, u)?)?.cauchy_mul(p0)?;
    Ok(FibredBracket { from_product, direct })
}
