//! Deformations of the projective module `E = P0 A^n`: the isomorphism
//! `I(B) = P * B * Q`, the deformed right action, the deformed metric, the
//! induced product on endomorphisms, and equivalences between deformations.
//!
//! Module elements are `n x 1` columns `x` with `P0 x = x` in every order.
//! Maps between two deformations over the same `P0` are stored as
//! image-level matrices `K`, acting by `x -> I'^{-1}(K * I(x))`.

use std::sync::OnceLock;

use crate::coeff::GaussianRational;
use crate::error::{Error, Result};
use crate::matrix::{
    deform_projection_fedosov, deform_projection_recursive, deform_unitary, hermitian_factorization,
    idempotent_intertwiner, mat_series_inverse, Discrepancy, MatrixAlgebra, StarMatrix,
};
use crate::series::FormalSeries;
use crate::star::StarAlgebra;

#[derive(Clone, Debug)]
pub struct DeformedModule {
    alg: StarAlgebra,
    p0: StarMatrix,
    p: StarMatrix,
    hermitian: bool,
    endo_unit: OnceLock<StarMatrix>,
}

/// Which projection a column is required to be fixed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `P0 x_r = x_r` for every coefficient.
    Classical,
    /// `P * x = x`.
    Deformed,
}

impl DeformedModule {
    /// Wraps a deformed idempotent `P` over the classical projection `P0`.
    pub fn new(alg: StarAlgebra, p0: StarMatrix, p: StarMatrix) -> Result<Self> {
        if !p0.is_classical() {
            return Err(Error::Constraint("P0 must be constant in the formal parameter".into()));
        }
        if let Some(d) = p.classical_part().first_difference(&p0)? {
            return Err(Error::Mismatch(format!("classical part of P differs from P0 at {}", d.location())));
        }
        if let Some(d) = p.star_mul(&alg, &p)?.first_difference(&p)? {
            return Err(Error::NotIdempotent(format!("P * P != P at order {} entry {}", d.order, d.location())));
        }
        let hermitian = alg.is_hermitian() && p.is_hermitian()?;
        Ok(Self { alg, p0, p, hermitian, endo_unit: OnceLock::new() })
    }

    pub fn fedosov(alg: &StarAlgebra, p0: &StarMatrix) -> Result<Self> {
        let herm = p0.is_hermitian()? && alg.is_hermitian();
        let p = deform_projection_fedosov(alg, p0, herm)?;
        Self::new(alg.clone(), p0.clone(), p)
    }

    pub fn recursive(alg: &StarAlgebra, p0: &StarMatrix) -> Result<Self> {
        let p = deform_projection_recursive(alg, p0)?;
        Self::new(alg.clone(), p0.clone(), p)
    }

    pub fn alg(&self) -> &StarAlgebra {
        &self.alg
    }

    pub fn p0(&self) -> &StarMatrix {
        &self.p0
    }

    pub fn p(&self) -> &StarMatrix {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.p0.rows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// The scalar unit `[[1]]`, the idempotent used for columns.
    pub fn column_unit(&self) -> StarMatrix {
        StarMatrix::identity(self.alg.ring(), self.alg.order(), 1)
    }

    /// `P0 e_j` for `j < n`: a spanning set of `E`.
    pub fn spanning_set(&self) -> Vec<StarMatrix> {
        (0..self.n()).map(|j| self.p0.column(j)).collect()
    }

    /// Projects an arbitrary column onto `E` coefficientwise.
    pub fn project(&self, v: &StarMatrix) -> Result<StarMatrix> {
        self.p0.cauchy_mul(v)
    }

    pub fn check_element(&self, x: &StarMatrix, c: Constraint) -> Result<()> {
        if x.cols() != 1 || x.rows() != self.n() {
            return Err(Error::Dimension(format!("expected a column of length {}, got {}x{}", self.n(), x.rows(), x.cols())));
        }
        let (image, what) = match c {
            Constraint::Classical => (self.p0.cauchy_mul(x)?, "P0 x != x"),
            Constraint::Deformed => (self.p.star_mul(&self.alg, x)?, "P * x != x"),
        };
        match image.first_difference(x)? {
            None => Ok(()),
            Some(d) => Err(Error::Constraint(format!("{what} at order {} component {}", d.order, d.row))),
        }
    }

    /// `I(B) = P * B * Q` for `B` with `P0 B_r Q0 = B_r`.
    pub fn iso_i(&self, q: &StarMatrix, b: &StarMatrix) -> Result<StarMatrix> {
        self.check_sandwich(q, b)?;
        self.p.star_mul(&self.alg, b)?.star_mul(&self.alg, q)
    }

    fn check_sandwich(&self, q: &StarMatrix, b: &StarMatrix) -> Result<()> {
        let q0 = q.classical_part();
        let sandwiched = self.p0.cauchy_mul(b)?.cauchy_mul(&q0)?;
        if let Some(d) = sandwiched.first_difference(b)? {
            return Err(Error::Constraint(format!("P0 B Q0 != B at order {} entry {}", d.order, d.location())));
        }
        Ok(())
    }

    /// `I_r(B) = sum_{i+j+k+m+s=r} C_m(C_k(P_i, B_s), Q_j)`, evaluated
    /// coefficient by coefficient without series products.
    pub fn iso_i_expansion(&self, q: &StarMatrix, b: &StarMatrix) -> Result<StarMatrix> {
        self.check_sandwich(q, b)?;
        let alg = &self.alg;
        let order = alg.order();
        let ring = alg.ring();
        let cochain_product = |u: usize, x: &StarMatrix, y: &StarMatrix| -> Result<StarMatrix> {
            let mut out = StarMatrix::zero(ring, order, x.rows(), y.cols());
            for i in 0..x.rows() {
                for j in 0..y.cols() {
                    let mut acc = ring.zero();
                    for m in 0..x.cols() {
                        acc = acc.try_add(&alg.apply_cochain(u, x.get(i, m).classical_part(), y.get(m, j).classical_part())?)?;
                    }
                    out.set(i, j, FormalSeries::constant(acc, order));
                }
            }
            Ok(out)
        };
        let mut result = StarMatrix::zero(ring, order, b.rows(), q.cols());
        for r in 0..=order {
            let mut acc = StarMatrix::zero(ring, order, b.rows(), q.cols());
            for i in 0..=r {
                let pi = self.p.coefficient_matrix(i);
                for s in 0..=(r - i) {
                    let bs = b.coefficient_matrix(s);
                    for k in 0..=(r - i - s) {
                        let inner = cochain_product(k, &pi, &bs)?;
                        for j in 0..=(r - i - s - k) {
                            let m = r - i - s - k - j;
                            acc = acc.try_add(&cochain_product(m, &inner, &q.coefficient_matrix(j))?)?;
                        }
                    }
                }
            }
            result.set_coefficient_matrix(r, &acc);
        }
        Ok(result)
    }

    /// First disagreement between `P * B * Q` and its cochain expansion.
    pub fn iso_i_cross_check(&self, q: &StarMatrix, b: &StarMatrix) -> Result<Option<Discrepancy>> {
        self.iso_i(q, b)?.first_difference(&self.iso_i_expansion(q, b)?)
    }

    /// The unique `B` with `I(B) = L`, by peeling off one order at a time.
    pub fn iso_i_inverse(&self, q: &StarMatrix, l: &StarMatrix) -> Result<StarMatrix> {
        if let Some(d) = self.p.star_mul(&self.alg, l)?.star_mul(&self.alg, q)?.first_difference(l)? {
            return Err(Error::NotInRange(format!("P * L * Q != L at order {} entry {}", d.order, d.location())));
        }
        let q0 = q.classical_part();
        let mut s = StarMatrix::zero(self.alg.ring(), self.alg.order(), l.rows(), l.cols());
        for r in 0..=self.alg.order() {
            let residual = if s.is_zero() { l.clone() } else { l.try_sub(&self.p.star_mul(&self.alg, &s)?.star_mul(&self.alg, q)?)? };
            if let Some(k) = (0..r).find(|&k| !residual.coefficient_matrix(k).is_zero()) {
                return Err(Error::Inconsistent(format!("inverse recursion left a residual at order {k}")));
            }
            let sr = residual.coefficient_matrix(r);
            if sr.is_zero() {
                continue;
            }
            if !self.p0.cauchy_mul(&sr)?.cauchy_mul(&q0)?.try_eq(&sr)? {
                return Err(Error::NotInRange(format!("order {r} remainder is not in P0 M Q0")));
            }
            s.set_coefficient_matrix(r, &sr);
        }
        Ok(s)
    }

    /// `I(x) = P * x` for a column.
    pub fn embed(&self, x: &StarMatrix) -> Result<StarMatrix> {
        self.check_element(x, Constraint::Classical)?;
        self.p.star_mul(&self.alg, x)
    }

    /// `I^{-1}` for columns.
    pub fn unembed(&self, y: &StarMatrix) -> Result<StarMatrix> {
        self.iso_i_inverse(&self.column_unit(), y)
    }

    /// `x . A = I^{-1}(P * x * A)`.
    pub fn action(&self, x: &StarMatrix, a: &FormalSeries) -> Result<StarMatrix> {
        let px = self.embed(x)?;
        self.unembed(&px.star_mul(&self.alg, &scalar(a))?)
    }

    /// `h(x, y) = sum_i (P*x)_i^* * (P*y)_i`.
    pub fn metric(&self, x: &StarMatrix, y: &StarMatrix) -> Result<FormalSeries> {
        let px = self.embed(x)?;
        let py = self.embed(y)?;
        Ok(px.adjoint().star_mul(&self.alg, &py)?.get(0, 0).clone())
    }

    /// `h0(x, y) = sum_i conj(x_i) y_i` under the undeformed product.
    pub fn classical_metric(&self, x: &StarMatrix, y: &StarMatrix) -> Result<FormalSeries> {
        Ok(x.adjoint().cauchy_mul(y)?.get(0, 0).clone())
    }

    /// The deformed endomorphism algebra `(P0 M_n(A) P0 [[l]], *')`.
    pub fn endo(&self) -> EndAlgebra<'_> {
        EndAlgebra { dm: self }
    }

    /// The identity endomorphism `I^{-1}(P)`. Its classical part is `P0`
    /// but in general it has higher-order terms.
    pub fn endo_unit(&self) -> Result<&StarMatrix> {
        if let Some(u) = self.endo_unit.get() {
            return Ok(u);
        }
        let u = self.iso_i_inverse(&self.p, &self.p)?;
        Ok(self.endo_unit.get_or_init(|| u))
    }

    /// `L . x = I^{-1}(I(L) * I(x))` for an endomorphism `L`.
    pub fn endo_apply(&self, l: &StarMatrix, x: &StarMatrix) -> Result<StarMatrix> {
        let il = self.iso_i(&self.p, l)?;
        self.unembed(&il.star_mul(&self.alg, &self.embed(x)?)?)
    }

    fn same_classical_data(&self, o: &DeformedModule) -> Result<()> {
        if self.n() != o.n() || self.alg.order() != o.alg.order() || self.alg.ring() != o.alg.ring() {
            return Err(Error::Mismatch("modules over different algebras or ranks".into()));
        }
        if self.alg.stack() != o.alg.stack() {
            return Err(Error::Mismatch("modules over different star products".into()));
        }
        if let Some(d) = self.p0.first_difference(&o.p0)? {
            return Err(Error::Mismatch(format!("classical projections differ at {}", d.location())));
        }
        Ok(())
    }
}

fn scalar(a: &FormalSeries) -> StarMatrix {
    StarMatrix::square(1, vec![a.clone()]).expect("1x1 matrix")
}

/// `End(E)` realised on `P0 M_n(A) P0 [[l]]` with
/// `L *' S = I^{-1}(I(L) * I(S))` and unit `I^{-1}(P)`.
pub struct EndAlgebra<'a> {
    dm: &'a DeformedModule,
}

impl EndAlgebra<'_> {
    pub fn embed(&self, l: &StarMatrix) -> Result<StarMatrix> {
        self.dm.iso_i(&self.dm.p, l)
    }

    pub fn unembed(&self, m: &StarMatrix) -> Result<StarMatrix> {
        self.dm.iso_i_inverse(&self.dm.p, m)
    }
}

impl MatrixAlgebra for EndAlgebra<'_> {
    fn ring(&self) -> crate::coeff::CoeffRing {
        self.dm.alg.ring()
    }

    fn order(&self) -> usize {
        self.dm.alg.order()
    }

    fn mul(&self, a: &StarMatrix, b: &StarMatrix) -> Result<StarMatrix> {
        let alg = &self.dm.alg;
        self.unembed(&self.embed(a)?.star_mul(alg, &self.embed(b)?)?)
    }

    fn unit(&self, n: usize) -> StarMatrix {
        debug_assert_eq!(n, self.dm.n());
        match self.dm.endo_unit() {
            Ok(u) => u.clone(),
            // P lies in the range of I by construction.
            Err(e) => unreachable!("I^-1(P) failed: {e}"),
        }
    }

    /// Inverse on `E`: `(A0 + 1 - P0)^{-1} P0`.
    fn classical_inverse(&self, a0: &StarMatrix) -> Result<StarMatrix> {
        let p0 = self.dm.p0.classical_part();
        let one = StarMatrix::identity(p0.ring(), p0.order(), p0.rows());
        let extended = a0.classical_part().try_add(&one.try_sub(&p0)?)?;
        extended.classical_inverse()?.cauchy_mul(&p0)
    }
}

/// A `k[[l]]`-linear map between two deformations over the same `P0`,
/// `x -> I_dst^{-1}(K * I_src(x))`.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub k: StarMatrix,
}

impl ModuleMap {
    pub fn apply(&self, src: &DeformedModule, dst: &DeformedModule, x: &StarMatrix) -> Result<StarMatrix> {
        let image = self.k.star_mul(&src.alg, &src.embed(x)?)?;
        dst.unembed(&image)
    }

    /// `self` after `first`.
    pub fn compose(&self, alg: &StarAlgebra, first: &ModuleMap) -> Result<ModuleMap> {
        Ok(ModuleMap { k: self.k.star_mul(alg, &first.k)? })
    }

    /// The map of an endomorphism `L` of `dm`.
    pub fn from_endomorphism(dm: &DeformedModule, l: &StarMatrix) -> Result<ModuleMap> {
        Ok(ModuleMap { k: dm.iso_i(&dm.p, l)? })
    }

    /// Reads the map back as an endomorphism in `P0 M_n(A) P0 [[l]]`, for
    /// maps from `dm` to itself.
    pub fn to_endomorphism(&self, dm: &DeformedModule) -> Result<StarMatrix> {
        let image = self.k.star_mul(&dm.alg, &dm.p)?;
        dm.iso_i_inverse(&dm.p, &image)
    }
}

/// Module isomorphism `T = I'^{-1} o (U *) o I` with
/// `U = P' * P + (1 - P') * (1 - P)`.
pub fn module_equivalence(dm: &DeformedModule, dm2: &DeformedModule) -> Result<ModuleMap> {
    dm.same_classical_data(dm2)?;
    Ok(ModuleMap { k: idempotent_intertwiner(&dm.alg, &dm.p, &dm2.p)? })
}

/// Result of [`hermitian_equivalence`].
#[derive(Clone, Debug)]
pub struct IsometricEquivalence {
    /// The plain module isomorphism.
    pub t: ModuleMap,
    /// Metric pullback `h'(Tx, Ty) = h(x, G . y)`.
    pub g: StarMatrix,
    /// Factor with `G = W* *' W`.
    pub w: StarMatrix,
    pub w_inv: StarMatrix,
    /// `T o W^{-1}`, which preserves the metrics.
    pub t_iso: ModuleMap,
}

/// Solves `h'(T x, T y) = h(x, G . y)` for `G` in `P0 M_n(A) P0 [[l]]`,
/// order by order, on the spanning columns `P0 e_j`.
pub fn metric_pullback(dm: &DeformedModule, dm2: &DeformedModule, t: &ModuleMap) -> Result<StarMatrix> {
    let n = dm.n();
    let order = dm.alg.order();
    let span = dm.spanning_set();
    let images = span.iter().map(|x| t.apply(dm, dm2, x)).collect::<Result<Vec<_>>>()?;
    let mut target = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            target.push(dm2.metric(&images[i], &images[j])?);
        }
    }
    let mut g = dm.p0.clone();
    for r in 1..=order {
        let mut gr = StarMatrix::zero(dm.alg.ring(), order, n, n);
        for j in 0..n {
            let gy = dm.endo_apply(&g, &span[j])?;
            for i in 0..n {
                let have = dm.metric(&span[i], &gy)?;
                let diff = target[i * n + j].try_sub(&have)?;
                if let Some(k) = (0..r).find(|&k| !diff.coeff(k).is_zero()) {
                    return Err(Error::Inconsistent(format!("metric pullback residual at order {k} for ({i},{j})")));
                }
                gr.set(i, j, FormalSeries::constant(diff.coeff(r).clone(), order));
            }
        }
        if !dm.p0.cauchy_mul(&gr)?.cauchy_mul(&dm.p0)?.try_eq(&gr)? {
            return Err(Error::Inconsistent(format!("order {r} of the metric pullback is not in P0 M P0")));
        }
        g.set_coefficient_matrix(r, &gr);
    }
    for i in 0..n {
        let gy = dm.endo_apply(&g, &span[i])?;
        for j in 0..n {
            if !dm.metric(&span[j], &gy)?.try_eq(&target[j * n + i])? {
                return Err(Error::Inconsistent(format!("metric pullback does not reproduce h' on ({j},{i})")));
            }
        }
    }
    Ok(g)
}

/// Isometric equivalence between two Hermitian deformations over the same
/// classical data: `T_iso = T o W^{-1}` where `G = W* *' W`.
pub fn hermitian_equivalence(dm: &DeformedModule, dm2: &DeformedModule) -> Result<IsometricEquivalence> {
    if !dm.is_hermitian() || !dm2.is_hermitian() {
        return Err(Error::NotHermitian("both deformations must be Hermitian".into()));
    }
    let t = module_equivalence(dm, dm2)?;
    let g = metric_pullback(dm, dm2, &t)?;
    let end = dm.endo();
    let w = hermitian_factorization(&end, &g, &dm.p0)?;
    let w_inv = mat_series_inverse(&end, &w)?;
    let t_iso = t.compose(&dm.alg, &ModuleMap::from_endomorphism(dm, &w_inv)?)?;
    Ok(IsometricEquivalence { t, g, w, w_inv, t_iso })
}

/// Result of [`deform_isometry`].
#[derive(Clone, Debug)]
pub struct DeformedIsometry {
    /// Unitary deformation of `V0` in `M_n`.
    pub u: StarMatrix,
    /// The rotated module with projection `U * P * U*`.
    pub rotated: DeformedModule,
    pub equivalence: IsometricEquivalence,
    /// `V` as an endomorphism in `P0 M_n(A) P0 [[l]]`.
    pub v: StarMatrix,
}

/// Deforms a classical isometry `V0` (unitary, commuting with `P0`) into an
/// isometry `V = T_iso^{-1} o U` of the deformed module.
pub fn deform_isometry(dm: &DeformedModule, v0: &StarMatrix) -> Result<DeformedIsometry> {
    if !dm.is_hermitian() {
        return Err(Error::NotHermitian("module deformation".into()));
    }
    if !v0.cauchy_mul(&dm.p0)?.try_eq(&dm.p0.cauchy_mul(v0)?)? {
        return Err(Error::Constraint("V0 does not commute with P0".into()));
    }
    let alg = &dm.alg;
    let u = deform_unitary(alg, v0)?;
    let p2 = u.star_mul(alg, &dm.p)?.star_mul(alg, &u.adjoint())?;
    let rotated = DeformedModule::new(alg.clone(), dm.p0.clone(), p2)?;
    let equivalence = hermitian_equivalence(dm, &rotated)?;
    // T_iso^{-1} = W o T^{-1}, and T^{-1} has image-level matrix U_int^{-1}.
    let u_int_inv = mat_series_inverse(alg, &equivalence.t.k)?;
    let w_map = ModuleMap::from_endomorphism(dm, &equivalence.w)?;
    let v_map = w_map.compose(alg, &ModuleMap { k: u_int_inv })?.compose(alg, &ModuleMap { k: u.clone() })?;
    let v = v_map.to_endomorphism(dm)?;
    Ok(DeformedIsometry { u, rotated, equivalence, v })
}

/// `sum_k c_k x_k` for scalars `c_k`, a convenience for building elements.
pub fn combine(columns: &[StarMatrix], weights: &[GaussianRational]) -> Result<StarMatrix> {
    let first = columns.first().ok_or_else(|| Error::Dimension("no columns".into()))?;
    let mut acc = StarMatrix::zero(first.ring(), first.order(), first.rows(), 1);
    for (c, w) in columns.iter().zip(weights) {
        acc = acc.try_add(&c.scale(w))?;
    }
    Ok(acc)
}
