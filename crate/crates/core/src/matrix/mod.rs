//! Matrices over a deformed algebra, and the matrix-level constructions:
//! deformed projections, Hermitian factorization, unitary deformation and
//! intertwiners.

mod deform;

use std::fmt;

pub use deform::{
    deform_projection_fedosov, deform_projection_recursive, deform_unitary, hermitian_factorization,
    idempotent_intertwiner, mat_series_inverse, projection_defect, MatrixAlgebra,
};

use crate::coeff::{CoeffRing, Coefficient, GaussianRational};
use crate::error::{Error, Result};
use crate::par;
use crate::series::FormalSeries;
use crate::star::{Jets, StarAlgebra, StarElement};

/// A `rows x cols` matrix of formal series, stored row-major. Square
/// matrices form the algebra `M_n(A[[l]])`; single columns are elements of
/// `A[[l]]^n`.
#[derive(Clone, PartialEq)]
pub struct StarMatrix {
    rows: usize,
    cols: usize,
    ring: CoeffRing,
    order: usize,
    entries: Vec<FormalSeries>,
}

/// Where two matrices first disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub order: usize,
    pub row: usize,
    pub col: usize,
}

impl Discrepancy {
    pub fn location(&self) -> String {
        format!("({},{})", self.row, self.col)
    }
}

impl StarMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<FormalSeries>) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let ring = entries[0].ring();
        let order = entries[0].order();
        for e in &entries {
            if e.order() != order {
                return Err(Error::OrderMismatch(e.order(), order));
            }
            if e.ring() != ring {
                return Err(Error::VariableMismatch(e.ring().nvars, ring.nvars));
            }
        }
        Ok(Self { rows, cols, ring, order, entries })
    }

    pub fn square(n: usize, entries: Vec<FormalSeries>) -> Result<Self> {
        Self::new(n, n, entries)
    }

    /// A matrix constant in the formal parameter.
    pub fn from_classical(rows: usize, cols: usize, entries: Vec<Coefficient>, order: usize) -> Result<Self> {
        Self::new(rows, cols, entries.into_iter().map(|c| FormalSeries::constant(c, order)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, ring: CoeffRing, order: usize, f: impl Fn(usize, usize) -> FormalSeries) -> Self {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, ring, order, entries }
    }

    pub fn zero(ring: CoeffRing, order: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, ring, order, |_, _| FormalSeries::zero(ring, order))
    }

    pub fn identity(ring: CoeffRing, order: usize, n: usize) -> Self {
        Self::from_fn(n, n, ring, order, |i, j| if i == j { FormalSeries::one(ring, order) } else { FormalSeries::zero(ring, order) })
    }

    /// The `k`-th standard basis column of length `n`.
    pub fn basis_column(ring: CoeffRing, order: usize, n: usize, k: usize) -> Self {
        Self::from_fn(n, 1, ring, order, |i, _| if i == k { FormalSeries::one(ring, order) } else { FormalSeries::zero(ring, order) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[FormalSeries] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &FormalSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FormalSeries) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> StarMatrix {
        Self::from_fn(self.rows, 1, self.ring, self.order, |i, _| self.get(i, j).clone())
    }

    /// Columns `c_0, c_1, ...` side by side.
    pub fn hstack(columns: &[StarMatrix]) -> Result<StarMatrix> {
        let first = columns.first().ok_or_else(|| Error::Dimension("no columns".into()))?;
        if columns.iter().any(|c| c.cols != 1 || c.rows != first.rows) {
            return Err(Error::Dimension("hstack needs columns of equal length".into()));
        }
        let mut entries = Vec::with_capacity(first.rows * columns.len());
        for i in 0..first.rows {
            for c in columns {
                entries.push(c.entries[i].clone());
            }
        }
        Self::new(first.rows, columns.len(), entries)
    }

    fn check_same_shape(&self, o: &StarMatrix) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        if self.order != o.order {
            return Err(Error::OrderMismatch(self.order, o.order));
        }
        Ok(())
    }

    fn zip_with(&self, o: &StarMatrix, f: impl Fn(&FormalSeries, &FormalSeries) -> Result<FormalSeries>) -> Result<StarMatrix> {
        self.check_same_shape(o)?;
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect::<Result<_>>()?;
        Ok(Self { entries, ..self.clone_shape() })
    }

    fn clone_shape(&self) -> StarMatrix {
        Self { rows: self.rows, cols: self.cols, ring: self.ring, order: self.order, entries: Vec::new() }
    }

    pub fn try_add(&self, o: &StarMatrix) -> Result<StarMatrix> {
        self.zip_with(o, |a, b| a.try_add(b))
    }

    pub fn try_sub(&self, o: &StarMatrix) -> Result<StarMatrix> {
        self.zip_with(o, |a, b| a.try_sub(b))
    }

    pub fn scale(&self, s: &GaussianRational) -> StarMatrix {
        Self { entries: self.entries.iter().map(|e| e.scale(s)).collect(), ..self.clone_shape() }
    }

    pub fn neg(&self) -> StarMatrix {
        self.scale(&-GaussianRational::one())
    }

    pub fn map_entries(&self, f: impl Fn(&FormalSeries) -> Result<FormalSeries>) -> Result<StarMatrix> {
        Ok(Self { entries: self.entries.iter().map(f).collect::<Result<_>>()?, ..self.clone_shape() })
    }

    /// Conjugate transpose: `(M*)_{ij} = conj(M_{ji})`.
    pub fn adjoint(&self) -> StarMatrix {
        Self::from_fn(self.cols, self.rows, self.ring, self.order, |i, j| self.get(j, i).conj())
    }

    /// The `l^0` part, as a matrix constant in `l`.
    pub fn classical_part(&self) -> StarMatrix {
        self.coefficient_matrix(0)
    }

    /// The `l^r` coefficients, as a matrix constant in `l`.
    pub fn coefficient_matrix(&self, r: usize) -> StarMatrix {
        Self {
            entries: self.entries.iter().map(|e| FormalSeries::constant(e.coeff(r).clone(), self.order)).collect(),
            ..self.clone_shape()
        }
    }

    /// Overwrites the `l^r` coefficients with those of a classical matrix.
    pub fn set_coefficient_matrix(&mut self, r: usize, m: &StarMatrix) {
        for (e, c) in self.entries.iter_mut().zip(&m.entries) {
            e.set_coeff(r, c.coeff(0).clone());
        }
    }

    pub fn with_order(&self, order: usize) -> StarMatrix {
        Self { entries: self.entries.iter().map(|e| e.with_order(order)).collect(), order, ..self.clone_shape() }
    }

    /// Multiplication by `l^k`.
    pub fn shift(&self, k: usize) -> StarMatrix {
        Self { entries: self.entries.iter().map(|e| e.shift(k)).collect(), ..self.clone_shape() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_classical(&self) -> bool {
        self.entries.iter().all(|e| e.is_classical())
    }

    pub fn classical_is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.classical_part().is_zero())
    }

    /// Classical trace `sum_i (M_0)_{ii}`.
    pub fn trace(&self) -> Result<Coefficient> {
        let mut acc = self.ring.zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc.try_add(self.get(i, i).classical_part())?;
        }
        Ok(acc)
    }

    /// Star trace `sum_i M_{ii}` as a series.
    pub fn star_trace(&self) -> Result<FormalSeries> {
        let mut acc = FormalSeries::zero(self.ring, self.order);
        for i in 0..self.rows.min(self.cols) {
            acc = acc.try_add(self.get(i, i))?;
        }
        Ok(acc)
    }

    /// First order and entry where two matrices differ.
    pub fn first_difference(&self, o: &StarMatrix) -> Result<Option<Discrepancy>> {
        self.check_same_shape(o)?;
        let mut best: Option<Discrepancy> = None;
        for (k, (a, b)) in self.entries.iter().zip(&o.entries).enumerate() {
            if let Some(r) = a.first_difference(b)? {
                if best.map(|d| r < d.order).unwrap_or(true) {
                    best = Some(Discrepancy { order: r, row: k / self.cols, col: k % self.cols });
                }
            }
        }
        Ok(best)
    }

    pub fn try_eq(&self, o: &StarMatrix) -> Result<bool> {
        Ok(self.first_difference(o)?.is_none())
    }

    pub fn is_hermitian(&self) -> Result<bool> {
        Ok(self.is_square() && self.try_eq(&self.adjoint())?)
    }

    /// Product under the undeformed (pointwise, Cauchy) multiplication.
    pub fn cauchy_mul(&self, o: &StarMatrix) -> Result<StarMatrix> {
        self.check_mul(o)?;
        let cols = o.cols;
        let entries = par::try_map_range(self.rows * cols, |k| {
            let (i, j) = (k / cols, k % cols);
            let mut acc = FormalSeries::zero(self.ring, self.order);
            for m in 0..self.cols {
                acc = acc.try_add(&self.get(i, m).try_cauchy_mul(o.get(m, j))?)?;
            }
            Ok(acc)
        })?;
        Ok(Self { rows: self.rows, cols, ring: self.ring, order: self.order, entries })
    }

    fn check_mul(&self, o: &StarMatrix) -> Result<()> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        if self.order != o.order {
            return Err(Error::OrderMismatch(self.order, o.order));
        }
        if self.ring.nvars != o.ring.nvars {
            return Err(Error::VariableMismatch(self.ring.nvars, o.ring.nvars));
        }
        Ok(())
    }

    /// `(A * B)_{ij} = sum_k A_{ik} * B_{kj}`; entries run in parallel.
    pub fn star_mul(&self, alg: &StarAlgebra, o: &StarMatrix) -> Result<StarMatrix> {
        self.check_mul(o)?;
        if self.order != alg.order() {
            return Err(Error::OrderMismatch(self.order, alg.order()));
        }
        let left = par::try_map_range(self.entries.len(), |k| alg.jets_left(&self.entries[k]))?;
        let right = par::try_map_range(o.entries.len(), |k| alg.jets_right(&o.entries[k]))?;
        let cols = o.cols;
        let entries = par::try_map_range(self.rows * cols, |k| {
            let (i, j) = (k / cols, k % cols);
            let coeffs = (0..=self.order)
                .map(|r| product_entry(alg, &left, &right, self.cols, cols, i, j, r))
                .collect::<Result<Vec<_>>>()?;
            FormalSeries::from_coeffs(coeffs)
        })?;
        Ok(Self { rows: self.rows, cols, ring: self.ring, order: self.order, entries })
    }

    /// Inverse of the classical part, as a classical matrix. Uses the
    /// adjugate, so for polynomial coefficients the determinant must be a
    /// nonzero constant.
    pub fn classical_inverse(&self) -> Result<StarMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let a: Vec<Coefficient> = self.entries.iter().map(|e| e.classical_part().clone()).collect();
        let det = determinant(&a, n)?;
        let inv_det = det.invert().map_err(|_| Error::NotInvertible)?;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj(A)_{ij} = (-1)^{i+j} det(minor_{ji})
                let cofactor = if n == 1 { self.ring.one() } else { determinant(&minor(&a, n, j, i), n - 1)? };
                let mut c = cofactor.try_mul(&inv_det)?;
                if (i + j) % 2 == 1 {
                    c = -&c;
                }
                entries.push(FormalSeries::constant(c, self.order));
            }
        }
        Self::new(n, n, entries)
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn product_entry(
    alg: &StarAlgebra,
    left: &[Jets],
    right: &[Jets],
    inner: usize,
    cols: usize,
    i: usize,
    j: usize,
    r: usize,
) -> Result<Coefficient> {
    let mut acc = alg.ring().zero();
    for m in 0..inner {
        let c = alg.product_coeff(&left[i * inner + m], &right[m * cols + j], r)?;
        if !c.is_zero() {
            acc = acc.add_unreduced(&c)?;
        }
    }
    Ok(acc.reduced())
}

fn minor(a: &[Coefficient], n: usize, row: usize, col: usize) -> Vec<Coefficient> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for i in (0..n).filter(|&i| i != row) {
        for j in (0..n).filter(|&j| j != col) {
            out.push(a[i * n + j].clone());
        }
    }
    out
}

fn determinant(a: &[Coefficient], n: usize) -> Result<Coefficient> {
    match n {
        0 => Err(Error::Dimension("empty matrix".into())),
        1 => Ok(a[0].clone()),
        2 => a[0].try_mul(&a[3])?.try_sub(&a[1].try_mul(&a[2])?),
        _ => {
            let mut acc = a[0].ring().zero();
            for j in 0..n {
                if a[j].is_zero() {
                    continue;
                }
                let term = a[j].try_mul(&determinant(&minor(a, n, 0, j), n - 1)?)?;
                acc = if j % 2 == 0 { acc.try_add(&term)? } else { acc.try_sub(&term)? };
            }
            Ok(acc)
        }
    }
}

impl StarElement for StarMatrix {
    fn star(&self, alg: &StarAlgebra, o: &Self) -> Result<Self> {
        self.star_mul(alg, o)
    }

    fn plus(&self, o: &Self) -> Result<Self> {
        self.try_add(o)
    }

    fn scaled(&self, s: &GaussianRational) -> Self {
        self.scale(s)
    }

    fn unit_like(&self) -> Self {
        Self::identity(self.ring, self.order, self.rows)
    }

    fn classical_vanishes(&self) -> bool {
        self.classical_is_zero()
    }

    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

impl fmt::Debug for StarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "StarMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(f, "  ({i},{j}): {}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
