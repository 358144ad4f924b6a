//! Scenario tasks: parameter validation and execution.

use serde::{Deserialize, Serialize};

use super::scenario::Context;
use crate::coeff::{Coefficient, GaussianRational, Monomial, MAX_VARS};
use crate::error::{Error, Result};
use crate::matrix::{
    deform_projection_fedosov, deform_projection_recursive, deform_unitary, hermitian_factorization, idempotent_intertwiner,
    mat_series_inverse, MatrixAlgebra, StarMatrix,
};
use crate::module::{deform_isometry, hermitian_equivalence, module_equivalence, DeformedModule};
use crate::morita::{
    deform_full_witness, theta_adjointability, verify_nice_identities, verify_strongly_full, verify_strongly_full_classical,
    ClassicalModule, InnerProductModule,
};
use crate::report::{CheckReport, Finding};
use crate::sample::Sampler;
use crate::semiclassical::{
    fibred_bracket, levi_civita, module_bracket, module_curvature, connection_curvature, ConnectionData, PoissonData,
};
use crate::series::FormalSeries;
use crate::star::{check_associativity, check_hermitian, check_unit, check_vey, DiffOperator, EquivalenceTransform, TransportedProduct};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Associativity,
    Hermitian,
    Unit,
    Vey,
    EquivalenceTransport,
    Projection,
    Intertwiner,
    Factorization,
    Unitary,
    ModuleLaws,
    MetricLaws,
    EndomorphismLaws,
    HermitianEquivalence,
    DeformIsometry,
    PoissonChecks,
    ModuleBracketChecks,
    CurvatureCompare,
    FibredBracketChecks,
    StrongFullness,
    NiceIdentities,
    ThetaAdjoint,
    Degeneration,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Associativity => "associativity",
            TaskKind::Hermitian => "hermitian",
            TaskKind::Unit => "unit",
            TaskKind::Vey => "vey",
            TaskKind::EquivalenceTransport => "equivalence_transport",
            TaskKind::Projection => "projection",
            TaskKind::Intertwiner => "intertwiner",
            TaskKind::Factorization => "factorization",
            TaskKind::Unitary => "unitary",
            TaskKind::ModuleLaws => "module_laws",
            TaskKind::MetricLaws => "metric_laws",
            TaskKind::EndomorphismLaws => "endomorphism_laws",
            TaskKind::HermitianEquivalence => "hermitian_equivalence",
            TaskKind::DeformIsometry => "deform_isometry",
            TaskKind::PoissonChecks => "poisson_checks",
            TaskKind::ModuleBracketChecks => "module_bracket_checks",
            TaskKind::CurvatureCompare => "curvature_compare",
            TaskKind::FibredBracketChecks => "fibred_bracket_checks",
            TaskKind::StrongFullness => "strong_fullness",
            TaskKind::NiceIdentities => "nice_identities",
            TaskKind::ThetaAdjoint => "theta_adjoint",
            TaskKind::Degeneration => "degeneration",
        }
    }

    /// (required, optional) parameters besides the sampling controls.
    fn params(self) -> (&'static [&'static str], &'static [&'static str]) {
        use TaskKind::*;
        match self {
            Associativity | Hermitian | Unit | PoissonChecks => (&[], &[]),
            Vey => (&[], &[]),
            EquivalenceTransport => (&["operators"], &[]),
            Projection => (&["projection"], &["method"]),
            Intertwiner => (&["projection"], &[]),
            Factorization => (&[], &["matrix", "factor", "size"]),
            Unitary => (&["matrix"], &[]),
            ModuleLaws | MetricLaws | EndomorphismLaws | HermitianEquivalence | ModuleBracketChecks | FibredBracketChecks
            | ThetaAdjoint => (&["projection"], &[]),
            DeformIsometry => (&["projection", "matrix"], &[]),
            CurvatureCompare => (&["projection", "f", "g"], &["expect"]),
            StrongFullness => (&["projection", "witness"], &[]),
            NiceIdentities => (&["projection", "witness"], &[]),
            Degeneration => (&["projection"], &["witness"]),
        }
    }

    fn samples_by_default(self) -> usize {
        match self {
            TaskKind::Associativity | TaskKind::Hermitian | TaskKind::Unit | TaskKind::PoissonChecks => 10,
            TaskKind::EquivalenceTransport => 5,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fedosov,
    Recursive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Zero,
    Nonzero,
}

/// One term `coeff * d^derivative` of a differential operator.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorTerm {
    pub coeff: String,
    pub derivative: Vec<u16>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub task: TaskKind,
    pub projection: Option<String>,
    pub method: Option<Method>,
    /// A square matrix fixture: `S` for factorization, `V0` for unitaries.
    pub matrix: Option<String>,
    /// The classical factor `L0` for factorization.
    pub factor: Option<String>,
    /// Classical fullness witness, inline.
    pub witness: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
    /// `T_1, T_2, ...` of an equivalence transformation.
    pub operators: Option<Vec<Vec<OperatorTerm>>>,
    pub expect: Option<Expect>,
    pub size: Option<usize>,
    pub samples: Option<usize>,
    pub degree: Option<u16>,
    pub terms: Option<usize>,
}

/// Results of a successful task execution.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<CheckReport>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, name: &str) -> &mut CheckReport {
        match self.checks.iter().position(|c| c.name == name) {
            Some(k) => &mut self.checks[k],
            None => {
                self.checks.push(CheckReport::new(name, 0));
                self.checks.last_mut().expect("just pushed")
            }
        }
    }

    fn record(&mut self, name: &str, finding: Option<Finding>) {
        let c = self.check(name);
        c.samples += 1;
        c.failures.extend(finding);
    }

    fn matrices(&mut self, name: &str, sample: usize, lhs: &StarMatrix, rhs: &StarMatrix) -> Result<()> {
        let d = lhs.first_difference(rhs)?;
        self.record(name, d.map(|d| Finding::at(sample, d.order).with_location(d.location())));
        Ok(())
    }

    /// Compares matrices of classical (order-free) quantities.
    fn classical_matrices(&mut self, name: &str, sample: usize, lhs: &StarMatrix, rhs: &StarMatrix) -> Result<()> {
        let d = lhs.first_difference(rhs)?;
        self.record(name, d.map(|d| Finding::sample(sample).with_location(d.location())));
        Ok(())
    }

    fn series(&mut self, name: &str, sample: usize, lhs: &FormalSeries, rhs: &FormalSeries) -> Result<()> {
        let d = lhs.first_difference(rhs)?;
        self.record(name, d.map(|k| Finding::at(sample, k)));
        Ok(())
    }

    fn coefficients(&mut self, name: &str, sample: usize, lhs: &Coefficient, rhs: &Coefficient) -> Result<()> {
        let equal = lhs.try_eq(rhs)?;
        self.record(name, (!equal).then(|| Finding::sample(sample)));
        Ok(())
    }

    /// Merges a report computed for one sample under `name`.
    fn absorb(&mut self, name: &str, sample: usize, report: CheckReport) {
        let c = self.check(name);
        c.samples += 1;
        c.failures.extend(report.failures.into_iter().map(|mut f| {
            f.sample = sample;
            f
        }));
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        self.task.name()
    }

    fn present(&self) -> [(&'static str, bool); 10] {
        [
            ("projection", self.projection.is_some()),
            ("method", self.method.is_some()),
            ("matrix", self.matrix.is_some()),
            ("factor", self.factor.is_some()),
            ("witness", self.witness.is_some()),
            ("f", self.f.is_some()),
            ("g", self.g.is_some()),
            ("operators", self.operators.is_some()),
            ("expect", self.expect.is_some()),
            ("size", self.size.is_some()),
        ]
    }

    /// Checks parameters, fixture references and inline literals.
    pub fn validate(&self, ctx: &Context) -> std::result::Result<(), String> {
        let (required, optional) = self.task.params();
        for (field, set) in self.present() {
            if set && !required.contains(&field) && !optional.contains(&field) {
                return Err(format!("parameter `{field}` does not apply to this task"));
            }
            if !set && required.contains(&field) {
                return Err(format!("missing parameter `{field}`"));
            }
        }
        if self.task == TaskKind::Vey && (self.samples.is_some() || self.degree.is_some() || self.terms.is_some()) {
            return Err("vey takes no sampling parameters".into());
        }
        let fixture = |name: &Option<String>, shape: &str| -> std::result::Result<(), String> {
            let Some(name) = name else { return Ok(()) };
            let m = ctx.fixtures.get(name).ok_or_else(|| format!("unknown fixture `{name}`"))?;
            if shape == "square" && !m.is_square() {
                return Err(format!("fixture `{name}` must be a square matrix"));
            }
            Ok(())
        };
        fixture(&self.projection, "square")?;
        fixture(&self.matrix, "square")?;
        fixture(&self.factor, "square")?;
        if self.factor.is_some() && self.matrix.is_none() {
            return Err("`factor` requires `matrix`".into());
        }
        if self.matrix.is_some() && self.size.is_some() {
            return Err("`size` applies to sampled matrices only".into());
        }
        for (field, src) in [("witness", &self.witness), ("f", &self.f), ("g", &self.g)] {
            if let Some(src) = src {
                ctx.coefficient(src).map_err(|e| format!("{field}: {e}"))?;
            }
        }
        if let Some(ops) = &self.operators {
            self.transform(ctx, ops).map_err(|e| format!("operators: {e}"))?;
        }
        if self.size == Some(0) {
            return Err("size must be positive".into());
        }
        Ok(())
    }

    fn transform(&self, ctx: &Context, ops: &[Vec<OperatorTerm>]) -> Result<EquivalenceTransform> {
        let n = ctx.ring().nvars;
        let ops = ops
            .iter()
            .map(|terms| {
                DiffOperator::new(
                    terms
                        .iter()
                        .map(|t| {
                            if t.derivative.len() != n || n > MAX_VARS {
                                return Err(Error::Dimension(format!("derivative has {} entries, expected {n}", t.derivative.len())));
                            }
                            let mut m = Monomial::one();
                            m.0[..n].copy_from_slice(&t.derivative);
                            Ok((ctx.coefficient(&t.coeff)?, m))
                        })
                        .collect::<Result<Vec<_>>>()?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EquivalenceTransform::new(ctx.ring(), ctx.order(), ops))
    }

    fn sampler(&self, seed: u64) -> Sampler {
        let mut s = Sampler::new(seed);
        s.max_degree = self.degree.unwrap_or(2);
        s.max_terms = self.terms.unwrap_or(2);
        s
    }

    fn samples(&self) -> usize {
        self.samples.unwrap_or_else(|| self.task.samples_by_default())
    }

    fn projection<'a>(&self, ctx: &'a Context) -> &'a StarMatrix {
        ctx.fixture(self.projection.as_deref().expect("validated"))
    }

    fn module<'a>(&self, ctx: &'a Context) -> Result<&'a DeformedModule> {
        ctx.module(self.projection.as_deref().expect("validated"))
    }

    fn witness(&self, ctx: &Context) -> Result<Coefficient> {
        ctx.coefficient(self.witness.as_deref().expect("validated"))
    }

    pub fn run(&self, ctx: &Context, seed: u64) -> Result<Outcome> {
        let mut out = Outcome::default();
        let mut s = self.sampler(seed);
        match self.task {
            TaskKind::Associativity => self.associativity(ctx, &mut s, &mut out)?,
            TaskKind::Hermitian => {
                let (r, n) = (ctx.ring(), ctx.order());
                let pairs: Vec<_> = (0..self.samples()).map(|_| (s.series(r, n), s.series(r, n))).collect();
                out.checks.push(check_hermitian(&ctx.alg, &pairs)?);
            }
            TaskKind::Unit => {
                let items: Vec<_> = (0..self.samples()).map(|_| s.series(ctx.ring(), ctx.order())).collect();
                out.checks.push(check_unit(&ctx.alg, &items)?);
            }
            TaskKind::Vey => {
                let vey = check_vey(&ctx.alg);
                for l in &vey.levels {
                    out.note(format!("C_{} has differential orders ({}, {})", l.r, l.left_order, l.right_order));
                }
                out.checks.push(vey.to_check());
            }
            TaskKind::EquivalenceTransport => self.equivalence_transport(ctx, &mut s, &mut out)?,
            TaskKind::Projection => self.projection_task(ctx, &mut out)?,
            TaskKind::Intertwiner => self.intertwiner(ctx, &mut out)?,
            TaskKind::Factorization => self.factorization(ctx, &mut s, &mut out)?,
            TaskKind::Unitary => self.unitary(ctx, &mut out)?,
            TaskKind::ModuleLaws => self.module_laws(ctx, &mut s, &mut out)?,
            TaskKind::MetricLaws => self.metric_laws(ctx, &mut s, &mut out)?,
            TaskKind::EndomorphismLaws => self.endomorphism_laws(ctx, &mut s, &mut out)?,
            TaskKind::HermitianEquivalence => self.hermitian_equivalence(ctx, &mut s, &mut out)?,
            TaskKind::DeformIsometry => self.deform_isometry(ctx, &mut s, &mut out)?,
            TaskKind::PoissonChecks => self.poisson_checks(ctx, &mut s, &mut out)?,
            TaskKind::ModuleBracketChecks => self.module_bracket_checks(ctx, &mut s, &mut out)?,
            TaskKind::CurvatureCompare => self.curvature_compare(ctx, &mut s, &mut out)?,
            TaskKind::FibredBracketChecks => self.fibred_bracket_checks(ctx, &mut s, &mut out)?,
            TaskKind::StrongFullness => self.strong_fullness(ctx, &mut out)?,
            TaskKind::NiceIdentities => self.nice_identities(ctx, &mut s, &mut out)?,
            TaskKind::ThetaAdjoint => self.theta_adjoint(ctx, &mut s, &mut out)?,
            TaskKind::Degeneration => self.degeneration(ctx, &mut s, &mut out)?,
        }
        Ok(out)
    }

    fn associativity(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let (r, n) = (ctx.ring(), ctx.order());
        let triples: Vec<_> = (0..self.samples()).map(|_| (s.series(r, n), s.series(r, n), s.series(r, n))).collect();
        out.checks.push(check_associativity(&ctx.alg, &triples)?);
        Ok(())
    }

    fn equivalence_transport(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let t = self.transform(ctx, self.operators.as_deref().expect("validated"))?;
        let (r, n) = (ctx.ring(), ctx.order());
        let product = TransportedProduct::new(t.clone(), ctx.alg.clone())?;
        let triples: Vec<_> = (0..self.samples()).map(|_| (s.series(r, n), s.series(r, n), s.series(r, n))).collect();
        let mut assoc = check_associativity(&product, &triples)?;
        assoc.name = "transported_associativity".into();
        out.checks.push(assoc);
        for (k, (f, g, _)) in triples.iter().enumerate() {
            out.series("round_trip", k, &t.apply_inverse(&t.apply(f)?)?, f)?;
            let lhs = t.apply(&crate::star::StarProduct::star(&product, f, g)?)?;
            let rhs = ctx.alg.star_mul(&t.apply(f)?, &t.apply(g)?)?;
            out.series("intertwining", k, &lhs, &rhs)?;
        }
        Ok(())
    }

    fn hermitian_projection(ctx: &Context, p0: &StarMatrix) -> Result<bool> {
        Ok(ctx.alg.is_hermitian() && p0.is_hermitian()?)
    }

    fn projection_task(&self, ctx: &Context, out: &mut Outcome) -> Result<()> {
        let p0 = self.projection(ctx);
        let herm = Self::hermitian_projection(ctx, p0)?;
        let p = match self.method.unwrap_or(Method::Fedosov) {
            Method::Fedosov => deform_projection_fedosov(&ctx.alg, p0, herm)?,
            Method::Recursive => deform_projection_recursive(&ctx.alg, p0)?,
        };
        out.matrices("idempotent", 0, &p.star_mul(&ctx.alg, &p)?, &p)?;
        out.matrices("classical_limit", 0, &p.classical_part(), p0)?;
        if herm {
            out.matrices("hermitian", 0, &p.adjoint(), &p)?;
        } else {
            out.note("hermiticity not checked: the product or P0 is not Hermitian");
        }
        Ok(())
    }

    fn intertwiner(&self, ctx: &Context, out: &mut Outcome) -> Result<()> {
        let alg = &ctx.alg;
        let p0 = self.projection(ctx);
        let p = deform_projection_fedosov(alg, p0, Self::hermitian_projection(ctx, p0)?)?;
        let q = deform_projection_recursive(alg, p0)?;
        let u = idempotent_intertwiner(alg, &p, &q)?;
        let one = alg.unit(p0.rows());
        out.matrices("intertwining", 0, &alg.mul(&u, &p)?, &alg.mul(&q, &u)?)?;
        out.matrices("classical_limit", 0, &u.classical_part(), &one.classical_part())?;
        let v = mat_series_inverse(alg, &u)?;
        out.matrices("invertible", 0, &alg.mul(&u, &v)?, &one)?;
        out.matrices("invertible", 1, &alg.mul(&v, &u)?, &one)?;
        Ok(())
    }

    fn factorization(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let alg = &ctx.alg;
        let cases: Vec<(StarMatrix, StarMatrix)> = match &self.matrix {
            Some(name) => {
                let sm = ctx.fixture(name).clone();
                let l0 = match &self.factor {
                    Some(f) => ctx.fixture(f).classical_part(),
                    None => alg.unit(sm.rows()).classical_part(),
                };
                vec![(sm, l0)]
            }
            None => {
                let size = self.size.unwrap_or(2);
                (0..self.samples())
                    .map(|_| (s.hermitian_near_identity(ctx.ring(), ctx.order(), size), alg.unit(size).classical_part()))
                    .collect()
            }
        };
        for (k, (sm, l0)) in cases.iter().enumerate() {
            let l = hermitian_factorization(alg, sm, l0)?;
            out.matrices("factorization", k, &alg.mul(&l.adjoint(), &l)?, sm)?;
            out.matrices("classical_limit", k, &l.classical_part(), l0)?;
        }
        Ok(())
    }

    fn unitary(&self, ctx: &Context, out: &mut Outcome) -> Result<()> {
        let alg = &ctx.alg;
        let v0 = ctx.fixture(self.matrix.as_deref().expect("validated"));
        let u = deform_unitary(alg, &v0.classical_part())?;
        let one = alg.unit(v0.rows());
        out.matrices("unitarity", 0, &alg.mul(&u.adjoint(), &u)?, &one)?;
        out.matrices("unitarity", 1, &alg.mul(&u, &u.adjoint())?, &one)?;
        out.matrices("classical_limit", 0, &u.classical_part(), &v0.classical_part())?;
        Ok(())
    }

    fn element(dm: &DeformedModule, s: &mut Sampler) -> Result<StarMatrix> {
        dm.project(&s.matrix(dm.alg().ring(), dm.alg().order(), dm.n(), 1))
    }

    fn section(p0: &StarMatrix, s: &mut Sampler) -> Result<StarMatrix> {
        p0.classical_part().cauchy_mul(&s.classical_matrix(p0.ring(), p0.order(), p0.rows(), 1))
    }

    /// A random element of `P0 M_n(A) P0 [[l]]`.
    fn endomorphism(p0: &StarMatrix, s: &mut Sampler, classical: bool) -> Result<StarMatrix> {
        let (r, n, k) = (p0.ring(), p0.order(), p0.rows());
        let m = if classical { s.classical_matrix(r, n, k, k) } else { s.matrix(r, n, k, k) };
        p0.cauchy_mul(&m)?.cauchy_mul(p0)
    }

    /// `C_1` applied entrywise to a matrix product, on classical parts.
    fn first_cochain(ctx: &Context, a: &StarMatrix, b: &StarMatrix) -> Result<StarMatrix> {
        let mut entries = Vec::with_capacity(a.rows() * b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = ctx.ring().zero();
                for q in 0..a.cols() {
                    acc = acc.try_add(&ctx.alg.apply_cochain(1, a.get(i, q).classical_part(), b.get(q, j).classical_part())?)?;
                }
                entries.push(acc);
            }
        }
        StarMatrix::from_classical(a.rows(), b.cols(), entries, ctx.order())
    }

    fn module_laws(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let dm = self.module(ctx)?;
        let alg = &ctx.alg;
        for k in 0..self.samples() {
            let x = Self::element(dm, s)?;
            let a = s.series(ctx.ring(), ctx.order());
            let b = s.series(ctx.ring(), ctx.order());
            let lhs = dm.action(&dm.action(&x, &a)?, &b)?;
            out.matrices("action_associativity", k, &lhs, &dm.action(&x, &alg.star_mul(&a, &b)?)?)?;
            out.matrices("action_unit", k, &dm.action(&x, &alg.one())?, &x)?;
            if ctx.order() >= 1 {
                let x0 = x.classical_part();
                let a0 = FormalSeries::constant(a.classical_part().clone(), ctx.order());
                let r1 = dm.action(&x0, &a0)?.coefficient_matrix(1);
                let scalar = StarMatrix::square(1, vec![a0])?;
                out.classical_matrices("first_order_action", k, &r1, &dm.p0().cauchy_mul(&Self::first_cochain(ctx, &x0, &scalar)?)?)?;
            }
        }
        Ok(())
    }

    fn metric_laws(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let dm = self.module(ctx)?;
        let alg = &ctx.alg;
        for k in 0..self.samples() {
            let x = Self::element(dm, s)?;
            let y = Self::element(dm, s)?;
            let a = s.series(ctx.ring(), ctx.order());
            let hxy = dm.metric(&x, &y)?;
            out.series("right_linearity", k, &dm.metric(&x, &dm.action(&y, &a)?)?, &alg.star_mul(&hxy, &a)?)?;
            out.series("left_antilinearity", k, &dm.metric(&dm.action(&x, &a)?, &y)?, &alg.star_mul(&a.conj(), &hxy)?)?;
            out.series("conjugate_symmetry", k, &dm.metric(&y, &x)?.conj(), &hxy)?;
            let h0 = dm.classical_metric(&x.classical_part(), &y.classical_part())?;
            out.coefficients("classical_limit", k, hxy.classical_part(), h0.classical_part())?;
        }
        Ok(())
    }

    fn endomorphism_laws(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let dm = self.module(ctx)?;
        let end = dm.endo();
        let p0 = dm.p0();
        let unit = dm.endo_unit()?;
        for k in 0..self.samples() {
            let l = Self::endomorphism(p0, s, false)?;
            let m = Self::endomorphism(p0, s, false)?;
            let n = Self::endomorphism(p0, s, false)?;
            let lm = end.mul(&l, &m)?;
            out.matrices("associativity", k, &end.mul(&lm, &n)?, &end.mul(&l, &end.mul(&m, &n)?)?)?;
            out.matrices("unit", k, &end.mul(unit, &l)?, &l)?;
            out.matrices("unit", k, &end.mul(&l, unit)?, &l)?;
            out.matrices("adjoint", k, &lm.adjoint(), &end.mul(&m.adjoint(), &l.adjoint())?)?;
            if ctx.order() >= 1 {
                let (l0, m0) = (l.classical_part(), m.classical_part());
                let b1 = end.mul(&l0, &m0)?.coefficient_matrix(1);
                let expected = p0.cauchy_mul(&Self::first_cochain(ctx, &l0, &m0)?)?.cauchy_mul(p0)?;
                out.classical_matrices("first_order_product", k, &b1, &expected)?;
            }
        }
        out.classical_matrices("unit_classical_limit", 0, &unit.classical_part(), p0)?;
        Ok(())
    }

    fn hermitian_equivalence(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let dm = self.module(ctx)?;
        let dm2 = DeformedModule::recursive(&ctx.alg, dm.p0())?;
        let iso = hermitian_equivalence(dm, &dm2)?;
        for k in 0..self.samples() {
            let x = Self::element(dm, s)?;
            let y = Self::element(dm, s)?;
            let a = s.series(ctx.ring(), ctx.order());
            let xa = dm.action(&x, &a)?;
            out.matrices("module_map", k, &iso.t.apply(dm, &dm2, &xa)?, &dm2.action(&iso.t.apply(dm, &dm2, &x)?, &a)?)?;
            let (tx, ty) = (iso.t_iso.apply(dm, &dm2, &x)?, iso.t_iso.apply(dm, &dm2, &y)?);
            out.series("isometry", k, &dm2.metric(&tx, &ty)?, &dm.metric(&x, &y)?)?;
            out.matrices("isometric_module_map", k, &iso.t_iso.apply(dm, &dm2, &xa)?, &dm2.action(&tx, &a)?)?;
            out.classical_matrices("classical_limit", k, &tx.classical_part(), &x.classical_part())?;
        }
        Ok(())
    }

    fn deform_isometry(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let dm = self.module(ctx)?;
        let v0 = ctx.fixture(self.matrix.as_deref().expect("validated")).classical_part();
        let res = deform_isometry(dm, &v0)?;
        out.classical_matrices("classical_limit", 0, &res.v.classical_part(), &v0.cauchy_mul(dm.p0())?)?;
        let end = dm.endo();
        let vinv = mat_series_inverse(&end, &res.v)?;
        out.matrices("invertible", 0, &end.mul(&res.v, &vinv)?, dm.endo_unit()?)?;
        for k in 0..self.samples() {
            let x = Self::element(dm, s)?;
            let y = Self::element(dm, s)?;
            let (vx, vy) = (dm.endo_apply(&res.v, &x)?, dm.endo_apply(&res.v, &y)?);
            out.series("isometry", k, &dm.metric(&vx, &vy)?, &dm.metric(&x, &y)?)?;
        }
        if res.u.is_classical() {
            out.note("the unitary deformation of V0 is undeformed");
        }
        Ok(())
    }

    fn poisson_checks(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let pd = PoissonData::new(&ctx.alg);
        if !pd.is_skew() {
            out.record("skew_first_cochain", Some(Finding::sample(0).with_message("C_1 is not antisymmetric")));
        } else {
            out.record("skew_first_cochain", None);
        }
        if let Some(theta) = &ctx.theta {
            let tensor = pd.tensor()?;
            for (a, row) in tensor.iter().enumerate() {
                for (b, t) in row.iter().enumerate() {
                    let expected = ctx.ring().constant(GaussianRational::real(theta[a][b].clone()));
                    let equal = t.try_eq(&expected)?;
                    out.record("canonical_tensor", (!equal).then(|| Finding::sample(0).with_location(format!("({a},{b})")).with_message(format!("{{x{}, x{}}} = {t}", a + 1, b + 1))));
                }
            }
        }
        let r = ctx.ring();
        for k in 0..self.samples() {
            let (f, g, h) = (s.coefficient(r), s.coefficient(r), s.coefficient(r));
            let fg = pd.bracket(&f, &g)?;
            out.coefficients("antisymmetry", k, &fg, &-&pd.bracket(&g, &f)?)?;
            let jacobi = pd
                .bracket(&f, &pd.bracket(&g, &h)?)?
                .try_add(&pd.bracket(&g, &pd.bracket(&h, &f)?)?)?
                .try_add(&pd.bracket(&h, &fg)?)?;
            out.coefficients("jacobi", k, &jacobi, &r.zero())?;
            let leibniz = pd.bracket(&f, &g)?.try_mul(&h)?.try_add(&g.try_mul(&pd.bracket(&f, &h)?)?)?;
            out.coefficients("leibniz", k, &pd.bracket(&f, &g.try_mul(&h)?)?, &leibniz)?;
        }
        Ok(())
    }

    fn require_first_order(ctx: &Context) -> Result<()> {
        if ctx.order() == 0 {
            return Err(Error::Constraint("first-order quantities need truncation order at least 1".into()));
        }
        Ok(())
    }

    fn module_bracket_checks(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        Self::require_first_order(ctx)?;
        let dm = self.module(ctx)?;
        let pd = PoissonData::new(&ctx.alg);
        let cd = ConnectionData::new(dm.p0())?;
        let times = |x: &StarMatrix, g: &Coefficient| x.map_entries(|e| e.mul_coefficient(g));
        let minus_two_i = GaussianRational::i() * GaussianRational::from_int(-2);
        for k in 0..self.samples() {
            let x = Self::section(dm.p0(), s)?;
            let f = s.coefficient(ctx.ring());
            let g = s.coefficient(ctx.ring());
            let xf = module_bracket(dm, &x, &f)?;
            let r1 = dm.action(&x, &FormalSeries::constant(f.clone(), ctx.order()))?.coefficient_matrix(1);
            out.classical_matrices("first_order_action", k, &xf, &r1.scale(&minus_two_i))?;
            let lhs = module_bracket(dm, &times(&x, &g)?, &f)?;
            let rhs = times(&xf, &g)?.try_add(&times(&x, &pd.bracket(&g, &f)?)?)?;
            out.classical_matrices("leibniz_module", k, &lhs, &rhs)?;
            let lhs = module_bracket(dm, &x, &f.try_mul(&g)?)?;
            let rhs = times(&xf, &g)?.try_add(&times(&module_bracket(dm, &x, &g)?, &f)?)?;
            out.classical_matrices("leibniz_algebra", k, &lhs, &rhs)?;
            out.classical_matrices("covariant_derivative", k, &levi_civita(&cd, &pd.hamiltonian(&f)?, &x)?, &xf)?;
        }
        Ok(())
    }

    fn curvature_compare(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        Self::require_first_order(ctx)?;
        let dm = self.module(ctx)?;
        let pd = PoissonData::new(&ctx.alg);
        let cd = ConnectionData::new(dm.p0())?;
        let f = ctx.coefficient(self.f.as_deref().expect("validated"))?;
        let g = ctx.coefficient(self.g.as_deref().expect("validated"))?;
        let (xf, xg) = (pd.hamiltonian(&f)?, pd.hamiltonian(&g)?);
        let mut sections = dm.spanning_set();
        for _ in 0..self.samples() {
            sections.push(Self::section(dm.p0(), s)?);
        }
        let mut nonzero = false;
        for (k, x) in sections.iter().enumerate() {
            let re = module_curvature(dm, &f, &g, x)?;
            nonzero |= !re.is_zero();
            out.classical_matrices("curvature", k, &re, &connection_curvature(&cd, &xg, &xf, x)?)?;
            out.classical_matrices("curvature_antisymmetry", k, &re, &connection_curvature(&cd, &xf, &xg, x)?.neg())?;
        }
        out.note(format!("R_E(f, g) = R(X_g, X_f) = -R(X_f, X_g) with X_f = {{., f}}; module curvature is {}", if nonzero { "nonzero" } else { "zero" }));
        match self.expect {
            Some(Expect::Nonzero) => out.record("expectation", (!nonzero).then(|| Finding::sample(0).with_message("curvature vanishes on all sections"))),
            Some(Expect::Zero) => out.record("expectation", nonzero.then(|| Finding::sample(0).with_message("curvature is nonzero"))),
            None => {}
        }
        Ok(())
    }

    fn fibred_bracket_checks(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        Self::require_first_order(ctx)?;
        let dm = self.module(ctx)?;
        let pd = PoissonData::new(&ctx.alg);
        let p0 = dm.p0();
        let center = |f: &Coefficient| p0.map_entries(|e| e.mul_coefficient(f));
        for k in 0..self.samples() {
            let l0 = Self::endomorphism(p0, s, true)?;
            let f = s.coefficient(ctx.ring());
            let g = s.coefficient(ctx.ring());
            let fb = fibred_bracket(dm, &l0, &center(&f)?)?;
            out.classical_matrices("endomorphism_bracket", k, &fb.from_product, &fb.direct)?;
            let fb = fibred_bracket(dm, &center(&f)?, &center(&g)?)?;
            let expected = center(&pd.bracket(&f, &g)?)?;
            out.classical_matrices("center", k, &fb.direct, &expected)?;
            out.classical_matrices("center", k, &fb.from_product, &expected)?;
        }
        Ok(())
    }

    fn strong_fullness(&self, ctx: &Context, out: &mut Outcome) -> Result<()> {
        let tau0 = self.witness(ctx)?;
        let mut classical = verify_strongly_full_classical(self.projection(ctx), &tau0)?;
        classical.name = "strong_fullness/classical".into();
        let passed = classical.passed();
        out.checks.push(classical);
        if !passed {
            out.note("the classical witness fails, so no deformed witness is constructed");
            return Ok(());
        }
        let dm = self.module(ctx)?;
        let w = deform_full_witness(dm, &tau0)?;
        let mut deformed = verify_strongly_full(&ctx.alg, dm.p(), &w)?;
        deformed.name = "strong_fullness/deformed".into();
        out.checks.push(deformed);
        out.note(format!("deformed witness tau = {}", w.tau));
        Ok(())
    }

    fn nice_identities(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let tau0 = self.witness(ctx)?;
        let p0 = self.projection(ctx);
        let cm = ClassicalModule::new(p0);
        let tau_c = FormalSeries::constant(tau0.clone(), ctx.order());
        let dm = self.module(ctx)?;
        let w = deform_full_witness(dm, &tau0)?;
        for k in 0..self.samples() {
            let (x, y) = (Self::section(p0, s)?, Self::section(p0, s)?);
            for r in verify_nice_identities(&cm, &tau_c, &x, &y)? {
                out.absorb(&format!("classical/{}", r.name), k, r);
            }
            let (x, y) = (Self::element(dm, s)?, Self::element(dm, s)?);
            for r in verify_nice_identities(dm, &w.tau, &x, &y)? {
                out.absorb(&format!("deformed/{}", r.name), k, r);
            }
        }
        Ok(())
    }

    fn theta_adjoint(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        let dm = self.module(ctx)?;
        let zero = StarMatrix::zero(ctx.ring(), ctx.order(), dm.n(), 1);
        for k in 0..self.samples() {
            let v: Vec<StarMatrix> = (0..4).map(|_| Self::element(dm, s)).collect::<Result<_>>()?;
            out.absorb("theta_adjoint", k, theta_adjointability(dm, &v[0], &v[1], &v[2], &v[3])?);
            out.absorb("self_adjoint", k, theta_adjointability(dm, &v[0], &v[0], &v[2], &v[3])?);
            let lhs = dm.inner(&dm.theta(&v[0], &v[1], &zero)?, &v[3])?;
            out.series("zero_argument", k, &lhs, &ctx.alg.zero())?;
        }
        Ok(())
    }

    fn degeneration(&self, ctx: &Context, s: &mut Sampler, out: &mut Outcome) -> Result<()> {
        if !ctx.alg.is_undeformed() {
            return Err(Error::Constraint("degeneration checks need the undeformed product".into()));
        }
        let alg = &ctx.alg;
        let p0 = self.projection(ctx);
        out.matrices("projection", 0, &deform_projection_fedosov(alg, p0, Self::hermitian_projection(ctx, p0)?)?, p0)?;
        out.matrices("projection", 1, &deform_projection_recursive(alg, p0)?, p0)?;
        let dm = self.module(ctx)?;
        let recursive = DeformedModule::recursive(alg, p0)?;
        out.matrices("intertwiner", 0, &module_equivalence(dm, &recursive)?.k, &alg.unit(dm.n()))?;
        out.matrices("endomorphism_unit", 0, dm.endo_unit()?, p0)?;
        for k in 0..self.samples() {
            let x = Self::element(dm, s)?;
            let y = Self::element(dm, s)?;
            let a = s.series(ctx.ring(), ctx.order());
            out.matrices("action", k, &dm.action(&x, &a)?, &x.map_entries(|e| e.try_cauchy_mul(&a))?)?;
            out.series("metric", k, &dm.metric(&x, &y)?, &dm.classical_metric(&x, &y)?)?;
            out.matrices("isomorphism", k, &dm.embed(&x)?, &x)?;
            let l = Self::endomorphism(p0, s, false)?;
            out.matrices("isomorphism", k, &dm.endo().embed(&l)?, &l)?;
        }
        if let Some(src) = &self.witness {
            let tau0 = ctx.coefficient(src)?;
            let w = deform_full_witness(dm, &tau0)?;
            out.series("witness", 0, &w.tau, &FormalSeries::constant(tau0, ctx.order()))?;
        }
        Ok(())
    }
}
