//! Scenario files: the algebra, named fixtures and a task list.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::BigRational;
use serde::Deserialize;

use super::tasks::TaskSpec;
use super::CliError;
use crate::coeff::{CoeffKind, CoeffRing, Coefficient, GaussianRational, Monomial, MAX_VARS};
use crate::error::Result;
use crate::matrix::StarMatrix;
use crate::module::DeformedModule;
use crate::parse::{parse_coefficient, parse_series};
use crate::star::{Cochain, CochainStack, CochainTerm, StarAlgebra};

/// Largest truncation order accepted anywhere.
pub const MAX_ORDER: usize = 6;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// May instead be given inside `algebra`.
    #[serde(default)]
    pub order: Option<usize>,
    pub algebra: AlgebraSpec,
    #[serde(default)]
    pub fixtures: BTreeMap<String, FixtureSpec>,
    pub tasks: Vec<TaskSpec>,
}

/// A rational number written as a JSON integer or as a string like `"-1/2"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Text(String),
}

impl RationalSpec {
    fn value(&self) -> std::result::Result<BigRational, String> {
        match self {
            RationalSpec::Int(n) => Ok(BigRational::from_integer((*n).into())),
            RationalSpec::Text(s) => BigRational::from_str(s.trim()).map_err(|_| format!("`{s}` is not a rational number")),
        }
    }
}

fn default_kind() -> CoeffKind {
    CoeffKind::Rational
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// Moyal-Weyl on `R^{2n}`; `theta` defaults to the standard symplectic tensor.
    Moyal {
        n: usize,
        #[serde(default)]
        theta: Option<Vec<Vec<RationalSpec>>>,
        #[serde(default = "default_kind")]
        coefficients: CoeffKind,
        #[serde(default)]
        order: Option<usize>,
    },
    /// An explicit stack; `cochains[k]` is `C_{k+1}`.
    Custom {
        dim: usize,
        #[serde(default = "default_kind")]
        coefficients: CoeffKind,
        cochains: Vec<Vec<TermSpec>>,
        #[serde(default)]
        hermitian: bool,
        #[serde(default)]
        vey_orders: Vec<u32>,
        #[serde(default)]
        order: Option<usize>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub weight: String,
    pub left: Vec<u16>,
    pub right: Vec<u16>,
}

/// A scalar literal or a matrix given as a list of rows.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum FixtureSpec {
    Scalar(String),
    Matrix(Vec<Vec<String>>),
}

/// Parses a complex rational constant such as `"i/2"`.
pub fn parse_constant(src: &str) -> std::result::Result<GaussianRational, String> {
    let c = parse_coefficient(src, CoeffRing::polynomial(0)).map_err(|e| e.to_string())?;
    c.constant_value().ok_or_else(|| format!("`{src}` is not a constant"))
}

fn monomial(exps: &[u16], dim: usize, what: &str) -> std::result::Result<Monomial, String> {
    if exps.len() != dim || dim > MAX_VARS {
        return Err(format!("{what} has {} exponents, expected {dim}", exps.len()));
    }
    let mut m = Monomial::one();
    m.0[..dim].copy_from_slice(exps);
    Ok(m)
}

impl Scenario {
    /// The declared truncation order, from the top level or the algebra.
    pub fn declared_order(&self) -> std::result::Result<usize, CliError> {
        let nested = match &self.algebra {
            AlgebraSpec::Moyal { order, .. } | AlgebraSpec::Custom { order, .. } => *order,
        };
        let invalid = |message: &str| CliError::Scenario { context: "order".into(), message: message.into() };
        match (self.order, nested) {
            (Some(a), Some(b)) if a != b => Err(invalid("top-level order and algebra.order disagree")),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(invalid("missing; give `order` or `algebra.order`")),
        }
    }
}

impl AlgebraSpec {
    /// Theta of a Moyal algebra, if this is one.
    pub fn theta(&self) -> std::result::Result<Option<Vec<Vec<BigRational>>>, String> {
        match self {
            AlgebraSpec::Moyal { n, theta: Some(t), .. } => {
                let rows = t.iter().map(|row| row.iter().map(RationalSpec::value).collect()).collect::<std::result::Result<Vec<Vec<_>>, _>>()?;
                if rows.len() != 2 * n || rows.iter().any(|r| r.len() != 2 * n) {
                    return Err(format!("theta must be {0}x{0}", 2 * n));
                }
                Ok(Some(rows))
            }
            AlgebraSpec::Moyal { n, theta: None, .. } => Ok(Some(crate::star::standard_theta(*n))),
            AlgebraSpec::Custom { .. } => Ok(None),
        }
    }

    pub fn build(&self, order: usize) -> std::result::Result<StarAlgebra, CliError> {
        let invalid = |message: String| CliError::Scenario { context: "algebra".into(), message };
        match self {
            AlgebraSpec::Moyal { n, coefficients, .. } => {
                let theta = self.theta().map_err(invalid)?.expect("moyal theta");
                StarAlgebra::moyal(*n, &theta, *coefficients, order).map_err(|e| invalid(e.to_string()))
            }
            AlgebraSpec::Custom { dim, coefficients, cochains, hermitian, vey_orders, .. } => {
                let ring = CoeffRing::new(*dim, *coefficients).map_err(|e| invalid(e.to_string()))?;
                let mut stack = vec![Cochain::pointwise()];
                for (k, terms) in cochains.iter().enumerate() {
                    let at = |t: usize| format!("cochains[{k}][{t}]");
                    let terms = terms
                        .iter()
                        .enumerate()
                        .map(|(t, spec)| {
                            Ok(CochainTerm {
                                weight: parse_constant(&spec.weight).map_err(|m| format!("{}: {m}", at(t)))?,
                                left: monomial(&spec.left, *dim, &format!("{}.left", at(t)))?,
                                right: monomial(&spec.right, *dim, &format!("{}.right", at(t)))?,
                            })
                        })
                        .collect::<std::result::Result<Vec<_>, String>>()
                        .map_err(invalid)?;
                    stack.push(Cochain::new(terms));
                }
                let stack = CochainStack { dim: *dim, cochains: stack, hermitian: *hermitian, vey_orders: vey_orders.clone() };
                StarAlgebra::new(ring, stack, order).map_err(|e| invalid(e.to_string()))
            }
        }
    }
}

impl FixtureSpec {
    fn build(&self, name: &str, alg: &StarAlgebra) -> std::result::Result<StarMatrix, CliError> {
        let parse = |src: &str, at: String| {
            parse_series(src, alg.ring(), alg.order()).map_err(|e| CliError::Scenario { context: format!("fixtures.{name}{at}"), message: e.to_string() })
        };
        let bad_shape = |message: &str| CliError::Scenario { context: format!("fixtures.{name}"), message: message.into() };
        match self {
            FixtureSpec::Scalar(s) => Ok(StarMatrix::square(1, vec![parse(s, String::new())?]).expect("1x1")),
            FixtureSpec::Matrix(rows) => {
                let cols = rows.first().map(|r| r.len()).unwrap_or(0);
                if cols == 0 || rows.iter().any(|r| r.len() != cols) {
                    return Err(bad_shape("rows must be non-empty and of equal length"));
                }
                let mut entries = Vec::with_capacity(rows.len() * cols);
                for (i, row) in rows.iter().enumerate() {
                    for (j, src) in row.iter().enumerate() {
                        entries.push(parse(src, format!("[{i}][{j}]"))?);
                    }
                }
                StarMatrix::new(rows.len(), cols, entries).map_err(|e| bad_shape(&e.to_string()))
            }
        }
    }
}

/// A scenario with its algebra and fixtures built at the effective order.
pub struct Context {
    pub alg: StarAlgebra,
    /// Poisson tensor of a Moyal algebra.
    pub theta: Option<Vec<Vec<BigRational>>>,
    pub fixtures: BTreeMap<String, StarMatrix>,
    modules: BTreeMap<String, OnceLock<Result<DeformedModule>>>,
}

impl Context {
    pub fn new(scenario: &Scenario, order: usize) -> std::result::Result<Self, CliError> {
        let alg = scenario.algebra.build(order)?;
        let theta = scenario.algebra.theta().map_err(|message| CliError::Scenario { context: "algebra".into(), message })?;
        let fixtures = scenario
            .fixtures
            .iter()
            .map(|(name, spec)| Ok((name.clone(), spec.build(name, &alg)?)))
            .collect::<std::result::Result<BTreeMap<_, _>, CliError>>()?;
        let modules = fixtures.keys().map(|k| (k.clone(), OnceLock::new())).collect();
        let ctx = Self { alg, theta, fixtures, modules };
        for (i, task) in scenario.tasks.iter().enumerate() {
            task.validate(&ctx).map_err(|message| CliError::Scenario { context: format!("tasks[{i}] ({})", task.name()), message })?;
        }
        Ok(ctx)
    }

    pub fn ring(&self) -> CoeffRing {
        self.alg.ring()
    }

    pub fn order(&self) -> usize {
        self.alg.order()
    }

    /// A fixture known to exist (names are validated when the context is built).
    pub fn fixture(&self, name: &str) -> &StarMatrix {
        &self.fixtures[name]
    }

    /// The Fedosov deformation of a projection fixture, computed once.
    pub fn module(&self, name: &str) -> Result<&DeformedModule> {
        self.modules[name].get_or_init(|| DeformedModule::fedosov(&self.alg, self.fixture(name))).as_ref().map_err(Clone::clone)
    }

    pub fn coefficient(&self, src: &str) -> Result<Coefficient> {
        parse_coefficient(src, self.ring())
    }
}
