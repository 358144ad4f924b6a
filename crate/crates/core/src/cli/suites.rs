//! Built-in property suites, stored as embedded scenario files.

use super::{parse_scenario, CliError, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Algebra,
    Matrix,
    Module,
    Semiclassical,
    Morita,
    All,
}

const ALGEBRA: &str = include_str!("suites/algebra.json");
const MATRIX: &str = include_str!("suites/matrix.json");
const MODULE: &str = include_str!("suites/module.json");
const SEMICLASSICAL: &str = include_str!("suites/semiclassical.json");
const MORITA: &str = include_str!("suites/morita.json");
const DEGENERATION: &str = include_str!("suites/degeneration.json");

impl Suite {
    fn sources(self) -> Vec<(&'static str, &'static str)> {
        match self {
            Suite::Algebra => vec![("algebra", ALGEBRA)],
            Suite::Matrix => vec![("matrix", MATRIX)],
            Suite::Module => vec![("module", MODULE)],
            Suite::Semiclassical => vec![("semiclassical", SEMICLASSICAL)],
            Suite::Morita => vec![("morita", MORITA)],
            Suite::All => [Suite::Algebra, Suite::Matrix, Suite::Module, Suite::Semiclassical, Suite::Morita]
                .into_iter()
                .flat_map(Suite::sources)
                .chain([("degeneration", DEGENERATION)])
                .collect(),
        }
    }

    pub fn scenarios(self) -> Result<Vec<Scenario>, CliError> {
        self.sources().into_iter().map(|(name, text)| parse_scenario(text, &format!("<suite {name}>"))).collect()
    }
}
