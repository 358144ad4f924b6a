//! Scenario runner behind the `stardeform` binary: loads scenarios, runs
//! their tasks and assembles deterministic JSON reports.

mod scenario;
mod suites;
mod tasks;

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

pub use scenario::{parse_constant, Context, Scenario, MAX_ORDER};
pub use suites::Suite;
pub use tasks::{TaskKind, TaskSpec};

use crate::par;
use crate::report::CheckReport;

/// Name of the environment variable capping the truncation order.
pub const MAX_ORDER_ENV: &str = "STARDEFORM_MAX_ORDER";

/// Problems with the input, reported with exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}: line {line}, column {column}: {message}")]
    Json { origin: String, line: usize, column: usize, message: String },
    #[error("{context}: {message}")]
    Scenario { context: String, message: String },
    #[error("order {0} outside the supported range 0..={MAX_ORDER}")]
    Order(usize),
    #[error("invalid {MAX_ORDER_ENV}: `{0}`")]
    MaxOrder(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn worst(self, o: Status) -> Status {
        match (self, o) {
            (Status::Error, _) | (_, Status::Error) => Status::Error,
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            _ => Status::Pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub task: TaskKind,
    pub status: Status,
    pub first_failing_order: Option<usize>,
    /// The first failing check and, when known, the offending entry.
    pub location: Option<String>,
    pub checks: Vec<CheckReport>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub seed: u64,
    pub order: usize,
    pub status: Status,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub engine: String,
    pub seed: Option<u64>,
    pub status: Status,
    pub scenarios: Vec<ScenarioReport>,
}

impl Report {
    fn new(seed: Option<u64>, scenarios: Vec<ScenarioReport>) -> Self {
        let status = scenarios.iter().fold(Status::Pass, |s, r| s.worst(r.status));
        Self { engine: format!("stardeform {}", env!("CARGO_PKG_VERSION")), seed, status, scenarios }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per task.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.scenarios {
            for t in &s.tasks {
                let status = match t.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Error => "ERROR",
                };
                out += &format!("{status} {}[{}] {}", s.name, t.index, t.task.name());
                if let Some(loc) = &t.location {
                    out += &format!(" at {loc}");
                }
                if let Some(k) = t.first_failing_order {
                    out += &format!(" (order {k})");
                }
                if let Some(e) = &t.error {
                    out += &format!(": {e}");
                }
                out.push('\n');
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub order: Option<usize>,
    pub seed: Option<u64>,
    /// Cap on the truncation order, usually from the environment.
    pub max_order: Option<usize>,
    pub timing: bool,
}

impl RunOptions {
    /// Reads the order cap from the environment.
    pub fn with_env_cap(mut self) -> Result<Self, CliError> {
        if let Ok(v) = std::env::var(MAX_ORDER_ENV) {
            self.max_order = Some(v.trim().parse().map_err(|_| CliError::MaxOrder(v.clone()))?);
        }
        Ok(self)
    }
}

pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string().rsplit_once(" at line").map(|(m, _)| m.to_string()).unwrap_or_else(|| e.to_string()),
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_scenario(&text, &path.display().to_string())
}

fn effective_order(requested: usize, opts: &RunOptions) -> Result<usize, CliError> {
    if requested > MAX_ORDER {
        return Err(CliError::Order(requested));
    }
    Ok(opts.max_order.map_or(requested, |cap| requested.min(cap)))
}

/// Per-task seed, independent of execution order.
fn task_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn summarize(index: usize, task: &TaskSpec, result: crate::Result<tasks::Outcome>, elapsed_ms: Option<u64>) -> TaskReport {
    let mut report = TaskReport {
        index,
        task: task.task,
        status: Status::Pass,
        first_failing_order: None,
        location: None,
        checks: Vec::new(),
        notes: Vec::new(),
        error: None,
        elapsed_ms,
    };
    match result {
        Err(e) => {
            report.status = Status::Error;
            report.error = Some(e.to_string());
        }
        Ok(outcome) => {
            report.first_failing_order = outcome.checks.iter().filter_map(|c| c.first_failing_order()).min();
            if let Some(c) = outcome.checks.iter().find(|c| !c.passed()) {
                report.status = Status::Fail;
                let f = &c.failures[0];
                report.location = Some(match &f.location {
                    Some(loc) => format!("{} sample {} entry {loc}", c.name, f.sample),
                    None => format!("{} sample {}", c.name, f.sample),
                });
            }
            report.checks = outcome.checks;
            report.notes = outcome.notes;
        }
    }
    report
}

/// Runs every task of a scenario; tasks may run in parallel but the report
/// keeps declaration order.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<ScenarioReport, CliError> {
    let order = effective_order(match opts.order {
        Some(n) => n,
        None => scenario.declared_order()?,
    }, opts)?;
    let seed = opts.seed.unwrap_or(scenario.seed);
    let ctx = Context::new(scenario, order)?;
    let tasks = par::map_range(scenario.tasks.len(), |k| {
        let task = &scenario.tasks[k];
        let start = Instant::now();
        let result = task.run(&ctx, task_seed(seed, k));
        let elapsed = opts.timing.then(|| start.elapsed().as_millis() as u64);
        summarize(k, task, result, elapsed)
    });
    let status = tasks.iter().fold(Status::Pass, |s, t| s.worst(t.status));
    Ok(ScenarioReport { name: scenario.name.clone(), seed, order, status, tasks })
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Report, CliError> {
    let scenario = load_scenario(path)?;
    let report = run_scenario(&scenario, opts)?;
    Ok(Report::new(Some(report.seed), vec![report]))
}

pub fn check_suite(suite: Suite, opts: &RunOptions) -> Result<Report, CliError> {
    let scenarios = suite.scenarios()?;
    let reports = scenarios.iter().map(|s| run_scenario(s, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(opts.seed, reports))
}
