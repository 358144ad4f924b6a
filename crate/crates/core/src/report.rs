//! Outcomes of identity checks.

use serde::Serialize;

/// A single failed identity instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    /// Index of the sample (or fixture element) that failed.
    pub sample: usize,
    /// First order in the formal parameter at which the identity fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Offending matrix entry, vector component or basis index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Finding {
    pub fn at(sample: usize, order: usize) -> Self {
        Self { sample, order: Some(order), location: None, message: None }
    }

    /// A failure of an order-free (classical) identity.
    pub fn sample(sample: usize) -> Self {
        Self { sample, order: None, location: None, message: None }
    }

    pub fn with_location(mut self, loc: impl Into<String>) -> Self {
        self.location = Some(loc.into());
        self
    }

    pub fn with_message(mut self, msg: impl Into<String>) -> Self {
        self.message = Some(msg.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub failures: Vec<Finding>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, samples: usize) -> Self {
        Self { name: name.into(), samples, failures: Vec::new() }
    }

    pub fn from_findings(name: impl Into<String>, samples: usize, findings: impl IntoIterator<Item = Option<Finding>>) -> Self {
        Self { name: name.into(), samples, failures: findings.into_iter().flatten().collect() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failing_order(&self) -> Option<usize> {
        self.failures.iter().filter_map(|f| f.order).min()
    }

    pub fn push(&mut self, f: Finding) {
        self.failures.push(f);
    }
}
