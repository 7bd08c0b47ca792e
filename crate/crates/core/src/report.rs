//! Verdicts and the JSON report.

use serde::{Serialize, Serializer};

use crate::algebra::Basis;
use crate::oracle::GhostPolynomial;
use crate::scalar::{format_q, Q};
use crate::tensor::MultiMap;

pub const MAX_WITNESSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bar,
    Recursion,
    ZeroOrder,
    Linear,
    Quadratic,
    Rest,
    CubicComponent,
    Oracle,
    Hamiltonian,
    Nonassoc,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub input: Vec<Basis>,
    pub output: Vec<Basis>,
    #[serde(serialize_with = "ser_q")]
    pub value: Q,
}

fn ser_q<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(v))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    pub family: Family,
    pub indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub passed: bool,
    /// Number of coefficients or inputs examined.
    pub checked: usize,
    pub witnesses: Vec<Witness>,
}

impl ResidualReport {
    pub fn new(family: Family, indices: Vec<usize>) -> Self {
        ResidualReport { family, indices, label: None, passed: true, checked: 0, witnesses: Vec::new() }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_checked(mut self, n: usize) -> Self {
        self.checked = n;
        self
    }

    /// Keeps the lexicographically smallest failures.
    pub fn with_failures(mut self, mut failures: Vec<Witness>) -> Self {
        failures.sort();
        failures.truncate(MAX_WITNESSES);
        self.passed = failures.is_empty();
        self.witnesses = failures;
        self
    }

    pub fn from_polynomial(family: Family, indices: Vec<usize>, p: &GhostPolynomial) -> Self {
        let failures = p
            .iter()
            .map(|(m, v)| {
                let (input, output) = m.flatten();
                Witness { input, output, value: *v }
            })
            .collect();
        ResidualReport::new(family, indices).with_failures(failures)
    }

    /// Passes iff the map is zero; witnesses are its smallest entries.
    pub fn from_map(family: Family, indices: Vec<usize>, residual: &MultiMap) -> Self {
        let failures =
            residual.entries().map(|(x, y, v)| Witness { input: x.to_vec(), output: y.to_vec(), value: v }).collect();
        let n = residual.dim().pow(residual.in_arity() as u32);
        ResidualReport::new(family, indices).with_failures(failures).with_checked(n)
    }

    pub fn sort_key(&self) -> (Family, Vec<usize>, Option<String>) {
        (self.family, self.indices.clone(), self.label.clone())
    }
}

pub fn sort_reports(reports: &mut [ResidualReport]) {
    reports.sort_by_key(|a| a.sort_key());
}
