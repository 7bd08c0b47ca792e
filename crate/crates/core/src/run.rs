//! One verification run: build the registry, run the selected suites, and
//! assemble a report whose bytes do not depend on the worker count.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::GradedAlgebra;
use crate::bar::bar_identities;
use crate::closed_forms::{closed_form, u2313_components};
use crate::components::component_identities;
use crate::hamiltonian::hamiltonian_suite;
use crate::oracle::{square_omega, IndexModel, Signature};
use crate::probe::nonassoc_probe;
use crate::recursion::{is_forced_zero, UKey, URegistry};
use crate::report::{sort_reports, Family, ResidualReport, Witness};
use crate::scalar::Q;
use crate::verify::Verifier;

/// Arities covered by the bar suite.
pub const BAR_MAX_ARITY: usize = 6;
/// Largest capital-index arity in the component identities.
pub const COMPONENT_MAX_ARITY: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bar,
    Recursion,
    Residuals,
    Rest,
    Cubic,
    Oracle,
    Hamiltonian,
    Nonassoc,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Bar,
        Suite::Recursion,
        Suite::Residuals,
        Suite::Rest,
        Suite::Cubic,
        Suite::Oracle,
        Suite::Hamiltonian,
        Suite::Nonassoc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bar => "bar",
            Suite::Recursion => "recursion",
            Suite::Residuals => "residuals",
            Suite::Rest => "rest",
            Suite::Cubic => "cubic",
            Suite::Oracle => "oracle",
            Suite::Hamiltonian => "hamiltonian",
            Suite::Nonassoc => "nonassoc",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error("level must be at least 1")]
    Level,
    #[error("no suite selected")]
    NoSuite,
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error("cannot write dumps: {0}")]
    Dump(String),
}

impl FromStr for Suite {
    type Err = RunError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| RunError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algebra: GradedAlgebra,
    pub level: usize,
    pub suites: BTreeSet<Suite>,
    pub model: IndexModel,
    pub dump_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(algebra: GradedAlgebra, level: usize) -> Self {
        RunConfig {
            algebra,
            level,
            suites: Suite::ALL.into_iter().collect(),
            model: IndexModel::Normalized,
            dump_dir: None,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Unchecked {
    pub signature: Signature,
    pub nonzero: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub algebra: String,
    pub level: usize,
    pub index_model: IndexModel,
    pub suites: Vec<Suite>,
    pub reports: Vec<ResidualReport>,
    pub hamiltonian: Vec<ResidualReport>,
    pub unchecked: Vec<Unchecked>,
    pub all_passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualReport> {
        self.reports.iter().chain(&self.hamiltonian).filter(|r| !r.passed)
    }
}

pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    if config.level == 0 {
        return Err(RunError::Level);
    }
    if config.suites.is_empty() {
        return Err(RunError::NoSuite);
    }
    match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| RunError::Pool(e.to_string()))?
            .install(|| run_inner(config)),
        None => run_inner(config),
    }
}

fn run_inner(config: &RunConfig) -> Result<Report, RunError> {
    let alg = &config.algebra;
    let level = config.level;
    let model = config.model;
    let has = |s: Suite| config.suites.contains(&s);
    let needs_registry = config.suites.iter().any(|s| !matches!(s, Suite::Bar | Suite::Nonassoc));
    let reg = if needs_registry || config.dump_dir.is_some() { Some(URegistry::build(alg, level)) } else { None };
    if let (Some(dir), Some(reg)) = (&config.dump_dir, &reg) {
        reg.dump(dir).map_err(|e| RunError::Dump(e.to_string()))?;
    }
    let mut reports = Vec::new();
    let mut hamiltonian = Vec::new();
    let mut unchecked = Vec::new();
    if has(Suite::Bar) {
        reports.extend(bar_identities(alg, BAR_MAX_ARITY));
    }
    if let Some(reg) = &reg {
        let v = Verifier::new(reg, model);
        if has(Suite::Recursion) {
            reports.extend(recursion_reports(reg));
        }
        if has(Suite::Residuals) {
            reports.extend(v.residual_suite(None));
        }
        if has(Suite::Rest) {
            reports.extend(v.rest_suite(None));
        }
        if has(Suite::Cubic) {
            reports.extend(component_identities(reg, COMPONENT_MAX_ARITY.min(level), model));
        }
        if has(Suite::Oracle) {
            let sq = square_omega(reg, model);
            reports.extend(v.oracle_agreement(&sq));
            unchecked = sq.unchecked.iter().map(|(s, n)| Unchecked { signature: s.clone(), nonzero: *n }).collect();
        }
        if has(Suite::Hamiltonian) {
            hamiltonian = hamiltonian_suite(reg);
        }
    }
    if has(Suite::Nonassoc) {
        reports.push(nonassoc_probe(alg, level.min(3), model));
    }
    sort_reports(&mut reports);
    let all_passed = reports.iter().chain(&hamiltonian).all(|r| r.passed);
    Ok(Report {
        algebra: alg.name().to_string(),
        level,
        index_model: model,
        suites: config.suites.iter().copied().collect(),
        reports,
        hamiltonian,
        unchecked,
        all_passed,
    })
}

fn key_bytes(k: UKey) -> Vec<u8> {
    vec![k.in1 as u8, k.in2 as u8, k.out1 as u8, k.out2 as u8]
}

/// Forced zeros, solving order, closed forms and `U_{1,n}^n = (−1)ⁿ L`.
pub fn recursion_reports(reg: &URegistry) -> Vec<ResidualReport> {
    let alg = reg.algebra();
    let level = reg.level();
    let mut out = Vec::new();

    let mut present = Vec::new();
    let mut checked = 0;
    for l in 1..=level {
        for in1 in 1..=l + 1 {
            for out1 in 0..=l {
                let key = UKey::new(in1, l + 1 - in1, out1, l - out1);
                if key.in1 > key.in2 || key.out2 == 0 || !is_forced_zero(key) {
                    continue;
                }
                checked += 1;
                if reg.get(key).is_some_and(|m| !m.is_zero()) {
                    present.push(Witness { input: vec![], output: key_bytes(key), value: Q::from_integer(1) });
                }
            }
        }
    }
    out.push(
        ResidualReport::new(Family::Recursion, vec![level])
            .labelled("forced zeros absent")
            .with_checked(checked)
            .with_failures(present),
    );

    let open: Vec<Witness> = reg
        .inconsistencies()
        .into_iter()
        .filter_map(|(_, z)| z.witness.clone())
        .map(|(x, y, v)| Witness { input: x, output: y, value: v })
        .collect();
    out.push(
        ResidualReport::new(Family::Recursion, vec![level])
            .labelled("forced-zero equations close")
            .with_checked(reg.zeros().len())
            .with_failures(open),
    );

    let order: Vec<Witness> = reg
        .ordering_violations()
        .into_iter()
        .map(|(l, m, k)| Witness {
            input: vec![l as u8, m as u8],
            output: key_bytes(k),
            value: Q::from_integer(1),
        })
        .collect();
    out.push(ResidualReport::new(Family::Recursion, vec![level]).labelled("solving order").with_failures(order));

    for key in reg.keys().collect::<Vec<_>>() {
        let Some(cf) = closed_form(alg, key) else { continue };
        let stored = reg.get(key).expect("listed key");
        let diff = stored.sub(&cf).expect("same shape");
        let label = format!("closed form {key}");
        out.push(ResidualReport::from_map(Family::Recursion, vec![key.in1, key.in2, key.out1, key.out2], &diff).labelled(label));
    }
    let key = UKey::new(2, 3, 1, 3);
    if alg.is_even() {
        if let Some(stored) = reg.get(key) {
            let diff = stored.sub(&u2313_components(alg)).expect("same shape");
            out.push(
                ResidualReport::from_map(Family::Recursion, vec![2, 3, 1, 3], &diff)
                    .labelled(format!("component tensor {key}")),
            );
        }
    }
    out
}
