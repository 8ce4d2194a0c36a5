//! Test suite generators.
//!
//! Three strategies build suites that tour every requirement: shortest path
//! composition ([`generate_spc`]), an ant colony search ([`generate_aco`]) and
//! requirement chaining through a minimum path cover ([`generate_epp`]).
//! [`generate_portfolio`] runs all three and keeps the cheapest complete suite.

mod aco;
mod epp;
mod plan;
mod portfolio;
mod spc;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{CoverageCriterion, CoveredPair, RequirementSet};
use crate::lcz::Threshold;
use crate::model::{NodeId, ProcessModel};

pub use aco::generate_aco;
pub use epp::generate_epp;
pub use portfolio::{generate_portfolio, generate_portfolio_with_report, Candidate, CandidateOutcome, PortfolioReport};
pub use spc::generate_spc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Spc,
    Aco,
    Epp,
    Portfolio,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Spc => "spc",
            Algorithm::Aco => "aco",
            Algorithm::Epp => "epp",
            Algorithm::Portfolio => "portfolio",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spc" => Some(Algorithm::Spc),
            "aco" => Some(Algorithm::Aco),
            "epp" => Some(Algorithm::Epp),
            "portfolio" => Some(Algorithm::Portfolio),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcoParams {
    pub ants: u32,
    pub alpha: f64,
    pub beta: f64,
    pub evaporation: f64,
    pub deposit: f64,
    pub max_iterations: u32,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams {
            ants: 20,
            alpha: 1.0,
            beta: 2.0,
            evaporation: 0.5,
            deposit: 1.0,
            max_iterations: 500,
        }
    }
}

fn default_algorithm() -> Algorithm {
    Algorithm::Portfolio
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub threshold: Threshold,
    pub criterion: CoverageCriterion,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub aco: AcoParams,
    /// Maximum number of steps per test case; `None` means four per model node.
    #[serde(default)]
    pub walk_cap: Option<usize>,
}

impl GenerationConfig {
    pub fn new(threshold: Threshold, criterion: CoverageCriterion, algorithm: Algorithm) -> Self {
        GenerationConfig {
            threshold,
            criterion,
            algorithm,
            seed: 0,
            aco: AcoParams::default(),
            walk_cap: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn check(&self) -> Result<(), GenerateError> {
        let a = &self.aco;
        let problem = if a.ants < 1 {
            Some("aco.ants must be at least 1")
        } else if !(a.evaporation > 0.0 && a.evaporation < 1.0) {
            Some("aco.evaporation must lie strictly between 0 and 1")
        } else if !(a.alpha >= 0.0 && a.alpha.is_finite()) {
            Some("aco.alpha must be a finite non-negative number")
        } else if !(a.beta >= 0.0 && a.beta.is_finite()) {
            Some("aco.beta must be a finite non-negative number")
        } else if !(a.deposit >= 0.0 && a.deposit.is_finite()) {
            Some("aco.deposit must be a finite non-negative number")
        } else if a.max_iterations < 1 {
            Some("aco.max_iterations must be at least 1")
        } else if self.walk_cap == Some(0) {
            Some("walk_cap must be positive")
        } else {
            None
        };
        match problem {
            Some(msg) => Err(GenerateError::InvalidConfig(msg.to_owned())),
            None => Ok(()),
        }
    }

    /// Copy with the default walk cap filled in for `model`.
    pub fn resolved(&self, model: &ProcessModel) -> GenerationConfig {
        let mut c = self.clone();
        c.walk_cap = Some(self.walk_cap.unwrap_or(4 * model.node_count()));
        c
    }

    pub(crate) fn cap(&self, model: &ProcessModel) -> usize {
        self.walk_cap.unwrap_or(4 * model.node_count())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub case_id: String,
    pub steps: Vec<NodeId>,
    pub covered_pairs: Vec<CoveredPair>,
}

impl TestCase {
    /// Number of transitions executed.
    pub fn step_count(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSuite {
    pub cases: Vec<TestCase>,
    pub total_steps: usize,
    pub generator: Algorithm,
    pub config_echo: GenerationConfig,
    /// Set when the generator stopped before touring every requirement.
    pub incomplete: bool,
}

impl TestSuite {
    pub(crate) fn assemble(
        cases: Vec<TestCase>,
        generator: Algorithm,
        config_echo: GenerationConfig,
        incomplete: bool,
    ) -> Self {
        let total_steps = cases.iter().map(TestCase::step_count).sum();
        TestSuite {
            cases,
            total_steps,
            generator,
            config_echo,
            incomplete,
        }
    }

    pub fn walks(&self) -> Vec<Vec<NodeId>> {
        self.cases.iter().map(|c| c.steps.clone()).collect()
    }

    /// `ACO_INCOMPLETE_COVERAGE` when the suite is flagged incomplete.
    pub fn warning_code(&self) -> Option<&'static str> {
        self.incomplete.then_some("ACO_INCOMPLETE_COVERAGE")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("WALK_CAP_EXCEEDED: requirement {req_id} needs {needed} steps but walk_cap is {cap}")]
    WalkCapExceeded { req_id: String, needed: usize, cap: usize },
    #[error("INVALID_CONFIG: {0}")]
    InvalidConfig(String),
}

impl GenerateError {
    pub fn code(&self) -> &'static str {
        match self {
            GenerateError::WalkCapExceeded { .. } => "WALK_CAP_EXCEEDED",
            GenerateError::InvalidConfig(_) => "INVALID_CONFIG",
        }
    }
}

/// Runs the generator selected by `config.algorithm`.
pub fn generate(
    model: &ProcessModel,
    requirements: &RequirementSet,
    config: &GenerationConfig,
) -> Result<TestSuite, GenerateError> {
    match config.algorithm {
        Algorithm::Spc => generate_spc(model, requirements, config),
        Algorithm::Aco => generate_aco(model, requirements, config),
        Algorithm::Epp => generate_epp(model, requirements, config),
        Algorithm::Portfolio => generate_portfolio(model, requirements, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_from_minimal_json() {
        let c: GenerationConfig =
            serde_json::from_str(r#"{"threshold":0.5,"criterion":"each_border_node_once"}"#).unwrap();
        assert_eq!(c.algorithm, Algorithm::Portfolio);
        assert_eq!(c.aco, AcoParams::default());
        assert_eq!(c.seed, 0);
        assert!(c.check().is_ok());
    }

    #[test]
    fn config_rejects_bad_parameters() {
        let base = GenerationConfig::new(
            Threshold::new(0.5).unwrap(),
            CoverageCriterion::EachBorderNodeOnce,
            Algorithm::Aco,
        );
        let mut c = base.clone();
        c.aco.evaporation = 1.0;
        assert_eq!(c.check().unwrap_err().code(), "INVALID_CONFIG");
        let mut c = base.clone();
        c.aco.ants = 0;
        assert!(c.check().is_err());
        let mut c = base.clone();
        c.aco.alpha = -1.0;
        assert!(c.check().is_err());
        let mut c = base;
        c.aco.max_iterations = 0;
        assert!(c.check().is_err());
    }
}
