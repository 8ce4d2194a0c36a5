use serde::{Deserialize, Serialize};

use crate::coverage::checklist::{interruption_checks, restoration_checks, ChecklistAnnotation};
use crate::coverage::CoveredPair;
use crate::generate::{Algorithm, GenerationConfig, TestCase, TestSuite};
use crate::lcz::LczReport;
use crate::model::{NodeId, ProcessModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedStep {
    pub node_id: NodeId,
    pub node_name: String,
    pub annotations: Vec<ChecklistAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedCase {
    pub case_id: String,
    pub steps: Vec<AnnotatedStep>,
    pub covered_pairs: Vec<CoveredPair>,
}

impl AnnotatedCase {
    pub fn walk(&self) -> Vec<NodeId> {
        self.steps.iter().map(|s| s.node_id.clone()).collect()
    }
}

/// A suite ready for export: every step carries its node name and checklist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedSuite {
    pub generator: Algorithm,
    pub total_steps: usize,
    pub incomplete: bool,
    pub config_echo: GenerationConfig,
    pub cases: Vec<AnnotatedCase>,
}

impl AnnotatedSuite {
    pub fn walks(&self) -> Vec<Vec<NodeId>> {
        self.cases.iter().map(AnnotatedCase::walk).collect()
    }

    /// The suite without its annotations.
    pub fn test_suite(&self) -> TestSuite {
        let cases = self
            .cases
            .iter()
            .map(|c| TestCase {
                case_id: c.case_id.clone(),
                steps: c.walk(),
                covered_pairs: c.covered_pairs.clone(),
            })
            .collect();
        TestSuite::assemble(cases, self.generator, self.config_echo.clone(), self.incomplete)
    }
}

/// Attaches interruption checks to zone entry steps and restoration checks to exit steps.
pub fn annotate_suite(model: &ProcessModel, suite: &TestSuite, report: &LczReport) -> AnnotatedSuite {
    let cases = suite
        .cases
        .iter()
        .map(|case| AnnotatedCase {
            case_id: case.case_id.clone(),
            covered_pairs: case.covered_pairs.clone(),
            steps: case
                .steps
                .iter()
                .map(|id| {
                    let mut annotations = Vec::new();
                    if report.is_entry(id) {
                        annotations.extend(interruption_checks());
                    }
                    if report.is_exit(id) {
                        annotations.extend(restoration_checks());
                    }
                    AnnotatedStep {
                        node_id: id.clone(),
                        node_name: model.node_by_id(id).map_or_else(|| id.to_string(), |n| n.name.clone()),
                        annotations,
                    }
                })
                .collect(),
        })
        .collect();
    AnnotatedSuite {
        generator: suite.generator,
        total_steps: suite.total_steps,
        incomplete: suite.incomplete,
        config_echo: suite.config_echo.clone(),
        cases,
    }
}
