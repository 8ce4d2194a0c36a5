//! End-to-end generation used by the CLI, the HTTP service and the C API.

use thiserror::Error;

use crate::coverage::{annotate_suite, build_requirements, AnnotatedSuite, RequirementError, RequirementSet};
use crate::generate::{generate, generate_portfolio_with_report, Algorithm, GenerateError, GenerationConfig, PortfolioReport, TestSuite};
use crate::lcz::{compute_lczs, LczReport};
use crate::model::{validate, ProcessModel, ValidationReport};

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutput {
    pub report: LczReport,
    pub requirements: RequirementSet,
    pub suite: TestSuite,
    pub annotated: AnnotatedSuite,
    /// Present when the portfolio strategy ran.
    pub portfolio: Option<PortfolioReport>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("INVALID_MODEL: the model has {} validation error(s)", .0.errors().count())]
    InvalidModel(ValidationReport),
    #[error(transparent)]
    Requirements(#[from] RequirementError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::InvalidModel(_) => "INVALID_MODEL",
            PipelineError::Requirements(e) => e.code(),
            PipelineError::Generate(e) => e.code(),
        }
    }
}

/// Validates the model, derives zones and requirements, generates and annotates a suite.
pub fn run_generation(model: &ProcessModel, config: &GenerationConfig) -> Result<GenerationOutput, PipelineError> {
    let validation = validate(model);
    if !validation.is_ok() {
        return Err(PipelineError::InvalidModel(validation));
    }
    config.check()?;
    let report = compute_lczs(model, config.threshold);
    let requirements = build_requirements(model, &report, config.criterion)?;
    let (suite, portfolio) = if config.algorithm == Algorithm::Portfolio {
        let (suite, rep) = generate_portfolio_with_report(model, &requirements, config)?;
        (suite, Some(rep))
    } else {
        (generate(model, &requirements, config)?, None)
    };
    let annotated = annotate_suite(model, &suite, &report);
    Ok(GenerationOutput {
        report,
        requirements,
        suite,
        annotated,
        portfolio,
    })
}
