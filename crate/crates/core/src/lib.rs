//! Model-based test generation for processes that run on devices with
//! unreliable network connectivity.
//!
//! The workflow is: build or parse a [`ProcessModel`], pick an outage
//! probability threshold to derive limited connectivity zones
//! ([`lcz::compute_lczs`]), expand the zones into test requirements for a
//! coverage criterion ([`coverage::build_requirements`]) and generate a suite
//! with one of the strategies in [`generate`]. [`pipeline::run_generation`]
//! chains all of it.

pub mod coverage;
pub mod generate;
pub mod io;
pub mod lcz;
pub mod model;
mod paths;
pub mod pipeline;

#[cfg(feature = "app")]
pub mod api;
#[cfg(feature = "app")]
pub mod cli;

pub use coverage::{CoverageCriterion, TestRequirement};
pub use generate::{Algorithm, GenerationConfig, TestCase, TestSuite};
pub use lcz::{LczReport, Threshold};
pub use model::{NodeId, ProcessModel};

/// Version tag written into every document and response.
pub const SCHEMA_VERSION: &str = "1";
