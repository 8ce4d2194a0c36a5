//! Coverage criteria over limited connectivity zones.
//!
//! Requirements are (entry, exit) segments that a test case must tour without
//! leaving the zone in between. The verifier re-derives coverage from scratch
//! so it can be used as an oracle for any generator.

mod annotate;
pub mod checklist;
mod requirements;
mod verify;

pub use annotate::{annotate_suite, AnnotatedCase, AnnotatedStep, AnnotatedSuite};
pub use checklist::{ChecklistAnnotation, Phase};
pub use requirements::{
    build_requirements, CoverageCriterion, RequirementError, RequirementSet, TestRequirement, ZoneScope,
};
pub use verify::{
    feasible_pairs, scan_walk, verify_suite, BorderRole, CoverageVerdict, CoveredPair, UncoveredNode,
};
