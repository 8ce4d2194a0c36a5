use serde::{Deserialize, Serialize};

use crate::coverage::RequirementSet;
use crate::generate::{
    generate_aco, generate_epp, generate_spc, Algorithm, GenerateError, GenerationConfig, TestSuite,
};
use crate::model::ProcessModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CandidateOutcome {
    Complete { total_steps: usize, cases: usize },
    Incomplete { total_steps: usize, cases: usize, covered: usize },
    Failed { code: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub algorithm: Algorithm,
    pub outcome: CandidateOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortfolioReport {
    pub candidates: Vec<Candidate>,
    pub selected: Algorithm,
}

pub fn generate_portfolio(
    model: &ProcessModel,
    requirements: &RequirementSet,
    config: &GenerationConfig,
) -> Result<TestSuite, GenerateError> {
    generate_portfolio_with_report(model, requirements, config).map(|(suite, _)| suite)
}

/// Runs every generator and keeps the complete suite with the fewest steps.
///
/// Ties go to fewer cases, then to the order spc, aco, epp. When no suite is
/// complete the one touring the most requirements is returned, still flagged
/// incomplete. An error is returned only when all three generators fail.
pub fn generate_portfolio_with_report(
    model: &ProcessModel,
    requirements: &RequirementSet,
    config: &GenerationConfig,
) -> Result<(TestSuite, PortfolioReport), GenerateError> {
    let (spc, aco, epp) = std::thread::scope(|scope| {
        let aco = scope.spawn(|| generate_aco(model, requirements, config));
        let epp = scope.spawn(|| generate_epp(model, requirements, config));
        let spc = generate_spc(model, requirements, config);
        (
            spc,
            aco.join().expect("aco generator panicked"),
            epp.join().expect("epp generator panicked"),
        )
    });
    let results = [(Algorithm::Spc, spc), (Algorithm::Aco, aco), (Algorithm::Epp, epp)];

    let covered = |s: &TestSuite| {
        s.cases
            .iter()
            .flat_map(|c| c.covered_pairs.iter())
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    };
    let candidates: Vec<Candidate> = results
        .iter()
        .map(|(algorithm, r)| Candidate {
            algorithm: *algorithm,
            outcome: match r {
                Ok(s) if !s.incomplete => CandidateOutcome::Complete {
                    total_steps: s.total_steps,
                    cases: s.cases.len(),
                },
                Ok(s) => CandidateOutcome::Incomplete {
                    total_steps: s.total_steps,
                    cases: s.cases.len(),
                    covered: covered(s),
                },
                Err(e) => CandidateOutcome::Failed {
                    code: e.code().to_owned(),
                    message: e.to_string(),
                },
            },
        })
        .collect();

    let complete = results
        .iter()
        .enumerate()
        .filter_map(|(i, (_, r))| r.as_ref().ok().filter(|s| !s.incomplete).map(|s| (i, s)))
        .min_by_key(|(i, s)| (s.total_steps, s.cases.len(), *i));
    let chosen = complete.or_else(|| {
        results
            .iter()
            .enumerate()
            .filter_map(|(i, (_, r))| r.as_ref().ok().map(|s| (i, s)))
            .min_by_key(|(i, s)| (std::cmp::Reverse(covered(s)), s.total_steps, *i))
    });

    match chosen {
        Some((i, suite)) => {
            let mut suite = suite.clone();
            suite.generator = Algorithm::Portfolio;
            suite.config_echo = config.resolved(model);
            suite.config_echo.algorithm = Algorithm::Portfolio;
            let report = PortfolioReport {
                candidates,
                selected: results[i].0,
            };
            Ok((suite, report))
        }
        None => {
            let [(_, first), _, _] = results;
            Err(first.expect_err("no candidate succeeded"))
        }
    }
}
