use std::collections::BTreeSet;

use crate::coverage::RequirementSet;
use crate::generate::plan::Plan;
use crate::generate::{Algorithm, GenerateError, GenerationConfig, TestSuite};
use crate::model::ProcessModel;
use crate::paths;

/// Shortest path composition.
///
/// Requirement segments are the zone-interior shortest paths computed when the
/// requirements were built. Cases are then assembled greedily: starting from
/// the start node, the first pending requirement (ordered by entry id, then
/// exit id) that can be reached and still closed within the walk cap is
/// appended through a shortest connector. When nothing else fits, the case is
/// closed at the nearest end node and a new one is opened.
pub fn generate_spc(
    model: &ProcessModel,
    requirements: &RequirementSet,
    config: &GenerationConfig,
) -> Result<TestSuite, GenerateError> {
    let plan = Plan::new(model, requirements, config)?;

    let mut order: Vec<usize> = (0..plan.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&requirements.requirements[a], &requirements.requirements[b]);
        (&ra.entry, &ra.exit, ra.zone_id).cmp(&(&rb.entry, &rb.exit, rb.zone_id))
    });
    let mut pending: BTreeSet<usize> = (0..plan.len()).collect();
    let mut walks = Vec::new();
    let mut committed = BTreeSet::new();

    while !pending.is_empty() {
        let mut walk = vec![plan.start];
        let mut progressed = false;
        loop {
            let cur = *walk.last().unwrap_or(&plan.start);
            let used = walk.len() - 1;
            let dist = paths::distances_from(model, cur);
            let next = order.iter().copied().filter(|r| pending.contains(r)).find(|&r| {
                let pos = &plan.req_pos[r];
                match (dist[pos.entry], plan.dist_to_end[pos.last]) {
                    (Some(conn), Some(close)) => used + conn + pos.edges() + close <= plan.cap,
                    _ => false,
                }
            });
            let Some(r) = next else { break };
            progressed = true;
            let pos = &plan.req_pos[r];
            let conn = plan.connector(cur, pos.entry).expect("distance table says reachable");
            walk.extend_from_slice(&conn[1..]);
            walk.extend_from_slice(&pos.segment[1..]);
            for done in plan.settled_with(&committed, &walk) {
                pending.remove(&done);
            }
        }
        if !progressed {
            // Plan::new already rejects requirements that cannot fit alone.
            let r = *pending.iter().next().expect("loop runs while requirements are pending");
            return Err(GenerateError::WalkCapExceeded {
                req_id: requirements.requirements[r].req_id.clone(),
                needed: usize::MAX,
                cap: plan.cap,
            });
        }
        plan.close(&mut walk);
        for done in plan.settled_with(&committed, &walk) {
            pending.remove(&done);
        }
        committed.extend(plan.units(&walk));
        walks.push(walk);
    }

    Ok(plan.finish(walks, Algorithm::Spc, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{build_requirements, CoverageCriterion};
    use crate::lcz::fixtures::{g1, g2};
    use crate::lcz::{compute_lczs, Threshold};
    use crate::model::{walk_is_valid, ProcessNode, Transition};

    fn run(m: &ProcessModel, c: CoverageCriterion) -> TestSuite {
        let t = Threshold::new(0.5).unwrap();
        let r = build_requirements(m, &compute_lczs(m, t), c).unwrap();
        generate_spc(m, &r, &GenerationConfig::new(t, c, Algorithm::Spc)).unwrap()
    }

    fn steps(s: &TestSuite) -> Vec<Vec<&str>> {
        s.cases.iter().map(|c| c.steps.iter().map(|n| n.as_str()).collect()).collect()
    }

    #[test]
    fn g1_single_case() {
        for c in [CoverageCriterion::EachBorderNodeOnce, CoverageCriterion::AllCombinationsOfBorderNodes] {
            let s = run(&g1(), c);
            assert_eq!(steps(&s), vec![vec!["n1", "n2", "n3", "n4", "n5"]]);
            assert_eq!(s.total_steps, 4);
            assert_eq!(s.cases[0].case_id, "TC1");
        }
    }

    #[test]
    fn g2_each_border_node_once_two_cases() {
        let s = run(&g2(), CoverageCriterion::EachBorderNodeOnce);
        assert_eq!(
            steps(&s),
            vec![vec!["s", "u", "a", "c", "x", "e"], vec!["s", "u", "b", "c", "y", "e"]]
        );
        assert_eq!(s.total_steps, 10);
    }

    #[test]
    fn no_zones_gives_empty_suite() {
        let m = g1();
        let t = Threshold::new(0.95).unwrap();
        let r = build_requirements(&m, &compute_lczs(&m, t), CoverageCriterion::EachBorderNodeOnce).unwrap();
        let s = generate_spc(&m, &r, &GenerationConfig::new(t, r.criterion, Algorithm::Spc)).unwrap();
        assert!(s.cases.is_empty());
        assert_eq!(s.total_steps, 0);
    }

    #[test]
    fn start_inside_an_exitless_zone() {
        let m = ProcessModel::new(
            vec![ProcessNode::new("s", 0.9), ProcessNode::new("e", 0.9)],
            vec![Transition::new("s", "e")],
            "s",
            vec!["e".into()],
        );
        for c in [CoverageCriterion::EachBorderNodeOnce, CoverageCriterion::AllCombinationsOfBorderNodes] {
            assert_eq!(steps(&run(&m, c)), vec![vec!["s", "e"]]);
        }
    }

    #[test]
    fn chains_requirements_through_a_loop() {
        // zone {z} with exit back to hub h; two passes through the loop are chained in one case
        let m = ProcessModel::new(
            vec![
                ProcessNode::new("s", 0.0),
                ProcessNode::new("h", 0.0),
                ProcessNode::new("p", 0.9),
                ProcessNode::new("q", 0.9),
                ProcessNode::new("r", 0.0),
                ProcessNode::new("e", 0.0),
            ],
            vec![
                Transition::new("s", "h"),
                Transition::new("h", "p"),
                Transition::new("p", "r"),
                Transition::new("r", "h"),
                Transition::new("h", "q"),
                Transition::new("q", "e"),
                Transition::new("h", "e"),
            ],
            "s",
            vec!["e".into()],
        );
        let s = run(&m, CoverageCriterion::AllCombinationsOfBorderNodes);
        assert_eq!(s.cases.len(), 1);
        assert!(walk_is_valid(&m, &s.cases[0].steps));
        assert_eq!(steps(&s), vec![vec!["s", "h", "p", "r", "h", "q", "e"]]);
    }

    #[test]
    fn cap_too_small_is_reported() {
        let m = g1();
        let t = Threshold::new(0.5).unwrap();
        let r = build_requirements(&m, &compute_lczs(&m, t), CoverageCriterion::EachBorderNodeOnce).unwrap();
        let mut cfg = GenerationConfig::new(t, r.criterion, Algorithm::Spc);
        cfg.walk_cap = Some(3);
        let err = generate_spc(&m, &r, &cfg).unwrap_err();
        assert_eq!(
            err,
            GenerateError::WalkCapExceeded { req_id: "Z1:n3>n5".into(), needed: 4, cap: 3 }
        );
    }
}
