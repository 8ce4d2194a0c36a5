//! Suite verification against a coverage criterion.
//!
//! Kept independent from the generators: it works on node ids and the zone
//! report directly, and decides pair feasibility with its own search.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::coverage::CoverageCriterion;
use crate::lcz::{LczReport, LimitedConnectivityZone};
use crate::model::{walk_is_valid, NodeId, ProcessModel};

/// An (entry, exit) pair toured continuously inside one zone.
///
/// `exit` is `None` for a zone without exits, where touring the entry suffices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoveredPair {
    pub zone_id: u32,
    pub entry: NodeId,
    pub exit: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BorderRole {
    Entry,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UncoveredNode {
    pub zone_id: u32,
    pub node: NodeId,
    pub role: BorderRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageVerdict {
    pub criterion: CoverageCriterion,
    pub satisfied: bool,
    /// Feasible pairs no test case tours.
    pub uncovered_pairs: Vec<CoveredPair>,
    /// Border nodes that appear in no toured pair.
    pub uncovered_nodes: Vec<UncoveredNode>,
    /// Cases that are not valid walks; they contribute no coverage.
    pub invalid_cases: Vec<usize>,
}

/// Every pair toured by `walk`, using the continuous-outage rule.
pub fn scan_walk(report: &LczReport, walk: &[NodeId]) -> BTreeSet<CoveredPair> {
    let mut out = BTreeSet::new();
    for zone in &report.zones {
        for (i, step) in walk.iter().enumerate() {
            if !zone.entries.contains(step) {
                continue;
            }
            if zone.exits.is_empty() {
                out.insert(CoveredPair {
                    zone_id: zone.zone_id,
                    entry: step.clone(),
                    exit: None,
                });
                continue;
            }
            let mut j = i;
            while j < walk.len() && zone.members.contains(&walk[j]) {
                j += 1;
            }
            if let Some(after) = walk.get(j) {
                if zone.exits.contains(after) {
                    out.insert(CoveredPair {
                        zone_id: zone.zone_id,
                        entry: step.clone(),
                        exit: Some(after.clone()),
                    });
                }
            }
        }
    }
    out
}

/// Pairs that some walk could tour, found by depth-first search inside each zone.
pub fn feasible_pairs(model: &ProcessModel, report: &LczReport) -> BTreeSet<CoveredPair> {
    let mut out = BTreeSet::new();
    for zone in &report.zones {
        for entry in &zone.entries {
            if zone.exits.is_empty() {
                out.insert(CoveredPair {
                    zone_id: zone.zone_id,
                    entry: entry.clone(),
                    exit: None,
                });
                continue;
            }
            for exit in exits_reachable_inside(model, zone, entry) {
                out.insert(CoveredPair {
                    zone_id: zone.zone_id,
                    entry: entry.clone(),
                    exit: Some(exit),
                });
            }
        }
    }
    out
}

fn exits_reachable_inside(
    model: &ProcessModel,
    zone: &LimitedConnectivityZone,
    entry: &NodeId,
) -> BTreeSet<NodeId> {
    let mut found = BTreeSet::new();
    let mut seen: HashSet<&NodeId> = HashSet::new();
    let mut stack = vec![entry];
    seen.insert(entry);
    while let Some(u) = stack.pop() {
        for t in model.transitions().iter().filter(|t| &t.from == u) {
            if zone.members.contains(&t.to) {
                if seen.insert(&t.to) {
                    stack.push(&t.to);
                }
            } else if zone.exits.contains(&t.to) {
                found.insert(t.to.clone());
            }
        }
    }
    found
}

/// Checks whether `walks` satisfy `criterion` for the zones in `report`.
pub fn verify_suite(
    model: &ProcessModel,
    report: &LczReport,
    criterion: CoverageCriterion,
    walks: &[Vec<NodeId>],
) -> CoverageVerdict {
    let mut covered = BTreeSet::new();
    let mut invalid_cases = Vec::new();
    for (i, walk) in walks.iter().enumerate() {
        if walk_is_valid(model, walk) {
            covered.extend(scan_walk(report, walk));
        } else {
            invalid_cases.push(i);
        }
    }

    let feasible = feasible_pairs(model, report);
    let uncovered_pairs: Vec<CoveredPair> = feasible.difference(&covered).cloned().collect();

    let mut touched: BTreeMap<u32, BTreeSet<&NodeId>> = BTreeMap::new();
    for p in &covered {
        let set = touched.entry(p.zone_id).or_default();
        set.insert(&p.entry);
        if let Some(x) = &p.exit {
            set.insert(x);
        }
    }
    let mut uncovered_nodes = Vec::new();
    for zone in &report.zones {
        let hit = touched.get(&zone.zone_id);
        let missing = |n: &NodeId| !hit.is_some_and(|s| s.contains(n));
        for e in zone.entries.iter().filter(|n| missing(n)) {
            uncovered_nodes.push(UncoveredNode {
                zone_id: zone.zone_id,
                node: e.clone(),
                role: BorderRole::Entry,
            });
        }
        for x in zone.exits.iter().filter(|n| missing(n)) {
            uncovered_nodes.push(UncoveredNode {
                zone_id: zone.zone_id,
                node: x.clone(),
                role: BorderRole::Exit,
            });
        }
    }

    let criterion_met = match criterion {
        CoverageCriterion::EachBorderNodeOnce => uncovered_nodes.is_empty(),
        CoverageCriterion::AllCombinationsOfBorderNodes => uncovered_pairs.is_empty(),
    };
    CoverageVerdict {
        criterion,
        satisfied: criterion_met && invalid_cases.is_empty(),
        uncovered_pairs,
        uncovered_nodes,
        invalid_cases,
    }
}
