use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lcz::{zone_segments, LczReport};
use crate::model::{NodeId, ProcessModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageCriterion {
    EachBorderNodeOnce,
    AllCombinationsOfBorderNodes,
}

impl CoverageCriterion {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverageCriterion::EachBorderNodeOnce => "each_border_node_once",
            CoverageCriterion::AllCombinationsOfBorderNodes => "all_combinations_of_border_nodes",
        }
    }

    /// Accepts the long names and the short `ebno` / `all-pairs` spellings.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "each_border_node_once" | "ebno" => Some(CoverageCriterion::EachBorderNodeOnce),
            "all_combinations_of_border_nodes" | "all-pairs" => {
                Some(CoverageCriterion::AllCombinationsOfBorderNodes)
            }
            _ => None,
        }
    }
}

impl fmt::Display for CoverageCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A segment some test case must tour without leaving the zone.
///
/// `exit` is `None` for zones that have no exit; the segment is then the
/// single entry node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestRequirement {
    pub req_id: String,
    pub zone_id: u32,
    pub entry: NodeId,
    pub exit: Option<NodeId>,
    pub segment: Vec<NodeId>,
}

/// Zone facts the generators need to recognise toured pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneScope {
    pub zone_id: u32,
    pub members: BTreeSet<NodeId>,
    pub entries: BTreeSet<NodeId>,
    pub has_exits: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementSet {
    pub criterion: CoverageCriterion,
    pub requirements: Vec<TestRequirement>,
    pub zones: Vec<ZoneScope>,
}

impl RequirementSet {
    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequirementError {
    #[error("INFEASIBLE_BORDER_NODE: zone {zone_id} border node(s) {} belong to no feasible entry/exit pair", join(.nodes))]
    InfeasibleBorderNode { zone_id: u32, nodes: Vec<NodeId> },
}

impl RequirementError {
    pub fn code(&self) -> &'static str {
        match self {
            RequirementError::InfeasibleBorderNode { .. } => "INFEASIBLE_BORDER_NODE",
        }
    }
}

fn join(nodes: &[NodeId]) -> String {
    nodes.iter().map(NodeId::as_str).collect::<Vec<_>>().join(", ")
}

fn req_id(zone_id: u32, entry: &NodeId, exit: Option<&NodeId>) -> String {
    match exit {
        Some(x) => format!("Z{zone_id}:{entry}>{x}"),
        None => format!("Z{zone_id}:{entry}"),
    }
}

/// Expands the zones of `report` into test requirements for `criterion`.
pub fn build_requirements(
    model: &ProcessModel,
    report: &LczReport,
    criterion: CoverageCriterion,
) -> Result<RequirementSet, RequirementError> {
    let mut requirements = Vec::new();
    let mut zones = Vec::with_capacity(report.zones.len());

    for zone in &report.zones {
        zones.push(ZoneScope {
            zone_id: zone.zone_id,
            members: zone.members.clone(),
            entries: zone.entries.clone(),
            has_exits: !zone.exits.is_empty(),
        });

        if zone.exits.is_empty() {
            for entry in &zone.entries {
                requirements.push(TestRequirement {
                    req_id: req_id(zone.zone_id, entry, None),
                    zone_id: zone.zone_id,
                    entry: entry.clone(),
                    exit: None,
                    segment: vec![entry.clone()],
                });
            }
            continue;
        }

        let segments = zone_segments(model, zone);
        let chosen: Vec<(NodeId, NodeId)> = match criterion {
            CoverageCriterion::AllCombinationsOfBorderNodes => segments.keys().cloned().collect(),
            CoverageCriterion::EachBorderNodeOnce => {
                let entries: Vec<&NodeId> = zone.entries.iter().collect();
                let exits: Vec<&NodeId> = zone.exits.iter().collect();
                let mut pairs = Vec::new();
                for (i, e) in entries.iter().enumerate() {
                    for (j, x) in exits.iter().enumerate() {
                        if let Some(seg) = segments.get(&((*e).clone(), (*x).clone())) {
                            pairs.push(PairCandidate { entry: i, exit: j, cost: seg.len() });
                        }
                    }
                }
                let infeasible: Vec<NodeId> = zone
                    .border_nodes()
                    .into_iter()
                    .filter(|n| {
                        !pairs.iter().any(|p| *entries[p.entry] == *n || *exits[p.exit] == *n)
                    })
                    .collect();
                if !infeasible.is_empty() {
                    return Err(RequirementError::InfeasibleBorderNode {
                        zone_id: zone.zone_id,
                        nodes: infeasible,
                    });
                }
                let mut cover: Vec<(NodeId, NodeId)> = min_pair_cover(entries.len(), exits.len(), &pairs)
                    .into_iter()
                    .map(|(i, j)| (entries[i].clone(), exits[j].clone()))
                    .collect();
                cover.sort();
                cover
            }
        };

        for (entry, exit) in chosen {
            let segment = segments[&(entry.clone(), exit.clone())].clone();
            requirements.push(TestRequirement {
                req_id: req_id(zone.zone_id, &entry, Some(&exit)),
                zone_id: zone.zone_id,
                entry,
                exit: Some(exit),
                segment,
            });
        }
    }

    Ok(RequirementSet {
        criterion,
        requirements,
        zones,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PairCandidate {
    pub entry: usize,
    pub exit: usize,
    /// Segment length in nodes; shorter pairs are preferred.
    pub cost: usize,
}

/// Minimum-cardinality set of pairs touching every entry and every exit.
///
/// Entries and exits form the two sides of a bipartite graph, so the answer is
/// a minimum edge cover: a maximum matching extended by one cheapest pair per
/// unmatched vertex. Every vertex must have at least one candidate pair.
pub(crate) fn min_pair_cover(
    n_entries: usize,
    n_exits: usize,
    pairs: &[PairCandidate],
) -> Vec<(usize, usize)> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_entries];
    for p in pairs {
        adj[p.entry].push((p.cost, p.exit));
    }
    for list in &mut adj {
        list.sort();
    }

    let mut match_exit = vec![usize::MAX; n_exits];
    for e in 0..n_entries {
        // take a free exit directly so the result stays close to id order
        if let Some(&(_, x)) = adj[e].iter().find(|&&(_, x)| match_exit[x] == usize::MAX) {
            match_exit[x] = e;
            continue;
        }
        let mut visited = vec![false; n_exits];
        augment(e, &adj, &mut match_exit, &mut visited);
    }

    let mut chosen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut entry_done = vec![false; n_entries];
    for (x, &e) in match_exit.iter().enumerate() {
        if e != usize::MAX {
            chosen.insert((e, x));
            entry_done[e] = true;
        }
    }
    let cheapest = |it: &mut dyn Iterator<Item = &PairCandidate>| {
        it.min_by_key(|p| (p.cost, p.entry, p.exit)).map(|p| (p.entry, p.exit))
    };
    for (e, done) in entry_done.iter().enumerate() {
        if !done {
            if let Some(pair) = cheapest(&mut pairs.iter().filter(|p| p.entry == e)) {
                chosen.insert(pair);
            }
        }
    }
    for (x, &e) in match_exit.iter().enumerate() {
        if e == usize::MAX {
            if let Some(pair) = cheapest(&mut pairs.iter().filter(|p| p.exit == x)) {
                chosen.insert(pair);
            }
        }
    }
    chosen.into_iter().collect()
}

fn augment(
    e: usize,
    adj: &[Vec<(usize, usize)>],
    match_exit: &mut [usize],
    visited: &mut [bool],
) -> bool {
    for &(_, x) in &adj[e] {
        if visited[x] {
            continue;
        }
        visited[x] = true;
        if match_exit[x] == usize::MAX || augment(match_exit[x], adj, match_exit, visited) {
            match_exit[x] = e;
            return true;
        }
    }
    false
}
