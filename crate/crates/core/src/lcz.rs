//! Limited connectivity zones.
//!
//! Nodes whose outage probability is strictly greater than the threshold are
//! offline candidates. Each weakly connected component of the subgraph they
//! induce is one zone. A zone's entries are the members where connectivity is
//! lost (the start node, or members with a predecessor outside the zone); its
//! exits are the first nodes back online (non-members with a predecessor inside).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{NodeId, ProcessModel};
use crate::paths;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Threshold(f64);

#[derive(Debug, Clone, PartialEq, Error)]
#[error("threshold {0} is outside [0, 1]")]
pub struct ThresholdOutOfRange(pub f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, ThresholdOutOfRange> {
        if (0.0..=1.0).contains(&value) {
            Ok(Threshold(value))
        } else {
            Err(ThresholdOutOfRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Strict comparison: a node at exactly the threshold stays online.
    pub fn is_exceeded_by(self, probability: f64) -> bool {
        probability > self.0
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Threshold::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitedConnectivityZone {
    pub zone_id: u32,
    pub members: BTreeSet<NodeId>,
    pub entries: BTreeSet<NodeId>,
    pub exits: BTreeSet<NodeId>,
}

impl LimitedConnectivityZone {
    pub fn contains(&self, id: &NodeId) -> bool {
        self.members.contains(id)
    }

    /// Entries followed by exits, without duplicates.
    pub fn border_nodes(&self) -> BTreeSet<NodeId> {
        self.entries.union(&self.exits).cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LczWarningCode {
    NoZones,
    ZoneWithoutRestorationPath,
}

impl LczWarningCode {
    pub fn as_str(self) -> &'static str {
        match self {
            LczWarningCode::NoZones => "NO_ZONES",
            LczWarningCode::ZoneWithoutRestorationPath => "ZONE_WITHOUT_RESTORATION_PATH",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LczWarning {
    pub code: LczWarningCode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zone_id: Option<u32>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LczReport {
    pub threshold: Threshold,
    pub zones: Vec<LimitedConnectivityZone>,
    pub warnings: Vec<LczWarning>,
}

impl LczReport {
    pub fn zone(&self, zone_id: u32) -> Option<&LimitedConnectivityZone> {
        self.zones.iter().find(|z| z.zone_id == zone_id)
    }

    pub fn has_warning(&self, code: LczWarningCode) -> bool {
        self.warnings.iter().any(|w| w.code == code)
    }

    pub fn is_entry(&self, id: &NodeId) -> bool {
        self.zones.iter().any(|z| z.entries.contains(id))
    }

    pub fn is_exit(&self, id: &NodeId) -> bool {
        self.zones.iter().any(|z| z.exits.contains(id))
    }
}

/// Splits the model into zones for `threshold`.
///
/// The model is expected to validate cleanly; nodes that only appear in
/// dangling transitions are ignored.
pub fn compute_lczs(model: &ProcessModel, threshold: Threshold) -> LczReport {
    let n = model.node_count();
    let offline: Vec<bool> = model
        .nodes()
        .iter()
        .map(|node| threshold.is_exceeded_by(node.outage_probability))
        .collect();

    let mut component = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &seed in model.positions_by_id() {
        if !offline[seed] || component[seed] != usize::MAX {
            continue;
        }
        let gid = groups.len();
        let mut members = vec![seed];
        component[seed] = gid;
        let mut queue = VecDeque::from([seed]);
        while let Some(u) = queue.pop_front() {
            for &v in model.successors(u).iter().chain(model.predecessors(u)) {
                if offline[v] && component[v] == usize::MAX {
                    component[v] = gid;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        groups.push(members);
    }
    // seeds are visited in id order, so groups are already sorted by smallest member id

    let start = model.start_index();
    let mut zones = Vec::with_capacity(groups.len());
    let mut warnings = Vec::new();
    for (gid, members) in groups.iter().enumerate() {
        let zone_id = gid as u32 + 1;
        let mut entries = BTreeSet::new();
        let mut exits = BTreeSet::new();
        for &m in members {
            if Some(m) == start || model.predecessors(m).iter().any(|&p| component[p] != gid) {
                entries.insert(model.id(m).clone());
            }
            for &s in model.successors(m) {
                if component[s] != gid {
                    exits.insert(model.id(s).clone());
                }
            }
        }
        if exits.is_empty() {
            warnings.push(LczWarning {
                code: LczWarningCode::ZoneWithoutRestorationPath,
                zone_id: Some(zone_id),
                message: format!("zone {zone_id} has no exit node; connectivity is never restored"),
            });
        }
        zones.push(LimitedConnectivityZone {
            zone_id,
            members: members.iter().map(|&m| model.id(m).clone()).collect(),
            entries,
            exits,
        });
    }
    if zones.is_empty() {
        warnings.insert(
            0,
            LczWarning {
                code: LczWarningCode::NoZones,
                zone_id: None,
                message: format!("no node has an outage probability above {threshold}"),
            },
        );
    }

    LczReport {
        threshold,
        zones,
        warnings,
    }
}

/// Shortest zone-interior segment for every feasible (entry, exit) pair.
///
/// All nodes of a segment except the final exit lie inside the zone. Pairs
/// without such a walk are absent from the map.
pub fn zone_segments(
    model: &ProcessModel,
    zone: &LimitedConnectivityZone,
) -> BTreeMap<(NodeId, NodeId), Vec<NodeId>> {
    let inside = membership(model, zone);
    let mut out = BTreeMap::new();
    for entry in &zone.entries {
        let Some(e) = model.index_of(entry) else {
            continue;
        };
        for exit in &zone.exits {
            let Some(x) = model.index_of(exit) else {
                continue;
            };
            if let Some(walk) = paths::shortest_walk(model, e, |v| v == x, |v| inside[v]) {
                out.insert(
                    (entry.clone(), exit.clone()),
                    walk.into_iter().map(|i| model.id(i).clone()).collect(),
                );
            }
        }
    }
    out
}

pub(crate) fn membership(model: &ProcessModel, zone: &LimitedConnectivityZone) -> Vec<bool> {
    let mut inside = vec![false; model.node_count()];
    for m in &zone.members {
        if let Some(i) = model.index_of(m) {
            inside[i] = true;
        }
    }
    inside
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::model::{ProcessNode, Transition};

    fn set(ids: &[&str]) -> BTreeSet<NodeId> {
        ids.iter().map(|s| NodeId::from(*s)).collect()
    }

    fn t(v: f64) -> Threshold {
        Threshold::new(v).unwrap()
    }

    #[test]
    fn g1_has_one_zone() {
        let r = compute_lczs(&g1(), t(0.5));
        assert_eq!(r.zones.len(), 1);
        let z = &r.zones[0];
        assert_eq!(z.zone_id, 1);
        assert_eq!(z.members, set(&["n3", "n4"]));
        assert_eq!(z.entries, set(&["n3"]));
        assert_eq!(z.exits, set(&["n5"]));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn threshold_comparison_is_strict() {
        let r = compute_lczs(&g1(), t(0.9));
        assert!(r.zones.is_empty());
        assert!(r.has_warning(LczWarningCode::NoZones));
    }

    #[test]
    fn threshold_range_checked() {
        assert!(Threshold::new(1.2).is_err());
        assert!(Threshold::new(-0.1).is_err());
        assert!(Threshold::new(f64::NAN).is_err());
        assert!(serde_json::from_str::<Threshold>("1.5").is_err());
    }

    #[test]
    fn g1_segment() {
        let m = g1();
        let r = compute_lczs(&m, t(0.5));
        let segs = zone_segments(&m, &r.zones[0]);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[&("n3".into(), "n5".into())], ["n3", "n4", "n5"].map(NodeId::from));
    }

    #[test]
    fn single_node_zone_segment() {
        let m = ProcessModel::new(
            vec![ProcessNode::new("s", 0.0), ProcessNode::new("m", 0.7), ProcessNode::new("x", 0.0)],
            vec![Transition::new("s", "m"), Transition::new("m", "x")],
            "s",
            vec!["x".into()],
        );
        let r = compute_lczs(&m, t(0.5));
        let segs = zone_segments(&m, &r.zones[0]);
        assert_eq!(segs[&("m".into(), "x".into())], ["m", "x"].map(NodeId::from));
    }

    #[test]
    fn g2_segments() {
        let m = g2();
        let r = compute_lczs(&m, t(0.5));
        assert_eq!(r.zones.len(), 1);
        let z = &r.zones[0];
        assert_eq!(z.entries, set(&["a", "b"]));
        assert_eq!(z.exits, set(&["x", "y"]));
        let segs = zone_segments(&m, z);
        let got: Vec<Vec<&str>> = segs.values().map(|w| w.iter().map(|n| n.as_str()).collect()).collect();
        assert_eq!(
            got,
            vec![vec!["a", "c", "x"], vec!["a", "c", "y"], vec!["b", "c", "x"], vec!["b", "c", "y"]]
        );
    }

    #[test]
    fn start_inside_zone_is_an_entry() {
        let m = ProcessModel::new(
            vec![ProcessNode::new("s", 0.9), ProcessNode::new("a", 0.9), ProcessNode::new("e", 0.0)],
            vec![Transition::new("s", "a"), Transition::new("a", "e")],
            "s",
            vec!["e".into()],
        );
        let r = compute_lczs(&m, t(0.5));
        assert_eq!(r.zones[0].entries, set(&["s"]));
    }

    #[test]
    fn zone_holding_an_end_without_exit_warns() {
        let m = ProcessModel::new(
            vec![ProcessNode::new("s", 0.0), ProcessNode::new("a", 0.9), ProcessNode::new("e", 0.9)],
            vec![Transition::new("s", "a"), Transition::new("a", "e")],
            "s",
            vec!["e".into()],
        );
        let r = compute_lczs(&m, t(0.5));
        assert!(r.zones[0].exits.is_empty());
        assert!(r.has_warning(LczWarningCode::ZoneWithoutRestorationPath));
    }

    #[test]
    fn zones_numbered_by_smallest_member() {
        // two separate zones: {z1} reached first in the flow, {b1} second; b1 < z1 lexicographically
        let m = ProcessModel::new(
            vec![
                ProcessNode::new("s", 0.0),
                ProcessNode::new("z1", 0.9),
                ProcessNode::new("m", 0.0),
                ProcessNode::new("b1", 0.9),
                ProcessNode::new("e", 0.0),
            ],
            vec![
                Transition::new("s", "z1"),
                Transition::new("z1", "m"),
                Transition::new("m", "b1"),
                Transition::new("b1", "e"),
            ],
            "s",
            vec!["e".into()],
        );
        let r = compute_lczs(&m, t(0.5));
        assert_eq!(r.zones.len(), 2);
        assert_eq!(r.zones[0].members, set(&["b1"]));
        assert_eq!(r.zones[1].members, set(&["z1"]));
        assert_eq!(r.zones[1].zone_id, 2);
    }
}
