//! Process model of the system under test.
//!
//! A [`ProcessModel`] is a directed graph whose nodes are process actions or
//! decision points. Every node carries the probability that the device hosting
//! it loses network connectivity. The model is immutable once built; an
//! adjacency index keyed by dense node positions is computed at construction
//! and shared by the analysis and generation passes.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Opaque node identifier, unique within a model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl PartialEq<str> for NodeId {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for NodeId {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Action,
    Decision,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Action => "action",
            NodeKind::Decision => "decision",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "action" => Some(NodeKind::Action),
            "decision" => Some(NodeKind::Decision),
            _ => None,
        }
    }

    /// Kind implied by the number of outgoing transitions.
    pub fn from_out_degree(out_degree: usize) -> Self {
        if out_degree > 1 {
            NodeKind::Decision
        } else {
            NodeKind::Action
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessNode {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    pub outage_probability: f64,
}

impl ProcessNode {
    pub fn new(id: impl Into<String>, outage_probability: f64) -> Self {
        let id = id.into();
        ProcessNode {
            name: id.clone(),
            id: NodeId(id),
            kind: NodeKind::Action,
            outage_probability,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_kind(mut self, kind: NodeKind) -> Self {
        self.kind = kind;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: NodeId,
    pub to: NodeId,
    pub label: Option<String>,
}

impl Transition {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Transition {
            from: NodeId(from.into()),
            to: NodeId(to.into()),
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// Directed process graph with a single start node and one or more end nodes.
///
/// Construction never fails: dangling references and duplicates are kept as
/// given and surfaced by [`validate`]. The dense index only covers transitions
/// whose endpoints both resolve.
#[derive(Debug, Clone)]
pub struct ProcessModel {
    nodes: Vec<ProcessNode>,
    transitions: Vec<Transition>,
    start: NodeId,
    ends: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    /// Node positions sorted by id; used wherever iteration order leaks into output.
    by_id: Vec<usize>,
}

impl PartialEq for ProcessModel {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.transitions == other.transitions
            && self.start == other.start
            && self.ends == other.ends
    }
}

impl ProcessModel {
    pub fn new(
        nodes: Vec<ProcessNode>,
        transitions: Vec<Transition>,
        start: impl Into<NodeId>,
        ends: Vec<NodeId>,
    ) -> Self {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            index.entry(n.id.clone()).or_insert(i);
        }
        let mut succ_sets = vec![BTreeSet::new(); nodes.len()];
        let mut pred_sets = vec![BTreeSet::new(); nodes.len()];
        for t in &transitions {
            if let (Some(&a), Some(&b)) = (index.get(&t.from), index.get(&t.to)) {
                succ_sets[a].insert(b);
                pred_sets[b].insert(a);
            }
        }
        let mut by_id: Vec<usize> = (0..nodes.len()).collect();
        by_id.sort_by(|&a, &b| nodes[a].id.cmp(&nodes[b].id));
        let mut rank = vec![0usize; nodes.len()];
        for (r, &i) in by_id.iter().enumerate() {
            rank[i] = r;
        }
        let sort_by_id = |set: BTreeSet<usize>| {
            let mut v: Vec<usize> = set.into_iter().collect();
            v.sort_by_key(|&i| rank[i]);
            v
        };
        let succ = succ_sets.into_iter().map(sort_by_id).collect();
        let pred = pred_sets.into_iter().map(sort_by_id).collect();
        ProcessModel {
            nodes,
            transitions,
            start: start.into(),
            ends,
            index,
            succ,
            pred,
            by_id,
        }
    }

    pub fn nodes(&self) -> &[ProcessNode] {
        &self.nodes
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn start(&self) -> &NodeId {
        &self.start
    }

    pub fn ends(&self) -> &[NodeId] {
        &self.ends
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, idx: usize) -> &ProcessNode {
        &self.nodes[idx]
    }

    pub fn node_by_id(&self, id: &NodeId) -> Option<&ProcessNode> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn id(&self, idx: usize) -> &NodeId {
        &self.nodes[idx].id
    }

    /// Successor positions, ordered by node id.
    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.succ[idx]
    }

    /// Predecessor positions, ordered by node id.
    pub fn predecessors(&self, idx: usize) -> &[usize] {
        &self.pred[idx]
    }

    /// All node positions ordered by node id.
    pub fn positions_by_id(&self) -> &[usize] {
        &self.by_id
    }

    pub fn start_index(&self) -> Option<usize> {
        self.index_of(&self.start)
    }

    pub fn end_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        for e in &self.ends {
            if let Some(i) = self.index_of(e) {
                mask[i] = true;
            }
        }
        mask
    }

    /// Number of outgoing transitions with a resolvable target.
    pub fn out_degree(&self, idx: usize) -> usize {
        self.transitions
            .iter()
            .filter(|t| self.index_of(&t.from) == Some(idx) && self.index_of(&t.to).is_some())
            .count()
    }

    pub fn derived_kind(&self, idx: usize) -> NodeKind {
        NodeKind::from_out_degree(self.out_degree(idx))
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].contains(&to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Machine-readable validation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    DegenerateModel,
    EmptyModel,
    DuplicateNode,
    ProbabilityOutOfRange,
    UnknownStart,
    NoEnds,
    UnknownEnd,
    DuplicateEnd,
    StartIsEnd,
    UnknownNodeReference,
    DuplicateTransition,
    UnreachableNode,
    UnreachableEnd,
    DeadEnd,
    KindMismatch,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::DegenerateModel => "DEGENERATE_MODEL",
            IssueCode::EmptyModel => "EMPTY_MODEL",
            IssueCode::DuplicateNode => "DUPLICATE_NODE",
            IssueCode::ProbabilityOutOfRange => "PROBABILITY_OUT_OF_RANGE",
            IssueCode::UnknownStart => "UNKNOWN_START",
            IssueCode::NoEnds => "NO_ENDS",
            IssueCode::UnknownEnd => "UNKNOWN_END",
            IssueCode::DuplicateEnd => "DUPLICATE_END",
            IssueCode::StartIsEnd => "START_IS_END",
            IssueCode::UnknownNodeReference => "UNKNOWN_NODE_REFERENCE",
            IssueCode::DuplicateTransition => "DUPLICATE_TRANSITION",
            IssueCode::UnreachableNode => "UNREACHABLE_NODE",
            IssueCode::UnreachableEnd => "UNREACHABLE_END",
            IssueCode::DeadEnd => "DEAD_END",
            IssueCode::KindMismatch => "KIND_MISMATCH",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where in the model an issue was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Locus {
    Model,
    Node { id: NodeId },
    Transition { from: NodeId, to: NodeId, label: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub code: IssueCode,
    pub locus: Locus,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    pub fn is_ok(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    fn push(&mut self, severity: Severity, code: IssueCode, locus: Locus, message: String) {
        self.issues.push(ValidationIssue {
            severity,
            code,
            locus,
            message,
        });
    }

    fn error(&mut self, code: IssueCode, locus: Locus, message: String) {
        self.push(Severity::Error, code, locus, message);
    }
}

fn node_locus(id: &NodeId) -> Locus {
    Locus::Node { id: id.clone() }
}

/// Checks every structural invariant of `model` and reports violations as data.
pub fn validate(model: &ProcessModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = model.node_count();

    if n == 0 {
        report.error(IssueCode::EmptyModel, Locus::Model, "model has no nodes".into());
        return report;
    }
    if n == 1 && model.transitions.is_empty() {
        report.error(
            IssueCode::DegenerateModel,
            Locus::Model,
            "single-node model has nothing to test".into(),
        );
        return report;
    }

    let mut seen = HashMap::new();
    for node in &model.nodes {
        if seen.insert(&node.id, ()).is_some() {
            report.error(
                IssueCode::DuplicateNode,
                node_locus(&node.id),
                format!("node id '{}' is declared more than once", node.id),
            );
        }
        let p = node.outage_probability;
        if !(0.0..=1.0).contains(&p) {
            report.error(
                IssueCode::ProbabilityOutOfRange,
                node_locus(&node.id),
                format!("outage probability {p} of node '{}' is outside [0, 1]", node.id),
            );
        }
    }

    let start = model.start_index();
    if start.is_none() {
        report.error(
            IssueCode::UnknownStart,
            node_locus(&model.start),
            format!("start node '{}' does not exist", model.start),
        );
    }
    if model.ends.is_empty() {
        report.error(IssueCode::NoEnds, Locus::Model, "model declares no end node".into());
    }
    let mut seen_ends = BTreeSet::new();
    for end in &model.ends {
        if !seen_ends.insert(end) {
            report.error(
                IssueCode::DuplicateEnd,
                node_locus(end),
                format!("end node '{end}' is listed twice"),
            );
        }
        if model.index_of(end).is_none() {
            report.error(
                IssueCode::UnknownEnd,
                node_locus(end),
                format!("end node '{end}' does not exist"),
            );
        }
        if *end == model.start {
            report.error(
                IssueCode::StartIsEnd,
                node_locus(end),
                format!("node '{end}' is both start and end"),
            );
        }
    }

    let mut triples = BTreeSet::new();
    for t in &model.transitions {
        let locus = Locus::Transition {
            from: t.from.clone(),
            to: t.to.clone(),
            label: t.label.clone(),
        };
        for endpoint in [&t.from, &t.to] {
            if model.index_of(endpoint).is_none() {
                report.error(
                    IssueCode::UnknownNodeReference,
                    locus.clone(),
                    format!("transition {} -> {} references unknown node '{endpoint}'", t.from, t.to),
                );
            }
        }
        if !triples.insert((&t.from, &t.to, &t.label)) {
            report.error(
                IssueCode::DuplicateTransition,
                locus,
                format!("transition {} -> {} is declared more than once", t.from, t.to),
            );
        }
    }

    if let Some(s) = start {
        let reachable = reachable_from(model, s);
        for &i in model.positions_by_id() {
            if !reachable[i] {
                let id = model.id(i);
                let is_end = model.ends.contains(id);
                report.error(
                    if is_end { IssueCode::UnreachableEnd } else { IssueCode::UnreachableNode },
                    node_locus(id),
                    format!("node '{id}' cannot be reached from the start node"),
                );
            }
        }
    }

    let ends = model.end_mask();
    if ends.iter().any(|&e| e) {
        let reaches_end = reaching(model, &ends);
        for &i in model.positions_by_id() {
            if !reaches_end[i] {
                let id = model.id(i);
                report.error(
                    IssueCode::DeadEnd,
                    node_locus(id),
                    format!("no end node is reachable from '{id}'"),
                );
            }
        }
    }

    for &i in model.positions_by_id() {
        let node = model.node(i);
        let derived = model.derived_kind(i);
        if node.kind != derived {
            report.push(
                Severity::Warning,
                IssueCode::KindMismatch,
                node_locus(&node.id),
                format!(
                    "node '{}' is declared {} but has out-degree {}; treated as {}",
                    node.id,
                    node.kind.as_str(),
                    model.out_degree(i),
                    derived.as_str()
                ),
            );
        }
    }

    report
}

/// Forward reachability from `from` over the model's transitions.
pub(crate) fn reachable_from(model: &ProcessModel, from: usize) -> Vec<bool> {
    let mut seen = vec![false; model.node_count()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        for &v in model.successors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Nodes from which some node in `targets` is reachable.
pub(crate) fn reaching(model: &ProcessModel, targets: &[bool]) -> Vec<bool> {
    let mut seen = targets.to_vec();
    let mut queue: VecDeque<usize> = (0..model.node_count()).filter(|&i| targets[i]).collect();
    while let Some(u) = queue.pop_front() {
        for &v in model.predecessors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// True iff `walk` starts at the start node, finishes at an end node and follows transitions.
pub fn walk_is_valid<S: AsRef<str>>(model: &ProcessModel, walk: &[S]) -> bool {
    let Some(first) = walk.first() else {
        return false;
    };
    let Some(last) = walk.last() else {
        return false;
    };
    if first.as_ref() != model.start.as_str() || !model.ends.iter().any(|e| e.as_str() == last.as_ref()) {
        return false;
    }
    let mut positions = Vec::with_capacity(walk.len());
    for step in walk {
        match model.index_of(&NodeId::from(step.as_ref())) {
            Some(i) => positions.push(i),
            None => return false,
        }
    }
    positions.windows(2).all(|w| model.has_edge(w[0], w[1]))
}
