//! Breadth-first path helpers over the model's dense index.
//!
//! Successor lists are sorted by node id, so the first parent that discovers a
//! node lies on the lexicographically smallest shortest path to it, and nodes
//! leave the queue in lexicographic order of those paths within each level.

use std::collections::VecDeque;

use crate::model::ProcessModel;

/// Shortest walk from `from` to the first node satisfying `is_target`.
///
/// Nodes other than `from` are expanded only when `expand` accepts them;
/// rejected nodes can still be reached as the final step. Among walks of
/// minimal edge count the lexicographically smallest id sequence wins.
pub(crate) fn shortest_walk(
    model: &ProcessModel,
    from: usize,
    is_target: impl Fn(usize) -> bool,
    expand: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let n = model.node_count();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        if is_target(u) {
            let mut path = vec![u];
            let mut cur = u;
            while cur != from {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        if u != from && !expand(u) {
            continue;
        }
        for &v in model.successors(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

/// Shortest walk over the whole model from `from` to `to`.
pub(crate) fn connector(model: &ProcessModel, from: usize, to: usize) -> Option<Vec<usize>> {
    shortest_walk(model, from, |v| v == to, |_| true)
}

/// Edge-count distance from every node to the nearest node in `targets`.
pub(crate) fn distances_to(model: &ProcessModel, targets: &[bool]) -> Vec<Option<usize>> {
    let mut dist = vec![None; model.node_count()];
    let mut queue = VecDeque::new();
    for (i, &t) in targets.iter().enumerate() {
        if t {
            dist[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap_or(0) + 1;
        for &p in model.predecessors(u) {
            if dist[p].is_none() {
                dist[p] = Some(d);
                queue.push_back(p);
            }
        }
    }
    dist
}

/// Edge-count distance from `from` to every node.
pub(crate) fn distances_from(model: &ProcessModel, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; model.node_count()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap_or(0) + 1;
        for &v in model.successors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d);
                queue.push_back(v);
            }
        }
    }
    dist
}
