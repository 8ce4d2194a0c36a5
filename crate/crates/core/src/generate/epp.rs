//! Requirement chaining through a minimum path cover of the prefix graph.
//!
//! The prefix graph has one vertex per requirement segment and an arc A -> B
//! when B's entry can be reached from A's last node. Only arcs whose connector
//! is no longer than finishing A and restarting for B are kept, so following
//! an arc never costs more than running the two requirements as separate
//! cases. A maximum bipartite matching between segment tails and segment heads
//! yields a minimum set of chains; each chain becomes one test case.

use crate::coverage::RequirementSet;
use crate::generate::plan::Plan;
use crate::generate::{Algorithm, GenerateError, GenerationConfig, TestSuite};
use crate::model::ProcessModel;
use crate::paths;

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    saving: usize,
}

pub fn generate_epp(
    model: &ProcessModel,
    requirements: &RequirementSet,
    config: &GenerationConfig,
) -> Result<TestSuite, GenerateError> {
    let plan = Plan::new(model, requirements, config)?;
    let n = plan.len();
    let arcs = prefix_graph(&plan);
    let next = chain_links(n, &arcs);

    let mut has_prev = vec![false; n];
    for &b in next.iter().flatten() {
        has_prev[b] = true;
    }
    let mut walks = Vec::new();
    for head in (0..n).filter(|&r| !has_prev[r]) {
        let mut chain = vec![head];
        let mut cur = head;
        while let Some(b) = next[cur] {
            chain.push(b);
            cur = b;
        }
        stitch(&plan, &chain, &mut walks);
    }
    Ok(plan.finish(walks, Algorithm::Epp, false))
}

fn prefix_graph(plan: &Plan<'_>) -> Vec<Vec<Arc>> {
    let n = plan.len();
    let mut arcs = vec![Vec::new(); n];
    for (a, pos_a) in plan.req_pos.iter().enumerate() {
        let dist = paths::distances_from(plan.model, pos_a.last);
        let suffix = plan.dist_to_end[pos_a.last].unwrap_or(usize::MAX);
        for (b, pos_b) in plan.req_pos.iter().enumerate() {
            if a == b {
                continue;
            }
            let (Some(conn), Some(prefix)) = (dist[pos_b.entry], plan.dist_from_start[pos_b.entry]) else {
                continue;
            };
            let restart = suffix.saturating_add(prefix);
            if conn <= restart {
                arcs[a].push(Arc { to: b, saving: restart - conn });
            }
        }
        arcs[a].sort_by(|x, y| y.saving.cmp(&x.saving).then(x.to.cmp(&y.to)));
    }
    arcs
}

/// Successor of each requirement in the path cover.
///
/// The matching may close cycles when the model itself is cyclic; each cycle is
/// opened at its arc with the smallest saving, preferring to start the chain
/// at the lowest requirement index.
fn chain_links(n: usize, arcs: &[Vec<Arc>]) -> Vec<Option<usize>> {
    let mut match_head = vec![usize::MAX; n];
    for a in 0..n {
        let mut visited = vec![false; n];
        augment(a, arcs, &mut match_head, &mut visited);
    }
    let mut next = vec![None; n];
    for (b, &a) in match_head.iter().enumerate() {
        if a != usize::MAX {
            next[a] = Some(b);
        }
    }

    let mut has_prev = vec![false; n];
    for &b in next.iter().flatten() {
        has_prev[b] = true;
    }
    let mut seen = vec![false; n];
    for head in (0..n).filter(|&r| !has_prev[r]) {
        let mut cur = Some(head);
        while let Some(c) = cur {
            seen[c] = true;
            cur = next[c];
        }
    }
    for r in 0..n {
        if seen[r] {
            continue;
        }
        let mut members = Vec::new();
        let mut cur = r;
        while !seen[cur] {
            seen[cur] = true;
            members.push(cur);
            cur = next[cur].expect("unvisited requirements lie on matched cycles");
        }
        let saving = |a: usize| {
            let b = next[a].expect("cycle member has a successor");
            arcs[a].iter().find(|arc| arc.to == b).map_or(0, |arc| arc.saving)
        };
        let cut = members
            .iter()
            .copied()
            .min_by_key(|&a| (saving(a), next[a]))
            .expect("cycle is non-empty");
        next[cut] = None;
    }
    next
}

fn augment(a: usize, arcs: &[Vec<Arc>], match_head: &mut [usize], visited: &mut [bool]) -> bool {
    for arc in &arcs[a] {
        let b = arc.to;
        if visited[b] {
            continue;
        }
        visited[b] = true;
        if match_head[b] == usize::MAX || augment(match_head[b], arcs, match_head, visited) {
            match_head[b] = a;
            return true;
        }
    }
    false
}

/// Turns a chain of requirements into walks, splitting where the cap would be exceeded.
fn stitch(plan: &Plan<'_>, chain: &[usize], walks: &mut Vec<Vec<usize>>) {
    let mut walk: Vec<usize> = Vec::new();
    for &r in chain {
        let pos = &plan.req_pos[r];
        let close = plan.dist_to_end[pos.last].expect("exit reaches an end");
        if let Some(&cur) = walk.last() {
            let conn = plan.connector(cur, pos.entry).expect("arc implies reachability");
            let total = walk.len() - 1 + conn.len() - 1 + pos.edges() + close;
            if total <= plan.cap {
                walk.extend_from_slice(&conn[1..]);
                walk.extend_from_slice(&pos.segment[1..]);
                continue;
            }
            plan.close(&mut walk);
            walks.push(std::mem::take(&mut walk));
        }
        walk = plan.connector(plan.start, pos.entry).expect("entry reachable from start");
        walk.extend_from_slice(&pos.segment[1..]);
    }
    if !walk.is_empty() {
        plan.close(&mut walk);
        walks.push(walk);
    }
}
