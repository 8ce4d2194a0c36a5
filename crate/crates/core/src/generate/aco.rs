//! Ant colony search for test cases.
//!
//! Pheromone lives on nodes. Each iteration releases a colony of ants from the
//! start node; an ant picks its next node with probability proportional to
//! `pheromone^alpha * eta^beta`, where `eta` grows with the number of pending
//! requirement entries reachable from the candidate and shrinks with the
//! distance to the nearest one. Ants only move to nodes from which an end node
//! is still reachable within the walk cap. At an end node outside every zone an
//! ant stops, unless a successor still leads to a pending entry; then stopping
//! is drawn against the successors as an option with no attraction.
//! The best ant of an iteration becomes a test case when it tours at least one
//! pending requirement.

use std::collections::BTreeSet;
use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coverage::RequirementSet;
use crate::generate::plan::Plan;
use crate::generate::{Algorithm, GenerateError, GenerationConfig, TestSuite};
use crate::model::ProcessModel;

/// Lower bound keeping every node selectable after long evaporation runs.
const MIN_PHEROMONE: f64 = 1e-3;

pub fn generate_aco(
    model: &ProcessModel,
    requirements: &RequirementSet,
    config: &GenerationConfig,
) -> Result<TestSuite, GenerateError> {
    let plan = Plan::new(model, requirements, config)?;
    let params = config.aco;
    let n = model.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pheromone = vec![1.0f64; n];
    let mut pending: BTreeSet<usize> = (0..plan.len()).collect();
    let mut walks = Vec::new();
    let mut committed = BTreeSet::new();
    let mut eta = attraction(&plan, &pending);

    let mut iteration = 0;
    while !pending.is_empty() && iteration < params.max_iterations {
        iteration += 1;
        let weights: Vec<f64> = (0..n)
            .map(|v| pheromone[v].powf(params.alpha) * eta[v].powf(params.beta))
            .collect();
        let stop_weights: Vec<f64> = pheromone.iter().map(|p| p.powf(params.alpha)).collect();

        let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
        for _ in 0..params.ants {
            let walk = run_ant(&plan, &weights, &stop_weights, &eta, &mut rng);
            let fresh: Vec<usize> = plan
                .settled_with(&committed, &walk)
                .into_iter()
                .filter(|r| pending.contains(r))
                .collect();
            let fitness = fresh.len() as f64 / (walk.len() - 1).max(1) as f64;
            if best.as_ref().is_none_or(|(f, _, _)| fitness > *f) {
                best = Some((fitness, walk, fresh));
            }
        }

        let Some((fitness, walk, fresh)) = best else { break };
        for p in pheromone.iter_mut() {
            *p = (*p * (1.0 - params.evaporation)).max(MIN_PHEROMONE);
        }
        let mut visited = vec![false; n];
        for &v in &walk {
            if !visited[v] {
                visited[v] = true;
                pheromone[v] += params.deposit * fitness;
            }
        }
        if !fresh.is_empty() {
            for r in &fresh {
                pending.remove(r);
            }
            committed.extend(plan.units(&walk));
            walks.push(walk);
            eta = attraction(&plan, &pending);
        }
    }

    let incomplete = !pending.is_empty();
    Ok(plan.finish(walks, Algorithm::Aco, incomplete))
}

fn run_ant(plan: &Plan<'_>, weights: &[f64], stop_weights: &[f64], eta: &[f64], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut walk = vec![plan.start];
    let mut cur = plan.start;
    let mut candidates = Vec::new();
    loop {
        let remaining = plan.cap - (walk.len() - 1);
        candidates.clear();
        candidates.extend(
            plan.model
                .successors(cur)
                .iter()
                .copied()
                .filter(|&s| plan.dist_to_end[s].is_some_and(|d| d < remaining)),
        );
        if plan.is_end[cur] && !plan.mid_tour(cur) {
            // stopping competes with successors that still lead to pending entries
            if !candidates.iter().any(|&c| eta[c] > 1.0) {
                break;
            }
            let stay = stop_weights[cur];
            let total: f64 = stay + candidates.iter().map(|&c| weights[c]).sum::<f64>();
            if total.is_finite() && total > 0.0 && rng.random::<f64>() * total < stay {
                break;
            }
        }
        let next = match candidates.len() {
            0 => break,
            1 => candidates[0],
            _ => roulette(&candidates, weights, rng),
        };
        walk.push(next);
        cur = next;
    }
    walk
}

fn roulette(candidates: &[usize], weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = candidates.iter().map(|&c| weights[c]).sum();
    if !(total > 0.0 && total.is_finite()) {
        return candidates[rng.random_range(0..candidates.len())];
    }
    let mut pick = rng.random::<f64>() * total;
    for &c in candidates {
        pick -= weights[c];
        if pick < 0.0 {
            return c;
        }
    }
    candidates[candidates.len() - 1]
}

/// Heuristic desirability of every node for the current pending requirements.
fn attraction(plan: &Plan<'_>, pending: &BTreeSet<usize>) -> Vec<f64> {
    let model = plan.model;
    let n = model.node_count();
    let mut is_target = vec![false; n];
    for &r in pending {
        is_target[plan.req_pos[r].entry] = true;
    }
    let targets: Vec<usize> = (0..n).filter(|&v| is_target[v]).collect();

    // reverse BFS from each pending entry counts how many entries every node reaches
    let mut reach_count = vec![0usize; n];
    let mut nearest = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    for &t in &targets {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[t] = 0;
        let mut queue = VecDeque::from([t]);
        while let Some(u) = queue.pop_front() {
            reach_count[u] += 1;
            nearest[u] = nearest[u].min(dist[u]);
            for &p in model.predecessors(u) {
                if dist[p] == usize::MAX {
                    dist[p] = dist[u] + 1;
                    queue.push_back(p);
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            if reach_count[v] == 0 {
                1.0
            } else {
                1.0 + reach_count[v] as f64 / (1.0 + nearest[v] as f64)
            }
        })
        .collect()
}
