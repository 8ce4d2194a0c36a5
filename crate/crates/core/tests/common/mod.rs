#![allow(dead_code)]

//! Shared test support: a seeded random model corpus and independent oracles.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use lcz_mbt::coverage::CoverageCriterion;
use lcz_mbt::model::{NodeKind, ProcessModel, ProcessNode, Transition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const OFFLINE: f64 = 0.8;
pub const ONLINE: f64 = 0.05;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

/// Random model with `min_n..=max_n` nodes. Odd seeds add back edges.
///
/// Node `v00` is the start and the last node is an end; a random spanning
/// tree makes everything reachable and a forward edge from each node keeps
/// an end reachable. Probabilities come from the {0.05, 0.8} tiers.
pub fn random_model(seed: u64, min_n: usize, max_n: usize) -> ProcessModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(min_n..=max_n);
    let cyclic = seed % 2 == 1;
    let offline_share = rng.random_range(0.2..0.5);

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..n {
        edges.insert((rng.random_range(0..i), i));
    }
    let second_end = (n > 6 && rng.random_bool(0.3)).then(|| rng.random_range(n / 2..n - 1));
    for i in 0..n - 1 {
        if Some(i) == second_end {
            continue;
        }
        if !edges.iter().any(|&(a, b)| a == i && b > i) {
            edges.insert((i, rng.random_range(i + 1..n)));
        }
    }
    for _ in 0..n / 3 {
        let a = rng.random_range(0..n - 1);
        let b = rng.random_range(a + 1..n);
        edges.insert((a, b));
    }
    if cyclic {
        for _ in 0..n / 5 + 1 {
            let a = rng.random_range(1..n);
            let b = rng.random_range(0..a);
            edges.insert((a, b));
        }
    }

    let id = |i: usize| format!("v{i:02}");
    let mut out_degree = vec![0usize; n];
    for &(a, _) in &edges {
        out_degree[a] += 1;
    }
    let nodes = (0..n)
        .map(|i| {
            let p = if rng.random_bool(offline_share) { OFFLINE } else { ONLINE };
            ProcessNode::new(id(i), p).with_kind(NodeKind::from_out_degree(out_degree[i]))
        })
        .collect();
    let transitions = edges.iter().map(|&(a, b)| Transition::new(id(a), id(b))).collect();
    let mut ends = vec![id(n - 1).into()];
    if let Some(e) = second_end {
        ends.push(id(e).into());
    }
    ProcessModel::new(nodes, transitions, id(0), ends)
}

/// The acceptance corpus: 500 models of 5 to 40 nodes, half of them cyclic.
pub fn corpus() -> Vec<(u64, ProcessModel)> {
    (0..500u64).map(|s| (s, random_model(s, 5, 40))).collect()
}

/// Small models (5 to 8 nodes) for the exhaustive optimum oracle.
pub fn small_corpus(count: u64) -> Vec<(u64, ProcessModel)> {
    (0..count).map(|s| (10_000 + s, random_model(10_000 + s, 5, 8))).collect()
}

/// A zone as recomputed by [`oracle_zones`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleZone {
    pub members: BTreeSet<String>,
    pub entries: BTreeSet<String>,
    pub exits: BTreeSet<String>,
}

/// Zones by union-find over the offline nodes, sorted by smallest member.
pub fn oracle_zones(model: &ProcessModel, threshold: f64) -> Vec<OracleZone> {
    let offline: BTreeSet<&str> = model
        .nodes()
        .iter()
        .filter(|n| n.outage_probability > threshold)
        .map(|n| n.id.0.as_str())
        .collect();
    let mut parent: HashMap<&str, &str> = offline.iter().map(|&n| (n, n)).collect();
    fn find<'a>(parent: &mut HashMap<&'a str, &'a str>, x: &'a str) -> &'a str {
        let p = parent[x];
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    for t in model.transitions() {
        let (a, b) = (t.from.0.as_str(), t.to.0.as_str());
        if offline.contains(a) && offline.contains(b) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent.insert(ra.max(rb), ra.min(rb));
            }
        }
    }
    let mut groups: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for &n in &offline {
        let r = find(&mut parent, n);
        groups.entry(r).or_default().insert(n.to_owned());
    }
    let mut zones: Vec<OracleZone> = groups
        .into_values()
        .map(|members| {
            let mut entries = BTreeSet::new();
            let mut exits = BTreeSet::new();
            for t in model.transitions() {
                let (a, b) = (&t.from.0, &t.to.0);
                if members.contains(b) && !members.contains(a) {
                    entries.insert(b.clone());
                }
                if members.contains(a) && !members.contains(b) {
                    exits.insert(b.clone());
                }
            }
            if members.contains(&model.start().0) {
                entries.insert(model.start().0.clone());
            }
            OracleZone { members, entries, exits }
        })
        .collect();
    zones.sort_by(|a, b| a.members.first().cmp(&b.members.first()));
    zones
}

/// Coverage targets of a criterion, derived from the oracle zones.
///
/// A target is either a border node of a zone (each border node once) or an
/// (entry, exit) pair (all combinations); entry-only zones contribute their
/// entries in both cases.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Target {
    Node(usize, String),
    Pair(String, Option<String>),
}

/// Minimum total steps of any suite satisfying `criterion`, found by an
/// exhaustive search: a breadth-first search over (node, open entries,
/// covered targets) states finds the cheapest walk for every reachable
/// coverage set, then a set-cover recursion combines walks.
///
/// Walks are limited to `cap` steps. Returns `None` when the criterion is
/// unsatisfiable within the cap, and `Some(0)` when there are no targets.
pub fn brute_force_optimum(model: &ProcessModel, threshold: f64, criterion: CoverageCriterion, cap: usize) -> Option<usize> {
    let zones = oracle_zones(model, threshold);
    let index: HashMap<&str, usize> = model.nodes().iter().enumerate().map(|(i, n)| (n.id.0.as_str(), i)).collect();
    let n = model.node_count();
    let mut succ = vec![Vec::new(); n];
    for t in model.transitions() {
        succ[index[t.from.0.as_str()]].push(index[t.to.0.as_str()]);
    }
    let is_end: Vec<bool> = (0..n).map(|i| model.ends().contains(&model.nodes()[i].id)).collect();
    let zone_of: Vec<Option<usize>> = (0..n)
        .map(|i| zones.iter().position(|z| z.members.contains(&model.nodes()[i].id.0)))
        .collect();
    let is_entry: Vec<bool> = (0..n)
        .map(|i| zones.iter().any(|z| z.entries.contains(&model.nodes()[i].id.0)))
        .collect();
    let name = |i: usize| model.nodes()[i].id.0.clone();

    // feasible pairs: entry reaches exit through members only
    let mut pair_targets = BTreeSet::new();
    for z in &zones {
        if z.exits.is_empty() {
            for e in &z.entries {
                pair_targets.insert((e.clone(), None));
            }
            continue;
        }
        for e in &z.entries {
            let mut seen = BTreeSet::from([index[e.as_str()]]);
            let mut queue = VecDeque::from([index[e.as_str()]]);
            while let Some(v) = queue.pop_front() {
                for &w in &succ[v] {
                    let wn = name(w);
                    if z.exits.contains(&wn) {
                        pair_targets.insert((e.clone(), Some(wn)));
                    } else if z.members.contains(&wn) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    let targets: Vec<Target> = match criterion {
        CoverageCriterion::AllCombinationsOfBorderNodes => {
            pair_targets.iter().map(|(e, x)| Target::Pair(e.clone(), x.clone())).collect()
        }
        CoverageCriterion::EachBorderNodeOnce => zones
            .iter()
            .enumerate()
            .flat_map(|(zi, z)| z.entries.iter().chain(z.exits.iter()).map(move |b| Target::Node(zi, b.clone())))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if targets.is_empty() {
        return Some(0);
    }
    assert!(targets.len() <= 20, "too many targets for the exhaustive oracle");
    let target_bit: HashMap<&Target, u32> = targets.iter().enumerate().map(|(i, t)| (t, 1u32 << i)).collect();
    let full: u32 = (1u32 << targets.len()) - 1;

    let cover_pair = |e: usize, x: Option<usize>| -> u32 {
        let (en, xn) = (name(e), x.map(name));
        match criterion {
            CoverageCriterion::AllCombinationsOfBorderNodes => {
                target_bit.get(&Target::Pair(en, xn)).copied().unwrap_or(0)
            }
            CoverageCriterion::EachBorderNodeOnce => {
                let zi = zone_of[e].expect("entries are zone members");
                let mut m = target_bit.get(&Target::Node(zi, en)).copied().unwrap_or(0);
                if let Some(xn) = xn {
                    m |= target_bit.get(&Target::Node(zi, xn)).copied().unwrap_or(0);
                }
                m
            }
        }
    };
    let zone_has_exits: Vec<bool> = zones.iter().map(|z| !z.exits.is_empty()).collect();

    // arriving at `v` with open entries `open` (bitset over node indices)
    let arrive = |prev_zone: Option<usize>, open: u64, v: usize| -> (u64, u32) {
        let mut covered = 0u32;
        let mut open_next = 0u64;
        match zone_of[v] {
            Some(z) => {
                if prev_zone == Some(z) {
                    open_next = open;
                }
                if is_entry[v] {
                    open_next |= 1u64 << v;
                    if !zone_has_exits[z] {
                        covered |= cover_pair(v, None);
                    }
                }
            }
            None => {
                for e in 0..n {
                    if open & (1u64 << e) != 0 {
                        covered |= cover_pair(e, Some(v));
                    }
                }
            }
        }
        (open_next, covered)
    };

    let start = index[model.start().0.as_str()];
    let (open0, cov0) = arrive(None, 0, start);
    let mut dist: HashMap<(usize, u64, u32), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert((start, open0, cov0), 0);
    queue.push_back((start, open0, cov0));
    let mut best_walk: HashMap<u32, usize> = HashMap::new();
    while let Some(state @ (v, open, cov)) = queue.pop_front() {
        let d = dist[&state];
        if is_end[v] {
            let e = best_walk.entry(cov).or_insert(d);
            *e = (*e).min(d);
        }
        if d == cap {
            continue;
        }
        for &w in &succ[v] {
            let (open_w, add) = arrive(zone_of[v], open, w);
            let next = (w, open_w, cov | add);
            if !dist.contains_key(&next) {
                dist.insert(next, d + 1);
                queue.push_back(next);
            }
        }
    }

    // drop dominated walks, then cheapest cover of `full`
    let mut walks: Vec<(u32, usize)> = best_walk.into_iter().filter(|&(m, _)| m != 0).collect();
    walks.sort_by_key(|&(m, c)| (c, std::cmp::Reverse(m.count_ones()), m));
    let mut kept: Vec<(u32, usize)> = Vec::new();
    for (m, c) in walks {
        if !kept.iter().any(|&(km, kc)| kc <= c && km & m == m) {
            kept.push((m, c));
        }
    }
    let mut memo: HashMap<u32, Option<usize>> = HashMap::new();
    fn cover(missing: u32, kept: &[(u32, usize)], memo: &mut HashMap<u32, Option<usize>>) -> Option<usize> {
        if missing == 0 {
            return Some(0);
        }
        if let Some(&r) = memo.get(&missing) {
            return r;
        }
        let low = missing & missing.wrapping_neg();
        let mut best: Option<usize> = None;
        for &(m, c) in kept.iter().filter(|&&(m, _)| m & low != 0) {
            if let Some(rest) = cover(missing & !m, kept, memo) {
                best = Some(best.map_or(c + rest, |b: usize| b.min(c + rest)));
            }
        }
        memo.insert(missing, best);
        best
    }
    cover(full, &kept, &mut memo)
}

/// Golden documents for the G1 and G2 fixtures as (file name, contents).
pub fn golden_documents() -> Vec<(String, String)> {
    use lcz_mbt::generate::{Algorithm, GenerationConfig};
    use lcz_mbt::io::{export_suite, parse_model, render_dot, Format};
    use lcz_mbt::lcz::{compute_lczs, Threshold};
    use lcz_mbt::pipeline::run_generation;

    let t = Threshold::new(0.5).unwrap();
    let g1 = parse_model(&fixture("g1.json"), Format::Json).unwrap();
    let g2 = parse_model(&fixture("g2.json"), Format::Json).unwrap();
    let mut out = Vec::new();
    let runs = [
        ("g1_ebno_portfolio", &g1, CoverageCriterion::EachBorderNodeOnce, Algorithm::Portfolio, 42),
        ("g2_all_pairs_portfolio", &g2, CoverageCriterion::AllCombinationsOfBorderNodes, Algorithm::Portfolio, 42),
        ("g2_ebno_aco", &g2, CoverageCriterion::EachBorderNodeOnce, Algorithm::Aco, 7),
    ];
    for (name, model, criterion, algorithm, seed) in runs {
        let cfg = GenerationConfig::new(t, criterion, algorithm).with_seed(seed);
        let result = run_generation(model, &cfg).unwrap();
        for f in [Format::Json, Format::Xml, Format::Csv] {
            out.push((format!("{name}.{f}"), export_suite(&result.annotated, f).payload));
        }
        if name == "g2_all_pairs_portfolio" {
            out.push((format!("{name}.dot"), render_dot(model, &result.report, Some(&result.suite))));
        }
    }
    out.push(("g1_lcz.dot".into(), render_dot(&g1, &compute_lczs(&g1, t), None)));
    out
}

pub fn golden_path(name: &str) -> PathBuf {
    fixture_path("golden").join(name)
}
