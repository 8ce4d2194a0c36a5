//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::time::{Duration, Instant};

use lcz_mbt::coverage::{build_requirements, verify_suite, CoverageCriterion, CoveredPair, RequirementSet};
use lcz_mbt::generate::{
    generate_aco, generate_epp, generate_portfolio, generate_spc, Algorithm, GenerationConfig, TestSuite,
};
use lcz_mbt::io::{emit_model, export_suite, import_suite, parse_model, Format};
use lcz_mbt::lcz::{compute_lczs, LczReport, Threshold};
use lcz_mbt::model::{walk_is_valid, ProcessModel, ProcessNode};
use lcz_mbt::pipeline::run_generation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const THRESHOLD: f64 = 0.5;
const CRITERIA: [CoverageCriterion; 2] =
    [CoverageCriterion::EachBorderNodeOnce, CoverageCriterion::AllCombinationsOfBorderNodes];

struct Verdict {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn threshold() -> Threshold {
    Threshold::new(THRESHOLD).unwrap()
}

/// One corpus model under one criterion, with requirements that could be built.
struct Instance {
    seed: u64,
    model: ProcessModel,
    report: LczReport,
    reqs: RequirementSet,
    criterion: CoverageCriterion,
}

struct Corpus {
    instances: Vec<Instance>,
    infeasible: usize,
}

fn build_corpus(models: Vec<(u64, ProcessModel)>) -> Corpus {
    let mut instances = Vec::new();
    let mut infeasible = 0;
    for (seed, model) in models {
        assert!(lcz_mbt::model::validate(&model).is_ok(), "corpus model {seed} is invalid");
        let report = compute_lczs(&model, threshold());
        for criterion in CRITERIA {
            match build_requirements(&model, &report, criterion) {
                Ok(reqs) => instances.push(Instance {
                    seed,
                    model: model.clone(),
                    report: report.clone(),
                    reqs,
                    criterion,
                }),
                Err(_) => infeasible += 1,
            }
        }
    }
    Corpus { instances, infeasible }
}

fn config(inst: &Instance, algorithm: Algorithm, seed: u64) -> GenerationConfig {
    GenerationConfig::new(threshold(), inst.criterion, algorithm).with_seed(seed)
}

/// Suites of the deterministic generators for one instance; `None` when the
/// generator reported an error (only walk-cap overruns are expected).
struct Generated {
    spc: Option<TestSuite>,
    epp: Option<TestSuite>,
    portfolio: Option<TestSuite>,
}

fn run_deterministic(corpus: &Corpus) -> (Vec<Generated>, Duration) {
    let started = Instant::now();
    let out = corpus
        .instances
        .iter()
        .map(|inst| Generated {
            spc: generate_spc(&inst.model, &inst.reqs, &config(inst, Algorithm::Spc, 0)).ok(),
            epp: generate_epp(&inst.model, &inst.reqs, &config(inst, Algorithm::Epp, 0)).ok(),
            portfolio: generate_portfolio(&inst.model, &inst.reqs, &config(inst, Algorithm::Portfolio, 0)).ok(),
        })
        .collect();
    (out, started.elapsed())
}

fn coverage_soundness(corpus: &Corpus, generated: &[Generated], elapsed: Duration) -> Verdict {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut errors = 0;
    for (inst, g) in corpus.instances.iter().zip(generated) {
        for (name, suite) in [("spc", &g.spc), ("epp", &g.epp), ("portfolio", &g.portfolio)] {
            let Some(suite) = suite else {
                errors += 1;
                continue;
            };
            if suite.incomplete {
                continue;
            }
            checked += 1;
            if !verify_suite(&inst.model, &inst.report, inst.criterion, &suite.walks()).satisfied {
                failures.push(format!("{name}@{}/{}", inst.seed, inst.criterion));
            }
        }
    }
    let limit = Duration::from_secs(60);
    Verdict {
        name: "coverage soundness",
        pass: failures.is_empty() && checked > 0 && elapsed < limit,
        detail: format!(
            "{} of {checked} complete spc/epp/portfolio suites verified (100% required), {errors} generator errors, \
             {} EBNO instances skipped as infeasible, generation took {:.1} s (limit 60 s){}",
            checked - failures.len(),
            corpus.infeasible,
            elapsed.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!(", failing: {failures:?}") }
        ),
    }
}

fn path_validity(corpus: &Corpus, generated: &[Generated], aco: &[AcoRun]) -> Verdict {
    let mut cases = 0;
    let mut bad = Vec::new();
    let mut check = |inst: &Instance, name: &str, suite: &TestSuite| {
        let cap = 4 * inst.model.node_count();
        for case in &suite.cases {
            cases += 1;
            if !walk_is_valid(&inst.model, &case.steps) || case.step_count() > cap {
                bad.push(format!("{name}@{}/{}:{}", inst.seed, inst.criterion, case.case_id));
            }
        }
    };
    for (inst, g) in corpus.instances.iter().zip(generated) {
        for (name, suite) in [("spc", &g.spc), ("epp", &g.epp), ("portfolio", &g.portfolio)] {
            if let Some(s) = suite {
                check(inst, name, s);
            }
        }
    }
    for run in aco {
        if let Some(s) = &run.suite {
            check(&corpus.instances[run.instance], "aco", s);
        }
    }
    Verdict {
        name: "path validity",
        pass: bad.is_empty() && cases > 0,
        detail: format!(
            "{} of {cases} test cases are valid walks within the walk cap (100% required){}",
            cases - bad.len(),
            if bad.is_empty() { String::new() } else { format!(", failing: {:?}", &bad[..bad.len().min(10)]) }
        ),
    }
}

fn reference_model_parity() -> Verdict {
    let model = parse_model(&common::fixture("fig1.json"), Format::Json).unwrap();
    let report = compute_lczs(&model, threshold());
    let subsystem3: BTreeSet<String> = model
        .nodes()
        .iter()
        .filter(|n| n.id.0.starts_with("s3_"))
        .map(|n| n.id.0.clone())
        .collect();
    let ok = report.zones.len() == 1 && {
        let z = &report.zones[0];
        let members: BTreeSet<String> = z.members.iter().map(|m| m.0.clone()).collect();
        members == subsystem3 && !z.entries.is_empty() && !z.exits.is_empty()
    };
    let detail = match report.zones.first() {
        Some(z) => format!(
            "{} zone(s); zone 1 has {} members (subsystem 3 has {}), entries {:?}, exits {:?}",
            report.zones.len(),
            z.members.len(),
            subsystem3.len(),
            z.entries.iter().map(|e| e.0.as_str()).collect::<Vec<_>>(),
            z.exits.iter().map(|e| e.0.as_str()).collect::<Vec<_>>()
        ),
        None => "no zones".into(),
    };
    Verdict {
        name: "reference model parity",
        pass: ok,
        detail,
    }
}

/// Cost of touring every requirement in its own case, from BFS distances.
fn naive_baseline(model: &ProcessModel, reqs: &RequirementSet) -> usize {
    let index: HashMap<&str, usize> = model.nodes().iter().enumerate().map(|(i, n)| (n.id.0.as_str(), i)).collect();
    let n = model.node_count();
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for t in model.transitions() {
        let (a, b) = (index[t.from.0.as_str()], index[t.to.0.as_str()]);
        succ[a].push(b);
        pred[b].push(a);
    }
    let bfs = |sources: Vec<usize>, adj: &Vec<Vec<usize>>| {
        let mut d = vec![usize::MAX; n];
        let mut q = VecDeque::new();
        for s in sources {
            d[s] = 0;
            q.push_back(s);
        }
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if d[w] == usize::MAX {
                    d[w] = d[v] + 1;
                    q.push_back(w);
                }
            }
        }
        d
    };
    let from_start = bfs(vec![index[model.start().0.as_str()]], &succ);
    let to_end = bfs(model.ends().iter().map(|e| index[e.0.as_str()]).collect(), &pred);
    reqs.requirements
        .iter()
        .map(|r| {
            let first = index[r.segment[0].0.as_str()];
            let last = index[r.segment.last().unwrap().0.as_str()];
            from_start[first] + (r.segment.len() - 1) + to_end[last]
        })
        .sum()
}

fn minimization(corpus: &Corpus, generated: &[Generated], aco: &[AcoRun]) -> Verdict {
    let mut epp_checked = 0;
    let mut epp_bad = Vec::new();
    let mut portfolio_checked = 0;
    let mut portfolio_bad = Vec::new();
    let complete = |s: &Option<TestSuite>| s.as_ref().filter(|s| !s.incomplete).map(|s| s.total_steps);
    for (i, (inst, g)) in corpus.instances.iter().zip(generated).enumerate() {
        if let Some(epp) = complete(&g.epp) {
            epp_checked += 1;
            if epp > naive_baseline(&inst.model, &inst.reqs) {
                epp_bad.push(inst.seed);
            }
        }
        if let Some(p) = complete(&g.portfolio) {
            portfolio_checked += 1;
            // ACO with the portfolio's own seed (0) is a third candidate
            let aco0 = aco.iter().find(|r| r.instance == i && r.seed == 0).and_then(|r| complete(&r.suite));
            let best = [complete(&g.spc), complete(&g.epp), aco0].into_iter().flatten().min();
            if best.is_some_and(|b| p > b) {
                portfolio_bad.push(inst.seed);
            }
        }
    }

    // exhaustive optimum on small instances: corpus models first, then a supplementary small corpus
    let small_extra = build_corpus(common::small_corpus(400));
    let mut small_checked = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut ratio_bad = Vec::new();
    let mut check_small = |inst: &Instance, portfolio: Option<TestSuite>| {
        if inst.model.node_count() > 8 || inst.reqs.len() > 4 || inst.reqs.is_empty() {
            return;
        }
        let Some(p) = portfolio.filter(|s| !s.incomplete) else { return };
        let cap = 4 * inst.model.node_count();
        let Some(opt) = common::brute_force_optimum(&inst.model, THRESHOLD, inst.criterion, cap) else {
            ratio_bad.push(format!("{}: oracle found no suite", inst.seed));
            return;
        };
        small_checked += 1;
        let ratio = p.total_steps as f64 / opt as f64;
        worst_ratio = worst_ratio.max(ratio);
        if p.total_steps as f64 > 1.5 * opt as f64 + 1e-9 {
            ratio_bad.push(format!("{}/{}: {} vs optimum {opt}", inst.seed, inst.criterion, p.total_steps));
        }
    };
    for (inst, g) in corpus.instances.iter().zip(generated) {
        check_small(inst, g.portfolio.clone());
    }
    for inst in &small_extra.instances {
        let p = generate_portfolio(&inst.model, &inst.reqs, &config(inst, Algorithm::Portfolio, 0)).ok();
        check_small(inst, p);
    }

    Verdict {
        name: "minimization",
        pass: epp_bad.is_empty() && portfolio_bad.is_empty() && ratio_bad.is_empty() && small_checked >= 50,
        detail: format!(
            "epp <= naive baseline on {}/{epp_checked}; portfolio <= min(spc, aco, epp) on {}/{portfolio_checked}; \
             portfolio <= 1.5 x exhaustive optimum on {}/{small_checked} small instances (>= 50 required), worst ratio {worst_ratio:.3}{}",
            epp_checked - epp_bad.len(),
            portfolio_checked - portfolio_bad.len(),
            small_checked - ratio_bad.len().min(small_checked),
            if epp_bad.is_empty() && portfolio_bad.is_empty() && ratio_bad.is_empty() {
                String::new()
            } else {
                format!(", failing: epp {epp_bad:?} portfolio {portfolio_bad:?} ratio {ratio_bad:?}")
            }
        ),
    }
}

struct AcoRun {
    instance: usize,
    seed: u64,
    suite: Option<TestSuite>,
}

/// ACO over every instance where spc produced a complete suite, seeds 0 to 20.
fn run_aco(corpus: &Corpus, generated: &[Generated]) -> (Vec<AcoRun>, Duration) {
    let started = Instant::now();
    let jobs: Vec<(usize, u64)> = corpus
        .instances
        .iter()
        .zip(generated)
        .enumerate()
        .filter(|(_, (_, g))| g.spc.as_ref().is_some_and(|s| !s.incomplete))
        .flat_map(|(i, _)| (0..=20u64).map(move |seed| (i, seed)))
        .collect();
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = jobs.len().div_ceil(threads).max(1);
    let mut runs: Vec<AcoRun> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&(i, seed)| {
                            let inst = &corpus.instances[i];
                            AcoRun {
                                instance: i,
                                seed,
                                suite: generate_aco(&inst.model, &inst.reqs, &config(inst, Algorithm::Aco, seed)).ok(),
                            }
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    runs.sort_by_key(|r| (r.instance, r.seed));
    (runs, started.elapsed())
}

fn aco_convergence(corpus: &Corpus, runs: &[AcoRun], elapsed: Duration) -> Verdict {
    let mut total = 0;
    let mut complete = 0;
    let mut silent_short = Vec::new();
    let mut unflagged = 0;
    for run in runs.iter().filter(|r| (1..=20).contains(&r.seed)) {
        total += 1;
        let inst = &corpus.instances[run.instance];
        let Some(suite) = &run.suite else {
            silent_short.push(format!("{}/{} seed {}: error", inst.seed, inst.criterion, run.seed));
            continue;
        };
        let satisfied = verify_suite(&inst.model, &inst.report, inst.criterion, &suite.walks()).satisfied;
        if suite.incomplete {
            if suite.warning_code() != Some("ACO_INCOMPLETE_COVERAGE") {
                unflagged += 1;
            }
        } else if satisfied {
            complete += 1;
        } else {
            silent_short.push(format!("{}/{} seed {}", inst.seed, inst.criterion, run.seed));
        }
    }
    let rate = if total == 0 { 0.0 } else { complete as f64 / total as f64 };
    Verdict {
        name: "aco convergence",
        pass: rate >= 0.95 && silent_short.is_empty() && unflagged == 0,
        detail: format!(
            "complete on {complete}/{total} runs ({:.2}%, >= 95% required) over seeds 1-20; \
             {} unflagged short suites; {:.1} s",
            100.0 * rate,
            silent_short.len() + unflagged,
            elapsed.as_secs_f64()
        ),
    }
}

fn determinism(corpus: &Corpus) -> Verdict {
    let mut compared = 0;
    let mut diffs = Vec::new();
    for inst in corpus.instances.iter().step_by(10) {
        for algorithm in [Algorithm::Spc, Algorithm::Aco, Algorithm::Epp, Algorithm::Portfolio] {
            let cfg = config(inst, algorithm, 42);
            let (Ok(a), Ok(b)) = (run_generation(&inst.model, &cfg), run_generation(&inst.model, &cfg)) else {
                continue;
            };
            compared += 1;
            for f in [Format::Json, Format::Xml, Format::Csv] {
                if export_suite(&a.annotated, f).payload != export_suite(&b.annotated, f).payload {
                    diffs.push(format!("{}/{}/{algorithm}/{f}", inst.seed, inst.criterion));
                }
            }
            if a.suite != b.suite {
                diffs.push(format!("{}/{}/{algorithm}/suite", inst.seed, inst.criterion));
            }
        }
    }
    let mut golden_bad = Vec::new();
    let goldens = common::golden_documents();
    for (name, text) in &goldens {
        let expected = std::fs::read_to_string(common::golden_path(name)).unwrap_or_default();
        if &expected != text {
            golden_bad.push(name.clone());
        }
    }
    Verdict {
        name: "determinism",
        pass: diffs.is_empty() && golden_bad.is_empty() && compared > 0,
        detail: format!(
            "{compared} repeated generations byte-identical in JSON/XML/CSV: {}; golden files matching: {}/{}{}",
            diffs.is_empty(),
            goldens.len() - golden_bad.len(),
            goldens.len(),
            if golden_bad.is_empty() { String::new() } else { format!(", differing: {golden_bad:?} {diffs:?}") }
        ),
    }
}

const AWKWARD: [&str; 8] = ["comma, here", "quote \"q\"", "a<b>&c", "line\nbreak", "tab\there", "ümlaut ñ", "semi;colon", " padded "];

fn round_trips(corpus: &Corpus) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut suites = 0;
    let mut bad = Vec::new();
    let algorithms = [Algorithm::Spc, Algorithm::Aco, Algorithm::Epp, Algorithm::Portfolio];
    for inst in corpus.instances.iter().filter(|i| !i.reqs.is_empty()) {
        if suites == 100 {
            break;
        }
        // randomize node names so escaping is exercised
        let nodes: Vec<ProcessNode> = inst
            .model
            .nodes()
            .iter()
            .map(|n| {
                let mut n = n.clone();
                if rng.random_bool(0.5) {
                    n.name = format!("{} {}", n.id, AWKWARD[rng.random_range(0..AWKWARD.len())]);
                }
                n
            })
            .collect();
        let model = ProcessModel::new(
            nodes,
            inst.model.transitions().to_vec(),
            inst.model.start().clone(),
            inst.model.ends().to_vec(),
        );
        let algorithm = algorithms[rng.random_range(0..algorithms.len())];
        let mut cfg = GenerationConfig::new(threshold(), inst.criterion, algorithm).with_seed(rng.random());
        if rng.random_bool(0.3) {
            cfg.walk_cap = Some(8 * model.node_count());
        }
        let Ok(out) = run_generation(&model, &cfg) else { continue };
        suites += 1;
        for f in [Format::Json, Format::Xml] {
            match import_suite(&export_suite(&out.annotated, f).payload, f) {
                Ok(back) if back == out.annotated => {}
                _ => bad.push(format!("{}/{}/{f}", inst.seed, inst.criterion)),
            }
        }
    }
    let mut fixtures = 0;
    for name in ["g1", "g2", "fig1"] {
        for f in [Format::Json, Format::Xml] {
            let text = common::fixture(&format!("{name}.{f}"));
            fixtures += 1;
            let same = parse_model(&text, f).is_ok_and(|m| emit_model(&m, f).is_ok_and(|e| e == text));
            if !same {
                bad.push(format!("fixture {name}.{f}"));
            }
        }
    }
    Verdict {
        name: "round-trips",
        pass: bad.is_empty() && suites == 100,
        detail: format!(
            "{suites} randomized suites (100 required) and {fixtures} model fixtures round-trip exactly: {}{}",
            bad.is_empty(),
            if bad.is_empty() { String::new() } else { format!(", failing: {bad:?}") }
        ),
    }
}

fn criteria_relationship(corpus: &Corpus) -> Verdict {
    let mut eligible = 0;
    let mut strict = 0;
    let mut equal = Vec::new();
    let mut not_superset = Vec::new();
    let mut by_seed: HashMap<u64, [Option<&Instance>; 2]> = HashMap::new();
    for inst in &corpus.instances {
        let slot = match inst.criterion {
            CoverageCriterion::EachBorderNodeOnce => 0,
            CoverageCriterion::AllCombinationsOfBorderNodes => 1,
        };
        by_seed.entry(inst.seed).or_default()[slot] = Some(inst);
    }
    let mut seeds: Vec<u64> = by_seed.keys().copied().collect();
    seeds.sort();
    for seed in seeds {
        let [Some(ebno), Some(all)] = by_seed[&seed] else { continue };
        let qualifies = ebno.report.zones.iter().any(|z| z.entries.len() >= 2 && z.exits.len() >= 2);
        if !qualifies {
            continue;
        }
        let Ok(suite) = generate_portfolio(&all.model, &all.reqs, &config(all, Algorithm::Portfolio, 0)) else {
            continue;
        };
        if suite.incomplete {
            continue;
        }
        eligible += 1;
        let covered: BTreeSet<CoveredPair> = suite.cases.iter().flat_map(|c| c.covered_pairs.iter().cloned()).collect();
        let required: BTreeSet<CoveredPair> = ebno
            .reqs
            .requirements
            .iter()
            .map(|r| CoveredPair {
                zone_id: r.zone_id,
                entry: r.entry.clone(),
                exit: r.exit.clone(),
            })
            .collect();
        if !covered.is_superset(&required) {
            not_superset.push(seed);
        } else if covered.len() > required.len() {
            strict += 1;
        } else {
            equal.push(seed);
        }
    }
    Verdict {
        name: "criteria relationship",
        pass: eligible > 0 && strict == eligible,
        detail: format!(
            "all-combinations pairs strictly contain the each-border-node-once pairs on {strict}/{eligible} eligible instances \
             (all required); equal on {} {:?}; not a superset on {} {:?}",
            equal.len(),
            equal,
            not_superset.len(),
            not_superset
        ),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // cargo passes harness flags such as --list; only honour a listing request
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let corpus = build_corpus(common::corpus());
    let (generated, elapsed) = run_deterministic(&corpus);
    let (aco, aco_elapsed) = run_aco(&corpus, &generated);

    let verdicts = [
        coverage_soundness(&corpus, &generated, elapsed),
        path_validity(&corpus, &generated, &aco),
        reference_model_parity(),
        minimization(&corpus, &generated, &aco),
        aco_convergence(&corpus, &aco, aco_elapsed),
        determinism(&corpus),
        round_trips(&corpus),
        criteria_relationship(&corpus),
    ];
    println!("acceptance: {} instances from {} corpus models", corpus.instances.len(), 500);
    let mut failed = 0;
    for v in &verdicts {
        println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
