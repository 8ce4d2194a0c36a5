use std::collections::{BTreeMap, BTreeSet};

use crate::coverage::{CoverageCriterion, CoveredPair, RequirementSet};
use crate::generate::{Algorithm, GenerateError, GenerationConfig, TestCase, TestSuite};
use crate::model::ProcessModel;
use crate::paths;

pub(crate) struct ReqPos {
    pub entry: usize,
    pub last: usize,
    pub segment: Vec<usize>,
}

impl ReqPos {
    pub fn edges(&self) -> usize {
        self.segment.len() - 1
    }
}

/// Index-space view of one generation problem shared by all strategies.
pub(crate) struct Plan<'a> {
    pub model: &'a ProcessModel,
    pub reqs: &'a RequirementSet,
    pub config: GenerationConfig,
    pub cap: usize,
    pub start: usize,
    pub is_end: Vec<bool>,
    pub dist_to_end: Vec<Option<usize>>,
    pub dist_from_start: Vec<Option<usize>>,
    pub req_pos: Vec<ReqPos>,
    zone_of: Vec<Option<usize>>,
    is_entry: Vec<bool>,
    /// Coverage units: requirement pairs under all-combinations, border nodes
    /// (stored as `(zone, node, None)`) under each-border-node-once.
    unit_of: BTreeMap<CoveredPair, usize>,
    req_units: Vec<Vec<usize>>,
}

fn border_key(zone_id: u32, node: &crate::model::NodeId) -> CoveredPair {
    CoveredPair { zone_id, entry: node.clone(), exit: None }
}

impl<'a> Plan<'a> {
    pub fn new(
        model: &'a ProcessModel,
        reqs: &'a RequirementSet,
        config: &GenerationConfig,
    ) -> Result<Self, GenerateError> {
        config.check()?;
        let cap = config.cap(model);
        let start = model
            .start_index()
            .ok_or_else(|| GenerateError::InvalidConfig(format!("start node '{}' does not exist", model.start())))?;
        let is_end = model.end_mask();
        let dist_to_end = paths::distances_to(model, &is_end);
        let dist_from_start = paths::distances_from(model, start);

        let n = model.node_count();
        let mut zone_of = vec![None; n];
        let mut is_entry = vec![false; n];
        for (z, scope) in reqs.zones.iter().enumerate() {
            for m in &scope.members {
                if let Some(i) = model.index_of(m) {
                    zone_of[i] = Some(z);
                }
            }
            for e in &scope.entries {
                if let Some(i) = model.index_of(e) {
                    is_entry[i] = true;
                }
            }
        }

        let mut req_pos = Vec::with_capacity(reqs.len());
        let mut unit_of = BTreeMap::new();
        let mut req_units = Vec::with_capacity(reqs.len());
        for r in &reqs.requirements {
            let segment: Vec<usize> = r
                .segment
                .iter()
                .map(|id| {
                    model.index_of(id).ok_or_else(|| {
                        GenerateError::InvalidConfig(format!("requirement {} references unknown node '{id}'", r.req_id))
                    })
                })
                .collect::<Result<_, _>>()?;
            let entry = segment[0];
            let last = *segment.last().unwrap_or(&entry);
            let needed = dist_from_start[entry]
                .zip(dist_to_end[last])
                .map(|(pre, suf)| pre + segment.len() - 1 + suf);
            match needed {
                Some(needed) if needed <= cap => {}
                other => {
                    return Err(GenerateError::WalkCapExceeded {
                        req_id: r.req_id.clone(),
                        needed: other.unwrap_or(usize::MAX),
                        cap,
                    })
                }
            }
            req_pos.push(ReqPos { entry, last, segment });
            let keys = match reqs.criterion {
                CoverageCriterion::AllCombinationsOfBorderNodes => vec![CoveredPair {
                    zone_id: r.zone_id,
                    entry: r.entry.clone(),
                    exit: r.exit.clone(),
                }],
                CoverageCriterion::EachBorderNodeOnce => std::iter::once(&r.entry)
                    .chain(r.exit.as_ref())
                    .map(|b| border_key(r.zone_id, b))
                    .collect(),
            };
            let units = keys
                .into_iter()
                .map(|k| {
                    let next = unit_of.len();
                    *unit_of.entry(k).or_insert(next)
                })
                .collect();
            req_units.push(units);
        }

        Ok(Plan {
            model,
            reqs,
            config: config.resolved(model),
            cap,
            start,
            is_end,
            dist_to_end,
            dist_from_start,
            req_pos,
            zone_of,
            is_entry,
            unit_of,
            req_units,
        })
    }

    pub fn len(&self) -> usize {
        self.req_pos.len()
    }

    /// Requirement-independent scan of every pair `walk` tours.
    pub fn toured_pairs(&self, walk: &[usize]) -> BTreeSet<CoveredPair> {
        let mut out = BTreeSet::new();
        for (i, &v) in walk.iter().enumerate() {
            let (Some(z), true) = (self.zone_of[v], self.is_entry[v]) else {
                continue;
            };
            let scope = &self.reqs.zones[z];
            if !scope.has_exits {
                out.insert(CoveredPair {
                    zone_id: scope.zone_id,
                    entry: self.model.id(v).clone(),
                    exit: None,
                });
                continue;
            }
            let mut j = i + 1;
            while j < walk.len() && self.zone_of[walk[j]] == Some(z) {
                j += 1;
            }
            if let Some(&x) = walk.get(j) {
                out.insert(CoveredPair {
                    zone_id: scope.zone_id,
                    entry: self.model.id(v).clone(),
                    exit: Some(self.model.id(x).clone()),
                });
            }
        }
        out
    }

    /// True for members of zones with exits, where a walk that stops has not finished its tour.
    pub fn mid_tour(&self, v: usize) -> bool {
        self.zone_of[v].is_some_and(|z| self.reqs.zones[z].has_exits)
    }

    /// Coverage units touched by `walk`.
    pub fn units(&self, walk: &[usize]) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for pair in self.toured_pairs(walk) {
            match self.reqs.criterion {
                CoverageCriterion::AllCombinationsOfBorderNodes => out.extend(self.unit_of.get(&pair)),
                CoverageCriterion::EachBorderNodeOnce => {
                    for b in std::iter::once(&pair.entry).chain(pair.exit.as_ref()) {
                        out.extend(self.unit_of.get(&border_key(pair.zone_id, b)));
                    }
                }
            }
        }
        out
    }

    /// Requirements all of whose units are in `done`.
    pub fn settled(&self, done: &BTreeSet<usize>) -> Vec<usize> {
        (0..self.req_units.len())
            .filter(|&r| self.req_units[r].iter().all(|u| done.contains(u)))
            .collect()
    }

    /// Requirements settled by `walk` on top of the units in `committed`.
    pub fn settled_with(&self, committed: &BTreeSet<usize>, walk: &[usize]) -> Vec<usize> {
        let mut done = self.units(walk);
        done.extend(committed.iter().copied());
        self.settled(&done)
    }

    /// Appends the shortest path from the walk's last node to the nearest end.
    pub fn close(&self, walk: &mut Vec<usize>) {
        let last = *walk.last().expect("walk is never empty");
        let tail = paths::shortest_walk(self.model, last, |v| self.is_end[v], |_| true)
            .expect("every node reaches an end in a validated model");
        walk.extend_from_slice(&tail[1..]);
    }

    pub fn connector(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        paths::connector(self.model, from, to)
    }

    /// Drops redundant cases, numbers the rest and computes their toured pairs.
    pub fn finish(&self, walks: Vec<Vec<usize>>, generator: Algorithm, incomplete: bool) -> TestSuite {
        let walks = self.prune(walks);
        let cases = walks
            .iter()
            .enumerate()
            .map(|(i, w)| TestCase {
                case_id: format!("TC{}", i + 1),
                steps: w.iter().map(|&v| self.model.id(v).clone()).collect(),
                covered_pairs: self.toured_pairs(w).into_iter().collect(),
            })
            .collect();
        TestSuite::assemble(cases, generator, self.config.clone(), incomplete)
    }

    fn prune(&self, walks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let covers: Vec<BTreeSet<usize>> = walks.iter().map(|w| self.units(w)).collect();
        let mut keep = vec![true; walks.len()];
        let mut order: Vec<usize> = (0..walks.len()).collect();
        order.sort_by(|&a, &b| walks[b].len().cmp(&walks[a].len()).then(b.cmp(&a)));
        for c in order {
            let redundant = covers[c].iter().all(|u| {
                (0..walks.len()).any(|o| o != c && keep[o] && covers[o].contains(u))
            });
            if redundant {
                keep[c] = false;
            }
        }
        walks.into_iter().zip(keep).filter_map(|(w, k)| k.then_some(w)).collect()
    }
}
