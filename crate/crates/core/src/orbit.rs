//! Breadth-first enumeration of mapping-class orbit balls.
//!
//! States are classes (paired with a homology matrix mod `m` when counting
//! over a congruence subgroup, in which case functional values are cached
//! per class). A state is expanded when its functional
//! value is at most `slack · L`; a member is a class reached with value at
//! most `L` (and, for a subgroup, with identity matrix). The search is then
//! resumed at `2 · slack · L`, and the ball is saturated when no level count
//! changes.

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::time::{Duration, Instant};

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{Class, Weight};
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::mcg::{self, MCGAutomorphism, ModMatrix, SubgroupSpec};
use crate::surface::RibbonSurface;

pub struct OrbitConfig<'a> {
    pub surface: &'a RibbonSurface,
    /// Closed under inverses.
    pub generators: &'a [MCGAutomorphism],
    pub subgroup: Option<&'a SubgroupSpec>,
    pub functional: &'a dyn Functional,
    pub levels: Vec<Weight>,
    pub slack: Weight,
    pub keep_members: bool,
    /// Thread count; 0 uses the global pool.
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub fingerprint: u128,
    pub value: Weight,
    #[serde(skip)]
    pub class: Option<Class>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitBall {
    pub seed: String,
    pub functional: String,
    pub modulus: Option<u32>,
    pub slack: Weight,
    pub levels: Vec<Weight>,
    pub counts_by_level: Vec<u64>,
    pub saturated: bool,
    pub explored_states: u64,
    /// Members sorted by fingerprint.
    #[serde(skip)]
    pub members: Vec<Member>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl OrbitBall {
    pub fn bound(&self) -> Weight {
        *self.levels.last().expect("nonempty grid")
    }

    pub fn count_at(&self, level: Weight) -> Option<u64> {
        self.levels.iter().position(|&l| l == level).map(|i| self.counts_by_level[i])
    }

    pub fn member_set(&self) -> HashSet<u128> {
        self.members.iter().map(|m| m.fingerprint).collect()
    }
}

struct State {
    class: Class,
    matrix: Option<ModMatrix>,
    value: Weight,
}

fn state_key(class_fp: u128, matrix: &Option<ModMatrix>) -> u128 {
    match matrix {
        None => class_fp,
        Some(m) => {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            m.hash(&mut h);
            class_fp ^ (h.finish() as u128).rotate_left(17)
        }
    }
}

struct Search<'a, 'c> {
    cfg: &'c OrbitConfig<'a>,
    identity: Option<ModMatrix>,
    gen_matrices: Vec<Option<ModMatrix>>,
    visited: HashSet<u128>,
    /// Reached but not expanded yet, with value at most the final limit.
    pending: Vec<State>,
    members: HashMap<u128, Member>,
    /// Functional values by class, shared between matrix labels.
    values: HashMap<u128, Weight>,
}

impl<'a, 'c> Search<'a, 'c> {
    fn new(cfg: &'c OrbitConfig<'a>) -> Result<Self> {
        let (identity, gen_matrices) = match cfg.subgroup {
            None => (None, vec![None; cfg.generators.len()]),
            Some(g) => {
                let mats = cfg
                    .generators
                    .iter()
                    .map(|x| {
                        g.matrix(x.label())
                            .cloned()
                            .map(Some)
                            .ok_or_else(|| Error::Config(format!("generator {} unknown to subgroup", x.label())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (Some(mcg::mat_identity(g.rank())), mats)
            }
        };
        Ok(Search {
            cfg,
            identity,
            gen_matrices,
            visited: HashSet::new(),
            pending: Vec::new(),
            members: HashMap::new(),
            values: HashMap::new(),
        })
    }

    fn value(&self, class: &Class) -> Result<Weight> {
        let v = self.cfg.functional.eval(self.cfg.surface, class)?;
        if !v.is_positive() {
            return Err(Error::NonPositiveFunctional(class.to_string()));
        }
        Ok(v)
    }

    fn record(&mut self, st: &State, bound: Weight) {
        if st.value <= bound && st.matrix == self.identity {
            let fp = st.class.fingerprint();
            let keep = self.cfg.keep_members;
            self.members.entry(fp).or_insert_with(|| Member {
                fingerprint: fp,
                value: st.value,
                class: keep.then(|| st.class.clone()),
            });
        }
    }

    /// Expands everything reachable through states with value `<= limit`.
    fn run(&mut self, limit: Weight, keep_limit: Weight, bound: Weight) -> Result<()> {
        let (mut frontier, rest): (Vec<State>, Vec<State>) =
            std::mem::take(&mut self.pending).into_iter().partition(|s| s.value <= limit);
        self.pending = rest;
        let surface = self.cfg.surface;
        let gens = self.cfg.generators;
        let modulus = self.cfg.subgroup.map(|g| g.modulus());
        while !frontier.is_empty() {
            let gen_matrices = &self.gen_matrices;
            let mut candidates: Vec<(u128, u128, Class, Option<ModMatrix>)> = frontier
                .par_iter()
                .flat_map_iter(|st| {
                    gens.iter().zip(gen_matrices).map(move |(g, gm)| {
                        let class = g.apply(surface, &st.class);
                        let matrix = match (gm, &st.matrix) {
                            (Some(gm), Some(m)) => Some(mcg::mat_mul(gm, m, modulus.expect("subgroup"))),
                            _ => None,
                        };
                        let fp = class.fingerprint();
                        (state_key(fp, &matrix), fp, class, matrix)
                    })
                })
                .collect();
            candidates.sort_unstable_by_key(|c| c.0);
            candidates.dedup_by_key(|c| c.0);
            candidates.retain(|c| !self.visited.contains(&c.0));
            self.visited.extend(candidates.iter().map(|c| c.0));

            let cache = &self.values;
            let states: Vec<(u128, State)> = candidates
                .into_par_iter()
                .map(|(_, fp, class, matrix)| {
                    let value = match cache.get(&fp) {
                        Some(&v) => v,
                        None => self.value(&class)?,
                    };
                    Ok((fp, State { class, matrix, value }))
                })
                .collect::<Result<_>>()?;
            if self.cfg.subgroup.is_some() {
                self.values.extend(states.iter().map(|(fp, st)| (*fp, st.value)));
            }
            let states = states.into_iter().map(|(_, st)| st);
            frontier = Vec::new();
            for st in states {
                self.record(&st, bound);
                if st.value <= limit {
                    frontier.push(st);
                } else if st.value <= keep_limit {
                    self.pending.push(st);
                }
            }
        }
        Ok(())
    }

    fn counts(&self, levels: &[Weight]) -> Vec<u64> {
        let mut values: Vec<Weight> = self.members.values().map(|m| m.value).collect();
        values.sort();
        levels
            .iter()
            .map(|l| values.partition_point(|v| v <= l) as u64)
            .collect()
    }
}

fn check_levels(levels: &[Weight]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::Config("empty level grid".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) || levels[0].is_negative() {
        return Err(Error::Config("level grid must be increasing and nonnegative".into()));
    }
    Ok(())
}

pub fn orbit_ball(seed: &Class, cfg: &OrbitConfig<'_>) -> Result<OrbitBall> {
    cfg.surface.require_countable()?;
    check_levels(&cfg.levels)?;
    if cfg.slack < Weight::from_integer(1) {
        return Err(Error::Config(format!("slack must be at least 1, got {}", cfg.slack)));
    }
    let body = || -> Result<OrbitBall> {
        let start = Instant::now();
        let bound = *cfg.levels.last().expect("checked");
        let limit = bound * cfg.slack;
        let final_limit = limit * Weight::from_integer(2);

        let mut search = Search::new(cfg)?;
        let seed_state = State {
            class: seed.clone(),
            matrix: search.identity.clone(),
            value: search.value(seed)?,
        };
        search.visited.insert(state_key(seed.fingerprint(), &seed_state.matrix));
        search.record(&seed_state, bound);
        // The seed is always expanded.
        let seed_limit = if seed_state.value > limit { seed_state.value } else { limit };
        search.pending.push(seed_state);
        search.run(seed_limit, final_limit, bound)?;
        let counts = search.counts(&cfg.levels);
        let mut members: Vec<Member> = search.members.values().cloned().collect();
        members.sort_by_key(|m| m.fingerprint);

        search.run(final_limit, final_limit, bound)?;
        let saturated = search.counts(&cfg.levels) == counts;

        Ok(OrbitBall {
            seed: seed.to_string(),
            functional: cfg.functional.spec().to_string(),
            modulus: cfg.subgroup.map(|g| g.modulus()),
            slack: cfg.slack,
            levels: cfg.levels.clone(),
            counts_by_level: counts,
            saturated,
            explored_states: search.visited.len() as u64,
            members,
            wall_time: start.elapsed(),
        })
    };
    if cfg.workers == 0 {
        body()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(body)
    }
}
