//! Common preimages of forgetful images over the full poset of strata.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::graph::{Mark, StableGraph};
use crate::json::GraphJson;
use crate::morphism::forget;
use crate::poset::{PosetError, StrataPoset};

/// A fully enumerated poset with its down-sets.
pub(crate) struct CachedPoset {
    pub poset: StrataPoset,
    pub down: Vec<FixedBitSet>,
}

/// Posets and forgetful tables shared across certificate computations.
pub(crate) struct PosetCache {
    limit: u64,
    posets: Mutex<HashMap<(u32, usize), Arc<CachedPoset>>>,
    /// (g, n) -> table[node][mark - 1] = image node id in the (g, n - 1) poset
    forget_tables: Mutex<HashMap<(u32, usize), Arc<Vec<Vec<usize>>>>>,
}

impl PosetCache {
    pub fn new(limit: u64) -> Self {
        Self {
            limit,
            posets: Mutex::new(HashMap::new()),
            forget_tables: Mutex::new(HashMap::new()),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn poset(&self, g: u32, n: usize) -> Result<Arc<CachedPoset>, PosetError> {
        if let Some(p) = self.posets.lock().unwrap().get(&(g, n)) {
            return Ok(p.clone());
        }
        let poset = StrataPoset::enumerate_full(g, n, &Budget::new(self.limit))?;
        let down = poset.down_sets();
        let entry = Arc::new(CachedPoset { poset, down });
        Ok(self
            .posets
            .lock()
            .unwrap()
            .entry((g, n))
            .or_insert(entry)
            .clone())
    }

    pub fn forget_table(&self, g: u32, n: usize) -> Result<Arc<Vec<Vec<usize>>>, PosetError> {
        if let Some(t) = self.forget_tables.lock().unwrap().get(&(g, n)) {
            return Ok(t.clone());
        }
        let source = self.poset(g, n)?;
        let target = self.poset(g, n - 1)?;
        let budget = Budget::new(self.limit);
        budget.charge((source.poset.len() * n) as u64)?;
        let table: Vec<Vec<usize>> = source
            .poset
            .nodes()
            .par_iter()
            .map(|graph| {
                (1..=n as Mark)
                    .map(|i| {
                        let image = forget(graph, i).expect("target is stable").image_graph;
                        target.poset.id_of(&image).expect("full poset holds every stratum")
                    })
                    .collect()
            })
            .collect();
        let table = Arc::new(table);
        Ok(self
            .forget_tables
            .lock()
            .unwrap()
            .entry((g, n))
            .or_insert(table)
            .clone())
    }
}

/// Result of comparing ⋂ π_i⁻¹(π_i(Δ)) with the stratum it should equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IntersectionOutcome {
    Ok { strata_checked: usize },
    /// A maximal stratum of the intersection other than the expected one.
    Counterexample { maximal: Vec<GraphJson> },
    Unverified { reason: String },
}

impl IntersectionOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, IntersectionOutcome::Ok { .. })
    }
}

pub(crate) const UNVERIFIED: &str = "asserted, unverified at this size: enumeration budget exceeded";

/// Maximal strata Δ' of M̄_{g,n} with π_i(Δ') ⊆ π_i(Δ_graph) for every `i` in `marks`.
pub(crate) fn common_preimage_maxima(
    cache: &PosetCache,
    graph: &StableGraph,
    marks: &[Mark],
) -> Result<(Vec<usize>, Arc<CachedPoset>), PosetError> {
    let (g, n) = (graph.ambient_genus(), graph.num_marks());
    let source = cache.poset(g, n)?;
    let target = cache.poset(g, n - 1)?;
    let table = cache.forget_table(g, n)?;
    let size = source.poset.len();
    let mut common = FixedBitSet::with_capacity(size);
    common.insert_range(..);
    for &i in marks {
        let image = forget(graph, i).expect("target is stable").image_graph;
        let q = target.poset.id_of(&image).expect("full poset holds every stratum");
        let below = &target.down[q];
        let mut pre = FixedBitSet::with_capacity(size);
        for (x, row) in table.iter().enumerate() {
            if below.contains(row[i as usize - 1]) {
                pre.insert(x);
            }
        }
        common.intersect_with(&pre);
    }
    let maxima = common
        .ones()
        .filter(|&x| !source.poset.contracted(x).iter().any(|&y| common.contains(y)))
        .collect();
    Ok((maxima, source))
}

pub(crate) fn intersection_outcome(
    cache: &PosetCache,
    graph: &StableGraph,
    marks: &[Mark],
    expected: &StableGraph,
) -> IntersectionOutcome {
    match common_preimage_maxima(cache, graph, marks) {
        Err(_) => IntersectionOutcome::Unverified {
            reason: UNVERIFIED.to_string(),
        },
        Ok((maxima, source)) => {
            let want = source.poset.id_of(expected);
            if maxima.len() == 1 && Some(maxima[0]) == want {
                IntersectionOutcome::Ok {
                    strata_checked: source.poset.len(),
                }
            } else {
                IntersectionOutcome::Counterexample {
                    maximal: maxima
                        .iter()
                        .map(|&x| source.poset.node(x).canonical_json())
                        .collect(),
                }
            }
        }
    }
}
