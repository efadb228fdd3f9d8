//! Boundary strata of M̄_{g,n} up to isomorphism, ordered by degeneration.
//!
//! Strata are generated layer by layer: every graph with k + 1 edges is a
//! vertex expansion of some graph with k edges (undo any one contraction), so
//! expanding each layer and deduplicating by canonical code is complete.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::canon::CanonicalCode;
use crate::graph::{EdgeId, StableGraph};
use crate::json::{GraphJson, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("M̄_{{{g},{n}}} is empty: 2g - 2 + n must be positive")]
    UnstableAmbient { g: u32, n: usize },
    #[error("max codimension {max_codim} exceeds dim M̄_{{{g},{n}}} = {dim}")]
    CodimTooLarge {
        g: u32,
        n: usize,
        max_codim: usize,
        dim: usize,
    },
    #[error("graphs live in different ambient spaces: M̄_{{{0},{1}}} vs M̄_{{{2},{3}}}")]
    AmbientMismatch(u32, usize, u32, usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// All one-edge degenerations of `graph`, with repetitions.
pub fn expansions(graph: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let genus = graph.ambient_genus();
    let nv = graph.num_vertices();
    for v in 0..nv {
        let gv = graph.vertex_genus(v);
        if gv >= 1 {
            let mut genera = graph.genera().to_vec();
            genera[v] -= 1;
            let mut edges = graph.edges().to_vec();
            edges.push((v, v));
            out.push(StableGraph::from_valid(genus, genera, edges, graph.legs().to_vec()));
        }

        // items at v: marks, then half-edges (edge index, which endpoint)
        let marks = graph.marks_at(v);
        let mut half_edges = Vec::new();
        for (i, &(a, b)) in graph.edges().iter().enumerate() {
            if a == v {
                half_edges.push((i, 0));
            }
            if b == v {
                half_edges.push((i, 1));
            }
        }
        let items = marks.len() + half_edges.len();
        for mask in 0u64..(1u64 << items) {
            let moved = mask.count_ones() as i64;
            let kept = items as i64 - moved;
            for h in 0..=gv {
                // v keeps genus h and the unmoved items; the new vertex gets the rest
                if 2 * h as i64 - 1 + kept <= 0 || 2 * (gv - h) as i64 - 1 + moved <= 0 {
                    continue;
                }
                let new_vertex = nv;
                let mut genera = graph.genera().to_vec();
                genera[v] = h;
                genera.push(gv - h);
                let mut legs = graph.legs().to_vec();
                for (bit, &m) in marks.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        legs[m as usize - 1] = new_vertex;
                    }
                }
                let mut edges = graph.edges().to_vec();
                for (bit, &(e, end)) in half_edges.iter().enumerate() {
                    if mask >> (marks.len() + bit) & 1 == 1 {
                        if end == 0 {
                            edges[e].0 = new_vertex;
                        } else {
                            edges[e].1 = new_vertex;
                        }
                    }
                }
                edges.push((v, new_vertex));
                out.push(StableGraph::from_valid(genus, genera, edges, legs));
            }
        }
    }
    out
}

/// Distinct canonical one-edge contractions of `graph`.
pub fn contractions(graph: &StableGraph) -> Vec<StableGraph> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in 0..graph.num_edges() {
        let c = graph.contract_edge(EdgeId(e)).expect("edge exists").canonical();
        if seen.insert(c.canonical_code()) {
            out.push(c);
        }
    }
    out
}

fn check_ambient(g: u32, n: usize) -> Result<(), PosetError> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        Err(PosetError::UnstableAmbient { g, n })
    } else {
        Ok(())
    }
}

fn same_ambient(a: &StableGraph, b: &StableGraph) -> Result<(), PosetError> {
    if a.ambient_genus() != b.ambient_genus() || a.num_marks() != b.num_marks() {
        return Err(PosetError::AmbientMismatch(
            a.ambient_genus(),
            a.num_marks(),
            b.ambient_genus(),
            b.num_marks(),
        ));
    }
    Ok(())
}

/// Whether Δ_small ⊆ Δ_big, i.e. `big` arises from `small` by edge contractions.
pub fn contains(big: &StableGraph, small: &StableGraph) -> Result<bool, PosetError> {
    same_ambient(big, small)?;
    if small.num_edges() < big.num_edges() {
        return Ok(false);
    }
    let target = big.canonical_code();
    let mut frontier: HashMap<CanonicalCode, StableGraph> = HashMap::new();
    let s = small.canonical();
    frontier.insert(s.canonical_code(), s);
    for _ in big.num_edges()..small.num_edges() {
        let mut next = HashMap::new();
        for g in frontier.values() {
            for c in contractions(g) {
                next.entry(c.canonical_code()).or_insert(c);
            }
        }
        frontier = next;
    }
    Ok(frontier.contains_key(&target))
}

/// Iso-classes of codimension-k degenerations of `graph`.
pub fn degenerations(graph: &StableGraph, k: usize, compact_type_only: bool) -> Vec<StableGraph> {
    let mut layer = vec![graph.canonical()];
    for _ in 0..k {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &layer {
            for e in expansions(g) {
                if compact_type_only && !e.is_compact_type() {
                    continue;
                }
                let c = e.canonical();
                if seen.insert(c.canonical_code()) {
                    next.push(c);
                }
            }
        }
        layer = next;
    }
    layer.sort_by_cached_key(|g| g.canonical_code());
    layer
}

/// Boundary strata of M̄_{g,n} with at most `max_codim` edges.
#[derive(Debug, Clone)]
pub struct StrataPoset {
    genus: u32,
    marks: usize,
    max_codim: usize,
    nodes: Vec<StableGraph>,
    codes: HashMap<CanonicalCode, usize>,
    layer_start: Vec<usize>,
    /// contracted[i]: strata obtained from node i by one contraction
    contracted: Vec<Vec<usize>>,
    /// expanded[i]: strata that contract to node i in one step
    expanded: Vec<Vec<usize>>,
}

impl StrataPoset {
    pub fn enumerate(g: u32, n: usize, max_codim: usize) -> Result<Self, PosetError> {
        Self::enumerate_with_budget(g, n, max_codim, &Budget::unlimited())
    }

    pub fn enumerate_full(g: u32, n: usize, budget: &Budget) -> Result<Self, PosetError> {
        check_ambient(g, n)?;
        Self::enumerate_with_budget(g, n, (3 * g as usize + n) - 3, budget)
    }

    pub fn enumerate_with_budget(
        g: u32,
        n: usize,
        max_codim: usize,
        budget: &Budget,
    ) -> Result<Self, PosetError> {
        check_ambient(g, n)?;
        let dim = 3 * g as usize + n - 3;
        if max_codim > dim {
            return Err(PosetError::CodimTooLarge {
                g,
                n,
                max_codim,
                dim,
            });
        }
        let smooth = StableGraph::smooth(g, n).expect("ambient is stable");
        let mut nodes = vec![smooth.canonical()];
        let mut codes = HashMap::from([(nodes[0].canonical_code(), 0)]);
        let mut layer_start = vec![0, 1];
        for _ in 0..max_codim {
            let layer = &nodes[layer_start[layer_start.len() - 2]..];
            let produced: Vec<Vec<(CanonicalCode, StableGraph)>> = layer
                .par_iter()
                .map(|graph| {
                    let cands = expansions(graph);
                    budget.charge(cands.len() as u64)?;
                    Ok(cands
                        .into_iter()
                        .map(|c| {
                            let c = c.canonical();
                            (c.canonical_code(), c)
                        })
                        .collect())
                })
                .collect::<Result<_, BudgetExceeded>>()?;
            let mut fresh: HashMap<CanonicalCode, StableGraph> = HashMap::new();
            for (code, graph) in produced.into_iter().flatten() {
                fresh.entry(code).or_insert(graph);
            }
            let mut fresh: Vec<(CanonicalCode, StableGraph)> = fresh.into_iter().collect();
            fresh.sort_by(|a, b| a.0.cmp(&b.0));
            for (code, graph) in fresh {
                codes.insert(code, nodes.len());
                nodes.push(graph);
            }
            layer_start.push(nodes.len());
        }

        let contracted: Vec<Vec<usize>> = nodes
            .par_iter()
            .map(|graph| {
                let mut up: Vec<usize> = contractions(graph)
                    .iter()
                    .map(|c| codes[&c.canonical_code()])
                    .collect();
                up.sort_unstable();
                up
            })
            .collect();
        let mut expanded = vec![Vec::new(); nodes.len()];
        for (i, ups) in contracted.iter().enumerate() {
            for &j in ups {
                expanded[j].push(i);
            }
        }
        layer_start.pop();
        Ok(Self {
            genus: g,
            marks: n,
            max_codim,
            nodes,
            codes,
            layer_start,
            contracted,
            expanded,
        })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_marks(&self) -> usize {
        self.marks
    }

    pub fn max_codim(&self) -> usize {
        self.max_codim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[StableGraph] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &StableGraph {
        &self.nodes[id]
    }

    /// Node ids of the strata of codimension `codim`.
    pub fn layer(&self, codim: usize) -> std::ops::Range<usize> {
        let start = self.layer_start[codim];
        let end = self
            .layer_start
            .get(codim + 1)
            .copied()
            .unwrap_or(self.nodes.len());
        start..end
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        (0..=self.max_codim).map(|k| self.layer(k).len()).collect()
    }

    pub fn id_of(&self, graph: &StableGraph) -> Option<usize> {
        self.codes.get(&graph.canonical_code()).copied()
    }

    pub fn id_of_code(&self, code: &CanonicalCode) -> Option<usize> {
        self.codes.get(code).copied()
    }

    /// Strata one contraction above node `id`.
    pub fn contracted(&self, id: usize) -> &[usize] {
        &self.contracted[id]
    }

    /// Strata one expansion below node `id`.
    pub fn expanded(&self, id: usize) -> &[usize] {
        &self.expanded[id]
    }

    /// down[i] = every node contained in node i (including i).
    pub fn down_sets(&self) -> Vec<FixedBitSet> {
        let mut down: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(self.len()); self.len()];
        for i in (0..self.len()).rev() {
            let mut set = FixedBitSet::with_capacity(self.len());
            set.insert(i);
            for &j in &self.expanded[i] {
                set.union_with(&down[j]);
            }
            down[i] = set;
        }
        down
    }

    /// Containment via reachability along expansions.
    pub fn reaches(&self, big: usize, small: usize) -> bool {
        let mut stack = vec![big];
        let mut seen = HashSet::from([big]);
        while let Some(i) = stack.pop() {
            if i == small {
                return true;
            }
            for &j in &self.expanded[i] {
                if seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        false
    }

    pub fn to_json(&self) -> PosetJson {
        PosetJson {
            schema_version: SCHEMA_VERSION,
            g: self.genus,
            n: self.marks,
            max_codim: self.max_codim,
            layers: self.layer_sizes(),
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, graph)| PosetNode {
                    id,
                    codim: graph.codim(),
                    hash: graph.canonical_hash(),
                    graph: graph.to_json(),
                })
                .collect(),
            contractions: self
                .contracted
                .iter()
                .enumerate()
                .flat_map(|(i, ups)| ups.iter().map(move |&j| [i, j]))
                .collect(),
        }
    }

    /// Graphviz rendering; arrows point from a stratum to the strata it lies in.
    pub fn to_dot(&self) -> String {
        let mut out = format!(
            "digraph strata_g{}_n{} {{\n  rankdir=BT;\n",
            self.genus, self.marks
        );
        for (id, graph) in self.nodes.iter().enumerate() {
            out.push_str(&format!(
                "  n{id} [label=\"{} codim {}\"];\n",
                &graph.canonical_hash()[..12],
                graph.codim()
            ));
        }
        for (i, ups) in self.contracted.iter().enumerate() {
            for j in ups {
                out.push_str(&format!("  n{i} -> n{j};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetNode {
    pub id: usize,
    pub codim: usize,
    pub hash: String,
    pub graph: GraphJson,
}

/// JSON export of a poset: nodes plus `[degenerate, contracted]` cover pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub schema_version: u32,
    pub g: u32,
    pub n: usize,
    pub max_codim: usize,
    pub layers: Vec<usize>,
    pub nodes: Vec<PosetNode>,
    pub contractions: Vec<[usize; 2]>,
}
