//! Graph-level models of forgetful maps π_i, Hassett reductions r_A and the
//! pseudostable contraction ε, together with the index e_f(Δ) = dim Δ − dim f(Δ).

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Mark, StableGraph};
use crate::json::{GraphJson, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("mark {mark} does not exist in M̄_{{{g},{n}}}")]
    NoSuchMark { mark: Mark, g: u32, n: usize },
    #[error("target M̄_{{{g},{n}}} is not stable")]
    TargetUnstable { g: u32, n: usize },
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("the pseudostable contraction needs at least one mark and positive genus")]
    PseudostableDomain,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weight {index} = {value} is outside (0, 1]")]
    OutOfRange { index: usize, value: String },
    #[error("weight {index}: cannot parse {text:?} as an exact rational")]
    Parse { index: usize, text: String },
    #[error("expected {expected} weights, found {found}")]
    Count { expected: usize, found: usize },
    #[error("2g - 2 + sum of weights = {0} is not positive")]
    Empty(String),
    #[error("malformed weight JSON: {0}")]
    Json(String),
}

/// Hassett weight data A = (a_1, ..., a_n) with each a_i ∈ (0, 1] ∩ Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightData {
    weights: Vec<Rational64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub weights: Vec<String>,
}

impl WeightData {
    pub fn new(weights: Vec<Rational64>) -> Result<Self, WeightError> {
        let zero = Rational64::from_integer(0);
        let one = Rational64::from_integer(1);
        for (index, w) in weights.iter().enumerate() {
            if *w <= zero || *w > one {
                return Err(WeightError::OutOfRange {
                    index,
                    value: w.to_string(),
                });
            }
        }
        Ok(Self { weights })
    }

    /// Parses strings such as `"1"` or `"1/3"`.
    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self, WeightError> {
        let weights = items
            .iter()
            .enumerate()
            .map(|(index, s)| {
                Rational64::from_str(s.as_ref().trim()).map_err(|_| WeightError::Parse {
                    index,
                    text: s.as_ref().to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(weights)
    }

    pub fn parse_json(text: &str) -> Result<Self, WeightError> {
        let raw: WeightJson =
            serde_json::from_str(text).map_err(|e| WeightError::Json(e.to_string()))?;
        Self::from_strings(&raw.weights)
    }

    pub fn to_json(&self) -> WeightJson {
        WeightJson {
            schema_version: Some(SCHEMA_VERSION),
            weights: self.weights.iter().map(Rational64::to_string).collect(),
        }
    }

    pub fn all_ones(n: usize) -> Self {
        Self {
            weights: vec![Rational64::from_integer(1); n],
        }
    }

    /// 1 off `tail`, 1/|tail| on it: the reduction whose exceptional locus is Δ_{0;tail}.
    pub fn light_tail(n: usize, tail: &BTreeSet<Mark>) -> Self {
        let light = Rational64::new(1, tail.len().max(1) as i64);
        Self {
            weights: (1..=n as Mark)
                .map(|m| {
                    if tail.contains(&m) {
                        light
                    } else {
                        Rational64::from_integer(1)
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, mark: Mark) -> Rational64 {
        self.weights[mark as usize - 1]
    }

    pub fn weights(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn total(&self) -> Rational64 {
        self.weights.iter().sum()
    }

    /// Checks that M̄_{g,A} is non-empty and that A has one weight per mark.
    pub fn check_ambient(&self, g: u32, n: usize) -> Result<(), WeightError> {
        if self.weights.len() != n {
            return Err(WeightError::Count {
                expected: n,
                found: self.weights.len(),
            });
        }
        let slope = Rational64::from_integer(2 * g as i64 - 2) + self.total();
        if slope <= Rational64::from_integer(0) {
            return Err(WeightError::Empty(slope.to_string()));
        }
        Ok(())
    }
}

/// The three morphisms out of M̄_{g,n} that certificates use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismDescriptor {
    Forgetful(Mark),
    HassettReduction(WeightData),
    PseudostableContraction,
}

/// Morphism-specific bookkeeping attached to an image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageDetail {
    /// Old mark label to new mark label.
    Forgetful { relabel: BTreeMap<Mark, Mark> },
    /// Groups of marks that collide at one point of the image.
    Hassett { collisions: Vec<Vec<Mark>> },
    /// Image vertices that carry one cusp per listed occurrence.
    Pseudostable { cusps: Vec<usize> },
}

/// Image of the general point of a stratum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageResult {
    pub image_graph: StableGraph,
    pub image_dim: u32,
    pub index: u32,
    pub in_exceptional_locus: bool,
    pub detail: ImageDetail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageJson {
    pub schema_version: u32,
    pub image_graph: GraphJson,
    pub image_dim: u32,
    pub index: u32,
    pub in_exceptional_locus: bool,
    pub detail: ImageDetail,
}

impl ImageResult {
    pub fn to_json(&self) -> ImageJson {
        ImageJson {
            schema_version: SCHEMA_VERSION,
            image_graph: self.image_graph.to_json(),
            image_dim: self.image_dim,
            index: self.index,
            in_exceptional_locus: self.in_exceptional_locus,
            detail: self.detail.clone(),
        }
    }

    pub fn survives(&self) -> bool {
        self.index == 0
    }
}

fn image(source: &StableGraph, image_graph: StableGraph, image_dim: u32, exceptional: Option<bool>, detail: ImageDetail) -> ImageResult {
    let index = source.dim_stratum() - image_dim;
    ImageResult {
        image_graph,
        image_dim,
        index,
        in_exceptional_locus: exceptional.unwrap_or(index > 0),
        detail,
    }
}

/// Removes vertex `dead` from raw parts, shifting later vertex ids down.
fn drop_vertex(genera: &mut Vec<u32>, edges: &mut [(usize, usize)], legs: &mut [usize], dead: usize) {
    genera.remove(dead);
    let shift = |v: &mut usize| {
        if *v > dead {
            *v -= 1;
        }
    };
    for (a, b) in edges.iter_mut() {
        shift(a);
        shift(b);
    }
    for v in legs.iter_mut() {
        shift(v);
    }
}

/// π_i: forget mark `mark`, stabilize, and relabel later marks down by one.
///
/// The stratum class survives pushforward exactly when the index is 0, which
/// happens iff the leg sat on a trivalent rational vertex.
pub fn forget(graph: &StableGraph, mark: Mark) -> Result<ImageResult, MorphismError> {
    let (g, n) = (graph.ambient_genus(), graph.num_marks());
    if mark == 0 || mark as usize > n {
        return Err(MorphismError::NoSuchMark { mark, g, n });
    }
    if 2 * g as i64 - 2 + (n as i64 - 1) <= 0 {
        return Err(MorphismError::TargetUnstable { g, n: n - 1 });
    }
    let v = graph.leg_vertex(mark);
    let mut genera = graph.genera().to_vec();
    let mut edges = graph.edges().to_vec();
    let mut legs: Vec<usize> = graph.legs().to_vec();
    legs.remove(mark as usize - 1);

    if graph.vertex_genus(v) == 0 && graph.valence(v) == 3 {
        let incident: Vec<usize> = (0..edges.len())
            .filter(|&e| edges[e].0 == v || edges[e].1 == v)
            .collect();
        match incident.as_slice() {
            // two edges through v: splice them into one
            [e1, e2] => {
                let other = |e: usize| if edges[e].0 == v { edges[e].1 } else { edges[e].0 };
                let (a, b) = (other(*e1), other(*e2));
                edges.remove(*e2);
                edges.remove(*e1);
                edges.push((a, b));
            }
            // leaf with one remaining leg: the leg moves to the neighbour
            [e] => {
                let u = if edges[*e].0 == v { edges[*e].1 } else { edges[*e].0 };
                for w in legs.iter_mut() {
                    if *w == v {
                        *w = u;
                    }
                }
                edges.remove(*e);
            }
            _ => unreachable!("target stability rules out isolated rational vertices"),
        }
        drop_vertex(&mut genera, &mut edges, &mut legs, v);
    }

    let relabel = (1..=n as Mark)
        .filter(|&m| m != mark)
        .map(|m| (m, if m > mark { m - 1 } else { m }))
        .collect();
    let image_graph = StableGraph::from_valid(g, genera, edges, legs);
    let image_dim = image_graph.dim_stratum();
    Ok(image(graph, image_graph, image_dim, None, ImageDetail::Forgetful { relabel }))
}

/// Contraction order for Hassett reduction; the result does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ContractionOrder {
    LowestFirst,
    #[cfg_attr(not(test), allow(dead_code))]
    HighestFirst,
}

/// r_A: contract A-unstable rational vertices until none remain.
pub fn hassett_reduce(graph: &StableGraph, weights: &WeightData) -> Result<ImageResult, MorphismError> {
    hassett_reduce_ordered(graph, weights, ContractionOrder::LowestFirst)
}

pub(crate) fn hassett_reduce_ordered(
    graph: &StableGraph,
    weights: &WeightData,
    order: ContractionOrder,
) -> Result<ImageResult, MorphismError> {
    let (g, n) = (graph.ambient_genus(), graph.num_marks());
    weights.check_ambient(g, n)?;

    let nv = graph.num_vertices();
    let mut alive = vec![true; nv];
    let mut edges: Vec<Option<(usize, usize)>> = graph.edges().iter().copied().map(Some).collect();
    let mut legs = graph.legs().to_vec();
    // collision groups sitting at each vertex; single marks are groups of one
    let mut points: Vec<Vec<Vec<Mark>>> = (0..nv)
        .map(|v| graph.marks_at(v).into_iter().map(|m| vec![m]).collect())
        .collect();

    let edge_ends = |edges: &[Option<(usize, usize)>], v: usize| -> usize {
        edges
            .iter()
            .flatten()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    };
    let unstable = |edges: &[Option<(usize, usize)>], points: &[Vec<Vec<Mark>>], v: usize| -> bool {
        if graph.vertex_genus(v) != 0 {
            return false;
        }
        let weight: Rational64 = points[v].iter().flatten().map(|&m| weights.weight(m)).sum();
        Rational64::from_integer(edge_ends(edges, v) as i64 - 2) + weight <= Rational64::from_integer(0)
    };

    let mut contracted_any = false;
    loop {
        let mut candidates = (0..nv).filter(|&v| alive[v] && unstable(&edges, &points, v));
        let pick = match order {
            ContractionOrder::LowestFirst => candidates.next(),
            ContractionOrder::HighestFirst => candidates.next_back(),
        };
        let Some(v) = pick else { break };
        let e = edges
            .iter()
            .position(|e| matches!(e, Some((a, b)) if (*a == v) != (*b == v)))
            .expect("an A-unstable vertex is a leaf of the remaining tree");
        let (a, b) = edges[e].expect("live edge");
        let u = if a == v { b } else { a };
        let group: Vec<Mark> = {
            let mut all: Vec<Mark> = points[v].drain(..).flatten().collect();
            all.sort_unstable();
            all
        };
        for &m in &group {
            legs[m as usize - 1] = u;
        }
        points[u].push(group);
        edges[e] = None;
        alive[v] = false;
        contracted_any = true;
    }

    // image dimension: each collision group is a single special point
    let image_dim: i64 = (0..nv)
        .filter(|&v| alive[v])
        .map(|v| 3 * graph.vertex_genus(v) as i64 - 3 + edge_ends(&edges, v) as i64 + points[v].len() as i64)
        .sum();

    let mut collisions: Vec<Vec<Mark>> = points
        .iter()
        .flatten()
        .filter(|grp| grp.len() > 1)
        .cloned()
        .collect();
    collisions.sort();
    let exceptional = collisions.iter().any(|grp| grp.len() >= 3);
    debug_assert!(contracted_any || collisions.is_empty());

    let survivors: Vec<usize> = (0..nv).filter(|&v| alive[v]).collect();
    let mut new_id = vec![usize::MAX; nv];
    for (i, &v) in survivors.iter().enumerate() {
        new_id[v] = i;
    }
    let image_graph = StableGraph::from_valid(
        g,
        survivors.iter().map(|&v| graph.vertex_genus(v)).collect(),
        edges.iter().flatten().map(|&(a, b)| (new_id[a], new_id[b])).collect(),
        legs.iter().map(|&v| new_id[v]).collect(),
    );
    Ok(image(
        graph,
        image_graph,
        image_dim as u32,
        Some(exceptional),
        ImageDetail::Hassett { collisions },
    ))
}

/// ε: replace every unmarked elliptic tail by a cusp on its neighbour.
///
/// The image graph records the cusp by merging the tail into its neighbour,
/// which keeps the arithmetic genus; the image dimension counts the cusp as one
/// special point on a component of the neighbour's geometric genus.
pub fn pseudostable_contract(graph: &StableGraph) -> Result<ImageResult, MorphismError> {
    if graph.num_marks() == 0 || graph.ambient_genus() == 0 {
        return Err(MorphismError::PseudostableDomain);
    }
    let elliptic_tails: Vec<usize> = (0..graph.num_vertices())
        .filter(|&v| {
            graph.vertex_genus(v) == 1
                && graph.edge_ends(v) == 1
                && graph.self_edges(v) == 0
                && graph.num_marks_at(v) == 0
        })
        .collect();

    let mut current = graph.clone();
    // track original vertex ids through the contractions
    let mut origin: Vec<usize> = (0..graph.num_vertices()).collect();
    let mut cusp_at: Vec<usize> = Vec::new();
    for &tail in &elliptic_tails {
        let v = origin.iter().position(|&o| o == tail).expect("tail still present");
        let e = current
            .edges()
            .iter()
            .position(|&(a, b)| a == v || b == v)
            .expect("elliptic tail has its node");
        let (a, b) = current.edges()[e];
        let (keep, gone) = (a.min(b), a.max(b));
        let neighbour_origin = if origin[keep] == tail { origin[gone] } else { origin[keep] };
        current = current.contract_edge(EdgeId(e)).expect("edge exists");
        origin[keep] = neighbour_origin;
        origin.remove(gone);
        cusp_at.push(neighbour_origin);
    }

    let cusps: Vec<usize> = cusp_at
        .iter()
        .map(|o| origin.iter().position(|x| x == o).expect("neighbour survives"))
        .collect();
    let mut cusp_count = vec![0i64; current.num_vertices()];
    for &c in &cusps {
        cusp_count[c] += 1;
    }
    let image_dim: i64 = (0..current.num_vertices())
        .map(|v| {
            let geometric = current.vertex_genus(v) as i64 - cusp_count[v];
            3 * geometric - 3 + current.valence(v) as i64 + cusp_count[v]
        })
        .sum();
    let mut cusps = cusps;
    cusps.sort_unstable();
    Ok(image(
        graph,
        current,
        image_dim as u32,
        None,
        ImageDetail::Pseudostable { cusps },
    ))
}

pub fn apply(graph: &StableGraph, f: &MorphismDescriptor) -> Result<ImageResult, MorphismError> {
    match f {
        MorphismDescriptor::Forgetful(mark) => forget(graph, *mark),
        MorphismDescriptor::HassettReduction(a) => hassett_reduce(graph, a),
        MorphismDescriptor::PseudostableContraction => pseudostable_contract(graph),
    }
}

/// e_f(Δ_Γ) for the morphism `f`.
pub fn index_of(graph: &StableGraph, f: &MorphismDescriptor) -> Result<u32, MorphismError> {
    apply(graph, f).map(|r| r.index)
}
