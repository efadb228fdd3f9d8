//! Dual graphs of boundary strata.
//!
//! A [`StableGraph`] is a connected multigraph whose vertices carry a genus and
//! whose legs are the marked points `1..=n`. Values of this type always satisfy
//! the stability invariants; unchecked data lives in [`crate::json::GraphJson`]
//! until it is validated.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::canon::{self, CanonicalCode};

/// A marked point label, `1..=n`.
pub type Mark = u32;

/// Index of an edge in [`StableGraph::edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// First violated invariant of a candidate dual graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("graph has no vertices")]
    Empty,
    #[error("edge {edge} references missing vertex {vertex}")]
    DanglingEdge { edge: usize, vertex: usize },
    #[error("mark {mark} is attached to missing vertex {vertex}")]
    DanglingLeg { mark: Mark, vertex: usize },
    #[error("leg labels must be exactly 1..={n}: {detail}")]
    LegLabels { n: usize, detail: String },
    #[error("connectivity: vertex {vertex} is unreachable from vertex 0")]
    Disconnected { vertex: usize },
    #[error("total genus: vertex genera plus first Betti number is {found}, ambient genus is {expected}")]
    GenusMismatch { expected: u32, found: i64 },
    #[error("stability at vertex {vertex}: 2*{genus} - 2 + {valence} <= 0")]
    Unstable { vertex: usize, genus: u32, valence: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} does not exist")]
    MissingEdge(usize),
}

/// Checks every dual-graph invariant on raw parts, reporting the first failure.
///
/// `legs[i]` is the vertex carrying mark `i + 1`.
pub fn check_invariants(
    genus: u32,
    genera: &[u32],
    edges: &[(usize, usize)],
    legs: &[usize],
) -> Result<(), Violation> {
    let nv = genera.len();
    if nv == 0 {
        return Err(Violation::Empty);
    }
    for (i, &(a, b)) in edges.iter().enumerate() {
        for v in [a, b] {
            if v >= nv {
                return Err(Violation::DanglingEdge { edge: i, vertex: v });
            }
        }
    }
    for (i, &v) in legs.iter().enumerate() {
        if v >= nv {
            return Err(Violation::DanglingLeg {
                mark: i as Mark + 1,
                vertex: v,
            });
        }
    }

    let mut adjacency = vec![Vec::new(); nv];
    for &(a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adjacency[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    if let Some(vertex) = seen.iter().position(|s| !s) {
        return Err(Violation::Disconnected { vertex });
    }

    let betti = edges.len() as i64 - nv as i64 + 1;
    let found = genera.iter().map(|&h| h as i64).sum::<i64>() + betti;
    if found != genus as i64 {
        return Err(Violation::GenusMismatch {
            expected: genus,
            found,
        });
    }

    let mut valence = vec![0usize; nv];
    for &(a, b) in edges {
        valence[a] += 1;
        valence[b] += 1;
    }
    for &v in legs {
        valence[v] += 1;
    }
    for v in 0..nv {
        if 2 * genera[v] as i64 - 2 + valence[v] as i64 <= 0 {
            return Err(Violation::Unstable {
                vertex: v,
                genus: genera[v],
                valence: valence[v],
            });
        }
    }
    Ok(())
}

/// Dual graph Γ of a boundary stratum Δ_Γ of M̄_{g,n}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StableGraph {
    genus: u32,
    genera: Vec<u32>,
    edges: Vec<(usize, usize)>,
    legs: Vec<usize>,
}

/// Combinatorial type of a dual graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub compact_type: bool,
    pub rational_tails: bool,
    /// The genus-g vertex of a rational tails graph with g > 0.
    pub anchor: Option<usize>,
    /// Marks on the subtree behind each anchor-incident edge, sorted.
    pub tails: Vec<BTreeSet<Mark>>,
}

impl StableGraph {
    /// Builds a graph from raw parts; `legs[i]` is the vertex carrying mark `i + 1`.
    pub fn new(
        genus: u32,
        genera: Vec<u32>,
        edges: Vec<(usize, usize)>,
        legs: Vec<usize>,
    ) -> Result<Self, Violation> {
        check_invariants(genus, &genera, &edges, &legs)?;
        Ok(Self::assemble(genus, genera, edges, legs))
    }

    /// Builds a graph from per-vertex `(genus, marks)` lists.
    pub fn from_parts(
        genus: u32,
        vertices: &[(u32, &[Mark])],
        edges: &[(usize, usize)],
    ) -> Result<Self, Violation> {
        let n: usize = vertices.iter().map(|(_, m)| m.len()).sum();
        let mut legs = vec![usize::MAX; n];
        for (v, (_, marks)) in vertices.iter().enumerate() {
            for &m in marks.iter() {
                if m == 0 || m as usize > n {
                    return Err(Violation::LegLabels {
                        n,
                        detail: format!("label {m} out of range"),
                    });
                }
                if legs[m as usize - 1] != usize::MAX {
                    return Err(Violation::LegLabels {
                        n,
                        detail: format!("label {m} used twice"),
                    });
                }
                legs[m as usize - 1] = v;
            }
        }
        let genera = vertices.iter().map(|(h, _)| *h).collect();
        Self::new(genus, genera, edges.to_vec(), legs)
    }

    /// Internal constructor for results that are valid by construction.
    pub(crate) fn from_valid(
        genus: u32,
        genera: Vec<u32>,
        edges: Vec<(usize, usize)>,
        legs: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(check_invariants(genus, &genera, &edges, &legs), Ok(()));
        Self::assemble(genus, genera, edges, legs)
    }

    fn assemble(
        genus: u32,
        genera: Vec<u32>,
        mut edges: Vec<(usize, usize)>,
        legs: Vec<usize>,
    ) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        Self {
            genus,
            genera,
            edges,
            legs,
        }
    }

    /// The open stratum: one vertex of genus g carrying every mark.
    pub fn smooth(genus: u32, n: usize) -> Result<Self, Violation> {
        Self::new(genus, vec![genus], Vec::new(), vec![0; n])
    }

    /// The boundary divisor Δ_{h;S}: genus h with marks S glued to genus g−h with the rest.
    pub fn divisor(genus: u32, n: usize, h: u32, side: &BTreeSet<Mark>) -> Result<Self, Violation> {
        if h > genus {
            return Err(Violation::GenusMismatch {
                expected: genus,
                found: h as i64,
            });
        }
        if let Some(&m) = side.iter().find(|&&m| m == 0 || m as usize > n) {
            return Err(Violation::LegLabels {
                n,
                detail: format!("label {m} out of range"),
            });
        }
        let legs = (1..=n as Mark)
            .map(|m| if side.contains(&m) { 0 } else { 1 })
            .collect();
        Self::new(genus, vec![h, genus - h], vec![(0, 1)], legs)
    }

    pub fn ambient_genus(&self) -> u32 {
        self.genus
    }

    pub fn num_marks(&self) -> usize {
        self.legs.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Codimension of Δ_Γ, i.e. the number of edges.
    pub fn codim(&self) -> usize {
        self.edges.len()
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `legs()[i]` is the vertex carrying mark `i + 1`.
    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn leg_vertex(&self, mark: Mark) -> usize {
        self.legs[mark as usize - 1]
    }

    pub fn marks_at(&self, v: usize) -> Vec<Mark> {
        self.legs
            .iter()
            .enumerate()
            .filter(|&(_, &w)| w == v)
            .map(|(i, _)| i as Mark + 1)
            .collect()
    }

    pub fn num_marks_at(&self, v: usize) -> usize {
        self.legs.iter().filter(|&&w| w == v).count()
    }

    /// Edge endpoints at `v`; a self-edge contributes two.
    pub fn edge_ends(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edge_ends(v) + self.num_marks_at(v)
    }

    pub fn self_edges(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count()
    }

    pub fn has_self_edge(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    /// Genus-0 vertex with exactly three special points.
    pub fn is_trivalent_rational(&self, v: usize) -> bool {
        self.genera[v] == 0 && self.valence(v) == 3
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.genera.len()
    }

    pub fn is_compact_type(&self) -> bool {
        self.first_betti() == 0
    }

    pub fn is_smooth(&self) -> bool {
        self.edges.is_empty()
    }

    /// dim M̄_{g,n} = 3g − 3 + n.
    pub fn ambient_dim(&self) -> u32 {
        (3 * self.genus as i64 - 3 + self.legs.len() as i64) as u32
    }

    /// Dimension of Δ_Γ as Σ_v (3·g(v) − 3 + val(v)).
    pub fn dim_stratum(&self) -> u32 {
        let per_vertex: i64 = (0..self.num_vertices())
            .map(|v| 3 * self.genera[v] as i64 - 3 + self.valence(v) as i64)
            .sum();
        let by_codim = self.ambient_dim() as i64 - self.edges.len() as i64;
        assert_eq!(per_vertex, by_codim, "dimension formulas disagree");
        per_vertex as u32
    }

    /// Smooths one node: merges the endpoints, or removes a self-edge and raises the genus.
    pub fn contract_edge(&self, edge: EdgeId) -> Result<StableGraph, GraphError> {
        let &(a, b) = self.edges.get(edge.0).ok_or(GraphError::MissingEdge(edge.0))?;
        let mut edges = self.edges.clone();
        edges.remove(edge.0);
        if a == b {
            let mut genera = self.genera.clone();
            genera[a] += 1;
            return Ok(Self::from_valid(self.genus, genera, edges, self.legs.clone()));
        }
        // b merges into a (a < b), later vertices shift down
        let reindex = |v: usize| match v.cmp(&b) {
            std::cmp::Ordering::Less => v,
            std::cmp::Ordering::Equal => a,
            std::cmp::Ordering::Greater => v - 1,
        };
        let mut genera = self.genera.clone();
        genera[a] += genera[b];
        genera.remove(b);
        let edges = edges.into_iter().map(|(x, y)| (reindex(x), reindex(y))).collect();
        let legs = self.legs.iter().map(|&v| reindex(v)).collect();
        Ok(Self::from_valid(self.genus, genera, edges, legs))
    }

    /// Vertices reachable from `start` without crossing edge `edge`.
    pub fn side_of_edge(&self, edge: EdgeId, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.num_vertices()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if i == edge.0 {
                    continue;
                }
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        (0..self.num_vertices()).filter(|&v| seen[v]).collect()
    }

    pub fn marks_on(&self, vertices: &[usize]) -> BTreeSet<Mark> {
        vertices.iter().flat_map(|&v| self.marks_at(v)).collect()
    }

    pub fn classify(&self) -> Classification {
        let compact_type = self.is_compact_type();
        let positive: Vec<usize> = (0..self.num_vertices())
            .filter(|&v| self.genera[v] > 0)
            .collect();
        let rational_tails = compact_type && (self.genus == 0 || positive.len() == 1);
        let anchor = if rational_tails && self.genus > 0 {
            Some(positive[0])
        } else {
            None
        };
        let mut tails: Vec<BTreeSet<Mark>> = match anchor {
            Some(a) => self
                .edges
                .iter()
                .enumerate()
                .filter(|&(_, &(x, y))| x == a || y == a)
                .map(|(i, &(x, y))| {
                    let far = if x == a { y } else { x };
                    self.marks_on(&self.side_of_edge(EdgeId(i), far))
                })
                .collect(),
            None => Vec::new(),
        };
        tails.sort_by(|s, t| s.iter().cmp(t.iter()));
        Classification {
            compact_type,
            rational_tails,
            anchor,
            tails,
        }
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        canon::canonical_form(self).0
    }

    /// The representative of this graph's isomorphism class.
    pub fn canonical(&self) -> StableGraph {
        let (_, order) = canon::canonical_form(self);
        self.permuted(&order)
    }

    /// Reorders vertices so that new vertex `i` is old vertex `order[i]`.
    pub(crate) fn permuted(&self, order: &[usize]) -> StableGraph {
        let mut position = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let genera = order.iter().map(|&v| self.genera[v]).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (position[a], position[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let legs = self.legs.iter().map(|&v| position[v]).collect();
        Self::assemble(self.genus, genera, edges, legs)
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// A genus-, edge- and leg-preserving vertex bijection `self -> other`, if one exists.
    pub fn isomorphism(&self, other: &StableGraph) -> Option<Vec<usize>> {
        if self.genus != other.genus
            || self.num_marks() != other.num_marks()
            || self.num_vertices() != other.num_vertices()
            || self.num_edges() != other.num_edges()
        {
            return None;
        }
        let (code_a, order_a) = canon::canonical_form(self);
        let (code_b, order_b) = canon::canonical_form(other);
        if code_a != code_b {
            return None;
        }
        let mut map = vec![0; self.num_vertices()];
        for (pos, &v) in order_a.iter().enumerate() {
            map[v] = order_b[pos];
        }
        Some(map)
    }

    pub fn is_isomorphic(&self, other: &StableGraph) -> bool {
        self.isomorphism(other).is_some()
    }
}
