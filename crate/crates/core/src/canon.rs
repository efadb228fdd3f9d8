//! Canonical labeling of dual graphs by colour refinement plus individualization.
//!
//! Legs are fixed labels, so most vertices are told apart by their mark sets and
//! the search tree stays tiny at the sizes this crate enumerates.

use serde::{Deserialize, Serialize};

use crate::graph::StableGraph;

/// Label-independent identity of an isomorphism class of dual graphs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode {
    pub genus: u32,
    pub genera: Vec<u32>,
    pub legs: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

struct Adjacency {
    /// (neighbour, multiplicity) for non-loop edges
    neighbours: Vec<Vec<(usize, usize)>>,
}

impl Adjacency {
    fn new(g: &StableGraph) -> Self {
        let nv = g.num_vertices();
        let mut counts = vec![std::collections::BTreeMap::new(); nv];
        for &(a, b) in g.edges() {
            if a != b {
                *counts[a].entry(b).or_insert(0) += 1;
                *counts[b].entry(a).or_insert(0) += 1;
            }
        }
        Self {
            neighbours: counts
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect(),
        }
    }
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn refine(adj: &Adjacency, mut colors: Vec<usize>) -> Vec<usize> {
    let mut classes = distinct(&colors);
    loop {
        let keys: Vec<(usize, Vec<(usize, usize)>)> = (0..colors.len())
            .map(|v| {
                let mut around: Vec<(usize, usize)> = adj.neighbours[v]
                    .iter()
                    .map(|&(u, m)| (colors[u], m))
                    .collect();
                around.sort_unstable();
                (colors[v], around)
            })
            .collect();
        let next = rank(&keys);
        let next_classes = distinct(&next);
        if next_classes == classes {
            return next;
        }
        classes = next_classes;
        colors = next;
    }
}

fn code_for(g: &StableGraph, order: &[usize]) -> CanonicalCode {
    let mut position = vec![0u32; order.len()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i as u32;
    }
    let mut edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (position[a], position[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort_unstable();
    CanonicalCode {
        genus: g.ambient_genus(),
        genera: order.iter().map(|&v| g.vertex_genus(v)).collect(),
        legs: g.legs().iter().map(|&v| position[v]).collect(),
        edges,
    }
}

fn search(
    g: &StableGraph,
    adj: &Adjacency,
    colors: Vec<usize>,
    best: &mut Option<(CanonicalCode, Vec<usize>)>,
) {
    let nv = colors.len();
    let mut by_color: Vec<(usize, usize)> = colors.iter().copied().zip(0..nv).collect();
    by_color.sort_unstable();
    let target = (0..nv).find_map(|i| {
        let c = by_color[i].0;
        let size = by_color.iter().filter(|&&(d, _)| d == c).count();
        (size > 1).then_some(c)
    });
    match target {
        None => {
            let order: Vec<usize> = by_color.into_iter().map(|(_, v)| v).collect();
            let code = code_for(g, &order);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                *best = Some((code, order));
            }
        }
        Some(cell) => {
            for v in (0..nv).filter(|&v| colors[v] == cell) {
                let split: Vec<usize> = (0..nv)
                    .map(|u| 2 * colors[u] + usize::from(u != v))
                    .collect();
                search(g, adj, refine(adj, rank(&split)), best);
            }
        }
    }
}

/// Canonical code plus the vertex order realizing it (`order[i]` = old vertex).
pub fn canonical_form(g: &StableGraph) -> (CanonicalCode, Vec<usize>) {
    let adj = Adjacency::new(g);
    let keys: Vec<(u32, Vec<u32>, usize, usize)> = (0..g.num_vertices())
        .map(|v| {
            (
                g.vertex_genus(v),
                g.marks_at(v),
                g.self_edges(v),
                g.edge_ends(v),
            )
        })
        .collect();
    let colors = refine(&adj, rank(&keys));
    let mut best = None;
    search(g, &adj, colors, &mut best);
    best.expect("search visits at least one leaf")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(nv: usize) -> StableGraph {
        // n-gon of genus-0 vertices, one mark each
        let parts: Vec<(u32, Vec<u32>)> = (0..nv).map(|i| (0, vec![i as u32 + 1])).collect();
        let refs: Vec<(u32, &[u32])> = parts.iter().map(|(h, m)| (*h, m.as_slice())).collect();
        let edges: Vec<(usize, usize)> = (0..nv).map(|i| (i, (i + 1) % nv)).collect();
        StableGraph::from_parts(1, &refs, &edges).unwrap()
    }

    #[test]
    fn unlabelled_symmetric_vertices_share_a_code() {
        // genus-2 banana graph: two genus-0 vertices joined by three edges, marked on one side
        let a = StableGraph::new(2, vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![0]).unwrap();
        let b = StableGraph::new(2, vec![0, 0], vec![(1, 0), (0, 1), (1, 0)], vec![1]).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
    }

    #[test]
    fn canonical_is_idempotent() {
        let g = cycle(4);
        let c = g.canonical();
        assert_eq!(c.canonical(), c);
        assert!(c.is_canonical());
    }

    #[test]
    fn reflected_cycle_splits_classes_by_labels() {
        let g = cycle(4);
        // swapping marks 2 and 4 is a reflection, still isomorphic
        let legs = vec![0, 3, 2, 1];
        let h = StableGraph::new(1, vec![0; 4], g.edges().to_vec(), legs).unwrap();
        assert!(g.is_isomorphic(&h));
        // swapping marks 1 and 2 is not a symmetry of the labelled cycle
        let legs = vec![0, 2, 1, 3];
        let k = StableGraph::new(1, vec![0; 4], g.edges().to_vec(), legs).unwrap();
        assert!(!g.is_isomorphic(&k));
    }
}
