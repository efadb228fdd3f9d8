//! Brute-force re-derivation of the combinatorial claims certificates rely on.
//!
//! Nothing here calls into the morphism or certificate code for the expected
//! side of a comparison: forgetful images are recomputed by deleting a leg and
//! contracting an edge at the destabilized vertex, dimensions by edge counting,
//! and containment by exhaustive contraction search.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::canon::CanonicalCode;
use crate::graph::{EdgeId, Mark, StableGraph};
use crate::json::GraphJson;
use crate::poset::{contains, PosetError, StrataPoset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub claim: String,
    pub g: u32,
    pub n: usize,
    pub verdict: OracleVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub instances: u64,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub graph: GraphJson,
    pub detail: String,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.verdict == OracleVerdict::Pass
    }

    /// One line of the summary table.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<24} ({},{})  {:<4}  {:>8} instances  {:>6} ms",
            self.claim,
            self.g,
            self.n,
            match self.verdict {
                OracleVerdict::Pass => "pass",
                OracleVerdict::Fail => "FAIL",
            },
            self.instances,
            self.wall_time_ms
        )
    }
}

pub const CLAIMS: [&str; 4] = ["dimension-formulas", "survival-rule", "commutation", "intersections"];

fn report(
    claim: &str,
    g: u32,
    n: usize,
    start: Instant,
    instances: u64,
    counterexample: Option<(StableGraph, String)>,
) -> OracleReport {
    OracleReport {
        claim: claim.to_string(),
        g,
        n,
        verdict: if counterexample.is_some() {
            OracleVerdict::Fail
        } else {
            OracleVerdict::Pass
        },
        counterexample: counterexample.map(|(graph, detail)| Counterexample {
            graph: graph.canonical_json(),
            detail,
        }),
        instances,
        wall_time_ms: start.elapsed().as_millis() as u64,
    }
}

fn full_poset(g: u32, n: usize, budget: &Budget) -> Result<StrataPoset, OracleError> {
    Ok(StrataPoset::enumerate_full(g, n, budget)?)
}

fn codim_dim(g: u32, n: usize, edges: usize) -> i64 {
    3 * g as i64 - 3 + n as i64 - edges as i64
}

/// Forget mark `i` by deleting its leg and, if the vertex destabilizes,
/// contracting one of its edges. Marks above `i` shift down.
pub fn raw_forget(graph: &StableGraph, i: Mark) -> Option<StableGraph> {
    let n = graph.num_marks();
    let g = graph.ambient_genus();
    if 2 * g as i64 - 2 + n as i64 - 1 <= 0 || i == 0 || i as usize > n {
        return None;
    }
    let v = graph.legs()[i as usize - 1];
    let mut legs = graph.legs().to_vec();
    legs.remove(i as usize - 1);
    let genera = graph.genera().to_vec();
    let edges = graph.edges().to_vec();
    let legs_left = legs.iter().filter(|&&w| w == v).count();
    let ends: usize = edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum();
    let reduced = StableGraph::new(g, genera.clone(), edges.clone(), legs.clone());
    if genera[v] != 0 || legs_left + ends != 2 {
        return reduced.ok();
    }
    // vertex is now a rational bridge or a rational leaf: contract one of its edges
    let e = edges.iter().position(|&(a, b)| (a == v) != (b == v))?;
    let (a, b) = edges[e];
    let keep = if a == v { b } else { a };
    let mut edges2 = edges.clone();
    edges2.remove(e);
    let relabel = |w: usize| if w == v { keep } else { w };
    let edges2: Vec<(usize, usize)> = edges2.into_iter().map(|(x, y)| (relabel(x), relabel(y))).collect();
    let legs2: Vec<usize> = legs.into_iter().map(relabel).collect();
    // drop the now isolated vertex v
    let shift = |w: usize| if w > v { w - 1 } else { w };
    let mut genera2 = genera;
    genera2.remove(v);
    StableGraph::new(
        g,
        genera2,
        edges2.into_iter().map(|(x, y)| (shift(x), shift(y))).collect(),
        legs2.into_iter().map(shift).collect(),
    )
    .ok()
}

/// Both dimension formulas agree on every stratum and covers change codimension by one.
pub fn verify_dimension_formulas(g: u32, n: usize, budget: &Budget) -> Result<OracleReport, OracleError> {
    let start = Instant::now();
    let poset = full_poset(g, n, budget)?;
    budget.charge(poset.len() as u64)?;
    let bad = (0..poset.len()).into_par_iter().find_first(|&id| {
        let graph = poset.node(id);
        let mut per_vertex = 0i64;
        for v in 0..graph.num_vertices() {
            let legs = graph.legs().iter().filter(|&&w| w == v).count();
            let ends: usize = graph
                .edges()
                .iter()
                .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
                .sum();
            per_vertex += 3 * graph.genera()[v] as i64 - 3 + (legs + ends) as i64;
        }
        per_vertex != codim_dim(g, n, graph.edges().len())
            || poset
                .contracted(id)
                .iter()
                .any(|&up| poset.node(up).edges().len() + 1 != graph.edges().len())
    });
    Ok(report(
        CLAIMS[0],
        g,
        n,
        start,
        poset.len() as u64,
        bad.map(|id| (poset.node(id).clone(), "dimension formulas or cover codimension disagree".into())),
    ))
}

fn trivalent_rational(graph: &StableGraph, v: usize) -> bool {
    let legs = graph.legs().iter().filter(|&&w| w == v).count();
    let ends: usize = graph
        .edges()
        .iter()
        .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
        .sum();
    graph.genera()[v] == 0 && legs + ends == 3
}

/// (index of π_i = 0) ⇔ (leg i sits on a trivalent rational vertex), for every stratum and mark.
pub fn verify_survival_rule(g: u32, n: usize, budget: &Budget) -> Result<OracleReport, OracleError> {
    let start = Instant::now();
    if 2 * g as i64 - 2 + n as i64 - 1 <= 0 {
        return Ok(report(CLAIMS[1], g, n, start, 0, None));
    }
    let poset = full_poset(g, n, budget)?;
    budget.charge((poset.len() * n) as u64)?;
    let bad = poset.nodes().par_iter().find_map_first(|graph| {
        (1..=n as Mark).find_map(|i| {
            let image = raw_forget(graph, i)?;
            let index = codim_dim(g, n, graph.edges().len()) - codim_dim(g, n - 1, image.edges().len());
            let predicted = trivalent_rational(graph, graph.legs()[i as usize - 1]);
            ((index == 0) != predicted || !(0..=1).contains(&index))
                .then(|| (graph.clone(), format!("mark {i}: index {index}, trivalent {predicted}")))
        })
    });
    Ok(report(CLAIMS[1], g, n, start, (poset.len() * n) as u64, bad))
}

/// π_j ∘ π_i and π_i ∘ π_j agree up to isomorphism after relabelling.
pub fn verify_commutation(g: u32, n: usize, budget: &Budget) -> Result<OracleReport, OracleError> {
    let start = Instant::now();
    if n < 2 || 2 * g as i64 - 2 + n as i64 - 2 <= 0 {
        return Ok(report(CLAIMS[2], g, n, start, 0, None));
    }
    let poset = full_poset(g, n, budget)?;
    let pairs = n * (n - 1) / 2;
    budget.charge((poset.len() * pairs) as u64)?;
    let bad = poset.nodes().par_iter().find_map_first(|graph| {
        for i in 1..=n as Mark {
            for j in (i + 1)..=n as Mark {
                let ij = raw_forget(&raw_forget(graph, i)?, j - 1)?;
                let ji = raw_forget(&raw_forget(graph, j)?, i)?;
                if ij.canonical_code() != ji.canonical_code() {
                    return Some((graph.clone(), format!("marks {i} and {j} do not commute")));
                }
            }
        }
        None
    });
    Ok(report(CLAIMS[2], g, n, start, (poset.len() * pairs) as u64, bad))
}

/// Marks used by the forgetful argument and the stratum the intersection should equal.
///
/// Single chains use their tail marks and, for two rational components, the
/// tail divisor; everything else uses every mark on a trivalent rational vertex.
pub fn intersection_claim(graph: &StableGraph) -> Option<(Vec<Mark>, StableGraph)> {
    let g = graph.ambient_genus();
    let n = graph.num_marks();
    let nv = graph.num_vertices();
    if !graph.is_compact_type() || graph.edges().len() < 2 {
        return None;
    }
    let positive: Vec<usize> = (0..nv).filter(|&v| graph.genera()[v] > 0).collect();
    if g > 0 && positive.len() != 1 {
        return None;
    }
    if (0..nv).any(|v| graph.genera()[v] == 0 && !trivalent_rational(graph, v)) {
        return None;
    }
    let degree = |v: usize| graph.edges().iter().filter(|&&(a, b)| a == v || b == v).count();
    let marks_at = |v: usize| -> Vec<Mark> {
        (1..=n as Mark).filter(|&m| graph.legs()[m as usize - 1] == v).collect()
    };
    let is_path = (0..nv).all(|v| degree(v) <= 2);
    let anchor = if g > 0 {
        Some(positive[0]).filter(|&a| degree(a) == 1)
    } else {
        (0..nv).filter(|&v| degree(v) == 1).min_by_key(|&v| marks_at(v))
    };
    match anchor {
        Some(a) if is_path => {
            let tail: BTreeSet<Mark> = (1..=n as Mark).filter(|&m| graph.legs()[m as usize - 1] != a).collect();
            let expected = if graph.edges().len() == 2 {
                StableGraph::divisor(g, n, 0, &tail).ok()?
            } else {
                graph.clone()
            };
            Some((tail.into_iter().collect(), expected))
        }
        _ => {
            let marks = (1..=n as Mark)
                .filter(|&m| trivalent_rational(graph, graph.legs()[m as usize - 1]))
                .collect();
            Some((marks, graph.clone()))
        }
    }
}

struct ContainmentMemo(Mutex<HashMap<(CanonicalCode, CanonicalCode), bool>>);

impl ContainmentMemo {
    fn contains(&self, big: &StableGraph, small: &StableGraph) -> bool {
        let key = (big.canonical_code(), small.canonical_code());
        if let Some(&hit) = self.0.lock().unwrap().get(&key) {
            return hit;
        }
        let value = contains(big, small).expect("same ambient");
        self.0.lock().unwrap().insert(key, value);
        value
    }
}

/// Maximal strata of ⋂ π_i⁻¹(π_i(Δ_graph)) by exhaustive search.
pub fn brute_force_maxima(graph: &StableGraph, marks: &[Mark], strata: &[StableGraph]) -> Vec<StableGraph> {
    let memo = ContainmentMemo(Mutex::new(HashMap::new()));
    let images: Vec<StableGraph> = marks
        .iter()
        .map(|&i| raw_forget(graph, i).expect("mark can be forgotten"))
        .collect();
    let members: Vec<&StableGraph> = strata
        .par_iter()
        .filter(|candidate| {
            marks.iter().zip(&images).all(|(&i, q)| match raw_forget(candidate, i) {
                Some(img) => memo.contains(q, &img),
                None => false,
            })
        })
        .collect();
    let codes: HashSet<CanonicalCode> = members.iter().map(|m| m.canonical_code()).collect();
    let mut maxima: Vec<StableGraph> = members
        .into_iter()
        .filter(|m| {
            !(0..m.edges().len()).any(|e| {
                let up = m.contract_edge(EdgeId(e)).expect("edge exists");
                codes.contains(&up.canonical_code())
            })
        })
        .cloned()
        .collect();
    maxima.sort_by_cached_key(|m| m.canonical_code());
    maxima
}

/// For every chain and multitail stratum, the intersection has the claimed unique maximum.
pub fn verify_intersections(g: u32, n: usize, budget: &Budget) -> Result<OracleReport, OracleError> {
    let start = Instant::now();
    let poset = full_poset(g, n, budget)?;
    let claims: Vec<(&StableGraph, Vec<Mark>, StableGraph)> = poset
        .nodes()
        .iter()
        .filter_map(|graph| intersection_claim(graph).map(|(m, e)| (graph, m, e)))
        .collect();
    budget.charge((claims.len() * poset.len()) as u64)?;
    let mut bad = None;
    for (graph, marks, expected) in &claims {
        let maxima = brute_force_maxima(graph, marks, poset.nodes());
        if maxima.len() != 1 || maxima[0].canonical_code() != expected.canonical_code() {
            bad = Some((
                (*graph).clone(),
                format!("marks {marks:?}: {} maximal strata in the intersection", maxima.len()),
            ));
            break;
        }
    }
    Ok(report(
        CLAIMS[3],
        g,
        n,
        start,
        (claims.len() * poset.len()) as u64,
        bad,
    ))
}

pub fn run_claim(claim: &str, g: u32, n: usize, budget: &Budget) -> Option<Result<OracleReport, OracleError>> {
    Some(match claim {
        "dimension-formulas" => verify_dimension_formulas(g, n, budget),
        "survival-rule" => verify_survival_rule(g, n, budget),
        "commutation" => verify_commutation(g, n, budget),
        "intersections" => verify_intersections(g, n, budget),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::morphism::forget;

    fn budget() -> Budget {
        Budget::new(crate::budget::DEFAULT_BUDGET)
    }

    #[test]
    fn raw_forget_agrees_with_forget() {
        let p = StrataPoset::enumerate_full(1, 4, &budget()).unwrap();
        for graph in p.nodes() {
            for i in 1..=4 {
                let a = raw_forget(graph, i).unwrap();
                let b = forget(graph, i).unwrap().image_graph;
                assert!(a.is_isomorphic(&b));
            }
        }
    }

    #[test]
    fn dimension_formulas() {
        for (g, n) in [(0, 4), (0, 6), (1, 3)] {
            let r = verify_dimension_formulas(g, n, &budget()).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert_eq!(verify_dimension_formulas(0, 4, &budget()).unwrap().instances, 4);
    }

    #[test]
    fn survival_and_commutation() {
        for (g, n) in [(0, 5), (1, 4), (1, 2)] {
            assert!(verify_survival_rule(g, n, &budget()).unwrap().passed());
            assert!(verify_commutation(g, n, &budget()).unwrap().passed());
        }
        assert_eq!(verify_commutation(1, 1, &budget()).unwrap().instances, 0);
    }

    #[test]
    fn intersections_small() {
        for (g, n) in [(1, 4), (0, 6)] {
            let r = verify_intersections(g, n, &budget()).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.instances > 0);
        }
    }

    #[test]
    fn trivalent_chain_claim_uses_tail_marks() {
        let f = fixtures::trivalent_chain(1, 3, &[5]);
        let (marks, expected) = intersection_claim(&f).unwrap();
        assert_eq!(marks, vec![1, 2, 3, 4]);
        assert_eq!(expected, f);
    }

    #[test]
    fn budget_is_reported() {
        assert!(matches!(
            verify_survival_rule(1, 4, &Budget::new(10)),
            Err(OracleError::Poset(PosetError::Budget(_)))
        ));
    }
}
