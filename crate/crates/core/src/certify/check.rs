use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::intersection::{intersection_outcome, IntersectionOutcome, PosetCache};
use super::*;
use crate::graph::{Mark, StableGraph};
use crate::json::GraphJson;
use crate::morphism::{forget, hassett_reduce, pseudostable_contract, WeightData};
use crate::partition::OrderedPartition;
use crate::poset::contains;

pub const INDEX_NOT_POSITIVE: &str = "index not positive";
pub const INSUFFICIENT_MARKS: &str = "insufficient surviving marks";
pub const CITATION_MISMATCH: &str = "citation mismatch";

/// First witness that failed to re-verify, located by its path in the tree.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{path} ({rule}): {reason}")]
pub struct CheckFailure {
    pub path: String,
    pub rule: Rule,
    pub reason: String,
}

pub(super) struct Checker<'a> {
    cache: &'a PosetCache,
    verified: HashSet<usize>,
}

type Outcome = Result<(), String>;

fn ensure(cond: bool, reason: impl fmt::Display) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(reason.to_string())
    }
}

fn parse(json: &GraphJson, what: &str) -> Result<StableGraph, String> {
    json.to_graph().map_err(|e| format!("{what} invalid: {e}"))
}

impl<'a> Checker<'a> {
    pub fn new(cache: &'a PosetCache) -> Self {
        Self {
            cache,
            verified: HashSet::new(),
        }
    }

    pub fn check(&mut self, cert: &ExtremalityCertificate) -> Result<(), CheckFailure> {
        let fail = |reason: &str| CheckFailure {
            path: "root".into(),
            rule: cert.root.rule(),
            reason: reason.into(),
        };
        if cert.schema_version != SCHEMA_VERSION {
            return Err(fail("unsupported schema version"));
        }
        self.node(&cert.root, "root")?;
        if cert.verdict != cert.root.rule().verdict() {
            return Err(fail("verdict mismatch"));
        }
        if cert.pseudoeffective != pseudoeffective(&cert.root.rules()) {
            return Err(fail("pseudoeffective flag mismatch"));
        }
        Ok(())
    }

    fn node(&mut self, node: &Arc<CertNode>, path: &str) -> Result<(), CheckFailure> {
        let key = Arc::as_ptr(node) as usize;
        if self.verified.contains(&key) {
            return Ok(());
        }
        self.verify(node).map_err(|reason| CheckFailure {
            path: path.to_string(),
            rule: node.rule(),
            reason,
        })?;
        for (i, child) in node.children.iter().enumerate() {
            self.node(child, &format!("{path}/children[{i}]"))?;
        }
        self.verified.insert(key);
        Ok(())
    }

    fn verify(&self, node: &CertNode) -> Outcome {
        ensure(node.citation == node.rule().citation(), CITATION_MISMATCH)?;
        let graph = parse(&node.stratum, "stratum")?;
        let rule = node.rule();
        if rule != Rule::Rejected {
            ensure(rejection(&graph).is_none(), "stratum is outside the certified families")?;
        }
        if !matches!(rule, Rule::Chain | Rule::ChainCodim2 | Rule::Multitail | Rule::HassettContraction | Rule::DanglingRational | Rule::DanglingElliptic) {
            ensure(node.children.is_empty(), "leaf rule has children")?;
        }
        match &node.step {
            Step::Divisor(w) => verify_divisor(&graph, w),
            Step::Product(w) => verify_product(&graph, w),
            Step::HassettContraction(w) => self.verify_contraction(&graph, w, node, true),
            Step::DanglingRational(w) => self.verify_contraction(&graph, w, node, false),
            Step::ChainCodim2(w) => self.verify_chain(&graph, w, node, true),
            Step::Chain(w) => self.verify_chain(&graph, w, node, false),
            Step::Multitail(w) => self.verify_multitail(&graph, w, node),
            Step::DanglingElliptic(w) => verify_elliptic(&graph, w, node),
            Step::Unknown(w) => verify_unknown(&graph, w),
            Step::Rejected(w) => ensure(
                rejection(&graph) == Some(w.reason.as_str()),
                "rejection not justified",
            ),
        }
    }

    fn verify_contraction(&self, graph: &StableGraph, w: &ContractionWitness, node: &CertNode, rational_tails: bool) -> Outcome {
        let n = graph.num_marks();
        let weights = WeightData::from_strings(&w.weights).map_err(|e| format!("weights invalid: {e}"))?;
        let r = hassett_reduce(graph, &weights).map_err(|e| format!("reduction failed: {e}"))?;
        ensure(r.index > 0, INDEX_NOT_POSITIVE)?;
        ensure(r.index == w.index, "witness index mismatch")?;
        let tail: BTreeSet<Mark> = w.tail.iter().copied().collect();
        ensure(weights == WeightData::light_tail(n, &tail), "weights are not the light-tail weights")?;
        ensure(r.in_exceptional_locus && w.in_exceptional_locus, "not in the exceptional locus")?;
        let cl = graph.classify();
        if rational_tails {
            ensure(cl.rational_tails, "stratum is not of rational tails type")?;
        } else {
            ensure(cl.compact_type, "stratum is not of compact type")?;
        }
        let side = rational_sides(graph)
            .into_iter()
            .find(|s| s.marks == tail && s.has_moduli(graph))
            .ok_or("tail is not a rational subtree with moduli")?;
        if rational_tails {
            if let Some(anchor) = cl.anchor {
                ensure(
                    anchor_tails(graph, anchor).iter().any(|t| t.edge == side.edge),
                    "tail does not hang off the anchor",
                )?;
            }
        }
        let divisor = parse(&w.exceptional_divisor, "exceptional divisor")?;
        let expected = StableGraph::divisor(graph.ambient_genus(), n, 0, &tail).map_err(|e| e.to_string())?;
        ensure(divisor.is_isomorphic(&expected), "exceptional divisor is not the tail divisor")?;
        self.expect_product_child(graph, &divisor, node)
    }

    fn expect_product_child(&self, graph: &StableGraph, divisor: &StableGraph, node: &CertNode) -> Outcome {
        let product = node
            .children
            .iter()
            .find(|c| c.rule() == Rule::Product)
            .ok_or("missing product child")?;
        let Step::Product(pw) = &product.step else {
            unreachable!()
        };
        let child = parse(&product.stratum, "child stratum")?;
        ensure(child.is_isomorphic(graph), "child mismatch")?;
        let ambient = parse(&pw.ambient, "product ambient")?;
        ensure(ambient.is_isomorphic(divisor), "product ambient is not the exceptional divisor")
    }

    fn verify_forgetful(&self, graph: &StableGraph, w: &ForgetfulWitness, node: &CertNode, expected: &StableGraph) -> Outcome {
        let set: BTreeSet<Mark> = w.marks.iter().copied().collect();
        ensure(set.len() == w.marks.len(), "repeated mark")?;
        ensure(w.survivals.len() == w.marks.len(), "survival list does not match marks")?;
        for (k, (s, &m)) in w.survivals.iter().zip(&w.marks).enumerate() {
            ensure(s.mark == m, "survival list does not match marks")?;
            let r = forget(graph, m).map_err(|e| e.to_string())?;
            ensure(r.index == 0, format!("mark {m} does not survive"))?;
            ensure(s.index == 0, "witness index mismatch")?;
            let image = parse(&s.image, "image")?;
            ensure(image.is_isomorphic(&r.image_graph), "image mismatch")?;
            let child = node.children.get(k).ok_or("missing child certificate")?;
            ensure(child.rule().verdict() == Verdict::Certified, "child not certified")?;
            let child_graph = parse(&child.stratum, "child stratum")?;
            ensure(child_graph.is_isomorphic(&image), "child mismatch")?;
        }
        // the survival argument needs the pair graph on the marks to be connected
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); w.marks.len()];
        let pos = |m: Mark| w.marks.iter().position(|&x| x == m);
        for &[i, j] in &w.surviving_pairs {
            let (Some(a), Some(b)) = (pos(i), pos(j)) else {
                return Err("pair uses an unlisted mark".into());
            };
            let first = forget(graph, i).map_err(|e| e.to_string())?;
            let second = forget(&first.image_graph, if j > i { j - 1 } else { j }).map_err(|e| e.to_string())?;
            ensure(first.index == 0 && second.index == 0, format!("pair {{{i},{j}}} does not survive"))?;
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut seen = vec![false; w.marks.len()];
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
        ensure(seen.iter().all(|&s| s), "survival graph disconnected")?;

        let recorded = parse(&w.intersection.expected, "intersection target")?;
        ensure(recorded.is_isomorphic(expected), "intersection target mismatch")?;
        let recomputed = intersection_outcome(self.cache, graph, &w.marks, expected);
        match (&recomputed, &w.intersection.outcome) {
            (IntersectionOutcome::Ok { .. }, IntersectionOutcome::Ok { .. } | IntersectionOutcome::Unverified { .. }) => Ok(()),
            (IntersectionOutcome::Unverified { .. }, IntersectionOutcome::Ok { .. } | IntersectionOutcome::Unverified { .. }) => Ok(()),
            _ => Err("intersection not precise".into()),
        }
    }

    fn verify_chain(&self, graph: &StableGraph, w: &ForgetfulWitness, node: &CertNode, codim2: bool) -> Outcome {
        let text = w.partition.as_deref().ok_or("chain witness lacks its partition")?;
        let p = OrderedPartition::parse(graph.ambient_genus(), text).map_err(|e| format!("partition invalid: {e}"))?;
        let chain = p.build_chain().map_err(|e| format!("partition invalid: {e}"))?;
        ensure(chain.is_isomorphic(graph), "partition does not describe the stratum")?;
        ensure(graph.classify().rational_tails, "stratum is not of rational tails type")?;
        ensure(p.is_trivalent(), "chain is not trivalent")?;
        if codim2 {
            ensure(p.r() == 2, "codimension-two rule on a longer chain")?;
        } else {
            ensure(p.r() >= 3, "chain rule needs at least three rational components")?;
        }
        let required = p.tail_marks();
        let listed: BTreeSet<Mark> = w.marks.iter().copied().collect();
        ensure(listed == required, INSUFFICIENT_MARKS)?;
        let expected = expected_intersection(&chain, &p);
        self.verify_forgetful(graph, w, node, &expected)?;
        if codim2 {
            self.expect_product_child(graph, &expected, node)?;
        }
        Ok(())
    }

    fn verify_multitail(&self, graph: &StableGraph, w: &ForgetfulWitness, node: &CertNode) -> Outcome {
        let cl = graph.classify();
        ensure(cl.rational_tails, "stratum is not of rational tails type")?;
        ensure(
            (0..graph.num_vertices()).all(|v| graph.vertex_genus(v) > 0 || graph.valence(v) == 3),
            "some rational component has moduli",
        )?;
        ensure(w.marks.len() >= 4, INSUFFICIENT_MARKS)?;
        self.verify_forgetful(graph, w, node, graph)
    }
}

fn verify_divisor(graph: &StableGraph, w: &DivisorWitness) -> Outcome {
    ensure(graph.codim() == 1, "not a divisor")?;
    let s: BTreeSet<Mark> = w.marks.iter().copied().collect();
    let d = StableGraph::divisor(graph.ambient_genus(), graph.num_marks(), w.h, &s)
        .map_err(|e| format!("divisor data invalid: {e}"))?;
    ensure(d.is_isomorphic(graph), "divisor data does not describe the stratum")
}

fn verify_product(graph: &StableGraph, w: &ProductWitness) -> Outcome {
    let ambient = parse(&w.ambient, "product ambient")?;
    ensure(ambient.num_marks() >= 1 && ambient.is_compact_type(), "ambient is not of compact type with marks")?;
    ensure(ambient.codim() == 1, "ambient is not a boundary divisor")?;
    ensure(graph.is_compact_type(), "stratum is not of compact type")?;
    ensure(contains(&ambient, graph).unwrap_or(false), "stratum is not a degeneration of the ambient")?;
    let mut prev = ambient;
    for step in &w.steps {
        let next = parse(&step.graph, "product step")?;
        ensure(next.codim() == prev.codim() + 1 && next.is_compact_type(), "product chain broken")?;
        ensure(split_factor(&next, &prev) == Some(step.factor), "product chain broken")?;
        prev = next;
    }
    ensure(prev.is_isomorphic(graph), "product chain broken")
}

fn verify_elliptic(graph: &StableGraph, w: &EllipticWitness, node: &CertNode) -> Outcome {
    ensure(graph.ambient_genus() >= 2 && graph.num_marks() >= 1, "outside the pseudostable range")?;
    ensure(graph.is_compact_type(), "stratum is not of compact type")?;
    let r = pseudostable_contract(graph).map_err(|e| e.to_string())?;
    ensure(r.index > 0, INDEX_NOT_POSITIVE)?;
    ensure(r.index == w.index, "witness index mismatch")?;
    ensure(r.in_exceptional_locus && w.in_exceptional_locus, "not in the exceptional locus")?;
    ensure(unmarked_elliptic_tails(graph).contains(&w.elliptic_vertex), "vertex is not an unmarked elliptic tail")?;
    let divisor = parse(&w.exceptional_divisor, "exceptional divisor")?;
    let expected = StableGraph::divisor(graph.ambient_genus(), graph.num_marks(), 1, &BTreeSet::new()).map_err(|e| e.to_string())?;
    ensure(divisor.is_isomorphic(&expected), "exceptional divisor is not the elliptic divisor")?;
    let product = node.children.first().ok_or("missing product child")?;
    let Step::Product(pw) = &product.step else {
        return Err("missing product child".into());
    };
    ensure(parse(&product.stratum, "child stratum")?.is_isomorphic(graph), "child mismatch")?;
    ensure(
        parse(&pw.ambient, "product ambient")?.is_isomorphic(&expected),
        "product ambient is not the exceptional divisor",
    )
}

fn verify_unknown(graph: &StableGraph, w: &UnknownWitness) -> Outcome {
    if w.blocker == BLOCK_INTERSECTION {
        return Ok(());
    }
    ensure(blocker(graph) == w.blocker, "blocker mismatch")
}
