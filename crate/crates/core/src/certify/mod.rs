//! Extremality certificates: a tree of rule applications whose witnesses can be
//! recomputed by [`check_certificate`] without trusting the producer.

mod check;
mod intersection;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::canon::CanonicalCode;
use crate::graph::{EdgeId, Mark, StableGraph};
use crate::json::{GraphJson, SCHEMA_VERSION};
use crate::morphism::{forget, hassett_reduce, pseudostable_contract, ImageDetail, WeightData};
use crate::partition::{chain_shape, OrderedPartition, PartitionError};

pub use check::{CheckFailure, CITATION_MISMATCH, INDEX_NOT_POSITIVE, INSUFFICIENT_MARKS};
pub use intersection::IntersectionOutcome;
use intersection::{intersection_outcome, PosetCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    Unknown,
    Rejected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::Unknown => "UNKNOWN",
            Verdict::Rejected => "REJECTED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Divisor,
    Product,
    HassettContraction,
    ChainCodim2,
    Chain,
    Multitail,
    DanglingRational,
    DanglingElliptic,
    Unknown,
    Rejected,
}

impl Rule {
    pub fn citation(self) -> &'static str {
        match self {
            Rule::Divisor => "boundary-divisors-extremal",
            Rule::Product => "compact-type-degeneration-extremal-in-product",
            Rule::HassettContraction => "hassett-reduction-exceptional-locus",
            Rule::ChainCodim2 => "forgetful-survival-codim2-modularity",
            Rule::Chain => "forgetful-survival-chain-induction",
            Rule::Multitail => "forgetful-survival-multitail-induction",
            Rule::DanglingRational => "dangling-rational-tail-reduction",
            Rule::DanglingElliptic => "pseudostable-elliptic-tail-contraction",
            Rule::Unknown => "conjecture:all-boundary-strata-extremal",
            Rule::Rejected => "scope:compact-type-with-marks",
        }
    }

    /// Rules whose argument extends to the pseudoeffective cone.
    pub fn is_pseudoeffective(self) -> bool {
        matches!(
            self,
            Rule::HassettContraction
                | Rule::DanglingRational
                | Rule::DanglingElliptic
                | Rule::Product
                | Rule::Divisor
        )
    }

    pub fn verdict(self) -> Verdict {
        match self {
            Rule::Unknown => Verdict::Unknown,
            Rule::Rejected => Verdict::Rejected,
            _ => Verdict::Certified,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Divisor => "DIVISOR",
            Rule::Product => "PRODUCT",
            Rule::HassettContraction => "HASSETT_CONTRACTION",
            Rule::ChainCodim2 => "CHAIN_CODIM2",
            Rule::Chain => "CHAIN",
            Rule::Multitail => "MULTITAIL",
            Rule::DanglingRational => "DANGLING_RATIONAL",
            Rule::DanglingElliptic => "DANGLING_ELLIPTIC",
            Rule::Unknown => "UNKNOWN",
            Rule::Rejected => "REJECTED",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorWitness {
    pub h: u32,
    pub marks: Vec<Mark>,
}

/// One codimension-one step inside the ambient product, splitting a factor M̄_{g,n}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductStep {
    pub graph: GraphJson,
    pub factor: [u32; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductWitness {
    pub ambient: GraphJson,
    pub steps: Vec<ProductStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionWitness {
    pub tail: Vec<Mark>,
    pub weights: Vec<String>,
    pub index: u32,
    pub in_exceptional_locus: bool,
    pub exceptional_divisor: GraphJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survival {
    pub mark: Mark,
    pub index: u32,
    pub image: GraphJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionWitness {
    pub expected: GraphJson,
    #[serde(flatten)]
    pub outcome: IntersectionOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgetfulWitness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tails: Vec<Vec<Mark>>,
    pub marks: Vec<Mark>,
    pub survivals: Vec<Survival>,
    pub surviving_pairs: Vec<[Mark; 2]>,
    pub intersection: IntersectionWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticWitness {
    pub elliptic_vertex: usize,
    pub index: u32,
    pub in_exceptional_locus: bool,
    pub exceptional_divisor: GraphJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownWitness {
    pub blocker: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedWitness {
    pub reason: String,
}

/// A rule together with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "witnesses", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Step {
    Divisor(DivisorWitness),
    Product(ProductWitness),
    HassettContraction(ContractionWitness),
    ChainCodim2(ForgetfulWitness),
    Chain(ForgetfulWitness),
    Multitail(ForgetfulWitness),
    DanglingRational(ContractionWitness),
    DanglingElliptic(EllipticWitness),
    Unknown(UnknownWitness),
    Rejected(RejectedWitness),
}

impl Step {
    pub fn rule(&self) -> Rule {
        match self {
            Step::Divisor(_) => Rule::Divisor,
            Step::Product(_) => Rule::Product,
            Step::HassettContraction(_) => Rule::HassettContraction,
            Step::ChainCodim2(_) => Rule::ChainCodim2,
            Step::Chain(_) => Rule::Chain,
            Step::Multitail(_) => Rule::Multitail,
            Step::DanglingRational(_) => Rule::DanglingRational,
            Step::DanglingElliptic(_) => Rule::DanglingElliptic,
            Step::Unknown(_) => Rule::Unknown,
            Step::Rejected(_) => Rule::Rejected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertNode {
    pub stratum: GraphJson,
    #[serde(flatten)]
    pub step: Step,
    pub citation: String,
    pub children: Vec<Arc<CertNode>>,
}

impl CertNode {
    fn new(stratum: &StableGraph, step: Step, children: Vec<Arc<CertNode>>) -> Self {
        Self {
            stratum: stratum.canonical_json(),
            citation: step.rule().citation().to_string(),
            step,
            children,
        }
    }

    pub fn rule(&self) -> Rule {
        self.step.rule()
    }

    /// Every rule used in this subtree.
    pub fn rules(&self) -> BTreeSet<Rule> {
        let mut out = BTreeSet::from([self.rule()]);
        for c in &self.children {
            out.extend(c.rules());
        }
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalityCertificate {
    pub schema_version: u32,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub root: Arc<CertNode>,
    pub pseudoeffective: bool,
}

impl ExtremalityCertificate {
    fn from_root(root: Arc<CertNode>) -> Self {
        let rules = root.rules();
        Self {
            schema_version: SCHEMA_VERSION,
            verdict: root.rule().verdict(),
            pseudoeffective: pseudoeffective(&rules),
            root,
        }
    }

    pub fn rules(&self) -> BTreeSet<Rule> {
        self.root.rules()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn pseudoeffective(rules: &BTreeSet<Rule>) -> bool {
    rules.iter().all(|r| r.is_pseudoeffective())
}

/// An all-genus-0 side of an edge.
#[derive(Debug, Clone)]
pub(crate) struct RationalSide {
    pub edge: usize,
    pub vertices: Vec<usize>,
    pub marks: BTreeSet<Mark>,
}

impl RationalSide {
    pub fn has_moduli(&self, graph: &StableGraph) -> bool {
        self.vertices.iter().any(|&v| graph.valence(v) > 3)
    }
}

fn mark_key(marks: &BTreeSet<Mark>) -> Vec<Mark> {
    marks.iter().copied().collect()
}

/// Every side of every edge whose vertices all have genus 0.
pub(crate) fn rational_sides(graph: &StableGraph) -> Vec<RationalSide> {
    let mut out = Vec::new();
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        if a == b {
            continue;
        }
        for start in [a, b] {
            let vertices = graph.side_of_edge(EdgeId(e), start);
            if vertices.iter().all(|&v| graph.vertex_genus(v) == 0) {
                out.push(RationalSide {
                    edge: e,
                    marks: graph.marks_on(&vertices),
                    vertices,
                });
            }
        }
    }
    out
}

/// Tails of a rational-tails graph with positive genus: the far sides of anchor edges.
pub(crate) fn anchor_tails(graph: &StableGraph, anchor: usize) -> Vec<RationalSide> {
    rational_sides(graph)
        .into_iter()
        .filter(|s| {
            let (a, b) = graph.edges()[s.edge];
            (a == anchor || b == anchor) && !s.vertices.contains(&anchor)
        })
        .collect()
}

/// Side chosen for a Hassett reduction, or `None` when no candidate has moduli.
pub(crate) fn light_side(graph: &StableGraph, rational_tails_only: bool) -> Option<RationalSide> {
    let cl = graph.classify();
    let candidates = match (rational_tails_only, cl.anchor) {
        (true, Some(anchor)) => anchor_tails(graph, anchor),
        _ => rational_sides(graph),
    };
    candidates
        .into_iter()
        .filter(|s| s.has_moduli(graph))
        .min_by(|x, y| mark_key(&x.marks).cmp(&mark_key(&y.marks)))
}

/// Genus-1 leaves carrying no marks.
pub(crate) fn unmarked_elliptic_tails(graph: &StableGraph) -> Vec<usize> {
    (0..graph.num_vertices())
        .filter(|&v| {
            graph.vertex_genus(v) == 1
                && graph.edge_ends(v) == 1
                && graph.self_edges(v) == 0
                && graph.num_marks_at(v) == 0
        })
        .collect()
}

pub(crate) const REJECT_NO_MARKS: &str = "no marked points";
pub(crate) const REJECT_SMOOTH: &str = "the open stratum is not a boundary stratum";
pub(crate) const REJECT_SELF_NODE: &str = "non-separating node: not of compact type";

pub(crate) fn rejection(graph: &StableGraph) -> Option<&'static str> {
    if graph.num_marks() == 0 {
        Some(REJECT_NO_MARKS)
    } else if graph.is_smooth() {
        Some(REJECT_SMOOTH)
    } else if !graph.is_compact_type() {
        Some(REJECT_SELF_NODE)
    } else {
        None
    }
}

pub(crate) const BLOCK_RATIONAL: &str = "limit:dangling-rational-without-moduli";
pub(crate) const BLOCK_ELLIPTIC: &str = "limit:marked-elliptic-tail";
pub(crate) const BLOCK_OTHER: &str = "limit:no-contracting-morphism";
pub(crate) const BLOCK_INTERSECTION: &str = "limit:intersection-not-precise";

/// The nearest limit of the method for a compact-type stratum no rule covers.
pub(crate) fn blocker(graph: &StableGraph) -> &'static str {
    if !rational_sides(graph).is_empty() {
        BLOCK_RATIONAL
    } else if (0..graph.num_vertices())
        .any(|v| graph.vertex_genus(v) == 1 && graph.edge_ends(v) == 1 && graph.num_marks_at(v) > 0)
    {
        BLOCK_ELLIPTIC
    } else {
        BLOCK_OTHER
    }
}

/// Graphs from the ambient stratum down to `graph`, each one edge deeper.
///
/// The ambient keeps only edge `keep`; the returned list starts with it.
pub(crate) fn contraction_path(graph: &StableGraph, keep: usize) -> Vec<StableGraph> {
    let mut path = vec![graph.clone()];
    let mut current = graph.clone();
    let mut keep = keep;
    while current.num_edges() > 1 {
        let e = if keep == current.num_edges() - 1 {
            current.num_edges() - 2
        } else {
            current.num_edges() - 1
        };
        current = current.contract_edge(EdgeId(e)).expect("edge exists");
        if e < keep {
            keep -= 1;
        }
        path.push(current.clone());
    }
    path.reverse();
    path
}

/// The factor (g_v, n_v) split when passing from `coarse` to `fine`.
pub(crate) fn split_factor(fine: &StableGraph, coarse: &StableGraph) -> Option<[u32; 2]> {
    (0..fine.num_edges()).find_map(|e| {
        let (a, b) = fine.edges()[e];
        let merged = fine.contract_edge(EdgeId(e)).ok()?;
        if !merged.is_isomorphic(coarse) {
            return None;
        }
        let v = a.min(b);
        Some([merged.vertex_genus(v), merged.valence(v) as u32])
    })
}

fn product_node(graph: &StableGraph, keep: usize) -> Arc<CertNode> {
    let path = contraction_path(graph, keep);
    let steps = path
        .windows(2)
        .map(|w| ProductStep {
            graph: w[1].canonical_json(),
            factor: split_factor(&w[1], &w[0]).expect("consecutive graphs differ by one contraction"),
        })
        .collect();
    Arc::new(CertNode::new(
        graph,
        Step::Product(ProductWitness {
            ambient: path[0].canonical_json(),
            steps,
        }),
        Vec::new(),
    ))
}

/// Certificate producer with shared posets and a memo of certified strata.
pub struct Certifier {
    cache: PosetCache,
    memo: Mutex<HashMap<CanonicalCode, Arc<CertNode>>>,
}

impl Default for Certifier {
    fn default() -> Self {
        Self::with_budget(Budget::limit_from_env())
    }
}

impl Certifier {
    pub fn new() -> Self {
        Self::default()
    }

    /// `limit` bounds each poset enumeration behind an intersection witness.
    pub fn with_budget(limit: u64) -> Self {
        Self {
            cache: PosetCache::new(limit),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn budget_limit(&self) -> u64 {
        self.cache.limit()
    }

    pub fn certify(&self, graph: &StableGraph) -> ExtremalityCertificate {
        ExtremalityCertificate::from_root(self.node(graph))
    }

    pub fn check(&self, cert: &ExtremalityCertificate) -> Result<(), CheckFailure> {
        check::Checker::new(&self.cache).check(cert)
    }

    /// Checks that ⋂_{i ∈ marks} π_i⁻¹(π_i(Δ_graph)) has `expected` as its unique maximal stratum.
    pub fn intersection(&self, graph: &StableGraph, marks: &[Mark], expected: &StableGraph) -> IntersectionOutcome {
        intersection_outcome(&self.cache, graph, marks, expected)
    }

    /// The intersection check behind the rule for the chain stratum of `p`.
    pub fn partition_intersection(&self, p: &OrderedPartition) -> Result<IntersectionOutcome, PartitionError> {
        let chain = p.build_chain()?;
        if p.r() == 1 {
            return Ok(IntersectionOutcome::Ok { strata_checked: 0 });
        }
        if !p.is_trivalent() {
            return Err(PartitionError::NotTrivalent);
        }
        let marks: Vec<Mark> = p.tail_marks().into_iter().collect();
        let expected = expected_intersection(&chain, p);
        Ok(self.intersection(&chain, &marks, &expected))
    }

    fn node(&self, graph: &StableGraph) -> Arc<CertNode> {
        let graph = graph.canonical();
        let code = graph.canonical_code();
        if let Some(hit) = self.memo.lock().unwrap().get(&code) {
            return hit.clone();
        }
        let node = Arc::new(self.build(&graph));
        self.memo.lock().unwrap().entry(code).or_insert(node).clone()
    }

    fn build(&self, graph: &StableGraph) -> CertNode {
        if let Some(reason) = rejection(graph) {
            return CertNode::new(
                graph,
                Step::Rejected(RejectedWitness {
                    reason: reason.to_string(),
                }),
                Vec::new(),
            );
        }
        if graph.codim() == 1 {
            return divisor_node(graph);
        }
        let cl = graph.classify();
        if cl.rational_tails {
            if let Some(side) = light_side(graph, true) {
                return contraction_node(graph, &side, Rule::HassettContraction);
            }
            return match chain_shape(graph).filter(OrderedPartition::is_trivalent) {
                Some(p) => self.chain_node(graph, &p),
                None => self.multitail_node(graph),
            };
        }
        if let Some(side) = light_side(graph, false) {
            return contraction_node(graph, &side, Rule::DanglingRational);
        }
        if let Some(&v) = unmarked_elliptic_tails(graph).first() {
            if graph.ambient_genus() >= 2 {
                return elliptic_node(graph, v);
            }
        }
        unknown_node(graph, blocker(graph))
    }

    fn forgetful_witness(
        &self,
        graph: &StableGraph,
        marks: Vec<Mark>,
        expected: &StableGraph,
    ) -> (ForgetfulWitness, Vec<Arc<CertNode>>) {
        let mut survivals = Vec::new();
        let mut children = Vec::new();
        let mut images = Vec::new();
        for &m in &marks {
            let r = forget(graph, m).expect("tail marks can be forgotten");
            let image = r.image_graph.canonical();
            survivals.push(Survival {
                mark: m,
                index: r.index,
                image: image.to_json(),
            });
            images.push(image);
        }
        let nodes: Vec<Arc<CertNode>> = {
            use rayon::prelude::*;
            images.par_iter().map(|img| self.node(img)).collect()
        };
        children.extend(nodes);
        let surviving_pairs = surviving_pairs(graph, &marks);
        let outcome = self.intersection(graph, &marks, expected);
        (
            ForgetfulWitness {
                partition: None,
                tails: Vec::new(),
                marks,
                survivals,
                surviving_pairs,
                intersection: IntersectionWitness {
                    expected: expected.canonical_json(),
                    outcome,
                },
            },
            children,
        )
    }

    fn chain_node(&self, graph: &StableGraph, p: &OrderedPartition) -> CertNode {
        let marks: Vec<Mark> = p.tail_marks().into_iter().collect();
        let expected = expected_intersection(graph, p);
        let (mut witness, mut children) = self.forgetful_witness(graph, marks, &expected);
        witness.partition = Some(p.to_string());
        if !witness.intersection.outcome.is_ok() && !is_unverified(&witness.intersection.outcome) {
            return unknown_node(graph, BLOCK_INTERSECTION);
        }
        if p.r() == 2 {
            let chain = p.build_chain().expect("valid chain");
            let iso = chain.isomorphism(graph).expect("chain matches stratum");
            // the anchor edge of the built chain is edge 0, between vertices 0 and 1
            let (a, b) = (iso[0], iso[1]);
            let keep = graph
                .edges()
                .iter()
                .position(|&(x, y)| (x, y) == (a.min(b), a.max(b)))
                .expect("anchor edge present");
            children.push(product_node(graph, keep));
            CertNode::new(graph, Step::ChainCodim2(witness), children)
        } else {
            CertNode::new(graph, Step::Chain(witness), children)
        }
    }

    fn multitail_node(&self, graph: &StableGraph) -> CertNode {
        let cl = graph.classify();
        let marks: Vec<Mark> = (1..=graph.num_marks() as Mark)
            .filter(|&m| graph.is_trivalent_rational(graph.leg_vertex(m)))
            .collect();
        let (mut witness, children) = self.forgetful_witness(graph, marks, graph);
        witness.tails = cl.tails.iter().map(mark_key).collect();
        if !witness.intersection.outcome.is_ok() && !is_unverified(&witness.intersection.outcome) {
            return unknown_node(graph, BLOCK_INTERSECTION);
        }
        CertNode::new(graph, Step::Multitail(witness), children)
    }
}

fn is_unverified(o: &IntersectionOutcome) -> bool {
    matches!(o, IntersectionOutcome::Unverified { .. })
}

/// Δ_{0;P_1 ∪ P_2} for r = 2, the chain itself otherwise.
pub(crate) fn expected_intersection(chain: &StableGraph, p: &OrderedPartition) -> StableGraph {
    if p.r() == 2 {
        let t = p.tail_marks();
        StableGraph::divisor(p.genus(), p.num_marks(), 0, &t).expect("tail divisor is stable")
    } else {
        chain.clone()
    }
}

/// Pairs {i, j} of `marks` with π_j ∘ π_i preserving dimension.
pub(crate) fn surviving_pairs(graph: &StableGraph, marks: &[Mark]) -> Vec<[Mark; 2]> {
    let mut out = Vec::new();
    for (k, &i) in marks.iter().enumerate() {
        for &j in &marks[k + 1..] {
            let first = forget(graph, i).expect("mark exists");
            if first.index != 0 {
                continue;
            }
            let second = forget(&first.image_graph, if j > i { j - 1 } else { j }).expect("mark exists");
            if second.index == 0 {
                out.push([i, j]);
            }
        }
    }
    out
}

/// (h, S) with Δ_{h;S} ≅ `graph`, taking the smaller of the two descriptions.
pub(crate) fn divisor_spec(graph: &StableGraph) -> (u32, BTreeSet<Mark>) {
    let sides = [0usize, 1].map(|v| (graph.vertex_genus(v), graph.marks_on(&[v])));
    sides
        .into_iter()
        .min_by(|x, y| (x.0, mark_key(&x.1)).cmp(&(y.0, mark_key(&y.1))))
        .expect("two sides")
}

fn divisor_node(graph: &StableGraph) -> CertNode {
    let (h, s) = divisor_spec(graph);
    CertNode::new(
        graph,
        Step::Divisor(DivisorWitness {
            h,
            marks: mark_key(&s),
        }),
        Vec::new(),
    )
}

fn contraction_node(graph: &StableGraph, side: &RationalSide, rule: Rule) -> CertNode {
    let n = graph.num_marks();
    let weights = WeightData::light_tail(n, &side.marks);
    let r = hassett_reduce(graph, &weights).expect("light-tail weights are admissible");
    let divisor = StableGraph::divisor(graph.ambient_genus(), n, 0, &side.marks).expect("tail divisor is stable");
    let witness = ContractionWitness {
        tail: mark_key(&side.marks),
        weights: weights.to_json().weights,
        index: r.index,
        in_exceptional_locus: r.in_exceptional_locus,
        exceptional_divisor: divisor.canonical_json(),
    };
    let step = match rule {
        Rule::HassettContraction => Step::HassettContraction(witness),
        _ => Step::DanglingRational(witness),
    };
    CertNode::new(graph, step, vec![product_node(graph, side.edge)])
}

fn elliptic_node(graph: &StableGraph, v: usize) -> CertNode {
    let r = pseudostable_contract(graph).expect("n >= 1 and g >= 2");
    debug_assert!(matches!(r.detail, ImageDetail::Pseudostable { .. }));
    let edge = graph
        .edges()
        .iter()
        .position(|&(a, b)| a == v || b == v)
        .expect("elliptic tail has its node");
    let divisor = StableGraph::divisor(graph.ambient_genus(), graph.num_marks(), 1, &BTreeSet::new())
        .expect("unmarked elliptic divisor is stable");
    CertNode::new(
        graph,
        Step::DanglingElliptic(EllipticWitness {
            elliptic_vertex: v,
            index: r.index,
            in_exceptional_locus: r.in_exceptional_locus,
            exceptional_divisor: divisor.canonical_json(),
        }),
        vec![product_node(graph, edge)],
    )
}

fn unknown_node(graph: &StableGraph, blocker: &str) -> CertNode {
    CertNode::new(
        graph,
        Step::Unknown(UnknownWitness {
            blocker: blocker.to_string(),
        }),
        Vec::new(),
    )
}

/// Certifies `graph` with a fresh [`Certifier`].
pub fn certify(graph: &StableGraph) -> ExtremalityCertificate {
    Certifier::default().certify(graph)
}

/// Re-verifies every witness of `cert` with a fresh [`Certifier`].
pub fn check_certificate(cert: &ExtremalityCertificate) -> Result<(), CheckFailure> {
    Certifier::default().check(cert)
}

/// Intersection check for the chain stratum of `p` with a fresh [`Certifier`].
pub fn intersection_witness(p: &OrderedPartition) -> Result<IntersectionOutcome, PartitionError> {
    Certifier::default().partition_intersection(p)
}

#[cfg(test)]
mod tests;
