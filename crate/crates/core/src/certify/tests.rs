use super::{CITATION_MISMATCH, INDEX_NOT_POSITIVE, INSUFFICIENT_MARKS};
use super::*;
use crate::fixtures;

fn certifier() -> Certifier {
    Certifier::with_budget(crate::budget::DEFAULT_BUDGET)
}

fn set(marks: &[Mark]) -> BTreeSet<Mark> {
    marks.iter().copied().collect()
}

#[test]
fn long_tail_is_certified_by_hassett_contraction() {
    let c = certifier();
    for g in 1..3 {
        let cert = c.certify(&fixtures::long_tail(g));
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.root.rule(), Rule::HassettContraction);
        assert!(cert.pseudoeffective);
        let Step::HassettContraction(w) = &cert.root.step else {
            panic!("wrong step")
        };
        assert_eq!(w.tail, vec![1, 2, 4, 5, 7]);
        assert_eq!(w.weights, vec!["1/5", "1/5", "1", "1/5", "1/5", "1", "1/5"]);
        assert_eq!(w.index, 1);
        assert_eq!(cert.root.children.len(), 1);
        assert_eq!(cert.root.children[0].rule(), Rule::Product);
        assert_eq!(c.check(&cert), Ok(()));
    }
}

#[test]
fn trivalent_chain_recurses_down_to_codim_two() {
    let c = certifier();
    let r = 4;
    let cert = c.certify(&fixtures::trivalent_chain(1, r, &[6, 7]));
    assert_eq!(cert.verdict, Verdict::Certified);
    assert_eq!(cert.root.rule(), Rule::Chain);
    assert!(!cert.pseudoeffective);
    let mut chain_levels = 0;
    let mut node = cert.root.clone();
    while node.rule() == Rule::Chain {
        chain_levels += 1;
        node = node.children[0].clone();
    }
    assert_eq!(chain_levels, r - 2);
    assert_eq!(node.rule(), Rule::ChainCodim2);
    assert!(node.children.iter().take(3).all(|c| c.rule() == Rule::Divisor));
    assert_eq!(c.check(&cert), Ok(()));
}

#[test]
fn codim_two_chain_intersects_to_the_tail_divisor() {
    let c = certifier();
    let chain = OrderedPartition::from_slices(1, &[&[4, 5], &[1], &[2, 3]]).unwrap();
    let cert = c.certify(&chain.build_chain().unwrap());
    assert_eq!(cert.root.rule(), Rule::ChainCodim2);
    let Step::ChainCodim2(w) = &cert.root.step else {
        panic!("wrong step")
    };
    assert_eq!(w.marks, vec![1, 2, 3]);
    let tail = StableGraph::divisor(1, 5, 0, &set(&[1, 2, 3])).unwrap();
    assert_eq!(w.intersection.expected, tail.canonical_json());
    assert!(w.intersection.outcome.is_ok());
    assert_eq!(c.check(&cert), Ok(()));
}

#[test]
fn intersection_witness_examples() {
    let c = certifier();
    let p = OrderedPartition::from_slices(1, &[&[4, 5], &[1], &[2, 3]]).unwrap();
    assert!(c.partition_intersection(&p).unwrap().is_ok());
    let p = OrderedPartition::parse(1, "({},{1},{2},{3,4})").unwrap();
    assert!(c.partition_intersection(&p).unwrap().is_ok());
    let p = OrderedPartition::from_slices(1, &[&[1, 2], &[3, 4]]).unwrap();
    assert!(c.partition_intersection(&p).unwrap().is_ok());
    let p = OrderedPartition::from_slices(1, &[&[4], &[1, 2, 3]]).unwrap();
    assert!(c.partition_intersection(&p).unwrap().is_ok());
    let p = OrderedPartition::from_slices(1, &[&[4], &[1, 2], &[3, 5]]).unwrap();
    assert_eq!(c.partition_intersection(&p), Err(PartitionError::NotTrivalent));
}

#[test]
fn intersection_fails_for_the_wrong_target() {
    let c = certifier();
    let p = OrderedPartition::parse(1, "({},{1},{2},{3,4})").unwrap();
    let chain = p.build_chain().unwrap();
    let wrong = StableGraph::divisor(1, 4, 0, &set(&[1, 2, 3, 4])).unwrap();
    assert!(matches!(
        c.intersection(&chain, &[1, 2, 3, 4], &wrong),
        IntersectionOutcome::Counterexample { .. }
    ));
}

#[test]
fn tiny_budget_leaves_the_intersection_unverified() {
    let c = Certifier::with_budget(5);
    let cert = c.certify(&fixtures::trivalent_chain(1, 3, &[5]));
    let Step::Chain(w) = &cert.root.step else {
        panic!("wrong step")
    };
    assert!(matches!(w.intersection.outcome, IntersectionOutcome::Unverified { .. }));
    assert_eq!(cert.verdict, Verdict::Certified);
    assert_eq!(c.check(&cert), Ok(()));
    assert_eq!(certifier().check(&cert), Ok(()));
}

#[test]
fn recorded_counterexample_is_rejected() {
    let c = certifier();
    let cert = c.certify(&fixtures::trivalent_chain(1, 3, &[5]));
    let bad = modify(&cert, |root| {
        if let Step::Chain(w) = &mut root.step {
            w.intersection.outcome = IntersectionOutcome::Counterexample { maximal: Vec::new() };
        }
    });
    assert_eq!(c.check(&bad).unwrap_err().reason, "intersection not precise");
}

#[test]
fn two_tails_without_moduli_use_multitail() {
    let c = certifier();
    let g = StableGraph::from_parts(1, &[(1, &[]), (0, &[1, 2]), (0, &[3, 4])], &[(0, 1), (0, 2)]).unwrap();
    let cert = c.certify(&g);
    assert_eq!(cert.root.rule(), Rule::Multitail);
    let Step::Multitail(w) = &cert.root.step else {
        panic!("wrong step")
    };
    assert_eq!(w.marks, vec![1, 2, 3, 4]);
    assert!(!w.surviving_pairs.contains(&[1, 2]));
    assert!(w.surviving_pairs.contains(&[1, 3]));
    assert_eq!(c.check(&cert), Ok(()));
}

#[test]
fn branching_single_tail_is_multitail() {
    let c = certifier();
    let g = StableGraph::from_parts(
        1,
        &[(1, &[]), (0, &[]), (0, &[1, 2]), (0, &[3, 4])],
        &[(0, 1), (1, 2), (1, 3)],
    )
    .unwrap();
    assert!(g.is_trivalent_rational(1));
    assert_eq!(g.classify().tails.len(), 1);
    let cert = c.certify(&g);
    assert_eq!(cert.root.rule(), Rule::Multitail);
    assert_eq!(c.check(&cert), Ok(()));
}

#[test]
fn genus_zero_routes() {
    let c = certifier();
    let div = StableGraph::divisor(0, 5, 0, &set(&[1, 2])).unwrap();
    assert_eq!(c.certify(&div).root.rule(), Rule::Divisor);
    let moduli = StableGraph::from_parts(0, &[(0, &[1, 2]), (0, &[3, 4, 5])], &[(0, 1)]).unwrap();
    assert_eq!(c.certify(&moduli).root.rule(), Rule::Divisor);
    let hassett = StableGraph::from_parts(0, &[(0, &[1, 2]), (0, &[3]), (0, &[4, 5, 6])], &[(0, 1), (1, 2)]).unwrap();
    let cert = c.certify(&hassett);
    assert_eq!(cert.root.rule(), Rule::HassettContraction);
    assert_eq!(c.check(&cert), Ok(()));
    let comb = StableGraph::from_parts(0, &[(0, &[1, 2]), (0, &[3]), (0, &[4, 5])], &[(0, 1), (1, 2)]).unwrap();
    let cert = c.certify(&comb);
    assert_eq!(cert.root.rule(), Rule::ChainCodim2);
    assert_eq!(c.check(&cert), Ok(()));
}

#[test]
fn dangling_rules() {
    let c = certifier();
    let elliptic = StableGraph::from_parts(2, &[(1, &[]), (1, &[1]), (0, &[2, 3])], &[(0, 1), (1, 2)]).unwrap();
    let cert = c.certify(&elliptic);
    assert_eq!(cert.root.rule(), Rule::DanglingElliptic);
    assert!(cert.pseudoeffective);
    assert_eq!(c.check(&cert), Ok(()));

    let rational = StableGraph::from_parts(2, &[(1, &[1]), (1, &[]), (0, &[2, 3, 4])], &[(0, 1), (1, 2)]).unwrap();
    let cert = c.certify(&rational);
    assert_eq!(cert.root.rule(), Rule::DanglingRational);
    assert!(cert.pseudoeffective);
    let Step::DanglingRational(w) = &cert.root.step else {
        panic!("wrong step")
    };
    assert_eq!(w.tail, vec![2, 3, 4]);
    assert_eq!(w.index, 1);
    assert_eq!(c.check(&cert), Ok(()));
}

#[test]
fn marked_elliptic_tails_are_unknown() {
    let c = certifier();
    let g = StableGraph::from_parts(3, &[(1, &[1]), (1, &[]), (1, &[2])], &[(0, 1), (1, 2)]).unwrap();
    let cert = c.certify(&g);
    assert_eq!(cert.verdict, Verdict::Unknown);
    assert_eq!(cert.root.citation, "conjecture:all-boundary-strata-extremal");
    assert_eq!(cert.root.step, Step::Unknown(UnknownWitness { blocker: BLOCK_ELLIPTIC.into() }));
    assert!(!cert.pseudoeffective);
    assert_eq!(c.check(&cert), Ok(()));

    let g = StableGraph::from_parts(2, &[(1, &[1]), (1, &[]), (0, &[2, 3])], &[(0, 1), (1, 2)]).unwrap();
    let cert = c.certify(&g);
    assert_eq!(cert.verdict, Verdict::Unknown);
    assert_eq!(cert.root.step, Step::Unknown(UnknownWitness { blocker: BLOCK_RATIONAL.into() }));
}

#[test]
fn out_of_scope_strata_are_rejected() {
    let c = certifier();
    let loop_graph = StableGraph::from_parts(1, &[(0, &[1])], &[(0, 0)]).unwrap();
    let no_marks = StableGraph::divisor(2, 0, 1, &BTreeSet::new()).unwrap();
    let smooth = StableGraph::smooth(1, 2).unwrap();
    for (g, reason) in [
        (loop_graph, REJECT_SELF_NODE),
        (no_marks, REJECT_NO_MARKS),
        (smooth, REJECT_SMOOTH),
    ] {
        let cert = c.certify(&g);
        assert_eq!(cert.verdict, Verdict::Rejected);
        assert_eq!(cert.root.step, Step::Rejected(RejectedWitness { reason: reason.into() }));
        assert_eq!(c.check(&cert), Ok(()));
    }
}

fn modify(cert: &ExtremalityCertificate, edit: impl FnOnce(&mut CertNode)) -> ExtremalityCertificate {
    let mut out = cert.clone();
    edit(Arc::make_mut(&mut out.root));
    out
}

#[test]
fn identity_weights_are_rejected() {
    let c = certifier();
    let cert = c.certify(&fixtures::long_tail(2));
    let bad = modify(&cert, |root| {
        if let Step::HassettContraction(w) = &mut root.step {
            w.weights = vec!["1".into(); 7];
        }
    });
    let failure = c.check(&bad).unwrap_err();
    assert_eq!(failure.reason, INDEX_NOT_POSITIVE);
    assert_eq!(failure.path, "root");
}

#[test]
fn dropped_mark_is_rejected() {
    let c = certifier();
    let cert = c.certify(&fixtures::trivalent_chain(1, 3, &[5]));
    let bad = modify(&cert, |root| {
        if let Step::Chain(w) = &mut root.step {
            w.marks.pop();
            w.survivals.pop();
        }
        root.children.pop();
    });
    assert_eq!(c.check(&bad).unwrap_err().reason, INSUFFICIENT_MARKS);
}

#[test]
fn wrong_citation_is_rejected() {
    let c = certifier();
    let cert = c.certify(&fixtures::trivalent_chain(1, 3, &[5]));
    let bad = modify(&cert, |root| {
        let child = Arc::make_mut(&mut root.children[0]);
        child.citation = Rule::HassettContraction.citation().into();
    });
    let failure = c.check(&bad).unwrap_err();
    assert_eq!(failure.reason, CITATION_MISMATCH);
    assert_eq!(failure.path, "root/children[0]");
}

#[test]
fn flags_and_verdicts_are_rechecked() {
    let c = certifier();
    let cert = c.certify(&fixtures::trivalent_chain(1, 3, &[5]));
    let mut bad = cert.clone();
    bad.pseudoeffective = true;
    assert_eq!(c.check(&bad).unwrap_err().reason, "pseudoeffective flag mismatch");
    let mut bad = cert.clone();
    bad.verdict = Verdict::Unknown;
    assert_eq!(c.check(&bad).unwrap_err().reason, "verdict mismatch");
}

#[test]
fn certificates_round_trip_and_are_deterministic() {
    let graph = fixtures::trivalent_chain(1, 3, &[5]);
    let a = certifier().certify(&graph).to_json_string();
    let b = certifier().certify(&graph.permuted(&[3, 1, 0, 2])).to_json_string();
    assert_eq!(a, b);
    let parsed = ExtremalityCertificate::parse(&a).unwrap();
    assert_eq!(parsed.to_json_string(), a);
    assert_eq!(certifier().check(&parsed), Ok(()));
    let value: serde_json::Value = serde_json::from_str(&a).unwrap();
    for key in ["verdict", "rule", "citation", "witnesses", "children", "pseudoeffective", "stratum"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn multitail_always_has_four_surviving_marks() {
    let c = certifier();
    for (g, n) in [(1usize, 4usize), (1, 5), (2, 4)] {
        let p = crate::poset::StrataPoset::enumerate_full(g as u32, n, &Budget::unlimited()).unwrap();
        for graph in p.nodes() {
            let cl = graph.classify();
            let trivalent = (0..graph.num_vertices()).all(|v| graph.vertex_genus(v) > 0 || graph.valence(v) == 3);
            if cl.rational_tails && trivalent && graph.codim() >= 2 && chain_shape(graph).is_none() {
                let marks = (1..=n as Mark)
                    .filter(|&m| graph.is_trivalent_rational(graph.leg_vertex(m)))
                    .count();
                assert!(marks >= 4, "{graph:?}");
                assert_eq!(c.certify(graph).root.rule(), Rule::Multitail);
            }
        }
    }
}
