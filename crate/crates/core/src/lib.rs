//! Boundary strata of M̄_{g,n}: dual graphs, the degeneration poset, the
//! standard morphisms out of M̄_{g,n}, and checkable extremality certificates.

pub mod budget;
pub mod canon;
pub mod certify;
pub mod graph;
pub mod json;
pub mod morphism;
pub mod oracle;
pub mod partition;
pub mod poset;

pub use budget::{Budget, BudgetExceeded, BUDGET_ENV, DEFAULT_BUDGET};
pub use canon::CanonicalCode;
pub use certify::{
    check_certificate, intersection_witness, CertNode, Certifier, CheckFailure, ContractionWitness,
    DivisorWitness, EllipticWitness, ExtremalityCertificate, ForgetfulWitness, IntersectionOutcome,
    IntersectionWitness, ProductStep, ProductWitness, RejectedWitness, Rule, Step, Survival,
    UnknownWitness, Verdict, CITATION_MISMATCH, INDEX_NOT_POSITIVE, INSUFFICIENT_MARKS,
};
pub use graph::{Classification, EdgeId, GraphError, Mark, StableGraph, Violation};
pub use json::{FormatError, GraphJson, SCHEMA_VERSION};
pub use morphism::{
    forget, hassett_reduce, index_of, pseudostable_contract, ImageResult, MorphismDescriptor,
    MorphismError, WeightData,
};
pub use oracle::{OracleReport, OracleVerdict};
pub use partition::{chain_shape, OrderedPartition, PartitionError};
pub use poset::{contains, degenerations, PosetError, StrataPoset};

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::{Mark, StableGraph};

    /// Genus-g anchor with {3,6}, then a path through {2}, {1,5}, {4,7}.
    pub fn long_tail(g: u32) -> StableGraph {
        StableGraph::from_parts(
            g,
            &[(g, &[3, 6]), (0, &[2]), (0, &[1, 5]), (0, &[4, 7])],
            &[(0, 1), (1, 2), (2, 3)],
        )
        .unwrap()
    }

    /// Trivalent chain: anchor with `p0`, then {1}, ..., {r-1}, {r, r+1}.
    pub fn trivalent_chain(g: u32, r: usize, p0: &[Mark]) -> StableGraph {
        let mut parts: Vec<Vec<Mark>> = vec![p0.to_vec()];
        parts.extend((1..r as Mark).map(|m| vec![m]));
        parts.push(vec![r as Mark, r as Mark + 1]);
        let vertices: Vec<(u32, &[Mark])> = parts
            .iter()
            .enumerate()
            .map(|(i, p)| (if i == 0 { g } else { 0 }, p.as_slice()))
            .collect();
        let edges: Vec<(usize, usize)> = (0..r).map(|i| (i, i + 1)).collect();
        StableGraph::from_parts(g, &vertices, &edges).unwrap()
    }
}
