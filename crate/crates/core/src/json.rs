//! JSON interchange format for dual graphs.
//!
//! ```json
//! {"g":1,"n":2,"vertices":[{"id":"v0","genus":1},{"id":"v1","genus":0}],
//!  "edges":[["v0","v1"]],"legs":{"1":"v1","2":"v1"}}
//! ```
//!
//! Vertex ids carry no meaning. Output always uses `v0, v1, ...` in the vertex
//! order of the graph being written, which for canonical graphs makes the
//! serialization an isomorphism-class identity.

use std::collections::{BTreeMap, HashMap};

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{Mark, StableGraph, Violation};

/// Version stamped into every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    pub genus: u32,
}

/// Unvalidated dual graph as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub g: u32,
    pub n: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<(String, String)>,
    pub legs: Legs,
}

/// Mark label to vertex id, serialized with keys in numeric order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Legs(pub BTreeMap<Mark, String>);

impl Serialize for Legs {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (mark, id) in &self.0 {
            map.serialize_entry(&mark.to_string(), id)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Legs {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(deserializer)?;
        let mut legs = BTreeMap::new();
        for (key, id) in raw {
            let mark: Mark = key
                .parse()
                .map_err(|_| D::Error::custom(format!("leg label {key:?} is not an integer")))?;
            legs.insert(mark, id);
        }
        Ok(Legs(legs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("\"n\" is {declared} but {found} legs are listed")]
    LegCount { declared: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] Violation),
}

impl GraphJson {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let graph: GraphJson =
            serde_json::from_str(text).map_err(|e| FormatError::Syntax(e.to_string()))?;
        match graph.schema_version {
            Some(v) if v != SCHEMA_VERSION => Err(FormatError::SchemaVersion(v)),
            _ => Ok(graph),
        }
    }

    /// Resolves ids to raw parts, stopping before the stability checks.
    fn resolve(&self) -> Result<(Vec<u32>, Vec<(usize, usize)>, Vec<usize>), FormatError> {
        let mut index = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.id.as_str(), i).is_some() {
                return Err(FormatError::DuplicateVertex(v.id.clone()));
            }
        }
        let lookup = |id: &String| {
            index
                .get(id.as_str())
                .copied()
                .ok_or_else(|| FormatError::UnknownVertex(id.clone()))
        };
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        if self.legs.0.len() != self.n {
            return Err(FormatError::LegCount {
                declared: self.n,
                found: self.legs.0.len(),
            });
        }
        let mut legs = Vec::with_capacity(self.n);
        for (expected, (&mark, id)) in (1..).zip(self.legs.0.iter()) {
            if mark != expected {
                return Err(Violation::LegLabels {
                    n: self.n,
                    detail: format!("label {expected} missing"),
                }
                .into());
            }
            legs.push(lookup(id)?);
        }
        let genera = self.vertices.iter().map(|v| v.genus).collect();
        Ok((genera, edges, legs))
    }

    /// Checks every invariant; `Ok` iff [`GraphJson::to_graph`] would succeed.
    pub fn validate(&self) -> Result<(), FormatError> {
        self.to_graph().map(|_| ())
    }

    pub fn to_graph(&self) -> Result<StableGraph, FormatError> {
        let (genera, edges, legs) = self.resolve()?;
        Ok(StableGraph::new(self.g, genera, edges, legs)?)
    }
}

impl From<&StableGraph> for GraphJson {
    fn from(graph: &StableGraph) -> Self {
        let id = |v: usize| format!("v{v}");
        GraphJson {
            schema_version: Some(SCHEMA_VERSION),
            g: graph.ambient_genus(),
            n: graph.num_marks(),
            vertices: graph
                .genera()
                .iter()
                .enumerate()
                .map(|(v, &genus)| VertexJson { id: id(v), genus })
                .collect(),
            edges: graph.edges().iter().map(|&(a, b)| (id(a), id(b))).collect(),
            legs: Legs(
                graph
                    .legs()
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (i as Mark + 1, id(v)))
                    .collect(),
            ),
        }
    }
}

impl StableGraph {
    pub fn to_json(&self) -> GraphJson {
        GraphJson::from(self)
    }

    /// JSON of the canonical representative.
    pub fn canonical_json(&self) -> GraphJson {
        GraphJson::from(&self.canonical())
    }

    /// Hex SHA-256 of the canonical JSON, used as a stable node label.
    pub fn canonical_hash(&self) -> String {
        let text = serde_json::to_string(&self.canonical_json()).expect("graph serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DIVISOR: &str = r#"{"g":2,"n":4,"vertices":[{"id":"a","genus":0},{"id":"b","genus":2}],
        "edges":[["a","b"]],"legs":{"1":"a","2":"a","3":"a","4":"b"}}"#;

    #[test]
    fn parses_and_validates() {
        let j = GraphJson::parse(DIVISOR).unwrap();
        let g = j.to_graph().unwrap();
        assert_eq!(g.codim(), 1);
        assert_eq!(g.marks_at(0), vec![1, 2, 3]);
    }

    #[test]
    fn reports_format_errors() {
        let bad = DIVISOR.replace("[\"a\",\"b\"]", "[\"a\",\"z\"]");
        assert_eq!(
            GraphJson::parse(&bad).unwrap().validate(),
            Err(FormatError::UnknownVertex("z".into()))
        );
        let bad = DIVISOR.replace("\"n\":4", "\"n\":5");
        assert!(matches!(
            GraphJson::parse(&bad).unwrap().validate(),
            Err(FormatError::LegCount { .. })
        ));
        let bad = DIVISOR.replace("\"4\":\"b\"", "\"5\":\"b\"");
        assert!(matches!(
            GraphJson::parse(&bad).unwrap().validate(),
            Err(FormatError::Invalid(Violation::LegLabels { .. }))
        ));
        assert!(matches!(GraphJson::parse("{"), Err(FormatError::Syntax(_))));
    }

    #[test]
    fn unstable_graph_is_reported_as_violation() {
        let text = r#"{"g":0,"n":1,"vertices":[{"id":"x","genus":0}],"edges":[],"legs":{"1":"x"}}"#;
        assert!(matches!(
            GraphJson::parse(text).unwrap().validate(),
            Err(FormatError::Invalid(Violation::Unstable { .. }))
        ));
    }

    #[test]
    fn legs_serialize_in_numeric_order() {
        let g = StableGraph::smooth(0, 11).unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let ten = text.find("\"10\"").unwrap();
        let nine = text.find("\"9\"").unwrap();
        assert!(nine < ten);
    }

    fn arbitrary_tree() -> impl Strategy<Value = StableGraph> {
        // random genus-0/1 trees built by attaching vertices, with stabilizing marks
        (1usize..5, proptest::collection::vec(0usize..8, 0..4), 0u32..2).prop_map(
            |(extra, parents, g)| {
                let nv = 1 + parents.len().min(extra);
                let mut edges = Vec::new();
                for (i, &p) in parents.iter().take(nv - 1).enumerate() {
                    edges.push((p % (i + 1), i + 1));
                }
                let mut genera = vec![0; nv];
                genera[0] = g;
                let mut legs = Vec::new();
                for v in 0..nv {
                    let deg = edges.iter().filter(|&&(a, b)| a == v || b == v).count();
                    let need = (3i64 - 2 * genera[v] as i64 - deg as i64).max(1) as usize;
                    legs.extend(std::iter::repeat_n(v, need));
                }
                StableGraph::new(g, genera, edges, legs).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless_up_to_canonical_form(g in arbitrary_tree()) {
            let text = serde_json::to_string(&g.to_json()).unwrap();
            let back = GraphJson::parse(&text).unwrap().to_graph().unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.canonical_json(), g.canonical_json());
        }
    }
}
