//! Ordered partitions P° = (P_0, P_1, ..., P_r) of the marks and their chain strata.
//!
//! The chain stratum of P° is a path: the anchor of genus g carrying P_0,
//! followed by r rational vertices carrying P_1, ..., P_r in order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{EdgeId, Mark, StableGraph, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: &'static str },
    #[error("at offset {offset}: mark {mark} appears in more than one part")]
    Overlap { offset: usize, mark: Mark },
    #[error("at offset {offset}: mark 0 is not a valid label")]
    ZeroMark { offset: usize },
    #[error("parts do not cover 1..={n}: mark {missing} is missing")]
    NotCovering { n: usize, missing: Mark },
    #[error("part {index} is empty; only P_0 may be empty")]
    EmptyPart { index: usize },
    #[error("an ordered partition needs P_0 and at least one further part")]
    TooFewParts,
    #[error("the last part must have at least two marks")]
    LastPartTooSmall,
    #[error("the chain is not trivalent: inner parts need one mark and the last part two")]
    NotTrivalent,
    #[error(transparent)]
    Unstable(#[from] Violation),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    genus: u32,
    parts: Vec<BTreeSet<Mark>>,
}

impl OrderedPartition {
    pub fn new(genus: u32, parts: Vec<BTreeSet<Mark>>) -> Result<Self, PartitionError> {
        if parts.len() < 2 {
            return Err(PartitionError::TooFewParts);
        }
        if let Some(index) = (1..parts.len()).find(|&i| parts[i].is_empty()) {
            return Err(PartitionError::EmptyPart { index });
        }
        if parts[parts.len() - 1].len() < 2 {
            return Err(PartitionError::LastPartTooSmall);
        }
        let mut seen = BTreeSet::new();
        for part in &parts {
            for &m in part {
                if m == 0 {
                    return Err(PartitionError::ZeroMark { offset: 0 });
                }
                if !seen.insert(m) {
                    return Err(PartitionError::Overlap { offset: 0, mark: m });
                }
            }
        }
        let n = seen.len();
        if let Some(missing) = (1..=n as Mark).find(|m| !seen.contains(m)) {
            return Err(PartitionError::NotCovering { n, missing });
        }
        Ok(Self { genus, parts })
    }

    pub fn from_slices(genus: u32, parts: &[&[Mark]]) -> Result<Self, PartitionError> {
        Self::new(
            genus,
            parts.iter().map(|p| p.iter().copied().collect()).collect(),
        )
    }

    /// Parses `({3,6},{2},{1,5},{4,7})`; an empty P_0 may be written `{}` or `∅`.
    pub fn parse(genus: u32, text: &str) -> Result<Self, PartitionError> {
        let parts = Parser::new(text).partition()?;
        Self::new(genus, parts)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_marks(&self) -> usize {
        self.parts.iter().map(BTreeSet::len).sum()
    }

    /// Number of rational parts, equal to the codimension of the chain.
    pub fn r(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn parts(&self) -> &[BTreeSet<Mark>] {
        &self.parts
    }

    /// Marks on the rational chain, P_1 ∪ ... ∪ P_r.
    pub fn tail_marks(&self) -> BTreeSet<Mark> {
        self.parts[1..].iter().flatten().copied().collect()
    }

    /// |P_1| = ... = |P_{r-1}| = 1 and |P_r| = 2: every chain vertex is trivalent.
    pub fn is_trivalent(&self) -> bool {
        let r = self.r();
        self.parts[1..r].iter().all(|p| p.len() == 1) && self.parts[r].len() == 2
    }

    pub fn build_chain(&self) -> Result<StableGraph, Violation> {
        let n = self.num_marks();
        let mut legs = vec![0; n];
        for (v, part) in self.parts.iter().enumerate() {
            for &m in part {
                legs[m as usize - 1] = v;
            }
        }
        let mut genera = vec![0; self.parts.len()];
        genera[0] = self.genus;
        let edges = (0..self.r()).map(|i| (i, i + 1)).collect();
        StableGraph::new(self.genus, genera, edges, legs)
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let marks: Vec<String> = part.iter().map(Mark::to_string).collect();
            write!(f, "{{{}}}", marks.join(","))?;
        }
        write!(f, ")")
    }
}

/// Recovers P° when `graph` is a chain stratum.
///
/// In genus 0 either end of the path can serve as the anchor; the orientation
/// with the lexicographically smaller part sequence is returned.
pub fn chain_shape(graph: &StableGraph) -> Option<OrderedPartition> {
    if graph.is_smooth() || !graph.is_compact_type() {
        return None;
    }
    let nv = graph.num_vertices();
    let degree = |v: usize| graph.edge_ends(v);
    if (0..nv).any(|v| degree(v) > 2) {
        return None;
    }
    let ends: Vec<usize> = (0..nv).filter(|&v| degree(v) == 1).collect();
    let candidates: Vec<usize> = ends
        .into_iter()
        .filter(|&a| (0..nv).all(|v| v == a || graph.vertex_genus(v) == 0))
        .filter(|&a| graph.vertex_genus(a) == graph.ambient_genus())
        .collect();
    let mut best: Option<OrderedPartition> = None;
    for anchor in candidates {
        let mut order = vec![anchor];
        let mut prev = usize::MAX;
        let mut current = anchor;
        while order.len() < nv {
            let next = graph
                .edges()
                .iter()
                .filter_map(|&(a, b)| {
                    if a == current && b != prev {
                        Some(b)
                    } else if b == current && a != prev {
                        Some(a)
                    } else {
                        None
                    }
                })
                .next()?;
            prev = current;
            current = next;
            order.push(next);
        }
        let parts = order
            .iter()
            .map(|&v| graph.marks_at(v).into_iter().collect())
            .collect();
        if let Ok(p) = OrderedPartition::new(graph.ambient_genus(), parts) {
            let better = match &best {
                None => true,
                Some(b) => {
                    let key = |q: &OrderedPartition| -> Vec<Vec<Mark>> {
                        q.parts.iter().map(|s| s.iter().copied().collect()).collect()
                    };
                    key(&p) < key(b)
                }
            };
            if better {
                best = Some(p);
            }
        }
    }
    best
}

/// Contracting the anchor-adjacent edge of a chain absorbs P_1 into the anchor.
pub fn absorb_first_part(p: &OrderedPartition) -> Result<StableGraph, Violation> {
    let chain = p.build_chain()?;
    Ok(chain.contract_edge(EdgeId(0)).expect("chain has an anchor edge"))
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), PartitionError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(PartitionError::Syntax {
                offset: self.pos,
                expected,
            })
        }
    }

    fn partition(&mut self) -> Result<Vec<BTreeSet<Mark>>, PartitionError> {
        self.expect('(', "'('")?;
        let mut parts = Vec::new();
        let mut seen = BTreeSet::new();
        loop {
            parts.push(self.part(&mut seen)?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    return Err(PartitionError::Syntax {
                        offset: self.pos,
                        expected: "',' or ')'",
                    })
                }
            }
        }
        self.skip_ws();
        if self.pos != self.text.len() {
            return Err(PartitionError::Syntax {
                offset: self.pos,
                expected: "end of input",
            });
        }
        Ok(parts)
    }

    fn part(&mut self, seen: &mut BTreeSet<Mark>) -> Result<BTreeSet<Mark>, PartitionError> {
        self.skip_ws();
        if self.peek() == Some('∅') {
            self.pos += '∅'.len_utf8();
            return Ok(BTreeSet::new());
        }
        self.expect('{', "'{' or '∅'")?;
        let mut part = BTreeSet::new();
        self.skip_ws();
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(part);
        }
        loop {
            self.skip_ws();
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(PartitionError::Syntax {
                    offset: start,
                    expected: "a mark label",
                });
            }
            let mark = Mark::from_str(&self.text[start..self.pos]).map_err(|_| {
                PartitionError::Syntax {
                    offset: start,
                    expected: "a mark label that fits in 32 bits",
                }
            })?;
            if mark == 0 {
                return Err(PartitionError::ZeroMark { offset: start });
            }
            if !seen.insert(mark) {
                return Err(PartitionError::Overlap {
                    offset: start,
                    mark,
                });
            }
            part.insert(mark);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(part);
                }
                _ => {
                    return Err(PartitionError::Syntax {
                        offset: self.pos,
                        expected: "',' or '}'",
                    })
                }
            }
        }
    }
}
