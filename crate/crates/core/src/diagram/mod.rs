//! Upright long-knot diagrams: data model, PD/DT front ends, conversion and moves.

mod dt;
mod embedding;
mod moves;
mod pd;
pub mod samples;
mod upright;

pub use dt::{parse_dt, DtError};
pub use embedding::{check_embedding, faces, is_realizable, EmbeddingError, Face};
pub use moves::{apply_move, enumerate_move_sites, Direction, MoveError, MoveKind, MoveSpec};
pub use pd::{parse_pd, PdCode, PdError};
pub use upright::{pd_to_upright, pd_to_upright_with_cut, UprightError};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A crossing: sign `s`, incoming over-strand edge `i`, incoming under-strand edge `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Crossing {
    pub s: i32,
    pub i: i64,
    pub j: i64,
}

impl Crossing {
    pub fn new(s: i32, i: i64, j: i64) -> Self {
        Self { s, i, j }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("a diagram needs at least one edge")]
    NoEdges,
    #[error("edge labels must be strictly increasing (violated at {0})")]
    DuplicateLabel(i64),
    #[error("{crossings} crossings need {} edges, found {edges}", 2 * crossings + 1)]
    EdgeCount { edges: usize, crossings: usize },
    #[error("crossing {0} has sign other than +1/-1")]
    BadSign(usize),
    #[error("crossing {0} uses the same edge for both strands")]
    SameStrand(usize),
    #[error("crossing {index} refers to unknown edge {label}")]
    UnknownEdge { index: usize, label: i64 },
    #[error("the last edge {0} cannot enter a crossing")]
    LastEdgeIncoming(i64),
    #[error("broken strand: edge {0} is not incoming at exactly one crossing")]
    BrokenStrand(i64),
    #[error("rotation number given for unknown edge {0}")]
    DanglingRotation(i64),
}

/// An upright long-knot diagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UprightDiagram {
    edges: Vec<i64>,
    crossings: Vec<Crossing>,
    rotations: BTreeMap<i64, i64>,
}

/// Where an edge enters a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Over,
    Under,
}

impl UprightDiagram {
    pub fn new(edges: Vec<i64>, crossings: Vec<Crossing>, rotations: BTreeMap<i64, i64>) -> Result<Self, DiagramError> {
        let d = Self::new_unchecked(edges, crossings, rotations);
        d.validate()?;
        Ok(d)
    }

    /// Builds without validation; zero rotation entries are dropped.
    pub fn new_unchecked(edges: Vec<i64>, crossings: Vec<Crossing>, mut rotations: BTreeMap<i64, i64>) -> Self {
        rotations.retain(|_, v| *v != 0);
        Self {
            edges,
            crossings,
            rotations,
        }
    }

    /// Consecutive labels `1..=2n+1`.
    pub fn with_consecutive_labels(crossings: Vec<Crossing>, rotations: &[(i64, i64)]) -> Result<Self, DiagramError> {
        let edges = (1..=2 * crossings.len() as i64 + 1).collect();
        Self::new(edges, crossings, rotations.iter().copied().collect())
    }

    /// The diagram with no crossings.
    pub fn unknot() -> Self {
        Self::new_unchecked(vec![1], vec![], BTreeMap::new())
    }

    pub fn edges(&self) -> &[i64] {
        &self.edges
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn rotations(&self) -> &BTreeMap<i64, i64> {
        &self.rotations
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn first(&self) -> i64 {
        self.edges[0]
    }

    pub fn last(&self) -> i64 {
        *self.edges.last().unwrap()
    }

    pub fn rotation(&self, label: i64) -> i64 {
        self.rotations.get(&label).copied().unwrap_or(0)
    }

    /// Position of a label in the edge list.
    pub fn index_of(&self, label: i64) -> Option<usize> {
        self.edges.binary_search(&label).ok()
    }

    /// The successor `label^+`.
    pub fn succ(&self, label: i64) -> Option<i64> {
        let k = self.index_of(label)?;
        self.edges.get(k + 1).copied()
    }

    pub fn pred(&self, label: i64) -> Option<i64> {
        let k = self.index_of(label)?;
        k.checked_sub(1).map(|p| self.edges[p])
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.s as i64).sum()
    }

    pub fn total_rotation(&self) -> i64 {
        self.rotations.values().sum()
    }

    /// Map from incoming edge label to (crossing index, role).
    pub fn incoming(&self) -> HashMap<i64, (usize, Role)> {
        let mut m = HashMap::with_capacity(2 * self.crossings.len());
        for (k, c) in self.crossings.iter().enumerate() {
            m.insert(c.i, (k, Role::Over));
            m.insert(c.j, (k, Role::Under));
        }
        m
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        if self.edges.is_empty() {
            return Err(DiagramError::NoEdges);
        }
        for w in self.edges.windows(2) {
            if w[1] <= w[0] {
                return Err(DiagramError::DuplicateLabel(w[1]));
            }
        }
        if self.edges.len() != 2 * self.crossings.len() + 1 {
            return Err(DiagramError::EdgeCount {
                edges: self.edges.len(),
                crossings: self.crossings.len(),
            });
        }
        let last = self.last();
        let mut seen: HashMap<i64, usize> = HashMap::new();
        for (k, c) in self.crossings.iter().enumerate() {
            if c.s != 1 && c.s != -1 {
                return Err(DiagramError::BadSign(k));
            }
            if c.i == c.j {
                return Err(DiagramError::SameStrand(k));
            }
            for l in [c.i, c.j] {
                if self.index_of(l).is_none() {
                    return Err(DiagramError::UnknownEdge { index: k, label: l });
                }
                if l == last {
                    return Err(DiagramError::LastEdgeIncoming(l));
                }
                *seen.entry(l).or_default() += 1;
            }
        }
        for &e in &self.edges[..self.edges.len() - 1] {
            if seen.get(&e) != Some(&1) {
                return Err(DiagramError::BrokenStrand(e));
            }
        }
        if let Some((&k, _)) = self.rotations.iter().find(|(k, _)| self.index_of(**k).is_none()) {
            return Err(DiagramError::DanglingRotation(k));
        }
        Ok(())
    }

    /// Negates every crossing sign and every rotation number.
    pub fn mirror(&self) -> Self {
        Self {
            edges: self.edges.clone(),
            crossings: self.crossings.iter().map(|c| Crossing::new(-c.s, c.i, c.j)).collect(),
            rotations: self.rotations.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    /// Same diagram with labels `1..=2n+1`.
    pub fn relabeled_consecutive(&self) -> Self {
        let map: HashMap<i64, i64> = self.edges.iter().enumerate().map(|(k, &l)| (l, k as i64 + 1)).collect();
        Self {
            edges: (1..=self.edges.len() as i64).collect(),
            crossings: self.crossings.iter().map(|c| Crossing::new(c.s, map[&c.i], map[&c.j])).collect(),
            rotations: self.rotations.iter().map(|(k, v)| (map[k], *v)).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(UprightJson::from(self)).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self, JsonError> {
        let j: UprightJson = serde_json::from_str(s).map_err(|e| JsonError::Syntax(e.to_string()))?;
        j.try_into()
    }
}

/// Upright JSON interchange: `{"edges":[...],"crossings":[{"s":1,"i":2,"j":1}],"rotations":{"4":-1}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UprightJson {
    pub edges: Vec<i64>,
    pub crossings: Vec<Crossing>,
    #[serde(default)]
    pub rotations: BTreeMap<String, i64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("rotation key {0:?} is not an integer")]
    BadKey(String),
    #[error(transparent)]
    Invalid(#[from] DiagramError),
}

impl From<&UprightDiagram> for UprightJson {
    fn from(d: &UprightDiagram) -> Self {
        Self {
            edges: d.edges.clone(),
            crossings: d.crossings.clone(),
            rotations: d.rotations.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

impl TryFrom<UprightJson> for UprightDiagram {
    type Error = JsonError;
    fn try_from(j: UprightJson) -> Result<Self, JsonError> {
        let mut rot = BTreeMap::new();
        for (k, v) in j.rotations {
            let key: i64 = k.trim().parse().map_err(|_| JsonError::BadKey(k.clone()))?;
            *rot.entry(key).or_insert(0) += v;
        }
        Ok(UprightDiagram::new(j.edges, j.crossings, rot)?)
    }
}

#[cfg(test)]
mod tests {
    use super::samples::{d1, d2, d3};
    use super::*;

    #[test]
    fn sample_diagrams_validate() {
        for d in [d1(), d2(), d3()] {
            d.validate().unwrap();
        }
        assert_eq!(d3().writhe(), 3);
        assert_eq!(d3().total_rotation(), -1);
        assert_eq!(d2().succ(2), Some(3));
        assert_eq!(d2().succ(3), None);
        assert_eq!(d2().pred(1), None);
    }

    #[test]
    fn validation_errors() {
        let same = UprightDiagram::with_consecutive_labels(vec![Crossing::new(1, 1, 1)], &[]);
        assert_eq!(same, Err(DiagramError::SameStrand(0)));
        let last = UprightDiagram::with_consecutive_labels(vec![Crossing::new(1, 3, 1)], &[]);
        assert_eq!(last, Err(DiagramError::LastEdgeIncoming(3)));
        let broken = UprightDiagram::with_consecutive_labels(vec![Crossing::new(1, 1, 2), Crossing::new(1, 1, 3)], &[]);
        assert!(matches!(broken, Err(DiagramError::BrokenStrand(_))));
        let dangling = UprightDiagram::with_consecutive_labels(vec![Crossing::new(1, 2, 1)], &[(9, 1)]);
        assert_eq!(dangling, Err(DiagramError::DanglingRotation(9)));
        let dup = UprightDiagram::new(vec![1, 1, 2], vec![Crossing::new(1, 1, 1)], BTreeMap::new());
        assert_eq!(dup, Err(DiagramError::DuplicateLabel(1)));
        let sign = UprightDiagram::with_consecutive_labels(vec![Crossing::new(2, 2, 1)], &[]);
        assert_eq!(sign, Err(DiagramError::BadSign(0)));
        assert_eq!(UprightDiagram::new(vec![], vec![], BTreeMap::new()), Err(DiagramError::NoEdges));
    }

    #[test]
    fn non_consecutive_labels_are_fine() {
        let d = UprightDiagram::new(
            vec![1, 5, 9, 13, 17, 21, 25],
            vec![Crossing::new(1, 1, 13), Crossing::new(1, 9, 21), Crossing::new(1, 17, 5)],
            [(13, -1)].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(d.relabeled_consecutive(), d3());
        assert_eq!(d.succ(9), Some(13));
    }

    #[test]
    fn mirror_is_an_involution() {
        let m = d3().mirror();
        assert_eq!(m.writhe(), -3);
        assert_eq!(m.total_rotation(), 1);
        assert_eq!(m.mirror(), d3());
    }

    #[test]
    fn json_round_trip() {
        let v = d3().to_json();
        assert_eq!(v["rotations"]["4"], -1);
        assert_eq!(v["crossings"][0]["s"], 1);
        let back = UprightDiagram::from_json_str(&v.to_string()).unwrap();
        assert_eq!(back, d3());
        let bad = r#"{"edges":[1,2,3],"crossings":[{"s":1,"i":2,"j":2}],"rotations":{}}"#;
        assert!(matches!(UprightDiagram::from_json_str(bad), Err(JsonError::Invalid(_))));
        assert!(matches!(UprightDiagram::from_json_str("{"), Err(JsonError::Syntax(_))));
    }
}
