//! One-plane multigraphs: vertices, edges, declared crossings and an optional
//! rotation system, plus validation and the JSON file format.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::embedding;
use crate::error::GraphError;

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn new(id: EdgeId, u: VertexId, v: VertexId) -> Self {
        Edge { id, u, v }
    }

    pub fn has(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    /// 0 for the `u` end, 1 for the `v` end.
    pub fn end_at(&self, x: VertexId) -> Option<u8> {
        if self.u == x {
            Some(0)
        } else if self.v == x {
            Some(1)
        } else {
            None
        }
    }

    pub fn endpoint(&self, end: u8) -> VertexId {
        if end == 0 {
            self.u
        } else {
            self.v
        }
    }

    pub fn joins(&self, a: VertexId, b: VertexId) -> bool {
        (self.u == a && self.v == b) || (self.u == b && self.v == a)
    }
}

/// One end of an edge as it appears in a rotation; `["e", id, end]` on disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: EdgeId,
    pub end: u8,
}

impl EdgeEnd {
    pub fn new(edge: EdgeId, end: u8) -> Self {
        EdgeEnd { edge, end }
    }
}

impl Serialize for EdgeEnd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ("e", self.edge, self.end).serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeEnd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = EdgeEnd;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an edge end [\"e\", edgeId, endIndex]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<EdgeEnd, A::Error> {
                let tag: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                if tag != "e" {
                    return Err(de::Error::custom(format!("unknown rotation entry tag {tag:?}")));
                }
                let edge = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let end: u8 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if end > 1 {
                    return Err(de::Error::custom(format!("end index {end} out of range")));
                }
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(EdgeEnd { edge, end })
            }
        }
        d.deserialize_seq(V)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnePlaneGraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub crossings: Vec<[EdgeId; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<BTreeMap<VertexId, Vec<EdgeEnd>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateVertex { vertex: VertexId },
    DuplicateEdgeId { edge: EdgeId },
    SelfLoop { edge: EdgeId },
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    UnknownCrossingEdge { edge: EdgeId },
    CrossingWithItself { edge: EdgeId },
    EdgeCrossedTwice { edge: EdgeId },
    SharedEndpoint { a: EdgeId, b: EdgeId, vertex: VertexId },
    RotationUnknownVertex { vertex: VertexId },
    RotationMismatch { vertex: VertexId },
    Euler { component: VertexId, vertices: usize, edges: usize, faces: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Violation::DuplicateVertex { vertex } => write!(f, "duplicate vertex {vertex}"),
            Violation::DuplicateEdgeId { edge } => write!(f, "duplicate edge id {edge}"),
            Violation::SelfLoop { edge } => write!(f, "edge {edge} is a self-loop"),
            Violation::UnknownVertex { edge, vertex } => {
                write!(f, "edge {edge} uses unknown vertex {vertex}")
            }
            Violation::UnknownCrossingEdge { edge } => {
                write!(f, "crossing refers to unknown edge {edge}")
            }
            Violation::CrossingWithItself { edge } => write!(f, "edge {edge} crosses itself"),
            Violation::EdgeCrossedTwice { edge } => write!(f, "edge crossed twice: {edge}"),
            Violation::SharedEndpoint { a, b, vertex } => {
                write!(f, "crossing edges share endpoint {vertex} (edges {a}, {b})")
            }
            Violation::RotationUnknownVertex { vertex } => {
                write!(f, "rotation lists unknown vertex {vertex}")
            }
            Violation::RotationMismatch { vertex } => {
                write!(f, "rotation at {vertex} does not match its incident edge ends")
            }
            Violation::Euler { component, vertices, edges, faces } => write!(
                f,
                "component of {component} fails Euler: V={vertices} E={edges} F={faces}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(&self.messages().join("; "))
    }
}

impl OnePlaneGraph {
    pub fn new(vertices: Vec<VertexId>, edges: Vec<Edge>, crossings: Vec<[EdgeId; 2]>) -> Self {
        OnePlaneGraph { vertices, edges, crossings, rotation: None }
    }

    /// Builds a graph from `(u, v)` pairs; edge ids are assigned in order from 0.
    pub fn from_pairs(vertices: impl IntoIterator<Item = VertexId>, pairs: &[(VertexId, VertexId)]) -> Self {
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| Edge::new(i as EdgeId, u, v))
            .collect();
        OnePlaneGraph::new(vertices.into_iter().collect(), edges, Vec::new())
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Compact JSON with object keys in sorted order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("graph serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    pub fn load(path: &Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), GraphError> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.iter().map(|e| e.id).max()
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.iter().copied().max()
    }

    /// Edge ids that appear in some crossing.
    pub fn crossed_edges(&self) -> BTreeSet<EdgeId> {
        self.crossings.iter().flat_map(|c| c.iter().copied()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = embedding::UnionFind::new(self.vertices.len());
        let idx: HashMap<VertexId, usize> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (idx.get(&e.u), idx.get(&e.v)) {
                uf.union(a, b);
            }
        }
        uf.count() <= 1
    }

    /// Removes edges by id, together with every crossing and rotation entry that mentions them.
    pub fn without_edges(&self, ids: &BTreeSet<EdgeId>) -> OnePlaneGraph {
        let mut g = self.clone();
        g.edges.retain(|e| !ids.contains(&e.id));
        g.crossings.retain(|c| !ids.contains(&c[0]) && !ids.contains(&c[1]));
        if let Some(rot) = g.rotation.as_mut() {
            for ends in rot.values_mut() {
                ends.retain(|x| !ids.contains(&x.edge));
            }
        }
        g
    }
}

pub fn validate(g: &OnePlaneGraph) -> ValidationReport {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for &v in &g.vertices {
        if !seen.insert(v) {
            out.push(Violation::DuplicateVertex { vertex: v });
        }
    }
    let mut by_id: BTreeMap<EdgeId, Edge> = BTreeMap::new();
    for e in &g.edges {
        if by_id.insert(e.id, *e).is_some() {
            out.push(Violation::DuplicateEdgeId { edge: e.id });
        }
        if e.u == e.v {
            out.push(Violation::SelfLoop { edge: e.id });
        }
        for x in [e.u, e.v] {
            if !seen.contains(&x) {
                out.push(Violation::UnknownVertex { edge: e.id, vertex: x });
            }
        }
    }
    let mut crossed: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for &[a, b] in &g.crossings {
        let mut known = true;
        for x in [a, b] {
            if !by_id.contains_key(&x) {
                out.push(Violation::UnknownCrossingEdge { edge: x });
                known = false;
            }
        }
        if a == b {
            out.push(Violation::CrossingWithItself { edge: a });
            known = false;
        }
        for x in [a, b] {
            let n = crossed.entry(x).or_insert(0);
            *n += 1;
            if *n == 2 {
                out.push(Violation::EdgeCrossedTwice { edge: x });
            }
        }
        if known {
            let (ea, eb) = (by_id[&a], by_id[&b]);
            let mut shared: Vec<VertexId> =
                [ea.u, ea.v].into_iter().filter(|&x| eb.has(x)).collect();
            shared.dedup();
            for vertex in shared {
                out.push(Violation::SharedEndpoint { a, b, vertex });
            }
        }
    }
    if out.is_empty() {
        if let Some(rot) = &g.rotation {
            out.extend(check_rotation(g, rot));
        }
    }
    ValidationReport { violations: out }
}

fn check_rotation(g: &OnePlaneGraph, rot: &BTreeMap<VertexId, Vec<EdgeEnd>>) -> Vec<Violation> {
    let mut out = Vec::new();
    let known: BTreeSet<VertexId> = g.vertices.iter().copied().collect();
    for &v in rot.keys() {
        if !known.contains(&v) {
            out.push(Violation::RotationUnknownVertex { vertex: v });
        }
    }
    let mut expected: BTreeMap<VertexId, Vec<EdgeEnd>> = BTreeMap::new();
    for e in &g.edges {
        expected.entry(e.u).or_default().push(EdgeEnd::new(e.id, 0));
        expected.entry(e.v).or_default().push(EdgeEnd::new(e.id, 1));
    }
    for &v in &g.vertices {
        let mut want = expected.remove(&v).unwrap_or_default();
        want.sort();
        let mut have = rot.get(&v).cloned().unwrap_or_default();
        have.sort();
        if want != have {
            out.push(Violation::RotationMismatch { vertex: v });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let p = crate::planar::Planarization::build(g.clone());
    let Some(xrot) = p.x_rotation() else {
        return out;
    };
    let ends: Vec<(usize, usize)> = p.xedges().iter().map(|x| (x.a, x.b)).collect();
    for c in embedding::euler_by_component(p.node_count(), &ends, xrot) {
        if c.vertices + c.faces != c.edges + 2 {
            let component = p.node_label(c.min_node);
            out.push(Violation::Euler {
                component,
                vertices: c.vertices,
                edges: c.edges,
                faces: c.faces,
            });
        }
    }
    out
}
