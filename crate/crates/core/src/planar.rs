//! The planarization G^x: one degree-4 dummy node per crossing.
//!
//! G-vertices are dense indices `0..n_g` in sorted label order, dummies follow
//! as `n_g + c`. Edges of G are dense indices in sorted id order; edges of G^x
//! ("x-edges") remember the G-edge they came from.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::GraphError;
use crate::graph::{validate, Edge, EdgeEnd, EdgeId, OnePlaneGraph, VertexId};

pub type Node = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GEdge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub crossing: Option<usize>,
}

impl GEdge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn joins(&self, a: usize, b: usize) -> bool {
        (self.u == a && self.v == b) || (self.u == b && self.v == a)
    }
}

/// A crossing of edges A = (u, v) and B = (w, x); `ends` is `[u, w, v, x]`,
/// the cyclic order of the half-edges at the dummy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingInfo {
    pub edges: [usize; 2],
    pub ends: [usize; 4],
}

impl CrossingInfo {
    pub fn has_end(&self, y: usize) -> bool {
        self.ends.contains(&y)
    }

    pub fn opposite(&self, y: usize) -> usize {
        let i = self.ends.iter().position(|&e| e == y).expect("endpoint of crossing");
        self.ends[(i + 2) % 4]
    }

    /// The two endpoints consecutive to `y`, i.e. the ends of the other edge.
    pub fn consecutive(&self, y: usize) -> [usize; 2] {
        let i = self.ends.iter().position(|&e| e == y).expect("endpoint of crossing");
        [self.ends[(i + 1) % 4], self.ends[(i + 3) % 4]]
    }

    /// The four consecutive pairs.
    pub fn consecutive_pairs(&self) -> [(usize, usize); 4] {
        let e = self.ends;
        [(e[0], e[1]), (e[1], e[2]), (e[2], e[3]), (e[3], e[0])]
    }

    /// The crossing edge that has `y` as an endpoint.
    pub fn edge_at(&self, y: usize) -> usize {
        let i = self.ends.iter().position(|&e| e == y).expect("endpoint of crossing");
        self.edges[i % 2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XEdge {
    pub a: Node,
    pub b: Node,
    pub parent: usize,
}

impl XEdge {
    pub fn other(&self, x: Node) -> Node {
        if self.a == x {
            self.b
        } else {
            self.a
        }
    }
}

/// A subgraph of G^x.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct XSub {
    pub nodes: BTreeSet<Node>,
    pub xedges: BTreeSet<usize>,
}

impl XSub {
    pub fn size(&self) -> usize {
        self.nodes.len() + self.xedges.len()
    }

    pub fn union_with(&mut self, other: &XSub) {
        self.nodes.extend(other.nodes.iter().copied());
        self.xedges.extend(other.xedges.iter().copied());
    }

    pub fn is_subset(&self, other: &XSub) -> bool {
        self.nodes.is_subset(&other.nodes) && self.xedges.is_subset(&other.xedges)
    }
}

#[derive(Clone, Debug)]
pub struct Planarization {
    base: OnePlaneGraph,
    labels: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    edges: Vec<GEdge>,
    edge_index: HashMap<EdgeId, usize>,
    crossings: Vec<CrossingInfo>,
    xedges: Vec<XEdge>,
    halves: Vec<Vec<usize>>,
    xadj: Vec<Vec<(Node, usize)>>,
    gadj: Vec<Vec<(usize, usize)>>,
    xrot: Option<Vec<Vec<usize>>>,
    dummy_base: VertexId,
    half_base: EdgeId,
}

impl Planarization {
    pub fn new(g: &OnePlaneGraph) -> Result<Self, GraphError> {
        let report = validate(g);
        if !report.is_empty() {
            return Err(GraphError::Invalid(report));
        }
        Ok(Self::build(g.clone()))
    }

    /// Assumes the structural invariants hold (rotation consistency aside).
    pub(crate) fn build(base: OnePlaneGraph) -> Self {
        let mut labels = base.vertices.clone();
        labels.sort_unstable();
        let index: HashMap<VertexId, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut sorted: Vec<Edge> = base.edges.clone();
        sorted.sort_by_key(|e| e.id);
        let edge_index: HashMap<EdgeId, usize> = sorted.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
        let mut edges: Vec<GEdge> = sorted
            .iter()
            .map(|e| GEdge { id: e.id, u: index[&e.u], v: index[&e.v], crossing: None })
            .collect();
        let n_g = labels.len();
        let mut crossings = Vec::with_capacity(base.crossings.len());
        for (c, &[a, b]) in base.crossings.iter().enumerate() {
            let (ia, ib) = (edge_index[&a], edge_index[&b]);
            edges[ia].crossing = Some(c);
            edges[ib].crossing = Some(c);
            let (ea, eb) = (edges[ia], edges[ib]);
            crossings.push(CrossingInfo { edges: [ia, ib], ends: [ea.u, eb.u, ea.v, eb.v] });
        }
        let n_nodes = n_g + crossings.len();
        let mut xedges = Vec::new();
        let mut halves = vec![Vec::new(); edges.len()];
        for (i, e) in edges.iter().enumerate() {
            match e.crossing {
                None => {
                    halves[i].push(xedges.len());
                    xedges.push(XEdge { a: e.u, b: e.v, parent: i });
                }
                Some(c) => {
                    let d = n_g + c;
                    halves[i].push(xedges.len());
                    xedges.push(XEdge { a: e.u, b: d, parent: i });
                    halves[i].push(xedges.len());
                    xedges.push(XEdge { a: d, b: e.v, parent: i });
                }
            }
        }
        let mut xadj = vec![Vec::new(); n_nodes];
        for (i, x) in xedges.iter().enumerate() {
            xadj[x.a].push((x.b, i));
            xadj[x.b].push((x.a, i));
        }
        for l in xadj.iter_mut() {
            l.sort_unstable();
        }
        let mut gadj = vec![Vec::new(); n_g];
        for (i, e) in edges.iter().enumerate() {
            gadj[e.u].push((e.v, i));
            gadj[e.v].push((e.u, i));
        }
        for l in gadj.iter_mut() {
            l.sort_unstable();
        }
        let xrot = base.rotation.as_ref().map(|rot| {
            let mut out = vec![Vec::new(); n_nodes];
            for (&v, ends) in rot {
                let Some(&vi) = index.get(&v) else { continue };
                out[vi] = ends
                    .iter()
                    .map(|end: &EdgeEnd| {
                        let ei = edge_index[&end.edge];
                        let h = &halves[ei];
                        if h.len() == 1 {
                            h[0]
                        } else {
                            h[end.end as usize]
                        }
                    })
                    .collect();
            }
            for (c, info) in crossings.iter().enumerate() {
                let [a, b] = info.edges;
                out[n_g + c] = vec![halves[a][0], halves[b][0], halves[a][1], halves[b][1]];
            }
            out
        });
        let dummy_base = labels.last().map_or(0, |&m| m + 1);
        let half_base = sorted.last().map_or(0, |e| e.id + 1);
        Planarization {
            base,
            labels,
            index,
            edges,
            edge_index,
            crossings,
            xedges,
            halves,
            xadj,
            gadj,
            xrot,
            dummy_base,
            half_base,
        }
    }

    pub fn base(&self) -> &OnePlaneGraph {
        &self.base
    }

    pub fn n_g(&self) -> usize {
        self.labels.len()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len() + self.crossings.len()
    }

    pub fn is_dummy(&self, node: Node) -> bool {
        node >= self.labels.len()
    }

    pub fn dummy(&self, crossing: usize) -> Node {
        self.labels.len() + crossing
    }

    pub fn crossing_at(&self, node: Node) -> Option<usize> {
        node.checked_sub(self.labels.len())
    }

    pub fn crossing(&self, c: usize) -> &CrossingInfo {
        &self.crossings[c]
    }

    pub fn crossings(&self) -> &[CrossingInfo] {
        &self.crossings
    }

    pub fn vertex(&self, label: VertexId) -> Option<usize> {
        self.index.get(&label).copied()
    }

    pub fn label(&self, v: usize) -> VertexId {
        self.labels[v]
    }

    pub fn labels(&self) -> &[VertexId] {
        &self.labels
    }

    /// G-vertices keep their label; dummies get labels above every vertex label.
    pub fn node_label(&self, node: Node) -> VertexId {
        if node < self.labels.len() {
            self.labels[node]
        } else {
            self.dummy_base + (node - self.labels.len()) as VertexId
        }
    }

    pub fn edges(&self) -> &[GEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &GEdge {
        &self.edges[e]
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.edge_index.get(&id).copied()
    }

    pub fn xedges(&self) -> &[XEdge] {
        &self.xedges
    }

    pub fn xedge(&self, x: usize) -> &XEdge {
        &self.xedges[x]
    }

    /// Uncrossed x-edges keep the id of their G-edge; half-edges get fresh ids.
    pub fn xedge_label(&self, x: usize) -> EdgeId {
        let p = self.xedges[x].parent;
        if self.edges[p].crossing.is_none() {
            self.edges[p].id
        } else {
            self.half_base + x as EdgeId
        }
    }

    pub fn halves(&self, e: usize) -> &[usize] {
        &self.halves[e]
    }

    /// The x-edge of `e` incident with its endpoint `v`.
    pub fn half_at(&self, e: usize, v: usize) -> usize {
        let h = &self.halves[e];
        if h.len() == 1 || self.edges[e].u == v {
            h[0]
        } else {
            h[1]
        }
    }

    /// Nodes of e^x.
    pub fn image(&self, e: usize) -> Vec<Node> {
        let g = &self.edges[e];
        match g.crossing {
            None => vec![g.u, g.v],
            Some(c) => vec![g.u, self.dummy(c), g.v],
        }
    }

    pub fn xadj(&self, node: Node) -> &[(Node, usize)] {
        &self.xadj[node]
    }

    /// Neighbours in G as `(vertex, edge)`, sorted.
    pub fn gadj(&self, v: usize) -> &[(usize, usize)] {
        &self.gadj[v]
    }

    pub fn x_rotation(&self) -> Option<&[Vec<usize>]> {
        self.xrot.as_deref()
    }

    /// H^x for the subgraph of G with the given vertices and edges.
    pub fn restrict(&self, vertices: impl IntoIterator<Item = usize>, edges: impl IntoIterator<Item = usize>) -> XSub {
        let mut out = XSub::default();
        out.nodes.extend(vertices);
        for e in edges {
            out.nodes.extend(self.image(e));
            out.xedges.extend(self.halves[e].iter().copied());
        }
        out
    }

    /// `restrict` on labels; rejects ids not in G.
    pub fn restrict_ids(&self, vertices: &[VertexId], edges: &[EdgeId]) -> Result<XSub, GraphError> {
        let vs = vertices
            .iter()
            .map(|&v| self.vertex(v).ok_or(GraphError::UnknownVertex(v)))
            .collect::<Result<Vec<_>, _>>()?;
        let es = edges
            .iter()
            .map(|&e| self.edge_index(e).ok_or(GraphError::UnknownEdge(e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.restrict(vs, es))
    }

    /// The whole of G^x.
    pub fn full(&self) -> XSub {
        XSub { nodes: (0..self.node_count()).collect(), xedges: (0..self.xedges.len()).collect() }
    }

    /// G^x as a crossing-free graph on node labels.
    pub fn to_graph(&self) -> OnePlaneGraph {
        let vertices = (0..self.node_count()).map(|n| self.node_label(n)).collect();
        let mut edges: Vec<Edge> = self
            .xedges
            .iter()
            .enumerate()
            .map(|(i, x)| Edge::new(self.xedge_label(i), self.node_label(x.a), self.node_label(x.b)))
            .collect();
        edges.sort_by_key(|e| e.id);
        OnePlaneGraph::new(vertices, edges, Vec::new())
    }

    /// Vertices of G in the same component of G as `v`.
    pub fn g_component(&self, v: usize, edge_ok: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.n_g()];
        let mut queue = std::collections::VecDeque::from([v]);
        seen[v] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &self.gadj[x] {
                if !seen[y] && edge_ok(e) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}
