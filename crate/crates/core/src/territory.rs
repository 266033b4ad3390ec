//! Cop territory C(H), robber territory R(H) and the boundary sets S_H(v) for
//! a guarded subgraph H of G^x.
//!
//! C(H) depends only on the nodes of H: an edge of G is in cop territory
//! exactly when its image in G^x touches a node of H.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, OnePlaneGraph};
use crate::planar::{Node, Planarization, XSub};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TerritoryError {
    #[error("robber at {0} stands on a guarded vertex")]
    RobberOnGuarded(u32),
    #[error("node {0} is not in G^x")]
    UnknownNode(Node),
}

#[derive(Clone, Debug, Serialize)]
pub struct TerritoryView {
    pub guarded: BTreeSet<Node>,
    pub cop_edges: BTreeSet<usize>,
    pub robber: usize,
    /// Vertices of G in the robber's component of G minus C(H), as a mask.
    pub component: Vec<bool>,
    /// S_H(v): G-edges for a G-vertex, x-edges of G^x for a dummy.
    pub boundary: BTreeMap<Node, Vec<usize>>,
}

impl TerritoryView {
    pub fn contains(&self, v: usize) -> bool {
        self.component[v]
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.component.len()).filter(|&v| self.component[v]).collect()
    }

    /// Edges of G outside cop territory inside the robber's component.
    pub fn edges(&self, p: &Planarization) -> Vec<usize> {
        (0..p.edges().len())
            .filter(|&e| !self.cop_edges.contains(&e) && self.component[p.edge(e).u])
            .collect()
    }

    pub fn boundary_of(&self, node: Node) -> &[usize] {
        self.boundary.get(&node).map_or(&[], |v| v.as_slice())
    }

    /// Whether `node` of H has a neighbour in R(H).
    pub fn adjacent(&self, node: Node) -> bool {
        !self.boundary_of(node).is_empty()
    }

    /// The R(H)-endpoint of a boundary member of `node`.
    pub fn boundary_target(&self, p: &Planarization, node: Node, member: usize) -> usize {
        if p.is_dummy(node) {
            p.xedge(member).other(node)
        } else {
            p.edge(member).other(node)
        }
    }
}

pub fn cop_territory(p: &Planarization, h: &BTreeSet<Node>) -> BTreeSet<usize> {
    (0..p.edges().len())
        .filter(|&e| p.image(e).iter().any(|n| h.contains(n)))
        .collect()
}

pub fn robber_territory(p: &Planarization, h: &XSub, robber: usize) -> Result<TerritoryView, TerritoryError> {
    if let Some(&bad) = h.nodes.iter().find(|&&n| n >= p.node_count()) {
        return Err(TerritoryError::UnknownNode(bad));
    }
    territory_of_nodes(p, &h.nodes, robber)
}

pub fn territory_of_nodes(p: &Planarization, nodes: &BTreeSet<Node>, robber: usize) -> Result<TerritoryView, TerritoryError> {
    if nodes.contains(&robber) {
        return Err(TerritoryError::RobberOnGuarded(p.label(robber)));
    }
    let cop_edges = cop_territory(p, nodes);
    let component = p.g_component(robber, |e| !cop_edges.contains(&e));
    let mut boundary = BTreeMap::new();
    for &w in nodes {
        let members: Vec<usize> = if p.is_dummy(w) {
            p.xadj(w)
                .iter()
                .filter(|&&(y, _)| !p.is_dummy(y) && component[y])
                .map(|&(_, x)| x)
                .collect()
        } else {
            p.gadj(w)
                .iter()
                .filter(|&&(y, e)| {
                    component[y] && p.image(e).iter().all(|n| *n == w || !nodes.contains(n))
                })
                .map(|&(_, e)| e)
                .collect()
        };
        boundary.insert(w, members);
    }
    Ok(TerritoryView { guarded: nodes.clone(), cop_edges, robber, component, boundary })
}

/// Every crossing with both edges in R(H) has an uncrossed edge joining two
/// consecutive endpoints inside R(H).
pub fn check_no_x(p: &Planarization, view: &TerritoryView) -> bool {
    let inside = |e: usize| !view.cop_edges.contains(&e) && view.component[p.edge(e).u];
    p.crossings().iter().all(|c| {
        if !c.edges.iter().all(|&e| inside(e)) {
            return true;
        }
        c.consecutive_pairs().iter().any(|&(a, b)| {
            p.gadj(a)
                .iter()
                .any(|&(y, e)| y == b && inside(e) && p.edge(e).crossing.is_none())
        })
    })
}

/// R(H) together with S_H(v), as a standalone graph on labels. Dummy nodes and
/// half-edges use the planarization's synthetic labels.
pub fn extend_with_boundary(p: &Planarization, view: &TerritoryView, v: Node) -> OnePlaneGraph {
    let mut vertices: Vec<u32> = view.vertices().into_iter().map(|x| p.label(x)).collect();
    let mut edge_set: BTreeSet<usize> = view.edges(p).into_iter().collect();
    let mut extra = Vec::new();
    let members = view.boundary_of(v);
    if !members.is_empty() {
        vertices.push(p.node_label(v));
    }
    if p.is_dummy(v) {
        for &x in members {
            let xe = p.xedge(x);
            extra.push(Edge::new(p.xedge_label(x), p.node_label(xe.a), p.node_label(xe.b)));
        }
    } else {
        edge_set.extend(members.iter().copied());
    }
    vertices.sort_unstable();
    let mut edges: Vec<Edge> = edge_set
        .iter()
        .map(|&e| {
            let g = p.edge(e);
            Edge::new(g.id, p.label(g.u), p.label(g.v))
        })
        .chain(extra)
        .collect();
    edges.sort_by_key(|e| e.id);
    let crossings = p
        .crossings()
        .iter()
        .filter(|c| c.edges.iter().all(|e| edge_set.contains(e)))
        .map(|c| [p.edge(c.edges[0]).id, p.edge(c.edges[1]).id])
        .collect();
    OnePlaneGraph::new(vertices, edges, crossings)
}

/// R(H) ∪ S_H(v) has no x-crossing. Dense equivalent of running
/// `detect_x_crossings` on `extend_with_boundary`.
pub fn boundary_no_x(p: &Planarization, view: &TerritoryView, v: Node) -> bool {
    let mut inside: BTreeSet<usize> = view.edges(p).into_iter().collect();
    if !p.is_dummy(v) {
        inside.extend(view.boundary_of(v).iter().copied());
    }
    p.crossings().iter().all(|c| {
        if !c.edges.iter().all(|e| inside.contains(e)) {
            return true;
        }
        c.consecutive_pairs()
            .iter()
            .any(|&(a, b)| p.gadj(a).iter().any(|&(y, e)| y == b && inside.contains(&e)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4x() -> Planarization {
        let mut g = OnePlaneGraph::from_pairs(1..=4, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 3), (2, 4)]);
        g.crossings.push([4, 5]);
        Planarization::new(&g).unwrap()
    }

    #[test]
    fn empty_h() {
        let p = k4x();
        let v = territory_of_nodes(&p, &BTreeSet::new(), 0).unwrap();
        assert!(v.cop_edges.is_empty());
        assert_eq!(v.vertices(), vec![0, 1, 2, 3]);
        assert!(check_no_x(&p, &v));
    }

    #[test]
    fn dummy_only() {
        let p = k4x();
        let h: BTreeSet<Node> = [p.dummy(0)].into();
        assert_eq!(cop_territory(&p, &h), [4, 5].into());
        let v = territory_of_nodes(&p, &h, 0).unwrap();
        let halves: Vec<usize> = v.boundary_of(p.dummy(0)).to_vec();
        assert_eq!(halves.len(), 4);
        let frag = extend_with_boundary(&p, &v, p.dummy(0));
        assert_eq!(frag.vertices, vec![1, 2, 3, 4, 5]);
        assert_eq!(frag.edges.len(), 8);
    }

    #[test]
    fn robber_on_h_rejected() {
        let p = k4x();
        let h: BTreeSet<Node> = [0].into();
        assert_eq!(territory_of_nodes(&p, &h, 0).unwrap_err(), TerritoryError::RobberOnGuarded(1));
    }
}
