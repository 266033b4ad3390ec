use serde::Serialize;

use crate::guard::GPath;
use crate::planar::{Node, Planarization, XSub};

/// A walk or path in G^x: `xedges[i]` joins `nodes[i]` and `nodes[i + 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct XPath {
    pub nodes: Vec<Node>,
    pub xedges: Vec<usize>,
}

impl XPath {
    pub fn single(n: Node) -> Self {
        XPath { nodes: vec![n], xedges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> Node {
        self.nodes[0]
    }

    pub fn last(&self) -> Node {
        *self.nodes.last().unwrap()
    }

    pub fn reversed(&self) -> XPath {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        let mut xedges = self.xedges.clone();
        xedges.reverse();
        XPath { nodes, xedges }
    }

    /// Nodes `a..=b`.
    pub fn slice(&self, a: usize, b: usize) -> XPath {
        XPath { nodes: self.nodes[a..=b].to_vec(), xedges: self.xedges[a..b].to_vec() }
    }

    /// `self`, then `link` to `other.first()`, then `other`.
    pub fn join(&self, link: usize, other: &XPath) -> XPath {
        let mut out = self.clone();
        out.xedges.push(link);
        out.xedges.extend(&other.xedges);
        out.nodes.extend(&other.nodes);
        out
    }

    pub fn prepend(&self, n: Node, link: usize) -> XPath {
        XPath::single(n).join(link, self)
    }

    pub fn append(&self, link: usize, n: Node) -> XPath {
        self.join(link, &XPath::single(n))
    }

    pub fn sub(&self) -> XSub {
        XSub { nodes: self.nodes.iter().copied().collect(), xedges: self.xedges.iter().copied().collect() }
    }

    pub fn position(&self, n: Node) -> Option<usize> {
        self.nodes.iter().position(|&x| x == n)
    }

    /// Oriented to start from the endpoint with the lower id.
    pub fn normalized(self) -> XPath {
        if self.nodes.len() > 1 && self.first() > self.last() {
            self.reversed()
        } else {
            self
        }
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.nodes.iter().all(|n| seen.insert(*n))
    }

    pub fn labels(&self, p: &Planarization) -> Vec<u32> {
        self.nodes.iter().map(|&n| p.node_label(n)).collect()
    }
}

/// P^x relative to G: every crossed edge of P passes through its dummy.
pub fn restrict_walk(p: &Planarization, path: &GPath) -> XPath {
    let mut out = XPath::single(path.vertices[0]);
    for (i, &e) in path.edges.iter().enumerate() {
        let (a, b) = (path.vertices[i], path.vertices[i + 1]);
        match p.edge(e).crossing {
            None => {
                out.xedges.push(p.halves(e)[0]);
                out.nodes.push(b);
            }
            Some(c) => {
                out.xedges.push(p.half_at(e, a));
                out.nodes.push(p.dummy(c));
                out.xedges.push(p.half_at(e, b));
                out.nodes.push(b);
            }
        }
    }
    out
}

/// Cuts out the loop between two visits of the same node.
pub fn shortcut(walk: &XPath) -> XPath {
    if walk.is_empty() {
        return XPath::default();
    }
    let mut out = XPath::single(walk.nodes[0]);
    for (i, &n) in walk.nodes.iter().enumerate().skip(1) {
        if let Some(k) = out.position(n) {
            out.nodes.truncate(k + 1);
            out.xedges.truncate(k);
        } else {
            out.xedges.push(walk.xedges[i - 1]);
            out.nodes.push(n);
        }
    }
    out
}
