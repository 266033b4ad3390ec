//! Face tracing on a rotation system.
//!
//! A dart is `2 * edge + dir`, where dir 0 runs `a -> b`. After arriving at a
//! node along an edge, the face continues along the next edge in that node's
//! cyclic order.

use std::collections::HashMap;

pub struct UnionFind {
    parent: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), sets: n }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        self.sets -= 1;
        true
    }

    pub fn count(&self) -> usize {
        self.sets
    }
}

/// Face boundaries as dart sequences.
pub fn trace_faces(ends: &[(usize, usize)], rot: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
    for (node, order) in rot.iter().enumerate() {
        for (i, &e) in order.iter().enumerate() {
            pos.insert((node, e), i);
        }
    }
    let head = |d: usize| {
        let (a, b) = ends[d / 2];
        if d % 2 == 0 {
            b
        } else {
            a
        }
    };
    let leave = |node: usize, e: usize| {
        if ends[e].0 == node {
            2 * e
        } else {
            2 * e + 1
        }
    };
    let mut seen = vec![false; ends.len() * 2];
    let mut faces = Vec::new();
    for start in 0..seen.len() {
        if seen[start] {
            continue;
        }
        let mut face = Vec::new();
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            face.push(d);
            let w = head(d);
            let order = &rot[w];
            let i = pos[&(w, d / 2)];
            let next = order[(i + 1) % order.len()];
            d = leave(w, next);
        }
        faces.push(face);
    }
    faces
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentCount {
    pub min_node: usize,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

/// V, E and F for every connected component; an isolated node counts one face.
pub fn euler_by_component(n: usize, ends: &[(usize, usize)], rot: &[Vec<usize>]) -> Vec<ComponentCount> {
    let mut uf = UnionFind::new(n);
    for &(a, b) in ends {
        uf.union(a, b);
    }
    let mut counts: HashMap<usize, ComponentCount> = HashMap::new();
    for v in 0..n {
        let r = uf.find(v);
        let c = counts.entry(r).or_insert(ComponentCount { min_node: v, vertices: 0, edges: 0, faces: 0 });
        c.vertices += 1;
    }
    for &(a, _) in ends {
        let r = uf.find(a);
        counts.get_mut(&r).unwrap().edges += 1;
    }
    for face in trace_faces(ends, rot) {
        let (a, _) = ends[face[0] / 2];
        let r = uf.find(a);
        counts.get_mut(&r).unwrap().faces += 1;
    }
    let mut out: Vec<ComponentCount> = counts
        .into_values()
        .map(|mut c| {
            if c.edges == 0 {
                c.faces = 1;
            }
            c
        })
        .collect();
    out.sort_by_key(|c| c.min_node);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_has_two_faces() {
        let ends = [(0, 1), (1, 2), (2, 0)];
        let rot = vec![vec![0, 2], vec![1, 0], vec![2, 1]];
        assert_eq!(trace_faces(&ends, &rot).len(), 2);
    }

    #[test]
    fn k4_twisted_rotation_breaks_euler() {
        // K4 edges: 01 02 03 12 13 23
        let ends = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let good = vec![vec![0, 1, 2], vec![0, 4, 3], vec![1, 3, 5], vec![2, 5, 4]];
        let c = euler_by_component(4, &ends, &good);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].faces, 4);
        let bad = vec![vec![0, 2, 1], vec![0, 4, 3], vec![1, 3, 5], vec![2, 5, 4]];
        let c = euler_by_component(4, &ends, &bad);
        assert_ne!(c[0].vertices + c[0].faces, c[0].edges + 2);
    }

    #[test]
    fn isolated_nodes_are_components() {
        let c = euler_by_component(3, &[(0, 1)], &[vec![0], vec![0], vec![]]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[1], ComponentCount { min_node: 2, vertices: 1, edges: 0, faces: 1 });
        assert_eq!(c[0].faces, 1);
    }
}
