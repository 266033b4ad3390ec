//! Guarding a shortest path with a five-cop squad.
//!
//! The squad leader U* runs the shadow strategy: it sits on `p_s` with
//! `s = min(d_A(p0, r), m)`. Four escorts hold `p_{s-2} .. p_{s+2}` (clamped),
//! so every path vertex within distance two of U* is occupied. Cops that are
//! not yet on the path walk to the nearest path vertex first.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::game::GameGraph;
use crate::kite::x_crossings;
use crate::planar::{Node, Planarization};

pub const OFFSETS: [i32; 5] = [0, -2, -1, 1, 2];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GuardError {
    #[error("path is not a shortest path in its ambient graph (index {0})")]
    NotShortest(usize),
    #[error("path uses an edge or vertex outside its ambient graph")]
    OutsideAmbient,
    #[error("edge {0} is not an edge of the path")]
    NotOnPath(u32),
    #[error("edge {0} is not part of an x-crossing")]
    NotXCrossed(u32),
}

/// A subgraph A of G: G-vertices and G-edges as masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    pub vertices: Vec<bool>,
    pub edges: Vec<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GPath {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl GPath {
    pub fn single(v: usize) -> Self {
        GPath { vertices: vec![v], edges: Vec::new() }
    }
}

impl Ambient {
    pub fn empty(p: &Planarization) -> Self {
        Ambient { vertices: vec![false; p.n_g()], edges: vec![false; p.edges().len()] }
    }

    pub fn new(p: &Planarization, vertices: impl IntoIterator<Item = usize>, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut a = Self::empty(p);
        for v in vertices {
            a.vertices[v] = true;
        }
        for e in edges {
            a.add_edge(p, e);
        }
        a
    }

    pub fn add_edge(&mut self, p: &Planarization, e: usize) {
        self.edges[e] = true;
        self.vertices[p.edge(e).u] = true;
        self.vertices[p.edge(e).v] = true;
    }

    /// The component of G containing `v`.
    pub fn component(p: &Planarization, v: usize) -> Self {
        let mask = p.g_component(v, |_| true);
        let edges = (0..p.edges().len()).filter(|&e| mask[p.edge(e).u]);
        Self::new(p, (0..p.n_g()).filter(|&x| mask[x]), edges)
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.vertices[v]
    }

    pub fn has_edge(&self, e: usize) -> bool {
        self.edges[e]
    }

    pub fn distances(&self, p: &Planarization, from: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; p.n_g()];
        if !self.vertices[from] {
            return dist;
        }
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            for &(y, e) in p.gadj(x) {
                if self.edges[e] && dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Shortest path by BFS. Neighbours are taken in id order; among parallel
    /// edges an uncrossed one is preferred, then the lowest index.
    pub fn shortest_path(&self, p: &Planarization, from: usize, to: usize) -> Option<GPath> {
        if !self.vertices[from] || !self.vertices[to] {
            return None;
        }
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; p.n_g()];
        let mut seen = vec![false; p.n_g()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            let mut options: Vec<(usize, bool, usize)> = p
                .gadj(x)
                .iter()
                .filter(|&&(_, e)| self.edges[e])
                .map(|&(y, e)| (y, p.edge(e).crossing.is_some(), e))
                .collect();
            options.sort_unstable();
            for (y, _, e) in options {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut vertices = vec![to];
        let mut edges = Vec::new();
        let mut cur = to;
        while let Some((prev, e)) = parent[cur] {
            vertices.push(prev);
            edges.push(e);
            cur = prev;
        }
        vertices.reverse();
        edges.reverse();
        Some(GPath { vertices, edges })
    }
}

/// The deterministic shadow program for one shortest path.
#[derive(Clone, Debug)]
pub struct ShadowPath {
    pub ambient: Ambient,
    pub path: GPath,
    dist: Vec<u32>,
    index: Vec<Option<usize>>,
    to_path: Vec<u32>,
}

impl ShadowPath {
    /// `moves` is the graph the cops walk in; it must contain the path's edges.
    pub fn new(p: &Planarization, moves: &GameGraph, ambient: Ambient, path: GPath) -> Result<Self, GuardError> {
        if path.vertices.iter().any(|&v| !ambient.has_vertex(v)) || path.edges.iter().any(|&e| !ambient.has_edge(e)) {
            return Err(GuardError::OutsideAmbient);
        }
        let dist = ambient.distances(p, path.vertices[0]);
        for (i, &v) in path.vertices.iter().enumerate() {
            if dist[v] != i as u32 {
                return Err(GuardError::NotShortest(i));
            }
        }
        let mut index = vec![None; p.n_g()];
        for (i, &v) in path.vertices.iter().enumerate() {
            index[v] = Some(i);
        }
        let to_path = moves.distances(&path.vertices);
        Ok(ShadowPath { ambient, path, dist, index, to_path })
    }

    pub fn m(&self) -> usize {
        self.path.vertices.len() - 1
    }

    pub fn vertex(&self, i: usize) -> usize {
        self.path.vertices[i]
    }

    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.index[v]
    }

    pub fn root_distance(&self, v: usize) -> u32 {
        self.dist[v]
    }

    /// `min(d_A(p0, r), m)`, or `None` when r is outside A.
    pub fn shadow_index(&self, robber: usize) -> Option<usize> {
        if !self.ambient.has_vertex(robber) || self.dist[robber] == u32::MAX {
            return None;
        }
        Some((self.dist[robber] as usize).min(self.m()))
    }

    /// Target index for a cop with the given offset; a robber outside A
    /// pins the shadow to the far end.
    pub fn target_index(&self, robber: usize, offset: i32) -> usize {
        let s = self.shadow_index(robber).unwrap_or(self.m()) as i32;
        (s + offset).clamp(0, self.m() as i32) as usize
    }

    pub fn target(&self, robber: usize, offset: i32) -> usize {
        self.vertex(self.target_index(robber, offset))
    }

    /// One move of a cop running this program with `offset`.
    pub fn step(&self, moves: &GameGraph, at: usize, robber: usize, offset: i32) -> usize {
        match self.index[at] {
            Some(j) => {
                let t = self.target_index(robber, offset);
                match j.cmp(&t) {
                    std::cmp::Ordering::Less => self.vertex(j + 1),
                    std::cmp::Ordering::Greater => self.vertex(j - 1),
                    std::cmp::Ordering::Equal => at,
                }
            }
            None => moves.step_toward(at, &self.to_path),
        }
    }

    /// Squad positions once settled for a robber at `robber`, in `OFFSETS` order.
    pub fn formation(&self, robber: usize) -> [usize; 5] {
        OFFSETS.map(|o| self.target(robber, o))
    }

    /// Rounds a cop on the path at index j may still need before it sits on
    /// its target: the distance to the end the robber can flee toward.
    pub fn potential(&self, j: usize, target: usize) -> usize {
        match j.cmp(&target) {
            std::cmp::Ordering::Less => self.m() - j,
            std::cmp::Ordering::Greater => j,
            std::cmp::Ordering::Equal => 0,
        }
    }

    /// Observation 3.2: for every path vertex p_j, |idx(U*) - j| <= d_A(r, p_j).
    pub fn check_distance_bound(&self, p: &Planarization, leader: usize, robber: usize) -> Result<(), String> {
        let Some(i) = self.index[leader] else {
            return Err(format!("leader at {} is off the path", p.label(leader)));
        };
        let from_robber = self.ambient.distances(p, robber);
        for (j, &v) in self.path.vertices.iter().enumerate() {
            if (i.abs_diff(j) as u32) > from_robber[v] {
                return Err(format!(
                    "leader index {i}, robber at {} is {} from p_{j}",
                    p.label(robber),
                    from_robber[v]
                ));
            }
        }
        Ok(())
    }
}

/// A squad guarding a path: five cops on the shadow program plus stationary
/// cops for x-crossed path edges.
#[derive(Clone, Debug)]
pub struct GuardedPath {
    pub program: ShadowPath,
    pub squad: [usize; 5],
    pub stationary: Vec<(usize, usize)>,
    pub active: bool,
}

impl GuardedPath {
    pub fn new(program: ShadowPath, squad: [usize; 5]) -> Self {
        GuardedPath { program, squad, stationary: Vec::new(), active: false }
    }

    pub fn leader(&self) -> usize {
        self.squad[0]
    }

    /// Next positions for the squad and stationary cops; marks the guard
    /// active once every one of them stands on its target.
    pub fn guard_step(&mut self, moves: &GameGraph, cops: &[usize], robber: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut settled = true;
        for (k, &cop) in self.squad.iter().enumerate() {
            let to = self.program.step(moves, cops[cop], robber, OFFSETS[k]);
            settled &= to == self.program.target(robber, OFFSETS[k]);
            out.push((cop, to));
        }
        for &(cop, v) in &self.stationary {
            let to = moves.step_toward(cops[cop], &moves.distances(&[v]));
            settled &= to == v;
            out.push((cop, to));
        }
        if settled {
            self.active = true;
        }
        out
    }
}

/// For every x-crossed path edge, the lowest-id endpoint of the edge crossing it.
pub fn place_stationary(p: &Planarization, path: &GPath, crossed: &[usize]) -> Result<Vec<usize>, GuardError> {
    let xs = x_crossings(p);
    crossed
        .iter()
        .map(|&e| {
            if !path.edges.contains(&e) {
                return Err(GuardError::NotOnPath(p.edge(e).id));
            }
            let c = p.edge(e).crossing.filter(|c| xs.contains(c)).ok_or(GuardError::NotXCrossed(p.edge(e).id))?;
            let info = p.crossing(c);
            let other = if info.edges[0] == e { info.edges[1] } else { info.edges[0] };
            let f = p.edge(other);
            Ok(if p.label(f.u) < p.label(f.v) { f.u } else { f.v })
        })
        .collect()
}

/// Static guard test on a snapshot: a G-vertex is guarded when a cop is on
/// it or next to it; a dummy when no traversal between opposite endpoints
/// can start and end away from the cops' closed neighbourhoods.
pub fn guarded_query(p: &Planarization, moves: &GameGraph, cops: &[usize], node: Node) -> bool {
    let covered = |v: usize| cops.iter().any(|&c| moves.can_move(c, v));
    match p.crossing_at(node) {
        None => covered(node),
        Some(c) => {
            let ends = p.crossing(c).ends;
            (0..4).all(|i| covered(ends[i]) || covered(ends[(i + 2) % 4]))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub before: u32,
    pub robber: u32,
    pub to: u32,
    pub via_dummy: bool,
}

/// Exhaustive check of the settled squad. For every robber position `r0`,
/// every robber move to `r` that survives the next cops' turn, and every
/// further move from `r` that lands on a G-vertex of the path or crosses a
/// non-x dummy of P^x, some cop of the formation for `r` must cover the
/// landing vertex.
pub fn two_ply_counterexamples(p: &Planarization, moves: &GameGraph, gp: &GuardedPath) -> Vec<Counterexample> {
    let prog = &gp.program;
    let xs = x_crossings(p);
    let stationary: Vec<usize> = gp.stationary.iter().map(|&(_, v)| v).collect();
    let cops_for = |r: usize| {
        let mut c = prog.formation(r).to_vec();
        c.extend(&stationary);
        c
    };
    let covers = |cops: &[usize], v: usize| cops.iter().any(|&c| moves.can_move(c, v));
    let on_path = |v: usize| prog.index_of(v).is_some();
    let guarded_dummy = |e: usize| {
        p.edge(e).crossing.is_some_and(|c| {
            !xs.contains(&c) && p.crossing(c).edges.iter().any(|f| prog.path.edges.contains(f))
        })
    };
    let mut out = Vec::new();
    for r0 in 0..p.n_g() {
        if !prog.ambient.has_vertex(r0) {
            continue;
        }
        let before = cops_for(r0);
        let mut steps: Vec<usize> = vec![r0];
        steps.extend(p.gadj(r0).iter().filter(|&&(_, e)| prog.ambient.has_edge(e)).map(|&(y, _)| y));
        for r in steps {
            if covers(&before, r) {
                continue;
            }
            let now = cops_for(r);
            for &(y, e) in p.gadj(r) {
                let lands = on_path(y);
                let crosses = guarded_dummy(e) && !prog.path.edges.contains(&e);
                if (lands || crosses) && !covers(&now, y) {
                    out.push(Counterexample { before: p.label(r0), robber: p.label(r), to: p.label(y), via_dummy: crosses });
                }
            }
        }
    }
    out
}
