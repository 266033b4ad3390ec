//! Named instances and seeded generators.
//!
//! Random graphs use ChaCha8 seeded with the recipe seed, so the same recipe
//! always yields the same bytes on every platform.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::embedding;
use crate::graph::{Edge, EdgeEnd, EdgeId, OnePlaneGraph, VertexId};
use crate::kite::x_crossings;
use crate::planar::Planarization;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown named graph {0:?}")]
    UnknownName(String),
    #[error("cannot build {0}")]
    Infeasible(String),
    #[error("bad recipe {0:?}: {1}")]
    BadRecipe(String, String),
}

pub const NAMES: &[&str] = &["K4X", "BARE_X", "TWO_X", "FIG1", "FIG2", "FIG3", "PETERSEN"];

pub fn named(id: &str) -> Result<OnePlaneGraph, CorpusError> {
    let g = match id {
        "K4X" => k4x(),
        "BARE_X" => bare_x(),
        "TWO_X" => {
            let mut g = OnePlaneGraph::from_pairs(1..=8, &[(1, 3), (2, 4), (5, 7), (6, 8), (3, 5), (4, 6), (1, 6)]);
            g.crossings = vec![[0, 1], [2, 3]];
            g
        }
        "FIG1" => fig1(),
        "FIG2" => crate::kite::augment_kites(&fig1(), true).expect("FIG1 has no x-crossing").0,
        "FIG3" => {
            // u=1 v=2 w=3 a=4 b=5 c=6 d=7 e=8
            let mut g = OnePlaneGraph::from_pairs(
                1..=8,
                &[
                    (1, 2),
                    (2, 3),
                    (1, 6),
                    (1, 4),
                    (1, 5),
                    (2, 6),
                    (3, 7),
                    (3, 8),
                    (4, 5),
                    (5, 6),
                    (6, 7),
                    (7, 8),
                ],
            );
            g.crossings = vec![[2, 1]];
            g
        }
        "PETERSEN" => {
            let mut pairs = Vec::new();
            for i in 0..5u32 {
                pairs.push((i + 1, (i + 1) % 5 + 1));
            }
            for i in 0..5u32 {
                pairs.push((i + 1, i + 6));
            }
            for i in 0..5u32 {
                pairs.push((i + 6, (i + 2) % 5 + 6));
            }
            OnePlaneGraph::from_pairs(1..=10, &pairs)
        }
        other => return Err(CorpusError::UnknownName(other.to_string())),
    };
    Ok(g)
}

fn k4x() -> OnePlaneGraph {
    let mut g = OnePlaneGraph::from_pairs(1..=4, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 3), (2, 4)]);
    g.crossings = vec![[4, 5]];
    let e = EdgeEnd::new;
    g.rotation = Some(
        [
            (1, vec![e(0, 0), e(4, 0), e(3, 1)]),
            (2, vec![e(1, 0), e(5, 0), e(0, 1)]),
            (3, vec![e(2, 0), e(4, 1), e(1, 1)]),
            (4, vec![e(3, 0), e(5, 1), e(2, 1)]),
        ]
        .into(),
    );
    g
}

fn bare_x() -> OnePlaneGraph {
    let mut g = OnePlaneGraph::from_pairs(1..=4, &[(1, 3), (2, 4)]);
    g.crossings = vec![[0, 1]];
    let e = EdgeEnd::new;
    g.rotation = Some([(1, vec![e(0, 0)]), (2, vec![e(1, 0)]), (3, vec![e(0, 1)]), (4, vec![e(1, 1)])].into());
    g
}

/// a..h are 1..8.
fn fig1() -> OnePlaneGraph {
    let mut g = OnePlaneGraph::from_pairs(
        1..=8,
        &[(1, 2), (3, 4), (1, 3), (5, 4), (5, 7), (1, 6), (7, 8), (6, 3), (6, 7)],
    );
    g.crossings = vec![[0, 1], [2, 3], [4, 5], [6, 7]];
    g
}

pub fn cycle(n: u32) -> OnePlaneGraph {
    let pairs: Vec<_> = (1..=n).map(|i| (i, i % n + 1)).collect();
    OnePlaneGraph::from_pairs(1..=n, &pairs)
}

pub fn path(n: u32) -> OnePlaneGraph {
    let pairs: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
    OnePlaneGraph::from_pairs(1..=n, &pairs)
}

pub fn complete(n: u32) -> OnePlaneGraph {
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            pairs.push((i, j));
        }
    }
    OnePlaneGraph::from_pairs(1..=n, &pairs)
}

pub fn grid(w: u32, h: u32) -> OnePlaneGraph {
    let id = |x: u32, y: u32| y * w + x + 1;
    let mut pairs = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                pairs.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < h {
                pairs.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    OnePlaneGraph::from_pairs(1..=w * h, &pairs)
}

pub fn tree(n: u32, seed: u64) -> OnePlaneGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (2..=n).map(|i| (rng.gen_range(1..i), i)).collect();
    OnePlaneGraph::from_pairs(1..=n, &pairs)
}

/// Each new vertex is joined to a random subset of a random existing clique.
pub fn chordal(n: u32, seed: u64) -> OnePlaneGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cliques: Vec<Vec<u32>> = vec![vec![1]];
    let mut pairs = Vec::new();
    for v in 2..=n {
        let base = cliques[rng.gen_range(0..cliques.len())].clone();
        let mut pick: Vec<u32> = base.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        if pick.is_empty() {
            pick.push(base[rng.gen_range(0..base.len())]);
        }
        for &u in &pick {
            pairs.push((u, v));
        }
        pick.push(v);
        cliques.push(pick);
    }
    OnePlaneGraph::from_pairs(1..=n, &pairs)
}

/// A plane multigraph under construction, with its rotation system.
struct Scaffold {
    edges: Vec<(u32, u32)>,
    rot: Vec<Vec<EdgeEnd>>,
    crossings: Vec<[EdgeId; 2]>,
}

#[derive(Clone, Copy)]
struct Dart {
    tail: u32,
    edge: usize,
}

impl Scaffold {
    fn new(n: usize) -> Self {
        Scaffold { edges: Vec::new(), rot: vec![Vec::new(); n], crossings: Vec::new() }
    }

    fn adjacent(&self, a: u32, b: u32) -> bool {
        self.edges.iter().any(|&(u, v)| (u == a && v == b) || (u == b && v == a))
    }

    /// Adds edge (x, y); each end goes right after `after_x` / `after_y` in
    /// its ring, or last when there is nothing to follow.
    fn add(&mut self, x: u32, y: u32, after_x: Option<usize>, after_y: Option<usize>) -> usize {
        let e = self.edges.len();
        self.edges.push((x, y));
        for (v, after, end) in [(x, after_x, 0u8), (y, after_y, 1u8)] {
            let ring = &mut self.rot[v as usize];
            let at = match after {
                Some(prev) => {
                    let pe = if self.edges[prev].0 == v { 0 } else { 1 };
                    ring.iter().position(|z| *z == EdgeEnd::new(prev as EdgeId, pe)).unwrap() + 1
                }
                None => ring.len(),
            };
            ring.insert(at, EdgeEnd::new(e as EdgeId, end));
        }
        e
    }

    fn faces(&self) -> Vec<Vec<Dart>> {
        let ends: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (u as usize, v as usize)).collect();
        let rot: Vec<Vec<usize>> = self.rot.iter().map(|r| r.iter().map(|z| z.edge as usize).collect()).collect();
        embedding::trace_faces(&ends, &rot)
            .into_iter()
            .map(|f| {
                f.into_iter()
                    .map(|d| {
                        let (u, v) = self.edges[d / 2];
                        Dart { tail: if d % 2 == 0 { u } else { v }, edge: d / 2 }
                    })
                    .collect()
            })
            .collect()
    }

    fn remove(&mut self, e: usize) {
        for ring in self.rot.iter_mut() {
            ring.retain(|z| z.edge as usize != e);
        }
    }

    fn into_graph(self, removed: &BTreeSet<usize>) -> OnePlaneGraph {
        let n = self.rot.len() as u32;
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(i, &(u, v))| Edge::new(i as EdgeId, u + 1, v + 1))
            .collect();
        let rotation = self
            .rot
            .into_iter()
            .enumerate()
            .map(|(v, ring)| (v as VertexId + 1, ring))
            .collect();
        OnePlaneGraph { vertices: (1..=n).collect(), edges, crossings: self.crossings, rotation: Some(rotation) }
    }
}

/// Random tree plus random chords inside faces; biased toward quadrilateral faces.
fn plane_scaffold(n: usize, rng: &mut ChaCha8Rng) -> Scaffold {
    let mut s = Scaffold::new(n);
    for i in 1..n as u32 {
        let j = rng.gen_range(0..i);
        let ring_len = s.rot[j as usize].len();
        let e = s.edges.len();
        s.edges.push((j, i));
        let at = if ring_len == 0 { 0 } else { rng.gen_range(0..ring_len) };
        s.rot[j as usize].insert(at, EdgeEnd::new(e as EdgeId, 0));
        s.rot[i as usize].push(EdgeEnd::new(e as EdgeId, 1));
    }
    let chords = rng.gen_range(n / 2..=n + n / 2);
    for _ in 0..chords {
        let faces = s.faces();
        let big: Vec<&Vec<Dart>> = faces.iter().filter(|f| f.len() >= 5).collect();
        if big.is_empty() {
            break;
        }
        let f = big[rng.gen_range(0..big.len())];
        let len = f.len();
        let mut options = Vec::new();
        let quad = len >= 5 && rng.gen_bool(0.6);
        for i in 0..len {
            let js: Vec<usize> = if quad { vec![(i + 3) % len] } else { (i + 2..i + len - 1).map(|j| j % len).collect() };
            for j in js {
                let (x, y) = (f[i].tail, f[j].tail);
                if x == y || s.adjacent(x, y) {
                    continue;
                }
                if quad {
                    let four: BTreeSet<u32> = (0..4).map(|k| f[(i + k) % len].tail).collect();
                    if four.len() < 4 {
                        continue;
                    }
                }
                options.push((i, j));
            }
        }
        if options.is_empty() {
            continue;
        }
        let (i, j) = options[rng.gen_range(0..options.len())];
        let prev = |k: usize| f[(k + len - 1) % len].edge;
        s.add(f[i].tail, f[j].tail, Some(prev(i)), Some(prev(j)));
    }
    s
}

/// Inserts a crossing pair of diagonals into some quadrilateral faces.
/// Returns the four sides of each crossing.
fn insert_crossings(s: &mut Scaffold, rng: &mut ChaCha8Rng, p: f64) -> Vec<[usize; 4]> {
    let mut quads: Vec<Vec<Dart>> = s
        .faces()
        .into_iter()
        .filter(|f| f.len() == 4 && f.iter().map(|d| d.tail).collect::<BTreeSet<_>>().len() == 4)
        .collect();
    quads.shuffle(rng);
    let mut sides = Vec::new();
    for (k, f) in quads.iter().enumerate() {
        if k > 0 && !rng.gen_bool(p) {
            continue;
        }
        let q: Vec<u32> = f.iter().map(|d| d.tail).collect();
        if s.adjacent(q[0], q[2]) || s.adjacent(q[1], q[3]) {
            continue;
        }
        let prev = |i: usize| f[(i + 3) % 4].edge;
        // A = (q0, q2), B = (q3, q1): dummy rotation [q0, q3, q2, q1]
        let a = s.add(q[0], q[2], Some(prev(0)), Some(prev(2)));
        let b = s.add(q[3], q[1], Some(prev(3)), Some(prev(1)));
        s.crossings.push([a as EdgeId, b as EdgeId]);
        sides.push([f[0].edge, f[1].edge, f[2].edge, f[3].edge]);
    }
    sides
}

fn connected_without(s: &Scaffold, removed: &BTreeSet<usize>) -> bool {
    let mut uf = embedding::UnionFind::new(s.rot.len());
    for (i, &(u, v)) in s.edges.iter().enumerate() {
        if !removed.contains(&i) {
            uf.union(u as usize, v as usize);
        }
    }
    uf.count() == 1
}

/// A connected 1-plane graph with a rotation system, crossings only inside
/// quadrilateral faces, every crossing keeping at least one kite side.
pub fn random_in_ghat(n: usize, seed: u64) -> Result<OnePlaneGraph, CorpusError> {
    if n < 4 {
        return Err(CorpusError::Infeasible(format!("ghat with n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..256 {
        let mut s = plane_scaffold(n, &mut rng);
        let sides = insert_crossings(&mut s, &mut rng, 0.8);
        if sides.is_empty() {
            continue;
        }
        let mut removed = BTreeSet::new();
        for quad in &sides {
            if !rng.gen_bool(0.4) {
                continue;
            }
            let drop = rng.gen_range(1..=2);
            let mut order = quad.to_vec();
            order.shuffle(&mut rng);
            for &e in order.iter().take(drop) {
                removed.insert(e);
                if !connected_without(&s, &removed) || !keeps_kites(&s, &removed) {
                    removed.remove(&e);
                }
            }
        }
        return Ok(finish(s, &removed));
    }
    Err(CorpusError::Infeasible(format!("ghat with n={n}")))
}

fn finish(mut s: Scaffold, removed: &BTreeSet<usize>) -> OnePlaneGraph {
    for &e in removed {
        s.remove(e);
    }
    s.into_graph(removed)
}

/// Every crossing keeps an uncrossed edge between consecutive endpoints.
fn keeps_kites(s: &Scaffold, removed: &BTreeSet<usize>) -> bool {
    let crossed: BTreeSet<usize> = s.crossings.iter().flat_map(|c| c.iter().map(|&e| e as usize)).collect();
    s.crossings.iter().all(|&[a, b]| {
        let (ea, eb) = (s.edges[a as usize], s.edges[b as usize]);
        let pairs = [(ea.0, eb.0), (eb.0, ea.1), (ea.1, eb.1), (eb.1, ea.0)];
        s.edges.iter().enumerate().any(|(i, &(u, v))| {
            !removed.contains(&i)
                && !crossed.contains(&i)
                && pairs.iter().any(|&(x, y)| (u == x && v == y) || (u == y && v == x))
        })
    })
}

/// Like `random_in_ghat`, but `gamma` crossings lose every edge joining
/// consecutive endpoints, making them x-crossings.
pub fn random_with_x(n: usize, gamma: usize, seed: u64) -> Result<OnePlaneGraph, CorpusError> {
    if gamma == 0 {
        return random_in_ghat(n, seed);
    }
    if n == 4 && gamma == 1 {
        return Ok(bare_x());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..512 {
        let mut s = plane_scaffold(n, &mut rng);
        let sides = insert_crossings(&mut s, &mut rng, 0.9);
        if sides.len() < gamma {
            continue;
        }
        let mut order: Vec<usize> = (0..sides.len()).collect();
        order.shuffle(&mut rng);
        let chosen: Vec<usize> = order[..gamma].to_vec();
        let crossed: BTreeSet<usize> = s.crossings.iter().flat_map(|c| c.iter().map(|&e| e as usize)).collect();
        let mut removed = BTreeSet::new();
        let mut ok = true;
        for &c in &chosen {
            let [a, b] = s.crossings[c];
            let (ea, eb) = (s.edges[a as usize], s.edges[b as usize]);
            let pairs = [(ea.0, eb.0), (eb.0, ea.1), (ea.1, eb.1), (eb.1, ea.0)];
            for (i, &(u, v)) in s.edges.iter().enumerate() {
                if pairs.iter().any(|&(x, y)| (u == x && v == y) || (u == y && v == x)) {
                    if crossed.contains(&i) {
                        ok = false;
                    }
                    removed.insert(i);
                }
            }
        }
        if !ok || !connected_without(&s, &removed) {
            continue;
        }
        let g = finish(s, &removed);
        let p = Planarization::build(g.clone());
        if x_crossings(&p).len() == gamma {
            return Ok(g);
        }
    }
    Err(CorpusError::Infeasible(format!("{gamma} x-crossings with n={n}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    Named(String),
    Ghat { n: usize, seed: u64 },
    XCross { n: usize, gamma: usize, seed: u64 },
    Chordal { n: u32, seed: u64 },
    Tree { n: u32, seed: u64 },
    Grid { w: u32, h: u32 },
    Cycle { n: u32 },
    Path { n: u32 },
    Complete { n: u32 },
}

impl Recipe {
    pub fn build(&self) -> Result<OnePlaneGraph, CorpusError> {
        match self {
            Recipe::Named(id) => named(id),
            Recipe::Ghat { n, seed } => random_in_ghat(*n, *seed),
            Recipe::XCross { n, gamma, seed } => random_with_x(*n, *gamma, *seed),
            Recipe::Chordal { n, seed } => Ok(chordal(*n, *seed)),
            Recipe::Tree { n, seed } => Ok(tree(*n, *seed)),
            Recipe::Grid { w, h } => Ok(grid(*w, *h)),
            Recipe::Cycle { n } => Ok(cycle(*n)),
            Recipe::Path { n } => Ok(path(*n)),
            Recipe::Complete { n } => Ok(complete(*n)),
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Recipe::Named(id) => write!(f, "named:{id}"),
            Recipe::Ghat { n, seed } => write!(f, "ghat:n={n}:seed={seed}"),
            Recipe::XCross { n, gamma, seed } => write!(f, "xcross:n={n}:gamma={gamma}:seed={seed}"),
            Recipe::Chordal { n, seed } => write!(f, "chordal:n={n}:seed={seed}"),
            Recipe::Tree { n, seed } => write!(f, "tree:n={n}:seed={seed}"),
            Recipe::Grid { w, h } => write!(f, "grid:w={w}:h={h}"),
            Recipe::Cycle { n } => write!(f, "cycle:n={n}"),
            Recipe::Path { n } => write!(f, "path:n={n}"),
            Recipe::Complete { n } => write!(f, "complete:n={n}"),
        }
    }
}

/// `kind[:key=value]*`, e.g. `ghat:n=20:seed=7` or `named:K4X`.
impl FromStr for Recipe {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, CorpusError> {
        let bad = |why: &str| CorpusError::BadRecipe(s.to_string(), why.to_string());
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        if kind == "named" {
            let id = parts.next().ok_or_else(|| bad("missing name"))?;
            return Ok(Recipe::Named(id.to_string()));
        }
        let mut n = None;
        let mut seed = 0u64;
        let mut gamma = None;
        let mut w = None;
        let mut h = None;
        for part in parts {
            let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let num: u64 = v.parse().map_err(|_| bad("expected a number"))?;
            match k {
                "n" => n = Some(num),
                "seed" => seed = num,
                "gamma" => gamma = Some(num),
                "w" => w = Some(num),
                "h" => h = Some(num),
                _ => return Err(bad("unknown key")),
            }
        }
        let need = |x: Option<u64>, name: &str| x.ok_or_else(|| bad(&format!("missing {name}")));
        Ok(match kind {
            "ghat" => Recipe::Ghat { n: need(n, "n")? as usize, seed },
            "xcross" => Recipe::XCross { n: need(n, "n")? as usize, gamma: need(gamma, "gamma")? as usize, seed },
            "chordal" => Recipe::Chordal { n: need(n, "n")? as u32, seed },
            "tree" => Recipe::Tree { n: need(n, "n")? as u32, seed },
            "grid" => Recipe::Grid { w: need(w, "w")? as u32, h: need(h, "h")? as u32 },
            "cycle" => Recipe::Cycle { n: need(n, "n")? as u32 },
            "path" => Recipe::Path { n: need(n, "n")? as u32 },
            "complete" => Recipe::Complete { n: need(n, "n")? as u32 },
            _ if NAMES.contains(&kind) => Recipe::Named(kind.to_string()),
            _ => return Err(bad("unknown kind")),
        })
    }
}
