//! Exact k-cop game solver by retrograde analysis, plus dismantlability.
//!
//! Cop positions are sorted multisets ranked by the combinatorial number
//! system: a sorted tuple `c0 <= c1 <= ..` maps to the strictly increasing
//! `c_i + i`, whose colex rank is `sum C(c_i + i, i + 1)`. A position is
//! `(config, robber, side)`; its value is the number of half-turns until
//! capture under optimal play, or `None` when the robber escapes forever.

use std::collections::VecDeque;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::game::GameGraph;
use crate::graph::VertexId;

pub const DEFAULT_CAP: u64 = 50_000_000;
const UNRESOLVED: u32 = u32::MAX;
const CACHE_MAGIC: &[u8; 4] = b"CSOR";
const CACHE_VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{positions} positions exceed the cap of {cap}")]
    CapExceeded { positions: u64, cap: u64 },
    #[error("k must be at least 1")]
    ZeroCops,
    #[error("bad policy cache file {0}")]
    BadCache(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Cops = 0,
    Robber = 1,
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of positions for `k` cops on `n` vertices.
pub fn position_count(n: usize, k: usize) -> u64 {
    binom((n + k).saturating_sub(1) as u64, k as u64) * n as u64 * 2
}

#[derive(Clone, Debug)]
pub struct Solution {
    n: usize,
    k: usize,
    table: Vec<Vec<u64>>,
    configs: Vec<Vec<usize>>,
    values: Vec<u32>,
}

impl Solution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn config_count(&self) -> usize {
        self.configs.len()
    }

    pub fn position_count(&self) -> usize {
        self.values.len()
    }

    pub fn config(&self, rank: usize) -> &[usize] {
        &self.configs[rank]
    }

    /// Rank of a sorted multiset of length k.
    pub fn rank(&self, sorted: &[usize]) -> usize {
        sorted
            .iter()
            .enumerate()
            .map(|(i, &c)| self.table[c + i][i + 1])
            .sum::<u64>() as usize
    }

    pub fn rank_of(&self, cops: &[usize]) -> usize {
        let mut s = cops.to_vec();
        s.sort_unstable();
        self.rank(&s)
    }

    fn pos(&self, config: usize, robber: usize, side: Side) -> usize {
        (config * self.n + robber) * 2 + side as usize
    }

    /// Half-turns to capture with optimal play, `None` if the robber escapes.
    pub fn value(&self, config: usize, robber: usize, side: Side) -> Option<u32> {
        let v = self.values[self.pos(config, robber, side)];
        (v != UNRESOLVED).then_some(v)
    }

    fn value_or_max(&self, config: usize, robber: usize, side: Side) -> u32 {
        self.values[self.pos(config, robber, side)]
    }

    /// Whether k cops have a placement from which they win against every robber placement.
    pub fn cop_win(&self) -> bool {
        (0..self.configs.len()).any(|c| (0..self.n).all(|r| self.value(c, r, Side::Cops).is_some()))
    }

    /// Cop placement minimizing the worst-case capture time (lowest rank on ties).
    pub fn cop_placement(&self) -> Vec<usize> {
        let best = (0..self.configs.len())
            .min_by_key(|&c| {
                let worst = (0..self.n).map(|r| self.value_or_max(c, r, Side::Cops)).max().unwrap_or(0);
                (worst, c)
            })
            .unwrap_or(0);
        self.configs[best].clone()
    }

    pub fn robber_placement(&self, cops: &[usize]) -> usize {
        let c = self.rank_of(cops);
        self.best_robber(c, 0..self.n)
    }

    fn best_robber(&self, c: usize, options: impl Iterator<Item = usize>) -> usize {
        let mut best = None;
        for r in options {
            let v = self.value_or_max(c, r, Side::Cops);
            if best.map_or(true, |(bv, _)| v > bv) {
                best = Some((v, r));
            }
        }
        best.map(|(_, r)| r).expect("at least one option")
    }

    /// Robber move from `robber` against cops: maximizes time to capture.
    pub fn robber_move(&self, g: &GameGraph, cops: &[usize], robber: usize) -> usize {
        let c = self.rank_of(cops);
        self.best_robber(c, g.closed(robber).iter().copied())
    }

    /// New positions for `cops` (in the given order) minimizing time to capture.
    pub fn cop_move(&self, g: &GameGraph, cops: &[usize], robber: usize) -> Vec<usize> {
        let mut best: Option<(u32, usize, Vec<usize>)> = None;
        for_each_move(g, cops, |next| {
            let c = self.rank_of(next);
            let v = self.value_or_max(c, robber, Side::Robber);
            if best.as_ref().map_or(true, |(bv, bc, _)| (v, c) < (*bv, *bc)) {
                best = Some((v, c, next.to_vec()));
            }
        });
        best.unwrap().2
    }

    pub fn save(&self, path: &Path) -> Result<(), OracleError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(CACHE_MAGIC)?;
        f.write_all(&[CACHE_VERSION])?;
        f.write_all(&(self.n as u32).to_le_bytes())?;
        f.write_all(&(self.k as u32).to_le_bytes())?;
        f.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            f.write_all(&v.to_le_bytes())?;
        }
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path, g: &GameGraph, k: usize) -> Result<Solution, OracleError> {
        let bad = || OracleError::BadCache(path.to_path_buf());
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 21 || &bytes[..4] != CACHE_MAGIC || bytes[4] != CACHE_VERSION {
            return Err(bad());
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let (n, kk) = (u32_at(5) as usize, u32_at(9) as usize);
        let len = u64::from_le_bytes(bytes[13..21].try_into().unwrap()) as usize;
        if n != g.n() || kk != k || bytes.len() != 21 + 4 * len {
            return Err(bad());
        }
        let mut s = skeleton(g.n(), k);
        if len != s.configs.len() * n * 2 {
            return Err(bad());
        }
        s.values = (0..len).map(|i| u32_at(21 + 4 * i)).collect();
        Ok(s)
    }
}

/// Calls `f` with every joint move of `cops` (each stays or steps), in
/// lexicographic order of the per-cop choices.
fn for_each_move(g: &GameGraph, cops: &[usize], mut f: impl FnMut(&[usize])) {
    let k = cops.len();
    let mut idx = vec![0usize; k];
    let mut cur: Vec<usize> = cops.iter().map(|&c| g.closed(c)[0]).collect();
    loop {
        f(&cur);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < g.closed(cops[i]).len() {
                cur[i] = g.closed(cops[i])[idx[i]];
                break;
            }
            idx[i] = 0;
            cur[i] = g.closed(cops[i])[0];
        }
    }
}

fn skeleton(n: usize, k: usize) -> Solution {
    let top = n + k + 1;
    let table: Vec<Vec<u64>> = (0..top).map(|a| (0..=k + 1).map(|b| binom(a as u64, b as u64)).collect()).collect();
    let count = binom((n + k).saturating_sub(1) as u64, k as u64) as usize;
    let mut s = Solution { n, k, table, configs: vec![Vec::new(); count], values: Vec::new() };
    let mut cur = Vec::with_capacity(k);
    fn rec(s: &mut Solution, cur: &mut Vec<usize>, from: usize) {
        if cur.len() == s.k {
            let r = s.rank(cur);
            s.configs[r] = cur.clone();
            return;
        }
        for c in from..s.n {
            cur.push(c);
            rec(s, cur, c);
            cur.pop();
        }
    }
    if n > 0 {
        rec(&mut s, &mut cur, 0);
    }
    s
}

pub fn solve(g: &GameGraph, k: usize, cap: u64) -> Result<Solution, OracleError> {
    if k == 0 {
        return Err(OracleError::ZeroCops);
    }
    let n = g.n();
    let positions = position_count(n, k);
    if positions > cap {
        return Err(OracleError::CapExceeded { positions, cap });
    }
    let mut s = skeleton(n, k);
    let nc = s.configs.len();
    let succ: Vec<Vec<u32>> = (0..nc)
        .map(|c| {
            let mut out = Vec::new();
            for_each_move(g, &s.configs[c], |next| out.push(s.rank_of(next) as u32));
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    let mut values = vec![UNRESOLVED; nc * n * 2];
    let mut counter: Vec<u16> = vec![0; nc * n];
    let mut queue = VecDeque::new();
    for c in 0..nc {
        for r in 0..n {
            counter[c * n + r] = g.closed(r).len() as u16;
            if s.configs[c].contains(&r) {
                for side in [Side::Cops, Side::Robber] {
                    let p = s.pos(c, r, side);
                    values[p] = 0;
                    queue.push_back(p);
                }
            }
        }
    }
    while let Some(p) = queue.pop_front() {
        let d = values[p];
        let (c, r, side) = (p / 2 / n, (p / 2) % n, p % 2);
        if side == Side::Cops as usize {
            for &r0 in g.closed(r) {
                let q = s.pos(c, r0, Side::Robber);
                if values[q] != UNRESOLVED {
                    continue;
                }
                counter[c * n + r0] -= 1;
                if counter[c * n + r0] == 0 {
                    values[q] = d + 1;
                    queue.push_back(q);
                }
            }
        } else {
            for &c0 in &succ[c] {
                let q = s.pos(c0 as usize, r, Side::Cops);
                if values[q] == UNRESOLVED {
                    values[q] = d + 1;
                    queue.push_back(q);
                }
            }
        }
    }
    s.values = values;
    Ok(s)
}

/// Solves, reading and writing `dir/<hash>-k<k>.bin` when a cache directory is given.
pub fn solve_cached(g: &GameGraph, k: usize, cap: u64, dir: Option<&Path>, hash: &str) -> Result<Solution, OracleError> {
    let path = dir.map(|d| d.join(format!("{hash}-k{k}.bin")));
    if let Some(p) = &path {
        if p.exists() {
            if let Ok(s) = Solution::load(p, g, k) {
                return Ok(s);
            }
        }
    }
    let s = solve(g, k, cap)?;
    if let Some(p) = &path {
        std::fs::create_dir_all(p.parent().unwrap())?;
        s.save(p)?;
    }
    Ok(s)
}

pub fn cop_win(g: &GameGraph, k: usize, cap: u64) -> Result<bool, OracleError> {
    Ok(solve(g, k, cap)?.cop_win())
}

/// Least k <= k_max with a cop win, `None` if there is none.
pub fn cop_number(g: &GameGraph, k_max: usize, cap: u64) -> Result<Option<usize>, OracleError> {
    for k in 1..=k_max {
        if cop_win(g, k, cap)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Repeatedly removes the lowest-id vertex u with N[u] ⊆ N[v] for another v.
/// Returns whether one vertex (or none) remains, and the removal order.
pub fn dismantlable(g: &GameGraph) -> (bool, Vec<VertexId>) {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut left = n;
    let mut order = Vec::new();
    let dominated = |u: usize, v: usize, alive: &[bool]| {
        g.closed(u).iter().all(|&x| !alive[x] || x == v || g.adjacent(v, x))
    };
    while left > 1 {
        let corner = (0..n).find(|&u| {
            alive[u]
                && g.closed(u)
                    .iter()
                    .any(|&v| v != u && alive[v] && dominated(u, v, &alive))
        });
        match corner {
            Some(u) => {
                alive[u] = false;
                left -= 1;
                order.push(g.label(u));
            }
            None => break,
        }
    }
    (left <= 1, order)
}
