//! Built-in robbers and the simple cop strategies.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{CopStrategy, GameGraph, GameState, RobberStrategy, StrategyError};
use crate::oracle::{self, Solution};

fn robber_at(state: &GameState) -> usize {
    state.robber.expect("robber placed")
}

/// Moves that do not end on or next to a cop.
fn safe_moves(g: &GameGraph, cops: &[usize], from: usize) -> Vec<usize> {
    let dist = g.distances(cops);
    g.closed(from).iter().copied().filter(|&y| dist[y] >= 2).collect()
}

fn farthest(dist: &[u32], options: impl Iterator<Item = usize>) -> usize {
    let mut best: Option<(u32, usize)> = None;
    for y in options {
        if best.map_or(true, |(d, _)| dist[y] > d) {
            best = Some((dist[y], y));
        }
    }
    best.expect("nonempty options").1
}

/// Maximizes the distance to the nearest cop; lowest id on ties.
pub struct GreedyRobber;

impl RobberStrategy for GreedyRobber {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn place(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        Ok(farthest(&g.distances(&state.cops), 0..g.n()))
    }

    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let r = robber_at(state);
        Ok(farthest(&g.distances(&state.cops), g.closed(r).iter().copied()))
    }
}

/// Uniform over safe moves when there are any, else over all moves.
pub struct RandomRobber {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomRobber {
    pub fn new(seed: u64) -> Self {
        RandomRobber { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl RobberStrategy for RandomRobber {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn place(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let dist = g.distances(&state.cops);
        let safe: Vec<usize> = (0..g.n()).filter(|&v| dist[v] >= 2).collect();
        let all: Vec<usize> = (0..g.n()).collect();
        let pool = if safe.is_empty() { &all } else { &safe };
        Ok(*pool.choose(&mut self.rng).unwrap())
    }

    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let r = robber_at(state);
        let safe = safe_moves(g, &state.cops, r);
        let pool = if safe.is_empty() { g.closed(r).to_vec() } else { safe };
        Ok(*pool.choose(&mut self.rng).unwrap())
    }
}

/// Stays while no cop is adjacent, otherwise flees like the greedy robber.
pub struct StallRobber;

impl RobberStrategy for StallRobber {
    fn name(&self) -> String {
        "stall".into()
    }

    fn place(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        GreedyRobber.place(g, state)
    }

    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let r = robber_at(state);
        let dist = g.distances(&state.cops);
        if dist[r] >= 2 {
            return Ok(r);
        }
        Ok(farthest(&dist, g.closed(r).iter().copied()))
    }
}

/// Plays from exact tables for `min(cop count, k_max)` cops. With more cops
/// than that, each move is scored against every sub-team of that size drawn
/// from the occupied vertices and the best worst case is chosen.
pub struct OracleRobber {
    solution: Solution,
}

impl OracleRobber {
    pub fn new(g: &GameGraph, cop_count: usize, k_max: usize, cap: u64) -> Result<Self, oracle::OracleError> {
        let k = cop_count.min(k_max).max(1);
        Ok(OracleRobber { solution: oracle::solve(g, k, cap)? })
    }

    pub fn from_solution(solution: Solution) -> Self {
        OracleRobber { solution }
    }

    fn teams(&self, cops: &[usize]) -> Vec<usize> {
        let k = self.solution.k();
        let mut occupied = cops.to_vec();
        occupied.sort_unstable();
        if occupied.len() == k {
            return vec![self.solution.rank(&occupied)];
        }
        let mut counts: Vec<(usize, usize)> = Vec::new();
        for &c in &occupied {
            match counts.last_mut() {
                Some((v, m)) if *v == c => *m += 1,
                _ => counts.push((c, 1)),
            }
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(s: &Solution, counts: &[(usize, usize)], i: usize, cur: &mut Vec<usize>, out: &mut Vec<usize>) {
            if cur.len() == s.k() {
                out.push(s.rank(cur));
                return;
            }
            if i == counts.len() {
                return;
            }
            let (v, m) = counts[i];
            let room = s.k() - cur.len();
            for take in (0..=m.min(room)).rev() {
                cur.extend(std::iter::repeat(v).take(take));
                rec(s, counts, i + 1, cur, out);
                cur.truncate(cur.len() - take);
            }
        }
        rec(&self.solution, &counts, 0, &mut cur, &mut out);
        out
    }

    fn score(&self, teams: &[usize], r: usize) -> u32 {
        teams
            .iter()
            .map(|&t| self.solution.value(t, r, oracle::Side::Cops).unwrap_or(u32::MAX))
            .min()
            .unwrap_or(u32::MAX)
    }

    fn best(&self, teams: &[usize], options: impl Iterator<Item = usize>) -> usize {
        let mut best: Option<(u32, usize)> = None;
        for r in options {
            let s = self.score(teams, r);
            if best.map_or(true, |(b, _)| s > b) {
                best = Some((s, r));
            }
        }
        best.unwrap().1
    }
}

impl RobberStrategy for OracleRobber {
    fn name(&self) -> String {
        format!("oracle:k{}", self.solution.k())
    }

    fn place(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let teams = self.teams(&state.cops);
        Ok(self.best(&teams, 0..g.n()))
    }

    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let teams = self.teams(&state.cops);
        Ok(self.best(&teams, g.closed(robber_at(state)).iter().copied()))
    }
}

/// Reads robber moves as vertex labels, one per line.
pub struct InteractiveRobber<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> InteractiveRobber<R, W> {
    pub fn new(input: R, output: W) -> Self {
        InteractiveRobber { input, output }
    }

    fn ask(&mut self, g: &GameGraph, state: &GameState, options: &[usize]) -> Result<usize, StrategyError> {
        let io = |e: std::io::Error| StrategyError(e.to_string());
        let cops: Vec<String> = state.cops.iter().map(|&c| g.label(c).to_string()).collect();
        writeln!(self.output, "round {}: cops at [{}]", state.round, cops.join(", ")).map_err(io)?;
        if let Some(r) = state.robber {
            let nbrs: Vec<String> = g.neighbors(r).iter().map(|&y| g.label(y).to_string()).collect();
            writeln!(self.output, "robber at {} (neighbours: {})", g.label(r), nbrs.join(" ")).map_err(io)?;
        }
        loop {
            write!(self.output, "robber> ").map_err(io)?;
            self.output.flush().map_err(io)?;
            let mut line = String::new();
            if self.input.read_line(&mut line).map_err(io)? == 0 {
                return Err(StrategyError("end of input".into()));
            }
            let text = line.trim();
            if text.is_empty() {
                if let Some(r) = state.robber {
                    return Ok(r);
                }
                continue;
            }
            match text.parse::<u32>().ok().and_then(|l| g.index(l)) {
                Some(v) if options.contains(&v) => return Ok(v),
                _ => writeln!(self.output, "not a legal vertex: {text}").map_err(io)?,
            }
        }
    }
}

impl<R: BufRead, W: Write> RobberStrategy for InteractiveRobber<R, W> {
    fn name(&self) -> String {
        "interactive".into()
    }

    fn place(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let all: Vec<usize> = (0..g.n()).collect();
        self.ask(g, state, &all)
    }

    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError> {
        let options = g.closed(robber_at(state)).to_vec();
        self.ask(g, state, &options)
    }
}

/// Every cop starts on the lowest-id vertex and steps along a shortest path
/// toward the robber. On a tree this is the shadow of the robber on the
/// unique path.
pub struct ChaseCops;

impl CopStrategy for ChaseCops {
    fn name(&self) -> String {
        "chase".into()
    }

    fn place(&mut self, _: &GameGraph, cop_count: usize) -> Result<Vec<usize>, StrategyError> {
        Ok(vec![0; cop_count])
    }

    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<Vec<usize>, StrategyError> {
        let dist = g.distances(&[robber_at(state)]);
        Ok(state.cops.iter().map(|&c| g.step_toward(c, &dist)).collect())
    }
}

/// Cops following the exact policy for their own count.
pub struct OracleCops {
    solution: Solution,
}

impl OracleCops {
    pub fn new(solution: Solution) -> Self {
        OracleCops { solution }
    }
}

impl CopStrategy for OracleCops {
    fn name(&self) -> String {
        format!("oracle-policy:k{}", self.solution.k())
    }

    fn place(&mut self, _: &GameGraph, cop_count: usize) -> Result<Vec<usize>, StrategyError> {
        if cop_count != self.solution.k() {
            return Err(StrategyError(format!("policy is for {} cops, not {cop_count}", self.solution.k())));
        }
        Ok(self.solution.cop_placement())
    }

    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<Vec<usize>, StrategyError> {
        Ok(self.solution.cop_move(g, &state.cops, robber_at(state)))
    }
}
