//! Game semantics: placement round, alternating half-turns, capture, traces.
//!
//! Round 1 is placement: the cops place, then the robber. Every later round is
//! a cops' turn followed by a robber's turn. Capture is checked after every
//! half-turn.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{OnePlaneGraph, VertexId};

/// Simple adjacency of a graph on dense vertex indices (sorted labels).
/// Parallel edges collapse; crossings play no role in moves.
#[derive(Clone, Debug)]
pub struct GameGraph {
    labels: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
    closed: Vec<Vec<usize>>,
}

impl GameGraph {
    pub fn new(g: &OnePlaneGraph) -> Self {
        let mut labels = g.vertices.clone();
        labels.sort_unstable();
        labels.dedup();
        let index = |x: VertexId| labels.binary_search(&x).expect("edge endpoint is a vertex");
        let mut adj = vec![Vec::new(); labels.len()];
        for e in &g.edges {
            let (a, b) = (index(e.u), index(e.v));
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        Self::from_adjacency(labels, adj)
    }

    pub fn from_adjacency(labels: Vec<VertexId>, mut adj: Vec<Vec<usize>>) -> Self {
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        let closed = adj
            .iter()
            .enumerate()
            .map(|(v, l)| {
                let mut c = l.clone();
                c.push(v);
                c.sort_unstable();
                c
            })
            .collect();
        GameGraph { labels, adj, closed }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> VertexId {
        self.labels[v]
    }

    pub fn labels(&self) -> &[VertexId] {
        &self.labels
    }

    pub fn index(&self, label: VertexId) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// N[v], sorted.
    pub fn closed(&self, v: usize) -> &[usize] {
        &self.closed[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn can_move(&self, from: usize, to: usize) -> bool {
        from == to || self.adjacent(from, to)
    }

    /// BFS distances from all `sources`; unreachable is `u32::MAX`.
    pub fn distances(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// One step from `from` along a shortest path toward `targets` (lowest id
    /// among equal choices); stays when already there or unreachable.
    pub fn step_toward(&self, from: usize, dist: &[u32]) -> usize {
        if dist[from] == 0 || dist[from] == u32::MAX {
            return from;
        }
        *self.adj[from]
            .iter()
            .find(|&&y| dist[y] + 1 == dist[from])
            .expect("bfs parent exists")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Cops,
    Robber,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    pub cops: Vec<usize>,
    pub cops_placed: bool,
    pub robber: Option<usize>,
    pub round: u32,
    pub phase: Phase,
    pub captured: bool,
}

impl GameState {
    pub fn cop_count(&self) -> usize {
        self.cops.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Capture { vertex: VertexId },
    Parked { cop: usize, vertex: VertexId },
    GuardActive { guard: usize, squad: usize, path: Vec<VertexId> },
    IterationEnd {
        iteration: u32,
        case: String,
        config: String,
        anchors: BTreeMap<String, VertexId>,
        l_size: usize,
        free: Vec<usize>,
        checks: BTreeMap<String, bool>,
    },
    Violation { check: String, detail: String },
    Endgame { cop: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct StrategyError(pub String);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("at least one cop is required")]
    NoCops,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("game is already over")]
    Finished,
    #[error("illegal move by {strategy}: {detail}")]
    IllegalMove { strategy: String, detail: String },
    #[error("{strategy} failed: {source}")]
    Strategy { strategy: String, source: StrategyError },
}

pub trait CopStrategy {
    fn name(&self) -> String;
    fn place(&mut self, g: &GameGraph, cop_count: usize) -> Result<Vec<usize>, StrategyError>;
    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<Vec<usize>, StrategyError>;
    /// Sees the state after each robber half-turn.
    fn observe(&mut self, _g: &GameGraph, _state: &GameState) {}
    fn drain_events(&mut self) -> Vec<Event> {
        Vec::new()
    }
}

pub trait RobberStrategy {
    fn name(&self) -> String;
    fn place(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError>;
    fn step(&mut self, g: &GameGraph, state: &GameState) -> Result<usize, StrategyError>;
}

pub fn new_game(g: &GameGraph, cop_count: usize) -> Result<GameState, GameError> {
    if g.n() == 0 {
        return Err(GameError::EmptyGraph);
    }
    if cop_count == 0 {
        return Err(GameError::NoCops);
    }
    Ok(GameState { cops: vec![0; cop_count], cops_placed: false, robber: None, round: 1, phase: Phase::Cops, captured: false })
}

/// Applies one half-turn.
pub fn step(
    g: &GameGraph,
    state: &GameState,
    cops: &mut dyn CopStrategy,
    robber: &mut dyn RobberStrategy,
) -> Result<GameState, GameError> {
    if state.captured {
        return Err(GameError::Finished);
    }
    let mut next = state.clone();
    match state.phase {
        Phase::Cops => {
            let name = cops.name();
            let fail = |source| GameError::Strategy { strategy: name.clone(), source };
            let illegal = |detail: String| GameError::IllegalMove { strategy: name.clone(), detail };
            let moves = if state.cops_placed {
                cops.step(g, state).map_err(fail)?
            } else {
                cops.place(g, state.cop_count()).map_err(fail)?
            };
            if moves.len() != state.cop_count() {
                return Err(illegal(format!("returned {} positions for {} cops", moves.len(), state.cop_count())));
            }
            for (i, &to) in moves.iter().enumerate() {
                if to >= g.n() {
                    return Err(illegal(format!("cop {i} to unknown vertex index {to}")));
                }
                if state.cops_placed && !g.can_move(state.cops[i], to) {
                    return Err(illegal(format!(
                        "cop {i} from {} to {}",
                        g.label(state.cops[i]),
                        g.label(to)
                    )));
                }
            }
            next.cops = moves;
            next.cops_placed = true;
            next.phase = Phase::Robber;
        }
        Phase::Robber => {
            let name = robber.name();
            let illegal = |detail: String| GameError::IllegalMove { strategy: name.clone(), detail };
            let fail = |source| GameError::Strategy { strategy: name.clone(), source };
            let to = match state.robber {
                None => robber.place(g, state).map_err(fail)?,
                Some(r) => {
                    let to = robber.step(g, state).map_err(fail)?;
                    if to < g.n() && !g.can_move(r, to) {
                        return Err(illegal(format!("robber from {} to {}", g.label(r), g.label(to))));
                    }
                    to
                }
            };
            if to >= g.n() {
                return Err(illegal(format!("robber to unknown vertex index {to}")));
            }
            next.robber = Some(to);
            next.phase = Phase::Cops;
            next.round += 1;
        }
    }
    next.captured = next.robber.is_some_and(|r| next.cops.contains(&r));
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceHeader {
    pub graph: String,
    pub cops: String,
    pub robber: String,
    pub seed: u64,
    pub cop_count: usize,
    pub budget: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfTurn {
    pub round: u32,
    pub phase: Phase,
    pub cops: Vec<VertexId>,
    pub robber: Option<VertexId>,
    pub events: Vec<Event>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Capture,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEnd {
    pub outcome: Outcome,
    pub rounds: u32,
    pub capture_round: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub turns: Vec<HalfTurn>,
    pub end: TraceEnd,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line<'a> {
    Header(&'a TraceHeader),
    Turn(&'a HalfTurn),
    End(&'a TraceEnd),
}

impl Trace {
    pub fn captured(&self) -> bool {
        self.end.outcome == Outcome::Capture
    }

    /// Every event of every half-turn.
    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.turns.iter().flat_map(|t| t.events.iter())
    }

    pub fn violations(&self) -> Vec<(String, String)> {
        self.events()
            .filter_map(|e| match e {
                Event::Violation { check, detail } => Some((check.clone(), detail.clone())),
                _ => None,
            })
            .collect()
    }

    /// JSON Lines: header, one line per half-turn, outcome.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: Line| {
            out.push_str(&serde_json::to_string(&line).expect("trace serializes"));
            out.push('\n');
        };
        push(Line::Header(&self.header));
        for t in &self.turns {
            push(Line::Turn(t));
        }
        push(Line::End(&self.end));
        out
    }
}

pub struct RunConfig {
    pub cop_count: usize,
    pub budget: u32,
    pub seed: u64,
    pub graph_hash: String,
}

/// Plays until capture or until `budget` rounds have been played.
pub fn run(
    g: &GameGraph,
    cops: &mut dyn CopStrategy,
    robber: &mut dyn RobberStrategy,
    cfg: &RunConfig,
) -> Result<Trace, GameError> {
    let header = TraceHeader {
        graph: cfg.graph_hash.clone(),
        cops: cops.name(),
        robber: robber.name(),
        seed: cfg.seed,
        cop_count: cfg.cop_count,
        budget: cfg.budget,
    };
    let mut state = new_game(g, cfg.cop_count)?;
    let mut turns = Vec::new();
    while !state.captured && state.round <= cfg.budget {
        let next = step(g, &state, cops, robber)?;
        if next.phase == Phase::Cops {
            cops.observe(g, &next);
        }
        let mut events = cops.drain_events();
        if next.captured {
            events.push(Event::Capture { vertex: g.label(next.robber.unwrap()) });
        }
        turns.push(HalfTurn {
            round: state.round,
            phase: state.phase,
            cops: next.cops.iter().map(|&c| g.label(c)).collect(),
            robber: next.robber.map(|r| g.label(r)),
            events,
        });
        state = next;
    }
    let end = if state.captured {
        let round = turns.last().map_or(1, |t| t.round);
        TraceEnd { outcome: Outcome::Capture, rounds: round, capture_round: Some(round) }
    } else {
        TraceEnd { outcome: Outcome::Budget, rounds: state.round - 1, capture_round: None }
    };
    Ok(Trace { header, turns, end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::OnePlaneGraph;

    struct Fixed(Vec<Vec<usize>>, usize);
    impl CopStrategy for Fixed {
        fn name(&self) -> String {
            "fixed".into()
        }
        fn place(&mut self, _: &GameGraph, _: usize) -> Result<Vec<usize>, StrategyError> {
            self.1 = 1;
            Ok(self.0[0].clone())
        }
        fn step(&mut self, _: &GameGraph, _: &GameState) -> Result<Vec<usize>, StrategyError> {
            let m = self.0[self.1.min(self.0.len() - 1)].clone();
            self.1 += 1;
            Ok(m)
        }
    }

    struct Sit(usize);
    impl RobberStrategy for Sit {
        fn name(&self) -> String {
            "sit".into()
        }
        fn place(&mut self, _: &GameGraph, _: &GameState) -> Result<usize, StrategyError> {
            Ok(self.0)
        }
        fn step(&mut self, _: &GameGraph, s: &GameState) -> Result<usize, StrategyError> {
            Ok(s.robber.unwrap())
        }
    }

    fn p3() -> GameGraph {
        GameGraph::new(&OnePlaneGraph::from_pairs(1..=3, &[(1, 2), (2, 3)]))
    }

    #[test]
    fn zero_cops_rejected() {
        assert_eq!(new_game(&p3(), 0), Err(GameError::NoCops));
    }

    #[test]
    fn illegal_cop_jump_names_strategy() {
        let g = p3();
        let s = new_game(&g, 1).unwrap();
        let mut cops = Fixed(vec![vec![0], vec![2]], 0);
        let mut robber = Sit(2);
        let s = step(&g, &s, &mut cops, &mut robber).unwrap();
        let s = step(&g, &s, &mut cops, &mut robber).unwrap();
        assert!(!s.captured);
        let err = step(&g, &s, &mut cops, &mut robber).unwrap_err();
        assert!(matches!(err, GameError::IllegalMove { ref strategy, .. } if strategy == "fixed"));
    }

    #[test]
    fn adjacent_cop_captures() {
        let g = p3();
        let mut cops = Fixed(vec![vec![1], vec![2]], 0);
        let mut robber = Sit(2);
        let cfg = RunConfig { cop_count: 1, budget: 10, seed: 0, graph_hash: String::new() };
        let t = run(&g, &mut cops, &mut robber, &cfg).unwrap();
        assert!(t.captured());
        assert_eq!(t.end.capture_round, Some(2));
        assert_eq!(t.turns.len(), 3);
    }
}
