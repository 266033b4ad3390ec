use proptest::prelude::*;

use copshield_core::corpus;
use copshield_core::game::{
    new_game, run, step, CopStrategy, GameError, GameGraph, GameState, Outcome, Phase, RobberStrategy, RunConfig,
    StrategyError,
};
use copshield_core::oracle::solve;
use copshield_core::players::{ChaseCops, GreedyRobber, OracleCops, OracleRobber, RandomRobber, StallRobber};
use copshield_core::OnePlaneGraph;

struct Script(Vec<usize>);

impl CopStrategy for Script {
    fn name(&self) -> String {
        "script".into()
    }
    fn place(&mut self, _: &GameGraph, _: usize) -> Result<Vec<usize>, StrategyError> {
        Ok(self.0.clone())
    }
    fn step(&mut self, _: &GameGraph, _: &GameState) -> Result<Vec<usize>, StrategyError> {
        Ok(self.0.clone())
    }
}

struct Goto(usize);

impl RobberStrategy for Goto {
    fn name(&self) -> String {
        "goto".into()
    }
    fn place(&mut self, _: &GameGraph, _: &GameState) -> Result<usize, StrategyError> {
        Ok(self.0)
    }
    fn step(&mut self, _: &GameGraph, _: &GameState) -> Result<usize, StrategyError> {
        Ok(self.0)
    }
}

fn cfg(cop_count: usize, budget: u32, seed: u64) -> RunConfig {
    RunConfig { cop_count, budget, seed, graph_hash: String::new() }
}

fn gg(g: &OnePlaneGraph) -> GameGraph {
    GameGraph::new(g)
}

#[test]
fn new_game_examples() {
    let g = gg(&corpus::named("K4X").unwrap());
    let s = new_game(&g, 3).unwrap();
    assert_eq!((s.round, s.phase, s.cop_count()), (1, Phase::Cops, 3));
    assert!(!s.cops_placed && s.robber.is_none() && !s.captured);
    assert_eq!(new_game(&g, 0), Err(GameError::NoCops));
    let empty = gg(&OnePlaneGraph::from_pairs([], &[]));
    assert_eq!(new_game(&empty, 1), Err(GameError::EmptyGraph));
}

#[test]
fn single_vertex_captures_at_placement() {
    let g = gg(&OnePlaneGraph::from_pairs([1], &[]));
    let t = run(&g, &mut ChaseCops, &mut GreedyRobber, &cfg(1, 5, 0)).unwrap();
    assert_eq!(t.end.outcome, Outcome::Capture);
    assert_eq!(t.end.capture_round, Some(1));
    assert_eq!(t.turns.len(), 2);
}

#[test]
fn adjacent_cop_steps_onto_robber() {
    let g = gg(&corpus::path(3));
    let s = new_game(&g, 1).unwrap();
    let s = step(&g, &s, &mut Script(vec![1]), &mut Goto(0)).unwrap();
    let s = step(&g, &s, &mut Script(vec![1]), &mut Goto(0)).unwrap();
    assert!(!s.captured);
    let s = step(&g, &s, &mut Script(vec![0]), &mut Goto(0)).unwrap();
    assert!(s.captured);
    assert!(matches!(step(&g, &s, &mut Script(vec![0]), &mut Goto(0)), Err(GameError::Finished)));
}

#[test]
fn quiet_round_advances() {
    let g = gg(&corpus::path(4));
    let mut s = new_game(&g, 1).unwrap();
    for _ in 0..4 {
        s = step(&g, &s, &mut Script(vec![0]), &mut Goto(3)).unwrap();
    }
    assert_eq!((s.round, s.phase, s.captured), (3, Phase::Cops, false));
}

#[test]
fn p3_robber_cannot_escape() {
    // cop on b, robber on a, robber to move: every option is caught within a round
    let g = gg(&corpus::path(3));
    let start = GameState { cops: vec![1], cops_placed: true, robber: Some(0), round: 1, phase: Phase::Robber, captured: false };
    for &r in g.closed(0) {
        let s = step(&g, &start, &mut Script(vec![1]), &mut Goto(r)).unwrap();
        assert!(g.distances(&s.cops)[r] <= 1);
        if s.captured {
            continue;
        }
        let s = step(&g, &s, &mut Script(vec![r]), &mut Goto(r)).unwrap();
        assert!(s.captured);
    }
}

#[test]
fn illegal_moves_name_the_strategy() {
    let g = gg(&corpus::path(4));
    let s = new_game(&g, 1).unwrap();
    let s = step(&g, &s, &mut Script(vec![0]), &mut Goto(3)).unwrap();
    let s = step(&g, &s, &mut Script(vec![0]), &mut Goto(3)).unwrap();
    match step(&g, &s, &mut Script(vec![2]), &mut Goto(3)) {
        Err(GameError::IllegalMove { strategy, .. }) => assert_eq!(strategy, "script"),
        other => panic!("{other:?}"),
    }
    let s = step(&g, &s, &mut Script(vec![0]), &mut Goto(3)).unwrap();
    match step(&g, &s, &mut Script(vec![0]), &mut Goto(1)) {
        Err(GameError::IllegalMove { strategy, .. }) => assert_eq!(strategy, "goto"),
        other => panic!("{other:?}"),
    }
    let s = new_game(&g, 2).unwrap();
    assert!(matches!(step(&g, &s, &mut Script(vec![0]), &mut Goto(3)), Err(GameError::IllegalMove { .. })));
}

#[test]
fn tree_one_chaser_captures_within_order() {
    for seed in 0..40 {
        let tree = corpus::tree(3 + (seed % 15) as u32, seed);
        let g = gg(&tree);
        let robbers: Vec<Box<dyn RobberStrategy>> =
            vec![Box::new(GreedyRobber), Box::new(StallRobber), Box::new(RandomRobber::new(seed))];
        for mut r in robbers {
            let t = run(&g, &mut ChaseCops, r.as_mut(), &cfg(1, 500, seed)).unwrap();
            assert!(t.captured(), "seed {seed}");
            assert!(t.end.rounds as usize <= g.n(), "seed {seed}: {} rounds", t.end.rounds);
        }
    }
}

#[test]
fn c6_one_chaser_runs_out() {
    let g = gg(&corpus::cycle(6));
    let t = run(&g, &mut ChaseCops, &mut GreedyRobber, &cfg(1, 200, 0)).unwrap();
    assert_eq!(t.end.outcome, Outcome::Budget);
    assert_eq!(t.end.rounds, 200);
}

#[test]
fn c6_two_oracle_cops_capture() {
    let g = gg(&corpus::cycle(6));
    let sol = solve(&g, 2, 1 << 20).unwrap();
    assert!(sol.cop_win());
    let robbers: Vec<Box<dyn RobberStrategy>> = vec![
        Box::new(GreedyRobber),
        Box::new(StallRobber),
        Box::new(RandomRobber::new(7)),
        Box::new(OracleRobber::new(&g, 2, 3, 1 << 20).unwrap()),
    ];
    for mut r in robbers {
        let t = run(&g, &mut OracleCops::new(sol.clone()), r.as_mut(), &cfg(2, 100, 0)).unwrap();
        assert!(t.captured(), "{}", t.header.robber);
    }
}

#[test]
fn traces_replay_identically() {
    let g = gg(&corpus::grid(4, 4));
    let play = |seed| run(&g, &mut ChaseCops, &mut RandomRobber::new(seed), &cfg(2, 60, seed)).unwrap().to_jsonl();
    assert_eq!(play(11), play(11));
    let lines: Vec<serde_json::Value> = play(11).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["kind"], "header");
    assert_eq!(lines.last().unwrap()["kind"], "end");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transitions_are_legal_and_capture_is_sound(seed in 0u64..10_000, n in 4usize..20, k in 1usize..4) {
        let g = gg(&corpus::random_in_ghat(n, seed).unwrap());
        let mut cops = ChaseCops;
        let mut robber = RandomRobber::new(seed);
        let mut s = new_game(&g, k).unwrap();
        while !s.captured && s.round <= 40 {
            let next = step(&g, &s, &mut cops, &mut robber).unwrap();
            if s.cops_placed {
                for (a, b) in s.cops.iter().zip(&next.cops) {
                    prop_assert!(g.can_move(*a, *b));
                }
            }
            if let (Some(a), Some(b)) = (s.robber, next.robber) {
                prop_assert!(g.can_move(a, b));
            }
            prop_assert_eq!(next.captured, next.robber.is_some_and(|r| next.cops.contains(&r)));
            s = next;
        }
    }
}
