//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use copshield_core::corpus;
use copshield_core::game::{run, GameGraph, RobberStrategy, RunConfig, Trace};
use copshield_core::guard::{two_ply_counterexamples, Ambient, GPath, GuardedPath, ShadowPath};
use copshield_core::oracle::{self, DEFAULT_CAP};
use copshield_core::players::{GreedyRobber, OracleRobber, RandomRobber, StallRobber};
use copshield_core::strategy::CheckLog;
use copshield_core::{augment_kites, OnePlaneGraph, Planarization, Strategy21};

const GHAT_SEEDS: u64 = 200;
const ORACLE_ROBBER_TEAM: usize = 3;

fn ghat_graph(seed: u64) -> OnePlaneGraph {
    let n = 4 + (seed % 22) as usize;
    corpus::random_in_ghat(n, seed).expect("generator")
}

fn robbers(seed: u64) -> Vec<Box<dyn RobberStrategy + Send>> {
    vec![
        Box::new(GreedyRobber),
        Box::new(RandomRobber::new(seed)),
        Box::new(RandomRobber::new(seed + 1_000)),
        Box::new(RandomRobber::new(seed + 2_000)),
        Box::new(StallRobber),
    ]
}

struct Outcome {
    label: String,
    captured: bool,
    rounds: u32,
    budget: u32,
    log: CheckLog,
    trace: Trace,
}

fn play(g: &OnePlaneGraph, robber: &mut dyn RobberStrategy, seed: u64, label: String) -> Outcome {
    let mut s = Strategy21::new(g).expect("strategy");
    let n = s.planarization().node_count() as u32;
    let budget = 50 * n * n;
    let cfg = RunConfig { cop_count: s.cop_count(), budget, seed, graph_hash: g.hash_hex() };
    let trace = run(&GameGraph::new(g), &mut s, robber, &cfg).expect("game");
    Outcome {
        label,
        captured: trace.captured(),
        rounds: trace.end.rounds,
        budget,
        log: s.log().clone(),
        trace,
    }
}

fn report(id: u32, ok: bool, detail: String) -> bool {
    println!("criterion {id}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

fn first_failures(items: &[String]) -> String {
    items.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

fn criterion_one() -> (bool, Vec<Outcome>) {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..GHAT_SEEDS)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let g = ghat_graph(seed);
            robbers(seed)
                .into_iter()
                .map(move |mut r| {
                    let label = format!("seed {seed} {}", r.name());
                    play(&g, r.as_mut(), seed, label)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let elapsed = start.elapsed();
    let missed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.captured || o.rounds > o.budget)
        .map(|o| o.label.clone())
        .collect();
    let max = outcomes.iter().map(|o| o.rounds).max().unwrap_or(0);
    let ok = missed.is_empty() && elapsed <= Duration::from_secs(600);
    let detail = if missed.is_empty() {
        format!("{} games captured, longest {max} rounds, {:.1}s", outcomes.len(), elapsed.as_secs_f64())
    } else {
        format!("{} of {} games escaped: {}", missed.len(), outcomes.len(), first_failures(&missed))
    };
    (report(1, ok, detail), outcomes)
}

fn criterion_two() -> bool {
    let mut graphs: Vec<(String, OnePlaneGraph)> = corpus::NAMES
        .iter()
        .map(|&name| (name.to_string(), corpus::named(name).unwrap()))
        .filter(|(_, g)| g.vertices.len() <= 10)
        .collect();
    graphs.extend((0..GHAT_SEEDS).map(|s| (format!("ghat seed {s}"), ghat_graph(s))).filter(|(_, g)| g.vertices.len() <= 10));
    let results: Vec<(String, bool)> = graphs
        .par_iter()
        .map(|(name, g)| {
            let gg = GameGraph::new(g);
            let cops = Strategy21::new(g).unwrap().cop_count();
            let mut robber = OracleRobber::new(&gg, cops, ORACLE_ROBBER_TEAM, DEFAULT_CAP).expect("oracle");
            let o = play(g, &mut robber, 0, name.clone());
            (name.clone(), o.captured && o.log.violations() == 0)
        })
        .collect();
    let bad: Vec<String> = results.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.clone()).collect();
    let detail = if bad.is_empty() {
        format!("{} graphs, oracle robber captured on each", results.len())
    } else {
        format!("escaped on {}", first_failures(&bad))
    };
    report(2, bad.is_empty(), detail)
}

fn criterion_three(outcomes: &[Outcome]) -> bool {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut failed = Vec::new();
    for o in outcomes {
        for (check, n) in &o.log.passed {
            *counts.entry(check.clone()).or_default() += n;
        }
        for (check, detail) in &o.log.failed {
            failed.push(format!("{}: {check}: {detail}", o.label));
        }
    }
    let families = ["I1", "I2", "I3", "I4", "obs2.1", "obs2.2", "obs2.3", "obs3.2"];
    let unexercised: Vec<&str> = families.iter().copied().filter(|f| !counts.contains_key(*f)).collect();
    let ok = failed.is_empty() && unexercised.is_empty();
    let detail = if !failed.is_empty() {
        format!("{} violations: {}", failed.len(), first_failures(&failed))
    } else if !unexercised.is_empty() {
        format!("never evaluated: {}", unexercised.join(", "))
    } else {
        let parts: Vec<String> = families.iter().map(|f| format!("{f}={}", counts[*f])).collect();
        format!("0 violations; {}", parts.join(" "))
    };
    report(3, ok, detail)
}

/// Every shortest G-path from `root`, parallel edges counted separately.
fn all_shortest_paths(p: &Planarization, a: &Ambient, root: usize) -> Vec<GPath> {
    let dist = a.distances(p, root);
    let mut out = Vec::new();
    let mut stack = vec![GPath::single(root)];
    while let Some(path) = stack.pop() {
        let x = *path.vertices.last().unwrap();
        out.push(path.clone());
        for &(y, e) in p.gadj(x) {
            if a.has_edge(e) && dist[y] == dist[x] + 1 {
                let mut next = path.clone();
                next.vertices.push(y);
                next.edges.push(e);
                stack.push(next);
            }
        }
    }
    out
}

fn criterion_four() -> bool {
    let graphs: Vec<(u64, OnePlaneGraph)> =
        (0..GHAT_SEEDS).map(|s| (s, ghat_graph(s))).filter(|(_, g)| g.vertices.len() <= 10).collect();
    let results: Vec<(usize, Vec<String>)> = graphs
        .par_iter()
        .map(|(seed, g)| {
            let (g, _) = augment_kites(g, true).expect("graph in the class");
            let p = Planarization::new(&g).unwrap();
            let moves = GameGraph::new(&g);
            let a = Ambient::component(&p, 0);
            let mut bad = Vec::new();
            let paths = all_shortest_paths(&p, &a, 0);
            for path in &paths {
                let sp = ShadowPath::new(&p, &moves, a.clone(), path.clone()).expect("shortest");
                let gp = GuardedPath::new(sp, [0, 1, 2, 3, 4]);
                for c in two_ply_counterexamples(&p, &moves, &gp) {
                    bad.push(format!("seed {seed} path {:?}: {c:?}", path.vertices));
                }
            }
            (paths.len(), bad)
        })
        .collect();
    let total: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();
    let detail = if bad.is_empty() {
        format!("{} graphs, {total} shortest paths, no counterexample", graphs.len())
    } else {
        format!("{} counterexamples: {}", bad.len(), first_failures(&bad))
    };
    report(4, bad.is_empty(), detail)
}

fn criterion_five() -> bool {
    let cases: Vec<(usize, u64)> = (1..=3).flat_map(|gamma| (0..40).map(move |s| (gamma, s))).collect();
    let results: Vec<(String, bool)> = cases
        .par_iter()
        .flat_map_iter(|&(gamma, seed)| {
            let n = 8 + (seed % 13) as usize;
            let g = corpus::random_with_x(n, gamma, seed).expect("generator");
            let parked = Strategy21::new(&g).unwrap().cop_count() - 21;
            robbers(seed)
                .into_iter()
                .map(|mut r| {
                    let label = format!("gamma {gamma} seed {seed} {}", r.name());
                    let o = play(&g, r.as_mut(), seed, label.clone());
                    (label, parked == gamma && o.captured && o.log.violations() == 0)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let bad: Vec<String> = results.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.clone()).collect();
    let detail = if bad.is_empty() {
        format!("{} games with gamma in 1..=3, all captured", results.len())
    } else {
        format!("{} failures: {}", bad.len(), first_failures(&bad))
    };
    report(5, bad.is_empty(), detail)
}

fn criterion_six() -> bool {
    let mut bad = Vec::new();
    let number = |g: &OnePlaneGraph| oracle::cop_number(&GameGraph::new(g), 3, DEFAULT_CAP).expect("oracle");
    for n in 2..=12 {
        for seed in 0..3 {
            if number(&corpus::tree(n, seed)) != Some(1) {
                bad.push(format!("tree n={n} seed={seed}"));
            }
        }
    }
    for n in 4..=8 {
        if number(&corpus::cycle(n)) != Some(2) {
            bad.push(format!("C{n}"));
        }
    }
    for n in 1..=8 {
        if number(&corpus::complete(n)) != Some(1) {
            bad.push(format!("K{n}"));
        }
    }
    if number(&corpus::named("PETERSEN").unwrap()) != Some(3) {
        bad.push("Petersen".into());
    }
    let chordal: Vec<String> = (0..100u64)
        .into_par_iter()
        .filter_map(|seed| {
            let g = GameGraph::new(&corpus::chordal(4 + (seed % 9) as u32, seed));
            let win = oracle::cop_win(&g, 1, DEFAULT_CAP).expect("oracle");
            let (dis, _) = oracle::dismantlable(&g);
            (!win || dis != win).then(|| format!("chordal seed {seed}"))
        })
        .collect();
    bad.extend(chordal);
    let detail = if bad.is_empty() {
        "trees, cycles, complete graphs, Petersen and 100 chordal graphs match".to_string()
    } else {
        format!("mismatch on {}", first_failures(&bad))
    };
    report(6, bad.is_empty(), detail)
}

fn criterion_seven() -> bool {
    let mut bad = Vec::new();
    for seed in [3u64, 17, 42] {
        let g = ghat_graph(seed);
        let once = play(&g, &mut RandomRobber::new(seed), seed, String::new()).trace.to_jsonl();
        let twice = play(&g, &mut RandomRobber::new(seed), seed, String::new()).trace.to_jsonl();
        if once != twice {
            bad.push(format!("seed {seed}"));
        }
    }
    let g = corpus::random_with_x(12, 2, 5).unwrap();
    let a = play(&g, &mut GreedyRobber, 5, String::new()).trace.to_jsonl();
    let b = play(&g, &mut GreedyRobber, 5, String::new()).trace.to_jsonl();
    if a != b {
        bad.push("gamma graph".into());
    }
    let detail = if bad.is_empty() { "repeated runs give byte-identical traces".to_string() } else { first_failures(&bad) };
    report(7, bad.is_empty(), detail)
}

fn main() {
    let (one, outcomes) = criterion_one();
    let results = [one, criterion_two(), criterion_three(&outcomes), criterion_four(), criterion_five(), criterion_six(), criterion_seven()];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
