//! Property suites over a generated corpus, reported as JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use copshield_core::corpus;
use copshield_core::game::{self, GameGraph, RobberStrategy, RunConfig};
use copshield_core::guard::{two_ply_counterexamples, Ambient, GuardedPath, ShadowPath};
use copshield_core::players::{GreedyRobber, RandomRobber, StallRobber};
use copshield_core::strategy::{restrict_walk, shortcut, CheckLog};
use copshield_core::territory::{boundary_no_x, check_no_x, territory_of_nodes};
use copshield_core::{gamma_prepass, EdgeId, Node, OnePlaneGraph, Planarization, Strategy21};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    /// Every game ends in capture within budget.
    Capture,
    /// I1-I4 and the strategy's bookkeeping checks.
    Invariants,
    /// Robber moves across guarded crossings.
    Obs21,
    /// Robber territories have no x-crossing.
    Obs22,
    /// Boundary extensions have no x-crossing.
    Obs23,
    /// Leader distance bound on guarded paths.
    Obs32,
    /// Two-ply capture check of a settled squad.
    Lemma31,
}

impl Suite {
    const ALL: [Suite; 7] =
        [Suite::Capture, Suite::Invariants, Suite::Obs21, Suite::Obs22, Suite::Obs23, Suite::Obs32, Suite::Lemma31];

    fn name(self) -> &'static str {
        match self {
            Suite::Capture => "capture",
            Suite::Invariants => "invariants",
            Suite::Obs21 => "obs21",
            Suite::Obs22 => "obs22",
            Suite::Obs23 => "obs23",
            Suite::Obs32 => "obs32",
            Suite::Lemma31 => "lemma31",
        }
    }

    /// Names of in-game checks that count toward the suite.
    fn logged(self) -> &'static [&'static str] {
        match self {
            Suite::Invariants => &["I1", "I2", "I3", "I4", "squad_size", "plan", "territory", "confinement"],
            Suite::Obs21 => &["obs2.1"],
            Suite::Obs22 => &["obs2.2"],
            Suite::Obs23 => &["obs2.3"],
            Suite::Obs32 => &["obs3.2"],
            Suite::Capture | Suite::Lemma31 => &[],
        }
    }

    fn needs_games(self) -> bool {
        !matches!(self, Suite::Lemma31)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mutation {
    /// Delete every uncrossed edge joining consecutive endpoints of a crossing.
    RemoveKites,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Run only these suites (repeatable); all by default.
    #[arg(long, value_enum)]
    suite: Vec<Suite>,
    /// Number of generated graphs in the corpus.
    #[arg(long, default_value_t = 24)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    mutate: Option<Mutation>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(detail());
        }
    }
}

fn corpus_graphs(count: u64, seed: u64) -> anyhow::Result<Vec<(String, OnePlaneGraph)>> {
    let mut out = Vec::new();
    for id in corpus::NAMES {
        out.push((format!("named:{id}"), corpus::named(id)?));
    }
    for s in seed..seed + count {
        let n = 4 + (s % 16) as usize;
        out.push((format!("ghat:n={n}:seed={s}"), corpus::random_in_ghat(n, s)?));
    }
    for s in seed..seed + count.div_ceil(4) {
        let (n, gamma) = (8 + (s % 8) as usize, 1 + (s % 3) as usize);
        out.push((format!("xcross:n={n}:gamma={gamma}:seed={s}"), corpus::random_with_x(n, gamma, s)?));
    }
    Ok(out)
}

fn remove_kites(g: &OnePlaneGraph) -> anyhow::Result<OnePlaneGraph> {
    let p = Planarization::new(g)?;
    let mut kites: BTreeSet<EdgeId> = BTreeSet::new();
    for c in p.crossings() {
        for (a, b) in c.consecutive_pairs() {
            for &(y, e) in p.gadj(a) {
                if y == b && p.edge(e).crossing.is_none() {
                    kites.insert(p.edge(e).id);
                }
            }
        }
    }
    Ok(g.without_edges(&kites))
}

struct Game {
    label: String,
    captured: bool,
    rounds: u32,
    log: CheckLog,
}

fn play(label: &str, g: &OnePlaneGraph, robber: &mut dyn RobberStrategy, seed: u64) -> anyhow::Result<Game> {
    let mut s = Strategy21::new(g)?;
    let n = Planarization::new(g)?.node_count() as u32;
    let cfg = RunConfig { cop_count: s.cop_count(), budget: (50 * n * n).max(1), seed, graph_hash: g.hash_hex() };
    let t = game::run(&GameGraph::new(g), &mut s, robber, &cfg)?;
    Ok(Game { label: format!("{label} vs {}", t.header.robber), captured: t.captured(), rounds: t.end.rounds, log: s.log().clone() })
}

fn games(graphs: &[(String, OnePlaneGraph)], seed: u64) -> anyhow::Result<Vec<Game>> {
    let jobs: Vec<(usize, usize)> = (0..graphs.len()).flat_map(|i| (0..3).map(move |r| (i, r))).collect();
    jobs.par_iter()
        .map(|&(i, r)| {
            let (label, g) = &graphs[i];
            let mut robber: Box<dyn RobberStrategy> = match r {
                0 => Box::new(GreedyRobber),
                1 => Box::new(RandomRobber::new(seed + i as u64)),
                _ => Box::new(StallRobber),
            };
            play(label, g, robber.as_mut(), seed + i as u64).with_context(|| label.clone())
        })
        .collect()
}

/// Node sets of guarded paths from the lowest vertex, plus the empty set.
fn probe_sets(p: &Planarization) -> Vec<BTreeSet<Node>> {
    let mut out = vec![BTreeSet::new()];
    if p.n_g() == 0 {
        return out;
    }
    let a = Ambient::component(p, 0);
    for v in 1..p.n_g() {
        if let Some(path) = a.shortest_path(p, 0, v) {
            out.push(shortcut(&restrict_walk(p, &path)).sub().nodes);
        }
    }
    out
}

fn territory_suites(label: &str, p: &Planarization, obs22: &mut Tally, obs23: &mut Tally) {
    for h in probe_sets(p) {
        for r in (0..p.n_g()).filter(|v| !h.contains(v)) {
            let Ok(view) = territory_of_nodes(p, &h, r) else { continue };
            obs22.check(check_no_x(p, &view), || format!("{label}: robber at {} with |H| = {}", p.label(r), h.len()));
            for &w in h.iter().filter(|&&w| view.adjacent(w)) {
                obs23.check(boundary_no_x(p, &view, w), || {
                    format!("{label}: boundary of {} with robber at {}", p.node_label(w), p.label(r))
                });
            }
        }
    }
}

fn programs(p: &Planarization, moves: &GameGraph) -> Vec<ShadowPath> {
    if p.n_g() == 0 {
        return Vec::new();
    }
    let a = Ambient::component(p, 0);
    (0..p.n_g())
        .filter_map(|v| a.shortest_path(p, 0, v))
        .filter_map(|path| ShadowPath::new(p, moves, a.clone(), path).ok())
        .collect()
}

fn path_suites(label: &str, g: &OnePlaneGraph, obs32: Option<&mut Tally>, lemma31: Option<&mut Tally>) -> anyhow::Result<()> {
    let p = Planarization::new(g)?;
    let moves = GameGraph::new(g);
    let progs = programs(&p, &moves);
    if let Some(t) = obs32 {
        for sp in &progs {
            for r in (0..p.n_g()).filter(|&r| sp.ambient.has_vertex(r)) {
                let res = sp.check_distance_bound(&p, sp.formation(r)[0], r);
                t.check(res.is_ok(), || format!("{label}: {}", res.unwrap_err()));
            }
        }
    }
    if let Some(t) = lemma31 {
        if p.n_g() <= 12 {
            for sp in progs {
                let end = p.label(*sp.path.vertices.last().unwrap());
                let bad = two_ply_counterexamples(&p, &moves, &GuardedPath::new(sp, [0, 1, 2, 3, 4]));
                t.check(bad.is_empty(), || format!("{label}: path to {end}: {bad:?}"));
            }
        }
    }
    Ok(())
}

pub fn run(args: VerifyArgs) -> anyhow::Result<u8> {
    let suites: BTreeSet<Suite> =
        if args.suite.is_empty() { Suite::ALL.into_iter().collect() } else { args.suite.iter().copied().collect() };
    let mut graphs = corpus_graphs(args.count, args.seed)?;
    if args.mutate == Some(Mutation::RemoveKites) {
        for (label, g) in graphs.iter_mut() {
            *g = remove_kites(g)?;
            label.push_str("+nokites");
        }
    }
    let mut tallies: BTreeMap<Suite, Tally> = suites.iter().map(|&s| (s, Tally::default())).collect();

    let played = if suites.iter().any(|s| s.needs_games()) { games(&graphs, args.seed)? } else { Vec::new() };
    for game in &played {
        if let Some(t) = tallies.get_mut(&Suite::Capture) {
            t.check(game.captured, || format!("{}: not captured in {} rounds", game.label, game.rounds));
        }
        for (&suite, t) in tallies.iter_mut() {
            for check in suite.logged() {
                t.checks += game.log.count(check);
            }
            for (check, detail) in &game.log.failed {
                if suite.logged().contains(&check.as_str()) {
                    t.failures.push(format!("{}: {check}: {detail}", game.label));
                }
            }
        }
    }

    // static checks run on the graph the strategy plays on
    for (label, g) in &graphs {
        let reduced = gamma_prepass(g)?.reduced;
        let reduced = if args.mutate == Some(Mutation::RemoveKites) { remove_kites(&reduced)? } else { reduced };
        if suites.contains(&Suite::Obs22) || suites.contains(&Suite::Obs23) {
            let p = Planarization::new(&reduced)?;
            let mut a = tallies.remove(&Suite::Obs22).unwrap_or_default();
            let mut b = tallies.remove(&Suite::Obs23).unwrap_or_default();
            territory_suites(label, &p, &mut a, &mut b);
            for (s, t) in [(Suite::Obs22, a), (Suite::Obs23, b)] {
                if suites.contains(&s) {
                    tallies.insert(s, t);
                }
            }
        }
        let mut a = tallies.remove(&Suite::Obs32);
        let mut b = tallies.remove(&Suite::Lemma31);
        path_suites(label, &reduced, a.as_mut(), b.as_mut())?;
        for (s, t) in [(Suite::Obs32, a), (Suite::Lemma31, b)] {
            if let Some(t) = t {
                tallies.insert(s, t);
            }
        }
    }

    let passed = tallies.values().all(|t| t.failures.is_empty());
    let report = json!({
        "graphs": graphs.len(),
        "games": played.len(),
        "mutation": args.mutate.map(|_| "remove-kites"),
        "suites": tallies.iter().map(|(s, t)| json!({
            "suite": s.name(),
            "checks": t.checks,
            "failures": t.failures.len(),
            "passed": t.failures.is_empty(),
            "examples": t.failures.iter().take(5).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "passed": passed,
    });
    let text = serde_json::to_string_pretty(&report)?;
    match &args.report {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| path.display().to_string())?,
        None => println!("{text}"),
    }
    for (s, t) in &tallies {
        eprintln!("{:<10} {:>8} checks  {}", s.name(), t.checks, if t.failures.is_empty() { "PASS" } else { "FAIL" });
    }
    Ok(if passed { 0 } else { 4 })
}
