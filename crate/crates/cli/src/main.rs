use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use copshield_core::corpus::Recipe;
use copshield_core::game::{run, CopStrategy, GameGraph, RobberStrategy, RunConfig, Trace};
use copshield_core::oracle::{self, OracleError, DEFAULT_CAP};
use copshield_core::players::{ChaseCops, GreedyRobber, InteractiveRobber, OracleCops, OracleRobber, RandomRobber, StallRobber};
use copshield_core::{detect_x_crossings, validate, OnePlaneGraph, Planarization, Strategy21};

mod verify;

const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VIOLATION: u8 = 4;
const EXIT_CAP: u8 = 5;

/// A failure carrying its exit code.
struct Fail(u8, String);

impl From<anyhow::Error> for Fail {
    fn from(e: anyhow::Error) -> Self {
        Fail(EXIT_INVALID, format!("{e:#}"))
    }
}

type Res = Result<u8, Fail>;

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(EXIT_INVALID, msg.into())
}

#[derive(Parser)]
#[command(name = "copshield", version, about = "Cops and robbers on 1-planar graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a graph file or recipe against the format rules.
    Validate(Input),
    /// Print the planarization G^x as JSON.
    Planarize(Input),
    /// List the x-crossings.
    Detect(Input),
    /// Write a generated graph as JSON.
    Generate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play one game.
    Simulate(Sim),
    /// Compute the cop number with the exact solver.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        max_cops: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Play many games in parallel, one per seed.
    Batch(Batch),
    /// Run the property suites over a corpus.
    Verify(verify::VerifyArgs),
}

#[derive(Args, Clone)]
struct Input {
    #[arg(long, conflicts_with = "recipe", required_unless_present = "recipe")]
    graph: Option<PathBuf>,
    /// e.g. `ghat:n=20:seed=7`, `xcross:n=12:gamma=2:seed=1`, `named:K4X`
    #[arg(long)]
    recipe: Option<String>,
}

impl Input {
    fn load(&self) -> Result<OnePlaneGraph, Fail> {
        let g = match (&self.graph, &self.recipe) {
            (Some(path), _) => OnePlaneGraph::load(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?,
            (None, Some(spec)) => build(spec)?,
            (None, None) => return Err(invalid("one of --graph or --recipe is required")),
        };
        Ok(g)
    }
}

fn build(spec: &str) -> Result<OnePlaneGraph, Fail> {
    let recipe: Recipe = spec.parse().map_err(|e| invalid(format!("{e}")))?;
    recipe.build().map_err(|e| invalid(format!("{e}")))
}

fn valid(g: &OnePlaneGraph) -> Result<(), Fail> {
    let report = validate(g);
    if report.is_empty() {
        Ok(())
    } else {
        Err(invalid(report.messages().join("\n")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Cops {
    Strategy21,
    /// Exact policy from the solver; needs --cop-count.
    Oracle,
    /// Every cop walks straight at the robber.
    Chase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Robber {
    Greedy,
    Random,
    Stall,
    Oracle,
    Interactive,
}

#[derive(Args)]
struct Play {
    #[arg(long, value_enum, default_value = "strategy21")]
    cops: Cops,
    /// Defaults to 21 plus one per x-crossing for strategy21, 1 otherwise.
    #[arg(long)]
    cop_count: Option<usize>,
    #[arg(long, value_enum, default_value = "greedy")]
    robber: Robber,
    /// Defaults to 50 |V(G^x)|^2.
    #[arg(long)]
    budget: Option<u32>,
    /// Team size the oracle robber plans against.
    #[arg(long, default_value_t = 3)]
    oracle_k: usize,
}

#[derive(Args)]
struct Sim {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    play: Play,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct Batch {
    /// Recipe without the seed, e.g. `ghat:n=20`.
    #[arg(long)]
    recipe: String,
    /// Half-open range `a..b`.
    #[arg(long, default_value = "0..10")]
    seeds: String,
    #[command(flatten)]
    play: Play,
    /// One trace file per seed goes here.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("COPSHIELD_CACHE").map(PathBuf::from)
}

fn oracle_fail(e: OracleError) -> Fail {
    match e {
        OracleError::CapExceeded { .. } => Fail(EXIT_CAP, e.to_string()),
        _ => invalid(e.to_string()),
    }
}

fn default_budget(g: &OnePlaneGraph) -> Result<u32, Fail> {
    let n = Planarization::new(g).map_err(|e| invalid(e.to_string()))?.node_count() as u32;
    Ok((50 * n * n).max(1))
}

fn cop_player(g: &OnePlaneGraph, moves: &GameGraph, play: &Play) -> Result<(Box<dyn CopStrategy>, usize), Fail> {
    Ok(match play.cops {
        Cops::Strategy21 => {
            let s = Strategy21::new(g).map_err(|e| invalid(e.to_string()))?;
            let k = play.cop_count.unwrap_or(s.cop_count());
            (Box::new(s), k)
        }
        Cops::Oracle => {
            let k = play.cop_count.unwrap_or(1);
            let sol = oracle::solve_cached(moves, k, DEFAULT_CAP, cache_dir().as_deref(), &g.hash_hex())
                .map_err(oracle_fail)?;
            (Box::new(OracleCops::new(sol)), k)
        }
        Cops::Chase => (Box::new(ChaseCops), play.cop_count.unwrap_or(1)),
    })
}

fn robber_player(g: &OnePlaneGraph, moves: &GameGraph, play: &Play, cops: usize, seed: u64) -> Result<Box<dyn RobberStrategy>, Fail> {
    Ok(match play.robber {
        Robber::Greedy => Box::new(GreedyRobber),
        Robber::Random => Box::new(RandomRobber::new(seed)),
        Robber::Stall => Box::new(StallRobber),
        Robber::Oracle => {
            let k = cops.min(play.oracle_k).max(1);
            let sol = oracle::solve_cached(moves, k, DEFAULT_CAP, cache_dir().as_deref(), &g.hash_hex())
                .map_err(oracle_fail)?;
            Box::new(OracleRobber::from_solution(sol))
        }
        Robber::Interactive => Box::new(InteractiveRobber::new(BufReader::new(io::stdin()), io::stderr())),
    })
}

fn play_one(g: &OnePlaneGraph, play: &Play, seed: u64) -> Result<Trace, Fail> {
    valid(g)?;
    let moves = GameGraph::new(g);
    let (mut cops, cop_count) = cop_player(g, &moves, play)?;
    let mut robber = robber_player(g, &moves, play, cop_count, seed)?;
    let budget = match play.budget {
        Some(b) => b,
        None => default_budget(g)?,
    };
    let cfg = RunConfig { cop_count, budget, seed, graph_hash: g.hash_hex() };
    run(&moves, cops.as_mut(), robber.as_mut(), &cfg).map_err(|e| invalid(e.to_string()))
}

fn game_code(t: &Trace) -> u8 {
    if !t.violations().is_empty() {
        EXIT_VIOLATION
    } else if t.captured() {
        0
    } else {
        EXIT_BUDGET
    }
}

fn summary(t: &Trace) -> serde_json::Value {
    json!({
        "outcome": t.end.outcome,
        "rounds": t.end.rounds,
        "capture_round": t.end.capture_round,
        "cops": t.header.cops,
        "cop_count": t.header.cop_count,
        "robber": t.header.robber,
        "seed": t.header.seed,
        "budget": t.header.budget,
        "violations": t.violations().len(),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn simulate(sim: Sim) -> Res {
    let g = sim.input.load()?;
    let t = play_one(&g, &sim.play, sim.seed)?;
    if let Some(path) = &sim.trace {
        write_file(path, &t.to_jsonl())?;
    }
    println!("{}", summary(&t));
    for (check, detail) in t.violations() {
        eprintln!("violation {check}: {detail}");
    }
    Ok(game_code(&t))
}

fn parse_range(s: &str) -> Result<std::ops::Range<u64>, Fail> {
    let bad = || invalid(format!("bad seed range {s:?}, expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok(a.trim().parse().map_err(|_| bad())?..b.trim().parse().map_err(|_| bad())?)
}

fn batch(b: Batch) -> Res {
    if b.play.robber == Robber::Interactive {
        return Err(invalid("batch cannot use the interactive robber"));
    }
    let seeds: Vec<u64> = parse_range(&b.seeds)?.collect();
    if let Some(dir) = &b.trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| invalid(e.to_string()))?;
    }
    let results: Vec<Result<(u64, Trace), Fail>> = seeds
        .par_iter()
        .map(|&seed| {
            let g = build(&format!("{}:seed={seed}", b.recipe))?;
            Ok((seed, play_one(&g, &b.play, seed)?))
        })
        .collect();
    let mut code = 0;
    for r in results {
        let (seed, t) = r?;
        if let Some(dir) = &b.trace_dir {
            write_file(&dir.join(format!("seed-{seed}.jsonl")), &t.to_jsonl())?;
        }
        println!("{}", summary(&t));
        code = code.max(game_code(&t));
    }
    Ok(code)
}

fn solve(input: Input, max_cops: usize, cap: u64) -> Res {
    let g = input.load()?;
    valid(&g)?;
    let moves = GameGraph::new(&g);
    let dir = cache_dir();
    for k in 1..=max_cops {
        let sol = oracle::solve_cached(&moves, k, cap, dir.as_deref(), &g.hash_hex()).map_err(oracle_fail)?;
        if sol.cop_win() {
            println!("{k}");
            return Ok(0);
        }
    }
    println!("> {max_cops}");
    Ok(EXIT_CAP)
}

fn planarize(g: &OnePlaneGraph) -> Res {
    valid(g)?;
    let p = Planarization::new(g).map_err(|e| invalid(e.to_string()))?;
    let nodes: Vec<_> = (0..p.node_count())
        .map(|n| match p.crossing_at(n) {
            Some(c) => json!({ "id": p.node_label(n), "dummy": true, "crossing": g.crossings[c] }),
            None => json!({ "id": p.node_label(n), "dummy": false }),
        })
        .collect();
    let xedges: Vec<_> = p
        .xedges()
        .iter()
        .enumerate()
        .map(|(i, x)| json!({ "id": p.xedge_label(i), "u": p.node_label(x.a), "v": p.node_label(x.b), "parent": p.edge(x.parent).id }))
        .collect();
    println!("{}", json!({ "nodes": nodes, "xedges": xedges }));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res: Res = match cli.cmd {
        Cmd::Validate(input) => input.load().and_then(|g| {
            valid(&g)?;
            println!("ok");
            Ok(0)
        }),
        Cmd::Planarize(input) => input.load().and_then(|g| planarize(&g)),
        Cmd::Detect(input) => input.load().and_then(|g| {
            valid(&g)?;
            let xs = detect_x_crossings(&g).map_err(|e| invalid(e.to_string()))?;
            let out: Vec<_> = xs.iter().map(|&c| json!({ "crossing": c, "edges": g.crossings[c] })).collect();
            println!("{}", serde_json::Value::from(out));
            Ok(0)
        }),
        Cmd::Generate { input, out } => input.load().and_then(|g| {
            match out {
                Some(path) => g.save(&path).map_err(|e| invalid(e.to_string()))?,
                None => println!("{}", g.to_json()),
            }
            Ok(0)
        }),
        Cmd::Simulate(sim) => simulate(sim),
        Cmd::Solve { input, max_cops, cap } => solve(input, max_cops, cap),
        Cmd::Batch(b) => batch(b),
        Cmd::Verify(args) => verify::run(args).map_err(Fail::from),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
