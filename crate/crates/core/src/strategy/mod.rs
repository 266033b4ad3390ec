//! The 21-cop strategy: three squads of seven cops grow a guarded region
//! around the robber until the robber's territory is exhausted.
//!
//! A configuration is either a guarded path (`P`) or a guarded cycle made of
//! two paths and two closing x-edges (`C`). Each iteration puts a free squad on
//! a new shortest path through the robber's territory, then frees whichever
//! squads are no longer needed. Graphs with x-crossings first go through
//! [`gamma_prepass`], which parks one extra cop per x-crossing.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::GraphError;
use crate::game::{CopStrategy, Event, GameGraph, GameState, StrategyError};
use crate::graph::{EdgeId, OnePlaneGraph, VertexId};
use crate::guard::{Ambient, GPath, ShadowPath, OFFSETS};
use crate::kite::{augment_kites, x_crossings, KiteRecord};
use crate::planar::{Node, Planarization, XSub};
use crate::territory::{boundary_no_x, check_no_x, territory_of_nodes, TerritoryView};

mod xpath;

pub use xpath::{restrict_walk, shortcut, XPath};

pub const SQUADS: usize = 3;
pub const SQUAD_SIZE: usize = 7;
pub const MAIN_COPS: usize = SQUADS * SQUAD_SIZE;

/// Outcome of the x-crossing prepass.
#[derive(Clone, Debug)]
pub struct Prepass {
    /// The input with kites for every non-x crossing.
    pub augmented: OnePlaneGraph,
    /// `augmented` minus one edge per x-crossing, kites re-checked.
    pub reduced: OnePlaneGraph,
    pub removed: Vec<EdgeId>,
    /// One parked cop per removed edge, on its lower-id endpoint.
    pub parked: Vec<VertexId>,
    pub kites: Vec<KiteRecord>,
}

impl Prepass {
    pub fn gamma(&self) -> usize {
        self.removed.len()
    }
}

/// Kites first, then the lower-id edge of every x-crossing is removed and a
/// cop parked on its lower-id endpoint. Removed edges are crossed, so they are
/// never kites and the reduced graph has no x-crossing left.
pub fn gamma_prepass(g: &OnePlaneGraph) -> Result<Prepass, GraphError> {
    let (augmented, _) = augment_kites(g, false)?;
    let p = Planarization::new(&augmented)?;
    let mut removed = Vec::new();
    let mut parked = Vec::new();
    for c in x_crossings(&p) {
        let [a, b] = augmented.crossings[c];
        let e = *augmented.edge(a.min(b)).expect("crossing edge");
        removed.push(e.id);
        parked.push(e.u.min(e.v));
    }
    let set: BTreeSet<EdgeId> = removed.iter().copied().collect();
    let (reduced, kites) = augment_kites(&augmented.without_edges(&set), true)?;
    Ok(Prepass { augmented, reduced, removed, parked, kites })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    Free,
    Shadow { program: usize, offset: i32 },
    Station { vertex: usize },
    Chase,
    Parked { vertex: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Config {
    Path { path: XPath, squad: usize },
    Cycle { paths: [XPath; 2], c12: usize, c21: usize, squads: [usize; 2] },
}

impl Config {
    pub fn sub(&self) -> XSub {
        match self {
            Config::Path { path, .. } => path.sub(),
            Config::Cycle { paths, c12, c21, .. } => {
                let mut s = paths[0].sub();
                s.union_with(&paths[1].sub());
                s.xedges.insert(*c12);
                s.xedges.insert(*c21);
                s
            }
        }
    }

    pub fn nodes(&self) -> BTreeSet<Node> {
        self.sub().nodes
    }

    pub fn squads(&self) -> Vec<usize> {
        match self {
            Config::Path { squad, .. } => vec![*squad],
            Config::Cycle { squads, .. } => squads.to_vec(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Config::Path { .. } => "P",
            Config::Cycle { .. } => "C",
        }
    }
}

/// One finished iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseRecord {
    pub iteration: u32,
    pub case: String,
    pub config: String,
    pub anchors: BTreeMap<String, VertexId>,
    pub path: Vec<VertexId>,
    pub extra_dummies: Vec<ExtraDummy>,
    pub l_size: usize,
}

/// Counters per named check, and the failures in order.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckLog {
    pub passed: BTreeMap<String, u64>,
    pub failed: Vec<(String, String)>,
}

impl CheckLog {
    pub fn violations(&self) -> usize {
        self.failed.len()
    }

    pub fn count(&self, check: &str) -> u64 {
        self.passed.get(check).copied().unwrap_or(0) + self.failed.iter().filter(|(c, _)| c == check).count() as u64
    }
}

/// What an iteration leaves behind once its squad is active.
#[derive(Clone, Debug)]
pub enum Outcome {
    Path(XPath),
    Cycle { p1: XPath, p2: XPath, c12: usize, c21: usize, old: usize },
    Split { inner: usize, iu: usize, iv: usize, p3: XPath, cu: usize, cv: usize },
}

#[derive(Clone, Debug)]
struct Pending {
    case: String,
    anchors: BTreeMap<String, VertexId>,
    squad: usize,
    program: usize,
    outcome: Outcome,
    free: Vec<usize>,
    extra: Vec<ExtraDummy>,
    streak: u32,
}

/// A dummy on the new path whose crossing has an edge at the old interface,
/// with the interface vertices of that edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtraDummy {
    pub dummy: VertexId,
    pub crossing: usize,
    pub interface: Vec<VertexId>,
}

/// The next iteration as computed from a configuration and robber position.
#[derive(Clone, Debug)]
pub struct Plan {
    pub case: String,
    pub anchors: BTreeMap<String, VertexId>,
    pub ambient: Ambient,
    pub path: GPath,
    pub stations: Vec<usize>,
    /// Squads whose leader gets a lockstep copy in the new squad.
    pub lockstep: Vec<usize>,
    pub outcome: Outcome,
    pub free: Vec<usize>,
    pub extra: Vec<ExtraDummy>,
}

/// A Case 2 path: the part strictly between the two interface nodes plus the
/// x-edges closing it onto them.
struct Bridge {
    program: GPath,
    ambient: Ambient,
    core: XPath,
    cu: usize,
    cv: usize,
    extra: Vec<ExtraDummy>,
}

#[derive(Default)]
struct Audit {
    log: CheckLog,
    events: Vec<Event>,
}

impl Audit {
    fn record(&mut self, check: &str, ok: bool, detail: impl FnOnce() -> String) -> bool {
        if ok {
            *self.log.passed.entry(check.to_string()).or_insert(0) += 1;
        } else {
            let d = detail();
            self.events.push(Event::Violation { check: check.to_string(), detail: d.clone() });
            self.log.failed.push((check.to_string(), d));
        }
        ok
    }
}

pub struct Strategy21 {
    plan: Planarization,
    prepass: Prepass,
    moves: GameGraph,
    home: usize,
    parked: Vec<usize>,
    programs: Vec<ShadowPath>,
    roles: Vec<Role>,
    primary: [Option<usize>; SQUADS],
    config: Option<Config>,
    pending: Option<Pending>,
    l: XSub,
    region: Option<Vec<bool>>,
    endgame: bool,
    last_robber: Option<usize>,
    iteration: u32,
    audit: Audit,
    records: Vec<CaseRecord>,
}

impl Strategy21 {
    /// Builds the strategy for the game played on `g`.
    pub fn new(g: &OnePlaneGraph) -> Result<Self, GraphError> {
        let prepass = gamma_prepass(g)?;
        let plan = Planarization::new(&prepass.reduced)?;
        let moves = GameGraph::new(g);
        let parked: Vec<usize> = prepass.parked.iter().map(|&l| plan.vertex(l).expect("parked vertex")).collect();
        // main force starts in the lowest-id component of G with no parked cop
        let full = Planarization::new(g)?;
        let mut home = 0;
        let mut seen = vec![false; full.n_g()];
        for v in 0..full.n_g() {
            if seen[v] {
                continue;
            }
            let comp = full.g_component(v, |_| true);
            for (x, &c) in comp.iter().enumerate() {
                seen[x] |= c;
            }
            if !parked.iter().any(|&q| comp[q]) {
                home = v;
                break;
            }
        }
        let cops = MAIN_COPS + parked.len();
        let mut roles = vec![Role::Free; cops];
        for (i, &v) in parked.iter().enumerate() {
            roles[MAIN_COPS + i] = Role::Parked { vertex: v };
        }
        Ok(Strategy21 {
            plan,
            prepass,
            moves,
            home,
            parked,
            programs: Vec::new(),
            roles,
            primary: [None; SQUADS],
            config: None,
            pending: None,
            l: XSub::default(),
            region: None,
            endgame: false,
            last_robber: None,
            iteration: 0,
            audit: Audit::default(),
            records: Vec::new(),
        })
    }

    /// Cops needed: 21 plus one per x-crossing.
    pub fn cop_count(&self) -> usize {
        MAIN_COPS + self.parked.len()
    }

    pub fn prepass(&self) -> &Prepass {
        &self.prepass
    }

    pub fn planarization(&self) -> &Planarization {
        &self.plan
    }

    pub fn log(&self) -> &CheckLog {
        &self.audit.log
    }

    pub fn records(&self) -> &[CaseRecord] {
        &self.records
    }

    pub fn config(&self) -> Option<&Config> {
        self.config.as_ref()
    }

    pub fn guarded(&self) -> &XSub {
        &self.l
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn in_endgame(&self) -> bool {
        self.endgame
    }

    fn squad(s: usize) -> std::ops::Range<usize> {
        s * SQUAD_SIZE..(s + 1) * SQUAD_SIZE
    }

    fn busy_squads(&self) -> BTreeSet<usize> {
        let mut busy: BTreeSet<usize> = self.config.iter().flat_map(|c| c.squads()).collect();
        if let Some(p) = &self.pending {
            busy.insert(p.squad);
        }
        busy
    }

    fn free_squads(&self) -> Vec<usize> {
        let busy = self.busy_squads();
        (0..SQUADS).filter(|s| !busy.contains(s)).collect()
    }

    fn target(&self, role: Role, r: usize) -> Option<usize> {
        match role {
            Role::Free | Role::Chase => None,
            Role::Shadow { program, offset } => Some(self.programs[program].target(r, offset)),
            Role::Station { vertex } | Role::Parked { vertex } => Some(vertex),
        }
    }

    fn role_move(&self, role: Role, at: usize, r: usize) -> usize {
        match role {
            Role::Free => at,
            Role::Chase => self.moves.step_toward(at, &self.moves.distances(&[r])),
            Role::Shadow { program, offset } => self.programs[program].step(&self.moves, at, r, offset),
            Role::Station { vertex } | Role::Parked { vertex } => {
                self.moves.step_toward(at, &self.moves.distances(&[vertex]))
            }
        }
    }

    fn settled(&self, squads: &[usize], cops: &[usize], r: usize) -> bool {
        squads
            .iter()
            .flat_map(|&s| Self::squad(s))
            .all(|c| self.target(self.roles[c], r).map_or(true, |t| cops[c] == t))
    }

    fn labels_of(&self, nodes: &[Node]) -> Vec<VertexId> {
        nodes.iter().map(|&n| self.plan.node_label(n)).collect()
    }

    fn view(&mut self, nodes: &BTreeSet<Node>, r: usize) -> Option<TerritoryView> {
        match territory_of_nodes(&self.plan, nodes, r) {
            Ok(v) => Some(v),
            Err(e) => {
                self.audit.record("territory", false, || e.to_string());
                None
            }
        }
    }

    fn territory_checks(&mut self, view: &TerritoryView) {
        let ok = check_no_x(&self.plan, view);
        self.audit.record("obs2.2", ok, || format!("robber territory at {} has an x-crossing", self.plan.label(view.robber)));
        let adjacent: Vec<Node> = view.guarded.iter().copied().filter(|&w| view.adjacent(w)).collect();
        for w in adjacent {
            let ok = boundary_no_x(&self.plan, view, w);
            self.audit.record("obs2.3", ok, || format!("boundary of {} adds an x-crossing", self.plan.node_label(w)));
        }
    }

    /// Lowest-id neighbour of `node` in R, with the boundary member reaching it.
    fn anchor(&self, view: &TerritoryView, node: Node) -> (usize, usize) {
        view.boundary_of(node)
            .iter()
            .map(|&m| (view.boundary_target(&self.plan, node, m), m))
            .min()
            .expect("adjacent node")
    }

    fn region_ambient(&self, view: &TerritoryView) -> Ambient {
        Ambient::new(&self.plan, view.vertices(), view.edges(&self.plan))
    }

    fn extra_dummies(&self, view: &TerritoryView, q: &XPath) -> Vec<ExtraDummy> {
        q.nodes
            .iter()
            .filter_map(|&n| {
                let c = self.plan.crossing_at(n)?;
                let info = self.plan.crossing(c);
                let at: Vec<usize> = info.edges.iter().copied().filter(|e| view.cop_edges.contains(e)).collect();
                if at.is_empty() {
                    return None;
                }
                let interface = at
                    .iter()
                    .flat_map(|&e| [self.plan.edge(e).u, self.plan.edge(e).v])
                    .filter(|x| view.guarded.contains(x))
                    .map(|x| self.plan.label(x))
                    .collect();
                Some(ExtraDummy { dummy: self.plan.node_label(n), crossing: c, interface })
            })
            .collect()
    }

    fn add_program(&mut self, ambient: Ambient, path: GPath) -> Result<usize, String> {
        let sp = ShadowPath::new(&self.plan, &self.moves, ambient, path).map_err(|e| e.to_string())?;
        self.programs.push(sp);
        Ok(self.programs.len() - 1)
    }

    /// Assigns the squad: five shadow cops, then stationary and lockstep cops.
    fn assign(&mut self, squad: usize, program: usize, stations: &[usize], lockstep: &[usize]) {
        let load = 5 + stations.len() + lockstep.len();
        self.audit.record("squad_size", load <= SQUAD_SIZE, || format!("squad {squad} needs {load} cops"));
        let mut cops = Self::squad(squad);
        for &offset in &OFFSETS {
            self.roles[cops.next().unwrap()] = Role::Shadow { program, offset };
        }
        for &v in stations {
            if let Some(c) = cops.next() {
                self.roles[c] = Role::Station { vertex: v };
            }
        }
        for &prog in lockstep {
            if let Some(c) = cops.next() {
                self.roles[c] = Role::Shadow { program: prog, offset: 0 };
            }
        }
        for c in cops {
            self.roles[c] = Role::Free;
        }
        self.primary[squad] = Some(program);
    }

    fn release(&mut self, squad: usize) {
        for c in Self::squad(squad) {
            self.roles[c] = Role::Free;
        }
        self.primary[squad] = None;
    }

    fn start_endgame(&mut self, why: Option<String>) {
        self.endgame = true;
        let squad = self.free_squads().first().copied().unwrap_or(0);
        let cop = squad * SQUAD_SIZE;
        self.roles[cop] = Role::Chase;
        self.audit.events.push(Event::Endgame { cop });
        if let Some(why) = why {
            self.audit.record("plan", false, || why);
        }
    }

    fn begin_iteration(&mut self, r: usize) {
        if let Some(cfg) = self.config.clone() {
            if let Some(view) = self.view(&cfg.nodes(), r) {
                self.territory_checks(&view);
            }
        }
        match self.classify(self.config.as_ref(), r) {
            Ok(Some(plan)) => {
                if let Err(e) = self.apply(plan) {
                    self.start_endgame(Some(e));
                }
            }
            Ok(None) => self.start_endgame(None),
            Err(e) => self.start_endgame(Some(e)),
        }
    }

    fn apply(&mut self, plan: Plan) -> Result<(), String> {
        let squad = self
            .free_squads()
            .into_iter()
            .find(|s| !plan.free.contains(s))
            .ok_or("no free squad")?;
        let lockstep = plan
            .lockstep
            .iter()
            .map(|&s| self.primary[s].ok_or("imitated squad has no program"))
            .collect::<Result<Vec<_>, _>>()?;
        let program = self.add_program(plan.ambient, plan.path)?;
        self.assign(squad, program, &plan.stations, &lockstep);
        self.pending = Some(Pending {
            case: plan.case,
            anchors: plan.anchors,
            squad,
            program,
            outcome: plan.outcome,
            free: plan.free,
            extra: plan.extra,
            streak: 0,
        });
        Ok(())
    }

    /// The plan for the next iteration with the robber at `r`: the
    /// bootstrap path when there is no configuration yet, `None` when no
    /// node of the configuration touches the robber's territory.
    pub fn classify(&self, config: Option<&Config>, r: usize) -> Result<Option<Plan>, String> {
        let Some(cfg) = config else {
            return self.plan_bootstrap(r).map(Some);
        };
        let view = territory_of_nodes(&self.plan, &cfg.nodes(), r).map_err(|e| e.to_string())?;
        match cfg {
            Config::Path { path, squad } => {
                let adj: Vec<usize> = (0..path.len()).filter(|&i| view.adjacent(path.nodes[i])).collect();
                match adj.len() {
                    0 => Ok(None),
                    1 => self.case_one(&view, path.nodes[adj[0]], "P1", vec![*squad]).map(Some),
                    _ => self.case_path_two(&view, path, *squad, adj[0], *adj.last().unwrap()).map(Some),
                }
            }
            Config::Cycle { paths, squads, .. } => {
                let adj: [Vec<usize>; 2] =
                    [0, 1].map(|k| (0..paths[k].len()).filter(|&i| view.adjacent(paths[k].nodes[i])).collect());
                let total = adj[0].len() + adj[1].len();
                if total == 0 {
                    Ok(None)
                } else if total == 1 {
                    let a = if adj[0].is_empty() { paths[1].nodes[adj[1][0]] } else { paths[0].nodes[adj[0][0]] };
                    self.case_one(&view, a, "C1", squads.to_vec()).map(Some)
                } else if adj[0].len() == 1 && adj[1].len() == 1 {
                    let (a, b) = (paths[0].nodes[adj[0][0]], paths[1].nodes[adj[1][0]]);
                    self.case_cycle_two(&view, a, b, squads.to_vec()).map(Some)
                } else {
                    let k = if adj[0].len() >= 2 { 0 } else { 1 };
                    let (iu, iv) = (adj[k][0], *adj[k].last().unwrap());
                    self.case_cycle_three(&view, paths, *squads, k, iu, iv).map(Some)
                }
            }
        }
    }

    fn plan_bootstrap(&self, r: usize) -> Result<Plan, String> {
        let ambient = Ambient::component(&self.plan, r);
        let p0 = (0..self.plan.n_g()).find(|&v| ambient.has_vertex(v)).unwrap();
        let dist = ambient.distances(&self.plan, p0);
        let far = (0..self.plan.n_g())
            .filter(|&v| dist[v] != u32::MAX)
            .max_by_key(|&v| (dist[v], std::cmp::Reverse(v)))
            .unwrap();
        let path = ambient.shortest_path(&self.plan, p0, far).ok_or("no bootstrap path")?;
        let q = shortcut(&restrict_walk(&self.plan, &path));
        let anchors = BTreeMap::from([("p0".to_string(), self.plan.label(p0)), ("far".to_string(), self.plan.label(far))]);
        Ok(Plan {
            case: "init".into(),
            anchors,
            ambient,
            path,
            stations: Vec::new(),
            lockstep: Vec::new(),
            outcome: Outcome::Path(q),
            free: Vec::new(),
            extra: Vec::new(),
        })
    }

    /// Only one node `a` of J touches R: guard a shortest path from `a` to
    /// the lowest-id vertex of R and free the old squads.
    fn case_one(&self, view: &TerritoryView, a: Node, prefix: &str, free: Vec<usize>) -> Result<Plan, String> {
        let target = view.vertices()[0];
        let mut anchors = BTreeMap::from([("a".to_string(), self.plan.node_label(a)), ("v".to_string(), self.plan.label(target))]);
        let mut ambient = self.region_ambient(view);
        let (case, path, q, stations) = match self.plan.crossing_at(a) {
            None => {
                for &e in view.boundary_of(a) {
                    ambient.add_edge(&self.plan, e);
                }
                let path = ambient.shortest_path(&self.plan, a, target).ok_or("no path from a")?;
                let q = shortcut(&restrict_walk(&self.plan, &path));
                (if prefix == "P1" { "P1.1" } else { "C1" }, path, q, vec![])
            }
            Some(c) => {
                let info = *self.plan.crossing(c);
                let (a1, _) = self.anchor(view, a);
                let a2 = *info.consecutive(a1).iter().min().unwrap();
                for e in info.edges {
                    ambient.add_edge(&self.plan, e);
                }
                let path = ambient.shortest_path(&self.plan, a1, target).ok_or("no path from a1")?;
                let mut q = shortcut(&restrict_walk(&self.plan, &path));
                if q.position(a).is_none() {
                    q = q.prepend(a, self.plan.half_at(info.edge_at(a1), a1));
                }
                anchors.insert("a1".into(), self.plan.label(a1));
                anchors.insert("a2".into(), self.plan.label(a2));
                (if prefix == "P1" { "P1.2" } else { "C1" }, path, q, vec![a2])
            }
        };
        let extra = self.extra_dummies(view, &q);
        Ok(Plan { case: case.into(), anchors, ambient, path, stations, lockstep: Vec::new(), outcome: Outcome::Path(q), free, extra })
    }

    /// Shortest path through R between the R-sides of two interface nodes.
    fn bridge(&self, view: &TerritoryView, u: Node, v: Node) -> Result<Bridge, String> {
        let mut ambient = self.region_ambient(view);
        let end = |x: Node, ambient: &mut Ambient| -> (usize, Option<usize>) {
            if self.plan.is_dummy(x) {
                let (y, link) = self.anchor(view, x);
                (y, Some(link))
            } else {
                for &e in view.boundary_of(x) {
                    ambient.add_edge(&self.plan, e);
                }
                (x, None)
            }
        };
        let (su, lu) = end(u, &mut ambient);
        let (sv, lv) = end(v, &mut ambient);
        let path = ambient.shortest_path(&self.plan, su, sv).ok_or("no bridge path")?;
        let mut core = shortcut(&restrict_walk(&self.plan, &path));
        let cu = match lu {
            Some(x) => x,
            None => {
                let x = core.xedges[0];
                core = core.slice(1, core.len() - 1);
                x
            }
        };
        let cv = match lv {
            Some(x) => x,
            None => {
                let x = *core.xedges.last().ok_or("bridge collapsed")?;
                core = core.slice(0, core.len() - 2);
                x
            }
        };
        if core.is_empty() {
            return Err("bridge collapsed".into());
        }
        let extra = self.extra_dummies(view, &core);
        Ok(Bridge { program: path, ambient, core, cu, cv, extra })
    }

    fn ends_case(&self, u: Node, v: Node) -> usize {
        1 + usize::from(self.plan.is_dummy(u)) + usize::from(self.plan.is_dummy(v))
    }

    fn case_path_two(&self, view: &TerritoryView, path: &XPath, old: usize, iu: usize, iv: usize) -> Result<Plan, String> {
        let (u, v) = (path.nodes[iu], path.nodes[iv]);
        let b = self.bridge(view, u, v)?;
        let anchors = BTreeMap::from([("u".to_string(), self.plan.node_label(u)), ("v".to_string(), self.plan.node_label(v))]);
        Ok(Plan {
            case: format!("P2.{}", self.ends_case(u, v)),
            anchors,
            ambient: b.ambient,
            path: b.program,
            stations: Vec::new(),
            lockstep: vec![old],
            outcome: Outcome::Cycle { p1: path.slice(iu, iv), p2: b.core.reversed(), c12: b.cv, c21: b.cu, old },
            free: Vec::new(),
            extra: b.extra,
        })
    }

    fn case_cycle_two(&self, view: &TerritoryView, a: Node, b: Node, free: Vec<usize>) -> Result<Plan, String> {
        let mut ambient = self.region_ambient(view);
        let mut anchors = BTreeMap::from([("a".to_string(), self.plan.node_label(a)), ("b".to_string(), self.plan.node_label(b))]);
        // each end: its start vertex, and for a dummy the closing half-edge and station
        let mut ends = Vec::new();
        for (name, x) in [("a", a), ("b", b)] {
            match self.plan.crossing_at(x) {
                None => {
                    for &e in view.boundary_of(x) {
                        ambient.add_edge(&self.plan, e);
                    }
                    ends.push((x, None));
                }
                Some(c) => {
                    let info = *self.plan.crossing(c);
                    let (x1, _) = self.anchor(view, x);
                    let x2 = *info.consecutive(x1).iter().min().unwrap();
                    for e in info.edges {
                        ambient.add_edge(&self.plan, e);
                    }
                    anchors.insert(format!("{name}1"), self.plan.label(x1));
                    anchors.insert(format!("{name}2"), self.plan.label(x2));
                    ends.push((x1, Some((x, self.plan.half_at(info.edge_at(x1), x1), x2))));
                }
            }
        }
        let path = ambient.shortest_path(&self.plan, ends[0].0, ends[1].0).ok_or("no path from a to b")?;
        let mut q = shortcut(&restrict_walk(&self.plan, &path));
        let mut stations = Vec::new();
        if let Some((x, link, x2)) = ends[0].1 {
            if q.position(x).is_none() {
                q = q.prepend(x, link);
            }
            stations.push(x2);
        }
        if let Some((x, link, x2)) = ends[1].1 {
            if q.position(x).is_none() {
                q = q.append(link, x);
            }
            stations.push(x2);
        }
        let extra = self.extra_dummies(view, &q);
        Ok(Plan {
            case: format!("C2.{}", self.ends_case(a, b)),
            anchors,
            ambient,
            path,
            stations,
            lockstep: Vec::new(),
            outcome: Outcome::Path(q),
            free,
            extra,
        })
    }

    fn case_cycle_three(
        &self,
        view: &TerritoryView,
        paths: &[XPath; 2],
        squads: [usize; 2],
        k: usize,
        iu: usize,
        iv: usize,
    ) -> Result<Plan, String> {
        let (u, v) = (paths[k].nodes[iu], paths[k].nodes[iv]);
        let b = self.bridge(view, u, v)?;
        let anchors = BTreeMap::from([("u".to_string(), self.plan.node_label(u)), ("v".to_string(), self.plan.node_label(v))]);
        Ok(Plan {
            case: "C3".into(),
            anchors,
            ambient: b.ambient,
            path: b.program,
            stations: Vec::new(),
            lockstep: squads.to_vec(),
            outcome: Outcome::Split { inner: k, iu, iv, p3: b.core, cu: b.cu, cv: b.cv },
            free: Vec::new(),
            extra: b.extra,
        })
    }

    /// R(J) equals R(L) and no node of L outside J touches it.
    fn interface_ok(&mut self, j: &BTreeSet<Node>, l: &BTreeSet<Node>, r: usize) -> Option<bool> {
        let vj = self.view(j, r)?;
        let vl = self.view(l, r)?;
        Some(vj.component == vl.component && l.iter().filter(|n| !j.contains(n)).all(|&n| !vl.adjacent(n)))
    }

    fn finish_iteration(&mut self, cops: &[usize], r: usize) {
        let pending = self.pending.take().expect("pending iteration");
        let old_l = self.l.clone();
        let mut case = pending.case.clone();
        let mut free = pending.free.clone();
        let (config, added) = match pending.outcome.clone() {
            Outcome::Path(q) => {
                let q = q.normalized();
                let added = q.sub();
                (Config::Path { path: q, squad: pending.squad }, added)
            }
            Outcome::Cycle { p1, p2, c12, c21, old } => {
                let mut added = p2.sub();
                added.xedges.extend([c12, c21]);
                (Config::Cycle { paths: [p1, p2], c12, c21, squads: [old, pending.squad] }, added)
            }
            Outcome::Split { inner, iu, iv, p3, cu, cv } => {
                let Some(Config::Cycle { paths, c12, c21, squads }) = self.config.clone() else {
                    unreachable!("split without a cycle")
                };
                let (pi, po) = (&paths[inner], &paths[1 - inner]);
                let (c_io, c_oi) = if inner == 0 { (c12, c21) } else { (c21, c12) };
                let (si, so) = (squads[inner], squads[1 - inner]);
                let mut added = p3.sub();
                added.xedges.extend([cu, cv]);
                let mut l_new = old_l.clone();
                l_new.union_with(&added);
                let left = Config::Cycle {
                    paths: [pi.slice(iu, iv), p3.reversed()],
                    c12: cv,
                    c21: cu,
                    squads: [si, pending.squad],
                };
                let plus = pi.slice(0, iu).join(cu, &p3).join(cv, &pi.slice(iv, pi.len() - 1));
                let right = Config::Cycle { paths: [plus, po.clone()], c12: c_io, c21: c_oi, squads: [pending.squad, so] };
                if self.interface_ok(&left.nodes(), &l_new.nodes, r) == Some(true) {
                    case = "C3a".into();
                    free.push(so);
                    (left, added)
                } else {
                    case = "C3b".into();
                    free.push(si);
                    (right, added)
                }
            }
        };
        for &s in &free {
            self.release(s);
        }
        let mut l_new = old_l.clone();
        l_new.union_with(&added);
        l_new.union_with(&config.sub());
        let nodes = config.nodes();

        let mut checks = BTreeMap::new();
        let squads = config.squads();
        let i1 = self.settled(&squads, cops, r);
        checks.insert("I1".to_string(), self.audit.record("I1", i1, || format!("iteration {}: squads not settled", self.iteration)));
        let i2 = old_l.is_subset(&l_new) && l_new.size() > old_l.size() && config.sub().is_subset(&l_new);
        checks.insert("I2".to_string(), self.audit.record("I2", i2, || format!("iteration {}: L did not grow", self.iteration)));
        let i3 = self.interface_ok(&nodes, &l_new.nodes, r) == Some(true);
        checks.insert("I3".to_string(), self.audit.record("I3", i3, || format!("iteration {} ({case}): interface broken", self.iteration)));
        self.config = Some(config.clone());
        let free_now = self.free_squads();
        let i4 = !free_now.is_empty();
        checks.insert("I4".to_string(), self.audit.record("I4", i4, || format!("iteration {}: no free squad", self.iteration)));
        if let Some(view) = self.view(&nodes, r) {
            self.territory_checks(&view);
            self.region = Some(view.component.clone());
        }
        self.l = l_new;

        let path = self.labels_of(&self.programs[pending.program].path.vertices);
        self.audit.events.push(Event::GuardActive { guard: pending.program, squad: pending.squad, path: path.clone() });
        self.audit.events.push(Event::IterationEnd {
            iteration: self.iteration,
            case: case.clone(),
            config: config.kind().into(),
            anchors: pending.anchors.clone(),
            l_size: self.l.size(),
            free: free_now,
            checks,
        });
        self.records.push(CaseRecord {
            iteration: self.iteration,
            case,
            config: config.kind().into(),
            anchors: pending.anchors,
            path,
            extra_dummies: pending.extra,
            l_size: self.l.size(),
        });
        self.iteration += 1;
    }

    fn round_checks(&mut self, cops: &[usize], r: usize) {
        let Some(cfg) = self.config.clone() else { return };
        let squads = cfg.squads();
        let held = self.settled(&squads, cops, r);
        self.audit.record("I1", held, || format!("configuration squads off target with robber at {}", self.plan.label(r)));
        // every move that lands on J or crosses one of its dummies ends next to a cop
        let nodes = cfg.nodes();
        for &(y, e) in self.plan.gadj(r) {
            if self.plan.image(e).iter().any(|n| nodes.contains(n)) {
                let ok = cops.iter().any(|&c| self.moves.can_move(c, y));
                self.audit.record("obs2.1", ok, || {
                    format!("robber at {} can reach {} unguarded", self.plan.label(r), self.plan.label(y))
                });
            }
        }
        for s in squads {
            let Some(prog) = self.primary[s] else { continue };
            let sp = &self.programs[prog];
            if !sp.ambient.has_vertex(r) {
                continue;
            }
            let res = sp.check_distance_bound(&self.plan, cops[s * SQUAD_SIZE], r);
            self.audit.record("obs3.2", res.is_ok(), || res.unwrap_err());
        }
    }
}

impl CopStrategy for Strategy21 {
    fn name(&self) -> String {
        "strategy21".into()
    }

    fn place(&mut self, g: &GameGraph, cop_count: usize) -> Result<Vec<usize>, StrategyError> {
        if g.n() != self.plan.n_g() {
            return Err(StrategyError("game graph does not match the strategy graph".into()));
        }
        if cop_count < self.cop_count() {
            return Err(StrategyError(format!("strategy21 needs {} cops, got {cop_count}", self.cop_count())));
        }
        let mut out = vec![self.home; cop_count];
        for (i, &v) in self.parked.iter().enumerate() {
            out[MAIN_COPS + i] = v;
            self.audit.events.push(Event::Parked { cop: MAIN_COPS + i, vertex: self.plan.label(v) });
        }
        self.roles.resize(cop_count, Role::Free);
        Ok(out)
    }

    fn step(&mut self, _g: &GameGraph, state: &GameState) -> Result<Vec<usize>, StrategyError> {
        let r = state.robber.ok_or_else(|| StrategyError("robber not placed".into()))?;
        let cops = &state.cops;
        if let Some(i) = (0..cops.len()).find(|&i| self.moves.can_move(cops[i], r)) {
            let mut out = cops.clone();
            out[i] = r;
            return Ok(out);
        }
        if !self.endgame && self.pending.is_none() {
            self.begin_iteration(r);
        }
        let out: Vec<usize> = (0..cops.len()).map(|i| self.role_move(self.roles[i], cops[i], r)).collect();
        self.round_checks(&out, r);
        if let Some(squad) = self.pending.as_ref().map(|p| p.squad) {
            let ok = self.settled(&[squad], &out, r);
            let p = self.pending.as_mut().unwrap();
            p.streak = if ok { p.streak + 1 } else { 0 };
            if p.streak >= 2 {
                self.finish_iteration(&out, r);
            }
        }
        Ok(out)
    }

    fn observe(&mut self, _g: &GameGraph, state: &GameState) {
        if state.captured || self.endgame {
            return;
        }
        let from = std::mem::replace(&mut self.last_robber, state.robber);
        let covered = |v: usize| state.cops.iter().any(|&c| self.moves.can_move(c, v));
        // a move across J must end where the cops can strike
        if let (Some(cfg), Some(r0), Some(r)) = (self.config.as_ref(), from, state.robber) {
            let nodes = cfg.nodes();
            let crossed = r0 != r
                && self.plan.gadj(r0).iter().any(|&(y, e)| y == r && self.plan.image(e).iter().any(|n| nodes.contains(n)));
            if crossed {
                let ok = covered(r);
                self.audit.record("obs2.1", ok, || {
                    format!("robber moved {} -> {} across J unguarded", self.plan.label(r0), self.plan.label(r))
                });
            }
        }
        let (Some(r), Some(region)) = (state.robber, self.region.as_ref()) else { return };
        let ok = region[r] || covered(r);
        self.audit.record("confinement", ok, || format!("robber escaped to {} in round {}", self.plan.label(r), state.round));
    }

    fn drain_events(&mut self) -> Vec<Event> {
        std::mem::take(&mut self.audit.events)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::game::{run, RunConfig};
    use crate::players::GreedyRobber;

    fn play(g: &OnePlaneGraph) -> (bool, Strategy21) {
        let mut s = Strategy21::new(g).unwrap();
        let gg = GameGraph::new(g);
        let n = s.planarization().node_count() as u32;
        let cfg = RunConfig { cop_count: s.cop_count(), budget: 50 * n * n, seed: 0, graph_hash: String::new() };
        let t = run(&gg, &mut s, &mut GreedyRobber, &cfg).unwrap();
        (t.captured(), s)
    }

    #[test]
    fn captures_on_small_named_graphs() {
        for name in ["K4X", "FIG1", "FIG3", "PETERSEN"] {
            let (ok, s) = play(&corpus::named(name).unwrap());
            assert!(ok, "{name}");
            assert_eq!(s.log().violations(), 0, "{name}: {:?}", s.log().failed);
        }
    }

    #[test]
    fn bare_crossing_parks_one_cop() {
        let g = corpus::named("BARE_X").unwrap();
        let s = Strategy21::new(&g).unwrap();
        assert_eq!(s.cop_count(), 22);
        let (ok, _) = play(&g);
        assert!(ok);
    }
}
