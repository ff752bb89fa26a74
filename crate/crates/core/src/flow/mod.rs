//! Attractors, saddle manifolds, connections and basins inside a trapping
//! region.

mod basin;
mod cycles;
mod graph;
mod manifolds;

pub use basin::{basin_map, separatrix_sides, BasinMap, BoundaryLabels, SideCheck};
pub use cycles::{find_limit_cycle, find_repelling_cycle, Cycle};
pub use graph::{Component, Edge, Node};
pub use manifolds::{saddle_manifolds, Branch, BranchKind};

use crate::conley::ConleyError;
use crate::dynsys::{State, VectorField};
use crate::equilibria::{find_equilibria, scale, EqClass, Equilibrium, SearchBox};
use crate::integrator::{integrate, Crossing, EventSpec, IntegrateError, Options, Termination, Trajectory};
use crate::linalg::dist;
use crate::region::{segment_distance, verify_trapping_region, Certification, Region};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("field has dimension {field} but region has dimension {region}")]
    Dimension { field: usize, region: usize },
    #[error("a {0} cannot seed this cycle search")]
    BadSeed(&'static str),
    #[error("return map secant did not converge near r={r}")]
    SecantDiverged { r: f64 },
    #[error("saddle at {at:?} has nearly repeated eigenvalues")]
    DegenerateSaddle { at: State },
    #[error(transparent)]
    Conley(#[from] ConleyError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// Knobs shared by every stage of the flow analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowConfig {
    pub tol: f64,
    pub t_max: f64,
    pub boundary_samples: usize,
    /// Rays launched around each repeller.
    pub rays: usize,
    /// Seeds per axis for the equilibrium search.
    pub eq_grid: usize,
    /// Radii probed by the return map before refining.
    pub cycle_scan: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            tol: 1e-9,
            t_max: 1e4,
            boundary_samples: 256,
            rays: 16,
            eq_grid: 64,
            cycle_scan: 40,
        }
    }
}

/// Where a trajectory ended up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum End {
    Attractor(usize),
    /// Index into the S-candidate list.
    Member(usize),
    Exit(State),
    Timeout,
    Failed,
}

impl End {
    /// Basin label: attractor index, -1 for undecided, -2 for outside.
    pub fn code(&self) -> i64 {
        match self {
            End::Attractor(i) => *i as i64,
            End::Exit(_) => -2,
            _ => -1,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, End::Timeout | End::Failed | End::Member(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Attractor {
    /// Index into the equilibrium list.
    Point(usize),
    /// Index into the cycle list.
    Cycle(usize),
}

/// Candidate pieces of the invariant set between the attractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Member {
    Point(usize),
    Cycle(usize),
}

#[derive(Debug, Clone)]
enum Shape {
    Point(State),
    Path { pts: Vec<State>, lo: State, hi: State },
}

/// Proximity target for terminal events.
#[derive(Debug, Clone)]
struct Target {
    shape: Shape,
    radius: f64,
}

impl Target {
    fn point(p: State) -> Self {
        Target {
            shape: Shape::Point(p),
            radius: 1e-4 * scale(&p),
        }
    }

    fn path(pts: &[State], radius: f64) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in pts {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Target {
            shape: Shape::Path {
                pts: pts.to_vec(),
                lo,
                hi,
            },
            radius,
        }
    }

    fn gap(&self, p: &State) -> f64 {
        match &self.shape {
            Shape::Point(q) => dist(p, q) - self.radius,
            Shape::Path { pts, lo, hi } => {
                let dx = (lo[0] - p[0]).max(p[0] - hi[0]).max(0.0);
                let dy = (lo[1] - p[1]).max(p[1] - hi[1]).max(0.0);
                let coarse = dx.hypot(dy);
                if coarse > 2.0 * self.radius {
                    return coarse - self.radius;
                }
                let n = pts.len();
                (0..n)
                    .map(|i| segment_distance(p, &pts[i], &pts[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
                    - self.radius
            }
        }
    }
}

/// Shared context for classifying where trajectories go.
pub(crate) struct Targets<'a> {
    field: &'a VectorField,
    region: &'a Region,
    attractors: Vec<Target>,
    members: Vec<Target>,
    cfg: FlowConfig,
}

impl<'a> Targets<'a> {
    fn events(&self, with_members: bool) -> Vec<EventSpec<'_>> {
        let mut ev = Vec::new();
        for (i, t) in self.attractors.iter().enumerate() {
            ev.push(EventSpec::new(i, Crossing::Falling, true, move |p: &State| t.gap(p)));
        }
        let a = self.attractors.len();
        if with_members {
            for (j, t) in self.members.iter().enumerate() {
                ev.push(EventSpec::new(a + j, Crossing::Falling, true, move |p: &State| {
                    t.gap(p)
                }));
            }
        }
        ev.push(self.region.exit_event(a + self.members.len()));
        ev
    }

    /// Follow `x0` until it meets a target, leaves, or runs out of time.
    fn run(&self, x0: State, backward: bool, record: bool, with_members: bool) -> (End, Option<Trajectory>) {
        let events = self.events(with_members);
        let span = if backward {
            (0.0, -self.cfg.t_max)
        } else {
            (0.0, self.cfg.t_max)
        };
        let mut opts = Options::with_tol(self.cfg.tol);
        opts.record = record;
        let a = self.attractors.len();
        let m = self.members.len();
        match integrate(self.field, x0, span, &opts, &events) {
            Ok(tr) => {
                let end = match tr.termination {
                    Termination::TimeLimit => End::Timeout,
                    Termination::Event(id) if id < a => End::Attractor(id),
                    Termination::Event(id) if id < a + m => End::Member(id - a),
                    Termination::Event(_) => End::Exit(tr.final_state()),
                };
                (end, Some(tr))
            }
            Err(_) => (End::Failed, None),
        }
    }

    /// Forward orbit until it settles or leaves.
    pub(crate) fn orbit(&self, x0: State) -> Vec<State> {
        self.run(x0, false, true, false)
            .1
            .map(|t| t.points())
            .unwrap_or_else(|| vec![x0])
    }

    pub(crate) fn label(&self, x0: State) -> End {
        if self.region.signed_distance(&x0) > 1e-9 * self.region.diameter().max(1.0) {
            return End::Exit(x0);
        }
        self.run(x0, false, false, false).0
    }
}

/// Outcome of following one repeller ray or cycle offset forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outflow {
    pub source: usize,
    pub start: State,
    pub end: End,
}

/// Everything the verifier needs about the flow inside one region.
#[derive(Debug, Clone)]
pub struct FlowStructure {
    pub dim: usize,
    pub certification: Certification,
    /// Equilibria inside the region, sorted.
    pub equilibria: Vec<Equilibrium>,
    pub outside: Vec<Equilibrium>,
    pub degenerate: Vec<State>,
    pub cycles: Vec<Cycle>,
    pub attractors: Vec<Attractor>,
    pub members: Vec<Member>,
    pub branches: Vec<Branch>,
    pub outflows: Vec<Outflow>,
    pub edges: Vec<Edge>,
    pub components: Vec<Component>,
    pub boundary: BoundaryLabels,
    pub config: FlowConfig,
}

impl FlowStructure {
    /// Representative point of an attractor.
    pub fn attractor_point(&self, a: Attractor) -> State {
        match a {
            Attractor::Point(i) => self.equilibria[i].point,
            Attractor::Cycle(c) => self.cycles[c].points[0],
        }
    }

    pub fn member_equilibria(&self) -> Vec<&Equilibrium> {
        self.members
            .iter()
            .filter_map(|m| match m {
                Member::Point(i) => Some(&self.equilibria[*i]),
                Member::Cycle(_) => None,
            })
            .collect()
    }

    /// Boundary exit points of stable saddle branches.
    pub fn separatrix_points(&self) -> Vec<State> {
        self.branches
            .iter()
            .filter(|b| b.kind == BranchKind::Stable)
            .filter_map(|b| match b.end {
                End::Exit(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    /// `branch_id,t,x,y` rows for every saddle branch.
    pub fn separatrix_csv(&self) -> String {
        let mut out = String::from("branch_id,t,x,y\n");
        for (id, b) in self.branches.iter().enumerate() {
            for (t, p) in &b.path {
                out.push_str(&format!("{id},{t:.16e},{:.16e},{:.16e}\n", p[0], p[1]));
            }
        }
        out
    }

    pub(crate) fn targets<'a>(&self, field: &'a VectorField, region: &'a Region) -> Targets<'a> {
        build_targets(field, region, self.config, &self.equilibria, &self.cycles, &self.attractors, &self.members)
    }
}

fn build_targets<'a>(
    field: &'a VectorField,
    region: &'a Region,
    cfg: FlowConfig,
    eqs: &[Equilibrium],
    cycles: &[Cycle],
    attractors: &[Attractor],
    members: &[Member],
) -> Targets<'a> {
    let cycle_radius = 1e-3 * region.scale();
    let attractors = attractors
        .iter()
        .map(|a| match a {
            Attractor::Point(i) => Target::point(eqs[*i].point),
            Attractor::Cycle(c) => Target::path(&cycles[*c].points, cycle_radius),
        })
        .collect();
    let members = members
        .iter()
        .map(|m| match m {
            Member::Point(i) => Target::point(eqs[*i].point),
            Member::Cycle(c) => Target::path(&cycles[*c].points, cycle_radius),
        })
        .collect();
    Targets {
        field,
        region,
        attractors,
        members,
        cfg,
    }
}

fn same_cycle(a: &Cycle, b: &Cycle, tol: f64) -> bool {
    let t = Target::path(&b.points, 0.0);
    t.gap(&a.points[0]) < tol
}

/// Run the whole pipeline: certification, equilibria, cycles, saddle
/// branches, connections, components and boundary labels.
pub fn analyze_flow(field: &VectorField, region: &Region, cfg: &FlowConfig) -> Result<FlowStructure, FlowError> {
    let dim = field.dim();
    if dim != region.dim() {
        return Err(FlowError::Dimension {
            field: dim,
            region: region.dim(),
        });
    }
    let cfg = *cfg;
    let certification = verify_trapping_region(field, region, cfg.boundary_samples);

    let (lo, hi) = region.bbox();
    let pad = 0.02 * region.diameter();
    let bx = SearchBox::new([lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad]);
    let grid = if dim == 1 {
        [cfg.eq_grid * 8, 1]
    } else {
        [cfg.eq_grid, cfg.eq_grid]
    };
    let search = find_equilibria(field, &bx, grid);
    let edge_tol = 1e-9 * region.diameter().max(1.0);
    let (equilibria, outside): (Vec<_>, Vec<_>) = search
        .equilibria
        .into_iter()
        .partition(|e| region.signed_distance(&e.point) <= edge_tol);

    let mut cycles: Vec<Cycle> = Vec::new();
    if dim == 2 {
        let max_radius = |p: &State| {
            region
                .vertices()
                .iter()
                .map(|v| dist(v, p))
                .fold(0.0, f64::max)
        };
        let stops: Vec<State> = equilibria.iter().map(|e| e.point).collect();
        for eq in &equilibria {
            let found = match eq.class {
                EqClass::UnstableFocus | EqClass::UnstableNode => {
                    find_limit_cycle(field, eq, max_radius(&eq.point), Some(region), &stops, &cfg)?
                }
                EqClass::StableFocus | EqClass::StableNode => {
                    find_repelling_cycle(field, eq, max_radius(&eq.point), Some(region), &stops, &cfg)?
                }
                _ => None,
            };
            if let Some(c) = found {
                let tol = 1e-3 * region.scale();
                if !cycles.iter().any(|o| same_cycle(&c, o, tol)) {
                    cycles.push(c);
                }
            }
        }
    }

    let mut attractors = Vec::new();
    let mut members = Vec::new();
    for (i, eq) in equilibria.iter().enumerate() {
        if eq.class.is_attractor() {
            attractors.push(Attractor::Point(i));
        } else {
            members.push(Member::Point(i));
        }
    }
    for (c, cyc) in cycles.iter().enumerate() {
        match cyc.stability {
            crate::conley::CycleStability::Stable => attractors.push(Attractor::Cycle(c)),
            crate::conley::CycleStability::Unstable => members.push(Member::Cycle(c)),
        }
    }

    let targets = build_targets(field, region, cfg, &equilibria, &cycles, &attractors, &members);

    let mut branches = Vec::new();
    for (j, m) in members.iter().enumerate() {
        let Member::Point(i) = m else { continue };
        let eq = &equilibria[*i];
        if dim == 1 {
            if eq.unstable_dim == 1 {
                branches.extend(manifolds::line_branches(&targets, eq, j));
            }
        } else if eq.class == EqClass::Saddle {
            branches.extend(manifolds::branches(&targets, eq, j)?);
        }
    }

    let outflows = if dim == 2 {
        graph::outflows(&targets, &equilibria, &cycles, &members)
    } else {
        Vec::new()
    };
    let (edges, components) = graph::connect(dim, &equilibria, &members, &branches, &outflows);
    let boundary = basin::boundary_labels(&targets, &certification);

    Ok(FlowStructure {
        dim,
        certification,
        equilibria,
        outside,
        degenerate: search.degenerate,
        cycles,
        attractors,
        members,
        branches,
        outflows,
        edges,
        components,
        boundary,
        config: cfg,
    })
}
