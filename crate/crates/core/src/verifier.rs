//! Bistability checks over a computed flow structure, and parameter sweeps.

use crate::conley::{index_of_equilibrium, ConleyIndex};
use crate::dynsys::{ModelError, State, VectorField};
use crate::equilibria::{EqClass, Equilibrium};
use crate::flow::{
    analyze_flow, separatrix_sides, Attractor, BranchKind, Component, End, FlowConfig, FlowStructure, Member, Node,
    SideCheck,
};
use crate::region::{builtin_region, point_in_polygon, Region, RegionError, Shape};
use crate::topo::{equilibrium_index, winding_number};
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("sweep values must be increasing")]
    Unordered,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub flow: FlowConfig,
    pub seed: u64,
    /// Interior samples for the separatrix side test.
    pub side_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            flow: FlowConfig::default(),
            seed: 42,
            side_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    pub status: Status,
    pub evidence: String,
}

const CHECKS: [(&str, &str, &str); 13] = [
    ("C1", "exactly-two-attractors", "a certified trapping region holds exactly two attractors"),
    ("C2", "s-nonempty", "something other than the attractors stays in the region forever"),
    ("C3", "odd-count", "the set between two point attractors holds an odd number 2k+1 of equilibria"),
    ("C4", "saddle-count", "k+1 of those equilibria are saddles and the other k are sources"),
    ("C5", "index-sum", "their winding indices add up to -1"),
    ("C6", "wedge-sigma1", "the Conley indices of the components wedge to the one-sphere"),
    ("C7", "connecting-orbits", "orbits run from the separating set to each attractor"),
    ("C8", "boundary-transitions", "basin labels change twice around the boundary, or never when a loop separates"),
    ("C9", "at-most-one-loop", "at most one loop, and it surrounds an attractor"),
    ("C10", "case2-even-count", "with a cycle attractor the separating set holds an even number of equilibria"),
    ("C11", "case2-indices", "annulus index two-sphere wedge one-sphere, or two-sphere inside and one-sphere outside the cycle"),
    ("C12", "case2-connected", "each separating piece of the cycle case is connected"),
    ("C13", "line-middle-unstable", "on the line the middle equilibrium is unstable and splits the two basins"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    /// Two point attractors in the plane.
    TwoPoint,
    /// Cycle attractor around the point attractor.
    CycleAroundPoint,
    /// Point attractor outside the cycle attractor.
    CycleBesidePoint,
    Line,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelInfo {
    pub name: String,
    pub states: Vec<String>,
    pub params: BTreeMap<String, f64>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionInfo {
    pub name: String,
    pub kind: &'static str,
    pub vertices: usize,
    pub certification: &'static str,
    pub tangential_arcs: Vec<(usize, usize)>,
    pub offending: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqInfo {
    pub point: State,
    pub class: &'static str,
    pub unstable_dim: usize,
    /// `[re, im]` pairs.
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorInfo {
    pub kind: &'static str,
    pub point: State,
    pub class: &'static str,
    pub period: Option<f64>,
    pub multiplier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberInfo {
    pub kind: &'static str,
    pub point: State,
    pub class: &'static str,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConleyEntry {
    pub object: String,
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatrixInfo {
    pub boundary_points: Vec<State>,
    pub transitions: usize,
    pub side_check: Option<SideCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub model: ModelInfo,
    pub region: RegionInfo,
    pub seed: u64,
    pub case: Case,
    pub equilibria: Vec<EqInfo>,
    pub attractors: Vec<AttractorInfo>,
    pub s_set: Vec<MemberInfo>,
    pub k: Option<usize>,
    pub separatrix: Option<SeparatrixInfo>,
    pub checks: Vec<Check>,
    pub conley: Vec<ConleyEntry>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }

    pub fn all_applicable_pass(&self) -> bool {
        self.failed().is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

struct Checks {
    out: Vec<Check>,
}

impl Checks {
    fn set(&mut self, id: &str, pass: bool, evidence: String) {
        self.put(id, if pass { Status::Pass } else { Status::Fail }, evidence);
    }

    fn put(&mut self, id: &str, status: Status, evidence: String) {
        if let Some(c) = self.out.iter_mut().find(|c| c.id == id) {
            c.status = status;
            c.evidence = evidence;
        }
    }
}

fn fresh_checks(evidence: &str) -> Checks {
    Checks {
        out: CHECKS
            .iter()
            .map(|(id, name, anchor)| Check {
                id,
                name,
                anchor,
                status: Status::Inapplicable,
                evidence: evidence.to_string(),
            })
            .collect(),
    }
}

fn fmt_point(p: &State, dim: usize) -> String {
    if dim == 1 {
        format!("{:.6}", p[0])
    } else {
        format!("({:.6}, {:.6})", p[0], p[1])
    }
}

fn model_info(field: &VectorField) -> ModelInfo {
    let spec = field.spec();
    ModelInfo {
        name: spec.name.clone(),
        states: spec.states.clone(),
        params: spec.params.iter().cloned().collect(),
        rhs: spec.rhs.clone(),
    }
}

fn eq_info(e: &Equilibrium) -> EqInfo {
    EqInfo {
        point: e.point,
        class: e.class.name(),
        unstable_dim: e.unstable_dim,
        eigenvalues: e.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
    }
}

/// Run the flow analysis and evaluate every check. Pipeline failures end
/// up as failed checks, never as an error.
pub fn analyze(field: &VectorField, region: &Region, opts: &VerifyOptions) -> Report {
    let model = model_info(field);
    let base_region = RegionInfo {
        name: region.name.clone(),
        kind: match region.shape {
            Shape::Interval { .. } => "interval",
            Shape::Polygon(_) => "polygon",
        },
        vertices: region.vertices().len(),
        certification: "uncertified",
        tangential_arcs: Vec::new(),
        offending: Vec::new(),
    };
    let fs = match analyze_flow(field, region, &opts.flow) {
        Ok(fs) => fs,
        Err(e) => {
            let mut checks = fresh_checks("not evaluated");
            for c in &mut checks.out {
                c.status = Status::Fail;
                c.evidence = format!("pipeline error: {e}");
            }
            return Report {
                schema: SCHEMA,
                model,
                region: base_region,
                seed: opts.seed,
                case: Case::Unsupported,
                equilibria: Vec::new(),
                attractors: Vec::new(),
                s_set: Vec::new(),
                k: None,
                separatrix: None,
                checks: checks.out,
                conley: Vec::new(),
                notes: vec![format!("flow analysis failed: {e}")],
            };
        }
    };
    report_from(field, region, &fs, opts, model, base_region)
}

fn component_of(fs: &FlowStructure, member: usize) -> usize {
    fs.components
        .iter()
        .position(|c| c.members.contains(&member))
        .unwrap_or(usize::MAX)
}

fn classify_case(fs: &FlowStructure) -> Case {
    if fs.dim == 1 {
        return Case::Line;
    }
    let points: Vec<usize> = fs
        .attractors
        .iter()
        .filter_map(|a| match a {
            Attractor::Point(i) => Some(*i),
            _ => None,
        })
        .collect();
    let cycles: Vec<usize> = fs
        .attractors
        .iter()
        .filter_map(|a| match a {
            Attractor::Cycle(c) => Some(*c),
            _ => None,
        })
        .collect();
    match (points.len(), cycles.len()) {
        (2, 0) => Case::TwoPoint,
        (1, 1) => {
            if fs.cycles[cycles[0]].contains(&fs.equilibria[points[0]].point) {
                Case::CycleAroundPoint
            } else {
                Case::CycleBesidePoint
            }
        }
        _ => Case::Unsupported,
    }
}

fn report_from(
    field: &VectorField,
    region: &Region,
    fs: &FlowStructure,
    opts: &VerifyOptions,
    model: ModelInfo,
    mut region_info: RegionInfo,
) -> Report {
    let cert = &fs.certification;
    region_info.certification = cert.status.label();
    region_info.tangential_arcs = cert.tangential_arcs.clone();
    region_info.offending = cert.offending.iter().map(|&i| cert.samples[i].point).collect();

    let dim = fs.dim;
    let case = classify_case(fs);
    let mut notes = Vec::new();
    if !fs.outside.is_empty() {
        notes.push(format!(
            "{} equilibria lie outside the region and are ignored",
            fs.outside.len()
        ));
    }
    if !fs.degenerate.is_empty() {
        notes.push(format!("{} degenerate zeros found", fs.degenerate.len()));
    }
    let unresolved: usize = fs.components.iter().map(|c| c.unresolved).sum();
    if unresolved > 0 {
        notes.push(format!("{unresolved} saddle branches did not settle"));
    }
    if fs.boundary.bottom > 0 {
        notes.push(format!(
            "{} boundary samples reached no attractor",
            fs.boundary.bottom
        ));
    }
    notes.push("boundary points beyond the first two are not detectable by sampling".into());

    let attractors: Vec<AttractorInfo> = fs
        .attractors
        .iter()
        .map(|a| match a {
            Attractor::Point(i) => AttractorInfo {
                kind: "equilibrium",
                point: fs.equilibria[*i].point,
                class: fs.equilibria[*i].class.name(),
                period: None,
                multiplier: None,
            },
            Attractor::Cycle(c) => AttractorInfo {
                kind: "cycle",
                point: fs.cycles[*c].points[0],
                class: "StableCycle",
                period: Some(fs.cycles[*c].period),
                multiplier: Some(fs.cycles[*c].multiplier),
            },
        })
        .collect();
    let s_set: Vec<MemberInfo> = fs
        .members
        .iter()
        .enumerate()
        .map(|(j, m)| match m {
            Member::Point(i) => MemberInfo {
                kind: "equilibrium",
                point: fs.equilibria[*i].point,
                class: fs.equilibria[*i].class.name(),
                component: component_of(fs, j),
            },
            Member::Cycle(c) => MemberInfo {
                kind: "cycle",
                point: fs.cycles[*c].points[0],
                class: "UnstableCycle",
                component: component_of(fs, j),
            },
        })
        .collect();

    let mut conley = Vec::new();
    for e in &fs.equilibria {
        let index = index_of_equilibrium(e)
            .map(|x| x.to_string())
            .unwrap_or_else(|err| format!("undefined: {err}"));
        conley.push(ConleyEntry {
            object: format!("{} {}", e.class.name(), fmt_point(&e.point, dim)),
            index,
        });
    }
    for c in &fs.cycles {
        let index = c
            .index()
            .map(|x| x.to_string())
            .unwrap_or_else(|err| format!("undefined: {err}"));
        conley.push(ConleyEntry {
            object: format!("{:?} cycle through {}", c.stability, fmt_point(&c.points[0], dim)),
            index,
        });
    }
    for (n, c) in fs.components.iter().enumerate() {
        conley.push(ConleyEntry {
            object: format!("S component {n}"),
            index: c
                .index
                .as_ref()
                .map(|x| x.to_string())
                .unwrap_or_else(|| "undefined".into()),
        });
    }
    let total = fs
        .components
        .iter()
        .try_fold(ConleyIndex::trivial(), |acc, c| c.index.as_ref().map(|x| acc.wedge(x)));
    conley.push(ConleyEntry {
        object: "S total".into(),
        index: total
            .as_ref()
            .map(|x| x.to_string())
            .unwrap_or_else(|| "undefined".into()),
    });

    let mut checks = fresh_checks("not applicable to this case");
    let mut k = None;
    let attractor_list = attractors
        .iter()
        .map(|a| format!("{} {}", a.class, fmt_point(&a.point, dim)))
        .collect::<Vec<_>>()
        .join(", ");
    let c1 = cert.status.certified() && case != Case::Unsupported && fs.attractors.len() == 2;
    checks.set(
        "C1",
        c1,
        format!(
            "region {}; {} attractors: [{}]",
            cert.status.label(),
            fs.attractors.len(),
            attractor_list
        ),
    );
    if case == Case::Unsupported || !cert.status.certified() {
        return Report {
            schema: SCHEMA,
            model,
            region: region_info,
            seed: opts.seed,
            case,
            equilibria: fs.equilibria.iter().map(eq_info).collect(),
            attractors,
            s_set,
            k,
            separatrix: None,
            checks: checks.out,
            conley,
            notes,
        };
    }

    let s_eqs: Vec<&Equilibrium> = fs.member_equilibria();
    checks.set(
        "C2",
        !fs.members.is_empty(),
        format!(
            "{} equilibria and {} unstable cycles in S",
            s_eqs.len(),
            fs.members.len() - s_eqs.len()
        ),
    );

    let saddles = s_eqs.iter().filter(|e| e.class == EqClass::Saddle).count();
    let sources = s_eqs
        .iter()
        .filter(|e| e.class != EqClass::Saddle && e.unstable_dim > 0)
        .count();
    if matches!(case, Case::TwoPoint | Case::Line) {
        let n = s_eqs.len();
        let odd = n % 2 == 1;
        if odd {
            k = Some((n - 1) / 2);
        }
        checks.set("C3", odd, format!("{n} equilibria in S"));
    }
    if case == Case::TwoPoint {
        let c4 = k.is_some_and(|k| saddles == k + 1 && sources == k);
        checks.set(
            "C4",
            c4,
            format!("k={k:?}: {saddles} saddles, {sources} sources in S"),
        );
        check_index_sum(field, region, fs, &s_eqs, &mut checks);
    }

    if matches!(case, Case::TwoPoint | Case::Line) {
        let c6 = total.as_ref() == Some(&ConleyIndex::sphere(1));
        let parts = fs
            .components
            .iter()
            .map(|c| {
                format!(
                    "{} (n={}, loop={})",
                    c.index.as_ref().map(|x| x.to_string()).unwrap_or("undefined".into()),
                    c.n_external,
                    c.has_loop
                )
            })
            .collect::<Vec<_>>()
            .join(" ∨ ");
        checks.set("C6", c6, format!("components: {parts}"));
    }

    // S-members that must feed both attractors
    let sources_for_c7: Vec<usize> = match case {
        Case::CycleBesidePoint => outside_members(fs),
        _ => (0..fs.members.len()).collect(),
    };
    let reach: Vec<bool> = (0..fs.attractors.len())
        .map(|a| {
            fs.edges.iter().any(|e| {
                e.to == Node::Attractor(a) && matches!(e.from, Node::Member(m) if sources_for_c7.contains(&m))
            })
        })
        .collect();
    checks.set(
        "C7",
        reach.len() == 2 && reach.iter().all(|r| *r),
        format!(
            "edges into attractors: {}",
            reach
                .iter()
                .enumerate()
                .map(|(a, r)| format!("A{a}:{}", if *r { "yes" } else { "no" }))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    );

    let has_loop = fs.components.iter().any(|c| c.has_loop);
    let expect = if has_loop || case == Case::CycleAroundPoint {
        0
    } else {
        2
    };
    let exits = fs.separatrix_points();
    let c8 = fs.boundary.transitions == expect && (expect != 2 || dim == 1 || exits.len() == 2);
    checks.set(
        "C8",
        c8,
        format!(
            "{} label changes over {} boundary samples (expected {expect}); {} stable branches leave the region",
            fs.boundary.transitions,
            fs.boundary.points.len(),
            exits.len()
        ),
    );

    if case == Case::TwoPoint {
        check_loops(fs, &mut checks);
    }
    if matches!(case, Case::CycleAroundPoint | Case::CycleBesidePoint) {
        check_cycle_case(fs, case, &s_eqs, &mut checks);
    }
    if case == Case::Line {
        check_line(fs, &mut checks);
    }

    let separatrix = (dim == 2).then(|| SeparatrixInfo {
        boundary_points: exits,
        transitions: fs.boundary.transitions,
        side_check: separatrix_sides(field, region, fs, opts.side_samples, opts.seed),
    });

    Report {
        schema: SCHEMA,
        model,
        region: region_info,
        seed: opts.seed,
        case,
        equilibria: fs.equilibria.iter().map(eq_info).collect(),
        attractors,
        s_set,
        k,
        separatrix,
        checks: checks.out,
        conley,
        notes,
    }
}

fn check_index_sum(
    field: &VectorField,
    region: &Region,
    fs: &FlowStructure,
    s_eqs: &[&Equilibrium],
    checks: &mut Checks,
) {
    let mut all = fs.equilibria.clone();
    all.extend(fs.outside.iter().cloned());
    let mut sum = 0;
    for e in s_eqs {
        match equilibrium_index(field, e, &all) {
            Ok(i) => sum += i,
            Err(err) => {
                checks.set("C5", false, format!("index at {:?}: {err}", e.point));
                return;
            }
        }
    }
    let mut total = 0;
    for e in &fs.equilibria {
        match equilibrium_index(field, e, &all) {
            Ok(i) => total += i,
            Err(err) => {
                checks.set("C5", false, format!("index at {:?}: {err}", e.point));
                return;
            }
        }
    }
    let boundary = region
        .as_curve(512)
        .ok_or_else(|| "region has no boundary curve".to_string())
        .and_then(|c| winding_number(field, &c).map_err(|e| e.to_string()));
    match boundary {
        Ok(w) => checks.set(
            "C5",
            sum == -1 && w == total,
            format!("S index sum {sum}; boundary winding {w} against enclosed sum {total}"),
        ),
        Err(e) => checks.set("C5", false, format!("S index sum {sum}; boundary winding failed: {e}")),
    }
}

fn hull(mut pts: Vec<State>) -> Vec<State> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &State, a: &State, b: &State| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<State> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<State> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Points traced by a component: its equilibria, cycles and the stable
/// branches joining them.
fn component_outline(fs: &FlowStructure, comp: &Component) -> Vec<State> {
    let mut pts = Vec::new();
    for &j in &comp.members {
        match fs.members[j] {
            Member::Point(i) => pts.push(fs.equilibria[i].point),
            Member::Cycle(c) => pts.extend(fs.cycles[c].points.iter().copied()),
        }
    }
    for b in &fs.branches {
        if comp.members.contains(&b.member) && matches!(b.end, End::Member(m) if comp.members.contains(&m)) {
            pts.extend(b.path.iter().map(|s| s.1));
        }
    }
    pts
}

fn check_loops(fs: &FlowStructure, checks: &mut Checks) {
    let loops: Vec<&Component> = fs.components.iter().filter(|c| c.has_loop).collect();
    let mut evidence = format!("{} loops", loops.len());
    let mut ok = loops.len() <= 1;
    for c in &loops {
        let cycle = c.members.iter().find_map(|j| match fs.members[*j] {
            Member::Cycle(ci) => Some(ci),
            _ => None,
        });
        let outline = match cycle {
            Some(ci) => fs.cycles[ci].points.clone(),
            None => hull(component_outline(fs, c)),
        };
        let inside: Vec<usize> = (0..fs.attractors.len())
            .filter(|&a| point_in_polygon(&outline, &fs.attractor_point(fs.attractors[a])))
            .collect();
        evidence += &format!(
            "; {} loop encloses attractors {:?}",
            if cycle.is_some() { "cycle" } else { "connection" },
            inside
        );
        ok &= !inside.is_empty();
    }
    checks.set("C9", ok, evidence);
}

/// Members whose points lie outside the attracting cycle.
fn outside_members(fs: &FlowStructure) -> Vec<usize> {
    let cycle = fs.attractors.iter().find_map(|a| match a {
        Attractor::Cycle(c) => Some(&fs.cycles[*c]),
        _ => None,
    });
    (0..fs.members.len())
        .filter(|&j| {
            let p = match fs.members[j] {
                Member::Point(i) => fs.equilibria[i].point,
                Member::Cycle(c) => fs.cycles[c].points[0],
            };
            cycle.is_none_or(|c| !c.contains(&p))
        })
        .collect()
}

fn wedge_of(fs: &FlowStructure, members: &[usize]) -> (Option<ConleyIndex>, usize) {
    let comps: Vec<&Component> = fs
        .components
        .iter()
        .filter(|c| c.members.iter().any(|m| members.contains(m)))
        .collect();
    let index = comps
        .iter()
        .try_fold(ConleyIndex::trivial(), |acc, c| c.index.as_ref().map(|x| acc.wedge(x)));
    (index, comps.len())
}

fn show(x: &Option<ConleyIndex>) -> String {
    x.as_ref().map(|i| i.to_string()).unwrap_or_else(|| "undefined".into())
}

fn check_cycle_case(fs: &FlowStructure, case: Case, s_eqs: &[&Equilibrium], checks: &mut Checks) {
    let n = s_eqs.len();
    checks.set("C10", n.is_multiple_of(2), format!("{n} equilibria in S"));
    let all: Vec<usize> = (0..fs.members.len()).collect();
    if case == Case::CycleAroundPoint {
        let (index, parts) = wedge_of(fs, &all);
        checks.set(
            "C11",
            index == Some(ConleyIndex::from_dims([2, 1])),
            format!("annulus S has index {}", show(&index)),
        );
        checks.set("C12", parts == 1, format!("S splits into {parts} components"));
    } else {
        let outside = outside_members(fs);
        let inside: Vec<usize> = all.iter().copied().filter(|j| !outside.contains(j)).collect();
        let (ii, ni) = wedge_of(fs, &inside);
        let (io, no) = wedge_of(fs, &outside);
        checks.set(
            "C11",
            ii == Some(ConleyIndex::sphere(2)) && io == Some(ConleyIndex::sphere(1)),
            format!("inside the cycle {}, outside {}", show(&ii), show(&io)),
        );
        checks.set(
            "C12",
            ni == 1 && no == 1,
            format!("{ni} components inside the cycle, {no} outside"),
        );
    }
}

fn check_line(fs: &FlowStructure, checks: &mut Checks) {
    let pts: Vec<f64> = fs
        .attractors
        .iter()
        .map(|a| fs.attractor_point(*a)[0])
        .collect();
    if pts.len() != 2 {
        checks.set("C13", false, "needs two attractors".into());
        return;
    }
    let (lo, hi) = (pts[0].min(pts[1]), pts[0].max(pts[1]));
    let between: Vec<&Equilibrium> = fs
        .equilibria
        .iter()
        .filter(|e| e.point[0] > lo && e.point[0] < hi)
        .collect();
    let ok = between.len() == 1 && between[0].unstable_dim == 1 && {
        let mut ends: Vec<i64> = fs
            .branches
            .iter()
            .filter(|b| b.kind == BranchKind::Unstable && b.saddle == between[0].point)
            .map(|b| b.end.code())
            .collect();
        ends.sort_unstable();
        ends == vec![0, 1]
    };
    let desc = between
        .iter()
        .map(|e| format!("{} at {:.6}", e.class.name(), e.point[0]))
        .collect::<Vec<_>>()
        .join(", ");
    checks.set("C13", ok, format!("between {lo:.6} and {hi:.6}: [{desc}]"));
}

/// Where each sweep step takes its region from.
#[derive(Debug, Clone)]
pub enum RegionSource {
    /// Rebuild the model's hand-made region for every value.
    Builtin,
    Fixed(Region),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub attractors: usize,
    pub cycle_attractors: usize,
    pub loop_present: bool,
    /// `class@point` per equilibrium in the region.
    pub equilibria: Vec<String>,
    pub case: Case,
    pub passed: usize,
    pub failed: usize,
    /// Differs from the previous row in attractor count, loop or classes.
    pub changed: bool,
    pub error: Option<String>,
}

/// Re-run the analysis for each value of one parameter.
pub fn sweep(
    field: &VectorField,
    param: &str,
    values: &[f64],
    region: &RegionSource,
    opts: &VerifyOptions,
) -> Result<Vec<SweepRow>, VerifyError> {
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(VerifyError::Unordered);
    }
    if field.param(param).is_none() {
        return Err(ModelError::UnknownParameter {
            model: field.name().to_string(),
            name: param.to_string(),
        }
        .into());
    }
    let mut rows: Vec<SweepRow> = Vec::new();
    for &v in values {
        let row = sweep_row(field, param, v, region, opts);
        let row = match rows.last() {
            Some(prev) => SweepRow {
                changed: prev.attractors != row.attractors
                    || prev.loop_present != row.loop_present
                    || classes(prev) != classes(&row),
                ..row
            },
            None => row,
        };
        rows.push(row);
    }
    Ok(rows)
}

fn classes(r: &SweepRow) -> Vec<&str> {
    r.equilibria
        .iter()
        .map(|s| s.split('@').next().unwrap_or(""))
        .collect()
}

fn sweep_row(field: &VectorField, param: &str, v: f64, source: &RegionSource, opts: &VerifyOptions) -> SweepRow {
    let failed_row = |e: String| SweepRow {
        value: v,
        attractors: 0,
        cycle_attractors: 0,
        loop_present: false,
        equilibria: Vec::new(),
        case: Case::Unsupported,
        passed: 0,
        failed: 0,
        changed: false,
        error: Some(e),
    };
    let f = match field.with_params(&[(param.to_string(), v)]) {
        Ok(f) => f,
        Err(e) => return failed_row(e.to_string()),
    };
    let region = match source {
        RegionSource::Builtin => match builtin_region(&f) {
            Ok(r) => r,
            Err(e) => return failed_row(e.to_string()),
        },
        RegionSource::Fixed(r) => r.clone(),
    };
    let fs = match analyze_flow(&f, &region, &opts.flow) {
        Ok(fs) => fs,
        Err(e) => return failed_row(e.to_string()),
    };
    let quick = VerifyOptions {
        side_samples: 0,
        ..*opts
    };
    let report = report_from(&f, &region, &fs, &quick, model_info(&f), RegionInfo {
        name: region.name.clone(),
        kind: "",
        vertices: 0,
        certification: "",
        tangential_arcs: Vec::new(),
        offending: Vec::new(),
    });
    SweepRow {
        value: v,
        attractors: fs.attractors.len(),
        cycle_attractors: fs
            .attractors
            .iter()
            .filter(|a| matches!(a, Attractor::Cycle(_)))
            .count(),
        loop_present: fs.components.iter().any(|c| c.has_loop),
        equilibria: fs
            .equilibria
            .iter()
            .map(|e| format!("{}@{}", e.class.name(), fmt_point(&e.point, fs.dim)))
            .collect(),
        case: report.case,
        passed: report.checks.iter().filter(|c| c.status == Status::Pass).count(),
        failed: report.checks.iter().filter(|c| c.status == Status::Fail).count(),
        changed: false,
        error: None,
    }
}
