//! Basin labels on grids, boundaries, and random samples.

use super::{Attractor, BranchKind, End, FlowStructure, Targets};
use crate::dynsys::{State, VectorField};
use crate::region::{point_in_polygon, segment_distance, Certification, Region, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLabels {
    pub points: Vec<State>,
    pub labels: Vec<End>,
    /// Cyclic label sequence after collapsing tangential arcs and dropping
    /// undecided samples.
    pub sequence: Vec<i64>,
    pub transitions: usize,
    /// Samples that reached no attractor in time.
    pub bottom: usize,
}

pub(super) fn boundary_labels(targets: &Targets, cert: &Certification) -> BoundaryLabels {
    let points: Vec<State> = cert.samples.iter().map(|s| s.point).collect();
    let labels: Vec<End> = points.par_iter().map(|p| targets.label(*p)).collect();
    let n = points.len();

    // each tangential arc counts once, with the label of the end the flow
    // slides toward
    let mut keep = vec![true; n];
    for &(s, e) in &cert.tangential_arcs {
        let idx: Vec<usize> = if s <= e {
            (s..=e).collect()
        } else {
            (s..n).chain(0..=e).collect()
        };
        let drift: f64 = idx
            .iter()
            .filter_map(|&i| {
                let smp = &cert.samples[i];
                let f = targets.field.eval(&smp.point).ok()?;
                Some(f[0] * smp.normal[1] - f[1] * smp.normal[0])
            })
            .sum();
        let exit = if drift >= 0.0 { e } else { s };
        for i in idx {
            keep[i] = i == exit;
        }
    }
    let sequence: Vec<i64> = (0..n)
        .filter(|&i| keep[i] && !labels[i].is_bottom())
        .map(|i| labels[i].code())
        .collect();
    let m = sequence.len();
    let transitions = if m < 2 {
        0
    } else {
        (0..m).filter(|&k| sequence[k] != sequence[(k + 1) % m]).count()
    };
    BoundaryLabels {
        bottom: labels.iter().filter(|l| l.is_bottom()).count(),
        points,
        labels,
        sequence,
        transitions,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinMap {
    pub nx: usize,
    pub ny: usize,
    /// Row-major from the lower-left cell, `(ix, iy, centre, label)`.
    pub cells: Vec<(usize, usize, State, i64)>,
    /// Cells per label; -1 undecided, -2 outside the region.
    pub counts: BTreeMap<i64, usize>,
    /// Undecided share among cells inside the region.
    pub bottom_fraction: f64,
    pub boundary_transitions: usize,
}

impl BasinMap {
    /// `ix,iy,x,y,label`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ix,iy,x,y,label\n");
        for (ix, iy, p, l) in &self.cells {
            let _ = writeln!(out, "{ix},{iy},{:.10e},{:.10e},{l}", p[0], p[1]);
        }
        out
    }

    pub fn nonempty_basins(&self) -> usize {
        self.counts.keys().filter(|k| **k >= 0).count()
    }
}

/// Label the centre of every cell of an `n`×`n` grid over the region's
/// bounding box (`n`×1 on the line).
pub fn basin_map(field: &VectorField, region: &Region, fs: &FlowStructure, n: usize) -> BasinMap {
    let targets = fs.targets(field, region);
    let (lo, hi) = region.bbox();
    let nx = n.max(1);
    let ny = if fs.dim == 1 { 1 } else { nx };
    let centres: Vec<(usize, usize, State)> = (0..ny)
        .flat_map(|iy| (0..nx).map(move |ix| (ix, iy)))
        .map(|(ix, iy)| {
            let x = lo[0] + (ix as f64 + 0.5) * (hi[0] - lo[0]) / nx as f64;
            let y = if ny == 1 {
                0.0
            } else {
                lo[1] + (iy as f64 + 0.5) * (hi[1] - lo[1]) / ny as f64
            };
            (ix, iy, [x, y])
        })
        .collect();
    let cells: Vec<(usize, usize, State, i64)> = centres
        .par_iter()
        .map(|&(ix, iy, p)| {
            let label = if region.contains(&p) {
                targets.label(p).code()
            } else {
                -2
            };
            (ix, iy, p, label)
        })
        .collect();
    let mut counts = BTreeMap::new();
    for c in &cells {
        *counts.entry(c.3).or_insert(0) += 1;
    }
    let inside = cells.iter().filter(|c| c.3 != -2).count();
    let bottom = counts.get(&-1).copied().unwrap_or(0);
    BasinMap {
        nx,
        ny,
        cells,
        bottom_fraction: if inside == 0 {
            0.0
        } else {
            bottom as f64 / inside as f64
        },
        counts,
        boundary_transitions: fs.boundary.transitions,
    }
}

/// Agreement between sampled basins and the side of the separatrix each
/// sample lies on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideCheck {
    pub samples: usize,
    pub agree: usize,
    pub fraction: f64,
    pub seed: u64,
    /// Attractor on the side cut off by the separatrix and the boundary arc.
    pub inside_label: i64,
    pub outside_label: i64,
}

/// Ordered points of the separatrix from one boundary exit to the other,
/// or None unless exactly two stable branches leave the region and the
/// saddles they start from are linked by stable connections.
fn separatrix_curve(fs: &FlowStructure) -> Option<Vec<State>> {
    let exits: Vec<_> = fs
        .branches
        .iter()
        .filter(|b| b.kind == BranchKind::Stable && matches!(b.end, End::Exit(_)))
        .collect();
    if exits.len() != 2 {
        return None;
    }
    let (a, b) = (exits[0].member, exits[1].member);
    let states = |path: &[(f64, State)]| path.iter().map(|s| s.1).collect::<Vec<_>>();

    // breadth-first over stable connections, which carry the orbit points
    let links: Vec<(usize, usize, Vec<State>)> = fs
        .branches
        .iter()
        .filter_map(|br| match (br.kind, br.end) {
            (BranchKind::Stable, End::Member(k)) => Some((br.member, k, states(&br.path))),
            _ => None,
        })
        .collect();
    let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut queue = VecDeque::from([a]);
    let mut seen = vec![a];
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for (li, (s, k, _)) in links.iter().enumerate() {
            let v = if *s == u {
                *k
            } else if *k == u {
                *s
            } else {
                continue;
            };
            if !seen.contains(&v) {
                seen.push(v);
                prev.insert(v, (u, li));
                queue.push_back(v);
            }
        }
    }
    if a != b && !prev.contains_key(&b) {
        return None;
    }
    let mut chain: Vec<Vec<State>> = Vec::new();
    let mut v = b;
    while v != a {
        let (u, li) = prev[&v];
        let (s, _, pts) = &links[li];
        let mut seg = pts.clone();
        if *s != u {
            seg.reverse();
        }
        chain.push(seg);
        v = u;
    }
    chain.reverse();

    let mut curve = states(&exits[0].path);
    curve.reverse();
    for seg in chain {
        curve.extend(seg);
    }
    curve.extend(states(&exits[1].path));
    Some(curve)
}

/// Edge index and position along the boundary of the closest point.
fn locate(v: &[State], p: &State) -> (usize, f64) {
    let n = v.len();
    let mut best = (0, 0.0, f64::INFINITY);
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let d = segment_distance(p, &a, &b);
        if d < best.2 {
            let e = [b[0] - a[0], b[1] - a[1]];
            let len2 = e[0] * e[0] + e[1] * e[1];
            let u = if len2 > 0.0 {
                (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            best = (i, u, d);
        }
    }
    (best.0, best.1)
}

/// Sample `n` uniform interior points with a seeded generator and compare
/// each one's attractor with the side of the separatrix it lies on.
pub fn separatrix_sides(
    field: &VectorField,
    region: &Region,
    fs: &FlowStructure,
    n: usize,
    seed: u64,
) -> Option<SideCheck> {
    if fs.attractors.len() != 2 {
        return None;
    }
    let Shape::Polygon(v) = &region.shape else {
        return None;
    };
    let mut piece = separatrix_curve(fs)?;
    let start = *piece.first()?;
    let end = *piece.last()?;
    let (e0, u0) = locate(v, &start);
    let (e1, u1) = locate(v, &end);
    // walk the boundary counterclockwise from the last point to the first
    let m = v.len();
    if !(e1 == e0 && u1 <= u0) {
        let mut i = (e1 + 1) % m;
        loop {
            piece.push(v[i]);
            if i == e0 {
                break;
            }
            i = (i + 1) % m;
        }
    }

    let rep = |a: Attractor| match a {
        Attractor::Point(i) => fs.equilibria[i].point,
        Attractor::Cycle(c) => fs.cycles[c].points[0],
    };
    let sides: Vec<bool> = fs
        .attractors
        .iter()
        .map(|a| point_in_polygon(&piece, &rep(*a)))
        .collect();
    if sides[0] == sides[1] {
        return None;
    }
    let (inside_label, outside_label) = if sides[0] { (0, 1) } else { (1, 0) };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = region.bbox();
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
        if region.contains(&p) {
            pts.push(p);
        }
    }
    let targets = fs.targets(field, region);
    let agree = pts
        .par_iter()
        .filter(|p| {
            let want = if point_in_polygon(&piece, p) {
                inside_label
            } else {
                outside_label
            };
            targets.label(**p).code() == want
        })
        .count();
    Some(SideCheck {
        samples: n,
        agree,
        fraction: agree as f64 / n.max(1) as f64,
        seed,
        inside_label,
        outside_label,
    })
}
