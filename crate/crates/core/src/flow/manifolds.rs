//! Stable and unstable branches of saddles.

use super::{End, FlowConfig, FlowError, Target, Targets};
use crate::dynsys::{State, VectorField};
use crate::equilibria::{EqClass, Equilibrium};
use crate::linalg::eigenvector;
use crate::region::Region;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchKind {
    /// Followed backward in time.
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub saddle: State,
    /// Position of the saddle in the S-candidate list.
    pub member: usize,
    pub kind: BranchKind,
    /// Which side of the saddle along the eigenvector, +1 or -1.
    pub side: i8,
    pub end: End,
    /// Samples ordered from the saddle outward, with their (signed) times.
    pub path: Vec<(f64, State)>,
}

impl Branch {
    pub fn label(&self) -> String {
        let k = match self.kind {
            BranchKind::Stable => "stable",
            BranchKind::Unstable => "unstable",
        };
        let s = if self.side > 0 { '+' } else { '-' };
        format!("{k}{s}@({:.6},{:.6})", self.saddle[0], self.saddle[1])
    }
}

fn oriented(v: State) -> State {
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

pub(super) fn branches(targets: &Targets, saddle: &Equilibrium, member: usize) -> Result<Vec<Branch>, FlowError> {
    if saddle.class != EqClass::Saddle {
        return Err(FlowError::BadSeed(saddle.class.name()));
    }
    let mut lam: Vec<f64> = saddle.eigenvalues.iter().map(|z| z.re).collect();
    lam.sort_by(f64::total_cmp);
    let (ls, lu) = (lam[0], lam[1]);
    if (lu - ls).abs() < 1e-10 {
        return Err(FlowError::DegenerateSaddle { at: saddle.point });
    }
    let vs = oriented(eigenvector(&saddle.jacobian, ls));
    let vu = oriented(eigenvector(&saddle.jacobian, lu));
    let p = saddle.point;
    let delta = 1e-6 * saddle.scale();
    let mut out = Vec::with_capacity(4);
    for (kind, v) in [(BranchKind::Stable, vs), (BranchKind::Unstable, vu)] {
        for side in [1i8, -1] {
            let s = side as f64 * delta;
            let start = [p[0] + s * v[0], p[1] + s * v[1]];
            let (end, tr) = targets.run(start, kind == BranchKind::Stable, true, true);
            out.push(Branch {
                saddle: p,
                member,
                kind,
                side,
                end,
                path: tr.map(|t| t.samples).unwrap_or_default(),
            });
        }
    }
    Ok(out)
}

/// Both sides of an unstable point on the line.
pub(super) fn line_branches(targets: &Targets, eq: &Equilibrium, member: usize) -> Vec<Branch> {
    let delta = 1e-6 * eq.scale();
    [1i8, -1]
        .into_iter()
        .map(|side| {
            let start = [eq.point[0] + side as f64 * delta, 0.0];
            let (end, tr) = targets.run(start, false, true, true);
            Branch {
                saddle: eq.point,
                member,
                kind: BranchKind::Unstable,
                side,
                end,
                path: tr.map(|t| t.samples).unwrap_or_default(),
            }
        })
        .collect()
}

/// The four branches of `saddle`, stopped at the region boundary or near
/// one of `attractors`.
pub fn saddle_manifolds(
    field: &VectorField,
    saddle: &Equilibrium,
    region: &Region,
    attractors: &[State],
    cfg: &FlowConfig,
) -> Result<Vec<Branch>, FlowError> {
    let targets = Targets {
        field,
        region,
        attractors: attractors.iter().map(|a| Target::point(*a)).collect(),
        members: Vec::new(),
        cfg: *cfg,
    };
    branches(&targets, saddle, 0)
}
