//! Closed regions, their boundaries, and inward-flow certification.

use crate::dynsys::{State, VectorField};
use crate::equilibria::scale;
use crate::integrator::{integrate, Crossing, EventSpec, Options};
use crate::linalg::{self, dist};
use crate::topo::ClosedCurve;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Interval { lo: f64, hi: f64 },
    /// Counterclockwise simple polygon, first vertex not repeated.
    Polygon(Vec<State>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub shape: Shape,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegionError {
    #[error("no builtin region for `{0}`")]
    Unknown(String),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(f64, f64),
    #[error("region construction failed: {0}")]
    Construction(String),
}

/// A boundary sample with its inward unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: State,
    pub normal: State,
    pub edge: usize,
}

impl Region {
    pub fn interval(name: &str, lo: f64, hi: f64) -> Result<Region, RegionError> {
        if !(lo < hi) {
            return Err(RegionError::EmptyInterval(lo, hi));
        }
        Ok(Region {
            name: name.into(),
            shape: Shape::Interval { lo, hi },
        })
    }

    /// Polygon from vertices in either orientation.
    pub fn polygon(name: &str, mut vertices: Vec<State>) -> Result<Region, RegionError> {
        if vertices.first() == vertices.last() && vertices.len() > 1 {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(RegionError::TooFewVertices(vertices.len()));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(Region {
            name: name.into(),
            shape: Shape::Polygon(vertices),
        })
    }

    pub fn circle(name: &str, center: State, radius: f64, n: usize) -> Region {
        let vertices = (0..n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        Region {
            name: name.into(),
            shape: Shape::Polygon(vertices),
        }
    }

    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Interval { .. } => 1,
            Shape::Polygon(_) => 2,
        }
    }

    pub fn vertices(&self) -> Vec<State> {
        match &self.shape {
            Shape::Interval { lo, hi } => vec![[*lo, 0.0], [*hi, 0.0]],
            Shape::Polygon(v) => v.clone(),
        }
    }

    /// Lower-left and upper-right corners.
    pub fn bbox(&self) -> (State, State) {
        let v = self.vertices();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &v {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        dist(&lo, &hi)
    }

    /// Reference magnitude for tolerances tied to this region.
    pub fn scale(&self) -> f64 {
        let (lo, hi) = self.bbox();
        1.0 + lo[0].abs().max(lo[1].abs()).max(hi[0].abs()).max(hi[1].abs())
    }

    /// Negative inside, positive outside, zero on the boundary.
    pub fn signed_distance(&self, p: &State) -> f64 {
        match &self.shape {
            Shape::Interval { lo, hi } => (lo - p[0]).max(p[0] - hi),
            Shape::Polygon(v) => {
                let n = v.len();
                let mut best = f64::INFINITY;
                let mut inside = false;
                for i in 0..n {
                    let a = v[i];
                    let b = v[(i + 1) % n];
                    best = best.min(segment_distance(p, &a, &b));
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        if p[0] < x {
                            inside = !inside;
                        }
                    }
                }
                if inside {
                    -best
                } else {
                    best
                }
            }
        }
    }

    pub fn contains(&self, p: &State) -> bool {
        self.signed_distance(p) < 0.0
    }

    /// About `n` boundary samples spread by arc length, at least one per
    /// edge, never on a vertex.
    pub fn boundary_samples(&self, n: usize) -> Vec<BoundarySample> {
        match &self.shape {
            Shape::Interval { lo, hi } => vec![
                BoundarySample {
                    point: [*lo, 0.0],
                    normal: [1.0, 0.0],
                    edge: 0,
                },
                BoundarySample {
                    point: [*hi, 0.0],
                    normal: [-1.0, 0.0],
                    edge: 1,
                },
            ],
            Shape::Polygon(v) => {
                let m = v.len();
                let lens: Vec<f64> = (0..m).map(|i| dist(&v[i], &v[(i + 1) % m])).collect();
                let total: f64 = lens.iter().sum();
                let mut out = Vec::new();
                for i in 0..m {
                    let a = v[i];
                    let b = v[(i + 1) % m];
                    if lens[i] == 0.0 {
                        continue;
                    }
                    let k = ((n as f64 * lens[i] / total).round() as usize).max(1);
                    let normal = [-(b[1] - a[1]) / lens[i], (b[0] - a[0]) / lens[i]];
                    for j in 0..k {
                        let u = (j as f64 + 0.5) / k as f64;
                        out.push(BoundarySample {
                            point: [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])],
                            normal,
                            edge: i,
                        });
                    }
                }
                out
            }
        }
    }

    pub fn as_curve(&self, samples: usize) -> Option<ClosedCurve> {
        match &self.shape {
            Shape::Interval { .. } => None,
            Shape::Polygon(v) => Some(ClosedCurve::boundary(v.clone(), samples)),
        }
    }

    /// Point-in-region event: fires when a trajectory leaves.
    pub fn exit_event(&self, id: usize) -> EventSpec<'_> {
        let slack = 1e-9 * self.diameter().max(1.0);
        EventSpec::new(id, Crossing::Rising, true, move |p: &State| {
            self.signed_distance(p) - slack
        })
    }
}

fn signed_area(v: &[State]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

/// Even-odd rule; orientation does not matter.
pub fn point_in_polygon(v: &[State], p: &State) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn segment_distance(p: &State, a: &State, b: &State) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let u = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, &[a[0] + u * d[0], a[1] + u * d[1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    /// Flow enters the interior at every boundary sample.
    Strict,
    /// Some boundary arcs carry tangential flow that stays inside.
    Tangential,
    Uncertified,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Strict => "H1",
            Status::Tangential => "H1'",
            Status::Uncertified => "uncertified",
        }
    }

    pub fn certified(self) -> bool {
        self != Status::Uncertified
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub status: Status,
    pub samples: Vec<BoundarySample>,
    /// Inclusive index ranges of consecutive tangential samples, cyclic.
    pub tangential_arcs: Vec<(usize, usize)>,
    pub offending: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Flow {
    Inward,
    Tangential,
    Outward,
}

/// Check inward flow along the boundary.
pub fn verify_trapping_region(field: &VectorField, region: &Region, n_samples: usize) -> Certification {
    let samples = region.boundary_samples(n_samples);
    let kinds: Vec<Flow> = samples
        .iter()
        .map(|s| match field.eval(&s.point) {
            Ok(f) => {
                let dot = s.normal[0] * f[0] + s.normal[1] * f[1];
                let sc = scale(&s.point);
                let band = (1e-10 * sc).max(0.02 * f[0].hypot(f[1]));
                if dot.abs() <= band {
                    Flow::Tangential
                } else if dot > 1e-10 * sc {
                    Flow::Inward
                } else {
                    Flow::Outward
                }
            }
            Err(_) => Flow::Outward,
        })
        .collect();
    let mut offending: Vec<usize> = (0..samples.len())
        .filter(|&i| kinds[i] == Flow::Outward)
        .collect();
    let tangential: Vec<usize> = (0..samples.len())
        .filter(|&i| kinds[i] == Flow::Tangential)
        .collect();
    let reach = 1e-4 * region.diameter();
    for &i in &tangential {
        if !stays_inside(field, region, samples[i].point, reach) {
            offending.push(i);
        }
    }
    offending.sort_unstable();
    let status = if !offending.is_empty() {
        Status::Uncertified
    } else if tangential.is_empty() {
        Status::Strict
    } else {
        Status::Tangential
    };
    Certification {
        status,
        tangential_arcs: runs(&tangential, samples.len()),
        samples,
        offending,
    }
}

fn stays_inside(field: &VectorField, region: &Region, p: State, reach: f64) -> bool {
    let out = EventSpec::new(0, Crossing::Rising, true, |q: &State| {
        region.signed_distance(q) - reach
    });
    match integrate(field, p, (0.0, 1.0), &Options::default(), &[out]) {
        Ok(tr) => tr.termination == crate::integrator::Termination::TimeLimit,
        Err(_) => false,
    }
}

fn runs(idx: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &i in idx {
        match out.last_mut() {
            Some(r) if r.1 + 1 == i => r.1 = i,
            _ => out.push((i, i)),
        }
    }
    // join a run that wraps past the last sample
    if out.len() > 1 && out[0].0 == 0 && out.last().unwrap().1 == n - 1 {
        let last = out.pop().unwrap();
        out[0].0 = last.0;
    }
    out
}

/// Hand-built regions for the named models, adapted to their parameters.
pub fn builtin_region(field: &VectorField) -> Result<Region, RegionError> {
    let name = field.name();
    match name {
        "budworm" => {
            let k = field.param("K").unwrap_or(15.0);
            Region::interval(name, 0.1, k + 0.5)
        }
        "griffith" => Region::polygon(
            name,
            vec![[-0.5, -0.4], [4.0, -0.4], [4.0, 3.0], [-0.5, 3.0]],
        ),
        "competition_lv" => Region::polygon(
            name,
            vec![
                [0.5, 0.0],
                [2.5, 0.0],
                [2.5, -0.2],
                [3.5, -0.2],
                [3.5, 3.0],
                [-0.2, 3.0],
                [-0.2, 1.7],
                [0.0, 1.7],
                [0.0, 0.5],
            ],
        ),
        "synthetic_loop" => Ok(Region::circle(name, [0.0, 0.0], 4.0, 256)),
        "synthetic_ring" => Ok(Region::circle(name, [0.0, 0.0], 2.0, 256)),
        "sir_treatment" => sir_region(field),
        "group_defense" => group_defense_region(field),
        other => Err(RegionError::Unknown(other.to_string())),
    }
}

/// Triangle under `S + I = Λ/d` joined with a Lyapunov ellipse around the
/// disease-free equilibrium, whose corner the triangle would otherwise cut.
fn sir_region(field: &VectorField) -> Result<Region, RegionError> {
    let p = |n: &str| field.param(n).unwrap_or(f64::NAN);
    let top = p("Lambda") / p("d");
    let e0 = [top, 0.0];
    let j = field
        .jacobian2(&e0)
        .map_err(|e| RegionError::Construction(e.to_string()))?;
    let q = [[1.0, 0.0], [0.0, 100.0]];
    let pm = linalg::lyapunov(&j, &q).filter(|m| m[0][0] > 0.0 && linalg::det(m) > 0.0);
    let radius = |u: State| -> f64 {
        match pm {
            Some(m) => {
                let quad = u[0] * (m[0][0] * u[0] + m[0][1] * u[1])
                    + u[1] * (m[1][0] * u[0] + m[1][1] * u[1]);
                (5.0 / quad).sqrt()
            }
            // disease-free state not stable: a plain disk keeps the corner
            None => 0.01 * top,
        }
    };
    let mut v = vec![[0.0, 0.0]];
    // arc from the S-axis, below it, round to the line S + I = Λ/d
    let (a0, a1) = (PI, 2.0 * PI + 0.75 * PI);
    let n = 96;
    for k in 0..=n {
        let a = a0 + (a1 - a0) * k as f64 / n as f64;
        let u = [a.cos(), a.sin()];
        let r = radius(u);
        v.push([e0[0] + r * u[0], e0[1] + r * u[1]]);
    }
    v.push([0.0, top]);
    Region::polygon(field.name(), v)
}

/// Boundary made of the prey axis with a notch around `(K, 0)`, a right
/// edge, a slanted top edge to (3, 6), the orbit from there until prey
/// growth turns positive, and a vertical edge back to the axis.
fn group_defense_region(field: &VectorField) -> Result<Region, RegionError> {
    let k = field.param("K").unwrap_or(6.0);
    let k2 = [3.0, 6.0];
    let mut orbit = vec![k2];
    let turn = EventSpec::new(0, Crossing::Rising, true, |s: &State| {
        field.eval(s).map(|f| f[0]).unwrap_or(f64::NAN)
    });
    let tr = integrate(field, k2, (0.0, 50.0), &Options::with_tol(1e-10), &[turn])
        .map_err(|e| RegionError::Construction(e.to_string()))?;
    if tr.termination == crate::integrator::Termination::TimeLimit {
        return Err(RegionError::Construction(
            "orbit from (3, 6) never turns".into(),
        ));
    }
    // densify so chords stay close to the orbit
    for w in tr.samples.windows(2) {
        let (a, b) = (w[0].1, w[1].1);
        let pieces = (dist(&a, &b) / 0.02).ceil().max(1.0) as usize;
        let mut x = a;
        let dt = (w[1].0 - w[0].0) / pieces as f64;
        for _ in 0..pieces {
            let seg = integrate(field, x, (0.0, dt), &Options::with_tol(1e-11), &[])
                .map_err(|e| RegionError::Construction(e.to_string()))?;
            x = seg.final_state();
            orbit.push(x);
        }
    }
    let k3 = *orbit.last().unwrap();
    let mut v = vec![
        [k3[0], 0.0],
        [k - 0.4, 0.0],
        [k - 0.4, -0.2],
        [k + 0.5, -0.2],
        [k + 0.5, 2.0],
    ];
    v.extend(orbit);
    Region::polygon(field.name(), v)
}
