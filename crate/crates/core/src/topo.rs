//! Winding numbers of planar fields along closed curves.

use crate::dynsys::{State, VectorField};
use crate::equilibria::{EqClass, Equilibrium};
use crate::expr::EvalError;
use crate::linalg;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopoError {
    #[error("winding numbers need a planar field, got dimension {0}")]
    Dimension(usize),
    #[error("field vanishes on the curve near {at:?}")]
    ZeroOnCurve { at: State },
    #[error("refinement exhausted near {at:?}; the curve passes too close to a zero")]
    Refinement { at: State },
    #[error("accumulated angle {raw} turns is not an integer")]
    NotInteger { raw: f64 },
    #[error("equilibrium at {at:?} is not hyperbolic")]
    NonHyperbolic { at: State },
    #[error("index of {at:?}: class says {expected}, small circle says {found}")]
    Mismatch {
        at: State,
        expected: i32,
        found: i32,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Circle,
    Polygon,
    RegionBoundary,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Circle { center: State, radius: f64 },
    // closed polyline, last vertex joins the first; cumulative lengths
    Polyline { vertices: Vec<State>, cum: Vec<f64> },
}

/// Counterclockwise closed curve parameterized over `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    pub kind: CurveKind,
    pub samples: usize,
    shape: Shape,
}

const MAX_DEPTH: u32 = 16;

impl ClosedCurve {
    pub fn circle(center: State, radius: f64, samples: usize) -> Self {
        ClosedCurve {
            kind: CurveKind::Circle,
            samples: samples.max(8),
            shape: Shape::Circle { center, radius },
        }
    }

    pub fn polygon(vertices: Vec<State>, samples: usize) -> Self {
        Self::polyline(CurveKind::Polygon, vertices, samples)
    }

    pub fn boundary(vertices: Vec<State>, samples: usize) -> Self {
        Self::polyline(CurveKind::RegionBoundary, vertices, samples)
    }

    fn polyline(kind: CurveKind, vertices: Vec<State>, samples: usize) -> Self {
        let mut cum = vec![0.0];
        let n = vertices.len();
        for i in 0..n {
            let d = linalg::dist(&vertices[i], &vertices[(i + 1) % n]);
            cum.push(cum[i] + d);
        }
        ClosedCurve {
            kind,
            samples: samples.max(n).max(8),
            shape: Shape::Polyline { vertices, cum },
        }
    }

    /// Point at parameter `s` in `[0, 1]`.
    pub fn at(&self, s: f64) -> State {
        match &self.shape {
            Shape::Circle { center, radius } => {
                let a = TAU * s;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
            Shape::Polyline { vertices, cum } => {
                let total = *cum.last().unwrap();
                let target = (s.rem_euclid(1.0)) * total;
                let k = cum.partition_point(|&c| c <= target).saturating_sub(1);
                let k = k.min(vertices.len() - 1);
                let len = cum[k + 1] - cum[k];
                let u = if len > 0.0 { (target - cum[k]) / len } else { 0.0 };
                let a = vertices[k];
                let b = vertices[(k + 1) % vertices.len()];
                [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]
            }
        }
    }

    pub fn resampled(&self, samples: usize) -> Self {
        ClosedCurve {
            samples,
            ..self.clone()
        }
    }
}

fn angle_between(a: &State, b: &State) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.atan2(dot)
}

struct Walker<'a> {
    field: &'a VectorField,
    curve: &'a ClosedCurve,
}

impl Walker<'_> {
    fn value(&self, s: f64) -> Result<State, TopoError> {
        let p = self.curve.at(s);
        let f = self.field.eval(&p)?;
        if f[0].hypot(f[1]) <= 1e-10 {
            return Err(TopoError::ZeroOnCurve { at: p });
        }
        Ok(f)
    }

    fn sweep(&self, s0: f64, f0: State, s1: f64, f1: State, depth: u32) -> Result<f64, TopoError> {
        let d = angle_between(&f0, &f1);
        if d.abs() < FRAC_PI_2 {
            return Ok(d);
        }
        if depth == MAX_DEPTH {
            return Err(TopoError::Refinement {
                at: self.curve.at(0.5 * (s0 + s1)),
            });
        }
        let sm = 0.5 * (s0 + s1);
        let fm = self.value(sm)?;
        Ok(self.sweep(s0, f0, sm, fm, depth + 1)? + self.sweep(sm, fm, s1, f1, depth + 1)?)
    }
}

/// Number of turns of `f` along the curve.
pub fn winding_number(field: &VectorField, curve: &ClosedCurve) -> Result<i32, TopoError> {
    if field.dim() != 2 {
        return Err(TopoError::Dimension(field.dim()));
    }
    let w = Walker { field, curve };
    let n = curve.samples;
    let first = w.value(0.0)?;
    let mut prev = first;
    let mut total = 0.0;
    for i in 1..=n {
        let s1 = i as f64 / n as f64;
        let f1 = if i == n { first } else { w.value(s1)? };
        total += w.sweep((i - 1) as f64 / n as f64, prev, s1, f1, 0)?;
        prev = f1;
    }
    let raw = total / (2.0 * PI);
    let k = raw.round();
    if (raw - k).abs() >= 1e-6 {
        return Err(TopoError::NotInteger { raw });
    }
    Ok(k as i32)
}

/// +1 for nodes and foci, -1 for saddles, confirmed on a small circle whose
/// radius is a quarter of the distance to the nearest other equilibrium,
/// capped at `0.01 * scale`.
pub fn equilibrium_index(
    field: &VectorField,
    eq: &Equilibrium,
    others: &[Equilibrium],
) -> Result<i32, TopoError> {
    if field.dim() != 2 {
        return Err(TopoError::Dimension(field.dim()));
    }
    if eq.class == EqClass::NonHyperbolic {
        return Err(TopoError::NonHyperbolic { at: eq.point });
    }
    let expected = if eq.class == EqClass::Saddle { -1 } else { 1 };
    let nearest = others
        .iter()
        .map(|o| linalg::dist(&o.point, &eq.point))
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let radius = (0.25 * nearest).min(0.01 * eq.scale());
    let found = winding_number(field, &ClosedCurve::circle(eq.point, radius, 64))?;
    if found != expected {
        return Err(TopoError::Mismatch {
            at: eq.point,
            expected,
            found,
        });
    }
    Ok(expected)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Additivity {
    pub winding: i32,
    pub index_sum: i32,
}

impl Additivity {
    pub fn passed(&self) -> bool {
        self.winding == self.index_sum
    }
}

/// Compare the winding number of `curve` with the index sum of the
/// equilibria it encloses.
pub fn additivity_check(
    field: &VectorField,
    curve: &ClosedCurve,
    enclosed: &[Equilibrium],
) -> Result<Additivity, TopoError> {
    let winding = winding_number(field, curve)?;
    let mut index_sum = 0;
    for eq in enclosed {
        index_sum += equilibrium_index(field, eq, enclosed)?;
    }
    Ok(Additivity { winding, index_sum })
}
