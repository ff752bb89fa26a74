//! Locating, refining and classifying equilibria.

use crate::dynsys::{State, VectorField};
use crate::expr::EvalError;
use crate::linalg::{self, Mat2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EqClass {
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    Saddle,
    NonHyperbolic,
}

impl EqClass {
    pub fn is_attractor(self) -> bool {
        matches!(self, EqClass::StableNode | EqClass::StableFocus)
    }

    pub fn name(self) -> &'static str {
        match self {
            EqClass::StableNode => "StableNode",
            EqClass::UnstableNode => "UnstableNode",
            EqClass::StableFocus => "StableFocus",
            EqClass::UnstableFocus => "UnstableFocus",
            EqClass::Saddle => "Saddle",
            EqClass::NonHyperbolic => "NonHyperbolic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub point: State,
    /// One eigenvalue per dimension.
    pub eigenvalues: Vec<Complex64>,
    pub class: EqClass,
    /// Number of eigenvalues with positive real part.
    pub unstable_dim: usize,
    pub residual: f64,
    pub jacobian: Mat2,
}

impl Equilibrium {
    pub fn scale(&self) -> f64 {
        scale(&self.point)
    }
}

/// `1 + ‖p‖∞`, the reference magnitude for relative tolerances.
pub fn scale(p: &State) -> f64 {
    1.0 + linalg::inf_norm(p)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NewtonError {
    #[error("no convergence after {iterations} iterations (|f| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian near {at:?}")]
    Singular { at: State },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("|f| = {residual:e} at {at:?} is too large for an equilibrium")]
    NotAnEquilibrium { at: State, residual: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn residual(field: &VectorField, p: &State) -> Result<f64, EvalError> {
    let f = field.eval(p)?;
    Ok(linalg::inf_norm(&f))
}

fn newton_step(field: &VectorField, p: &State) -> Result<State, NewtonError> {
    let f = field.eval(p)?;
    let j = field.jacobian2(p)?;
    if field.dim() == 1 {
        if j[0][0].abs() < 1e-14 * scale(p) {
            return Err(NewtonError::Singular { at: *p });
        }
        return Ok([-f[0] / j[0][0], 0.0]);
    }
    if linalg::det(&j).abs() < 1e-14 * scale(p) {
        return Err(NewtonError::Singular { at: *p });
    }
    let d = linalg::solve(&j, &[-f[0], -f[1]]).ok_or(NewtonError::Singular { at: *p })?;
    Ok(d)
}

/// Smallest singular value estimate relative to the Jacobian's size.
fn degenerate(field: &VectorField, j: &Mat2) -> bool {
    let n = linalg::norm(j);
    let smallest = if field.dim() == 1 {
        j[0][0].abs()
    } else if n > 0.0 {
        linalg::det(j).abs() / n
    } else {
        0.0
    };
    smallest < 1e-5 * n.max(1.0)
}

/// Damped Newton iteration to `|f| < 1e-12·scale`.
pub fn newton_refine(field: &VectorField, guess: State) -> Result<State, NewtonError> {
    let mut p = guess;
    let mut r = residual(field, &p)?;
    let mut iterations = 0;
    while r >= 1e-12 * scale(&p) {
        if iterations == 50 {
            return Err(NewtonError::NoConvergence {
                iterations,
                residual: r,
            });
        }
        iterations += 1;
        let d = newton_step(field, &p)?;
        let mut lambda = 1.0;
        let mut next = p;
        let mut next_r = f64::INFINITY;
        for _ in 0..=8 {
            next = [p[0] + lambda * d[0], p[1] + lambda * d[1]];
            next_r = residual(field, &next).unwrap_or(f64::INFINITY);
            if next_r < r {
                break;
            }
            lambda *= 0.5;
        }
        if !next_r.is_finite() {
            return Err(NewtonError::NoConvergence {
                iterations,
                residual: r,
            });
        }
        p = next;
        r = next_r;
    }
    if iterations > 0 {
        // one polishing step; kept only if it helps
        if let Ok(d) = newton_step(field, &p) {
            let q = [p[0] + d[0], p[1] + d[1]];
            if residual(field, &q).is_ok_and(|rq| rq < r) {
                p = q;
            }
        }
    }
    let j = field.jacobian2(&p)?;
    if degenerate(field, &j) {
        return Err(NewtonError::Singular { at: p });
    }
    Ok(p)
}

/// Linearize at `point` and classify.
pub fn classify(field: &VectorField, point: State) -> Result<Equilibrium, ClassifyError> {
    let residual = residual(field, &point)?;
    if residual >= 1e-8 * scale(&point) {
        return Err(ClassifyError::NotAnEquilibrium {
            at: point,
            residual,
        });
    }
    let j = field.jacobian2(&point)?;
    let (eigenvalues, class) = if field.dim() == 1 {
        let l = j[0][0];
        let class = if l == 0.0 {
            EqClass::NonHyperbolic
        } else if l < 0.0 {
            EqClass::StableNode
        } else {
            EqClass::UnstableNode
        };
        (vec![Complex64::new(l, 0.0)], class)
    } else {
        let ev = linalg::eigenvalues(&j);
        let threshold = 1e-8 * linalg::norm(&j);
        let hyperbolic = linalg::norm(&j) > 0.0 && ev.iter().all(|l| l.re.abs() >= threshold);
        let class = if !hyperbolic {
            EqClass::NonHyperbolic
        } else if linalg::det(&j) < 0.0 {
            EqClass::Saddle
        } else {
            let focus = ev[0].im != 0.0;
            let stable = ev.iter().all(|l| l.re < 0.0);
            match (focus, stable) {
                (true, true) => EqClass::StableFocus,
                (true, false) => EqClass::UnstableFocus,
                (false, true) => EqClass::StableNode,
                (false, false) => EqClass::UnstableNode,
            }
        };
        (ev.to_vec(), class)
    };
    let threshold = 1e-8 * linalg::norm(&j);
    let unstable_dim = eigenvalues.iter().filter(|l| l.re > threshold).count();
    Ok(Equilibrium {
        point,
        eigenvalues,
        class,
        unstable_dim,
        residual,
        jacobian: j,
    })
}

/// Axis-aligned search box; the second axis is ignored for 1-D fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub lo: State,
    pub hi: State,
}

impl SearchBox {
    pub fn new(lo: State, hi: State) -> Self {
        SearchBox { lo, hi }
    }

    pub fn diameter(&self, dim: usize) -> f64 {
        (0..dim)
            .map(|k| (self.hi[k] - self.lo[k]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn contains(&self, p: &State, dim: usize, slack: f64) -> bool {
        (0..dim).all(|k| p[k] >= self.lo[k] - slack && p[k] <= self.hi[k] + slack)
    }
}

#[derive(Debug, Clone)]
pub struct Search {
    pub equilibria: Vec<Equilibrium>,
    /// Seeds whose Newton run failed to converge.
    pub dropped_seeds: usize,
    /// Zeros where the Jacobian is (numerically) singular.
    pub degenerate: Vec<State>,
}

/// Newton from every cell centre of a grid over `bx`, sign-change cells
/// first, then deduplicate and sort.
pub fn find_equilibria(field: &VectorField, bx: &SearchBox, grid: [usize; 2]) -> Search {
    let dim = field.dim();
    let nx = grid[0].max(1);
    let ny = if dim == 1 { 1 } else { grid[1].max(1) };
    let cell = |i: usize, j: usize| -> State {
        let x = bx.lo[0] + (i as f64 + 0.5) * (bx.hi[0] - bx.lo[0]) / nx as f64;
        let y = if dim == 1 {
            0.0
        } else {
            bx.lo[1] + (j as f64 + 0.5) * (bx.hi[1] - bx.lo[1]) / ny as f64
        };
        [x, y]
    };
    let corner = |i: usize, j: usize| -> State {
        let x = bx.lo[0] + i as f64 * (bx.hi[0] - bx.lo[0]) / nx as f64;
        let y = if dim == 1 {
            0.0
        } else {
            bx.lo[1] + j as f64 * (bx.hi[1] - bx.lo[1]) / ny as f64
        };
        [x, y]
    };
    let cells: Vec<(usize, usize)> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .collect();
    let changes = |i: usize, j: usize| -> bool {
        let corners: Vec<State> = if dim == 1 {
            vec![corner(i, 0), corner(i + 1, 0)]
        } else {
            vec![
                corner(i, j),
                corner(i + 1, j),
                corner(i, j + 1),
                corner(i + 1, j + 1),
            ]
        };
        let vals: Vec<State> = corners.iter().filter_map(|c| field.eval(c).ok()).collect();
        if vals.len() != corners.len() {
            return false;
        }
        (0..dim).all(|k| {
            let lo = vals.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
            let hi = vals.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
            lo <= 0.0 && hi >= 0.0
        })
    };
    let (mut seeds, rest): (Vec<_>, Vec<_>) = cells.into_iter().partition(|&(i, j)| changes(i, j));
    seeds.extend(rest);

    let outcomes: Vec<Result<State, NewtonError>> = seeds
        .par_iter()
        .map(|&(i, j)| newton_refine(field, cell(i, j)))
        .collect();

    let diam = bx.diameter(dim);
    let mut dropped = 0;
    let mut roots: Vec<Equilibrium> = Vec::new();
    let mut degenerate: Vec<State> = Vec::new();
    for out in outcomes {
        match out {
            Ok(p) => {
                if !bx.contains(&p, dim, 1e-9 * diam) {
                    continue;
                }
                if let Ok(eq) = classify(field, p) {
                    roots.push(eq);
                } else {
                    dropped += 1;
                }
            }
            Err(NewtonError::Singular { at }) => {
                if bx.contains(&at, dim, 1e-9 * diam)
                    && residual(field, &at).is_ok_and(|r| r < 1e-8 * scale(&at))
                {
                    degenerate.push(at);
                } else {
                    dropped += 1;
                }
            }
            Err(_) => dropped += 1,
        }
    }
    roots.sort_by(|a, b| {
        a.point[0]
            .total_cmp(&b.point[0])
            .then(a.point[1].total_cmp(&b.point[1]))
    });
    let radius = 1e-6 * diam;
    let mut unique: Vec<Equilibrium> = Vec::new();
    for eq in roots {
        match unique
            .iter_mut()
            .find(|u| linalg::dist(&u.point, &eq.point) <= radius)
        {
            Some(u) => {
                if eq.residual < u.residual {
                    *u = eq;
                }
            }
            None => unique.push(eq),
        }
    }
    unique.retain(|e| e.residual < 1e-10 * e.scale());
    unique.sort_by(|a, b| {
        a.point[0]
            .total_cmp(&b.point[0])
            .then(a.point[1].total_cmp(&b.point[1]))
    });
    degenerate.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    degenerate.dedup_by(|a, b| linalg::dist(a, b) <= 1e-3 * diam.max(1.0));
    Search {
        equilibria: unique,
        dropped_seeds: dropped,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{builtin, make_system, ModelSpec};

    #[test]
    fn newton_on_griffith() {
        let f = builtin("griffith", &[]).unwrap();
        let p = newton_refine(&f, [1.9, 2.1]).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-12 && (p[1] - 2.0).abs() < 1e-12);
        assert_eq!(newton_refine(&f, [0.0, 0.0]).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn degenerate_root_is_refused() {
        let f = make_system(ModelSpec {
            name: "sq".into(),
            states: vec!["x".into()],
            params: vec![],
            rhs: vec!["x^2".into()],
        })
        .unwrap();
        let err = newton_refine(&f, [0.1, 0.0]).unwrap_err();
        assert!(matches!(
            err,
            NewtonError::Singular { .. } | NewtonError::NoConvergence { .. }
        ));
    }

    #[test]
    fn griffith_classes() {
        let f = builtin("griffith", &[]).unwrap();
        let s = classify(&f, [0.5, 0.5]).unwrap();
        assert_eq!((s.class, s.unstable_dim), (EqClass::Saddle, 1));
        assert!((linalg::det(&s.jacobian) + 0.24).abs() < 1e-12);
        let b = classify(&f, [2.0, 2.0]).unwrap();
        assert_eq!((b.class, b.unstable_dim), (EqClass::StableNode, 0));
    }
}
