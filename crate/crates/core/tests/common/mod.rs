//! Random polynomial fields with an analytic Jacobian kept on the side, so
//! tests can compute equilibrium indices without going through the library.

#![allow(dead_code)]

use bistable::dynsys::{make_system, ModelSpec, State, VectorField};
use rand::Rng;

/// Exponent pairs of every monomial of degree at most three.
pub const MONOMIALS: [(i32, i32); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

#[derive(Debug, Clone)]
pub struct Cubic {
    pub p: [f64; 10],
    pub q: [f64; 10],
}

fn text(c: &[f64; 10]) -> String {
    let terms: Vec<String> = MONOMIALS
        .iter()
        .zip(c)
        .map(|(&(i, j), v)| format!("({v:.6})*x^{i}*y^{j}"))
        .collect();
    terms.join(" + ")
}

fn poly(c: &[f64; 10], x: f64, y: f64) -> f64 {
    MONOMIALS
        .iter()
        .zip(c)
        .map(|(&(i, j), v)| v * x.powi(i) * y.powi(j))
        .sum()
}

fn poly_dx(c: &[f64; 10], x: f64, y: f64) -> f64 {
    MONOMIALS
        .iter()
        .zip(c)
        .filter(|((i, _), _)| *i > 0)
        .map(|(&(i, j), v)| v * i as f64 * x.powi(i - 1) * y.powi(j))
        .sum()
}

fn poly_dy(c: &[f64; 10], x: f64, y: f64) -> f64 {
    MONOMIALS
        .iter()
        .zip(c)
        .filter(|((_, j), _)| *j > 0)
        .map(|(&(i, j), v)| v * j as f64 * x.powi(i) * y.powi(j - 1))
        .sum()
}

impl Cubic {
    /// Coefficients uniform in [-1, 1], rounded to the six decimals the
    /// textual form carries.
    pub fn random(rng: &mut impl Rng) -> Cubic {
        let mut draw = || {
            let mut c = [0.0; 10];
            for v in &mut c {
                *v = (rng.gen_range(-1.0..1.0) * 1e6_f64).round() / 1e6;
            }
            c
        };
        Cubic { p: draw(), q: draw() }
    }

    pub fn field(&self) -> VectorField {
        make_system(ModelSpec {
            name: "cubic".into(),
            states: vec!["x".into(), "y".into()],
            params: vec![],
            rhs: vec![text(&self.p), text(&self.q)],
        })
        .expect("generated field parses")
    }

    pub fn eval(&self, s: &State) -> State {
        [poly(&self.p, s[0], s[1]), poly(&self.q, s[0], s[1])]
    }

    pub fn det_jacobian(&self, s: &State) -> f64 {
        let (x, y) = (s[0], s[1]);
        poly_dx(&self.p, x, y) * poly_dy(&self.q, x, y) - poly_dy(&self.p, x, y) * poly_dx(&self.q, x, y)
    }
}
