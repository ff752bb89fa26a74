//! Autonomous vector fields of dimension one or two.

mod fixtures;

pub use fixtures::{builtin, builtin_names, fixture, Fixture};

use crate::expr::{parse, EvalError, Expr, ParseError, Tape};
use crate::linalg::Mat2;

/// Planar state; one-dimensional systems use only the first entry and keep
/// the second at zero.
pub type State = [f64; 2];

/// Textual description of a model, one right-hand side per state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub states: Vec<String>,
    pub params: Vec<(String, f64)>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` has no parameter `{name}`")]
    UnknownParameter { model: String, name: String },
    #[error("parameter `{0}` is never referenced")]
    UnusedParameter(String),
    #[error("dimension must be 1 or 2, got {0}")]
    Dimension(usize),
    #[error("{states} state names but {rhs} right-hand sides")]
    Arity { states: usize, rhs: usize },
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
    #[error("in d{field}: {source}")]
    Parse {
        field: String,
        #[source]
        source: ParseError,
    },
}

/// `dx/dt = f(x)` with parameters bound and an analytic Jacobian.
#[derive(Debug, Clone)]
pub struct VectorField {
    spec: ModelSpec,
    rhs: Vec<Expr>,
    rhs_tape: Vec<Tape>,
    // row-major partial derivatives, absent when built without them
    jac_tape: Option<Vec<Tape>>,
}

/// Build a field from its textual spec, deriving the Jacobian symbolically.
pub fn make_system(spec: ModelSpec) -> Result<VectorField, ModelError> {
    let dim = spec.states.len();
    if dim == 0 || dim > 2 {
        return Err(ModelError::Dimension(dim));
    }
    if spec.rhs.len() != dim {
        return Err(ModelError::Arity {
            states: dim,
            rhs: spec.rhs.len(),
        });
    }
    let mut symbols: Vec<&str> = spec.states.iter().map(String::as_str).collect();
    for (p, _) in &spec.params {
        symbols.push(p);
    }
    for (i, s) in symbols.iter().enumerate() {
        if symbols[..i].contains(s) {
            return Err(ModelError::Duplicate(s.to_string()));
        }
    }
    let mut parsed = Vec::with_capacity(dim);
    for (state, src) in spec.states.iter().zip(&spec.rhs) {
        let e = parse(src, &symbols).map_err(|source| ModelError::Parse {
            field: state.clone(),
            source,
        })?;
        parsed.push(e);
    }
    for (p, _) in &spec.params {
        if !parsed.iter().any(|e| e.depends_on(p)) {
            return Err(ModelError::UnusedParameter(p.clone()));
        }
    }
    let bind = |v: &crate::expr::Var| {
        (v.slot >= dim).then(|| Expr::Num(spec.params[v.slot - dim].1))
    };
    let rhs: Vec<Expr> = parsed.iter().map(|e| e.substitute(&bind)).collect();
    let mut jac = Vec::with_capacity(dim * dim);
    for e in &rhs {
        for s in &spec.states {
            jac.push(e.differentiate(s).compile());
        }
    }
    Ok(VectorField {
        rhs_tape: rhs.iter().map(Expr::compile).collect(),
        rhs,
        jac_tape: Some(jac),
        spec,
    })
}

impl VectorField {
    pub fn dim(&self) -> usize {
        self.spec.states.len()
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn states(&self) -> &[String] {
        &self.spec.states
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.spec.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.spec
            .params
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    /// Right-hand sides with parameters folded in.
    pub fn rhs(&self) -> &[Expr] {
        &self.rhs
    }

    /// Rebuild with some parameters replaced.
    pub fn with_params(&self, overrides: &[(String, f64)]) -> Result<VectorField, ModelError> {
        let mut spec = self.spec.clone();
        for (name, v) in overrides {
            let slot = spec
                .params
                .iter_mut()
                .find(|(n, _)| n == name)
                .ok_or_else(|| ModelError::UnknownParameter {
                    model: spec.name.clone(),
                    name: name.clone(),
                })?;
            slot.1 = *v;
        }
        make_system(spec)
    }

    /// Same field with the analytic Jacobian dropped, so `jacobian` falls
    /// back to central differences.
    pub fn without_jacobian(&self) -> VectorField {
        VectorField {
            jac_tape: None,
            ..self.clone()
        }
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac_tape.is_some()
    }

    pub fn eval(&self, x: &State) -> Result<State, EvalError> {
        let mut out = [0.0; 2];
        for (o, t) in out.iter_mut().zip(&self.rhs_tape) {
            *o = t.eval(x)?;
        }
        Ok(out)
    }

    /// Jacobian padded to 2x2; for one-dimensional fields only `[0][0]` is
    /// meaningful.
    pub fn jacobian2(&self, x: &State) -> Result<Mat2, EvalError> {
        match &self.jac_tape {
            Some(tapes) => {
                let n = self.dim();
                let mut m = [[0.0; 2]; 2];
                for i in 0..n {
                    for j in 0..n {
                        m[i][j] = tapes[i * n + j].eval(x)?;
                    }
                }
                Ok(m)
            }
            None => self.jacobian_fd(x),
        }
    }

    /// Jacobian as a `dim x dim` matrix.
    pub fn jacobian(&self, x: &State) -> Result<Vec<Vec<f64>>, EvalError> {
        let m = self.jacobian2(x)?;
        let n = self.dim();
        Ok((0..n).map(|i| m[i][..n].to_vec()).collect())
    }

    /// Central differences with `h = 1e-6·max(1, |x_j|)`.
    pub fn jacobian_fd(&self, x: &State) -> Result<Mat2, EvalError> {
        let n = self.dim();
        let mut m = [[0.0; 2]; 2];
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1.0);
            let mut hi = *x;
            let mut lo = *x;
            hi[j] += h;
            lo[j] -= h;
            let fh = self.eval(&hi)?;
            let fl = self.eval(&lo)?;
            for i in 0..n {
                m[i][j] = (fh[i] - fl[i]) / (2.0 * h);
            }
        }
        Ok(m)
    }
}
