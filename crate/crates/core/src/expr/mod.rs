//! Arithmetic expressions for vector-field right-hand sides.
//!
//! Expressions are parsed against a declared symbol list, evaluated in
//! double precision, and differentiated symbolically so that every model
//! carries an analytic Jacobian.

mod diff;
mod parse;
mod tape;

use std::collections::HashMap;
use std::fmt;

pub use parse::{parse, ParseError};
pub use tape::Tape;

/// Elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// A variable reference: its name and its position in the symbol list the
/// expression was parsed against.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub slot: usize,
}

/// Expression tree. Values are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("division by zero in `{at}`")]
    DivisionByZero { at: String },
    #[error("domain error in `{at}`: {reason}")]
    Domain { at: String, reason: &'static str },
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(name: &str, slot: usize) -> Expr {
        Expr::Var(Var {
            name: name.to_string(),
            slot,
        })
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    /// Evaluate with named bindings.
    pub fn eval(&self, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
        self.eval_with(&|v: &Var| bindings.get(&v.name).copied())
    }

    /// Evaluate with values indexed by symbol slot.
    pub fn eval_slots(&self, values: &[f64]) -> Result<f64, EvalError> {
        self.eval_with(&|v: &Var| values.get(v.slot).copied())
    }

    fn eval_with(&self, lookup: &dyn Fn(&Var) -> Option<f64>) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(v) => lookup(v).ok_or_else(|| EvalError::Unbound(v.name.clone())),
            Expr::Neg(a) => Ok(-a.eval_with(lookup)?),
            Expr::Bin(op, a, b) => {
                let x = a.eval_with(lookup)?;
                let y = b.eval_with(lookup)?;
                apply_bin(*op, x, y).map_err(|e| e.locate(self))
            }
            Expr::Call(f, a) => {
                let x = a.eval_with(lookup)?;
                apply_func(*f, x).map_err(|e| e.locate(self))
            }
        }
    }

    /// True when the expression references the named variable.
    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => v.name == name,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(name),
            Expr::Bin(_, a, b) => a.depends_on(name) || b.depends_on(name),
        }
    }

    /// Collect the names of all referenced variables.
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(&v.name) {
                    out.push(v.name.clone());
                }
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.variables(out),
            Expr::Bin(_, a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }

    /// Replace variables for which `f` returns a value, then simplify.
    pub fn substitute(&self, f: &dyn Fn(&Var) -> Option<Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => diff::neg(a.substitute(f)),
            Expr::Call(func, a) => diff::call(*func, a.substitute(f)),
            Expr::Bin(op, a, b) => diff::combine(*op, a.substitute(f), b.substitute(f)),
        }
    }

    /// Symbolic derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Expr {
        diff::derivative(self, var)
    }

    /// Compile into a flat instruction tape for fast repeated evaluation.
    pub fn compile(&self) -> Tape {
        Tape::compile(self)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => {
                if v.is_sign_negative() && *v != 0.0 {
                    write!(f, "({v})")
                } else {
                    write!(f, "{}", v.abs())
                }
            }
            Expr::Var(v) => write!(f, "{}", v.name),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_at(f, 3)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Expr::Bin(op, a, b) => {
                let (lp, rp) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 3),
                };
                a.fmt_at(f, lp)?;
                write!(f, "{}", op.symbol())?;
                b.fmt_at(f, rp)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Arithmetic fault without location; located by the caller.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Fault {
    DivZero,
    Domain(&'static str),
}

impl Fault {
    pub(crate) fn locate(self, at: &impl fmt::Display) -> EvalError {
        match self {
            Fault::DivZero => EvalError::DivisionByZero { at: at.to_string() },
            Fault::Domain(reason) => EvalError::Domain {
                at: at.to_string(),
                reason,
            },
        }
    }
}

pub(crate) fn integral_exponent(y: f64) -> Option<i32> {
    if y.fract() == 0.0 && y.abs() < 1e9 {
        Some(y as i32)
    } else {
        None
    }
}

pub(crate) fn pow_value(x: f64, y: f64) -> Result<f64, Fault> {
    match integral_exponent(y) {
        Some(n) => {
            if x == 0.0 && n < 0 {
                Err(Fault::DivZero)
            } else {
                Ok(x.powi(n))
            }
        }
        None => {
            if x < 0.0 {
                Err(Fault::Domain("non-integer power of a negative base"))
            } else if x == 0.0 && y < 0.0 {
                Err(Fault::DivZero)
            } else {
                Ok(x.powf(y))
            }
        }
    }
}

pub(crate) fn apply_bin(op: BinOp, x: f64, y: f64) -> Result<f64, Fault> {
    match op {
        BinOp::Add => Ok(x + y),
        BinOp::Sub => Ok(x - y),
        BinOp::Mul => Ok(x * y),
        BinOp::Div => {
            if y == 0.0 {
                Err(Fault::DivZero)
            } else {
                Ok(x / y)
            }
        }
        BinOp::Pow => pow_value(x, y),
    }
}

pub(crate) fn apply_func(f: Func, x: f64) -> Result<f64, Fault> {
    match f {
        Func::Exp => Ok(x.exp()),
        Func::Ln => {
            if x <= 0.0 {
                Err(Fault::Domain("logarithm of a non-positive value"))
            } else {
                Ok(x.ln())
            }
        }
        Func::Sin => Ok(x.sin()),
        Func::Cos => Ok(x.cos()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, syms: &[&str]) -> Expr {
        parse(src, syms).unwrap()
    }

    fn bind(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn eval_examples() {
        let e = p("2*x*(1-x/6)", &["x"]);
        assert_eq!(e.eval(&bind(&[("x", 3.0)])).unwrap(), 3.0);
        let e = p("x^2/(1+x^2)", &["x"]);
        assert_eq!(e.eval(&bind(&[("x", 0.0)])).unwrap(), 0.0);
    }

    #[test]
    fn eval_division_by_zero_is_located() {
        let e = p("x/ (x-1)", &["x"]);
        let err = e.eval(&bind(&[("x", 1.0)])).unwrap_err();
        match err {
            EvalError::DivisionByZero { at } => assert_eq!(at, "x/(x-1)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eval_domain_and_unbound_errors() {
        let e = p("ln(x)", &["x"]);
        assert!(matches!(
            e.eval(&bind(&[("x", -1.0)])),
            Err(EvalError::Domain { .. })
        ));
        let e = p("x^0.5", &["x"]);
        assert!(matches!(
            e.eval(&bind(&[("x", -4.0)])),
            Err(EvalError::Domain { .. })
        ));
        assert_eq!(e.eval(&bind(&[("x", 4.0)])).unwrap(), 2.0);
        let e = p("x+y", &["x", "y"]);
        assert_eq!(
            e.eval(&bind(&[("x", 1.0)])),
            Err(EvalError::Unbound("y".into()))
        );
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        let e = p("x^3", &["x"]);
        assert_eq!(e.eval(&bind(&[("x", -2.0)])).unwrap(), -8.0);
    }

    #[test]
    fn printer_keeps_structure() {
        for src in [
            "-a*x + y",
            "x^2/(1+x^2)",
            "2^3^2",
            "(2^3)^2",
            "a-(b-c)",
            "a/(b*c)",
            "-(-x)",
            "x^-2",
            "-x^2",
            "exp(-x)*sin(y)",
            "(a+b)*-c",
        ] {
            let e = p(src, &["a", "b", "c", "x", "y"]);
            let printed = e.to_string();
            let again = p(&printed, &["a", "b", "c", "x", "y"]);
            assert_eq!(e, again, "{src} printed as {printed}");
        }
    }
}
