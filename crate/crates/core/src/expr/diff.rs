//! Symbolic differentiation with light, best-effort simplification.

use super::{apply_bin, apply_func, integral_exponent, BinOp, Expr, Func};

fn is_num(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Num(c) if *c == v)
}

fn clean(v: f64) -> Expr {
    // collapse -0.0 so printing stays parseable
    Expr::Num(if v == 0.0 { 0.0 } else { v })
}

pub(super) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(c) => clean(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::neg(other),
    }
}

pub(super) fn call(f: Func, a: Expr) -> Expr {
    if let Expr::Num(c) = a {
        if let Ok(v) = apply_func(f, c) {
            if v.is_finite() {
                return clean(v);
            }
        }
    }
    Expr::call(f, a)
}

pub(super) fn combine(op: BinOp, a: Expr, b: Expr) -> Expr {
    if let (Expr::Num(x), Expr::Num(y)) = (&a, &b) {
        if let Ok(v) = apply_bin(op, *x, *y) {
            if v.is_finite() {
                return clean(v);
            }
        }
    }
    match op {
        BinOp::Add => {
            if is_num(&a, 0.0) {
                b
            } else if is_num(&b, 0.0) {
                a
            } else {
                Expr::bin(op, a, b)
            }
        }
        BinOp::Sub => {
            if is_num(&b, 0.0) {
                a
            } else if is_num(&a, 0.0) {
                neg(b)
            } else {
                Expr::bin(op, a, b)
            }
        }
        BinOp::Mul => {
            if is_num(&a, 0.0) || is_num(&b, 0.0) {
                Expr::Num(0.0)
            } else if is_num(&a, 1.0) {
                b
            } else if is_num(&b, 1.0) {
                a
            } else if is_num(&a, -1.0) {
                neg(b)
            } else if is_num(&b, -1.0) {
                neg(a)
            } else {
                Expr::bin(op, a, b)
            }
        }
        BinOp::Div => {
            if is_num(&b, 1.0) {
                a
            } else if is_num(&a, 0.0) && !is_num(&b, 0.0) {
                Expr::Num(0.0)
            } else {
                Expr::bin(op, a, b)
            }
        }
        BinOp::Pow => {
            if is_num(&b, 1.0) {
                a
            } else if is_num(&b, 0.0) {
                Expr::Num(1.0)
            } else {
                Expr::bin(op, a, b)
            }
        }
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    combine(BinOp::Add, a, b)
}
fn sub(a: Expr, b: Expr) -> Expr {
    combine(BinOp::Sub, a, b)
}
fn mul(a: Expr, b: Expr) -> Expr {
    combine(BinOp::Mul, a, b)
}
fn div(a: Expr, b: Expr) -> Expr {
    combine(BinOp::Div, a, b)
}

/// `base^n` for integer `n`, written as a product for small positive `n`.
fn int_power(base: &Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Num(1.0),
        1 => base.clone(),
        2..=4 => {
            let mut acc = base.clone();
            for _ in 1..n {
                acc = mul(acc, base.clone());
            }
            acc
        }
        _ => combine(BinOp::Pow, base.clone(), Expr::Num(n as f64)),
    }
}

pub(super) fn derivative(e: &Expr, var: &str) -> Expr {
    match e {
        Expr::Num(_) => Expr::Num(0.0),
        Expr::Var(v) => Expr::Num(if v.name == var { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(derivative(a, var)),
        Expr::Call(f, a) => {
            let da = derivative(a, var);
            if is_num(&da, 0.0) {
                return Expr::Num(0.0);
            }
            let outer = match f {
                Func::Exp => call(Func::Exp, (**a).clone()),
                Func::Ln => div(Expr::Num(1.0), (**a).clone()),
                Func::Sin => call(Func::Cos, (**a).clone()),
                Func::Cos => neg(call(Func::Sin, (**a).clone())),
            };
            mul(outer, da)
        }
        Expr::Bin(op, a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, (**b).clone()), mul((**a).clone(), db)),
                BinOp::Div => {
                    let num = sub(mul(da, (**b).clone()), mul((**a).clone(), db));
                    div(num, int_power(b, 2))
                }
                BinOp::Pow => power_rule(a, b, da, var),
            }
        }
    }
}

fn power_rule(base: &Expr, exponent: &Expr, dbase: Expr, var: &str) -> Expr {
    if !exponent.depends_on(var) {
        // fold constant exponents such as Neg(Num) first
        let folded = exponent.substitute(&|_| None);
        if let Expr::Num(c) = folded {
            if is_num(&dbase, 0.0) {
                return Expr::Num(0.0);
            }
            let lowered = match integral_exponent(c) {
                Some(n) => int_power(base, n - 1),
                None => combine(BinOp::Pow, base.clone(), Expr::Num(c - 1.0)),
            };
            return mul(mul(Expr::Num(c), lowered), dbase);
        }
        // symbolic exponent free of `var`: c * u^(c-1) * u'
        let lowered = combine(
            BinOp::Pow,
            base.clone(),
            sub(folded.clone(), Expr::Num(1.0)),
        );
        return mul(mul(folded, lowered), dbase);
    }
    // general case: u^v * (v' ln u + v u' / u)
    let dexp = derivative(exponent, var);
    let whole = combine(BinOp::Pow, base.clone(), exponent.clone());
    let inner = add(
        mul(dexp, call(Func::Ln, base.clone())),
        div(mul(exponent.clone(), dbase), base.clone()),
    );
    mul(whole, inner)
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;
    use std::collections::HashMap;

    fn central_difference(src: &str, syms: &[&str], var: usize, at: &[f64]) -> f64 {
        let e = parse(src, syms).unwrap();
        let h = 1e-6;
        let mut hi = at.to_vec();
        let mut lo = at.to_vec();
        hi[var] += h;
        lo[var] -= h;
        (e.eval_slots(&hi).unwrap() - e.eval_slots(&lo).unwrap()) / (2.0 * h)
    }

    #[test]
    fn power_rule_prints_simplified() {
        let e = parse("x^2", &["x"]).unwrap();
        assert_eq!(e.differentiate("x").to_string(), "2*x");
    }

    #[test]
    fn linear_term_derivative_is_one() {
        let e = parse("-a*x + y", &["a", "x", "y"]).unwrap();
        assert_eq!(e.differentiate("y").to_string(), "1");
    }

    #[test]
    fn sigmoid_derivative_matches_finite_difference() {
        // oracle: central difference, frozen value 2x/(1+x^2)^2 at x=2 is 0.16
        let fd = central_difference("x^2/(1+x^2)", &["x"], 0, &[2.0]);
        assert!((fd - 0.16).abs() < 1e-8);
        let d = parse("x^2/(1+x^2)", &["x"]).unwrap().differentiate("x");
        let mut b = HashMap::new();
        b.insert("x".to_string(), 2.0);
        let v = d.eval(&b).unwrap();
        assert!((v - fd).abs() < 1e-8, "{v} vs {fd}");
    }

    #[test]
    fn transcendental_and_general_power() {
        let cases = [
            ("exp(-x)*sin(y*x)", 0usize, [0.7, 1.3]),
            ("ln(1+x^2)*cos(y)", 0, [0.4, -0.2]),
            ("x^y", 1, [1.7, 0.6]),
            ("x^y", 0, [1.7, 0.6]),
            ("x^0.5 + 3/x^-2", 0, [2.5, 0.0]),
            ("(x+y)^3/(1-y)", 1, [0.3, 0.2]),
        ];
        for (src, var, at) in cases {
            let e = parse(src, &["x", "y"]).unwrap();
            let name = ["x", "y"][var];
            let d = e.differentiate(name).eval_slots(&at).unwrap();
            let fd = central_difference(src, &["x", "y"], var, &at);
            assert!(
                (d - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                "{src}: {d} vs {fd}"
            );
        }
    }

    #[test]
    fn integer_power_of_negative_base_differentiates_cleanly() {
        let e = parse("x^3", &["x"]).unwrap();
        let d = e.differentiate("x");
        assert_eq!(d.eval_slots(&[-2.0]).unwrap(), 12.0);
    }
}
