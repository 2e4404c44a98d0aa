use super::{BinOp, Expr, Func, Var};
use crate::error::{Error, Result};

/// Symbolic derivative of `ast` with respect to `var`.
///
/// Only literal constants are folded (`0*u`, `1*u`, `u+0`, `c1*(c2*u)`, ...);
/// no other simplification is attempted. Any `abs` node is rejected because
/// `abs` has no derivative at the origin.
pub fn diff_expr(ast: &Expr, var: Var) -> Result<Expr> {
    if ast.contains_func(Func::Abs) {
        return Err(Error::Unsupported(format!(
            "cannot differentiate `{ast}`: abs is not differentiable"
        )));
    }
    Ok(d(ast, var))
}

fn d(e: &Expr, v: Var) -> Expr {
    match e {
        Expr::Const(_) | Expr::Named(_) => zero(),
        Expr::Var(w) => {
            if *w == v {
                one()
            } else {
                zero()
            }
        }
        Expr::Neg(a) => neg(d(a, v)),
        Expr::Binary(op, a, b) => {
            let (a, b) = (a.as_ref(), b.as_ref());
            match op {
                BinOp::Add => add(d(a, v), d(b, v)),
                BinOp::Sub => sub(d(a, v), d(b, v)),
                BinOp::Mul => add(mul(d(a, v), b.clone()), mul(a.clone(), d(b, v))),
                BinOp::Div => div(
                    sub(mul(d(a, v), b.clone()), mul(a.clone(), d(b, v))),
                    pow(b.clone(), Expr::Const(2.0)),
                ),
                BinOp::Pow => {
                    if !b.depends_on(v) {
                        // b * a^(b-1) * a'
                        let reduced = sub(b.clone(), one());
                        mul(mul(b.clone(), pow(a.clone(), reduced)), d(a, v))
                    } else if !a.depends_on(v) {
                        // a^b * ln(a) * b'
                        mul(
                            mul(e.clone(), Expr::call(Func::Ln, a.clone())),
                            d(b, v),
                        )
                    } else {
                        // a^b * (b' ln a + b a'/a)
                        mul(
                            e.clone(),
                            add(
                                mul(d(b, v), Expr::call(Func::Ln, a.clone())),
                                div(mul(b.clone(), d(a, v)), a.clone()),
                            ),
                        )
                    }
                }
            }
        }
        Expr::Call(func, a) => {
            let inner = d(a, v);
            let a = a.as_ref().clone();
            let outer = match func {
                Func::Sin => Expr::call(Func::Cos, a),
                Func::Cos => neg(Expr::call(Func::Sin, a)),
                Func::Tan => div(one(), pow(Expr::call(Func::Cos, a), Expr::Const(2.0))),
                Func::Exp => Expr::call(Func::Exp, a),
                Func::Ln => div(one(), a),
                Func::Sqrt => div(one(), mul(Expr::Const(2.0), Expr::call(Func::Sqrt, a))),
                Func::Atan => div(one(), add(one(), pow(a, Expr::Const(2.0)))),
                Func::Abs => unreachable!("abs rejected before differentiation"),
            };
            mul(outer, inner)
        }
    }
}

fn zero() -> Expr {
    Expr::Const(0.0)
}

fn one() -> Expr {
    Expr::Const(1.0)
}

fn lit(e: &Expr) -> Option<f64> {
    e.as_literal()
}

fn is(e: &Expr, c: f64) -> bool {
    lit(e) == Some(c)
}

fn folded(v: f64) -> Option<Expr> {
    v.is_finite().then(|| Expr::constant(v))
}

pub(crate) fn neg(a: Expr) -> Expr {
    if let Some(c) = lit(&a) {
        return Expr::constant(-c);
    }
    match a {
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (lit(&a), lit(&b)) {
        if let Some(e) = folded(x + y) {
            return e;
        }
    }
    if is(&a, 0.0) {
        return b;
    }
    if is(&b, 0.0) {
        return a;
    }
    Expr::binary(BinOp::Add, a, b)
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (lit(&a), lit(&b)) {
        if let Some(e) = folded(x - y) {
            return e;
        }
    }
    if is(&b, 0.0) {
        return a;
    }
    if is(&a, 0.0) {
        return neg(b);
    }
    Expr::binary(BinOp::Sub, a, b)
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if is(&a, 0.0) || is(&b, 0.0) {
        return zero();
    }
    if is(&a, 1.0) {
        return b;
    }
    if is(&b, 1.0) {
        return a;
    }
    let (a, b) = match (lit(&a), lit(&b)) {
        (Some(x), Some(y)) => match folded(x * y) {
            Some(e) => return e,
            None => (a, b),
        },
        // keep literal factors on the left
        (None, Some(_)) => (b, a),
        _ => (a, b),
    };
    if let Some(x) = lit(&a) {
        if let Expr::Binary(BinOp::Mul, l, r) = &b {
            if let Some(y) = lit(l) {
                if let Some(c) = folded(x * y) {
                    return mul(c, r.as_ref().clone());
                }
            }
        }
    }
    Expr::binary(BinOp::Mul, a, b)
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if is(&b, 1.0) {
        return a;
    }
    if is(&a, 0.0) && !is(&b, 0.0) {
        return zero();
    }
    if let (Some(x), Some(y)) = (lit(&a), lit(&b)) {
        if y != 0.0 {
            if let Some(e) = folded(x / y) {
                return e;
            }
        }
    }
    Expr::binary(BinOp::Div, a, b)
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    if is(&b, 1.0) {
        return a;
    }
    if is(&b, 0.0) {
        return one();
    }
    if let (Some(x), Some(y)) = (lit(&a), lit(&b)) {
        if x >= 0.0 {
            if let Some(e) = folded(x.powf(y)) {
                return e;
            }
        }
    }
    Expr::binary(BinOp::Pow, a, b)
}

#[cfg(test)]
mod tests {
    use super::super::{eval_expr, parse};
    use super::*;

    #[test]
    fn derivative_of_weight_example() {
        let e = parse("3*t^2").unwrap();
        assert_eq!(diff_expr(&e, Var::T).unwrap(), parse("6*t").unwrap());
    }

    #[test]
    fn derivative_of_sine() {
        let e = parse("sin(t)").unwrap();
        assert_eq!(diff_expr(&e, Var::T).unwrap(), parse("cos(t)").unwrap());
    }

    #[test]
    fn abs_is_rejected() {
        let e = parse("abs(t)").unwrap();
        assert!(matches!(diff_expr(&e, Var::T), Err(Error::Unsupported(_))));
    }

    #[test]
    fn partial_derivatives() {
        let e = parse("x*y + sin(x)").unwrap();
        let dx = diff_expr(&e, Var::X).unwrap();
        let v = eval_expr(&dx, 0.0, 0.3, 2.0).unwrap();
        assert!((v - (2.0 + 0.3f64.cos())).abs() < 1e-15);
        let dt = diff_expr(&e, Var::T).unwrap();
        assert_eq!(dt, Expr::Const(0.0));
    }

    #[test]
    fn variable_exponent() {
        let e = parse("t^t").unwrap();
        let de = diff_expr(&e, Var::T).unwrap();
        let t: f64 = 0.7;
        let want = t.powf(t) * (t.ln() + 1.0);
        assert!((eval_expr(&de, t, 0.0, 0.0).unwrap() - want).abs() < 1e-14);
        let e = parse("2^t").unwrap();
        let de = diff_expr(&e, Var::T).unwrap();
        let want = 2f64.powf(t) * 2f64.ln();
        assert!((eval_expr(&de, t, 0.0, 0.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn folding_never_creates_negative_literals() {
        let e = parse("1-3*t").unwrap();
        let de = diff_expr(&e, Var::T).unwrap();
        assert_eq!(de, Expr::Neg(Box::new(Expr::Const(3.0))));
        assert_eq!(parse(&de.to_string()).unwrap(), de);
    }
}
