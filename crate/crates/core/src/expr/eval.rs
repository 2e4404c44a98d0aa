use super::{BinOp, Expr, Func, Var};
use crate::error::{Error, Result};

/// Evaluates `ast` at `(t, x, y)`. Never returns NaN or an infinity: domain
/// violations and overflow surface as [`Error::Eval`].
pub fn eval_expr(ast: &Expr, t: f64, x: f64, y: f64) -> Result<f64> {
    let v = eval_node(ast, t, x, y)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::eval(format!("non-finite result {v} evaluating `{ast}`")))
    }
}

fn eval_node(e: &Expr, t: f64, x: f64, y: f64) -> Result<f64> {
    let v = match e {
        Expr::Const(c) => *c,
        Expr::Named(n) => n.value(),
        Expr::Var(Var::T) => t,
        Expr::Var(Var::X) => x,
        Expr::Var(Var::Y) => y,
        Expr::Neg(a) => -eval_node(a, t, x, y)?,
        Expr::Binary(op, a, b) => {
            let l = eval_node(a, t, x, y)?;
            let r = eval_node(b, t, x, y)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(Error::eval("division by zero"));
                    }
                    l / r
                }
                BinOp::Pow => pow(l, r)?,
            }
        }
        Expr::Call(func, a) => {
            let u = eval_node(a, t, x, y)?;
            match func {
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Tan => u.tan(),
                Func::Exp => u.exp(),
                Func::Ln => {
                    if u <= 0.0 {
                        return Err(Error::eval(format!("ln of non-positive value {u}")));
                    }
                    u.ln()
                }
                Func::Sqrt => {
                    if u < 0.0 {
                        return Err(Error::eval(format!("sqrt of negative value {u}")));
                    }
                    u.sqrt()
                }
                Func::Abs => u.abs(),
                Func::Atan => u.atan(),
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::eval(format!("overflow evaluating `{e}`")))
    }
}

fn pow(base: f64, exponent: f64) -> Result<f64> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(Error::eval(format!(
            "negative base {base} with non-integer exponent {exponent}"
        )));
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(Error::eval("division by zero (0 to a negative power)"));
    }
    if exponent == 2.0 {
        return Ok(base * base);
    }
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        return Ok(base.powi(exponent as i32));
    }
    Ok(base.powf(exponent))
}
