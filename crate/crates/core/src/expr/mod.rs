//! Scalar expression language for right-hand sides `f(t,x,y)`, `g(t,x,y)`
//! and weight functions `psi(t)`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := unary ('^' factor)?
//! unary   := '-'? primary
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and a leading minus binds tighter than `^`, so
//! `-x^2` is `(-x)^2`. Variables are `t`, `x`, `y`; named constants are `pi`
//! and `e`; functions are `sin cos tan exp ln sqrt abs atan`. There is no
//! implicit multiplication.

mod diff;
mod eval;
mod lexer;
mod parser;

use std::fmt;

pub use diff::diff_expr;
pub use eval::eval_expr;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
    Y,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }

    fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
            NamedConst::E => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Atan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "atan" => Func::Atan,
            _ => return None,
        })
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Non-negative literal. Negative values are represented as `Neg(Const)`.
    Const(f64),
    Named(NamedConst),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    /// Canonical constant node; negative values become `Neg(Const(|c|))`.
    pub fn constant(c: f64) -> Self {
        if c < 0.0 {
            Expr::Neg(Box::new(Expr::Const(-c)))
        } else {
            Expr::Const(c)
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Self {
        Expr::Call(func, Box::new(arg))
    }

    /// Literal value of a `Const` or `Neg(Const)` node.
    pub fn as_literal(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Neg(inner) => match inner.as_ref() {
                Expr::Const(c) => Some(-c),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) | Expr::Named(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(v),
            Expr::Binary(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    pub fn is_constant(&self) -> bool {
        !(self.depends_on(Var::T) || self.depends_on(Var::X) || self.depends_on(Var::Y))
    }

    pub fn contains_func(&self, func: Func) -> bool {
        match self {
            Expr::Const(_) | Expr::Named(_) | Expr::Var(_) => false,
            Expr::Neg(a) => a.contains_func(func),
            Expr::Call(g, a) => *g == func || a.contains_func(func),
            Expr::Binary(_, a, b) => a.contains_func(func) || b.contains_func(func),
        }
    }

    /// Evaluates an expression that references no variables.
    pub fn eval_constant(&self) -> crate::Result<f64> {
        if !self.is_constant() {
            return Err(crate::Error::input(format!(
                "expected a constant expression, found `{self}`"
            )));
        }
        eval_expr(self, 0.0, 0.0, 0.0)
    }

    /// Evaluates with `x = y = 0`.
    pub fn eval_t(&self, t: f64) -> crate::Result<f64> {
        eval_expr(self, t, 0.0, 0.0)
    }
}

// Binding strength used by the printer; mirrors the grammar levels.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Binary(BinOp::Pow, ..) => 3,
        Expr::Neg(_) => 4,
        _ => 5,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Named(n) => f.write_str(n.name()),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_wrapped(f, a, level(a) < 5)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(op, a, b) => {
                let (wrap_l, wrap_r) = match op {
                    BinOp::Add | BinOp::Sub => (false, level(b) <= 1),
                    BinOp::Mul | BinOp::Div => (level(a) < 2, level(b) <= 2),
                    BinOp::Pow => (level(a) <= 3, level(b) < 3),
                };
                write_wrapped(f, a, wrap_l)?;
                write!(f, "{}", op.symbol())?;
                write_wrapped(f, b, wrap_r)
            }
        }
    }
}
