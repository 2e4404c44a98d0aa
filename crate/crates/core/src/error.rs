use std::fmt;

use thiserror::Error;

/// Position of a token in an expression source string (byte offset).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourcePos(pub usize);

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "offset {}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("lexical error at {pos}: {msg}")]
    Lex { pos: SourcePos, msg: String },

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: SourcePos, msg: String },

    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: SourcePos, name: String },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("quadrature did not reach rel_tol {rel_tol:e} (best value {best}, last difference {last_diff:e})")]
    QuadratureConvergence {
        best: f64,
        last_diff: f64,
        rel_tol: f64,
    },

    #[error("singular problem: {0}")]
    Singular(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{0}")]
    NonConvergence(Box<NonConvergence>),

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// State of an iterative solver that ran out of iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct NonConvergence {
    pub solver: &'static str,
    pub iterations: usize,
    pub tol: f64,
    /// Last iterate at the grid nodes.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Increment (Picard) or residual (Newton) norm per iteration.
    pub history: Vec<f64>,
}

impl fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} did not converge to {:e} in {} iterations",
            self.solver, self.tol, self.iterations
        )?;
        if let Some(last) = self.history.last() {
            write!(f, " (last norm {last:e})")?;
        }
        Ok(())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn eval(msg: impl Into<String>) -> Self {
        Error::Eval(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
