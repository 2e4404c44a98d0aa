use super::grid::{GridFunction, DEFAULT_INTERVALS};
use super::operator::Discretization;
use super::BvpProblem;
use crate::error::NonConvergence;
use crate::quadrature::DEFAULT_NODES;
use crate::{Error, Result};

/// Increments below this are ignored when estimating the contraction ratio.
const RATIO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub grid_n: usize,
    pub quad_n: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_n: DEFAULT_INTERVALS,
            quad_n: DEFAULT_NODES,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::input(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::input("max_iter must be at least 1"));
        }
        super::check_intervals(self.grid_n)
    }
}

/// A grid solution with the history of the iteration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    pub x: GridFunction,
    pub y: GridFunction,
    pub iterations: usize,
    /// Last increment (Picard) or residual norm (Newton).
    pub final_increment: f64,
    /// One entry per iteration, in the same norm as `final_increment`.
    pub history: Vec<f64>,
    /// `|x - T1(x,y)| + |y - T2(x,y)|` at the returned pair, in the discrete sup-norm.
    pub fixed_point_residual: f64,
}

impl SolutionPair {
    /// Largest ratio of consecutive increments, ignoring increments at the
    /// level of rounding noise. `None` with fewer than two usable entries.
    pub fn contraction_estimate(&self) -> Option<f64> {
        self.history
            .windows(2)
            .filter(|w| w[0] > RATIO_FLOOR)
            .map(|w| w[1] / w[0])
            .reduce(f64::max)
    }

    /// `|x| + |y|` in the discrete sup-norm.
    pub fn norm(&self) -> f64 {
        self.x.sup_norm() + self.y.sup_norm()
    }
}

/// Picard iteration `(x, y) <- T(x, y)` from `(0, 0)` until
/// `|Δx| + |Δy| <= tol`.
pub fn picard_solve(problem: &BvpProblem, options: &SolverOptions) -> Result<SolutionPair> {
    options.validate()?;
    let disc = Discretization::new(problem, options.grid_n, options.quad_n)?;
    let zero = GridFunction::zeros(options.grid_n)?;
    picard_from(&disc, zero.clone(), zero, options.tol, options.max_iter)
}

pub(crate) fn picard_from(
    disc: &Discretization,
    x: GridFunction,
    y: GridFunction,
    tol: f64,
    max_iter: usize,
) -> Result<SolutionPair> {
    let run = picard_steps(disc, x, y, tol, max_iter)?;
    if !run.converged {
        return Err(Error::NonConvergence(Box::new(NonConvergence {
            solver: "picard",
            iterations: run.history.len(),
            tol,
            x: run.x.values().to_vec(),
            y: run.y.values().to_vec(),
            history: run.history,
        })));
    }
    let (tx, ty) = disc.apply(&run.x, &run.y)?;
    let fixed_point_residual = tx.sup_distance(&run.x)? + ty.sup_distance(&run.y)?;
    Ok(SolutionPair {
        iterations: run.history.len(),
        final_increment: run.history.last().copied().unwrap_or(0.0),
        x: run.x,
        y: run.y,
        history: run.history,
        fixed_point_residual,
    })
}

pub(crate) struct PicardRun {
    pub x: GridFunction,
    pub y: GridFunction,
    pub history: Vec<f64>,
    pub converged: bool,
}

/// At most `max_iter` Picard steps, stopping early once an increment is
/// within `tol`.
pub(crate) fn picard_steps(
    disc: &Discretization,
    mut x: GridFunction,
    mut y: GridFunction,
    tol: f64,
    max_iter: usize,
) -> Result<PicardRun> {
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let (nx, ny) = match disc.apply(&x, &y) {
            Ok(next) => next,
            // Non-finite iterates: report what we had.
            Err(Error::Input(_)) if !history.is_empty() => break,
            Err(e) => return Err(e),
        };
        let inc = nx.sup_distance(&x)? + ny.sup_distance(&y)?;
        history.push(inc);
        x = nx;
        y = ny;
        if inc <= tol {
            converged = true;
            break;
        }
    }
    Ok(PicardRun {
        x,
        y,
        history,
        converged,
    })
}
