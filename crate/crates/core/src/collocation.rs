//! Newton's method on the discrete fixed-point equations `u - T(u) = 0`.
//!
//! The discretization is the one Picard iteration uses, so comparing the
//! two solvers isolates the iteration scheme. The Jacobian is built by
//! forward differences; moving one grid value only changes the interpolant
//! on four neighbouring intervals, so each column re-evaluates `f` and `g`
//! at the quadrature points there and nowhere else.

use nalgebra::{DMatrix, DVector};

use crate::bvp::picard::picard_steps;
use crate::bvp::{BvpProblem, Discretization, GridFunction, SolutionPair, SolverOptions};
use crate::error::NonConvergence;
use crate::{Error, Result};

const JACOBIAN_STEP: f64 = 1e-7;
const MAX_HALVINGS: usize = 30;
const FALLBACK_PICARD_STEPS: usize = 50;

/// Solves with damped Newton from zero. `options.max_iter` bounds the
/// number of Newton steps; convergence means `|u - T(u)|_inf <= options.tol`.
pub fn collocation_solve(problem: &BvpProblem, options: &SolverOptions) -> Result<SolutionPair> {
    options.validate()?;
    let disc = Discretization::new(problem, options.grid_n, options.quad_n)?;
    let zero = GridFunction::zeros(options.grid_n)?;
    newton_from(&disc, zero.clone(), zero, options.tol, options.max_iter)
}

struct State {
    x: GridFunction,
    y: GridFunction,
    residual: DVector<f64>,
    norm: f64,
}

impl State {
    fn new(disc: &Discretization, x: GridFunction, y: GridFunction) -> Result<Self> {
        let out = disc.evaluate(&x, &y)?;
        let residual = DVector::from_iterator(
            2 * x.values().len(),
            x.values()
                .iter()
                .zip(&out.x.nodes)
                .chain(y.values().iter().zip(&out.y.nodes))
                .map(|(u, t)| u - t),
        );
        let norm = residual.amax();
        Ok(State { x, y, residual, norm })
    }

    fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(
            2 * self.x.values().len(),
            self.x.values().iter().chain(self.y.values()).copied(),
        )
    }
}

fn newton_from(
    disc: &Discretization,
    x: GridFunction,
    y: GridFunction,
    tol: f64,
    max_newton: usize,
) -> Result<SolutionPair> {
    let nodes = x.values().len();
    let mut state = State::new(disc, x, y)?;
    let mut history = vec![state.norm];
    let mut used_fallback = false;
    let mut steps = 0;
    while state.norm > tol && steps < max_newton {
        steps += 1;
        let jacobian = jacobian(disc, &state.x, &state.y)?;
        let direction = jacobian.lu().solve(&(-&state.residual));
        let improved = match direction {
            Some(dir) => line_search(disc, &state, &dir, nodes)?,
            None => None,
        };
        state = match improved {
            Some(next) => next,
            None if !used_fallback => {
                used_fallback = true;
                let run = picard_steps(disc, state.x, state.y, tol, FALLBACK_PICARD_STEPS)?;
                State::new(disc, run.x, run.y)?
            }
            None => break,
        };
        history.push(state.norm);
    }
    if !(state.norm <= tol) {
        return Err(Error::NonConvergence(Box::new(NonConvergence {
            solver: "newton",
            iterations: steps,
            tol,
            x: state.x.values().to_vec(),
            y: state.y.values().to_vec(),
            history,
        })));
    }
    let fixed_point_residual = state.residual.rows(0, nodes).amax() + state.residual.rows(nodes, nodes).amax();
    Ok(SolutionPair {
        iterations: steps.max(1),
        final_increment: state.norm,
        history,
        fixed_point_residual,
        x: state.x,
        y: state.y,
    })
}

/// Halves the step until the residual norm decreases.
fn line_search(
    disc: &Discretization,
    state: &State,
    direction: &DVector<f64>,
    nodes: usize,
) -> Result<Option<State>> {
    let base = state.stacked();
    let mut step = 1.0;
    for _ in 0..=MAX_HALVINGS {
        let trial = &base + direction * step;
        let x = GridFunction::new(trial.rows(0, nodes).iter().copied().collect());
        let y = GridFunction::new(trial.rows(nodes, nodes).iter().copied().collect());
        if let (Ok(x), Ok(y)) = (x, y) {
            match State::new(disc, x, y) {
                Ok(next) if next.norm < state.norm => return Ok(Some(next)),
                Ok(_) | Err(Error::Eval(_)) => {}
                Err(e) => return Err(e),
            }
        }
        step *= 0.5;
    }
    Ok(None)
}

/// `d(u - T(u))/du` by forward differences with step `1e-7 (1 + |u_i|)`.
fn jacobian(disc: &Discretization, x: &GridFunction, y: &GridFunction) -> Result<DMatrix<f64>> {
    let nodes = x.values().len();
    let base = disc.evaluate(x, y)?;
    let mut jac = DMatrix::<f64>::identity(2 * nodes, 2 * nodes);
    for col in 0..2 * nodes {
        let in_y = col >= nodes;
        let j = col % nodes;
        let u = if in_y { y.values()[j] } else { x.values()[j] };
        let h = JACOBIAN_STEP * (1.0 + u.abs());
        let (dx, dy) = disc.perturbation(&base, x, y, in_y, j, u + h)?;
        for (row, d) in dx.iter().chain(&dy).enumerate() {
            jac[(row, col)] -= d / h;
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub sup_x: f64,
    pub sup_y: f64,
    /// Trapezoidal discrete L2 norms of the differences.
    pub l2_x: f64,
    pub l2_y: f64,
    pub tol: f64,
}

impl DiffReport {
    pub fn sup(&self) -> f64 {
        self.sup_x.max(self.sup_y)
    }

    pub fn passed(&self) -> bool {
        self.sup() <= self.tol
    }
}

/// Node-wise comparison of two solutions on the same grid.
pub fn cross_validate(a: &SolutionPair, b: &SolutionPair, tol: f64) -> Result<DiffReport> {
    a.x.check_same_grid(&b.x)?;
    a.y.check_same_grid(&b.y)?;
    let l2 = |p: &GridFunction, q: &GridFunction| {
        let n = p.intervals();
        let h = 1.0 / n as f64;
        let sum: f64 = p
            .values()
            .iter()
            .zip(q.values())
            .enumerate()
            .map(|(i, (u, v))| {
                let w = if i == 0 || i == n { 0.5 * h } else { h };
                w * (u - v) * (u - v)
            })
            .sum();
        sum.sqrt()
    };
    Ok(DiffReport {
        sup_x: a.x.sup_distance(&b.x)?,
        sup_y: a.y.sup_distance(&b.y)?,
        l2_x: l2(&a.x, &b.x),
        l2_y: l2(&a.y, &b.y),
        tol,
    })
}
