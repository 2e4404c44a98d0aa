//! The coupled boundary value problem
//!
//! ```text
//! ᶜD^alpha x(t) = f(t, x(t), y(t)),   x(0) = 0,  x(1) = lambda x(eta)
//! ᶜD^beta  y(t) = g(t, x(t), y(t)),   y(0) = 0,  y(1) = mu y(xi)
//! ```
//!
//! on `[0, 1]`, with Caputo derivatives taken with respect to `psi`.
//! Solutions are fixed points of the integral operator `T = (T1, T2)`.

mod conditions;
mod grid;
mod operator;
pub(crate) mod picard;
mod residual;


pub use conditions::{
    condition_report, estimate_constants, ConditionReport, ConstantSet, Omega0Convention,
    Provenance, DEFAULT_BOX_RADIUS, DEFAULT_SAMPLE_GRID,
};
pub use grid::{check_intervals, nodes, GridFunction, DEFAULT_INTERVALS, MIN_INTERVALS};
pub use operator::{apply_t, solve_linear_bvp, Discretization};
pub use picard::{picard_solve, SolutionPair, SolverOptions};
pub use residual::{residual_report, OdeResidual, ResidualReport};


use crate::calculus::FracOrder;
use crate::expr::Expr;
use crate::psi::PsiSpec;
use crate::{Error, Result};

/// Relative threshold below which `Δ` counts as zero.
const DELTA_SCALE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BvpProblem {
    pub alpha: FracOrder,
    pub beta: FracOrder,
    pub eta: f64,
    pub xi: f64,
    pub lambda: f64,
    pub mu: f64,
    pub f: Expr,
    pub g: Expr,
    pub psi: PsiSpec,
}

impl BvpProblem {
    /// Checks the parameter ranges (not the non-degeneracy of `Δ`).
    pub fn validate(&self) -> Result<()> {
        let in_order_range = |o: &FracOrder| o.alpha() > 1.0 && o.alpha() < 2.0;
        if !in_order_range(&self.alpha) {
            return Err(Error::Validation(format!(
                "alpha must lie in (1,2), got {}",
                self.alpha.alpha()
            )));
        }
        if !in_order_range(&self.beta) {
            return Err(Error::Validation(format!(
                "beta must lie in (1,2), got {}",
                self.beta.alpha()
            )));
        }
        for (name, v) in [("eta", self.eta), ("xi", self.xi)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Validation(format!("{name} must lie in (0,1), got {v}")));
            }
        }
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        if self.psi.domain() != (0.0, 1.0) {
            return Err(Error::Validation("psi must be defined on [0,1]".into()));
        }
        Ok(())
    }

    /// `psi(1) - psi(0)`.
    pub fn psi_span(&self) -> Result<f64> {
        Ok(self.psi.eval(1.0)? - self.psi.eval(0.0)?)
    }
}

/// `Δ1 = lambda (psi(eta) - psi(0)) - (psi(1) - psi(0))` and its `(mu, xi)`
/// analogue, rejecting values below `1e-12 (psi(1) - psi(0))` in magnitude.
pub fn compute_deltas(problem: &BvpProblem) -> Result<(f64, f64)> {
    problem.validate()?;
    let d1 = delta(&problem.psi, problem.lambda, problem.eta)?;
    let d2 = delta(&problem.psi, problem.mu, problem.xi)?;
    Ok((d1, d2))
}

pub(crate) fn delta(psi: &PsiSpec, multiplier: f64, point: f64) -> Result<f64> {
    let base = psi.eval(0.0)?;
    let span = psi.eval(1.0)? - base;
    let d = multiplier * (psi.eval(point)? - base) - span;
    if d.abs() < DELTA_SCALE_TOL * span {
        return Err(Error::Singular(format!(
            "boundary condition is degenerate: delta = {d:e} for multiplier {multiplier} at {point}"
        )));
    }
    Ok(d)
}
