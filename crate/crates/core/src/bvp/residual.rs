use nalgebra::{DMatrix, DVector};

use super::grid::{node, GridFunction};
use super::operator::Discretization;
use super::picard::SolutionPair;
use super::BvpProblem;
use crate::calculus::FracOrder;
use crate::expr::eval_expr;
use crate::gamma::gamma;
use crate::psi::PsiSpec;
use crate::{Error, Result};

/// Targets for the differential-equation check, snapped to grid nodes.
const CHECKPOINTS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

#[derive(Debug, Clone, PartialEq)]
pub struct OdeResidual {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `|x - T1(x,y)|` and `|y - T2(x,y)|` over the grid.
    pub fixed_point_x: f64,
    pub fixed_point_y: f64,
    pub x_at_zero: f64,
    /// `|x(1) - lambda x(eta)|`.
    pub x_boundary: f64,
    pub y_at_zero: f64,
    pub y_boundary: f64,
    /// `|ᶜD^alpha x - f|` and `|ᶜD^beta y - g|` at the checkpoints.
    pub ode: Vec<OdeResidual>,
}

impl ResidualReport {
    pub fn max_fixed_point(&self) -> f64 {
        self.fixed_point_x.max(self.fixed_point_y)
    }

    pub fn max_boundary(&self) -> f64 {
        [self.x_at_zero, self.x_boundary, self.y_at_zero, self.y_boundary]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn max_ode(&self) -> f64 {
        self.ode.iter().fold(0.0, |m, r| m.max(r.x).max(r.y))
    }
}

/// A posteriori residuals of a grid solution.
///
/// Values at `eta` and `xi` are taken from the quadrature form of `T` at
/// those points rather than from the grid interpolant. The differential
/// equation is checked by fitting a not-a-knot cubic spline to the grid
/// values in the variable `u = psi(t)` and applying the Caputo derivative
/// to it exactly.
pub fn residual_report(
    problem: &BvpProblem,
    pair: &SolutionPair,
    quad_n: usize,
) -> Result<ResidualReport> {
    let (x, y) = (&pair.x, &pair.y);
    let disc = Discretization::new(problem, x.intervals(), quad_n)?;
    let out = disc.evaluate(x, y)?;
    let n = x.intervals();
    let sup_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0, |m: f64, (p, q)| m.max((p - q).abs()));

    let mut ode = Vec::with_capacity(CHECKPOINTS.len());
    let x_caputo = SplineCaputo::new(&problem.psi, x, problem.alpha)?;
    let y_caputo = SplineCaputo::new(&problem.psi, y, problem.beta)?;
    for target in CHECKPOINTS {
        let i = ((target * n as f64).round() as usize).clamp(1, n - 1);
        let t = node(i, n);
        let (xv, yv) = (x.values()[i], y.values()[i]);
        ode.push(OdeResidual {
            t,
            x: (x_caputo.at_node(i) - eval_expr(&problem.f, t, xv, yv)?).abs(),
            y: (y_caputo.at_node(i) - eval_expr(&problem.g, t, xv, yv)?).abs(),
        });
    }

    Ok(ResidualReport {
        fixed_point_x: sup_diff(x.values(), &out.x.nodes),
        fixed_point_y: sup_diff(y.values(), &out.y.nodes),
        x_at_zero: x.values()[0].abs(),
        x_boundary: (x.values()[n] - problem.lambda * out.x.at_point).abs(),
        y_at_zero: y.values()[0].abs(),
        y_boundary: (y.values()[n] - problem.mu * out.y.at_point).abs(),
        ode,
    })
}

/// Caputo derivative of order in `(1, 2)` of a cubic spline in `u`.
struct SplineCaputo {
    knots: Vec<f64>,
    second: Vec<f64>,
    exponent: f64,
    scale: f64,
}

impl SplineCaputo {
    fn new(psi: &PsiSpec, values: &GridFunction, order: FracOrder) -> Result<Self> {
        let n = values.intervals();
        let knots = (0..=n)
            .map(|i| psi.eval(node(i, n)))
            .collect::<Result<Vec<f64>>>()?;
        let second = not_a_knot_second_derivatives(&knots, values.values())?;
        let q = 2.0 - order.alpha();
        Ok(SplineCaputo {
            knots,
            second,
            exponent: q,
            scale: 1.0 / gamma(q),
        })
    }

    /// `(1/Γ(q)) ∫_{u_0}^{u_i} (u_i - u)^(q-1) X''(u) du` with `X''` piecewise linear.
    fn at_node(&self, i: usize) -> f64 {
        let q = self.exponent;
        let top = self.knots[i];
        let mut acc = 0.0;
        for k in 0..i {
            let (a, b) = (self.knots[k], self.knots[k + 1]);
            let (ra, rb) = (top - a, top - b);
            let h = b - a;
            let plain = (ra.powf(q) - rb.powf(q)) / q;
            let moment = ra * plain - (ra.powf(q + 1.0) - rb.powf(q + 1.0)) / (q + 1.0);
            let slope = (self.second[k + 1] - self.second[k]) / h;
            acc += self.second[k] * plain + slope * moment;
        }
        self.scale * acc
    }
}

fn not_a_knot_second_derivatives(knots: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let n = knots.len() - 1;
    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n).map(|k| (values[k + 1] - values[k]) / h[k]).collect();
    let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut b = DVector::<f64>::zeros(n + 1);
    // Continuous third derivative across the second and second-to-last knots.
    a[(0, 0)] = -1.0 / h[0];
    a[(0, 1)] = 1.0 / h[0] + 1.0 / h[1];
    a[(0, 2)] = -1.0 / h[1];
    a[(n, n - 2)] = -1.0 / h[n - 2];
    a[(n, n - 1)] = 1.0 / h[n - 2] + 1.0 / h[n - 1];
    a[(n, n)] = -1.0 / h[n - 1];
    for i in 1..n {
        a[(i, i - 1)] = h[i - 1];
        a[(i, i)] = 2.0 * (h[i - 1] + h[i]);
        a[(i, i + 1)] = h[i];
        b[i] = 6.0 * (slope[i] - slope[i - 1]);
    }
    a.lu()
        .solve(&b)
        .map(|m| m.iter().copied().collect())
        .ok_or_else(|| Error::numerical("spline system is singular"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::tests::problem;
    use crate::bvp::{picard_solve, SolverOptions};
    use crate::expr::parse;

    #[test]
    fn spline_caputo_exact_on_quadratics_in_u() {
        let psi = PsiSpec::parse("3*t^2").unwrap();
        let x = GridFunction::from_fn(40, |t| 9.0 * t.powi(4) - 11.25 * t * t).unwrap();
        let op = SplineCaputo::new(&psi, &x, FracOrder::new(1.5).unwrap()).unwrap();
        for i in [4, 20, 40] {
            let t = node(i, 40);
            let exact = 2.0 / gamma(1.5) * (3.0 * t * t).sqrt();
            assert!((op.at_node(i) - exact).abs() < 1e-9, "{} vs {exact}", op.at_node(i));
        }
    }

    #[test]
    fn zero_problem_has_zero_residuals() {
        let p = problem("t", 1.0, 0.5);
        let s = picard_solve(&p, &SolverOptions { grid_n: 20, quad_n: 16, ..Default::default() }).unwrap();
        let r = residual_report(&p, &s, 16).unwrap();
        assert_eq!(r.max_fixed_point(), 0.0);
        assert_eq!(r.max_boundary(), 0.0);
        assert_eq!(r.max_ode(), 0.0);
        assert_eq!(r.ode.len(), 5);
    }

    #[test]
    fn manufactured_residuals() {
        let mut p = problem("3*t^2", 1.0, 0.5);
        p.f = parse(&format!("{} * t", 2.0 / gamma(1.5) * 3f64.sqrt())).unwrap();
        let s = picard_solve(&p, &SolverOptions::default()).unwrap();
        let r = residual_report(&p, &s, 64).unwrap();
        assert!(r.max_fixed_point() <= 1e-8);
        assert!(r.max_boundary() <= 1e-8);
        assert!(r.ode.iter().all(|o| o.x <= 1e-3), "{:?}", r.ode);
    }
}
