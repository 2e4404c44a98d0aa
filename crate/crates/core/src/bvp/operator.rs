use super::grid::{check_intervals, node, update_slopes_near, GridFunction, HermiteBasis};
use super::{delta, BvpProblem};
use crate::calculus::{FracOrder, Integrand};
use crate::expr::{eval_expr, Expr};
use crate::gamma::gamma;
use crate::psi::PsiSpec;
use crate::quadrature::KernelRule;
use crate::Result;

/// Quadrature data for one component of `T`: one graded rule from `0` to
/// every grid node, plus one from `0` to the interior boundary point.
///
/// Points are stored row by row (row `i < N+1` is node `i`, row `N+1` the
/// boundary point) so each row integral is a contiguous, ordered sum.
#[derive(Debug, Clone)]
pub(crate) struct SideRules {
    pub multiplier: f64,
    pub delta: f64,
    pub weight_at_point: f64,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: Vec<usize>,
    pub basis: Vec<HermiteBasis>,
    pub row_start: Vec<usize>,
    pub row_of: Vec<usize>,
    pub by_interval: Vec<Vec<usize>>,
}

/// `T` applied to something: values at the grid nodes and at the interior
/// boundary point.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SideOutput {
    pub nodes: Vec<f64>,
    pub at_point: f64,
}

impl SideRules {
    pub fn new(
        psi: &PsiSpec,
        order: FracOrder,
        multiplier: f64,
        point: f64,
        intervals: usize,
        quad_n: usize,
    ) -> Result<Self> {
        check_intervals(intervals)?;
        let delta = delta(psi, multiplier, point)?;
        let psi0 = psi.eval(0.0)?;
        let scale = 1.0 / gamma(order.alpha());
        let p = order.alpha() - 1.0;
        let mut rules = SideRules {
            multiplier,
            delta,
            weight_at_point: psi.eval(point)? - psi0,
            points: Vec::new(),
            weights: Vec::new(),
            interval: Vec::new(),
            basis: Vec::new(),
            row_start: vec![0],
            row_of: Vec::new(),
            by_interval: vec![Vec::new(); intervals],
        };
        let ends = (0..=intervals).map(|i| node(i, intervals)).chain([point]);
        for (row, end) in ends.enumerate() {
            let rule = KernelRule::new(psi, 0.0, end, p, quad_n)?;
            for (&s, &w) in rule.points.iter().zip(&rule.weights) {
                let (k, basis) = HermiteBasis::locate(s, intervals);
                rules.by_interval[k].push(rules.points.len());
                rules.points.push(s);
                rules.weights.push(scale * w);
                rules.interval.push(k);
                rules.basis.push(basis);
                rules.row_of.push(row);
            }
            rules.row_start.push(rules.points.len());
        }
        Ok(rules)
    }

    pub fn rows(&self) -> usize {
        self.row_start.len() - 1
    }

    /// Fractional integral of the sampled integrand for every row.
    pub fn row_integrals(&self, samples: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|r| {
                let range = self.row_start[r]..self.row_start[r + 1];
                self.weights[range.clone()]
                    .iter()
                    .zip(&samples[range])
                    .fold(0.0, |acc, (w, v)| acc + w * v)
            })
            .collect()
    }

    /// `I(t) + (I(1) - m I(point)) / Δ * w(t)` from the row integrals.
    pub fn finish(&self, rows: &[f64], node_weights: &[f64]) -> SideOutput {
        let n = node_weights.len() - 1;
        let at_one = rows[n];
        let at_point = rows[n + 1];
        let bracket = (at_one - self.multiplier * at_point) / self.delta;
        let nodes = node_weights
            .iter()
            .zip(rows)
            .map(|(w, i)| i + bracket * w)
            .collect();
        SideOutput {
            nodes,
            at_point: at_point + bracket * self.weight_at_point,
        }
    }

    /// Samples `rhs(s, x(s), y(s))` at every quadrature point.
    pub fn sample(&self, rhs: &Expr, x: &GridFunction, y: &GridFunction) -> Result<Vec<f64>> {
        let (xv, xm, yv, ym) = (x.values(), x.slopes(), y.values(), y.slopes());
        (0..self.points.len())
            .map(|p| {
                let (k, b) = (self.interval[p], &self.basis[p]);
                eval_expr(rhs, self.points[p], b.combine(xv, xm, k), b.combine(yv, ym, k))
            })
            .collect()
    }
}

/// Everything needed to apply the discrete operator `T` repeatedly.
#[derive(Debug, Clone)]
pub struct Discretization {
    intervals: usize,
    quad_n: usize,
    f: Expr,
    g: Expr,
    node_weights: Vec<f64>,
    pub(crate) x_side: SideRules,
    pub(crate) y_side: SideRules,
}

/// Result of one application of `T` with the samples it was built from.
#[derive(Debug, Clone)]
pub(crate) struct Application {
    pub f_samples: Vec<f64>,
    pub g_samples: Vec<f64>,
    pub x: SideOutput,
    pub y: SideOutput,
}

impl Discretization {
    pub fn new(problem: &BvpProblem, intervals: usize, quad_n: usize) -> Result<Self> {
        problem.validate()?;
        let psi = &problem.psi;
        let psi0 = psi.eval(0.0)?;
        let node_weights = (0..=intervals)
            .map(|i| Ok(psi.eval(node(i, intervals))? - psi0))
            .collect::<Result<Vec<f64>>>()?;
        let x_side = SideRules::new(psi, problem.alpha, problem.lambda, problem.eta, intervals, quad_n)?;
        let y_side = SideRules::new(psi, problem.beta, problem.mu, problem.xi, intervals, quad_n)?;
        Ok(Discretization {
            intervals,
            quad_n,
            f: problem.f.clone(),
            g: problem.g.clone(),
            node_weights,
            x_side,
            y_side,
        })
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn quad_n(&self) -> usize {
        self.quad_n
    }

    /// `psi(t_i) - psi(0)` at the grid nodes.
    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub(crate) fn evaluate(&self, x: &GridFunction, y: &GridFunction) -> Result<Application> {
        x.check_same_grid(y)?;
        if x.intervals() != self.intervals {
            return Err(crate::Error::input(format!(
                "grid has {} intervals, discretization {}",
                x.intervals(),
                self.intervals
            )));
        }
        let f_samples = self.x_side.sample(&self.f, x, y)?;
        let g_samples = self.y_side.sample(&self.g, x, y)?;
        let x_out = self.x_side.finish(&self.x_side.row_integrals(&f_samples), &self.node_weights);
        let y_out = self.y_side.finish(&self.y_side.row_integrals(&g_samples), &self.node_weights);
        Ok(Application {
            f_samples,
            g_samples,
            x: x_out,
            y: y_out,
        })
    }

    /// `(T1(x, y), T2(x, y))` at the grid nodes.
    pub fn apply(&self, x: &GridFunction, y: &GridFunction) -> Result<(GridFunction, GridFunction)> {
        let out = self.evaluate(x, y)?;
        Ok((GridFunction::new(out.x.nodes)?, GridFunction::new(out.y.nodes)?))
    }

    /// `T1(x, y)(eta)` and `T2(x, y)(xi)` by the same quadrature, without
    /// interpolation.
    pub fn apply_at_boundary_points(&self, x: &GridFunction, y: &GridFunction) -> Result<(f64, f64)> {
        let out = self.evaluate(x, y)?;
        Ok((out.x.at_point, out.y.at_point))
    }

    /// Change in `T` at the nodes when node `j` of `x` (or of `y`, if
    /// `in_y`) moves to `value`. Only quadrature points in the intervals
    /// whose interpolant depends on that node are re-evaluated.
    pub(crate) fn perturbation(
        &self,
        base: &Application,
        x: &GridFunction,
        y: &GridFunction,
        in_y: bool,
        j: usize,
        value: f64,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let target = if in_y { y } else { x };
        let mut values = target.values().to_vec();
        let mut slopes = target.slopes().to_vec();
        values[j] = value;
        update_slopes_near(&values, &mut slopes, j);
        let (xv, xm, yv, ym) = if in_y {
            (x.values(), x.slopes(), &values[..], &slopes[..])
        } else {
            (&values[..], &slopes[..], y.values(), y.slopes())
        };
        let first = j.saturating_sub(2);
        let last = (j + 1).min(self.intervals - 1);
        let delta_side = |side: &SideRules, rhs: &Expr, samples: &[f64]| -> Result<Vec<f64>> {
            let mut rows = vec![0.0; side.rows()];
            for k in first..=last {
                for &p in &side.by_interval[k] {
                    let b = &side.basis[p];
                    let v = eval_expr(rhs, side.points[p], b.combine(xv, xm, k), b.combine(yv, ym, k))?;
                    rows[side.row_of[p]] += side.weights[p] * (v - samples[p]);
                }
            }
            Ok(side.finish(&rows, &self.node_weights).nodes)
        };
        Ok((
            delta_side(&self.x_side, &self.f, &base.f_samples)?,
            delta_side(&self.y_side, &self.g, &base.g_samples)?,
        ))
    }
}

/// One application of `T` on a fresh discretization matching the grid of `x`.
pub fn apply_t(
    problem: &BvpProblem,
    x: &GridFunction,
    y: &GridFunction,
    quad_n: usize,
) -> Result<(GridFunction, GridFunction)> {
    Discretization::new(problem, x.intervals(), quad_n)?.apply(x, y)
}

/// Grid solution of `ᶜD^alpha x = h`, `x(0) = 0`, `x(1) = lambda x(eta)`,
/// through the same quadrature as `T`.
pub fn solve_linear_bvp<S>(
    h: &S,
    psi: &PsiSpec,
    order: FracOrder,
    lambda: f64,
    eta: f64,
    intervals: usize,
    quad_n: usize,
) -> Result<GridFunction>
where
    S: Integrand + ?Sized,
{
    let side = SideRules::new(psi, order, lambda, eta, intervals, quad_n)?;
    let psi0 = psi.eval(0.0)?;
    let node_weights = (0..=intervals)
        .map(|i| Ok(psi.eval(node(i, intervals))? - psi0))
        .collect::<Result<Vec<f64>>>()?;
    let samples = side.points.iter().map(|&s| h.value(s)).collect::<Result<Vec<f64>>>()?;
    let out = side.finish(&side.row_integrals(&samples), &node_weights);
    GridFunction::new(out.nodes)
}
