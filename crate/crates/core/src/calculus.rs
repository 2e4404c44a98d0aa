//! Fractional integrals and derivatives taken with respect to a weight
//! function `psi`.
//!
//! All operators reduce to [`psi_weighted_integral`] after the weight
//! substitution `u = psi(s)`. The derivative operators need the sequential
//! derivatives `σ^[k] = ((1/psi') d/dt)^k σ`, supplied through [`Integrand`].

use crate::expr::{diff_expr, BinOp, Expr, Var};
use crate::gamma::{gamma, ln_gamma};
use crate::psi::PsiSpec;
use crate::quadrature::psi_weighted_integral;
use crate::{Error, Result};

/// Highest sequential derivative the finite-difference path will attempt.
pub const MAX_FD_ORDER: usize = 4;

/// Relative finite-difference step, as a fraction of the `psi` domain width.
const FD_STEP: f64 = 1e-4;

/// A fractional order `alpha > 0` together with `n`, the smallest integer
/// above it (`n = alpha` when `alpha` is itself an integer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    n: usize,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::input(format!("order must be positive and finite, got {alpha}")));
        }
        let n = if alpha.fract() == 0.0 {
            alpha as usize
        } else {
            alpha.floor() as usize + 1
        };
        Ok(FracOrder { alpha, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        self.alpha.fract() == 0.0
    }
}

pub type SeqDerivative<'a> = Box<dyn Fn(f64) -> Result<f64> + 'a>;

/// Something that can be integrated and differentiated sequentially.
///
/// The default `seq_derivative` uses nested finite differences in `t`,
/// which is adequate for `k <= 4` and smooth data. Implementors with
/// analytic derivatives should override it.
pub trait Integrand {
    fn value(&self, t: f64) -> Result<f64>;

    fn seq_derivative<'a>(&'a self, psi: &'a PsiSpec, k: usize) -> Result<SeqDerivative<'a>> {
        if k == 0 {
            return Ok(Box::new(move |t| self.value(t)));
        }
        if k > MAX_FD_ORDER {
            return Err(Error::Unsupported(format!(
                "finite-difference sequential derivative of order {k} (max {MAX_FD_ORDER})"
            )));
        }
        let (lo, hi) = psi.domain();
        let h = FD_STEP * (hi - lo);
        Ok(Box::new(move |t| {
            nested_difference(&|s| self.value(s), psi, k, t, (lo, hi), h)
        }))
    }
}

impl<F> Integrand for F
where
    F: Fn(f64) -> f64,
{
    fn value(&self, t: f64) -> Result<f64> {
        let v = self(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::eval(format!("integrand is not finite at t = {t}")))
        }
    }
}

/// Wraps a fallible closure.
pub struct Fallible<F>(pub F);

impl<F> Integrand for Fallible<F>
where
    F: Fn(f64) -> Result<f64>,
{
    fn value(&self, t: f64) -> Result<f64> {
        (self.0)(t)
    }
}

/// An integrand whose sequential derivatives are known in closed form:
/// `derivatives[k]` evaluates `σ^[k]`, with `derivatives[0] = σ`.
pub struct WithDerivatives<'f> {
    pub derivatives: Vec<Box<dyn Fn(f64) -> Result<f64> + 'f>>,
}

impl Integrand for WithDerivatives<'_> {
    fn value(&self, t: f64) -> Result<f64> {
        match self.derivatives.first() {
            Some(f) => f(t),
            None => Err(Error::input("no functions registered")),
        }
    }

    fn seq_derivative<'a>(&'a self, _psi: &'a PsiSpec, k: usize) -> Result<SeqDerivative<'a>> {
        match self.derivatives.get(k) {
            Some(f) => Ok(Box::new(move |t| f(t))),
            None => Err(Error::Unsupported(format!(
                "sequential derivative of order {k} not registered"
            ))),
        }
    }
}

impl Integrand for Expr {
    fn value(&self, t: f64) -> Result<f64> {
        reject_state_vars(self)?;
        self.eval_t(t)
    }

    fn seq_derivative<'a>(&'a self, psi: &'a PsiSpec, k: usize) -> Result<SeqDerivative<'a>> {
        reject_state_vars(self)?;
        let weight = psi.derivative_expr();
        let mut current = self.clone();
        for _ in 0..k {
            current = Expr::binary(BinOp::Div, diff_expr(&current, Var::T)?, weight.clone());
        }
        Ok(Box::new(move |t| current.eval_t(t)))
    }
}

fn reject_state_vars(e: &Expr) -> Result<()> {
    if e.depends_on(Var::X) || e.depends_on(Var::Y) {
        Err(Error::input("integrand may only depend on t"))
    } else {
        Ok(())
    }
}

/// `((1/psi') d/dt)^k f` at `t`, by nested central differences that switch
/// to one-sided three-point stencils near the ends of `bounds`.
#[derive(Debug, Clone, Copy)]
enum Stencil {
    Central,
    Forward,
    Backward,
}

/// `k` nested sequential difference quotients. One stencil direction is
/// used at every level: mixing central and one-sided quotients leaves an
/// `O(h)` error in the outer quotient.
fn nested_difference(
    f: &dyn Fn(f64) -> Result<f64>,
    psi: &PsiSpec,
    k: usize,
    t: f64,
    bounds: (f64, f64),
    h: f64,
) -> Result<f64> {
    let (lo, hi) = bounds;
    let reach = k as f64 * h;
    let stencil = if t - reach >= lo && t + reach <= hi {
        Stencil::Central
    } else if t + 2.0 * reach <= hi {
        Stencil::Forward
    } else if t - 2.0 * reach >= lo {
        Stencil::Backward
    } else {
        return Err(Error::input(format!(
            "interval [{lo}, {hi}] too short for a difference stencil"
        )));
    };
    difference_with(f, psi, k, t, stencil, h)
}

fn difference_with(
    f: &dyn Fn(f64) -> Result<f64>,
    psi: &PsiSpec,
    k: usize,
    t: f64,
    stencil: Stencil,
    h: f64,
) -> Result<f64> {
    if k == 0 {
        return f(t);
    }
    let inner = |s: f64| difference_with(f, psi, k - 1, s, stencil, h);
    let slope = match stencil {
        Stencil::Central => (inner(t + h)? - inner(t - h)?) / (2.0 * h),
        Stencil::Forward => (-3.0 * inner(t)? + 4.0 * inner(t + h)? - inner(t + 2.0 * h)?) / (2.0 * h),
        Stencil::Backward => (3.0 * inner(t)? - 4.0 * inner(t - h)? + inner(t - 2.0 * h)?) / (2.0 * h),
    };
    let d = psi.deriv_raw(t)?;
    if d == 0.0 {
        return Err(Error::numerical(format!("psi'({t}) = 0 in sequential derivative")));
    }
    Ok(slope / d)
}

fn check_limits(psi: &PsiSpec, a: f64, t: f64) -> Result<()> {
    let (lo, hi) = psi.domain();
    if !(a >= lo && a <= hi) {
        return Err(Error::input(format!("lower limit {a} outside [{lo}, {hi}]")));
    }
    if !(t >= a && t <= hi) {
        return Err(Error::input(format!("evaluation point {t} outside [{a}, {hi}]")));
    }
    Ok(())
}

/// Sequential derivative `σ^[k](t)`.
pub fn psi_seq_derivative<S>(sigma: &S, psi: &PsiSpec, k: usize, t: f64) -> Result<f64>
where
    S: Integrand + ?Sized,
{
    let (lo, hi) = psi.domain();
    if !(t >= lo && t <= hi) {
        return Err(Error::input(format!("t = {t} outside [{lo}, {hi}]")));
    }
    sigma.seq_derivative(psi, k)?(t)
}

/// Riemann–Liouville type integral `I^alpha σ(t)` with lower limit `a`.
pub fn psi_rl_integral<S>(
    sigma: &S,
    psi: &PsiSpec,
    order: FracOrder,
    a: f64,
    t: f64,
    quad_n: usize,
) -> Result<f64>
where
    S: Integrand + ?Sized,
{
    check_limits(psi, a, t)?;
    if t == a {
        return Ok(0.0);
    }
    let alpha = order.alpha();
    let raw = psi_weighted_integral(|s| sigma.value(s), psi, a, t, alpha - 1.0, quad_n)?;
    Ok(raw / gamma(alpha))
}

/// Caputo type derivative `I^(n-alpha) σ^[n](t)`; for integer `alpha` this
/// is just `σ^[n](t)`.
pub fn psi_caputo_derivative<S>(
    sigma: &S,
    psi: &PsiSpec,
    order: FracOrder,
    a: f64,
    t: f64,
    quad_n: usize,
) -> Result<f64>
where
    S: Integrand + ?Sized,
{
    check_limits(psi, a, t)?;
    let n = order.n();
    let top = sigma.seq_derivative(psi, n)?;
    if order.is_integer() {
        return top(t);
    }
    if t == a {
        return Ok(0.0);
    }
    let rest = n as f64 - order.alpha();
    let raw = psi_weighted_integral(|s| top(s), psi, a, t, rest - 1.0, quad_n)?;
    Ok(raw / gamma(rest))
}

/// Riemann–Liouville type derivative `((1/psi') d/dt)^n I^(n-alpha) σ(t)`.
/// The outer derivatives are taken by finite differences of the inner
/// integral, one-sided where `t` is near `a` or the end of the domain.
pub fn psi_rl_derivative<S>(
    sigma: &S,
    psi: &PsiSpec,
    order: FracOrder,
    a: f64,
    t: f64,
    quad_n: usize,
) -> Result<f64>
where
    S: Integrand + ?Sized,
{
    check_limits(psi, a, t)?;
    let n = order.n();
    if order.is_integer() {
        return sigma.seq_derivative(psi, n)?(t);
    }
    if n > MAX_FD_ORDER {
        return Err(Error::Unsupported(format!(
            "finite-difference derivative of order {n} (max {MAX_FD_ORDER})"
        )));
    }
    let inner_order = FracOrder::new(n as f64 - order.alpha())?;
    let (lo, hi) = psi.domain();
    let h = FD_STEP * (hi - lo);
    let inner = |s: f64| psi_rl_integral(sigma, psi, inner_order, a, s, quad_n);
    nested_difference(&inner, psi, n, t, (a, hi), h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerRuleKind {
    Integral,
    Caputo,
}

/// Closed form of the integral or Caputo derivative of
/// `w^(beta-1)`, `w = psi(t) - psi(a)`, at `t > a`.
pub fn power_rule(
    kind: PowerRuleKind,
    psi: &PsiSpec,
    a: f64,
    t: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::input(format!("beta must be positive, got {beta}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::input(format!("alpha must be non-negative, got {alpha}")));
    }
    check_limits(psi, a, t)?;
    let w = psi.eval(t)? - psi.eval(a)?;
    if !(w > 0.0) {
        return Err(Error::input(format!("power rule needs t > a (got t = {t}, a = {a})")));
    }
    if alpha == 0.0 {
        return Ok(w.powf(beta - 1.0));
    }
    match kind {
        PowerRuleKind::Integral => {
            let exponent = beta + alpha - 1.0;
            Ok((ln_gamma(beta) - ln_gamma(beta + alpha) + exponent * w.ln()).exp())
        }
        PowerRuleKind::Caputo => {
            let n = FracOrder::new(alpha)?.n();
            if beta.fract() == 0.0 && beta <= n as f64 {
                return Ok(0.0);
            }
            let shifted = beta - alpha;
            if shifted <= 0.0 {
                return Err(Error::input(format!(
                    "power rule needs beta > alpha for non-polynomial terms (beta = {beta}, alpha = {alpha})"
                )));
            }
            let exponent = shifted - 1.0;
            Ok((ln_gamma(beta) - ln_gamma(shifted) + exponent * w.ln()).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::quadrature::DEFAULT_NODES;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn frac_order_ceiling() {
        assert_eq!(order(0.5).n(), 1);
        assert_eq!(order(1.0).n(), 1);
        assert_eq!(order(1.5).n(), 2);
        assert_eq!(order(2.0).n(), 2);
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn half_integral_of_one() {
        let psi = PsiSpec::identity();
        let v = psi_rl_integral(&|_t: f64| 1.0, &psi, order(0.5), 0.0, 1.0, DEFAULT_NODES).unwrap();
        assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-10, "{v}");
        assert_eq!(psi_rl_integral(&|_t: f64| 1.0, &psi, order(0.5), 0.0, 0.0, 8).unwrap(), 0.0);
    }

    #[test]
    fn caputo_of_square_weight() {
        let psi = PsiSpec::parse("3*t^2").unwrap();
        let sigma = parse("(3*t^2)^2").unwrap();
        let v = psi_caputo_derivative(&sigma, &psi, order(1.5), 0.0, 1.0, DEFAULT_NODES).unwrap();
        let exact = power_rule(PowerRuleKind::Caputo, &psi, 0.0, 1.0, 1.5, 3.0).unwrap();
        assert!((exact - 3.9088200952233303).abs() < 1e-12, "{exact}");
        assert!((v - exact).abs() < 1e-6 * exact, "{v} vs {exact}");
    }

    #[test]
    fn caputo_annihilates_constants_rl_does_not() {
        let psi = PsiSpec::identity();
        let c = psi_caputo_derivative(&|_t: f64| 1.0, &psi, order(0.5), 0.0, 1.0, 32).unwrap();
        assert!(c.abs() < 1e-12);
        let rl = psi_rl_derivative(&|_t: f64| 1.0, &psi, order(0.5), 0.0, 1.0, DEFAULT_NODES).unwrap();
        assert!((rl - 0.5641895835477563).abs() < 1e-6, "{rl}");
    }

    #[test]
    fn sequential_derivative_of_square_weight() {
        let psi = PsiSpec::parse("3*t^2").unwrap();
        let sigma = parse("(3*t^2)^2").unwrap();
        let d = psi_seq_derivative(&sigma, &psi, 1, 0.5).unwrap();
        assert!((d - 1.5).abs() < 1e-12, "{d}");
        let closure = |t: f64| (3.0 * t * t).powi(2);
        let fd = psi_seq_derivative(&closure, &psi, 1, 0.5).unwrap();
        assert!((fd - 1.5).abs() < 1e-6, "{fd}");
        let fd2 = psi_seq_derivative(&closure, &psi, 2, 0.5).unwrap();
        assert!((fd2 - 2.0).abs() < 1e-4, "{fd2}");
    }

    #[test]
    fn finite_difference_switches_stencil_at_edges() {
        let psi = PsiSpec::identity();
        let f = |t: f64| t.powi(3);
        for &t in &[0.0, 1.0, 0.5] {
            let d = psi_seq_derivative(&f, &psi, 1, t).unwrap();
            assert!((d - 3.0 * t * t).abs() < 1e-6, "t = {t}: {d}");
        }
        assert!(matches!(
            psi_seq_derivative(&f, &psi, 5, 0.5),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn rl_derivative_matches_power_rule() {
        let psi = PsiSpec::identity();
        let beta = 2.5;
        let sigma = |t: f64| t.powf(beta - 1.0);
        for &t in &[0.3, 0.7, 1.0] {
            let v = psi_rl_derivative(&sigma, &psi, order(0.5), 0.0, t, DEFAULT_NODES).unwrap();
            let exact = gamma(beta) / gamma(beta - 0.5) * t.powf(beta - 1.5);
            assert!((v - exact).abs() < 1e-4 * exact.abs().max(1.0), "t = {t}: {v} vs {exact}");
        }
    }

    #[test]
    fn rl_derivative_at_the_right_end_with_curved_psi() {
        let beta = 2.5;
        for psi in [PsiSpec::parse("3*t^2").unwrap(), PsiSpec::parse("exp(t)").unwrap()] {
            let psi_a = psi.eval(0.0).unwrap();
            let sigma = |t: f64| (psi.eval(t).unwrap() - psi_a).powf(beta - 1.0);
            for &t in &[0.99, 1.0] {
                let v = psi_rl_derivative(&sigma, &psi, order(1.5), 0.0, t, DEFAULT_NODES).unwrap();
                let exact = power_rule(PowerRuleKind::Caputo, &psi, 0.0, t, 1.5, beta).unwrap();
                assert!((v - exact).abs() < 1e-6 * exact.abs(), "t = {t}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn integer_orders_are_plain_derivatives() {
        let psi = PsiSpec::identity();
        let sigma = parse("sin(t)").unwrap();
        let c = psi_caputo_derivative(&sigma, &psi, order(2.0), 0.0, 0.4, 8).unwrap();
        assert!((c + 0.4f64.sin()).abs() < 1e-14);
        let r = psi_rl_derivative(&sigma, &psi, order(1.0), 0.0, 0.4, 8).unwrap();
        assert!((r - 0.4f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn power_rule_against_beta_function() {
        // I^alpha s^(beta-1) at t = 1 equals B(alpha, beta) / Gamma(alpha).
        let (alpha, beta) = (0.7, 1.3);
        let v = power_rule(PowerRuleKind::Integral, &PsiSpec::identity(), 0.0, 1.0, alpha, beta).unwrap();
        let beta_fn = (ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta)).exp();
        assert!((v - beta_fn / gamma(alpha)).abs() < 1e-14);
    }

    #[test]
    fn power_rule_preconditions() {
        let psi = PsiSpec::identity();
        assert_eq!(power_rule(PowerRuleKind::Caputo, &psi, 0.0, 0.5, 1.5, 2.0).unwrap(), 0.0);
        assert!(power_rule(PowerRuleKind::Caputo, &psi, 0.0, 0.5, 1.5, 0.5).is_err());
        assert!(power_rule(PowerRuleKind::Integral, &psi, 0.5, 0.5, 1.5, 2.0).is_err());
        assert!(power_rule(PowerRuleKind::Integral, &psi, 0.0, 0.5, 1.5, 0.0).is_err());
    }

    #[test]
    fn state_variables_rejected() {
        let psi = PsiSpec::identity();
        let e = parse("x + t").unwrap();
        assert!(psi_rl_integral(&e, &psi, order(0.5), 0.0, 1.0, 8).is_err());
    }

    #[test]
    fn registered_derivatives_are_used() {
        let psi = PsiSpec::identity();
        let sigma = WithDerivatives {
            derivatives: vec![Box::new(|t: f64| Ok(t.exp())), Box::new(|t: f64| Ok(t.exp()))],
        };
        let c = psi_caputo_derivative(&sigma, &psi, order(0.5), 0.0, 1.0, DEFAULT_NODES).unwrap();
        // I^(1/2) e^t at t = 1 equals e * erf(1).
        let exact = std::f64::consts::E * 0.8427007929497149;
        assert!((c - exact).abs() < 1e-10, "{c} vs {exact}");
        assert!(sigma.seq_derivative(&psi, 2).is_err());
    }
}
