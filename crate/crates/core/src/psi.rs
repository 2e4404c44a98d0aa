//! Weight functions `psi` for the psi-fractional operators: a strictly
//! increasing map on the problem domain with access to its derivative and
//! inverse.

use crate::error::{Error, Result};
use crate::expr::{self, diff_expr, BinOp, Expr, Var};

const DOMAIN_SLACK: f64 = 1e-14;
const INVERSE_TOL: f64 = 1e-12;
const MAX_BISECTION: usize = 200;
const MAX_NEWTON_POLISH: usize = 5;
pub const DEFAULT_VALIDATION_SAMPLES: usize = 1001;

#[derive(Debug, Clone, PartialEq)]
pub enum PsiKind {
    Identity,
    /// `slope * t + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `coeff * t^exponent`
    Power { coeff: f64, exponent: f64 },
    Expression { expr: Expr, derivative: Expr },
}

/// A weight function on a closed interval (always `[0, 1]` for the boundary
/// value layer). Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiSpec {
    kind: PsiKind,
    domain: (f64, f64),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PsiSpec {
    pub fn identity() -> Self {
        PsiSpec {
            kind: PsiKind::Identity,
            domain: (0.0, 1.0),
        }
    }

    pub fn affine(slope: f64, intercept: f64) -> Result<Self> {
        if !(slope > 0.0 && slope.is_finite() && intercept.is_finite()) {
            return Err(Error::input(format!(
                "affine psi needs a positive finite slope, got {slope}"
            )));
        }
        Ok(PsiSpec {
            kind: PsiKind::Affine { slope, intercept },
            domain: (0.0, 1.0),
        })
    }

    pub fn power(coeff: f64, exponent: f64) -> Result<Self> {
        if !(coeff > 0.0 && exponent > 0.0 && coeff.is_finite() && exponent.is_finite()) {
            return Err(Error::input(format!(
                "power psi needs coeff > 0 and exponent > 0, got ({coeff}, {exponent})"
            )));
        }
        Ok(PsiSpec {
            kind: PsiKind::Power { coeff, exponent },
            domain: (0.0, 1.0),
        })
    }

    /// Builds a weight from an expression in `t`. Simple shapes (`t`, `c*t+d`,
    /// `c*t^p`) are mapped onto the closed-form kinds; anything else keeps the
    /// expression together with its symbolic derivative.
    pub fn from_expr(expr: Expr) -> Result<Self> {
        if expr.depends_on(Var::X) || expr.depends_on(Var::Y) {
            return Err(Error::input(format!(
                "psi may only depend on t, got `{expr}`"
            )));
        }
        if let Some(spec) = recognize(&expr) {
            return Ok(spec);
        }
        let derivative = diff_expr(&expr, Var::T)?;
        Ok(PsiSpec {
            kind: PsiKind::Expression { expr, derivative },
            domain: (0.0, 1.0),
        })
    }

    pub fn parse(source: &str) -> Result<Self> {
        Self::from_expr(expr::parse(source)?)
    }

    pub fn kind(&self) -> &PsiKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (a, b) = self.domain;
        if t.is_finite() && t >= a - DOMAIN_SLACK && t <= b + DOMAIN_SLACK {
            Ok(())
        } else {
            Err(Error::input(format!(
                "t = {t} outside psi domain [{a}, {b}]"
            )))
        }
    }

    /// `psi(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        self.value_raw(t)
    }

    /// `psi'(t)`.
    pub fn deriv(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        self.deriv_raw(t)
    }

    /// Evaluation without the domain check, for finite-difference stencils
    /// that may step just outside the interval.
    pub(crate) fn value_raw(&self, t: f64) -> Result<f64> {
        let v = match &self.kind {
            PsiKind::Identity => t,
            PsiKind::Affine { slope, intercept } => slope * t + intercept,
            PsiKind::Power { coeff, exponent } => coeff * powr(t, *exponent)?,
            PsiKind::Expression { expr, .. } => expr.eval_t(t)?,
        };
        Ok(v)
    }

    pub(crate) fn deriv_raw(&self, t: f64) -> Result<f64> {
        let v = match &self.kind {
            PsiKind::Identity => 1.0,
            PsiKind::Affine { slope, .. } => *slope,
            PsiKind::Power { coeff, exponent } => {
                if *exponent == 1.0 {
                    *coeff
                } else {
                    coeff * exponent * powr(t, exponent - 1.0)?
                }
            }
            PsiKind::Expression { derivative, .. } => derivative.eval_t(t)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numerical(format!("psi'({t}) is not finite")))
        }
    }

    /// `t` with `psi(t) = u`.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        let (a, b) = self.domain;
        let lo = self.value_raw(a)?;
        let hi = self.value_raw(b)?;
        let slack = DOMAIN_SLACK * u.abs().max(1.0);
        if !(u.is_finite() && u >= lo - slack && u <= hi + slack) {
            return Err(Error::input(format!(
                "u = {u} outside psi range [{lo}, {hi}]"
            )));
        }
        let u = u.clamp(lo, hi);
        let t = match &self.kind {
            PsiKind::Identity => u,
            PsiKind::Affine { slope, intercept } => (u - intercept) / slope,
            PsiKind::Power { coeff, exponent } => {
                let r = (u / coeff).max(0.0);
                if *exponent == 2.0 {
                    r.sqrt()
                } else {
                    r.powf(1.0 / exponent)
                }
            }
            PsiKind::Expression { .. } => self.invert_numerically(u, lo, hi)?,
        };
        Ok(t.clamp(a, b))
    }

    // Monotone bisection down to a narrow bracket, then guarded Newton steps.
    // If Newton stalls (e.g. psi' ~ 0) the bisection simply continues.
    fn invert_numerically(&self, u: f64, lo_val: f64, hi_val: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.domain;
        if u == lo_val {
            return Ok(lo);
        }
        if u == hi_val {
            return Ok(hi);
        }
        let mut steps = 0;
        let mut narrow = 1e-6 * (hi - lo);
        loop {
            while steps < MAX_BISECTION && hi - lo > narrow {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.value_raw(mid)? < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
                steps += 1;
            }
            let mut t = 0.5 * (lo + hi);
            for _ in 0..MAX_NEWTON_POLISH {
                let r = self.value_raw(t)? - u;
                if r == 0.0 {
                    break;
                }
                let d = match self.deriv_raw(t) {
                    Ok(d) if d > 0.0 => d,
                    _ => break,
                };
                let next = t - r / d;
                if !(next >= lo && next <= hi) || next == t {
                    break;
                }
                t = next;
            }
            let r = (self.value_raw(t)? - u).abs();
            if r <= INVERSE_TOL {
                return Ok(t);
            }
            if narrow == 0.0 || steps >= MAX_BISECTION {
                return Err(Error::numerical(format!(
                    "psi inverse did not converge for u = {u} (residual {r:e} after {steps} bisection steps)"
                )));
            }
            narrow = 0.0;
        }
    }

    /// `psi` as an expression in `t`.
    pub fn as_expr(&self) -> Expr {
        match &self.kind {
            PsiKind::Identity => Expr::Var(Var::T),
            PsiKind::Affine { slope, intercept } => Expr::binary(
                BinOp::Add,
                Expr::binary(BinOp::Mul, Expr::constant(*slope), Expr::Var(Var::T)),
                Expr::constant(*intercept),
            ),
            PsiKind::Power { coeff, exponent } => Expr::binary(
                BinOp::Mul,
                Expr::constant(*coeff),
                Expr::binary(BinOp::Pow, Expr::Var(Var::T), Expr::constant(*exponent)),
            ),
            PsiKind::Expression { expr, .. } => expr.clone(),
        }
    }

    /// `psi'` as an expression in `t`.
    pub fn derivative_expr(&self) -> Expr {
        match &self.kind {
            PsiKind::Identity => Expr::Const(1.0),
            PsiKind::Affine { slope, .. } => Expr::constant(*slope),
            PsiKind::Power { .. } => {
                diff_expr(&self.as_expr(), Var::T).expect("power weight is differentiable")
            }
            PsiKind::Expression { derivative, .. } => derivative.clone(),
        }
    }

    /// Checks `psi' > 0` on the interior of a uniform grid, monotonicity of
    /// consecutive samples, and the inverse round trip. A vanishing derivative
    /// at an endpoint is a warning, not a violation.
    pub fn validate(&self, n_samples: usize) -> ValidationReport {
        let mut report = ValidationReport {
            samples: n_samples,
            ..Default::default()
        };
        if n_samples < 2 {
            report
                .violations
                .push(format!("need at least 2 samples, got {n_samples}"));
            return report;
        }
        let (a, b) = self.domain;
        let step = (b - a) / (n_samples - 1) as f64;
        let mut prev: Option<f64> = None;
        for i in 0..n_samples {
            let t = if i == n_samples - 1 { b } else { a + step * i as f64 };
            let endpoint = i == 0 || i == n_samples - 1;
            match self.deriv_raw(t) {
                Ok(d) if d > 0.0 => {}
                Ok(d) if endpoint && d == 0.0 => report
                    .warnings
                    .push(format!("psi'({t}) = 0 at an endpoint")),
                Ok(d) => report
                    .violations
                    .push(format!("psi'({t}) = {d} is not positive")),
                Err(e) if endpoint => report
                    .warnings
                    .push(format!("psi'({t}) not available at an endpoint: {e}")),
                Err(e) => report.violations.push(format!("psi'({t}): {e}")),
            }
            let v = match self.value_raw(t) {
                Ok(v) => v,
                Err(e) => {
                    report.violations.push(format!("psi({t}): {e}"));
                    prev = None;
                    continue;
                }
            };
            if let Some(p) = prev {
                if v <= p {
                    report
                        .violations
                        .push(format!("psi not increasing before t = {t}"));
                }
            }
            prev = Some(v);
            match self.inverse(v) {
                Ok(back) if (back - t).abs() <= INVERSE_TOL => {}
                Ok(back) => report.violations.push(format!(
                    "inverse round trip at t = {t} returned {back}"
                )),
                Err(e) => report
                    .violations
                    .push(format!("inverse at t = {t} failed: {e}")),
            }
        }
        report
    }
}

fn powr(t: f64, p: f64) -> Result<f64> {
    if t < 0.0 && p.fract() != 0.0 {
        return Err(Error::eval(format!("{t}^{p} is not real")));
    }
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        Ok(t.powi(p as i32))
    } else {
        Ok(t.powf(p))
    }
}

fn literal(e: &Expr) -> Option<f64> {
    e.eval_constant().ok()
}

fn recognize(e: &Expr) -> Option<PsiSpec> {
    let is_t = |e: &Expr| matches!(e, Expr::Var(Var::T));
    // c * t  /  c * t^p  /  t^p
    let scaled = |e: &Expr| -> Option<(f64, f64)> {
        if is_t(e) {
            return Some((1.0, 1.0));
        }
        match e {
            Expr::Binary(BinOp::Pow, base, p) if is_t(base) && p.is_constant() => {
                Some((1.0, literal(p)?))
            }
            Expr::Binary(BinOp::Mul, c, rest) if c.is_constant() => {
                let c = literal(c)?;
                if is_t(rest) {
                    return Some((c, 1.0));
                }
                match rest.as_ref() {
                    Expr::Binary(BinOp::Pow, base, p) if is_t(base) && p.is_constant() => {
                        Some((c, literal(p)?))
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    };
    if let Some((c, p)) = scaled(e) {
        return if p == 1.0 {
            if c == 1.0 {
                Some(PsiSpec::identity())
            } else {
                PsiSpec::affine(c, 0.0).ok()
            }
        } else {
            PsiSpec::power(c, p).ok()
        };
    }
    if let Expr::Binary(op @ (BinOp::Add | BinOp::Sub), l, r) = e {
        let sign = if *op == BinOp::Add { 1.0 } else { -1.0 };
        if r.is_constant() {
            if let Some((c, 1.0)) = scaled(l) {
                return PsiSpec::affine(c, sign * literal(r)?).ok();
            }
        }
        if *op == BinOp::Add && l.is_constant() {
            if let Some((c, 1.0)) = scaled(r) {
                return PsiSpec::affine(c, literal(l)?).ok();
            }
        }
    }
    None
}
