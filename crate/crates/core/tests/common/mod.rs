//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use psifrac::calculus::{
    psi_caputo_derivative, psi_rl_integral, Fallible, FracOrder, Integrand, WithDerivatives,
};
use psifrac::expr::{parse, Expr};
use psifrac::gamma::gamma;
use psifrac::psi::PsiSpec;
use psifrac::Result;

pub const QUAD_N: usize = 64;

pub fn psi_choices() -> Vec<(&'static str, PsiSpec)> {
    vec![
        ("t", PsiSpec::identity()),
        ("3*t^2", PsiSpec::parse("3*t^2").unwrap()),
        ("exp(t)", PsiSpec::parse("exp(t)").unwrap()),
    ]
}

pub fn smooth_functions() -> Vec<Expr> {
    ["exp(t)", "sin(2*t) + 1", "1 + t + t^2", "cos(t)", "1/(2 + t)"]
        .iter()
        .map(|s| parse(s).unwrap())
        .collect()
}

/// `I^alpha σ` as an integrand whose sequential derivatives are exact:
/// `F^[k] = Σ_{j<k} σ^[j](a) w^(alpha-k+j) / Γ(alpha-k+j+1) + I^alpha σ^[k]`.
pub fn integrated<'a>(
    sigma: &'a Expr,
    psi: &'a PsiSpec,
    order: FracOrder,
    a: f64,
) -> Result<WithDerivatives<'a>> {
    let n = order.n();
    let alpha = order.alpha();
    let psi_a = psi.eval(a)?;
    let mut at_a = Vec::with_capacity(n);
    for j in 0..n {
        at_a.push(sigma.seq_derivative(psi, j)?(a)?);
    }
    let mut derivatives: Vec<Box<dyn Fn(f64) -> Result<f64> + 'a>> = Vec::new();
    for k in 0..=n {
        let coeffs = at_a[..k].to_vec();
        let top = sigma.seq_derivative(psi, k)?;
        derivatives.push(Box::new(move |t: f64| {
            let w = psi.eval(t)? - psi_a;
            let mut acc = 0.0;
            for (j, c) in coeffs.iter().enumerate() {
                let e = alpha - k as f64 + j as f64;
                acc += c * w.powf(e) / gamma(e + 1.0);
            }
            let tail = psi_rl_integral(
                &Fallible(|s| top(s)),
                psi,
                order,
                a,
                t,
                QUAD_N,
            )?;
            Ok(acc + tail)
        }));
    }
    Ok(WithDerivatives { derivatives })
}

pub fn interior_points(a: f64) -> Vec<f64> {
    (1..=10).map(|i| a + (1.0 - a) * i as f64 / 11.0).collect()
}

/// Worst relative error of `ᶜD^alpha I^alpha σ = σ` over the interior points,
/// relative to `max(1, |σ|)`.
pub fn left_inverse_error(sigma: &Expr, psi: &PsiSpec, alpha: f64, a: f64) -> Result<f64> {
    let order = FracOrder::new(alpha)?;
    let composed = integrated(sigma, psi, order, a)?;
    let mut worst: f64 = 0.0;
    for t in interior_points(a) {
        let v = psi_caputo_derivative(&composed, psi, order, a, t, QUAD_N)?;
        let exact = sigma.value(t)?;
        worst = worst.max((v - exact).abs() / exact.abs().max(1.0));
    }
    Ok(worst)
}

/// Worst relative error of `I^alpha ᶜD^alpha σ = σ - Σ c_k w^k`.
pub fn right_composition_error(sigma: &Expr, psi: &PsiSpec, alpha: f64, a: f64) -> Result<f64> {
    let order = FracOrder::new(alpha)?;
    let psi_a = psi.eval(a)?;
    let mut coeffs = Vec::new();
    let mut factorial = 1.0;
    for k in 0..order.n() {
        if k > 0 {
            factorial *= k as f64;
        }
        coeffs.push(sigma.seq_derivative(psi, k)?(a)? / factorial);
    }
    let mut worst: f64 = 0.0;
    for t in interior_points(a) {
        let caputo = |s: f64| psi_caputo_derivative(sigma, psi, order, a, s, QUAD_N);
        let v = psi_rl_integral(&Fallible(caputo), psi, order, a, t, QUAD_N)?;
        let w = psi.eval(t)? - psi_a;
        let taylor: f64 = coeffs.iter().enumerate().map(|(k, c)| c * w.powi(k as i32)).sum();
        let exact = sigma.value(t)? - taylor;
        worst = worst.max((v - exact).abs() / exact.abs().max(1.0));
    }
    Ok(worst)
}

pub mod problems {
    use psifrac::bvp::{
        condition_report, BvpProblem, ConditionReport, ConstantSet, GridFunction,
        Omega0Convention, Provenance,
    };
    use psifrac::calculus::FracOrder;
    use psifrac::config::{parse_config, EXAMPLE_4_1};
    use psifrac::expr::parse;
    use psifrac::gamma::gamma;
    use psifrac::psi::PsiSpec;
    use rand::Rng;

    pub fn example_4_1() -> BvpProblem {
        parse_config(EXAMPLE_4_1).unwrap().problem
    }

    pub fn manufactured_x(t: f64) -> f64 {
        9.0 * t.powi(4) - 11.25 * t * t
    }

    /// `y = w^2 - (10/3) w` solves the beta = 4/3, xi = 1/3 analogue.
    pub fn manufactured_y(t: f64) -> f64 {
        let w = 3.0 * t * t;
        w * w - 10.0 / 3.0 * w
    }

    /// Example 4.1's boundary data with right-hand sides chosen so that
    /// the solution is `(manufactured_x, manufactured_y)`.
    pub fn manufactured_problem() -> BvpProblem {
        let mut p = example_4_1();
        p.f = parse(&format!("{} * t", 2.0 / gamma(1.5) * 3f64.sqrt())).unwrap();
        p.g = parse(&format!("{} * (3*t^2)^(2/3)", 2.0 / gamma(5.0 / 3.0))).unwrap();
        p
    }

    /// `f = a1 sin(x) + a2 cos(y) + b0 + b1 t` and the same shape for `g`,
    /// so that `L = max(|a1|, |a2|)` and `M = max(|a2 + b0|, |a2 + b0 + b1|)`
    /// are exact. Coefficients are scaled so that `gamma3 + gamma4 <= 0.8`.
    pub struct RandomProblem {
        pub problem: BvpProblem,
        pub constants: ConstantSet,
        pub report: ConditionReport,
    }

    fn rhs(a1: f64, a2: f64, b0: f64, b1: f64) -> String {
        format!("({a1})*sin(x) + ({a2})*cos(y) + ({b0}) + ({b1})*t")
    }

    fn bounds(a1: f64, a2: f64, b0: f64, b1: f64) -> (f64, f64) {
        (a1.abs().max(a2.abs()), (a2 + b0).abs().max((a2 + b0 + b1).abs()))
    }

    pub fn random_problem(rng: &mut impl Rng) -> RandomProblem {
        let psis = ["t", "3*t^2", "exp(t)", "t^1.5 + t"];
        loop {
            let psi = PsiSpec::parse(psis[rng.gen_range(0..psis.len())]).unwrap();
            let mut problem = BvpProblem {
                alpha: FracOrder::new(rng.gen_range(1.1..1.9)).unwrap(),
                beta: FracOrder::new(rng.gen_range(1.1..1.9)).unwrap(),
                eta: rng.gen_range(0.2..0.8),
                xi: rng.gen_range(0.2..0.8),
                lambda: rng.gen_range(0.3..2.0),
                mu: rng.gen_range(0.3..2.0),
                f: parse("0").unwrap(),
                g: parse("0").unwrap(),
                psi,
            };
            let unit = ConstantSet {
                lipschitz_f: 1.0,
                lipschitz_g: 1.0,
                growth_f: [1.0, 0.0, 0.0],
                growth_g: [1.0, 0.0, 0.0],
                bound_f0: 0.0,
                bound_g0: 0.0,
                provenance: Provenance::UserSupplied,
                warnings: Vec::new(),
            };
            let Ok(base) = condition_report(&problem, &unit, Omega0Convention::Corrected) else {
                continue;
            };
            let (a, b) = (base.coeff_alpha, base.coeff_beta);
            if a > 200.0 || b > 200.0 {
                continue;
            }
            let mut coeffs = [[0.0; 4]; 2];
            for c in coeffs.iter_mut() {
                for v in c.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
            }
            let (lf, _) = bounds(coeffs[0][0], coeffs[0][1], 0.0, 0.0);
            let (lg, _) = bounds(coeffs[1][0], coeffs[1][1], 0.0, 0.0);
            let scale = 0.8 / (a * lf + b * lg) * rng.gen_range(0.2..1.0);
            for c in coeffs.iter_mut() {
                c[0] *= scale;
                c[1] *= scale;
            }
            let [f, g] = coeffs;
            problem.f = parse(&rhs(f[0], f[1], f[2], f[3])).unwrap();
            problem.g = parse(&rhs(g[0], g[1], g[2], g[3])).unwrap();
            let (lipschitz_f, bound_f0) = bounds(f[0], f[1], f[2], f[3]);
            let (lipschitz_g, bound_g0) = bounds(g[0], g[1], g[2], g[3]);
            let constants = ConstantSet {
                lipschitz_f,
                lipschitz_g,
                growth_f: [bound_f0.max(1e-3), lipschitz_f, lipschitz_f],
                growth_g: [bound_g0.max(1e-3), lipschitz_g, lipschitz_g],
                bound_f0,
                bound_g0,
                provenance: Provenance::UserSupplied,
                warnings: Vec::new(),
            };
            let report = condition_report(&problem, &constants, Omega0Convention::Corrected).unwrap();
            return RandomProblem {
                problem,
                constants,
                report,
            };
        }
    }

    /// A random smooth grid pair scaled so that `|x| + |y| = radius * fill`.
    pub fn random_pair(
        rng: &mut impl Rng,
        intervals: usize,
        radius: f64,
    ) -> (GridFunction, GridFunction) {
        let mut wave = || {
            let (c, k, p) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..6.0), rng.gen_range(0.0..6.3));
            move |t: f64| c * (k * t + p).sin()
        };
        let (w1, w2, w3, w4) = (wave(), wave(), wave(), wave());
        let x = GridFunction::from_fn(intervals, |t| w1(t) + w2(t)).unwrap();
        let y = GridFunction::from_fn(intervals, |t| w3(t) + w4(t)).unwrap();
        let fill = rng.gen_range(0.1..1.0);
        let s = radius * fill / (x.sup_norm() + y.sup_norm()).max(1e-12);
        let scale = |g: &GridFunction| GridFunction::new(g.values().iter().map(|v| v * s).collect()).unwrap();
        (scale(&x), scale(&y))
    }
}
