use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{compute_deltas, BvpProblem};
use crate::expr::{eval_expr, Expr};
use crate::gamma::gamma;
use crate::{Error, Result};

pub const DEFAULT_SAMPLE_GRID: usize = 101;
pub const DEFAULT_BOX_RADIUS: f64 = 10.0;

const SAMPLE_SEED: u64 = 0x5eed_c0de;
const LIPSCHITZ_PAIRS: usize = 4000;
const GROWTH_SAMPLES: usize = 4000;
const LOCAL_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    UserSupplied,
    SampledEstimate,
    /// Some values supplied, the rest sampled.
    Mixed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::UserSupplied => "user-supplied",
            Provenance::SampledEstimate => "sampled-estimate",
            Provenance::Mixed => "mixed",
        })
    }
}

/// Lipschitz constants, linear growth bounds `|f| <= k0 + k1|x| + k2|y|`,
/// and `sup |f(t,0,0)|`, `sup |g(t,0,0)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSet {
    pub lipschitz_f: f64,
    pub lipschitz_g: f64,
    pub growth_f: [f64; 3],
    pub growth_g: [f64; 3],
    pub bound_f0: f64,
    pub bound_g0: f64,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl ConstantSet {
    pub fn validate(&self) -> Result<()> {
        let all = [self.lipschitz_f, self.lipschitz_g, self.bound_f0, self.bound_g0]
            .into_iter()
            .chain(self.growth_f)
            .chain(self.growth_g);
        for v in all {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "constants must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.growth_f[0] <= 0.0 || self.growth_g[0] <= 0.0 {
            return Err(Error::Validation("k0 and l0 must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Omega0Convention {
    /// `A k0 + B l0`.
    #[default]
    Corrected,
    /// `(A + B) l0`, with `k0` unused.
    PaperLiteral,
}

impl FromStr for Omega0Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Omega0Convention::Corrected),
            "paper-literal" => Ok(Omega0Convention::PaperLiteral),
            other => Err(Error::input(format!(
                "omega0 convention must be `corrected` or `paper-literal`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Omega0Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Omega0Convention::Corrected => "corrected",
            Omega0Convention::PaperLiteral => "paper-literal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub delta1: f64,
    pub delta2: f64,
    /// `[W^a + (|lambda|+1)/|Δ1| W^(a+1)] / Γ(a+1)` with `W = psi(1) - psi(0)`.
    pub coeff_alpha: f64,
    pub coeff_beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega_star: f64,
    pub convention: Omega0Convention,
}

impl ConditionReport {
    /// `gamma3 + gamma4`, the contraction constant of `T`.
    pub fn contraction(&self) -> f64 {
        self.gamma3 + self.gamma4
    }

    pub fn uniqueness_verdict(&self) -> bool {
        self.contraction() < 1.0
    }

    pub fn existence_verdict(&self) -> bool {
        self.omega_star < 1.0
    }

    /// Radius of the invariant ball, when `gamma3 + gamma4 < 1`.
    pub fn r_bound(&self) -> Option<f64> {
        let den = 1.0 - self.contraction();
        (den > 0.0).then(|| (self.gamma1 + self.gamma2) / den)
    }

    /// A-priori bound on `|x| + |y|`, when `omega_star < 1`.
    pub fn solution_bound(&self) -> Option<f64> {
        let den = 1.0 - self.omega_star;
        (den > 0.0).then(|| self.omega0 / den)
    }
}

fn coefficient(span: f64, order: f64, multiplier: f64, delta: f64) -> f64 {
    (span.powf(order) + (multiplier.abs() + 1.0) / delta.abs() * span.powf(order + 1.0))
        / gamma(order + 1.0)
}

pub fn condition_report(
    problem: &BvpProblem,
    constants: &ConstantSet,
    convention: Omega0Convention,
) -> Result<ConditionReport> {
    constants.validate()?;
    let (delta1, delta2) = compute_deltas(problem)?;
    let span = problem.psi_span()?;
    let a = coefficient(span, problem.alpha.alpha(), problem.lambda, delta1);
    let b = coefficient(span, problem.beta.alpha(), problem.mu, delta2);
    let [k0, k1, k2] = constants.growth_f;
    let [l0, l1, l2] = constants.growth_g;
    let omega0 = match convention {
        Omega0Convention::Corrected => a * k0 + b * l0,
        Omega0Convention::PaperLiteral => (a + b) * l0,
    };
    let omega1 = a * k1 + b * l1;
    let omega2 = a * k2 + b * l2;
    Ok(ConditionReport {
        delta1,
        delta2,
        coeff_alpha: a,
        coeff_beta: b,
        gamma1: constants.bound_f0 * a,
        gamma2: constants.bound_g0 * b,
        gamma3: constants.lipschitz_f * a,
        gamma4: constants.lipschitz_g * b,
        omega0,
        omega1,
        omega2,
        omega_star: omega1.max(omega2),
        convention,
    })
}

/// Numerical stand-in for user constants. `M` is a grid maximum, `L` the
/// largest sampled difference quotient in the box `|x|, |y| <= box_radius`,
/// and the growth bounds a non-negative least-squares fit of `|f|` lifted
/// until it envelopes every sample. All are lower bounds of the true values.
pub fn estimate_constants(
    problem: &BvpProblem,
    sample_grid: usize,
    box_radius: f64,
) -> Result<ConstantSet> {
    if sample_grid < 10 {
        return Err(Error::input(format!("sample_grid must be at least 10, got {sample_grid}")));
    }
    if !(box_radius > 0.0 && box_radius.is_finite()) {
        return Err(Error::input(format!("box_radius must be positive, got {box_radius}")));
    }
    let ts: Vec<f64> = (0..sample_grid)
        .map(|i| i as f64 / (sample_grid - 1) as f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let (lipschitz_f, growth_f, bound_f0) = estimate_one(&problem.f, &ts, box_radius, &mut rng)?;
    let (lipschitz_g, growth_g, bound_g0) = estimate_one(&problem.g, &ts, box_radius, &mut rng)?;
    Ok(ConstantSet {
        lipschitz_f,
        lipschitz_g,
        growth_f,
        growth_g,
        bound_f0,
        bound_g0,
        provenance: Provenance::SampledEstimate,
        warnings: vec![format!(
            "constants estimated by sampling (box radius {box_radius}) are lower bounds only"
        )],
    })
}

fn estimate_one(
    rhs: &Expr,
    ts: &[f64],
    radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, [f64; 3], f64)> {
    let eval = |t: f64, x: f64, y: f64| eval_expr(rhs, t, x, y);

    let mut bound0: f64 = 0.0;
    for &t in ts {
        bound0 = bound0.max(eval(t, 0.0, 0.0)?.abs());
    }

    let mut lipschitz: f64 = 0.0;
    for i in 0..LIPSCHITZ_PAIRS {
        let t = ts[rng.gen_range(0..ts.len())];
        let (x1, y1) = (rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius));
        let (x2, y2) = if i % 2 == 0 {
            (rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius))
        } else {
            let step = LOCAL_STEP * radius;
            (x1 + rng.gen_range(-step..=step), y1 + rng.gen_range(-step..=step))
        };
        let dist = (x1 - x2).abs() + (y1 - y2).abs();
        if dist == 0.0 {
            continue;
        }
        lipschitz = lipschitz.max((eval(t, x1, y1)? - eval(t, x2, y2)?).abs() / dist);
    }

    let mut rows = Vec::with_capacity(GROWTH_SAMPLES);
    let mut targets = Vec::with_capacity(GROWTH_SAMPLES);
    for _ in 0..GROWTH_SAMPLES {
        let t = ts[rng.gen_range(0..ts.len())];
        let (x, y) = (rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius));
        rows.push([1.0, x.abs(), y.abs()]);
        targets.push(eval(t, x, y)?.abs());
    }
    let mut growth = nonnegative_fit(&rows, &targets);
    let lift = rows
        .iter()
        .zip(&targets)
        .map(|(r, &v)| v - (growth[0] + growth[1] * r[1] + growth[2] * r[2]))
        .fold(0.0, f64::max);
    growth[0] = (growth[0] + lift).max(bound0).max(f64::MIN_POSITIVE);
    Ok((lipschitz, growth, bound0))
}

/// Least squares with non-negative coefficients, by trying every active set.
fn nonnegative_fit(rows: &[[f64; 3]], targets: &[f64]) -> [f64; 3] {
    let mut best = ([0.0; 3], f64::INFINITY);
    for mask in 1u8..8 {
        let cols: Vec<usize> = (0..3).filter(|c| mask & (1 << c) != 0).collect();
        let a = DMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i][cols[j]]);
        let b = DVector::from_column_slice(targets);
        let Ok(sol) = a.clone().svd(true, true).solve(&b, 1e-12) else {
            continue;
        };
        if sol.iter().any(|&c| c < 0.0) {
            continue;
        }
        let sse = (&a * &sol - &b).norm_squared();
        if sse < best.1 {
            let mut coeffs = [0.0; 3];
            for (j, &c) in cols.iter().enumerate() {
                coeffs[c] = sol[j];
            }
            best = (coeffs, sse);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::tests::problem;
    use crate::expr::parse;

    fn example_4_1() -> BvpProblem {
        let mut p = problem("3*t^2", 1.0, 0.5);
        p.f = parse("exp(-3*t)/(75+t)*(sin(x)+abs(y))+exp(-t)/(1+t^2)").unwrap();
        p.g = parse("1/(2*t^2+100)*(abs(x)/(1+abs(x))+sin(y))+sin(t)+1").unwrap();
        p
    }

    fn user_constants(lf: f64, lg: f64, k: [f64; 3], l: [f64; 3]) -> ConstantSet {
        ConstantSet {
            lipschitz_f: lf,
            lipschitz_g: lg,
            growth_f: k,
            growth_g: l,
            bound_f0: 1.0,
            bound_g0: 1.0 + 1f64.sin(),
            provenance: Provenance::UserSupplied,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn gamma3_of_first_example() {
        let c = user_constants(1.0 / 75.0, 1.0 / 100.0, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let r = condition_report(&example_4_1(), &c, Omega0Convention::Corrected).unwrap();
        assert!((r.gamma3 - 0.1910978713).abs() < 1e-8, "{}", r.gamma3);
        assert!(r.uniqueness_verdict());
        assert_eq!(r.r_bound(), Some((r.gamma1 + r.gamma2) / (1.0 - r.gamma3 - r.gamma4)));
    }

    #[test]
    fn omega0_conventions_differ_only_in_k0() {
        let c = user_constants(0.0, 0.0, [0.04, 0.005, 0.0], [0.0125, 0.0, 0.0]);
        let p = example_4_1();
        let a = condition_report(&p, &c, Omega0Convention::Corrected).unwrap();
        let b = condition_report(&p, &c, Omega0Convention::PaperLiteral).unwrap();
        assert!((a.omega0 - (a.coeff_alpha * 0.04 + a.coeff_beta * 0.0125)).abs() < 1e-14);
        assert!((b.omega0 - (a.coeff_alpha + a.coeff_beta) * 0.0125).abs() < 1e-14);
        assert_eq!(a.omega1, b.omega1);
        assert_eq!("paper-literal".parse::<Omega0Convention>().unwrap(), Omega0Convention::PaperLiteral);
        assert!("literal".parse::<Omega0Convention>().is_err());
    }

    #[test]
    fn bounds_absent_when_conditions_fail() {
        let c = user_constants(1.0, 1.0, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]);
        let r = condition_report(&example_4_1(), &c, Omega0Convention::Corrected).unwrap();
        assert!(!r.uniqueness_verdict() && !r.existence_verdict());
        assert_eq!(r.r_bound(), None);
        assert_eq!(r.solution_bound(), None);
    }

    #[test]
    fn estimates_for_first_example() {
        let c = estimate_constants(&example_4_1(), DEFAULT_SAMPLE_GRID, DEFAULT_BOX_RADIUS).unwrap();
        assert_eq!(c.bound_f0, 1.0);
        assert!((c.bound_g0 - (1.0 + 1f64.sin())).abs() < 1e-15);
        assert!(c.lipschitz_f > 0.0 && c.lipschitz_f <= 1.0 / 75.0 + 1e-12, "{}", c.lipschitz_f);
        assert!(c.lipschitz_g > 0.0 && c.lipschitz_g <= 1.0 / 100.0 + 1e-12, "{}", c.lipschitz_g);
        assert_eq!(c.provenance, Provenance::SampledEstimate);
        assert!(!c.warnings.is_empty());
        c.validate().unwrap();
    }

    #[test]
    fn zero_problem_estimates() {
        let c = estimate_constants(&problem("t", 1.0, 0.5), 10, 1.0).unwrap();
        assert_eq!(c.lipschitz_f, 0.0);
        assert_eq!(c.bound_g0, 0.0);
        assert_eq!(c.growth_f, [f64::MIN_POSITIVE, 0.0, 0.0]);
        assert_eq!(c.growth_g, [f64::MIN_POSITIVE, 0.0, 0.0]);
        assert!(estimate_constants(&problem("t", 1.0, 0.5), 9, 1.0).is_err());
    }

    #[test]
    fn growth_envelope_covers_samples() {
        let mut p = problem("t", 1.0, 0.5);
        p.f = parse("1 + 2*abs(x) + 0.5*sin(y)").unwrap();
        let c = estimate_constants(&p, 20, 2.0).unwrap();
        let [k0, k1, k2] = c.growth_f;
        for &(x, y) in &[(0.0, 0.0), (2.0, 1.5), (-1.0, -2.0)] {
            let v = 1.0 + 2.0 * f64::abs(x) + 0.5 * f64::sin(y);
            assert!(v.abs() <= k0 + k1 * f64::abs(x) + k2 * f64::abs(y) + 1e-9);
        }
    }
}
