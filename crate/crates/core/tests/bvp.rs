//! Operator identities and solver behaviour on the coupled problem.

mod common;

use common::problems::{
    example_4_1, manufactured_problem, manufactured_x, manufactured_y, random_pair, random_problem,
};
use psifrac::bvp::{
    apply_t, condition_report, picard_solve, residual_report, solve_linear_bvp, Discretization,
    GridFunction, Omega0Convention, SolverOptions,
};
use psifrac::calculus::FracOrder;
use psifrac::collocation::{collocation_solve, cross_validate};
use psifrac::config::{parse_config, EXAMPLE_4_1, EXAMPLE_4_2};
use psifrac::expr::parse;
use psifrac::psi::PsiSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GRID: usize = 40;
const QUAD: usize = 32;

#[test]
fn boundary_identities_for_arbitrary_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let rp = random_problem(&mut rng);
        let p = &rp.problem;
        let d = Discretization::new(p, GRID, QUAD).unwrap();
        let (x, y) = random_pair(&mut rng, GRID, 5.0);
        let (tx, ty) = d.apply(&x, &y).unwrap();
        let (at_eta, at_xi) = d.apply_at_boundary_points(&x, &y).unwrap();
        let scale = 1.0 + tx.sup_norm() + ty.sup_norm();
        assert_eq!(tx.values()[0], 0.0);
        assert_eq!(ty.values()[0], 0.0);
        assert!((tx.values()[GRID] - p.lambda * at_eta).abs() <= 1e-12 * scale);
        assert!((ty.values()[GRID] - p.mu * at_xi).abs() <= 1e-12 * scale);
    }
}

#[test]
fn first_example_boundary_identity_at_zero_pair() {
    let p = example_4_1();
    let zero = GridFunction::zeros(200).unwrap();
    let (tx, _) = apply_t(&p, &zero, &zero, 64).unwrap();
    // eta = 1/2 is grid node 100.
    assert!((tx.values()[200] - tx.values()[100]).abs() <= 1e-8);
}

#[test]
fn manufactured_solution_both_components() {
    let p = manufactured_problem();
    let opts = SolverOptions::default();
    let s = picard_solve(&p, &opts).unwrap();
    for (i, t) in s.x.nodes().into_iter().enumerate() {
        assert!((s.x.values()[i] - manufactured_x(t)).abs() <= 1e-6, "x at {t}");
        assert!((s.y.values()[i] - manufactured_y(t)).abs() <= 1e-6, "y at {t}");
    }
    let r = residual_report(&p, &s, 64).unwrap();
    assert!(r.max_fixed_point() <= 1e-8 && r.max_boundary() <= 1e-8);
    assert!(r.max_ode() <= 1e-3, "{:?}", r.ode);
}

#[test]
fn linear_solver_agrees_with_operator() {
    let psi = PsiSpec::parse("exp(t)").unwrap();
    let order = FracOrder::new(1.7).unwrap();
    let h = parse("cos(3*t) - t").unwrap();
    let lin = solve_linear_bvp(&h, &psi, order, 0.7, 0.4, GRID, QUAD).unwrap();
    let mut p = example_4_1();
    p.psi = psi;
    p.alpha = order;
    p.lambda = 0.7;
    p.eta = 0.4;
    p.f = h;
    let x = GridFunction::from_fn(GRID, |t| t).unwrap();
    let (tx, _) = apply_t(&p, &x, &x, QUAD).unwrap();
    assert_eq!(tx.values(), lin.values());
}

#[test]
fn grid_refinement_changes_little() {
    let p = example_4_1();
    let tol = 1e-8;
    let coarse = picard_solve(&p, &SolverOptions { grid_n: 200, tol, ..Default::default() }).unwrap();
    let fine = picard_solve(&p, &SolverOptions { grid_n: 400, tol, ..Default::default() }).unwrap();
    let diff = (0..=200)
        .map(|i| {
            (coarse.x.values()[i] - fine.x.values()[2 * i]).abs()
                + (coarse.y.values()[i] - fine.y.values()[2 * i]).abs()
        })
        .fold(0.0, f64::max);
    assert!(diff <= 10.0 * tol, "{diff:e}");
}

#[test]
fn solvers_agree_on_bundled_problems() {
    for text in [EXAMPLE_4_1, EXAMPLE_4_2] {
        let c = parse_config(text).unwrap();
        let a = picard_solve(&c.problem, &c.options).unwrap();
        let b = collocation_solve(&c.problem, &c.options).unwrap();
        let d = cross_validate(&a, &b, 10.0 * c.options.tol).unwrap();
        assert!(d.passed(), "{d:?}");
    }
}

#[test]
fn newton_tail_is_quadratic() {
    let c = parse_config(EXAMPLE_4_1).unwrap();
    // A stiffer coupling so that Newton needs several steps.
    let mut p = c.problem.clone();
    p.f = parse("exp(-3*t)/(7.5+t)*(sin(5*x)+abs(y))+exp(-t)/(1+t^2)").unwrap();
    let s = collocation_solve(&p, &SolverOptions { tol: 1e-12, ..c.options }).unwrap();
    let tail: Vec<(f64, f64)> = s
        .history
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(r, next)| r < 1e-3 && next > 1e-13)
        .collect();
    assert!(!tail.is_empty(), "{:?}", s.history);
    let ratios: Vec<f64> = tail.iter().map(|(r, next)| next / (r * r)).collect();
    let c0 = ratios[0];
    assert!(ratios.iter().all(|&q| q <= 10.0 * c0.max(1.0)), "{:?}", s.history);
}

#[test]
fn picard_ratio_below_contraction_constant() {
    let c = parse_config(EXAMPLE_4_1).unwrap();
    let k = c.resolve_constants().unwrap();
    let report = condition_report(&c.problem, &k, Omega0Convention::Corrected).unwrap();
    let s = picard_solve(&c.problem, &c.options).unwrap();
    assert!(s.contraction_estimate().unwrap() <= report.contraction());
    assert!(s.final_increment <= c.options.tol);
    assert_eq!(s.history.len(), s.iterations);
}
