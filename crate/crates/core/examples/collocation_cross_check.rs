//! Newton collocation against Picard, on a problem where Picard fails.

use psifrac::bvp::{picard_solve, SolverOptions};
use psifrac::collocation::{collocation_solve, cross_validate};
use psifrac::config::{parse_config, EXAMPLE_4_2};
use psifrac::expr::parse;

fn main() -> psifrac::Result<()> {
    let config = parse_config(EXAMPLE_4_2)?;
    let picard = picard_solve(&config.problem, &config.options)?;
    let newton = collocation_solve(&config.problem, &config.options)?;
    let diff = cross_validate(&picard, &newton, 1e-8)?;
    println!("Picard {} iterations, Newton {} steps", picard.iterations, newton.iterations);
    println!("sup difference {:.2e}, L2 difference {:.2e}", diff.sup(), diff.l2_x.max(diff.l2_y));

    // Strong coupling: the fixed-point map is no longer a contraction.
    let mut stiff = config.problem.clone();
    stiff.f = parse("3*sin(x) + cos(y) + t")?;
    let opts = SolverOptions { max_iter: 60, ..config.options };
    match picard_solve(&stiff, &opts) {
        Ok(p) => println!("Picard converged anyway in {} iterations", p.iterations),
        Err(e) => println!("Picard: {e}"),
    }
    match collocation_solve(&stiff, &opts) {
        Ok(s) => println!("Newton converged in {} steps, residual {:.1e}", s.iterations, s.final_increment),
        Err(e) => println!("Newton: {e}"),
    }
    Ok(())
}
