//! Picard iteration on the bundled uniqueness example, with residuals.

use psifrac::bvp::{picard_solve, residual_report};
use psifrac::config::{parse_config, EXAMPLE_4_1};

fn main() -> psifrac::Result<()> {
    let config = parse_config(EXAMPLE_4_1)?;
    let pair = picard_solve(&config.problem, &config.options)?;
    println!("converged in {} iterations", pair.iterations);
    for (k, inc) in pair.history.iter().enumerate() {
        println!("  {:>2}: {inc:.3e}", k + 1);
    }
    if let Some(q) = pair.contraction_estimate() {
        println!("observed contraction ratio {q:.4}");
    }

    let n = pair.x.intervals();
    for i in (0..=n).step_by(n / 10) {
        let t = pair.x.nodes()[i];
        println!("t = {t:.2}  x = {:>14.10}  y = {:>14.10}", pair.x.values()[i], pair.y.values()[i]);
    }

    let r = residual_report(&config.problem, &pair, config.options.quad_n)?;
    println!("fixed-point residual {:.2e}", r.max_fixed_point());
    println!("boundary residual    {:.2e}", r.max_boundary());
    println!("ODE residual         {:.2e}", r.max_ode());
    Ok(())
}
