//! Recomputes the constants of both bundled examples and solves them.

use psifrac::bvp::picard_solve;
use psifrac::cli::format_reproduction;
use psifrac::reproduce::reproduce_all;

fn main() -> psifrac::Result<()> {
    for run in reproduce_all()? {
        print!("{}", format_reproduction(&run));
        let pair = picard_solve(&run.config.problem, &run.config.options)?;
        println!("|x| + |y| = {:.6}", pair.norm());
        if let Some(b) = run.report.solution_bound() {
            println!("a-priori bound {b:.6}");
        }
        println!();
    }
    Ok(())
}
