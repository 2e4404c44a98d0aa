//! Existence and uniqueness constants for a configured problem.
//!
//! `cargo run --example condition_check -- path/to/problem.cfg`

use psifrac::bvp::{condition_report, Omega0Convention};
use psifrac::cli::format_condition_report;
use psifrac::config::{load_config, parse_config, EXAMPLE_4_1};

fn main() -> psifrac::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => parse_config(EXAMPLE_4_1)?,
    };
    let constants = config.resolve_constants()?;
    for convention in [Omega0Convention::Corrected, Omega0Convention::PaperLiteral] {
        let report = condition_report(&config.problem, &constants, convention)?;
        println!("{}", format_condition_report(&constants, &report));
    }
    Ok(())
}
