//! Parsing, printing, evaluating and differentiating expressions.

use psifrac::expr::{diff_expr, eval_expr, parse, tokenize, Var};

fn main() -> psifrac::Result<()> {
    let f = parse("exp(-pi*t)/(7.5 + t) * (x/(1 + x^2) + sin(y))")?;
    println!("f          = {f}");
    println!("tokens     = {}", tokenize("2*t^-1.5")?.len());
    println!("f(0.5,1,2) = {:.12}", eval_expr(&f, 0.5, 1.0, 2.0)?);
    for v in [Var::T, Var::X, Var::Y] {
        println!("df/d{}      = {}", v.name(), diff_expr(&f, v)?);
    }

    let kink = parse("abs(x) + t")?;
    if let Err(e) = diff_expr(&kink, Var::X) {
        println!("d/dx {kink}: {e}");
    }

    for bad in ["sin(t", "2**t", "foo(t)", "t x"] {
        match parse(bad) {
            Ok(e) => println!("{bad:>8} -> {e}"),
            Err(e) => println!("{bad:>8} -> error: {e}"),
        }
    }
    Ok(())
}
