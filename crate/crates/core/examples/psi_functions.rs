//! Weight functions: evaluation, derivative, inverse and validation.

use psifrac::psi::PsiSpec;

fn main() -> psifrac::Result<()> {
    let weights = [
        PsiSpec::identity(),
        PsiSpec::power(3.0, 2.0)?,
        PsiSpec::parse("exp(t)")?,
        PsiSpec::parse("t + sin(t)/2")?,
    ];
    for psi in &weights {
        println!("psi(t) = {}", psi.as_expr());
        for t in [0.25, 0.5, 1.0] {
            let u = psi.eval(t)?;
            println!(
                "  t = {t:<4}  psi = {u:<10.6}  psi' = {:<10.6}  inverse(psi) = {:.12}",
                psi.deriv(t)?,
                psi.inverse(u)?
            );
        }
        let report = psi.validate(1001);
        println!("  validation: {}", if report.passed() { "ok" } else { "failed" });
        for w in &report.warnings {
            println!("  warning: {w}");
        }
    }

    // Not increasing on [0, 1].
    let report = PsiSpec::parse("cos(3*t)")?.validate(101);
    println!("cos(3*t): {} violations, first: {}", report.violations.len(), report.violations[0]);
    Ok(())
}
