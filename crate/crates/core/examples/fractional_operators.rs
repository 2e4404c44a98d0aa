//! Fractional integral, Caputo and Riemann–Liouville derivatives with
//! respect to `psi`, compared with the power rule.

use psifrac::calculus::{
    power_rule, psi_caputo_derivative, psi_rl_derivative, psi_rl_integral, FracOrder, PowerRuleKind,
};
use psifrac::expr::parse;
use psifrac::psi::PsiSpec;

fn main() -> psifrac::Result<()> {
    let psi = PsiSpec::parse("3*t^2")?;
    let (a, t) = (0.0, 1.0);

    // sigma = (psi - psi(a))^(beta - 1) with beta = 2.5
    let beta = 2.5;
    let sigma = parse("(3*t^2)^1.5")?;
    for alpha in [0.5, 1.5] {
        let order = FracOrder::new(alpha)?;
        let i = psi_rl_integral(&sigma, &psi, order, a, t, 64)?;
        let c = psi_caputo_derivative(&sigma, &psi, order, a, t, 64)?;
        let d = psi_rl_derivative(&sigma, &psi, order, a, t, 64)?;
        println!("alpha = {alpha}");
        println!(
            "  integral {i:.12}  power rule {:.12}",
            power_rule(PowerRuleKind::Integral, &psi, a, t, alpha, beta)?
        );
        println!(
            "  Caputo   {c:.12}  power rule {:.12}",
            power_rule(PowerRuleKind::Caputo, &psi, a, t, alpha, beta)?
        );
        println!("  RL       {d:.12}");
    }

    // Smooth in u = psi(t), no closed form. A function like exp(t) would
    // carry a sqrt(u) term here, and its Caputo derivative of order 1.5
    // would blow up at t = 0.
    let order = FracOrder::new(1.5)?;
    let h = parse("exp(t^2) * cos(t^2)")?;
    for t in [0.25, 0.5, 1.0] {
        let c = psi_caputo_derivative(&h, &psi, order, 0.0, t, 64)?;
        println!("Caputo derivative of exp(t^2)cos(t^2) at {t}: {c:.12}");
    }
    Ok(())
}
