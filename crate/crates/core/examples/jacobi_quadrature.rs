//! Gauss–Jacobi rules and the weakly singular kernel integral.

use psifrac::gamma::gamma;
use psifrac::psi::PsiSpec;
use psifrac::quadrature::{adaptive_integral, jacobi_rule, psi_weighted_integral};

fn main() -> psifrac::Result<()> {
    let rule = jacobi_rule(5, -0.5)?;
    println!("5-node rule for (1-x)^-0.5:");
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        println!("  {x:>20.16} {w:>20.16}");
    }

    // ∫_0^1 (1-s)^(p) s^2 ds = Γ(p+1) Γ(3) / Γ(p+4)
    let psi = PsiSpec::identity();
    let p = -0.7;
    let exact = gamma(p + 1.0) * 2.0 / gamma(p + 4.0);
    for n in [4, 8, 16, 32] {
        let v = psi_weighted_integral(|s| Ok(s * s), &psi, 0.0, 1.0, p, n)?;
        println!("n = {n:>2}: {v:.16} (error {:.1e})", (v - exact).abs());
    }

    let psi = PsiSpec::parse("3*t^2")?;
    let r = adaptive_integral(|s| Ok(s.cos()), &psi, 0.0, 0.8, -0.5, 1e-12)?;
    println!("adaptive: {:.15} ± {:.1e} with {} nodes", r.value, r.est_error, r.nodes_used);
    Ok(())
}
