//! Quadrature for psi-weighted kernels
//! `∫_a^t psi'(s) (psi(t) - psi(s))^p sigma(s) ds`, `p > -1`.
//!
//! The substitution `u = psi(s)` turns the kernel into the Jacobi weight
//! `(U - u)^p` on `[psi(a), psi(t)]`, so the singular factor is integrated
//! exactly by a Gauss–Jacobi rule. On top of that the left end is graded with
//! `u = psi(a) + L z^m`: the weight becomes `(1-z)^p` times the smooth factor
//! `(1 + z + ... + z^(m-1))^p`, and algebraic behaviour such as
//! `(u - psi(a))^γ` or `sqrt(u)` (which appears whenever `psi'(a) = 0`)
//! turns into a smooth or high-order-vanishing function of `z`. `m = 1`
//! is the plain Gauss–Jacobi rule.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::psi::PsiSpec;

pub const MAX_NODES: usize = 512;
pub const DEFAULT_NODES: usize = 64;
/// Exponent `m` of the left-end grading `u - psi(a) ∝ z^m`.
pub const DEFAULT_GRADING: u32 = 4;

const ADAPTIVE_START: usize = 16;

/// Gauss–Jacobi rule for the weight `(1 - x)^p` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    pub n: usize,
    pub p: f64,
    /// Strictly increasing, inside `(-1, 1)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static RULE_CACHE: Lazy<RwLock<HashMap<(usize, i64), Arc<JacobiRule>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Cached Gauss–Jacobi rule; `p` is quantised to `1e-12` for the cache key.
pub fn jacobi_rule(n: usize, p: f64) -> Result<Arc<JacobiRule>> {
    check_rule_args(n, p)?;
    let key = (n, (p * 1e12).round() as i64);
    if let Some(rule) = RULE_CACHE.read().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(JacobiRule::compute(n, p)?);
    let mut cache = RULE_CACHE.write().expect("rule cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(rule)))
}

fn check_rule_args(n: usize, p: f64) -> Result<()> {
    if !(p > -1.0 && p.is_finite()) {
        return Err(Error::input(format!("Jacobi exponent must exceed -1, got {p}")));
    }
    if n == 0 || n > MAX_NODES {
        return Err(Error::input(format!(
            "node count must lie in 1..={MAX_NODES}, got {n}"
        )));
    }
    Ok(())
}

/// Three-term recurrence of the monic Jacobi polynomials for `(1-x)^a (1+x)^b`:
/// diagonal `alpha_k` (k = 0..n) and squared off-diagonal `beta_k` (k = 1..=n).
fn recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = Vec::with_capacity(n);
    let mut off2 = vec![0.0; n + 1];
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let d = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        diag.push(d);
    }
    for (k, slot) in off2.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        *slot = 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    (diag, off2)
}

/// Eigenvalues of the symmetric tridiagonal matrix (implicit QL with Wilkinson
/// shifts). `off[i]` couples rows `i` and `i+1`.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::numerical("tridiagonal QL iteration did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

impl JacobiRule {
    /// Golub–Welsch construction: nodes are eigenvalues of the Jacobi matrix,
    /// polished by Newton on the orthonormal recurrence; weights come from the
    /// Christoffel function `1 / Σ p_k(x)^2`.
    pub fn compute(n: usize, p: f64) -> Result<Self> {
        check_rule_args(n, p)?;
        let (diag, off2) = recurrence(n, p, 0.0);
        let off: Vec<f64> = off2[1..].iter().map(|b| b.sqrt()).collect();
        let mut nodes = tridiagonal_eigenvalues(diag.clone(), &off)?;
        let mu0 = ((p + 1.0) * std::f64::consts::LN_2 - (p + 1.0).ln()).exp();

        // orthonormal recurrence: sqrt(b_{k+1}) p_{k+1} = (x - a_k) p_k - sqrt(b_k) p_{k-1}
        let eval = |x: f64| -> (f64, f64, f64) {
            let mut p_prev = 0.0;
            let mut p_cur = 1.0 / mu0.sqrt();
            let mut dp_prev = 0.0;
            let mut dp_cur = 0.0;
            let mut sum_sq = p_cur * p_cur;
            for k in 0..n {
                let sb_k = if k == 0 { 0.0 } else { off[k - 1] };
                let sb_next = off2[k + 1].sqrt();
                let p_next = ((x - diag[k]) * p_cur - sb_k * p_prev) / sb_next;
                let dp_next = (p_cur + (x - diag[k]) * dp_cur - sb_k * dp_prev) / sb_next;
                p_prev = p_cur;
                p_cur = p_next;
                dp_prev = dp_cur;
                dp_cur = dp_next;
                if k + 1 < n {
                    sum_sq += p_cur * p_cur;
                }
            }
            (p_cur, dp_cur, sum_sq)
        };

        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (pn, dpn, _) = eval(*x);
                if dpn == 0.0 || !dpn.is_finite() {
                    break;
                }
                let step = pn / dpn;
                let next = *x - step;
                if !(next > -1.0 && next < 1.0) {
                    break;
                }
                *x = next;
                if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) {
                    break;
                }
            }
            let (_, _, sum_sq) = eval(*x);
            weights.push(1.0 / sum_sq);
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::numerical(format!(
                "Jacobi nodes not strictly increasing (n = {n}, p = {p})"
            )));
        }
        Ok(JacobiRule {
            n,
            p,
            nodes,
            weights,
        })
    }

    /// `∫_{-1}^{1} (1-x)^p dx = 2^(p+1) / (p+1)`.
    pub fn weight_mass(p: f64) -> f64 {
        ((p + 1.0) * std::f64::consts::LN_2 - (p + 1.0).ln()).exp()
    }
}

/// Quadrature rule already mapped to `s`-space for one kernel integral:
/// `∫_a^t psi'(s)(psi(t)-psi(s))^p sigma(s) ds ≈ Σ weights[i] sigma(points[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl KernelRule {
    pub fn new(psi: &PsiSpec, a: f64, t: f64, p: f64, n: usize) -> Result<Self> {
        Self::with_grading(psi, a, t, p, n, DEFAULT_GRADING)
    }

    pub fn with_grading(
        psi: &PsiSpec,
        a: f64,
        t: f64,
        p: f64,
        n: usize,
        grading: u32,
    ) -> Result<Self> {
        if t < a {
            return Err(Error::input(format!("upper limit {t} below lower limit {a}")));
        }
        if grading == 0 {
            return Err(Error::input("grading exponent must be at least 1"));
        }
        let rule = jacobi_rule(n, p)?;
        let u0 = psi.eval(a)?;
        let u1 = psi.eval(t)?;
        let len = u1 - u0;
        if len <= 0.0 {
            return Ok(KernelRule {
                points: Vec::new(),
                weights: Vec::new(),
            });
        }
        let m = grading as i32;
        let mf = grading as f64;
        // ∫_0^1 (1-z)^p G(z) dz ≈ Σ w_i / 2^(p+1) G(z_i), then u = u0 + len * v
        let rescale = (0.5 * len).powf(p + 1.0);
        let mut points = Vec::with_capacity(rule.n);
        let mut weights = Vec::with_capacity(rule.n);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let z = 0.5 * (1.0 + x);
            let (v, jac) = if m == 1 {
                (z, 1.0)
            } else {
                let geometric: f64 = (0..m).map(|j| z.powi(j)).sum();
                (z.powi(m), mf * z.powi(m - 1) * geometric.powf(p))
            };
            let u = (u0 + len * v).min(u1);
            points.push(psi.inverse(u)?);
            weights.push(rescale * w * jac);
        }
        Ok(KernelRule { points, weights })
    }

    /// Applies the rule; summation runs in ascending node order.
    pub fn apply<F>(&self, mut sigma: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut acc = 0.0;
        for (&s, &w) in self.points.iter().zip(&self.weights) {
            acc += w * sigma(s)?;
        }
        Ok(acc)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `∫_a^t psi'(s)(psi(t)-psi(s))^p sigma(s) ds` with an `n`-node graded
/// Gauss–Jacobi rule. `sigma` is only sampled strictly inside `(a, t)`.
pub fn psi_weighted_integral<F>(sigma: F, psi: &PsiSpec, a: f64, t: f64, p: f64, n: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    KernelRule::new(psi, a, t, p, n)?.apply(sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveIntegral {
    pub value: f64,
    pub est_error: f64,
    pub nodes_used: usize,
}

/// Doubles the node count from 16 up to 512 until two consecutive values
/// agree to `rel_tol * max(1, |I_2n|)`.
pub fn adaptive_integral<F>(
    mut sigma: F,
    psi: &PsiSpec,
    a: f64,
    t: f64,
    p: f64,
    rel_tol: f64,
) -> Result<AdaptiveIntegral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::input(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let mut n = ADAPTIVE_START;
    let mut prev = psi_weighted_integral(&mut sigma, psi, a, t, p, n)?;
    let mut diff = f64::INFINITY;
    while 2 * n <= MAX_NODES {
        n *= 2;
        let next = psi_weighted_integral(&mut sigma, psi, a, t, p, n)?;
        diff = (next - prev).abs();
        if diff <= rel_tol * next.abs().max(1.0) {
            return Ok(AdaptiveIntegral {
                value: next,
                est_error: diff,
                nodes_used: n,
            });
        }
        prev = next;
    }
    Err(Error::QuadratureConvergence {
        best: prev,
        last_diff: diff,
        rel_tol,
    })
}
