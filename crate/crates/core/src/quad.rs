//! One-dimensional quadrature: Gauss rules for the symmetric weights
//! (1-t²)^e on [-1, 1] and a double-exponential rule for half-lines.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_signed;

/// Nodes (ascending) and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn beta(e: f64, k: usize) -> f64 {
    let k = k as f64;
    k * (k + 2.0 * e) / (4.0 * (k + e + 0.5) * (k + e - 0.5))
}

fn moment0(e: f64) -> f64 {
    let (a, _) = ln_gamma_signed(e + 1.0).expect("e > -1");
    let (b, _) = ln_gamma_signed(e + 1.5).expect("e > -1");
    std::f64::consts::PI.sqrt() * (a - b).exp()
}

/// Orthonormal polynomials p̂_0..p̂_{n} and p̂_n' at t.
fn orthonormal_at(e: f64, n: usize, t: f64, mu0: f64) -> (Vec<f64>, f64) {
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    p[0] = 1.0 / mu0.sqrt();
    if n >= 1 {
        let b1 = beta(e, 1).sqrt();
        p[1] = t * p[0] / b1;
        dp[1] = p[0] / b1;
    }
    for k in 1..n {
        let bk1 = beta(e, k + 1).sqrt();
        let bk = beta(e, k).sqrt();
        p[k + 1] = (t * p[k] - bk * p[k - 1]) / bk1;
        dp[k + 1] = (p[k] + t * dp[k] - bk * dp[k - 1]) / bk1;
    }
    (p, dp[n])
}

/// N-point Gauss rule for the weight (1-t²)^e on [-1,1], e ≥ 0.
///
/// Golub–Welsch eigenvalues, then Newton-polished against the three-term
/// recurrence; weights are Christoffel numbers 1/Σ p̂_k(t)².
pub fn gauss_symmetric(e: f64, n: usize) -> Result<Rule1d> {
    if n == 0 {
        return Err(Error::Parameter(
            "gauss rule needs at least one node".into(),
        ));
    }
    if !(e >= 0.0) {
        return Err(Error::Parameter(format!("weight exponent {e} must be ≥ 0")));
    }
    let mu0 = moment0(e);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = beta(e, k).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Symmetrize then polish.
    for i in 0..n / 2 {
        let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -m;
        nodes[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let mut weights = vec![0.0; n];
    for (i, t) in nodes.iter_mut().enumerate() {
        if *t != 0.0 {
            for _ in 0..3 {
                let (p, dpn) = orthonormal_at(e, n, *t, mu0);
                let step = p[n] / dpn;
                *t -= step;
                if step.abs() < 1e-17 {
                    break;
                }
            }
        }
        let (p, _) = orthonormal_at(e, n, *t, mu0);
        let s: f64 = p[..n].iter().map(|v| v * v).sum();
        weights[i] = 1.0 / s;
    }
    for i in 0..n / 2 {
        let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -m;
        nodes[n - 1 - i] = m;
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let total: f64 = weights.iter().sum();
    let scale = mu0 / total;
    for w in &mut weights {
        *w *= scale;
    }
    Ok(Rule1d { nodes, weights })
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre(a: f64, b: f64, n: usize) -> Result<Rule1d> {
    let base = gauss_symmetric(0.0, n)?;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(Rule1d {
        nodes: base.nodes.iter().map(|t| mid + half * t).collect(),
        weights: base.weights.iter().map(|w| half * w).collect(),
    })
}

/// Result of an adaptive double-exponential integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeIntegral {
    pub value: f64,
    /// Difference between the last two step halvings.
    pub error_estimate: f64,
    pub levels: usize,
}

/// ∫_a^∞ f(x) dx for integrable f with at most an integrable endpoint
/// singularity at a and exponential decay at infinity.
///
/// Uses the substitution x = a + exp(π/2·sinh t) and halves the step until
/// successive estimates agree to `rel_tol`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<DeIntegral> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let eval = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        let x = u.exp();
        if !x.is_finite() || x == 0.0 {
            return 0.0;
        }
        let dx = x * half_pi * t.cosh();
        let v = f(a + x);
        if v == 0.0 || !v.is_finite() {
            0.0
        } else {
            v * dx
        }
    };
    let t_max = 4.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut prev = sum * h;
    for level in 1..=12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let cur = sum * h;
        let err = (cur - prev).abs();
        if level >= 3 && err <= rel_tol * cur.abs() {
            return Ok(DeIntegral {
                value: cur,
                error_estimate: err,
                levels: level,
            });
        }
        prev = cur;
    }
    Err(Error::Convergence(
        "double-exponential quadrature did not reach tolerance".into(),
    ))
}
