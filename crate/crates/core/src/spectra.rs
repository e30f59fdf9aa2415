//! Closed-form spectra of the model operators on the round sphere S^n.
//!
//! Integer-parameter formulas are exact (`BigInt`/`BigRational`); only the
//! Knapp–Stein family with a real exponent p is evaluated in floating point.
//! The Laplacian is the nonnegative one, so every table below starts at its
//! smallest eigenvalue.

use std::fmt::Write as _;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{rat, rat_to_f64, RatPoly};
use crate::specfun::gamma_ratio;

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k || n < 0 {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * big(n - i) / big(i + 1);
    }
    acc
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * big(i))
}

/// dim H^k(ℝ^p), the space of degree-k harmonic polynomials on ℝ^p.
pub fn harmonic_dim(p: u32, k: u32) -> BigInt {
    let (p, k) = (p as i64, k as i64);
    match p {
        0 => BigInt::zero(),
        1 => {
            if k <= 1 {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        }
        2 => {
            if k == 0 {
                BigInt::one()
            } else {
                big(2)
            }
        }
        _ => binom(k + p - 1, p - 1) - binom(k + p - 3, p - 1),
    }
}

/// `harmonic_dim` as a machine integer (saturating).
pub fn harmonic_dim_u64(p: u32, k: u32) -> u64 {
    harmonic_dim(p, k).to_u64().unwrap_or(u64::MAX)
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Parameter(format!(
            "sphere dimension n = {n} must be ≥ 2"
        )));
    }
    Ok(())
}

/// k(k+n-1).
pub fn laplace_eigenvalue(n: u32, k: u32) -> BigInt {
    let (n, k) = (n as i64, k as i64);
    big(k) * big(k + n - 1)
}

/// (k + (n-2)/2)(k + n/2) = k(k+n-1) + n(n-2)/4.
pub fn yamabe_eigenvalue(n: u32, k: u32) -> BigRational {
    let (n, k) = (n as i64, k as i64);
    rat(2 * k + n - 2, 2) * rat(2 * k + n, 2)
}

fn check_gjms(n: u32, r: u32) -> Result<()> {
    check_n(n)?;
    if r == 0 {
        return Err(Error::Parameter("GJMS order r must be ≥ 1".into()));
    }
    if n % 2 == 0 && r > n / 2 {
        return Err(Error::Parameter(format!(
            "in even dimension n = {n} the GJMS order r = {r} must satisfy r ≤ n/2"
        )));
    }
    Ok(())
}

/// Eigenvalue polynomial Π_{j=-r}^{r-1} (k + n/2 + j) of the unnormalized GJMS operator.
fn gjms_poly(n: u32, r: u32) -> RatPoly {
    let mut p = RatPoly::one();
    for j in -(r as i64)..(r as i64) {
        p = p.mul(&RatPoly::linear(rat(n as i64 + 2 * j, 2)));
    }
    p
}

/// Γ(k + n/2 + r)/Γ(k + n/2 - r), exact. Zero when the denominator argument
/// is a pole.
pub fn gjms_eigenvalue(n: u32, r: u32, k: u32) -> Result<BigRational> {
    check_gjms(n, r)?;
    Ok(gjms_poly(n, r).eval_int(k as i64))
}

/// The separate normalization constant Γ(n/2 - r)/Γ(n/2 + r); a pole error
/// at the critical order r = n/2.
pub fn gjms_normalization(n: u32, r: u32) -> Result<f64> {
    check_gjms(n, r)?;
    let h = n as f64 / 2.0;
    gamma_ratio(h - r as f64, h + r as f64)
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || !(1.0..2.0).contains(&p) {
        return Err(Error::Parameter(format!(
            "exponent p = {p} must lie in [1, 2)"
        )));
    }
    Ok(())
}

/// Eigenvalue γ_k of the normalized Knapp–Stein operator, 1 < p < 2.
pub fn knapp_stein_gamma(n: u32, p: f64, k: u32) -> Result<f64> {
    check_n(n)?;
    check_p(p)?;
    if p == 1.0 {
        return Err(Error::Parameter(
            "knapp_stein_gamma needs p > 1 (dual exponent infinite at p = 1)".into(),
        ));
    }
    let nf = n as f64;
    let np = nf / p;
    let nq = nf * (1.0 - 1.0 / p);
    let mut g = 1.0;
    for i in 0..k {
        g *= (nq + i as f64) / (np + i as f64);
    }
    Ok(g)
}

/// The sharp HLS constant A_p for 1 ≤ p < 2.
pub fn hls_constant(n: u32, p: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Parameter("dimension must be ≥ 1".into()));
    }
    if p >= 2.0 && p.is_finite() {
        return Err(Error::Range(format!(
            "A_p is unbounded as p → 2 (got p = {p})"
        )));
    }
    check_p(p)?;
    let nf = n as f64;
    let inv_dual = 1.0 - 1.0 / p;
    let first = gamma_ratio(nf * (1.0 / p - 0.5), nf / p)?;
    let second = gamma_ratio(nf / 2.0, nf)?;
    Ok(std::f64::consts::PI.powf(nf * inv_dual) * first * second.powf(1.0 - 2.0 / p))
}

/// Δ_k(n) = (n/2) Σ_{l<k} 1/(n/2 + l), exact.
pub fn log_sobolev_coeff(n: u32, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Parameter("log_sobolev_coeff needs k ≥ 1".into()));
    }
    let mut acc = BigRational::zero();
    for l in 0..k as i64 {
        acc += rat(n as i64, n as i64 + 2 * l);
    }
    Ok(acc)
}

/// Γ(n+j+2)Γ(n+q-1)/(Γ(j+2)Γ(q-1)); zero for q ∈ {0, 1}.
pub fn universal_hessian_eigenvalue(n: u32, j: u32, q: u32) -> Result<BigInt> {
    if n < 4 {
        return Err(Error::Parameter(format!(
            "universal Hessian needs n ≥ 4, got {n}"
        )));
    }
    if q > 2 {
        return Err(Error::Parameter(format!("q = {q} must be 0, 1 or 2")));
    }
    if q < 2 {
        return Ok(BigInt::zero());
    }
    let (n, j, q) = (n as i64, j as i64, q as i64);
    Ok(factorial(n + j + 1) / factorial(j + 1) * factorial(n + q - 2) / factorial(q - 2))
}

fn check_even(n: u32) -> Result<()> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::Parameter(format!(
            "Helmholtz numbers need even n ≥ 4, got {n}"
        )));
    }
    Ok(())
}

/// λ_l = l(l+n-1) for l = -1, …, -(n/2 - 1).
pub fn helmholtz_numbers(n: u32) -> Result<Vec<BigInt>> {
    check_even(n)?;
    let m = (n / 2 - 1) as i64;
    let n = n as i64;
    Ok((1..=m).map(|i| big(-i) * big(n - 1 - i)).collect())
}

/// Integer coefficients (ascending) of Π (x + λ_l).
pub fn gjms_factorization_poly(n: u32) -> Result<Vec<BigInt>> {
    let mut p = RatPoly::one();
    for l in helmholtz_numbers(n)? {
        p = p.mul(&RatPoly::linear(BigRational::from_integer(l)));
    }
    Ok(p.coeffs().iter().map(|c| c.to_integer()).collect())
}

/// Which model operator a table describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    Laplace,
    Yamabe,
    Gjms { r: u32 },
    KnappStein { p: f64 },
}

/// An operator kind together with the sphere dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelOperator {
    pub kind: OperatorKind,
    pub n: u32,
}

impl ModelOperator {
    pub fn new(kind: OperatorKind, n: u32) -> Result<Self> {
        check_n(n)?;
        match kind {
            OperatorKind::Gjms { r } => check_gjms(n, r)?,
            OperatorKind::KnappStein { p } => {
                check_p(p)?;
                if p == 1.0 {
                    return Err(Error::Parameter("Knapp–Stein table needs p > 1".into()));
                }
            }
            _ => {}
        }
        Ok(ModelOperator { kind, n })
    }

    pub fn laplace(n: u32) -> Result<Self> {
        Self::new(OperatorKind::Laplace, n)
    }

    pub fn yamabe(n: u32) -> Result<Self> {
        Self::new(OperatorKind::Yamabe, n)
    }

    /// Order d of the operator (for the heat exponents t^{(2i-n)/d}).
    pub fn order(&self) -> u32 {
        match self.kind {
            OperatorKind::Laplace | OperatorKind::Yamabe => 2,
            OperatorKind::Gjms { r } => 2 * r,
            OperatorKind::KnappStein { .. } => 0,
        }
    }

    /// Eigenvalue polynomial in k, if the spectrum is polynomial.
    pub fn eigen_poly(&self) -> Option<RatPoly> {
        let n = self.n as i64;
        match self.kind {
            OperatorKind::Laplace => Some(RatPoly::new(vec![
                BigRational::zero(),
                rat(n - 1, 1),
                BigRational::one(),
            ])),
            OperatorKind::Yamabe => {
                Some(RatPoly::linear(rat(n - 2, 2)).mul(&RatPoly::linear(rat(n, 2))))
            }
            OperatorKind::Gjms { r } => Some(gjms_poly(self.n, r)),
            OperatorKind::KnappStein { .. } => None,
        }
    }

    /// Multiplicity polynomial dim H^k(ℝ^{n+1}) = C(k+n,n) - C(k+n-2,n), valid for all k ≥ 0.
    pub fn multiplicity_poly(&self) -> RatPoly {
        let n = self.n as i64;
        let mut a = RatPoly::one();
        let mut b = RatPoly::one();
        for i in 1..=n {
            a = a.mul(&RatPoly::linear(rat(i, 1)));
            b = b.mul(&RatPoly::linear(rat(i - 2, 1)));
        }
        a.sub(&b)
            .scale(&BigRational::from_integer(factorial(n)).recip())
    }

    pub fn eigenvalue_exact(&self, k: u32) -> Option<BigRational> {
        self.eigen_poly().map(|p| p.eval_int(k as i64))
    }

    pub fn eigenvalue(&self, k: u32) -> f64 {
        match self.kind {
            OperatorKind::KnappStein { p } => {
                knapp_stein_gamma(self.n, p, k).expect("validated at construction")
            }
            _ => rat_to_f64(&self.eigenvalue_exact(k).expect("polynomial spectrum")),
        }
    }

    pub fn multiplicity(&self, k: u32) -> BigInt {
        harmonic_dim(self.n + 1, k)
    }

    pub fn label(&self) -> String {
        match self.kind {
            OperatorKind::Laplace => format!("laplace(S^{})", self.n),
            OperatorKind::Yamabe => format!("yamabe(S^{})", self.n),
            OperatorKind::Gjms { r } => format!("gjms(S^{}, r={r})", self.n),
            OperatorKind::KnappStein { p } => format!("knapp_stein(S^{}, p={p})", self.n),
        }
    }
}

/// One line of a spectrum table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumLine {
    pub k: u32,
    pub eigenvalue: f64,
    pub exact: Option<BigRational>,
    pub multiplicity: BigInt,
}

/// Eigenvalues and multiplicities for degrees 0..=k_max.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub operator: ModelOperator,
    pub k_max: u32,
    pub lines: Vec<SpectrumLine>,
}

/// Render an exact rational as "a" or "a/b".
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl SpectrumTable {
    /// CSV with header `k,eigenvalue,multiplicity`.
    pub fn to_csv(&self, exact: bool) -> String {
        let mut out = String::from("k,eigenvalue,multiplicity\n");
        for l in &self.lines {
            let eig = match (&l.exact, exact) {
                (Some(e), true) => format_rational(e),
                _ => format!("{:.16e}", l.eigenvalue),
            };
            let _ = writeln!(out, "{},{},{}", l.k, eig, l.multiplicity);
        }
        out
    }

    /// True when eigenvalues never decrease with k.
    pub fn is_nondecreasing(&self) -> bool {
        self.lines
            .windows(2)
            .all(|w| match (&w[0].exact, &w[1].exact) {
                (Some(a), Some(b)) => a <= b,
                _ => w[0].eigenvalue <= w[1].eigenvalue,
            })
    }

    /// True when every eigenvalue is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lines.iter().all(|l| match &l.exact {
            Some(e) => e.is_positive(),
            None => l.eigenvalue > 0.0,
        })
    }
}

pub fn spectrum_table(op: ModelOperator, k_max: u32) -> SpectrumTable {
    let lines = (0..=k_max)
        .map(|k| SpectrumLine {
            k,
            eigenvalue: op.eigenvalue(k),
            exact: op.eigenvalue_exact(k),
            multiplicity: op.multiplicity(k),
        })
        .collect();
    SpectrumTable {
        operator: op,
        k_max,
        lines,
    }
}
