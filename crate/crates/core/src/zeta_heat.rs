//! Heat traces, small-time coefficient fits, closed-form heat invariants and
//! the analytically continued spectral zeta function of polynomial spectra.
//!
//! A spectrum here is a pair of polynomials in the degree k: eigenvalue λ(k)
//! and multiplicity m(k). The zeta function is split at a cutoff N into a
//! head sum and a tail; the tail is written by Euler–Maclaurin as
//! `∫_N^∞ f + f(N)/2 - Σ_j B_{2j}/(2j)! f^{(2j-1)}(N)` with
//! `f(x) = m(x) λ(x)^{-s}`. Expanding `f` in v = 1/x,
//! `f(x) = lead^{-s} Σ_i c_i(s) x^{β_i - 1 - Ds}` with `β_i = e + 1 - i`
//! (e = deg m, D = deg λ), the integral becomes
//! `lead^{-s} Σ_i c_i(s) N^{β_i - Ds}/(Ds - β_i)`, which is meromorphic in s.
//! All quantities are carried as second-order jets in s so that ζ(s₀) and
//! ζ'(s₀) come out of the same expression.

use nalgebra::{DMatrix, DVector};
use num::{BigRational, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{rat_to_f64, RatPoly};
use crate::spectra::{ModelOperator, OperatorKind};
use crate::sphere::{compensated_sum, sphere_volume};

/// Truncated Taylor expansion a + b ε + c ε² around a base point s₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        a: 0.0,
        b: 0.0,
        c: 0.0,
    };

    pub fn constant(a: f64) -> Self {
        Jet { a, b: 0.0, c: 0.0 }
    }

    /// The variable s itself around s₀.
    pub fn variable(s0: f64) -> Self {
        Jet {
            a: s0,
            b: 1.0,
            c: 0.0,
        }
    }

    pub fn add(self, o: Jet) -> Jet {
        Jet {
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
        }
    }

    pub fn sub(self, o: Jet) -> Jet {
        Jet {
            a: self.a - o.a,
            b: self.b - o.b,
            c: self.c - o.c,
        }
    }

    pub fn mul(self, o: Jet) -> Jet {
        Jet {
            a: self.a * o.a,
            b: self.a * o.b + self.b * o.a,
            c: self.a * o.c + self.b * o.b + self.c * o.a,
        }
    }

    pub fn scale(self, k: f64) -> Jet {
        Jet {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
        }
    }

    pub fn exp(self) -> Jet {
        let e = self.a.exp();
        Jet {
            a: e,
            b: e * self.b,
            c: e * (self.c + 0.5 * self.b * self.b),
        }
    }

    pub fn div(self, o: Jet) -> Jet {
        let q0 = self.a / o.a;
        let q1 = (self.b - q0 * o.b) / o.a;
        let q2 = (self.c - q0 * o.c - q1 * o.b) / o.a;
        Jet {
            a: q0,
            b: q1,
            c: q2,
        }
    }

    /// Divide by ε, dropping the (vanishing) constant part.
    fn shift_down(self) -> Jet {
        Jet {
            a: self.b,
            b: self.c,
            c: 0.0,
        }
    }
}

/// Eigenvalue and multiplicity polynomials in the degree variable k ≥ k_start.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySpectrum {
    pub label: String,
    pub eigen: RatPoly,
    pub mult: RatPoly,
    pub k_start: u32,
    eigen_f: Vec<f64>,
    mult_f: Vec<f64>,
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

impl PolySpectrum {
    pub fn from_operator(op: &ModelOperator) -> Result<Self> {
        let eigen = op.eigen_poly().ok_or_else(|| {
            Error::Continuation(format!(
                "{} has a non-polynomial spectrum; only model tables with polynomial eigenvalues are supported",
                op.label()
            ))
        })?;
        Ok(Self::custom(&op.label(), eigen, op.multiplicity_poly(), 0))
    }

    pub fn custom(label: &str, eigen: RatPoly, mult: RatPoly, k_start: u32) -> Self {
        PolySpectrum {
            label: label.to_string(),
            eigen_f: eigen.to_f64(),
            mult_f: mult.to_f64(),
            eigen,
            mult,
            k_start,
        }
    }

    pub fn eigenvalue(&self, k: u32) -> f64 {
        horner(&self.eigen_f, k as f64)
    }

    pub fn multiplicity(&self, k: u32) -> f64 {
        horner(&self.mult_f, k as f64)
    }

    /// Degrees with λ(k) = 0 at the bottom of the spectrum and their total
    /// multiplicity; returns (first positive degree, kernel dimension).
    fn split_kernel(&self) -> (u32, u64) {
        let mut k = self.k_start;
        let mut dim = 0u64;
        while self.eigen.eval_int(k as i64).is_zero() {
            dim += rat_to_f64(&self.mult.eval_int(k as i64)) as u64;
            k += 1;
            if k > self.k_start + 64 {
                break;
            }
        }
        (k, dim)
    }

    /// Bound on the moduli of the roots of λ (Cauchy).
    fn root_bound(&self) -> f64 {
        let c = self.eigen.to_f64();
        let lead = *c.last().unwrap();
        1.0 + c[..c.len() - 1]
            .iter()
            .map(|v| (v / lead).abs())
            .fold(0.0, f64::max)
    }
}

/// Sum of m(k) e^{-tλ(k)} over all degrees (kernel modes included).
pub fn heat_trace(spec: &PolySpectrum, t: f64) -> Result<f64> {
    heat_trace_capped(spec, t, 50_000_000)
}

pub fn heat_trace_capped(spec: &PolySpectrum, t: f64, cap: u64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("heat trace needs t > 0, got {t}")));
    }
    if spec.eigen.degree() == 0 || !spec.eigen.leading().is_positive() {
        return Err(Error::Continuation(
            "heat trace needs an eigenvalue polynomial with positive leading term".into(),
        ));
    }
    let mut terms = Vec::new();
    let mut total = 0.0f64;
    let mut prev = f64::INFINITY;
    let mut k = spec.k_start;
    loop {
        let term = spec.multiplicity(k) * (-t * spec.eigenvalue(k)).exp();
        terms.push(term);
        total += term;
        // Once terms decrease geometrically the tail is below term·r/(1-r).
        if term < prev && term > 0.0 && prev.is_finite() {
            let r = term / prev;
            if r < 0.9 && term * r / (1.0 - r) < 1e-17 * total.abs() {
                break;
            }
        }
        if term == 0.0 && k > spec.k_start + 10 && prev == 0.0 {
            break;
        }
        prev = term;
        k += 1;
        if (k - spec.k_start) as u64 > cap {
            return Err(Error::Convergence(format!(
                "heat trace at t = {t} needs more than {cap} terms"
            )));
        }
    }
    Ok(compensated_sum(terms))
}

/// Which exponents enter the small-time fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerFamily {
    /// t^{(2i-n)/d}: the generic heat expansion.
    Even,
    /// t^{(j-n)/d} for every j, used to test that odd-j terms vanish.
    All,
}

/// Geometric grid and model size for a heat-coefficient fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub terms: usize,
    pub family: PowerFamily,
}

impl FitGrid {
    /// Defaults tuned for the model spectra on low-dimensional spheres. The
    /// full family starts lower so the extra half-integer columns stay resolved.
    pub fn default_for(family: PowerFamily) -> Self {
        match family {
            PowerFamily::Even => FitGrid {
                t_min: 0.01,
                t_max: 0.25,
                points: 80,
                terms: 9,
                family,
            },
            PowerFamily::All => FitGrid {
                t_min: 0.002,
                t_max: 0.25,
                points: 120,
                terms: 12,
                family,
            },
        }
    }
}

/// One fitted coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedCoefficient {
    pub power: f64,
    pub value: f64,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatFitReport {
    pub operator: String,
    pub n: u32,
    pub d: u32,
    pub coefficients: Vec<FittedCoefficient>,
    pub residual: f64,
    pub grid: FitGrid,
    pub t_grid: Vec<f64>,
}

impl HeatFitReport {
    /// Coefficient of t^power, if it is part of the fit.
    pub fn coefficient(&self, power: f64) -> Option<FittedCoefficient> {
        self.coefficients
            .iter()
            .copied()
            .find(|c| (c.power - power).abs() < 1e-12)
    }
}

fn fit_once(
    spec: &PolySpectrum,
    n: u32,
    d: u32,
    grid: &FitGrid,
) -> Result<(Vec<f64>, Vec<f64>, f64, Vec<f64>)> {
    if !(grid.t_min > 0.0 && grid.t_max > grid.t_min) || grid.points < grid.terms + 2 {
        return Err(Error::Parameter("invalid heat-fit grid".into()));
    }
    let step = match grid.family {
        PowerFamily::Even => 2,
        PowerFamily::All => 1,
    };
    let exps: Vec<f64> = (0..grid.terms)
        .map(|i| (step * i) as f64 / d as f64)
        .collect();
    let ts: Vec<f64> = (0..grid.points)
        .map(|i| {
            let f = i as f64 / (grid.points - 1) as f64;
            grid.t_min * (grid.t_max / grid.t_min).powf(f)
        })
        .collect();
    let shift = n as f64 / d as f64;
    let mut rhs = DVector::<f64>::zeros(ts.len());
    let mut a = DMatrix::<f64>::zeros(ts.len(), exps.len());
    for (r, t) in ts.iter().enumerate() {
        rhs[r] = heat_trace(spec, *t)? * t.powf(shift);
        for (c, e) in exps.iter().enumerate() {
            // columns scaled by t_max^{-e} so they are O(1)
            a[(r, c)] = (t / grid.t_max).powf(*e);
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-14 * smax) {
        return Err(Error::IllConditioned(format!(
            "heat-fit design matrix is rank deficient (σ_min/σ_max = {:.3e})",
            smin / smax
        )));
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let resid = (&a * &sol - &rhs).norm() / rhs.norm();
    let coeffs: Vec<f64> = exps
        .iter()
        .zip(sol.iter())
        .map(|(e, v)| v / grid.t_max.powf(*e))
        .collect();
    let powers = exps.iter().map(|e| e - shift).collect();
    Ok((powers, coeffs, resid, ts))
}

/// Least-squares fit of the heat trace against its known power family.
/// Uncertainties are the largest change under one extra term and under a
/// doubled grid density.
pub fn heat_coefficients_fit(
    spec: &PolySpectrum,
    n: u32,
    d: u32,
    grid: FitGrid,
) -> Result<HeatFitReport> {
    let (powers, base, residual, ts) = fit_once(spec, n, d, &grid)?;
    let more = FitGrid {
        terms: grid.terms + 1,
        ..grid
    };
    let (_, c_more, _, _) = fit_once(spec, n, d, &more)?;
    let dense = FitGrid {
        points: grid.points * 2,
        ..grid
    };
    let (_, c_dense, _, _) = fit_once(spec, n, d, &dense)?;
    let coefficients = powers
        .iter()
        .enumerate()
        .map(|(i, p)| FittedCoefficient {
            power: *p,
            value: base[i],
            uncertainty: (base[i] - c_more[i])
                .abs()
                .max((base[i] - c_dense[i]).abs()),
        })
        .collect();
    Ok(HeatFitReport {
        operator: spec.label.clone(),
        n,
        d,
        coefficients,
        residual,
        grid,
        t_grid: ts,
    })
}

/// (K, |r|², |R|², ΔK) of the unit round sphere.
pub fn round_sphere_curvature(n: u32) -> (f64, f64, f64, f64) {
    let n = n as f64;
    (
        n * (n - 1.0),
        n * (n - 1.0).powi(2),
        2.0 * n * (n - 1.0),
        0.0,
    )
}

/// Local heat invariant U_i of Δ + aK for i ≤ 2.
pub fn heat_invariant_u(i: u32, n: u32, a: f64, curvature: (f64, f64, f64, f64)) -> Result<f64> {
    let pref = (4.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0);
    let (k, r2, rr2, lap_k) = curvature;
    match i {
        0 => Ok(pref),
        1 => Ok(pref * (1.0 / 6.0 - a) * k),
        2 => Ok(pref / 180.0
            * (90.0 * (1.0 / 6.0 - a).powi(2) * k * k - r2 + rr2 - 30.0 * (0.2 - a) * lap_k)),
        _ => Err(Error::Parameter(format!(
            "heat invariant U_{i} not available (i ≤ 2)"
        ))),
    }
}

/// ∫_{S^n} U_i over the unit round sphere.
pub fn integrated_invariant(i: u32, n: u32, a: f64) -> Result<f64> {
    Ok(heat_invariant_u(i, n, a, round_sphere_curvature(n))? * sphere_volume(n))
}

/// The curvature coefficient a of an operator Δ + aK.
pub fn curvature_coefficient(op: &ModelOperator) -> Option<f64> {
    let n = op.n as f64;
    match op.kind {
        OperatorKind::Laplace => Some(0.0),
        OperatorKind::Yamabe => Some((n - 2.0) / (4.0 * (n - 1.0))),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValue {
    pub s: f64,
    pub value: f64,
    /// dζ/ds at s.
    pub derivative: f64,
    pub kernel_dimension: u64,
    /// Size of the last Euler–Maclaurin correction used.
    pub remainder_bound: f64,
}

/// Knobs for the continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaOptions {
    /// Minimum head cutoff; raised automatically relative to the root bound.
    pub min_cutoff: u32,
    /// Euler–Maclaurin correction pairs.
    pub em_terms: usize,
    /// Terms in the 1/x expansion of the integral tail.
    pub tail_terms: usize,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions {
            min_cutoff: 24,
            em_terms: 8,
            tail_terms: 48,
        }
    }
}

/// B_{2j} for j = 1..=12.
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

fn series_log1p(q: &[f64], len: usize) -> Vec<f64> {
    // ln(1 + q(v)) with q_0 = 0
    let qk = |k: usize| if k < q.len() { q[k] } else { 0.0 };
    let mut l = vec![0.0; len];
    for k in 1..len {
        let mut acc = qk(k) * k as f64;
        for j in 1..k {
            acc -= j as f64 * l[j] * qk(k - j);
        }
        l[k] = acc / k as f64;
    }
    l
}

fn series_exp(g: &[Jet]) -> Vec<Jet> {
    let len = g.len();
    let mut e = vec![Jet::ZERO; len];
    e[0] = g[0].exp();
    for k in 1..len {
        let mut acc = Jet::ZERO;
        for j in 1..=k {
            acc = acc.add(g[j].mul(e[k - j]).scale(j as f64));
        }
        e[k] = acc.scale(1.0 / k as f64);
    }
    e
}

/// Taylor coefficients of p(x0 + h) in h.
fn shift_poly(p: &RatPoly, x0: i64) -> Vec<f64> {
    let x = BigRational::from_integer(x0.into());
    let mut w: Vec<BigRational> = p.coeffs().to_vec();
    let len = w.len();
    for i in 0..len {
        for j in (i..len.saturating_sub(1)).rev() {
            let next = &x * &w[j + 1];
            w[j] += next;
        }
    }
    let out = w;
    out.iter().map(rat_to_f64).collect()
}

fn zeta_jet(spec: &PolySpectrum, s: Jet, opts: &ZetaOptions) -> Result<(Jet, u64, f64)> {
    let d = spec.eigen.degree();
    if d == 0 || !spec.eigen.leading().is_positive() {
        return Err(Error::Continuation(
            "zeta continuation needs a non-constant eigenvalue polynomial with positive leading term".into(),
        ));
    }
    let e = spec.mult.degree();
    let (k0, kernel) = spec.split_kernel();
    let bound = spec.root_bound();
    let cutoff = (opts.min_cutoff as f64).max((8.0 * bound).ceil()) as u32;
    let cutoff = cutoff.max(k0 + 1);

    // Head.
    let mut head = Vec::with_capacity((cutoff - k0) as usize);
    for k in k0..cutoff {
        let lam = spec.eigenvalue(k);
        if !(lam > 0.0) {
            return Err(Error::Continuation(format!(
                "eigenvalue at k = {k} is {lam}; spectrum must be positive after removing the kernel"
            )));
        }
        let m = spec.multiplicity(k);
        head.push(s.scale(-lam.ln()).exp().scale(m));
    }
    let head = Jet {
        a: compensated_sum(head.iter().map(|j| j.a)),
        b: compensated_sum(head.iter().map(|j| j.b)),
        c: compensated_sum(head.iter().map(|j| j.c)),
    };

    // Integral tail via the 1/x expansion.
    let lam = spec.eigen.to_f64();
    let lead = lam[d];
    // λ(x) = lead x^D (1 + q(v)), q_i = lam[D-i]/lead
    let q: Vec<f64> = (0..=d)
        .map(|i| if i == 0 { 0.0 } else { lam[d - i] / lead })
        .collect();
    let mu = spec.mult.to_f64();
    // m(x) = x^e M(v), M_i = mu[e-i]
    let mpoly: Vec<f64> = (0..=e).map(|i| mu[e - i]).collect();
    let len = opts.tail_terms;
    let lg = series_log1p(&q, len);
    let g: Vec<Jet> = lg.iter().map(|l| s.scale(-l)).collect();
    let ex = series_exp(&g);
    let mut c = vec![Jet::ZERO; len];
    for (i, ci) in c.iter_mut().enumerate() {
        for (j, mj) in mpoly.iter().enumerate() {
            if j <= i {
                *ci = ci.add(ex[i - j].scale(*mj));
            }
        }
    }
    let nf = cutoff as f64;
    let ln_n = nf.ln();
    let lead_pow = s.scale(-lead.ln()).exp();
    let mut tail = Jet::ZERO;
    for (i, ci) in c.iter().enumerate() {
        let beta = e as f64 + 1.0 - i as f64;
        let npow = s.scale(-(d as f64) * ln_n).exp().scale(nf.powf(beta));
        let denom = s.scale(d as f64).sub(Jet::constant(beta));
        let term = if denom.a == 0.0 {
            if ci.a != 0.0 {
                return Err(Error::Continuation(format!(
                    "zeta has a pole at s = {}",
                    beta / d as f64
                )));
            }
            ci.shift_down().mul(npow).scale(1.0 / d as f64)
        } else {
            ci.mul(npow).div(denom)
        };
        tail = tail.add(term);
    }
    let tail = tail.mul(lead_pow);

    // Euler–Maclaurin corrections at N.
    let order = 2 * opts.em_terms + 1;
    let lam_shift = shift_poly(&spec.eigen, cutoff as i64);
    let m_shift = shift_poly(&spec.mult, cutoff as i64);
    let lam0 = lam_shift[0];
    let rel: Vec<f64> = (0..=order)
        .map(|j| {
            if j == 0 || j >= lam_shift.len() {
                0.0
            } else {
                lam_shift[j] / lam0
            }
        })
        .collect();
    let lnl = series_log1p(&rel, order + 1);
    let mut gh: Vec<Jet> = lnl.iter().map(|l| s.scale(-l)).collect();
    gh[0] = s.scale(-lam0.ln());
    let eh = series_exp(&gh);
    let mut fh = vec![Jet::ZERO; order + 1];
    for (i, fi) in fh.iter_mut().enumerate() {
        for (j, mj) in m_shift.iter().enumerate() {
            if j <= i {
                *fi = fi.add(eh[i - j].scale(*mj));
            }
        }
    }
    let mut em = fh[0].scale(0.5);
    let mut last = 0.0;
    for j in 1..=opts.em_terms.min(BERNOULLI.len()) {
        // B_{2j}/(2j)! f^{(2j-1)}(N) = B_{2j}/(2j) · F_{2j-1}
        let term = fh[2 * j - 1].scale(BERNOULLI[j - 1] / (2 * j) as f64);
        em = em.sub(term);
        last = term.a.abs();
    }
    Ok((head.add(tail).add(em), kernel, last))
}

/// ζ(s) over the nonzero spectrum, with its s-derivative.
pub fn spectral_zeta(spec: &PolySpectrum, s: f64) -> Result<ZetaValue> {
    spectral_zeta_with(spec, s, &ZetaOptions::default())
}

pub fn spectral_zeta_with(spec: &PolySpectrum, s: f64, opts: &ZetaOptions) -> Result<ZetaValue> {
    let (j, kernel, rem) = zeta_jet(spec, Jet::variable(s), opts)?;
    Ok(ZetaValue {
        s,
        value: j.a,
        derivative: j.b,
        kernel_dimension: kernel,
        remainder_bound: rem,
    })
}

/// ζ'(0), obtained analytically from the continued expression.
pub fn zeta_prime_at_zero(spec: &PolySpectrum) -> Result<f64> {
    Ok(spectral_zeta(spec, 0.0)?.derivative)
}

/// exp(-ζ'(0)) over the nonzero spectrum.
pub fn zeta_determinant(spec: &PolySpectrum) -> Result<f64> {
    Ok((-zeta_prime_at_zero(spec)?).exp())
}

/// Direct Σ m λ^{-s} for s in the convergent range, with an integral tail.
pub fn zeta_direct_sum(spec: &PolySpectrum, s: f64, terms: u32) -> Result<f64> {
    let d = spec.eigen.degree() as f64;
    let e = spec.mult.degree() as f64;
    if !(d * s > e + 1.0) {
        return Err(Error::Domain(format!(
            "direct zeta sum diverges at s = {s} (needs s > {})",
            (e + 1.0) / d
        )));
    }
    let (k0, _) = spec.split_kernel();
    let vals: Vec<f64> = (k0..k0 + terms)
        .map(|k| spec.multiplicity(k) * spec.eigenvalue(k).powf(-s))
        .collect();
    let last = k0 + terms;
    // Tail ≈ ∫_{last-1/2}^∞ of the leading power law.
    let lead_l = rat_to_f64(&spec.eigen.leading());
    let lead_m = rat_to_f64(&spec.mult.leading());
    let x = last as f64 - 0.5;
    let tail = lead_m * lead_l.powf(-s) * x.powf(e + 1.0 - d * s) / (d * s - e - 1.0);
    Ok(compensated_sum(vals) + tail)
}

/// Least-squares slope of ln λ_j against ln j over degrees k_lo..=k_hi, where
/// j is the cumulative count of eigenvalues (Weyl exponent estimate).
pub fn weyl_exponent(spec: &PolySpectrum, k_lo: u32, k_hi: u32) -> Result<f64> {
    if k_hi <= k_lo + 1 {
        return Err(Error::Parameter(
            "Weyl fit needs at least three degrees".into(),
        ));
    }
    let mut count = 0.0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in spec.k_start..=k_hi {
        let m = spec.multiplicity(k);
        // midpoint of the block of equal eigenvalues
        let j = count + 0.5 * (m + 1.0);
        count += m;
        if k >= k_lo {
            let l = spec.eigenvalue(k);
            if l <= 0.0 {
                continue;
            }
            xs.push(j.ln());
            ys.push(l.ln());
        }
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
