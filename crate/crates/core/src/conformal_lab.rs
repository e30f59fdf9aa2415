//! Conformal deformations ḡ = e^{2ω}g of the round sphere.
//!
//! Functions are handled through [`NodalJet`]s (values, tangential gradients
//! and nonnegative Laplacians at quadrature nodes), so band-limited factors
//! and closed-form Möbius log-factors go through the same code. Averages ⨍
//! use the normalized surface measure.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::rat_to_f64;
use crate::spectra::{knapp_stein_gamma, log_sobolev_coeff};
use crate::sphere::{compensated_sum, BandlimitedFunction, ConformalField, NodalJet, SphereGrid};

/// Rule exactness used by [`lab_grid`].
pub fn default_degree(n: u32, l: u32) -> u32 {
    match n {
        2 => (4 * l + 8).max(48),
        _ => (4 * l + 8).max(24),
    }
}

/// A grid with gradient tables and the default rule exactness.
pub fn lab_grid(n: u32, l: u32) -> Result<SphereGrid> {
    SphereGrid::new(n, l, default_degree(n, l), true)
}

fn check_jet(grid: &SphereGrid, jet: &NodalJet) -> Result<()> {
    if jet.n != grid.n() || jet.len() != grid.len() {
        return Err(Error::Parameter(format!(
            "jet on S^{} with {} nodes does not match grid S^{} with {} nodes",
            jet.n,
            jet.len(),
            grid.n(),
            grid.len()
        )));
    }
    Ok(())
}

fn check_band(grid: &SphereGrid, f: &BandlimitedFunction) -> Result<()> {
    if f.n != grid.n() || f.l > grid.l() {
        return Err(Error::Parameter(format!(
            "band-{} function on S^{} does not fit a band-{} grid on S^{}",
            f.l,
            f.n,
            grid.l(),
            grid.n()
        )));
    }
    Ok(())
}

fn jet_of(grid: &SphereGrid, f: &BandlimitedFunction) -> Result<NodalJet> {
    check_band(grid, f)?;
    grid.jet(&f.with_band(grid.l()))
}

/// c_n = (n-2)/(4(n-1)).
pub fn yamabe_constant(n: u32) -> f64 {
    let n = n as f64;
    (n - 2.0) / (4.0 * (n - 1.0))
}

/// Curvature of e^{2ω}g at the nodes: the Gauss curvature J_ω for n = 2,
/// the scalar curvature K̄ for n > 2.
pub fn curvature_from_jet(w: &NodalJet) -> Vec<f64> {
    let n = w.n;
    if n == 2 {
        return (0..w.len())
            .map(|i| (-2.0 * w.values[i]).exp() * (w.laplacians[i] + 1.0))
            .collect();
    }
    let nf = n as f64;
    let a = (nf - 2.0) / 2.0;
    let cn = yamabe_constant(n);
    let k = nf * (nf - 1.0);
    let expo = (nf + 2.0) / (nf - 2.0);
    (0..w.len())
        .map(|i| {
            let phi = (a * w.values[i]).exp();
            let lap_phi = phi * (a * w.laplacians[i] - a * a * w.grad_norm2(i));
            (lap_phi + cn * k * phi) / (cn * phi.powf(expo))
        })
        .collect()
}

/// Deformed curvature of a band-limited factor at the grid nodes.
pub fn scalar_curvature_conformal(
    grid: &SphereGrid,
    omega: &BandlimitedFunction,
) -> Result<Vec<f64>> {
    Ok(curvature_from_jet(&jet_of(grid, omega)?))
}

/// ∫ e^{nω} dvol.
pub fn deformed_volume(grid: &SphereGrid, w: &NodalJet) -> f64 {
    let n = grid.n() as f64;
    let v: Vec<f64> = w.values.iter().map(|x| (n * x).exp()).collect();
    grid.integrate(&v)
}

/// Shift ω by a constant so that ∫ e^{nω} dvol = Vol(S^n).
pub fn volume_normalize(
    grid: &SphereGrid,
    omega: &BandlimitedFunction,
) -> Result<BandlimitedFunction> {
    check_band(grid, omega)?;
    let vals = grid.synthesize_nodes(&omega.with_band(grid.l()));
    let n = grid.n() as f64;
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = vals.iter().map(|x| (n * (x - m)).exp()).collect();
    let shift = m + (grid.average(&e)).ln() / n;
    let mut out = omega.clone();
    out.coeffs[0] -= shift * grid.volume().sqrt();
    Ok(out)
}

/// ∫ J_ω dvol_ḡ on S²; 4π for every ω.
pub fn gauss_bonnet(grid: &SphereGrid, w: &NodalJet) -> Result<f64> {
    check_jet(grid, w)?;
    if grid.n() != 2 {
        return Err(Error::Parameter("Gauss–Bonnet check is for S²".into()));
    }
    let j = curvature_from_jet(w);
    let v: Vec<f64> = (0..w.len())
        .map(|i| j[i] * (2.0 * w.values[i]).exp())
        .collect();
    Ok(grid.integrate(&v))
}

/// sup over nodes of |Y(ḡ)f − e^{-(n+2)ω/2} Y(g)(e^{(n-2)ω/2} f)|.
///
/// Δ̄f = e^{-2ω}(Δf − (n−2)⟨∇ω,∇f⟩); the right side expands Δ(e^{aω}f) by
/// the product rule.
pub fn yamabe_covariance_residual_jets(
    grid: &SphereGrid,
    w: &NodalJet,
    f: &NodalJet,
) -> Result<f64> {
    check_jet(grid, w)?;
    check_jet(grid, f)?;
    let n = grid.n();
    let nf = n as f64;
    let a = (nf - 2.0) / 2.0;
    let cn = yamabe_constant(n);
    let k = nf * (nf - 1.0);
    let kbar = curvature_from_jet(w);
    let mut worst = 0.0f64;
    for i in 0..w.len() {
        let om = w.values[i];
        let cross = w.pairing(f, i);
        // Gauss curvature J enters the 2-D Yamabe operator with c_2 = 0.
        let lhs =
            (-2.0 * om).exp() * (f.laplacians[i] - (nf - 2.0) * cross) + cn * kbar[i] * f.values[i];
        let e = (a * om).exp();
        let u = e * f.values[i];
        let lap_u = e
            * (f.laplacians[i] + f.values[i] * (a * w.laplacians[i] - a * a * w.grad_norm2(i))
                - 2.0 * a * cross);
        let rhs = (-(nf + 2.0) * om / 2.0).exp() * (lap_u + cn * k * u);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

pub fn yamabe_covariance_residual(
    grid: &SphereGrid,
    omega: &BandlimitedFunction,
    f: &BandlimitedFunction,
) -> Result<f64> {
    yamabe_covariance_residual_jets(grid, &jet_of(grid, omega)?, &jet_of(grid, f)?)
}

/// (1/12π) ∫ (|∇ω|² + 2Kω) dvol on the unit S² (K = 1).
pub fn polyakov_functional(grid: &SphereGrid, w: &NodalJet) -> Result<f64> {
    check_jet(grid, w)?;
    if grid.n() != 2 {
        return Err(Error::Parameter(
            "the Polyakov functional is defined on S²".into(),
        ));
    }
    let v: Vec<f64> = (0..w.len())
        .map(|i| w.grad_norm2(i) + 2.0 * w.values[i])
        .collect();
    Ok(grid.integrate(&v) / (12.0 * std::f64::consts::PI))
}

/// Polyakov functional with its determinant bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyakovReport {
    pub functional: f64,
    /// Ā/A.
    pub area_ratio: f64,
    /// Prediction for −log(det'Δ̄/Ā) + log(det'Δ/A).
    pub normalized_prediction: f64,
    /// Prediction for −log(det'Δ̄/det'Δ).
    pub bare_prediction: f64,
}

pub fn polyakov_report(grid: &SphereGrid, w: &NodalJet) -> Result<PolyakovReport> {
    let functional = polyakov_functional(grid, w)?;
    let area_ratio = deformed_volume(grid, w) / grid.volume();
    Ok(PolyakovReport {
        functional,
        area_ratio,
        normalized_prediction: functional,
        bare_prediction: functional - area_ratio.ln(),
    })
}

/// Coefficient Γ(n+k)/(Γ(n)Γ(k))/(2n) of the endpoint inequality.
pub fn onofri_weight(n: u32, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let kf = k as f64;
    // Γ(n+k)/Γ(k) as a product for integer n.
    let mut r = 1.0;
    for j in 0..n {
        r *= kf + j as f64;
    }
    let gn: f64 = (1..n).map(|j| j as f64).product();
    r / gn / (2.0 * nf)
}

/// Log-Sobolev weight Δ_k(n); zero for k = 0.
pub fn log_sobolev_weight(n: u32, k: u32) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    Ok(rat_to_f64(&log_sobolev_coeff(n, k)?))
}

/// The endpoint inequalities on S^n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeficitKind {
    OnofriEndpoint,
    LogSobolev,
    HlsSpectral { p: f64 },
}

impl DeficitKind {
    pub fn label(&self) -> String {
        match self {
            DeficitKind::OnofriEndpoint => "onofri_endpoint".into(),
            DeficitKind::LogSobolev => "log_sobolev".into(),
            DeficitKind::HlsSpectral { p } => format!("hls_spectral(p={p})"),
        }
    }
}

/// RHS − LHS of a sharp inequality with its named terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitReport {
    pub functional: String,
    pub n: u32,
    pub input: String,
    pub value: f64,
    /// Numerical tolerance below zero that still counts as nonnegative.
    pub tolerance: f64,
    pub terms: BTreeMap<String, f64>,
}

/// Tolerance used for inequality checks.
pub const DEFICIT_TOLERANCE: f64 = 1e-8;

/// ⨍|Y_k|² per degree from the coefficients.
fn degree_means(f: &BandlimitedFunction) -> Vec<f64> {
    let v = crate::sphere::sphere_volume(f.n);
    (0..=f.l).map(|k| f.degree_energy(k) / v).collect()
}

fn log_mean_exp(grid: &SphereGrid, vals: &[f64]) -> f64 {
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = vals.iter().map(|x| (x - m).exp()).collect();
    // Normalizing by the weight sum keeps constants exact.
    m + (grid.integrate(&e) / grid.rule.volume()).ln()
}

fn onofri_terms(grid: &SphereGrid, f: &BandlimitedFunction) -> (f64, f64, f64) {
    let n = grid.n();
    let vals = grid.synthesize_nodes(f);
    let dirichlet = compensated_sum(
        degree_means(f)
            .iter()
            .enumerate()
            .map(|(k, e)| onofri_weight(n, k as u32) * e),
    );
    (f.mean(), dirichlet, log_mean_exp(grid, &vals))
}

/// Deficit of one of the sharp endpoint inequalities for F.
pub fn sharp_inequality_deficit(
    grid: &SphereGrid,
    kind: DeficitKind,
    f: &BandlimitedFunction,
) -> Result<DeficitReport> {
    check_band(grid, f)?;
    let f = f.with_band(grid.l());
    let n = grid.n();
    let mut terms = BTreeMap::new();
    let value = match kind {
        DeficitKind::OnofriEndpoint => {
            let (mean, dirichlet, lme) = onofri_terms(grid, &f);
            terms.insert("mean".into(), mean);
            terms.insert("spectral".into(), dirichlet);
            terms.insert("log_mean_exp".into(), lme);
            mean + dirichlet - lme
        }
        DeficitKind::LogSobolev => {
            let means = degree_means(&f);
            let norm: f64 = means.iter().sum();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::Normalization(format!(
                    "log-Sobolev deficit needs ⨍F² = 1, got {norm:.12}"
                )));
            }
            let mut spectral = 0.0;
            for (k, e) in means.iter().enumerate() {
                spectral += log_sobolev_weight(n, k as u32)? * e;
            }
            let vals = grid.synthesize_nodes(&f);
            let ent: Vec<f64> = vals
                .iter()
                .map(|x| x * x * x.abs().ln())
                .map(nan_to_zero)
                .collect();
            let entropy = grid.average(&ent);
            terms.insert("spectral".into(), spectral);
            terms.insert("entropy".into(), entropy);
            spectral - entropy
        }
        DeficitKind::HlsSpectral { p } => {
            let means = degree_means(&f);
            let mut spectral = 0.0;
            for (k, e) in means.iter().enumerate() {
                spectral += knapp_stein_gamma(n, p, k as u32)? * e;
            }
            let vals = grid.synthesize_nodes(&f);
            let ap: Vec<f64> = vals.iter().map(|x| x.abs().powf(p)).collect();
            let norm2 = grid.average(&ap).powf(2.0 / p);
            terms.insert("lp_norm_sq".into(), norm2);
            terms.insert("spectral".into(), spectral);
            norm2 - spectral
        }
    };
    Ok(DeficitReport {
        functional: kind.label(),
        n,
        input: format!("band-{} coefficients", f.l),
        value,
        tolerance: DEFICIT_TOLERANCE,
        terms,
    })
}

fn nan_to_zero(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x
    }
}

/// Rescale F so that ⨍F² = 1.
pub fn normalize_l2(f: &BandlimitedFunction) -> Result<BandlimitedFunction> {
    let m = f.energy() / crate::sphere::sphere_volume(f.n);
    if !(m > 0.0) {
        return Err(Error::Normalization(
            "cannot normalize the zero function".into(),
        ));
    }
    Ok(f.scale(1.0 / m.sqrt()))
}

/// (β₁, β₂) in det Ȳ/det Y = exp(−β₁S₁ − β₂S₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BecknerBeta {
    pub beta1: f64,
    pub beta2: f64,
}

impl BecknerBeta {
    /// β₁ = β₂ = −180.
    pub fn yamabe() -> Self {
        BecknerBeta {
            beta1: -180.0,
            beta2: -180.0,
        }
    }

    /// 7β₁ = 22β₂ = 77/180.
    pub fn dirac_squared() -> Self {
        BecknerBeta {
            beta1: 11.0 / 180.0,
            beta2: 7.0 / 360.0,
        }
    }
}

impl Default for BecknerBeta {
    fn default() -> Self {
        Self::yamabe()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BecknerReport {
    pub s1: f64,
    pub s2: f64,
    pub det_ratio: f64,
    pub beta: BecknerBeta,
}

fn check_s4(grid: &SphereGrid) -> Result<()> {
    if grid.n() != 4 {
        return Err(Error::Parameter(format!(
            "Beckner functionals live on S⁴, grid is S^{}",
            grid.n()
        )));
    }
    Ok(())
}

fn mean_grad_sq(f: &BandlimitedFunction) -> f64 {
    let n = f.n as f64;
    degree_means(f)
        .iter()
        .enumerate()
        .map(|(k, e)| k as f64 * (k as f64 + n - 1.0) * e)
        .sum()
}

/// G = e^{-F/4} Δ e^{F/4} = ΔF/4 − |∇F|²/16 at the nodes.
fn beckner_g(jet: &NodalJet) -> Vec<f64> {
    (0..jet.len())
        .map(|i| jet.laplacians[i] / 4.0 - jet.grad_norm2(i) / 16.0)
        .collect()
}

fn beckner_s1(grid: &SphereGrid, f: &BandlimitedFunction) -> f64 {
    let (mean, dirichlet, lme) = onofri_terms(grid, f);
    mean + dirichlet - lme
}

fn beckner_s2(grid: &SphereGrid, f: &BandlimitedFunction) -> Result<f64> {
    let jet = grid.jet(f)?;
    let g: Vec<f64> = beckner_g(&jet).iter().map(|v| v * v).collect();
    Ok(grid.average(&g) - 0.25 * mean_grad_sq(f))
}

/// S₁, S₂ and the determinant ratio for F on S⁴.
pub fn beckner_functionals_s4(
    grid: &SphereGrid,
    f: &BandlimitedFunction,
    beta: BecknerBeta,
) -> Result<BecknerReport> {
    check_s4(grid)?;
    check_band(grid, f)?;
    let f = f.with_band(grid.l());
    let s1 = beckner_s1(grid, &f);
    let s2 = beckner_s2(grid, &f)?;
    Ok(BecknerReport {
        s1,
        s2,
        det_ratio: (-beta.beta1 * s1 - beta.beta2 * s2).exp(),
        beta,
    })
}

/// S₂ with Δe^{F/4} computed spectrally on a band-`guard_l` grid.
///
/// Fails with an aliasing error if e^{F/4} carries more than `tol` of its
/// energy beyond the guard band.
pub fn beckner_s2_guard(f: &BandlimitedFunction, guard_l: u32, tol: f64) -> Result<f64> {
    if f.n != 4 {
        return Err(Error::Parameter("Beckner functionals live on S⁴".into()));
    }
    if guard_l < f.l {
        return Err(Error::Parameter("guard band below the band of F".into()));
    }
    let grid = SphereGrid::new(4, guard_l, 2 * guard_l + 4, false)?;
    let fv = grid.synthesize_nodes(&f.with_band(guard_l));
    let u: Vec<f64> = fv.iter().map(|x| (x / 4.0).exp()).collect();
    let uh = grid.analyze(&u, tol)?;
    let lap = grid.synthesize_nodes(&uh.laplacian());
    let integrand: Vec<f64> = (0..grid.len())
        .map(|i| (-fv[i] / 2.0).exp() * lap[i] * lap[i])
        .collect();
    Ok(grid.average(&integrand) - 0.25 * mean_grad_sq(f))
}

/// |∫ X(K̄) dvol_ḡ|, evaluated as |∫ K̄ e^{nω}(div X + n X(ω)) dvol| after
/// integrating by parts. On S² K̄ = 2J_ω.
pub fn pohozaev_residual(grid: &SphereGrid, w: &NodalJet, field: &ConformalField) -> Result<f64> {
    check_jet(grid, w)?;
    let n = grid.n();
    let nf = n as f64;
    let mut kbar = curvature_from_jet(w);
    if n == 2 {
        for v in &mut kbar {
            *v *= 2.0;
        }
    }
    let vals: Vec<f64> = (0..w.len())
        .map(|i| {
            let y = grid.rule.node(i);
            let x = field.eval(y);
            let xw: f64 = x.iter().zip(w.grad(i)).map(|(a, b)| a * b).sum();
            kbar[i] * (nf * w.values[i]).exp() * (field.divergence(y) + nf * xw)
        })
        .collect();
    Ok(grid.integrate(&vals).abs())
}

/// Outcome of the finite-difference variation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// Richardson estimate of the O(h²) error in `lhs`.
    pub richardson: f64,
}

fn integrated_u1(grid: &SphereGrid, w: &NodalJet, a: f64) -> f64 {
    let n = grid.n() as f64;
    let pref = (4.0 * std::f64::consts::PI).powf(-n / 2.0) * (1.0 / 6.0 - a);
    let kbar = curvature_from_jet(w);
    let v: Vec<f64> = (0..w.len())
        .map(|i| kbar[i] * (n * w.values[i]).exp())
        .collect();
    pref * grid.integrate(&v)
}

/// d/du ∫U₁(ḡ_u) dvol_{ḡ_u} at u = 0 for ḡ_u = e^{2uω}g on S⁴, against
/// 2∫ωU₁ dvol. U₁ = (4π)^{-2}(1/6 − a)K for the operator Δ + aK.
pub fn variation_check_u1(
    grid: &SphereGrid,
    w: &NodalJet,
    h: f64,
    a: f64,
    step_tol: f64,
) -> Result<VariationCheck> {
    check_jet(grid, w)?;
    if grid.n() != 4 {
        return Err(Error::Parameter("variation check is set up on S⁴".into()));
    }
    if !(h > 0.0) {
        return Err(Error::StepSize(format!("step {h} must be positive")));
    }
    let diff = |h: f64| {
        (integrated_u1(grid, &w.scale(h), a) - integrated_u1(grid, &w.scale(-h), a)) / (2.0 * h)
    };
    let d1 = diff(h);
    let d2 = diff(h / 2.0);
    let richardson = (d1 - d2) * 4.0 / 3.0;
    if richardson.abs() > step_tol {
        return Err(Error::StepSize(format!(
            "O(h²) term {richardson:.3e} exceeds {step_tol:.1e} at h = {h}"
        )));
    }
    let n = 4.0;
    let pref = (4.0 * std::f64::consts::PI).powf(-n / 2.0) * (1.0 / 6.0 - a) * n * (n - 1.0);
    let rhs = 2.0 * pref * grid.integrate(&w.values);
    Ok(VariationCheck {
        lhs: d1,
        rhs,
        gap: (d1 - rhs).abs(),
        richardson,
    })
}

/// Functionals with analytic coefficient gradients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalKind {
    /// Onofri endpoint deficit in F.
    Onofri,
    /// Log-Sobolev deficit made scale-free: equals the deficit when ⨍F² = 1.
    LogSobolev,
    HlsSpectral {
        p: f64,
    },
    BecknerS1,
    BecknerS2,
    /// S₁ + S₂.
    BecknerSurrogate,
    /// Polyakov functional in ω.
    Polyakov,
}

/// Value of a functional at a band-limited input.
pub fn functional_value(
    grid: &SphereGrid,
    kind: FunctionalKind,
    f: &BandlimitedFunction,
) -> Result<f64> {
    check_band(grid, f)?;
    let f = f.with_band(grid.l());
    let n = grid.n();
    let v = grid.volume();
    match kind {
        FunctionalKind::Onofri => {
            let (a, b, c) = onofri_terms(grid, &f);
            Ok(a + b - c)
        }
        FunctionalKind::LogSobolev => {
            let means = degree_means(&f);
            let m: f64 = means.iter().sum();
            let mut spectral = 0.0;
            for (k, e) in means.iter().enumerate() {
                spectral += log_sobolev_weight(n, k as u32)? * e;
            }
            let vals = grid.synthesize_nodes(&f);
            let ent: Vec<f64> = vals
                .iter()
                .map(|x| x * x * x.abs().ln())
                .map(nan_to_zero)
                .collect();
            let mlog = if m > 0.0 { 0.5 * m * m.ln() } else { 0.0 };
            Ok(spectral - grid.average(&ent) + mlog)
        }
        FunctionalKind::HlsSpectral { p } => {
            sharp_inequality_deficit(grid, DeficitKind::HlsSpectral { p }, &f).map(|r| r.value)
        }
        FunctionalKind::BecknerS1 => {
            check_s4(grid)?;
            Ok(beckner_s1(grid, &f))
        }
        FunctionalKind::BecknerS2 => {
            check_s4(grid)?;
            beckner_s2(grid, &f)
        }
        FunctionalKind::BecknerSurrogate => {
            check_s4(grid)?;
            Ok(beckner_s1(grid, &f) + beckner_s2(grid, &f)?)
        }
        FunctionalKind::Polyakov => {
            if n != 2 {
                return Err(Error::Parameter(
                    "the Polyakov functional is defined on S²".into(),
                ));
            }
            let grad2: f64 = degree_means(&f)
                .iter()
                .enumerate()
                .map(|(k, e)| (k * (k + 1)) as f64 * e * v)
                .sum();
            Ok((grad2 + 2.0 * f.coeffs[0] * v.sqrt()) / (12.0 * std::f64::consts::PI))
        }
    }
}

fn onofri_gradient(grid: &SphereGrid, f: &BandlimitedFunction) -> Vec<f64> {
    let n = grid.n();
    let v = grid.volume();
    let vals = grid.synthesize_nodes(f);
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = vals.iter().map(|x| (x - m).exp()).collect();
    let z = grid.integrate(&e);
    let pe = grid.project(&e);
    let degs = f.degrees();
    let mut g: Vec<f64> = (0..f.coeffs.len())
        .map(|j| 2.0 * onofri_weight(n, degs[j]) * f.coeffs[j] / v - pe.coeffs[j] / z)
        .collect();
    g[0] += 1.0 / v.sqrt();
    g
}

fn beckner_s2_gradient(grid: &SphereGrid, f: &BandlimitedFunction) -> Result<Vec<f64>> {
    let v = grid.volume();
    let jet = grid.jet(f)?;
    let gv = beckner_g(&jet);
    let nb = f.coeffs.len();
    let dim = 5;
    let degs = f.degrees();
    let lam: Vec<f64> = degs.iter().map(|&k| (k * (k + 3)) as f64).collect();
    let mut acc = vec![0.0; nb];
    for i in 0..grid.len() {
        let wi = grid.rule.weights[i] * 2.0 * gv[i] / v;
        let row = grid.basis_row(i);
        let grow = grid.basis_grad_row(i).expect("grid has gradients");
        let gf = jet.grad(i);
        for j in 0..nb {
            let pair: f64 = (0..dim).map(|c| gf[c] * grow[j * dim + c]).sum();
            acc[j] += wi * (lam[j] * row[j] / 4.0 - pair / 8.0);
        }
    }
    for j in 0..nb {
        acc[j] -= 0.5 * lam[j] * f.coeffs[j] / v;
    }
    Ok(acc)
}

/// Gradient of a functional with respect to the coefficients of F.
pub fn functional_gradient(
    grid: &SphereGrid,
    kind: FunctionalKind,
    f: &BandlimitedFunction,
) -> Result<Vec<f64>> {
    check_band(grid, f)?;
    let f = f.with_band(grid.l());
    let n = grid.n();
    let v = grid.volume();
    let degs = f.degrees();
    match kind {
        FunctionalKind::Onofri => Ok(onofri_gradient(grid, &f)),
        FunctionalKind::BecknerS1 => {
            check_s4(grid)?;
            Ok(onofri_gradient(grid, &f))
        }
        FunctionalKind::BecknerS2 => {
            check_s4(grid)?;
            beckner_s2_gradient(grid, &f)
        }
        FunctionalKind::BecknerSurrogate => {
            check_s4(grid)?;
            let a = onofri_gradient(grid, &f);
            let b = beckner_s2_gradient(grid, &f)?;
            Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect())
        }
        FunctionalKind::LogSobolev => {
            let m = f.energy() / v;
            let vals = grid.synthesize_nodes(&f);
            let t: Vec<f64> = vals
                .iter()
                .map(|x| nan_to_zero(2.0 * x * x.abs().ln()) + x)
                .collect();
            let pt = grid.project(&t);
            let mut g = Vec::with_capacity(f.coeffs.len());
            for j in 0..f.coeffs.len() {
                let w = log_sobolev_weight(n, degs[j])?;
                g.push(
                    2.0 * w * f.coeffs[j] / v - pt.coeffs[j] / v + f.coeffs[j] / v * (m.ln() + 1.0),
                );
            }
            Ok(g)
        }
        FunctionalKind::HlsSpectral { p } => {
            let vals = grid.synthesize_nodes(&f);
            let ap: Vec<f64> = vals.iter().map(|x| x.abs().powf(p)).collect();
            let mp = grid.average(&ap);
            let t: Vec<f64> = vals
                .iter()
                .map(|x| x.abs().powf(p - 1.0) * x.signum())
                .collect();
            let pt = grid.project(&t);
            let mut g = Vec::with_capacity(f.coeffs.len());
            for j in 0..f.coeffs.len() {
                let gk = knapp_stein_gamma(n, p, degs[j])?;
                g.push(
                    2.0 * mp.powf(2.0 / p - 1.0) * pt.coeffs[j] / v - 2.0 * gk * f.coeffs[j] / v,
                );
            }
            Ok(g)
        }
        FunctionalKind::Polyakov => {
            if n != 2 {
                return Err(Error::Parameter(
                    "the Polyakov functional is defined on S²".into(),
                ));
            }
            let mut g: Vec<f64> = (0..f.coeffs.len())
                .map(|j| 2.0 * (degs[j] * (degs[j] + 1)) as f64 * f.coeffs[j])
                .collect();
            g[0] += 2.0 * v.sqrt();
            Ok(g.iter()
                .map(|x| x / (12.0 * std::f64::consts::PI))
                .collect())
        }
    }
}

/// Functionals the extremal search can minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalKind {
    /// Onofri endpoint deficit on S², F = 2ω.
    OnofriS2,
    /// S₁ + S₂ on S⁴, F = 4ω.
    BecknerS4,
}

impl ExtremalKind {
    pub fn n(&self) -> u32 {
        match self {
            ExtremalKind::OnofriS2 => 2,
            ExtremalKind::BecknerS4 => 4,
        }
    }

    fn functional(&self) -> FunctionalKind {
        match self {
            ExtremalKind::OnofriS2 => FunctionalKind::Onofri,
            ExtremalKind::BecknerS4 => FunctionalKind::BecknerSurrogate,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExtremalKind::OnofriS2 => "onofri_endpoint",
            ExtremalKind::BecknerS4 => "beckner_surrogate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalOptions {
    pub max_iter: usize,
    /// Success threshold for the terminal value.
    pub success: f64,
    /// Stop once the value falls below this.
    pub value_tol: f64,
    pub grad_tol: f64,
    pub armijo: f64,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions {
            max_iter: 500,
            success: 1e-5,
            value_tol: 1e-12,
            grad_tol: 1e-12,
            armijo: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub iter: usize,
    pub value: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub functional: String,
    pub n: u32,
    pub l: u32,
    /// Terminal log-factor ω (volume-normalized).
    pub omega: BandlimitedFunction,
    pub value: f64,
    pub iterations: usize,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl ExtremalReport {
    /// CSV with header `iter,value,grad_norm`.
    pub fn trajectory_csv(&self) -> String {
        let mut s = String::from("iter,value,grad_norm\n");
        for t in &self.trajectory {
            s.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                t.iter, t.value, t.grad_norm
            ));
        }
        s
    }
}

/// Shift F so that ⨍e^F = 1.
fn normalize_exp(grid: &SphereGrid, f: &mut BandlimitedFunction) {
    let vals = grid.synthesize_nodes(f);
    let lme = log_mean_exp(grid, &vals);
    f.coeffs[0] -= lme * grid.volume().sqrt();
}

/// Projected, preconditioned gradient descent with Armijo backtracking,
/// started from ω.
pub fn extremal_search_from(
    grid: &SphereGrid,
    kind: ExtremalKind,
    omega: &BandlimitedFunction,
    opts: &ExtremalOptions,
) -> Result<ExtremalReport> {
    let n = kind.n();
    if grid.n() != n {
        return Err(Error::Parameter(format!(
            "{} runs on S^{n}, grid is S^{}",
            kind.label(),
            grid.n()
        )));
    }
    check_band(grid, omega)?;
    let fk = kind.functional();
    let v = grid.volume();
    let nf = n as f64;
    let degs = omega.with_band(grid.l()).degrees();
    let precond: Vec<f64> = degs
        .iter()
        .map(|&k| {
            let w = onofri_weight(n, k);
            let lam = (k * (k + n - 1)) as f64;
            let extra = if n == 4 { lam * lam / 8.0 } else { 0.0 };
            v / (2.0 * w + extra + 1.0)
        })
        .collect();
    let mut f = omega.with_band(grid.l()).scale(nf);
    normalize_exp(grid, &mut f);
    let mut value = functional_value(grid, fk, &f)?;
    let mut trajectory = Vec::new();
    let mut iterations = 0;
    loop {
        let mut g = functional_gradient(grid, fk, &f)?;
        g[0] = 0.0;
        let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        trajectory.push(TrajectoryPoint {
            iter: iterations,
            value,
            grad_norm: gn,
        });
        if value <= opts.value_tol || gn <= opts.grad_tol || iterations >= opts.max_iter {
            break;
        }
        let d: Vec<f64> = g.iter().zip(&precond).map(|(a, p)| -a * p).collect();
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let mut trial = f.clone();
            for (c, dj) in trial.coeffs.iter_mut().zip(&d) {
                *c += t * dj;
            }
            normalize_exp(grid, &mut trial);
            let tv = functional_value(grid, fk, &trial)?;
            if tv <= value + opts.armijo * t * slope {
                accepted = Some((trial, tv));
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((trial, tv)) => {
                f = trial;
                value = tv;
            }
            None => break,
        }
    }
    if value > opts.success {
        return Err(Error::Convergence(format!(
            "{} stalled at {value:.3e} after {iterations} iterations",
            kind.label()
        )));
    }
    Ok(ExtremalReport {
        functional: kind.label().into(),
        n,
        l: grid.l(),
        omega: f.scale(1.0 / nf),
        value,
        iterations,
        trajectory,
    })
}

/// Extremal search from a random band-min(2, L) seed of the given scale
/// (scale 0 starts at ω = 0).
pub fn extremal_search(
    kind: ExtremalKind,
    l: u32,
    seed: u64,
    scale: f64,
    opts: &ExtremalOptions,
) -> Result<ExtremalReport> {
    let n = kind.n();
    let grid = lab_grid(n, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = BandlimitedFunction::random(n, l.min(2), scale, &mut rng).with_band(l);
    extremal_search_from(&grid, kind, &omega, opts)
}
