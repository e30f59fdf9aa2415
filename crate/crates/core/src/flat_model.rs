//! The flat picture of the minimal representation: ℝ^{p−1,q−1} embedded in
//! the null cone of ℝ^{p,q}, the cone C = {Q(ζ) = 0} with measure
//! dμ = ½ r^{n−3} dr dσ' dσ'', the Bessel lowest K-type and solutions of
//! □f = 0 synthesized from null plane waves.
//!
//! Cone points are ζ = (r ω', r ω'') with unit ω' ∈ S^{p−2}, ω'' ∈ S^{q−2}.
//! The ultrahyperbolic operator is □ = Σ_{a<p−1} ∂_a² − Σ_{a≥p−1} ∂_a², so
//! □ e^{i⟨x,ζ⟩} = −Q(ζ) e^{i⟨x,ζ⟩}.

use num::complex::Complex64;
use num::{BigRational, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{exp_sinh, gauss_legendre};
use crate::specfun::bessel_k;
use crate::sphere::{compensated_sum, sphere_volume, QuadratureRule};

/// (z', z'') ↦ (1 − s/4, z', z'', 1 + s/4) with s = |z'|² − |z''|².
pub fn parabolic_embedding(z1: &[f64], z2: &[f64]) -> Vec<f64> {
    let s = z1.iter().map(|v| v * v).sum::<f64>() - z2.iter().map(|v| v * v).sum::<f64>();
    let mut out = Vec::with_capacity(z1.len() + z2.len() + 2);
    out.push(1.0 - s / 4.0);
    out.extend_from_slice(z1);
    out.extend_from_slice(z2);
    out.push(1.0 + s / 4.0);
    out
}

/// Exact-arithmetic embedding.
pub fn parabolic_embedding_exact(z1: &[BigRational], z2: &[BigRational]) -> Vec<BigRational> {
    let four = BigRational::from_integer(4.into());
    let one = BigRational::from_integer(1.into());
    let mut s = BigRational::zero();
    for v in z1 {
        s += v * v;
    }
    for v in z2 {
        s -= v * v;
    }
    let mut out = Vec::with_capacity(z1.len() + z2.len() + 2);
    out.push(&one - &s / &four);
    out.extend_from_slice(z1);
    out.extend_from_slice(z2);
    out.push(&one + &s / &four);
    out
}

/// |x|² − |y|² for a point of ℝ^{p,q} given as (x, y), x ∈ ℝ^p.
pub fn null_defect_exact(point: &[BigRational], p: usize) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, v) in point.iter().enumerate() {
        if i < p {
            acc += v * v;
        } else {
            acc -= v * v;
        }
    }
    acc
}

pub fn null_defect(point: &[f64], p: usize) -> f64 {
    point
        .iter()
        .enumerate()
        .map(|(i, v)| if i < p { v * v } else { -v * v })
        .sum()
}

/// Scale the two halves of a null vector to unit length, landing on
/// S^{p−1} × S^{q−1}.
pub fn project_to_spheres(point: &[f64], p: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, y) = point.split_at(p);
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    (x.iter().map(|v| v / nx).collect(), y.iter().map(|v| v / ny).collect())
}

fn cone_dim(p: u32, q: u32) -> Result<u32> {
    if p < 2 || q < 2 {
        return Err(Error::Domain(format!("cone needs p, q ≥ 2, got ({p},{q})")));
    }
    Ok(p + q - 2)
}

/// Radial density ½ r^{n−3} of dμ, n = p + q − 2.
pub fn cone_measure_weight(p: u32, q: u32, r: f64) -> Result<f64> {
    let n = cone_dim(p, q)?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    Ok(0.5 * r.powi(n as i32 - 3))
}

fn check_v0(p: u32, q: u32) -> Result<()> {
    if (p + q) % 2 == 1 || p + q <= 4 || p < q || q < 2 {
        return Err(Error::Domain(format!(
            "lowest K-type needs p + q even, p + q > 4, p ≥ q ≥ 2; got ({p},{q})"
        )));
    }
    Ok(())
}

/// v₀(r) = r^{(3−q)/2} K_{(q−3)/2}(2r).
pub fn bessel_ktype_v0(p: u32, q: u32, r: f64) -> Result<f64> {
    check_v0(p, q)?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    let nu = (q as f64 - 3.0) / 2.0;
    Ok(r.powf(-nu) * bessel_k(nu, 2.0 * r)?)
}

fn v0_integrand(p: u32, q: u32) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        let v = bessel_ktype_v0(p, q, r).unwrap_or(0.0);
        v * v * cone_measure_weight(p, q, r).unwrap_or(0.0)
    }
}

/// Radius beyond which K_ν(2r) has dropped below 1e−18 of its value at r = ½.
pub fn v0_tail_radius(p: u32, q: u32) -> Result<f64> {
    check_v0(p, q)?;
    let nu = ((q as f64 - 3.0) / 2.0).abs();
    let peak = bessel_k(nu, 1.0)?;
    let mut r = 1.0;
    while bessel_k(nu, 2.0 * r)? >= 1e-18 * peak {
        r += 0.5;
    }
    Ok(r)
}

/// ∫₀^R v₀² ½ r^{n−3} dr by Gauss–Legendre panels graded geometrically
/// toward 0, `points` nodes per panel.
pub fn v0_radial_window(p: u32, q: u32, window: f64, points: usize) -> Result<f64> {
    check_v0(p, q)?;
    let f = v0_integrand(p, q);
    let mut parts = Vec::new();
    // unit-length panels away from 0, halving panels below 1
    let mut hi = window;
    while hi > 1.0 {
        let lo = (hi - 1.0).max(1.0);
        parts.push((lo, hi));
        hi = lo;
    }
    let mut hi = window.min(1.0);
    for _ in 0..60 {
        parts.push((hi / 2.0, hi));
        hi /= 2.0;
    }
    let mut terms = Vec::new();
    for (a, b) in parts {
        let rule = gauss_legendre(a, b, points)?;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            terms.push(w * f(*x));
        }
    }
    Ok(compensated_sum(terms))
}

/// ∫₀^∞ v₀² ½ r^{n−3} dr by double-exponential quadrature.
pub fn v0_radial_integral(p: u32, q: u32) -> Result<f64> {
    check_v0(p, q)?;
    Ok(exp_sinh(v0_integrand(p, q), 0.0, 1e-12)?.value)
}

/// ‖v₀‖² with its convergence evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct V0Norm {
    pub p: u32,
    pub q: u32,
    pub norm_sq: f64,
    pub radial: f64,
    /// Radial integral on successive windows.
    pub windows: Vec<(f64, f64)>,
    /// Relative change between panel refinements.
    pub refinement_change: f64,
    /// Relative difference against the double-exponential rule.
    pub cross_check: f64,
}

/// Vol(S^{p−2}) Vol(S^{q−2}) ∫₀^∞ v₀(r)² ½ r^{n−3} dr.
pub fn v0_norm_sq(p: u32, q: u32) -> Result<V0Norm> {
    check_v0(p, q)?;
    let tail = v0_tail_radius(p, q)?;
    let mut windows = Vec::new();
    let mut r = tail / 4.0;
    while r < tail {
        windows.push((r, v0_radial_window(p, q, r, 30)?));
        r *= 2.0;
    }
    let coarse = v0_radial_window(p, q, tail, 20)?;
    let fine = v0_radial_window(p, q, tail, 30)?;
    windows.push((tail, fine));
    let de = v0_radial_integral(p, q)?;
    let vols = sphere_volume(p - 2) * sphere_volume(q - 2);
    let refinement_change = ((fine - coarse) / fine).abs();
    if refinement_change > 1e-6 {
        return Err(Error::Convergence(format!(
            "v₀ radial integral changed by {refinement_change:.2e} under refinement"
        )));
    }
    Ok(V0Norm {
        p,
        q,
        norm_sq: vols * fine,
        radial: fine,
        windows,
        refinement_change,
        cross_check: ((de - fine) / fine).abs(),
    })
}

fn sphere_rule(m: u32, degree: u32) -> Result<QuadratureRule> {
    // S⁰ and S¹ come from the same product construction.
    QuadratureRule::with_degree(m, degree)
}

/// A density ψ sampled on (radial nodes) × S^{p−2} × S^{q−2}.
#[derive(Debug, Clone)]
pub struct ConeDensity {
    pub p: u32,
    pub q: u32,
    pub window: (f64, f64),
    /// Cone points, stride n.
    pub points: Vec<f64>,
    /// Quadrature weight times ½ r^{n−3}.
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ConeDensity {
    /// Sample ψ(r, ω', ω'') with `nr` Gauss points on the window and sphere
    /// rules of the given exactness. Odd degrees keep the rules symmetric
    /// under ω ↦ −ω.
    pub fn from_fn<F>(p: u32, q: u32, window: (f64, f64), nr: usize, degree: u32, psi: F) -> Result<Self>
    where
        F: Fn(f64, &[f64], &[f64]) -> Complex64,
    {
        let n = cone_dim(p, q)? as usize;
        if !(window.0 > 0.0 && window.1 > window.0) {
            return Err(Error::Domain(format!("bad radial window {window:?}")));
        }
        let rr = gauss_legendre(window.0, window.1, nr)?;
        let s1 = sphere_rule(p - 2, degree)?;
        let s2 = sphere_rule(q - 2, degree)?;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut values = Vec::new();
        for (r, wr) in rr.nodes.iter().zip(&rr.weights) {
            let wrad = wr * cone_measure_weight(p, q, *r)?;
            for i in 0..s1.len() {
                let o1 = s1.node(i);
                for j in 0..s2.len() {
                    let o2 = s2.node(j);
                    points.extend(o1.iter().map(|v| r * v));
                    points.extend(o2.iter().map(|v| r * v));
                    weights.push(wrad * s1.weights[i] * s2.weights[j]);
                    values.push(psi(*r, o1, o2));
                }
            }
        }
        debug_assert_eq!(points.len(), n * weights.len());
        Ok(ConeDensity {
            p,
            q,
            window,
            points,
            weights,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        (self.p + self.q - 2) as usize
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        let n = self.dim();
        &self.points[k * n..(k + 1) * n]
    }

    /// Largest |Q(ζ)| over the sample points.
    pub fn max_null_defect(&self) -> f64 {
        let p1 = self.p as usize - 1;
        (0..self.len())
            .map(|k| null_defect(self.point(k), p1).abs())
            .fold(0.0, f64::max)
    }

    /// ∫ |ψ|² dμ.
    pub fn l2_norm_sq(&self) -> f64 {
        compensated_sum(self.values.iter().zip(&self.weights).map(|(v, w)| w * v.norm_sqr()))
    }

    pub fn add(&self, other: &ConeDensity) -> Result<ConeDensity> {
        if self.points != other.points {
            return Err(Error::Parameter("densities live on different grids".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }
}

/// f(x) = ∫ e^{i⟨x,ζ⟩} ψ(ζ) dμ(ζ).
pub fn synthesize_solution(psi: &ConeDensity, x: &[f64]) -> Result<Complex64> {
    if x.len() != psi.dim() {
        return Err(Error::Parameter(format!(
            "point has {} coordinates, cone lives in ℝ^{}",
            x.len(),
            psi.dim()
        )));
    }
    let mut re = Vec::with_capacity(psi.len());
    let mut im = Vec::with_capacity(psi.len());
    for k in 0..psi.len() {
        let phase: f64 = psi.point(k).iter().zip(x).map(|(a, b)| a * b).sum();
        let v = Complex64::from_polar(1.0, phase) * psi.values[k] * psi.weights[k];
        re.push(v.re);
        im.push(v.im);
    }
    Ok(Complex64::new(compensated_sum(re), compensated_sum(im)))
}

/// Signature-weighted central second differences of f at x.
pub fn box_fd<F: Fn(&[f64]) -> Complex64>(f: &F, x: &[f64], p: u32, h: f64) -> Complex64 {
    let p1 = p as usize - 1;
    let f0 = f(x);
    let mut acc = Complex64::zero();
    let mut y = x.to_vec();
    for a in 0..x.len() {
        y[a] = x[a] + h;
        let fp = f(&y);
        y[a] = x[a] - h;
        let fm = f(&y);
        y[a] = x[a];
        let d2 = (fp + fm - f0 * 2.0) / (h * h);
        if a < p1 {
            acc += d2;
        } else {
            acc -= d2;
        }
    }
    acc
}

/// |□f(x)| at two steps with the observed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub x: Vec<f64>,
    pub h: f64,
    pub residual: f64,
    pub residual_half: f64,
    /// log₂ of the residual ratio.
    pub order: f64,
    /// residual / h².
    pub constant: f64,
    pub warning: Option<String>,
}

/// Finite-difference □ residual of f at x with steps h and h/2.
pub fn ultrahyperbolic_residual<F: Fn(&[f64]) -> Complex64>(
    f: &F,
    x: &[f64],
    p: u32,
    h: f64,
) -> Result<ResidualReport> {
    if !(h > 0.0) {
        return Err(Error::StepSize(format!("step {h} must be positive")));
    }
    let r1 = box_fd(f, x, p, h).norm();
    let r2 = box_fd(f, x, p, h / 2.0).norm();
    let ratio = r1 / r2;
    let warning = if (ratio - 4.0).abs() > 0.8 {
        Some(format!("Richardson ratio {ratio:.3} is not close to 4"))
    } else {
        None
    };
    Ok(ResidualReport {
        x: x.to_vec(),
        h,
        residual: r1,
        residual_half: r2,
        order: ratio.log2(),
        constant: r1 / (h * h),
        warning,
    })
}

/// A smooth test density: a radial bump on the window times a low-degree
/// polynomial in the angles.
pub fn demo_density(p: u32, q: u32, nr: usize, degree: u32) -> Result<ConeDensity> {
    let window = (0.2, 1.0);
    ConeDensity::from_fn(p, q, window, nr, degree, |r, o1, o2| {
        let t = (r - 0.6) / 0.4;
        let bump = (1.0 - t * t).max(0.0).powi(3);
        let ang = 1.0 + 0.5 * o1[0] + 0.25 * o2[0] * o1[o1.len() - 1];
        Complex64::new(bump * ang, 0.3 * bump * o2[o2.len() - 1])
    })
}
