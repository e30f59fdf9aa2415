//! Quadrature, real spherical harmonics, band-limited functions and the
//! Möbius action of SO(n+1,1) on the unit sphere S^n ⊂ ℝ^{n+1}.
//!
//! Quadrature rules are products over iterated polar coordinates: S^m is
//! written as (√(1-t²)·u, t) with u ∈ S^{m-1}, and t is integrated by a
//! Gauss rule for the weight (1-t²)^{(m-2)/2}. The circle uses equispaced
//! angles.
//!
//! The harmonic basis is built from solid harmonics
//! `H_{d_n}^{λ_n}(x_{n+1}, ρ_{n+1}²) ⋯ H_{d_2}^{λ_2}(x_3, ρ_3²) · Re/Im (x_1 + i x_2)^{j_1}`
//! where `H_d^λ(s, ρ²) = ρ^d C_d^λ(s/ρ)` is a homogenized Gegenbauer
//! polynomial. Each factor is harmonic-preserving, so every product is a
//! harmonic polynomial, homogeneous of degree `j_n`. The basis is orthonormal
//! in L²(S^n) with respect to the unnormalized surface measure.
//!
//! Laplacians use the nonnegative convention: Δ Y_k = k(k+n-1) Y_k.

use std::ops::Range;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quad::gauss_symmetric;
use crate::specfun::ln_gamma_signed;
use crate::spectra::{ModelOperator, OperatorKind};

/// Default upper bound on the number of quadrature nodes.
pub const DEFAULT_NODE_CAP: usize = 4_000_000;

/// Surface area of the unit sphere S^n.
pub fn sphere_volume(n: u32) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    let (lg, _) = ln_gamma_signed(h).expect("positive argument");
    2.0 * (h * std::f64::consts::PI.ln() - lg).exp()
}

/// Neumaier-compensated sum in a fixed order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Nodes and weights on S^n with a certified polynomial exactness degree.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub n: u32,
    /// Flattened unit vectors, stride n+1.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness_degree: u32,
}

fn rule_size(m: u32, degree: u32) -> usize {
    match m {
        0 => 2,
        1 => degree as usize + 1,
        _ => (degree as usize / 2 + 1) * rule_size(m - 1, degree),
    }
}

fn build_rule(m: u32, degree: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    match m {
        0 => Ok((vec![1.0, -1.0], vec![1.0, 1.0])),
        1 => {
            let count = degree as usize + 1;
            let mut nodes = Vec::with_capacity(2 * count);
            let w = 2.0 * std::f64::consts::PI / count as f64;
            for j in 0..count {
                let th = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                nodes.push(th.cos());
                nodes.push(th.sin());
            }
            Ok((nodes, vec![w; count]))
        }
        _ => {
            let (inner_nodes, inner_w) = build_rule(m - 1, degree)?;
            let g = gauss_symmetric((m as f64 - 2.0) / 2.0, degree as usize / 2 + 1)?;
            let stride_in = m as usize;
            let stride = stride_in + 1;
            let mut nodes = Vec::with_capacity(stride * g.nodes.len() * inner_w.len());
            let mut weights = Vec::with_capacity(g.nodes.len() * inner_w.len());
            for (t, wt) in g.nodes.iter().zip(&g.weights) {
                let c = (1.0 - t * t).sqrt();
                for (i, wu) in inner_w.iter().enumerate() {
                    let u = &inner_nodes[i * stride_in..(i + 1) * stride_in];
                    let mut norm2 = t * t;
                    let start = nodes.len();
                    for ui in u {
                        let v = c * ui;
                        norm2 += v * v;
                        nodes.push(v);
                    }
                    nodes.push(*t);
                    let s = 1.0 / norm2.sqrt();
                    for v in &mut nodes[start..] {
                        *v *= s;
                    }
                    weights.push(wt * wu);
                }
            }
            Ok((nodes, weights))
        }
    }
}

impl QuadratureRule {
    /// A rule on S^n exact for polynomials of degree ≤ `degree`.
    pub fn with_degree(n: u32, degree: u32) -> Result<Self> {
        Self::with_degree_capped(n, degree, DEFAULT_NODE_CAP)
    }

    pub fn with_degree_capped(n: u32, degree: u32, cap: usize) -> Result<Self> {
        let count = rule_size(n, degree);
        if count > cap {
            return Err(Error::Resource(format!(
                "quadrature on S^{n} of degree {degree} needs {count} nodes (cap {cap})"
            )));
        }
        let (nodes, weights) = build_rule(n, degree)?;
        Ok(QuadratureRule {
            n,
            nodes,
            weights,
            exactness_degree: degree,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n as usize + 1
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.nodes[i * d..(i + 1) * d]
    }

    /// Σ w_i f_i in a fixed, compensated order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        compensated_sum(values.iter().zip(&self.weights).map(|(v, w)| v * w))
    }

    pub fn integrate_fn<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        compensated_sum((0..self.len()).map(|i| self.weights[i] * f(self.node(i))))
    }

    pub fn volume(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// CSV with header `x1,…,x{n+1},w`.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut out: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        out.push("w".into());
        let mut s = out.join(",");
        s.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self
                .node(i)
                .iter()
                .chain(std::iter::once(&self.weights[i]))
                .map(|v| format!("{v:.16e}"))
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// A rule exact to degree 2L+2 (products of band-L functions plus one
/// gradient pairing).
pub fn quadrature_rule(n: u32, l: u32) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::Parameter(format!("quadrature needs n ≥ 2, got {n}")));
    }
    if l < 1 {
        return Err(Error::Parameter("quadrature needs L ≥ 1".into()));
    }
    QuadratureRule::with_degree(n, 2 * l + 2)
}

/// Label of one real spherical harmonic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicLabel {
    /// j_1 ≤ j_2 ≤ … ≤ j_n; the degree is j_n.
    pub chain: Vec<u32>,
    /// Imaginary part of (x_1 + i x_2)^{j_1}.
    pub sine: bool,
}

impl HarmonicLabel {
    pub fn degree(&self) -> u32 {
        *self.chain.last().unwrap()
    }
}

/// Real orthonormal spherical-harmonic basis on S^n up to degree L.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub n: u32,
    pub l: u32,
    labels: Vec<HarmonicLabel>,
    inv_norms: Vec<f64>,
    offsets: Vec<usize>,
}

fn ln_gegenbauer_norm(d: u32, lambda: f64) -> f64 {
    // h_d^λ = π 2^{1-2λ} Γ(d+2λ) / (d! (d+λ) Γ(λ)²)
    let d = d as f64;
    let lg = |x: f64| ln_gamma_signed(x).expect("positive").0;
    std::f64::consts::PI.ln() + (1.0 - 2.0 * lambda) * std::f64::consts::LN_2 + lg(d + 2.0 * lambda)
        - lg(d + 1.0)
        - (d + lambda).ln()
        - 2.0 * lg(lambda)
}

fn push_chains(level: u32, top: u32, chain: &mut Vec<u32>, out: &mut Vec<HarmonicLabel>) {
    // chain holds j_{level+1}..j_n in reverse order
    if level == 1 {
        let mut c: Vec<u32> = chain.iter().rev().copied().collect();
        c.insert(0, top);
        out.push(HarmonicLabel {
            chain: c.clone(),
            sine: false,
        });
        if top > 0 {
            out.push(HarmonicLabel {
                chain: c,
                sine: true,
            });
        }
        return;
    }
    chain.push(top);
    for j in 0..=top {
        push_chains(level - 1, j, chain, out);
    }
    chain.pop();
}

impl HarmonicBasis {
    pub fn new(n: u32, l: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "harmonic basis needs n ≥ 2, got {n}"
            )));
        }
        let mut labels = Vec::new();
        let mut offsets = vec![0];
        for k in 0..=l {
            let mut chain = Vec::new();
            push_chains(n, k, &mut chain, &mut labels);
            offsets.push(labels.len());
        }
        let inv_norms = labels
            .iter()
            .map(|lab| {
                let j1 = lab.chain[0];
                let mut ln = if j1 == 0 {
                    (2.0 * std::f64::consts::PI).ln()
                } else {
                    std::f64::consts::PI.ln()
                };
                for m in 2..=n as usize {
                    let jp = lab.chain[m - 2];
                    let d = lab.chain[m - 1] - jp;
                    let lambda = jp as f64 + (m as f64 - 1.0) / 2.0;
                    ln += ln_gegenbauer_norm(d, lambda);
                }
                (-0.5 * ln).exp()
            })
            .collect();
        Ok(HarmonicBasis {
            n,
            l,
            labels,
            inv_norms,
            offsets,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[HarmonicLabel] {
        &self.labels
    }

    pub fn degree(&self, idx: usize) -> u32 {
        self.labels[idx].degree()
    }

    pub fn degree_range(&self, k: u32) -> Range<usize> {
        self.offsets[k as usize]..self.offsets[k as usize + 1]
    }

    /// Values and (optionally) tangential gradients of all basis functions at
    /// a point of S^n. `grads` has stride n+1 per basis function.
    pub fn eval(&self, x: &[f64], vals: &mut [f64], grads: Option<&mut [f64]>) {
        let n = self.n as usize;
        let dim = n + 1;
        let l = self.l as usize;
        debug_assert_eq!(x.len(), dim);
        let want_grad = grads.is_some();

        // Level 1: z^j = (x_1 + i x_2)^j.
        let mut zr = vec![0.0; l + 1];
        let mut zi = vec![0.0; l + 1];
        zr[0] = 1.0;
        for j in 1..=l {
            zr[j] = zr[j - 1] * x[0] - zi[j - 1] * x[1];
            zi[j] = zr[j - 1] * x[1] + zi[j - 1] * x[0];
        }

        // Levels m = 2..n: H_d^{λ}(x_{m+1}, ρ²) for λ = j' + (m-1)/2.
        // tables[m-2][jp][d] = (H, ∂_s H, ∂_{ρ²} H)
        let mut tables: Vec<Vec<Vec<[f64; 3]>>> = Vec::with_capacity(n.saturating_sub(1));
        for m in 2..=n {
            let s = x[m];
            let rho2: f64 = x[..=m].iter().map(|v| v * v).sum();
            let mut per_jp = Vec::with_capacity(l + 1);
            for jp in 0..=l {
                let lambda = jp as f64 + (m as f64 - 1.0) / 2.0;
                let dmax = l - jp;
                let mut h = vec![[0.0; 3]; dmax + 1];
                h[0] = [1.0, 0.0, 0.0];
                if dmax >= 1 {
                    h[1] = [2.0 * lambda * s, 2.0 * lambda, 0.0];
                }
                for d in 2..=dmax {
                    let df = d as f64;
                    let a = 2.0 * (df + lambda - 1.0);
                    let b = df + 2.0 * lambda - 2.0;
                    let (p1, p2) = (h[d - 1], h[d - 2]);
                    h[d] = [
                        (a * s * p1[0] - b * rho2 * p2[0]) / df,
                        (a * (p1[0] + s * p1[1]) - b * rho2 * p2[1]) / df,
                        (a * s * p1[2] - b * (p2[0] + rho2 * p2[2])) / df,
                    ];
                }
                per_jp.push(h);
            }
            tables.push(per_jp);
        }

        let mut factors = vec![0.0; n];
        let mut fgrads = vec![0.0; n * dim];
        let mut prefix = vec![0.0; n + 1];
        let mut suffix = vec![0.0; n + 1];
        let mut grads = grads;
        for (idx, lab) in self.labels.iter().enumerate() {
            let j1 = lab.chain[0] as usize;
            // factor 0: level 1
            if lab.sine {
                factors[0] = zi[j1];
            } else {
                factors[0] = zr[j1];
            }
            if want_grad {
                fgrads[..dim].fill(0.0);
                if j1 > 0 {
                    let (pr, pi) = (zr[j1 - 1], zi[j1 - 1]);
                    let jf = j1 as f64;
                    if lab.sine {
                        fgrads[0] = jf * pi;
                        fgrads[1] = jf * pr;
                    } else {
                        fgrads[0] = jf * pr;
                        fgrads[1] = -jf * pi;
                    }
                }
            }
            for m in 2..=n {
                let jp = lab.chain[m - 2] as usize;
                let d = lab.chain[m - 1] as usize - jp;
                let h = tables[m - 2][jp][d];
                factors[m - 1] = h[0];
                if want_grad {
                    let g = &mut fgrads[(m - 1) * dim..m * dim];
                    g.fill(0.0);
                    for i in 0..m {
                        g[i] = 2.0 * h[2] * x[i];
                    }
                    g[m] = h[1] + 2.0 * h[2] * x[m];
                }
            }
            let c = self.inv_norms[idx];
            prefix[0] = 1.0;
            for m in 0..n {
                prefix[m + 1] = prefix[m] * factors[m];
            }
            vals[idx] = c * prefix[n];
            if let Some(gout) = grads.as_deref_mut() {
                suffix[n] = 1.0;
                for m in (0..n).rev() {
                    suffix[m] = suffix[m + 1] * factors[m];
                }
                let g = &mut gout[idx * dim..(idx + 1) * dim];
                g.fill(0.0);
                for m in 0..n {
                    let coef = c * prefix[m] * suffix[m + 1];
                    if coef == 0.0 {
                        continue;
                    }
                    for i in 0..dim {
                        g[i] += coef * fgrads[m * dim + i];
                    }
                }
                let radial: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
                for i in 0..dim {
                    g[i] -= radial * x[i];
                }
            }
        }
    }
}

/// A real function on S^n given by harmonic coefficients up to degree L.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BandlimitedFunction {
    pub n: u32,
    pub l: u32,
    pub coeffs: Vec<f64>,
}

/// Dimension of the band-L harmonic space on S^n.
pub fn band_dimension(n: u32, l: u32) -> usize {
    (0..=l)
        .map(|k| crate::spectra::harmonic_dim_u64(n + 1, k) as usize)
        .sum()
}

fn degree_offsets(n: u32, l: u32) -> Vec<usize> {
    let mut off = vec![0];
    for k in 0..=l {
        let d = crate::spectra::harmonic_dim_u64(n + 1, k) as usize;
        off.push(off.last().unwrap() + d);
    }
    off
}

impl BandlimitedFunction {
    pub fn zeros(n: u32, l: u32) -> Self {
        BandlimitedFunction {
            n,
            l,
            coeffs: vec![0.0; band_dimension(n, l)],
        }
    }

    /// The constant function c.
    pub fn constant(n: u32, l: u32, c: f64) -> Self {
        let mut f = Self::zeros(n, l);
        f.coeffs[0] = c * sphere_volume(n).sqrt();
        f
    }

    /// Independent N(0, scale²) coefficients in degrees 1..=L (mean zero).
    pub fn random<R: Rng + ?Sized>(n: u32, l: u32, scale: f64, rng: &mut R) -> Self {
        let mut f = Self::zeros(n, l);
        for c in f.coeffs.iter_mut().skip(1) {
            let z: f64 = rng.sample(StandardNormal);
            *c = scale * z;
        }
        f
    }

    pub fn degree_range(&self, k: u32) -> Range<usize> {
        let off = degree_offsets(self.n, self.l);
        off[k as usize]..off[k as usize + 1]
    }

    /// Degree of every coefficient slot.
    pub fn degrees(&self) -> Vec<u32> {
        let off = degree_offsets(self.n, self.l);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for k in 0..=self.l {
            out.extend(std::iter::repeat_n(
                k,
                off[k as usize + 1] - off[k as usize],
            ));
        }
        out
    }

    /// Σ_{slots of degree k} c².
    pub fn degree_energy(&self, k: u32) -> f64 {
        self.coeffs[self.degree_range(k)]
            .iter()
            .map(|c| c * c)
            .sum()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Mean value ⨍ f over the sphere.
    pub fn mean(&self) -> f64 {
        self.coeffs[0] / sphere_volume(self.n).sqrt()
    }

    /// Multiply the degree-k block by m(k).
    pub fn map_degrees<F: Fn(u32) -> f64>(&self, m: F) -> Self {
        let degs = self.degrees();
        let mut out = self.clone();
        for (c, k) in out.coeffs.iter_mut().zip(degs) {
            *c *= m(k);
        }
        out
    }

    /// Nonnegative Laplacian, k(k+n-1) per degree.
    pub fn laplacian(&self) -> Self {
        let n = self.n as f64;
        self.map_degrees(|k| k as f64 * (k as f64 + n - 1.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.l), (other.n, other.l));
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    /// Same function viewed with a different band limit (truncating or
    /// zero-padding).
    pub fn with_band(&self, l: u32) -> Self {
        let mut out = Self::zeros(self.n, l);
        let m = out.coeffs.len().min(self.coeffs.len());
        out.coeffs[..m].copy_from_slice(&self.coeffs[..m]);
        out
    }
}

/// Pointwise data of a function at the nodes of a rule: values, tangential
/// gradients (stride n+1) and nonnegative Laplacians.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalJet {
    pub n: u32,
    pub values: Vec<f64>,
    pub grads: Vec<f64>,
    pub laplacians: Vec<f64>,
}

impl NodalJet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grad(&self, i: usize) -> &[f64] {
        let d = self.n as usize + 1;
        &self.grads[i * d..(i + 1) * d]
    }

    pub fn grad_norm2(&self, i: usize) -> f64 {
        self.grad(i).iter().map(|v| v * v).sum()
    }

    /// ⟨∇u, ∇v⟩ at node i.
    pub fn pairing(&self, other: &NodalJet, i: usize) -> f64 {
        self.grad(i)
            .iter()
            .zip(other.grad(i))
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn zeros(n: u32, len: usize) -> Self {
        NodalJet {
            n,
            values: vec![0.0; len],
            grads: vec![0.0; len * (n as usize + 1)],
            laplacians: vec![0.0; len],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        NodalJet {
            n: self.n,
            values: self.values.iter().map(|v| v * s).collect(),
            grads: self.grads.iter().map(|v| v * s).collect(),
            laplacians: self.laplacians.iter().map(|v| v * s).collect(),
        }
    }
}

/// Quadrature rule plus the basis tabulated at its nodes.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub rule: QuadratureRule,
    pub basis: HarmonicBasis,
    /// Basis values, row-major (node, basis index).
    values: Vec<f64>,
    /// Tangential gradients, (node, basis index, component).
    grads: Option<Vec<f64>>,
}

impl SphereGrid {
    /// Grid for band limit `l` with a rule of exactness `degree` (≥ 2l).
    pub fn new(n: u32, l: u32, degree: u32, with_grads: bool) -> Result<Self> {
        if degree < 2 * l {
            return Err(Error::Parameter(format!(
                "rule exactness {degree} below 2L = {}",
                2 * l
            )));
        }
        let rule = QuadratureRule::with_degree(n, degree)?;
        let basis = HarmonicBasis::new(n, l)?;
        let nb = basis.len();
        let dim = n as usize + 1;
        let mut values = vec![0.0; rule.len() * nb];
        let mut grads = if with_grads {
            Some(vec![0.0; rule.len() * nb * dim])
        } else {
            None
        };
        for i in 0..rule.len() {
            let x = rule.node(i);
            let v = &mut values[i * nb..(i + 1) * nb];
            match grads.as_mut() {
                Some(g) => basis.eval(x, v, Some(&mut g[i * nb * dim..(i + 1) * nb * dim])),
                None => basis.eval(x, v, None),
            }
        }
        Ok(SphereGrid {
            rule,
            basis,
            values,
            grads,
        })
    }

    pub fn n(&self) -> u32 {
        self.rule.n
    }

    pub fn l(&self) -> u32 {
        self.basis.l
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    pub fn volume(&self) -> f64 {
        sphere_volume(self.n())
    }

    /// Coefficients Σ_i w_i f_i Y_j(x_i) with no aliasing check.
    pub fn project(&self, samples: &[f64]) -> BandlimitedFunction {
        let nb = self.basis.len();
        let mut coeffs = vec![0.0; nb];
        let mut comps = vec![0.0; nb];
        for i in 0..self.len() {
            let wf = self.rule.weights[i] * samples[i];
            let row = &self.values[i * nb..(i + 1) * nb];
            for j in 0..nb {
                // Kahan per coefficient
                let y = wf * row[j] - comps[j];
                let t = coeffs[j] + y;
                comps[j] = (t - coeffs[j]) - y;
                coeffs[j] = t;
            }
        }
        BandlimitedFunction {
            n: self.n(),
            l: self.l(),
            coeffs,
        }
    }

    /// Projection plus a Parseval check: the energy the samples carry beyond
    /// band L must stay below `tol` (relative to ∫f², floored at 1).
    pub fn analyze(&self, samples: &[f64], tol: f64) -> Result<BandlimitedFunction> {
        let f = self.project(samples);
        let total = self
            .rule
            .integrate(&samples.iter().map(|v| v * v).collect::<Vec<_>>());
        let captured = f.energy();
        let excess = (total - captured).abs();
        if excess > tol * total.max(1.0) {
            return Err(Error::Aliasing(format!(
                "energy beyond band {}: {excess:.3e} of {total:.3e}",
                self.l()
            )));
        }
        Ok(f)
    }

    /// Values at the nodes.
    pub fn synthesize_nodes(&self, f: &BandlimitedFunction) -> Vec<f64> {
        let nb = self.basis.len();
        let m = f.coeffs.len().min(nb);
        (0..self.len())
            .map(|i| {
                let row = &self.values[i * nb..i * nb + m];
                row.iter().zip(&f.coeffs[..m]).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Values, tangential gradients and Laplacians at the nodes.
    pub fn jet(&self, f: &BandlimitedFunction) -> Result<NodalJet> {
        let grads = self
            .grads
            .as_ref()
            .ok_or_else(|| Error::Parameter("grid was built without gradient tables".into()))?;
        let nb = self.basis.len();
        let dim = self.n() as usize + 1;
        let m = f.coeffs.len().min(nb);
        let lap = f.laplacian();
        let mut jet = NodalJet::zeros(self.n(), self.len());
        for i in 0..self.len() {
            let row = &self.values[i * nb..i * nb + m];
            jet.values[i] = row.iter().zip(&f.coeffs[..m]).map(|(a, b)| a * b).sum();
            jet.laplacians[i] = row.iter().zip(&lap.coeffs[..m]).map(|(a, b)| a * b).sum();
            let g = &mut jet.grads[i * dim..(i + 1) * dim];
            let gb = &grads[i * nb * dim..(i + 1) * nb * dim];
            for (j, c) in f.coeffs[..m].iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                for a in 0..dim {
                    g[a] += c * gb[j * dim + a];
                }
            }
        }
        Ok(jet)
    }

    /// Basis values at node i.
    pub fn basis_row(&self, i: usize) -> &[f64] {
        let nb = self.basis.len();
        &self.values[i * nb..(i + 1) * nb]
    }

    /// Basis tangential gradients at node i (stride n+1), if tabulated.
    pub fn basis_grad_row(&self, i: usize) -> Option<&[f64]> {
        let nb = self.basis.len();
        let dim = self.n() as usize + 1;
        self.grads
            .as_ref()
            .map(|g| &g[i * nb * dim..(i + 1) * nb * dim])
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.rule.integrate(values)
    }

    /// ⨍ values with respect to the normalized measure.
    pub fn average(&self, values: &[f64]) -> f64 {
        self.integrate(values) / self.volume()
    }
}

/// Values of f at arbitrary unit vectors (flattened, stride n+1).
pub fn synthesize(f: &BandlimitedFunction, points: &[f64]) -> Result<Vec<f64>> {
    let basis = HarmonicBasis::new(f.n, f.l)?;
    let dim = f.n as usize + 1;
    if points.len() % dim != 0 {
        return Err(Error::Parameter(format!(
            "point buffer length {} not a multiple of {dim}",
            points.len()
        )));
    }
    let mut vals = vec![0.0; basis.len()];
    Ok(points
        .chunks(dim)
        .map(|x| {
            basis.eval(x, &mut vals, None);
            vals.iter().zip(&f.coeffs).map(|(a, b)| a * b).sum()
        })
        .collect())
}

/// Sampled function → coefficients with an aliasing tolerance.
pub fn analyze(samples: &[f64], grid: &SphereGrid, tol: f64) -> Result<BandlimitedFunction> {
    grid.analyze(samples, tol)
}

/// Multiply each degree block by the model operator's eigenvalue.
pub fn spectral_apply(kind: OperatorKind, f: &BandlimitedFunction) -> Result<BandlimitedFunction> {
    let op = ModelOperator::new(kind, f.n)?;
    Ok(f.map_degrees(|k| op.eigenvalue(k)))
}

/// An element of SO(n+1,1) acting on S^n.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMap {
    pub n: u32,
    pub h: DMatrix<f64>,
}

fn signature(n: u32) -> DMatrix<f64> {
    let d = n as usize + 2;
    let mut j = DMatrix::identity(d, d);
    j[(d - 1, d - 1)] = -1.0;
    j
}

impl ConformalMap {
    pub fn identity(n: u32) -> Self {
        let d = n as usize + 2;
        ConformalMap {
            n,
            h: DMatrix::identity(d, d),
        }
    }

    /// Checked constructor: hᵀJh = J within `tol`.
    pub fn from_matrix(n: u32, h: DMatrix<f64>, tol: f64) -> Result<Self> {
        let d = n as usize + 2;
        if h.nrows() != d || h.ncols() != d {
            return Err(Error::Parameter(format!("matrix must be {d}×{d}")));
        }
        let map = ConformalMap { n, h };
        let dev = map.form_defect();
        if dev > tol {
            return Err(Error::Parameter(format!(
                "matrix does not preserve the Lorentz form (defect {dev:.3e})"
            )));
        }
        Ok(map)
    }

    /// max |hᵀJh - J|.
    pub fn form_defect(&self) -> f64 {
        let j = signature(self.n);
        (self.h.transpose() * &j * &self.h - &j).amax()
    }

    /// Rotation by θ in the (e_a, e_b) plane of ℝ^{n+1}.
    pub fn rotation(n: u32, a: usize, b: usize, theta: f64) -> Result<Self> {
        let d = n as usize + 1;
        if a >= d || b >= d || a == b {
            return Err(Error::Parameter(format!("bad rotation plane ({a}, {b})")));
        }
        let mut m = Self::identity(n);
        let (c, s) = (theta.cos(), theta.sin());
        m.h[(a, a)] = c;
        m.h[(b, b)] = c;
        m.h[(a, b)] = -s;
        m.h[(b, a)] = s;
        Ok(m)
    }

    /// Boost of rapidity s mixing e_axis with the timelike direction.
    pub fn boost(n: u32, axis: usize, s: f64) -> Result<Self> {
        let d = n as usize + 1;
        if axis >= d {
            return Err(Error::Parameter(format!("boost axis {axis} out of range")));
        }
        let mut m = Self::identity(n);
        let (c, sh) = (s.cosh(), s.sinh());
        m.h[(axis, axis)] = c;
        m.h[(d, d)] = c;
        m.h[(axis, d)] = sh;
        m.h[(d, axis)] = sh;
        Ok(m)
    }

    pub fn compose(&self, other: &ConformalMap) -> ConformalMap {
        ConformalMap {
            n: self.n,
            h: &self.h * &other.h,
        }
    }

    /// J hᵀ J.
    pub fn inverse(&self) -> ConformalMap {
        let j = signature(self.n);
        ConformalMap {
            n: self.n,
            h: &j * self.h.transpose() * &j,
        }
    }

    fn denominator(&self, y: &[f64]) -> f64 {
        let d = self.n as usize + 1;
        let mut den = self.h[(d, d)];
        for i in 0..d {
            den += self.h[(d, i)] * y[i];
        }
        den
    }

    /// (h·y, Ω) with h·y = h(y,1)[..n+1]/h(y,1)_{n+2} and Ω = 1/h(y,1)_{n+2}.
    pub fn act(&self, y: &[f64]) -> Result<(Vec<f64>, f64)> {
        let d = self.n as usize + 1;
        let den = self.denominator(y);
        if !(den > 0.0) {
            return Err(Error::Domain(format!(
                "Möbius denominator {den} ≤ 0 (wrong sheet)"
            )));
        }
        let mut out = vec![0.0; d];
        for (r, o) in out.iter_mut().enumerate() {
            let mut v = self.h[(r, d)];
            for i in 0..d {
                v += self.h[(r, i)] * y[i];
            }
            *o = v / den;
        }
        Ok((out, 1.0 / den))
    }

    /// The log conformal factor ω = ln Ω = -ln(a + b·y) with its tangential
    /// gradient and nonnegative Laplacian, in closed form.
    pub fn log_factor_jet(&self, y: &[f64]) -> Result<(f64, Vec<f64>, f64)> {
        let d = self.n as usize + 1;
        let w = self.denominator(y);
        if !(w > 0.0) {
            return Err(Error::Domain(format!("Möbius denominator {w} ≤ 0")));
        }
        let b: Vec<f64> = (0..d).map(|i| self.h[(d, i)]).collect();
        let by: f64 = b.iter().zip(y).map(|(p, q)| p * q).sum();
        let grad_w: Vec<f64> = (0..d).map(|i| b[i] - by * y[i]).collect();
        let gw2: f64 = grad_w.iter().map(|v| v * v).sum();
        let lap_w = self.n as f64 * by;
        let omega = -w.ln();
        let grad: Vec<f64> = grad_w.iter().map(|v| -v / w).collect();
        let lap = -lap_w / w - gw2 / (w * w);
        Ok((omega, grad, lap))
    }

    /// Nodal jet of the log factor on a grid.
    pub fn log_factor_nodal(&self, rule: &QuadratureRule) -> Result<NodalJet> {
        let dim = self.n as usize + 1;
        let mut jet = NodalJet::zeros(self.n, rule.len());
        for i in 0..rule.len() {
            let (w, g, l) = self.log_factor_jet(rule.node(i))?;
            jet.values[i] = w;
            jet.grads[i * dim..(i + 1) * dim].copy_from_slice(&g);
            jet.laplacians[i] = l;
        }
        Ok(jet)
    }
}

/// Apply a conformal map to a point.
pub fn mobius_action(h: &ConformalMap, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    h.act(y)
}

/// A basis conformal vector field on S^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConformalField {
    /// y_a e_b - y_b e_a (Killing).
    Rotation { a: usize, b: usize },
    /// Gradient of the coordinate y_a: e_a - y_a y.
    Boost { a: usize },
}

impl ConformalField {
    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; y.len()];
        match *self {
            ConformalField::Rotation { a, b } => {
                v[b] += y[a];
                v[a] -= y[b];
            }
            ConformalField::Boost { a } => {
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = -y[a] * y[i];
                }
                v[a] += 1.0;
            }
        }
        v
    }

    /// Divergence on S^n.
    pub fn divergence(&self, y: &[f64]) -> f64 {
        match *self {
            ConformalField::Rotation { .. } => 0.0,
            ConformalField::Boost { a } => -((y.len() - 1) as f64) * y[a],
        }
    }

    /// ω_X = div X / n, so that L_X g = 2ω_X g.
    pub fn omega(&self, y: &[f64]) -> f64 {
        self.divergence(y) / ((y.len() - 1) as f64)
    }

    pub fn is_killing(&self) -> bool {
        matches!(self, ConformalField::Rotation { .. })
    }

    pub fn label(&self) -> String {
        match *self {
            ConformalField::Rotation { a, b } => format!("rotation({},{})", a + 1, b + 1),
            ConformalField::Boost { a } => format!("boost({})", a + 1),
        }
    }
}

/// Basis of the conformal algebra so(n+1,1): rotations then boosts.
pub fn conformal_vector_fields(n: u32) -> Result<Vec<ConformalField>> {
    if n < 2 {
        return Err(Error::Parameter(format!(
            "conformal fields need n ≥ 2, got {n}"
        )));
    }
    let d = n as usize + 1;
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for a in 0..d {
        for b in a + 1..d {
            out.push(ConformalField::Rotation { a, b });
        }
    }
    for a in 0..d {
        out.push(ConformalField::Boost { a });
    }
    Ok(out)
}
