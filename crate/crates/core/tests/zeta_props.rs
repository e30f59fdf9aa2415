use confsym::poly::{rat, RatPoly};
use confsym::spectra::ModelOperator;
use confsym::sphere::compensated_sum;
use confsym::zeta_heat::*;
use proptest::prelude::*;

fn spec(op: ModelOperator) -> PolySpectrum {
    PolySpectrum::from_operator(&op).unwrap()
}

/// ln A (Glaisher) from the hyperfactorial asymptotics.
fn ln_glaisher() -> f64 {
    let n = 100.0f64;
    let s = compensated_sum((1..=100).map(|k| (k as f64) * (k as f64).ln()));
    s - (n * n / 2.0 + n / 2.0 + 1.0 / 12.0) * n.ln() + n * n / 4.0 - 1.0 / (720.0 * n * n)
}

#[test]
fn glaisher_oracle_sanity() {
    assert!((ln_glaisher() - 0.248_754_477_033_784_3).abs() < 1e-10);
}

#[test]
fn laplace_s2_determinant_matches_glaisher() {
    // ζ'_R(−1) = 1/12 − ln A; ζ'_{S²}(0) = 4ζ'_R(−1) − 1/2
    let zr = 1.0 / 12.0 - ln_glaisher();
    let expect = (0.5 - 4.0 * zr).exp();
    let det = zeta_determinant(&spec(ModelOperator::laplace(2).unwrap())).unwrap();
    assert!((det - expect).abs() < 1e-9 * expect, "{det} vs {expect}");
}

#[test]
fn determinant_scaling() {
    for op in [
        ModelOperator::laplace(2).unwrap(),
        ModelOperator::yamabe(4).unwrap(),
        ModelOperator::yamabe(3).unwrap(),
    ] {
        let base = spec(op);
        let z0 = spectral_zeta(&base, 0.0).unwrap();
        for c in [rat(3, 1), rat(1, 7)] {
            let scaled = PolySpectrum::custom("scaled", base.eigen.scale(&c), base.mult.clone(), 0);
            let zs = spectral_zeta(&scaled, 0.0).unwrap();
            let cf = confsym::poly::rat_to_f64(&c);
            // ζ_c(0) = ζ(0), ζ_c'(0) = ζ'(0) − ζ(0) ln c
            assert!((zs.value - z0.value).abs() < 1e-10);
            assert!((zs.derivative - (z0.derivative - z0.value * cf.ln())).abs() < 1e-9);
        }
    }
}

#[test]
fn zeta_matches_direct_sums() {
    for (op, ss) in [
        (ModelOperator::laplace(2).unwrap(), vec![2.0, 3.0, 4.0]),
        (ModelOperator::yamabe(3).unwrap(), vec![2.0, 3.0, 4.0]),
        (ModelOperator::yamabe(4).unwrap(), vec![3.0, 4.0]),
    ] {
        let sp = spec(op);
        for s in ss {
            let z = spectral_zeta(&sp, s).unwrap().value;
            // brute force plus the leading-order tail ∫_K^∞ x^{e-ds}
            let kmax = 200_000u32;
            let brute = compensated_sum((0..kmax).filter_map(|k| {
                let l = sp.eigenvalue(k);
                (l > 0.0).then(|| sp.multiplicity(k) * l.powf(-s))
            }));
            let (d, e) = (sp.eigen.degree() as f64, sp.mult.degree() as f64);
            let lead_m = confsym::poly::rat_to_f64(&sp.mult.leading());
            let lead_l = confsym::poly::rat_to_f64(&sp.eigen.leading());
            let k = kmax as f64 - 0.5;
            let brute = brute + lead_m * lead_l.powf(-s) * k.powf(e + 1.0 - d * s) / (d * s - e - 1.0);
            assert!((z - brute).abs() < 1e-6 * z.abs().max(1.0), "s={s}: {z} vs {brute}");
            let d = zeta_direct_sum(&sp, s, 5000).unwrap();
            assert!((z - d).abs() < 1e-6 * z.abs().max(1.0));
        }
    }
    assert!(zeta_direct_sum(&spec(ModelOperator::laplace(2).unwrap()), 1.0, 100).is_err());
}

#[test]
fn zeta_zero_of_s2_laplacian() {
    // a₁ = 1/3 minus the one-dimensional kernel
    let z = spectral_zeta(&spec(ModelOperator::laplace(2).unwrap()), 0.0).unwrap();
    assert!((z.value - (1.0 / 3.0 - 1.0)).abs() < 1e-12);
    assert_eq!(z.kernel_dimension, 1);
}

#[test]
fn heat_trace_s2_at_one() {
    let direct: f64 = (0..20).map(|k: i32| (2 * k + 1) as f64 * (-(k * (k + 1)) as f64).exp()).sum();
    let t = heat_trace(&spec(ModelOperator::laplace(2).unwrap()), 1.0).unwrap();
    assert!((t - direct).abs() < 1e-14);
    assert!((t - 1.418443).abs() < 1e-6);
}

#[test]
fn yamabe_s4_trace_against_compensated_sum() {
    let sp = spec(ModelOperator::yamabe(4).unwrap());
    for t in [0.05, 0.3, 2.0] {
        let direct = compensated_sum((0..2000u32).map(|k| {
            let kk = k as f64;
            confsym::spectra::harmonic_dim_u64(5, k) as f64 * (-t * (kk + 1.0) * (kk + 2.0)).exp()
        }));
        let h = heat_trace(&sp, t).unwrap();
        assert!((h - direct).abs() < 1e-12 * direct, "t={t}");
    }
}

#[test]
fn yamabe_s4_zeta_zero_two_ways() {
    let sp = spec(ModelOperator::yamabe(4).unwrap());
    let z = spectral_zeta(&sp, 0.0).unwrap().value;
    let u2 = integrated_invariant(2, 4, 1.0 / 6.0).unwrap();
    assert!((z + 1.0 / 90.0).abs() < 1e-8);
    assert!((u2 + 1.0 / 90.0).abs() < 1e-8);
    assert!((z - u2).abs() < 1e-9);
}

#[test]
fn weyl_exponents() {
    for n in 2..=5u32 {
        let e = weyl_exponent(&spec(ModelOperator::laplace(n).unwrap()), 100, 400).unwrap();
        let expect = 2.0 / n as f64;
        assert!((e - expect).abs() < 0.02 * expect, "n={n}: {e}");
    }
}

#[test]
fn custom_spectrum_matches_riemann_zeta() {
    // λ_k = k, m_k = 1 for k ≥ 1 gives the Riemann zeta function.
    let sp = PolySpectrum::custom("riemann", RatPoly::linear(rat(0, 1)), RatPoly::one(), 1);
    let z0 = spectral_zeta(&sp, 0.0).unwrap();
    assert!((z0.value + 0.5).abs() < 1e-12);
    assert!((z0.derivative + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-10);
    let z2 = spectral_zeta(&sp, 2.0).unwrap().value;
    assert!((z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heat_trace_decreasing_in_t(t in 0.01f64..3.0, dt in 0.001f64..0.5, n in 2u32..6) {
        let sp = spec(ModelOperator::yamabe(n).unwrap());
        let a = heat_trace(&sp, t).unwrap();
        let b = heat_trace(&sp, t + dt).unwrap();
        prop_assert!(b < a);
    }
}
