use confsym::conformal_lab::*;
use confsym::sphere::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn coordinate(grid: &SphereGrid, axis: usize, a: f64) -> BandlimitedFunction {
    let s: Vec<f64> = (0..grid.len()).map(|i| a * grid.rule.node(i)[axis]).collect();
    grid.analyze(&s, 1e-12).unwrap()
}

#[test]
fn onofri_closed_form_for_linear_input() {
    // F = a·y: ⨍e^F = sinh a / a, ⨍|∇F|²/4 = a²/6
    let grid = lab_grid(2, 4).unwrap();
    for a in [0.1, 0.7, 1.5, 3.0] {
        let f = coordinate(&grid, 2, a);
        let d = sharp_inequality_deficit(&grid, DeficitKind::OnofriEndpoint, &f).unwrap();
        let expect = a * a / 6.0 - (a.sinh() / a).ln();
        assert!((d.value - expect).abs() < 1e-12, "a={a}: {} vs {expect}", d.value);
    }
}

#[test]
fn beckner_s1_closed_form_for_linear_input() {
    // On S⁴, t = y₅ has density (3/4)(1 − t²) and ⨍t² = 1/5.
    let grid = lab_grid(4, 2).unwrap();
    for a in [0.2, 1.0, 2.0] {
        let f = coordinate(&grid, 4, a);
        let g = 2.0 * a.sinh() / a;
        let g2 = 2.0 * (a.sinh() / a - 2.0 * a.cosh() / (a * a) + 2.0 * a.sinh() / a.powi(3));
        let mean_exp = 0.75 * (g - g2);
        let expect = a * a / 10.0 - mean_exp.ln();
        let r = beckner_functionals_s4(&grid, &f, BecknerBeta::default()).unwrap();
        assert!((r.s1 - expect).abs() < 1e-10, "a={a}: {} vs {expect}", r.s1);
    }
}

#[test]
fn polyakov_scales_with_area_for_constants() {
    let grid = lab_grid(2, 2).unwrap();
    for c in [-0.5, 0.25, 1.0] {
        let w = grid.jet(&BandlimitedFunction::constant(2, 2, c)).unwrap();
        let r = polyakov_report(&grid, &w).unwrap();
        assert!((r.area_ratio - (2.0 * c).exp()).abs() < 1e-12);
    }
}

fn rotated(grid: &SphereGrid, f: &BandlimitedFunction, theta: f64) -> BandlimitedFunction {
    let m = ConformalMap::rotation(f.n, 0, 1, theta).unwrap();
    let pts: Vec<f64> = (0..grid.len())
        .flat_map(|i| m.act(grid.rule.node(i)).unwrap().0)
        .collect();
    grid.analyze(&synthesize(f, &pts).unwrap(), 1e-10).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn onofri_nonnegative_and_shift_invariant(seed in 0u64..10_000, c in -2.0f64..2.0) {
        let grid = lab_grid(2, 4).unwrap();
        let f = BandlimitedFunction::random(2, 4, 1.0, &mut ChaCha8Rng::seed_from_u64(seed));
        let d = sharp_inequality_deficit(&grid, DeficitKind::OnofriEndpoint, &f).unwrap().value;
        prop_assert!(d >= -DEFICIT_TOLERANCE);
        let g = f.add(&BandlimitedFunction::constant(2, 4, c));
        let e = sharp_inequality_deficit(&grid, DeficitKind::OnofriEndpoint, &g).unwrap().value;
        prop_assert!((d - e).abs() < 1e-11);
    }

    #[test]
    fn deficits_rotation_invariant(seed in 0u64..10_000, theta in 0.0f64..6.3) {
        let grid = lab_grid(2, 4).unwrap();
        // Positive inputs keep |F|^p smooth, so the rule stays spectrally accurate.
        let f = BandlimitedFunction::random(2, 4, 0.6, &mut ChaCha8Rng::seed_from_u64(seed))
            .add(&BandlimitedFunction::constant(2, 4, 4.0));
        let g = rotated(&grid, &f, theta);
        for kind in [DeficitKind::OnofriEndpoint, DeficitKind::HlsSpectral { p: 1.5 }] {
            let a = sharp_inequality_deficit(&grid, kind, &f).unwrap().value;
            let b = sharp_inequality_deficit(&grid, kind, &g).unwrap().value;
            prop_assert!((a - b).abs() < 1e-9, "{kind:?}: {a} vs {b}");
        }
    }

    #[test]
    fn hls_and_log_sobolev_scale_invariant(seed in 0u64..10_000, s in 0.1f64..5.0) {
        let grid = lab_grid(2, 4).unwrap();
        let f = BandlimitedFunction::random(2, 4, 1.0, &mut ChaCha8Rng::seed_from_u64(seed));
        for p in [1.2, 1.8] {
            let a = sharp_inequality_deficit(&grid, DeficitKind::HlsSpectral { p }, &f).unwrap().value;
            let b = sharp_inequality_deficit(&grid, DeficitKind::HlsSpectral { p }, &f.scale(s)).unwrap().value;
            prop_assert!(a >= -DEFICIT_TOLERANCE);
            prop_assert!((b - s * s * a).abs() < 1e-9 * (1.0 + s * s));
        }
        let u = normalize_l2(&f).unwrap();
        let v = normalize_l2(&f.scale(s)).unwrap();
        let a = sharp_inequality_deficit(&grid, DeficitKind::LogSobolev, &u).unwrap().value;
        let b = sharp_inequality_deficit(&grid, DeficitKind::LogSobolev, &v).unwrap().value;
        prop_assert!(a >= -DEFICIT_TOLERANCE);
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn gauss_bonnet_for_random_factors(seed in 0u64..10_000, scale in 0.05f64..0.6) {
        let grid = lab_grid(2, 3).unwrap();
        let om = BandlimitedFunction::random(2, 3, scale, &mut ChaCha8Rng::seed_from_u64(seed));
        let w = grid.jet(&om).unwrap();
        prop_assert!((gauss_bonnet(&grid, &w).unwrap() - 4.0 * PI).abs() < 1e-7);
        for x in conformal_vector_fields(2).unwrap() {
            prop_assert!(pohozaev_residual(&grid, &w, &x).unwrap() < 1e-7);
        }
    }

    #[test]
    fn beckner_nonnegative(seed in 0u64..10_000, scale in 0.05f64..1.0) {
        let grid = lab_grid(4, 2).unwrap();
        let f = BandlimitedFunction::random(4, 2, scale, &mut ChaCha8Rng::seed_from_u64(seed));
        let r = beckner_functionals_s4(&grid, &f, BecknerBeta::default()).unwrap();
        prop_assert!(r.s1 >= -DEFICIT_TOLERANCE && r.s2 >= -DEFICIT_TOLERANCE);
        let shifted = f.add(&BandlimitedFunction::constant(4, 2, 0.9));
        let q = beckner_functionals_s4(&grid, &shifted, BecknerBeta::default()).unwrap();
        prop_assert!((q.s1 - r.s1).abs() < 1e-11 && (q.s2 - r.s2).abs() < 1e-11);
    }
}
