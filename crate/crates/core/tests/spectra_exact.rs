use confsym::poly::rat;
use confsym::spectra::*;
use num::{BigInt, BigRational};
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[test]
fn yamabe_and_gjms_identities() {
    for n in 3..=10u32 {
        let half = rat(n as i64, 2);
        for k in 0..=50u32 {
            let kk = q(k as i64);
            let shifted = (&kk + &half) * (&kk + &half - q(1));
            let y = yamabe_eigenvalue(n, k);
            assert_eq!(shifted, y, "n={n} k={k}");
            // Laplacian plus c_n·n(n−1)
            let lap = BigRational::from_integer(laplace_eigenvalue(n, k));
            assert_eq!(lap + rat((n * (n - 2)) as i64, 4), y);
            assert_eq!(gjms_eigenvalue(n, 1, k).unwrap(), y);
        }
    }
}

#[test]
fn paneitz_on_s4() {
    for k in 0..=50i64 {
        let expect = q(k * (k + 1) * (k + 2) * (k + 3));
        assert_eq!(gjms_eigenvalue(4, 2, k as u32).unwrap(), expect);
    }
}

#[test]
fn tables_match_harmonic_counts() {
    for n in 2..=6u32 {
        for op in [ModelOperator::laplace(n).unwrap(), ModelOperator::yamabe(n).unwrap()] {
            let t = spectrum_table(op, 30);
            assert!(t.is_nondecreasing());
            for line in &t.lines {
                assert_eq!(line.multiplicity, harmonic_dim(n + 1, line.k));
            }
        }
    }
    assert!(spectrum_table(ModelOperator::yamabe(3).unwrap(), 20).is_positive());
}

#[test]
fn harmonic_dims_are_differences_of_binomials() {
    // dim H^k(ℝ^p) = C(k+p−1, p−1) − C(k+p−3, p−1)
    fn binom(n: i64, k: i64) -> BigInt {
        if n < k || k < 0 || n < 0 {
            return BigInt::from(0);
        }
        let mut r = BigInt::from(1);
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    }
    for p in 2..=10i64 {
        for k in 0..=40i64 {
            let e = binom(k + p - 1, p - 1) - binom(k + p - 3, p - 1);
            assert_eq!(harmonic_dim(p as u32, k as u32), e, "p={p} k={k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn knapp_stein_strictly_decreasing(n in 2u32..12, p in 1.01f64..1.99) {
        let mut prev = knapp_stein_gamma(n, p, 0).unwrap();
        prop_assert_eq!(prev, 1.0);
        for k in 1..200 {
            let g = knapp_stein_gamma(n, p, k).unwrap();
            prop_assert!(g < prev && g > 0.0);
            prev = g;
        }
        prop_assert!(knapp_stein_gamma(n, p, 20000).unwrap() < prev);
    }
}
