mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use seminorm_lab::core_linalg::{
    c, func_calculus, hermitian_eig, moore_penrose, power_fn, psd_sqrt, ComplexMatrix, TolerancePolicy, C64,
};
use seminorm_lab::generators::random::{ginibre, haar_unitary, random_hermitian, rng_from};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn wrap(m: DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_na(m).unwrap()
}

/// V diag(λ) V*
fn from_spectrum(v: &DMatrix<C64>, lam: &[f64]) -> DMatrix<C64> {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(lam.len(), lam.iter().map(|&l| c(l, 0.0))));
    v * d * v.adjoint()
}

fn penrose_residual(m: &ComplexMatrix, p: &ComplexMatrix) -> f64 {
    let scale = 1.0 + m.fro_norm() * p.fro_norm();
    let mpm = &(m * p) * m;
    let pmp = &(p * m) * p;
    let mp = m * p;
    let pm = p * m;
    [
        (&mpm - m).fro_norm() / (1.0 + m.fro_norm()),
        (&pmp - p).fro_norm() / (1.0 + p.fro_norm()),
        mp.asymmetry() / scale,
        pm.asymmetry() / scale,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

#[test]
fn seeded_hermitian_reconstructs() {
    let mut rng = rng_from(42);
    let v = haar_unitary(&mut rng, 5);
    let lam = [-2.5, -0.1, 0.7, 1.3, 4.0];
    let m = wrap(from_spectrum(&v, &lam));
    let spec = hermitian_eig(&m, &tol()).unwrap();
    for (a, b) in spec.eigenvalues.iter().zip(lam) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
    assert!((&spec.reconstruct() - &m).fro_norm() <= 1e-12 * (1.0 + m.fro_norm()));
    let gram = spec.eigenvectors.adjoint() * &spec.eigenvectors;
    assert!(gram.rel_dist(&ComplexMatrix::identity(5)) < 1e-12);
}

#[test]
fn rank_two_pinv_matches_hand_inverse() {
    let mut rng = rng_from(7);
    let v = haar_unitary(&mut rng, 4);
    let m = wrap(from_spectrum(&v, &[3.0, 0.25, 0.0, 0.0]));
    let expected = wrap(from_spectrum(&v, &[1.0 / 3.0, 4.0, 0.0, 0.0]));
    let p = moore_penrose(&m, &tol()).unwrap();
    assert!(p.rel_dist(&expected) < 1e-10);
    assert!(penrose_residual(&m, &p) < 1e-10);
}

#[test]
fn sqrt_of_two_by_two_by_eigen_oracle() {
    // eigenvalues 1 and 3 with eigenvectors (1, −1)/√2 and (1, 1)/√2
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let v = DMatrix::from_row_slice(2, 2, &[c(s2, 0.0), c(s2, 0.0), c(-s2, 0.0), c(s2, 0.0)]);
    let expected = wrap(from_spectrum(&v, &[1.0, 3f64.sqrt()]));
    let s = psd_sqrt(&ComplexMatrix::real(2, 2, &[2.0, 1.0, 1.0, 2.0]), &tol()).unwrap();
    assert!(s.rel_dist(&expected) < 1e-12);
}

#[test]
fn fractional_power_of_diagonal() {
    let m = ComplexMatrix::diag_real(&[1.0, 32.0]);
    let p = func_calculus(&m, &power_fn(0.3), &tol()).unwrap();
    assert!(p.rel_dist(&ComplexMatrix::diag_real(&[1.0, 32f64.powf(0.3)])) < 1e-14);
}

fn seeds() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn penrose_identities_mixed_rank((seed, n) in seeds(), k in 0usize..=8) {
        let mut rng = rng_from(seed);
        let k = k.min(n);
        let m = wrap(ginibre(&mut rng, n, k) * ginibre(&mut rng, k, n));
        let p = moore_penrose(&m, &tol()).unwrap();
        prop_assert!(penrose_residual(&m, &p) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrt_squares_back((seed, n) in seeds(), k in 1usize..=8) {
        let mut rng = rng_from(seed);
        let g = ginibre(&mut rng, n, k.min(n));
        let m = wrap(&g * g.adjoint());
        let s = psd_sqrt(&m, &tol()).unwrap();
        prop_assert!((&s * &s).rel_dist(&m) < 1e-9);
    }

    #[test]
    fn complementary_powers_multiply_to_m((seed, n) in seeds(), alpha in 0.0f64..=1.0) {
        let mut rng = rng_from(seed);
        let g = ginibre(&mut rng, n, n);
        let m = wrap(&g * g.adjoint());
        let f = func_calculus(&m, &power_fn(alpha), &tol()).unwrap();
        let h = func_calculus(&m, &power_fn(1.0 - alpha), &tol()).unwrap();
        prop_assert!((&f * &h).rel_dist(&m) < 1e-9);
    }

    #[test]
    fn spectrum_is_unitarily_invariant((seed, n) in seeds()) {
        let mut rng = rng_from(seed);
        let h = random_hermitian(&mut rng, n);
        let u = haar_unitary(&mut rng, n);
        let a = hermitian_eig(&wrap(h.clone()), &tol()).unwrap().eigenvalues;
        let b = hermitian_eig(&wrap(&u * h * u.adjoint()), &tol()).unwrap().eigenvalues;
        let scale = 1.0 + a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn eigenvalues_match_real_embedding((seed, n) in seeds()) {
        let mut rng = rng_from(seed);
        let h = random_hermitian(&mut rng, n);
        let top = *hermitian_eig(&wrap(h.clone()), &tol()).unwrap().eigenvalues.last().unwrap();
        prop_assert!((top - common::lambda_max_oracle(&h)).abs() < 1e-10 * (1.0 + top.abs()));
    }

    #[test]
    fn eigendecomposition_reconstructs((seed, n) in seeds(), repeats in 0usize..4) {
        let mut rng = rng_from(seed);
        let v = haar_unitary(&mut rng, n);
        let mut lam: Vec<f64> = (0..n).map(|k| (k as f64 - 2.0) * 1.7 + (seed % 7) as f64 * 0.1).collect();
        for k in 1..=repeats.min(n - 1) {
            lam[k] = lam[0];
        }
        let m = wrap(from_spectrum(&v, &lam));
        let spec = hermitian_eig(&m, &tol()).unwrap();
        prop_assert!((&spec.reconstruct() - &m).fro_norm() <= 1e-12 * (1.0 + m.fro_norm()));
        let gram = spec.eigenvectors.adjoint() * &spec.eigenvectors;
        prop_assert!(gram.rel_dist(&ComplexMatrix::identity(n)) < 1e-12);
    }
}
