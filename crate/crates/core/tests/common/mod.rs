#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use seminorm_lab::core_linalg::{c, CVector, ComplexMatrix, TolerancePolicy, C64};
use seminorm_lab::generators::random::{derive_seed, rng_from};
use seminorm_lab::generators::{generate, InstanceSpec, OperatorInstance, Tag};
use seminorm_lab::semi_hilbert::SemiHilbertContext;

use rand::Rng;

/// Real symmetric embedding [[Re, −Im], [Im, Re]] of a Hermitian matrix; its spectrum
/// is the complex spectrum with every eigenvalue doubled.
pub fn real_embedding(h: &DMatrix<C64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

pub fn lambda_max_oracle(h: &DMatrix<C64>) -> f64 {
    let herm = (h + h.adjoint()) * c(0.5, 0.0);
    SymmetricEigen::new(real_embedding(&herm)).eigenvalues.max()
}

pub fn spectral_norm_oracle(m: &DMatrix<C64>) -> f64 {
    lambda_max_oracle(&(m.adjoint() * m)).max(0.0).sqrt()
}

/// max over θ of λ_max(Re(e^{iθ}M)): dense grid then ternary refinement around the
/// best few grid points.
pub fn numerical_radius_oracle(m: &DMatrix<C64>) -> f64 {
    let f = |t: f64| {
        let z = m * C64::from_polar(1.0, t);
        lambda_max_oracle(&z)
    };
    let grid = 2048;
    let step = std::f64::consts::TAU / grid as f64;
    let mut vals: Vec<(f64, f64)> = (0..grid).map(|k| (f(k as f64 * step), k as f64 * step)).collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = vals[0].0;
    for &(_, t0) in vals.iter().take(6) {
        let (mut a, mut b) = (t0 - step, t0 + step);
        for _ in 0..80 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if f(m1) < f(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        best = best.max(f(0.5 * (a + b)));
    }
    best
}

/// Compression oracle: with A = V diag(λ) V*, the matrix of T on range(A)
/// in A-orthonormal coordinates, built from the context's spectrum.
pub fn compress_oracle(ctx: &SemiHilbertContext, t: &ComplexMatrix) -> DMatrix<C64> {
    let (v, lam) = ctx.eigen();
    let idx: Vec<usize> = (0..lam.len()).filter(|&k| lam[k] > 0.0).collect();
    let r = idx.len();
    let vr = DMatrix::from_fn(v.rows(), r, |i, j| v[(i, idx[j])]);
    let mut m = vr.adjoint() * t.as_na() * &vr;
    for i in 0..r {
        for j in 0..r {
            m[(i, j)] *= (lam[idx[i]] / lam[idx[j]]).sqrt();
        }
    }
    m
}

/// Seed, dimension and rank for the i-th instance of a mixed-shape sweep.
pub fn shape(base: u64, i: u64) -> (u64, usize, usize) {
    let seed = derive_seed(base, i);
    let mut rng = rng_from(derive_seed(seed, 77));
    let dim = rng.random_range(2..=6);
    let rank = rng.random_range(1..=dim);
    (seed, dim, rank)
}

pub fn instance(base: u64, i: u64, tags: &[Tag], n: usize) -> OperatorInstance {
    let (seed, dim, mut rank) = shape(base, i);
    if tags.contains(&Tag::NilpotentAT2) {
        rank = rank.max(2);
    }
    generate(&InstanceSpec::new(dim, rank, tags, n, seed)).expect("generator succeeds")
}

pub fn identity_ctx(n: usize) -> SemiHilbertContext {
    SemiHilbertContext::new(&ComplexMatrix::identity(n), TolerancePolicy::default()).unwrap()
}

pub fn unit(n: usize, k: usize) -> CVector {
    CVector::from_fn(n, |i, _| if i == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
