use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::core_linalg::{c, CVector, ComplexMatrix, C64};

pub type LabRng = ChaCha8Rng;

/// Counter-based child seed: splitmix64 finalizer over (parent, stream).
/// Children of one parent are independent of the order they are requested in.
pub fn derive_seed(parent: u64, stream: u64) -> u64 {
    let mut z = parent
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1)))
        .rotate_left(17)
        ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: E|z|² = 1.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(s * re, s * im)
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    // row-major draw order, fixed for reproducibility
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Haar unitary from QR of a Ginibre matrix with the phases of diag(R) divided out.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = ginibre(rng, n, n);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Wishart-type PSD block G G* / n.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = ginibre(rng, n, n);
    let p = &g * g.adjoint() * c(1.0 / n as f64, 0.0);
    (&p + p.adjoint()) * c(0.5, 0.0)
}

/// Normal matrix U diag(z) U* with complex Gaussian spectrum.
pub fn random_normal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let u = haar_unitary(rng, n);
    let mut d = u.clone();
    for j in 0..n {
        let z = complex_normal(rng);
        for i in 0..n {
            d[(i, j)] *= z;
        }
    }
    d * u.adjoint()
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = CVector::from_iterator(n, (0..n).map(|_| complex_normal(rng)));
        let nv = v.norm();
        if nv > 1e-12 {
            return v / c(nv, 0.0);
        }
    }
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_na(ginibre(rng, n, n)).expect("gaussian entries are finite")
}
