//! Numerical radius machinery for an ordinary square matrix M (the compressed operator).

use nalgebra::DMatrix;

use crate::core_linalg::{c, eig_of_hermitian, CVector, C64};

pub const SWEEP_POINTS: usize = 720;
const THETA_TOL: f64 = 1e-10;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// y* M y
pub fn form(m: &DMatrix<C64>, y: &CVector) -> C64 {
    y.dotc(&(m * y))
}

/// (H, K) with Re(e^{iθ}M) = cos θ·H + sin θ·K.
pub fn cartesian_pencil(m: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let ma = m.adjoint();
    let h = (m + &ma) * c(0.5, 0.0);
    let k = (m - &ma) * c(0.0, 0.5);
    (h, k)
}

fn pencil_at(h: &DMatrix<C64>, k: &DMatrix<C64>, theta: f64) -> DMatrix<C64> {
    h * c(theta.cos(), 0.0) + k * c(theta.sin(), 0.0)
}

fn extreme_eigs(m: &DMatrix<C64>) -> (f64, f64) {
    let e = m.symmetric_eigenvalues();
    let lo = e.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    let hi = e.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x));
    (lo, hi)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > THETA_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes a π- or 2π-periodic function given on a uniform grid: refines the best
/// few local maxima of the grid by golden section.
fn periodic_max(f: &dyn Fn(f64) -> f64, period: f64, points: usize) -> (f64, f64) {
    let h = period / points as f64;
    let vals: Vec<f64> = (0..points).map(|j| f(j as f64 * h)).collect();
    let mut peaks: Vec<usize> = (0..points)
        .filter(|&j| {
            let prev = vals[(j + points - 1) % points];
            let next = vals[(j + 1) % points];
            vals[j] >= prev && vals[j] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(3);
    let mut best = (0.0, f64::NEG_INFINITY);
    for &j in &peaks {
        let t = j as f64 * h;
        let cand = golden_max(f, t - h, t + h);
        let cand = if vals[j] > cand.1 { (t, vals[j]) } else { cand };
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// w(M) by the θ-sweep of the spectral radius of Re(e^{iθ}M) over [0, π).
/// Returns (value, unit witness y with |y*My| = value).
pub fn numerical_radius(m: &DMatrix<C64>) -> (f64, CVector) {
    let (h, k) = cartesian_pencil(m);
    let g = |t: f64| {
        let (lo, hi) = extreme_eigs(&pencil_at(&h, &k, t));
        hi.max(-lo)
    };
    let (theta, _) = periodic_max(&g, std::f64::consts::PI, SWEEP_POINTS);
    let spec = eig_of_hermitian(pencil_at(&h, &k, theta)).expect("hermitian pencil converges");
    let last = spec.eigenvalues.len() - 1;
    let col = if spec.eigenvalues[last] >= -spec.eigenvalues[0] { last } else { 0 };
    let y: CVector = spec.eigenvectors.column(col).into_owned();
    (form(m, &y).norm(), y)
}

/// max_θ λ_min(Re(e^{iθ}M)) over [0, 2π) with the maximizing θ and eigenvector.
/// Positive exactly when 0 ∉ W(M), and then equal to dist(0, W(M)).
pub fn crawford_sweep(m: &DMatrix<C64>) -> (f64, f64, CVector) {
    let (h, k) = cartesian_pencil(m);
    let g = |t: f64| extreme_eigs(&pencil_at(&h, &k, t)).0;
    let (theta, val) = periodic_max(&g, std::f64::consts::TAU, SWEEP_POINTS);
    let spec = eig_of_hermitian(pencil_at(&h, &k, theta)).expect("hermitian pencil converges");
    (val, theta, spec.eigenvectors.column(0).into_owned())
}
