//! Vector searches for the quantified inequalities. Everything runs in compressed
//! coordinates, where A-unit vectors are plain unit vectors of ℂ^r.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::core_linalg::{c, CVector, C64};
use crate::generators::random::{random_unit, rng_from, LabRng};
use crate::radii::sphere::normalize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBudget {
    pub samples: usize,
    pub refine: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { samples: 256, refine: 2, iterations: 60 }
    }
}

fn herm(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Pseudo-inverse of the Hermitian part and the eigenvectors it treats as kernel
/// (non-positive or below 1e-12 of the largest magnitude).
fn psd_pinv(m: &DMatrix<C64>) -> (DMatrix<C64>, Vec<CVector>) {
    let n = m.nrows();
    let eig = herm(m).symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let cut = 1e-12 * scale;
    let mut pinv = DMatrix::zeros(n, n);
    let mut kernel = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k).into_owned();
        if l > cut {
            pinv += &v * v.adjoint() * c(1.0 / l, 0.0);
        } else {
            kernel.push(v);
        }
    }
    (pinv, kernel)
}

fn quad(m: &DMatrix<C64>, u: &CVector) -> f64 {
    u.dotc(&(m * u)).re
}

/// Approximate maximizer of |v*Cu|² / ((u*Xu)(v*Yv)) over unit u, v, for Hermitian PSD
/// X and Y. Random pairs, kernel probes, then alternating exact partial maximization
/// (v ∝ Y⁺Cu, u ∝ X⁺C*v) on the best candidates.
pub(crate) fn bilinear_ratio(
    cm: &DMatrix<C64>,
    x: &DMatrix<C64>,
    y: &DMatrix<C64>,
    seed: u64,
    budget: SearchBudget,
) -> (CVector, CVector) {
    let r = cm.nrows();
    let scale = cm.norm();
    let floor = 1e-24 * scale * scale + 1e-300;
    let score = |u: &CVector, v: &CVector| {
        let num = v.dotc(&(cm * u)).norm_sqr();
        num / (quad(x, u).max(0.0) * quad(y, v).max(0.0) + floor)
    };
    let (xp, xker) = psd_pinv(x);
    let (yp, yker) = psd_pinv(y);
    let ch = cm.adjoint();

    let mut rng = rng_from(seed);
    let mut cands: Vec<(f64, CVector, CVector)> = Vec::with_capacity(budget.samples + xker.len() + yker.len());
    for _ in 0..budget.samples {
        let u = random_unit(&mut rng, r);
        let v = random_unit(&mut rng, r);
        cands.push((score(&u, &v), u, v));
    }
    for k in &xker {
        let cu = cm * k;
        if cu.norm() > 0.0 {
            let v = normalize(&cu);
            cands.push((score(k, &v), k.clone(), v));
        }
    }
    for k in &yker {
        let chv = &ch * k;
        if chv.norm() > 0.0 {
            let u = normalize(&chv);
            cands.push((score(&u, k), u, k.clone()));
        }
    }
    sort_desc(&mut cands);
    let mut best = cands[0].clone();
    for (_, u0, v0) in cands.iter().take(budget.refine.max(1)) {
        let (mut u, mut v) = (u0.clone(), v0.clone());
        let mut last = score(&u, &v);
        for _ in 0..budget.iterations.max(100) {
            let nv = &yp * (cm * &u);
            if nv.norm() == 0.0 {
                break;
            }
            v = normalize(&nv);
            let nu = &xp * (&ch * &v);
            if nu.norm() == 0.0 {
                break;
            }
            u = normalize(&nu);
            let s = score(&u, &v);
            if s > best.0 {
                best = (s, u.clone(), v.clone());
            }
            if (s - last).abs() <= 1e-15 * s.abs() {
                break;
            }
            last = s;
        }
    }
    (best.1, best.2)
}

fn sort_desc<T>(cands: &mut [(f64, T, T)]) {
    // NaN scores sink
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
}

fn random_tuple(rng: &mut LabRng, dims: &[usize]) -> Vec<CVector> {
    dims.iter().map(|&d| random_unit(rng, d)).collect()
}

/// Maximizes `obj` over a product of unit spheres: random samples plus the given
/// starts, then finite-difference projected ascent on the best few.
pub(crate) fn maximize_vectors(
    obj: &dyn Fn(&[CVector]) -> f64,
    dims: &[usize],
    starts: Vec<Vec<CVector>>,
    seed: u64,
    budget: SearchBudget,
) -> (Vec<CVector>, f64) {
    let mut rng = rng_from(seed);
    let mut cands: Vec<(f64, Vec<CVector>)> = starts
        .into_iter()
        .map(|s| {
            let s: Vec<CVector> = s.iter().map(normalize).collect();
            (obj(&s), s)
        })
        .collect();
    for _ in 0..budget.samples {
        let s = random_tuple(&mut rng, dims);
        cands.push((obj(&s), s));
    }
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = cands[0].clone();
    for (f0, s0) in cands.into_iter().take(budget.refine.max(1)) {
        let (f, s) = fd_ascent(obj, s0, f0, budget.iterations);
        if f > best.0 {
            best = (f, s);
        }
    }
    (best.1, best.0)
}

fn retract(s: &[CVector], dir: &[CVector], t: f64) -> Vec<CVector> {
    s.iter().zip(dir).map(|(x, d)| normalize(&(x + d * c(t, 0.0)))).collect()
}

fn fd_ascent(obj: &dyn Fn(&[CVector]) -> f64, mut s: Vec<CVector>, mut f: f64, iterations: usize) -> (f64, Vec<CVector>) {
    if !f.is_finite() {
        return (f, s);
    }
    let h = 1e-7;
    let mut step = 0.1;
    for _ in 0..iterations {
        let mut grad: Vec<CVector> = s.iter().map(|x| CVector::zeros(x.len())).collect();
        for b in 0..s.len() {
            for k in 0..s[b].len() {
                for unit in [c(1.0, 0.0), c(0.0, 1.0)] {
                    let mut probe = s.clone();
                    probe[b][k] += unit * h;
                    let df = (obj(&probe) - f) / h;
                    grad[b][k] += unit * df;
                }
            }
        }
        // tangent projection per sphere
        for (g, x) in grad.iter_mut().zip(&s) {
            let radial = x.dotc(g).re;
            *g -= x * c(radial, 0.0);
        }
        let gn2: f64 = grad.iter().map(|g| g.norm_squared()).sum();
        if !(gn2.sqrt() > 1e-12 * (1.0 + f.abs())) {
            break;
        }
        let dir: Vec<CVector> = grad.iter().map(|g| g / c(gn2.sqrt(), 0.0)).collect();
        let mut moved = false;
        while step > 1e-12 {
            let cand = retract(&s, &dir, step);
            let fc = obj(&cand);
            if fc > f {
                let gain = fc - f;
                s = cand;
                f = fc;
                step = (step * 2.0).min(1.0);
                moved = true;
                if gain <= 1e-14 * (1.0 + f.abs()) {
                    return (f, s);
                }
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (f, s)
}
