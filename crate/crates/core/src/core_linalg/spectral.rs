use nalgebra::{DMatrix, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use super::matrix::{c, ComplexMatrix, C64};
use crate::error::{LabError, Result};

const EIG_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TolerancePolicy {
    pub rank_cutoff_rel: f64,
    pub hermitize_tol: f64,
    pub psd_tol: f64,
    pub slack_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            rank_cutoff_rel: 1e-10,
            hermitize_tol: 1e-8,
            psd_tol: 1e-10,
            slack_tol: 1e-8,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_cutoff_rel", self.rank_cutoff_rel),
            ("hermitize_tol", self.hermitize_tol),
            ("psd_tol", self.psd_tol),
            ("slack_tol", self.slack_tol),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v < 1.0) {
                return Err(LabError::InvalidInput(format!("tolerance {name}={v} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    /// ascending
    pub eigenvalues: Vec<f64>,
    /// eigenvectors as columns, in the order of `eigenvalues`
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| l)
    }

    /// V diag(f(λ)) V*
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.eigenvectors.as_na();
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(l);
            scaled.column_mut(j).scale_mut(fl);
        }
        ComplexMatrix::wrap(scaled * v.adjoint())
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()))
    }
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(LabError::DimensionMismatch {
            expected: (m.rows(), m.rows()),
            found: m.shape(),
        });
    }
    Ok(())
}

/// Tolerance check followed by (M + M*)/2.
pub fn hermitize(m: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    check_square(m)?;
    let asymmetry = m.asymmetry();
    let bound = tol.hermitize_tol * (1.0 + m.fro_norm());
    if asymmetry > bound {
        return Err(LabError::NotHermitian { asymmetry, bound });
    }
    Ok(m.hermitian_part())
}

pub fn hermitian_eig(m: &ComplexMatrix, tol: &TolerancePolicy) -> Result<HermitianSpectrum> {
    let h = hermitize(m, tol)?;
    eig_of_hermitian(h.into_na())
}

/// Eigendecomposition of a matrix already known to be exactly Hermitian.
pub(crate) fn eig_of_hermitian(h: DMatrix<C64>) -> Result<HermitianSpectrum> {
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, EIG_MAX_ITER)
        .ok_or(LabError::ConvergenceFailure("hermitian eigensolver"))?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix::wrap(eigenvectors),
    })
}

/// Largest eigenvalue of an exactly Hermitian matrix (no vectors).
pub(crate) fn lambda_max(h: &DMatrix<C64>) -> f64 {
    h.symmetric_eigenvalues()
        .iter()
        .fold(f64::NEG_INFINITY, |a, &l| a.max(l))
}

/// Thin SVD whose factors reproduce M. nalgebra's complex SVD occasionally returns
/// inconsistent vectors at a machine-epsilon convergence threshold, so the threshold
/// is loosened until the recomposition matches.
fn checked_svd(m: &DMatrix<C64>) -> Result<SVD<C64, nalgebra::Dyn, nalgebra::Dyn>> {
    let bound = 1e-12 * (1.0 + m.norm());
    for eps in [f64::EPSILON, 1e-15, 1e-14, 1e-13] {
        let Some(svd) = SVD::try_new(m.clone(), true, true, eps, EIG_MAX_ITER) else {
            continue;
        };
        if let Ok(rec) = svd.clone().recompose() {
            if (rec - m).norm() <= bound {
                return Ok(svd);
            }
        }
    }
    Err(LabError::ConvergenceFailure("singular value decomposition"))
}

pub fn moore_penrose(m: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    let (rows, cols) = m.shape();
    let svd = checked_svd(m.as_na())?;
    let (u, v_t) = match (svd.u.as_ref(), svd.v_t.as_ref()) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(LabError::ConvergenceFailure("singular vectors missing")),
    };
    let s_max = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let cutoff = tol.rank_cutoff_rel * s_max;
    let mut out = DMatrix::<C64>::zeros(cols, rows);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s_max == 0.0 || s <= cutoff {
            continue;
        }
        // v_k u_k* / s_k
        let vk = v_t.row(k).adjoint();
        let uk = u.column(k);
        out += (vk * uk.adjoint()) * c(1.0 / s, 0.0);
    }
    Ok(ComplexMatrix::wrap(out))
}

/// Numerical rank with the relative cutoff.
pub fn rank(m: &ComplexMatrix, tol: &TolerancePolicy) -> usize {
    let s = m.singular_values();
    let s_max = s.iter().fold(0.0f64, |a, &x| a.max(x));
    if s_max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_cutoff_rel * s_max).count()
}

/// Eigenvalues of a PSD matrix after the tolerance checks: below -psd_tol·σ_max is an
/// error; anything under the rank cutoff (including the tolerated negatives) becomes 0.
fn psd_spectrum(m: &ComplexMatrix, tol: &TolerancePolicy) -> Result<HermitianSpectrum> {
    let mut spec = hermitian_eig(m, tol)?;
    let s_max = spec.max_abs();
    let floor = -tol.psd_tol * s_max;
    let min_eig = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if min_eig < floor {
        return Err(LabError::NotPsd { min_eig, floor });
    }
    let cutoff = tol.rank_cutoff_rel * s_max;
    for l in spec.eigenvalues.iter_mut() {
        if *l <= cutoff {
            *l = 0.0;
        }
    }
    Ok(spec)
}

/// V diag(f(λ)) V* for PSD M. Eigenvalues within the rank cutoff of zero are
/// passed to `f` as exact zeros.
pub fn func_calculus(
    m: &ComplexMatrix,
    f: &dyn Fn(f64) -> f64,
    tol: &TolerancePolicy,
) -> Result<ComplexMatrix> {
    let spec = psd_spectrum(m, tol)?;
    Ok(spec.apply(f))
}

pub fn psd_sqrt(m: &ComplexMatrix, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    func_calculus(m, &f64::sqrt, tol)
}

/// t ↦ t^s with 0^s = 0 for every s ≥ 0, including s = 0.
pub fn power_fn(s: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| if t <= 0.0 { 0.0 } else { t.powf(s) }
}

/// M^s for PSD M, with the 0⁰ = 0 convention on the kernel.
pub fn psd_power(m: &ComplexMatrix, s: f64, tol: &TolerancePolicy) -> Result<ComplexMatrix> {
    func_calculus(m, &power_fn(s), tol)
}

/// Smallest eigenvalue of the Hermitian part relative to its spectral scale.
/// Returns 0 for the zero matrix.
pub fn relative_min_eig(m: &ComplexMatrix) -> f64 {
    let h = m.hermitian_part();
    let eigs = h.as_na().symmetric_eigenvalues();
    let scale = eigs.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    eigs.iter().fold(f64::INFINITY, |a, &l| a.min(l)) / scale
}
