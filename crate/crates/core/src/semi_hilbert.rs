//! Semi-inner-product structure induced by a PSD matrix A.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::core_linalg::{
    c, eig_of_hermitian, hermitize, psd_sqrt, relative_min_eig, CVector, ComplexMatrix,
    MatrixFile, TolerancePolicy, C64, I,
};
use crate::error::{LabError, Result};

#[derive(Clone, Debug)]
pub struct SemiHilbertContext {
    a: ComplexMatrix,
    tol: TolerancePolicy,
    eigvecs: ComplexMatrix,
    // clamped: sub-cutoff eigenvalues are exact zeros
    eigvals: Vec<f64>,
    support_idx: Vec<usize>,
    a_pinv: ComplexMatrix,
    a_half: ComplexMatrix,
    a_half_pinv: ComplexMatrix,
    p_a: ComplexMatrix,
    // n×r orthonormal basis of range(A), and the matching eigenvalues
    support: DMatrix<C64>,
    support_eigs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct CartesianPair {
    pub real_part: ComplexMatrix,
    pub imag_part: ComplexMatrix,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Predicates {
    pub in_ba: bool,
    pub a_selfadjoint: bool,
    pub a_positive: bool,
    pub a_normal: bool,
    pub sharp_a_selfadjoint: bool,
    pub commutes_with_a: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContextFile {
    #[serde(rename = "A")]
    pub a: MatrixFile,
    #[serde(default)]
    pub tol: TolerancePolicy,
}

pub fn make_context(a: &ComplexMatrix, tol: TolerancePolicy) -> Result<SemiHilbertContext> {
    SemiHilbertContext::new(a, tol)
}

impl SemiHilbertContext {
    pub fn new(a: &ComplexMatrix, tol: TolerancePolicy) -> Result<Self> {
        tol.validate()?;
        let h = hermitize(a, &tol)?;
        let spec = eig_of_hermitian(h.as_na().clone())?;
        let scale = spec.max_abs();
        let floor = -tol.psd_tol * scale;
        let min_eig = spec.eigenvalues[0];
        if min_eig < floor {
            return Err(LabError::NotPsd { min_eig, floor });
        }
        Self::assemble(h, spec.eigenvectors, spec.eigenvalues, tol)
    }

    /// Context from a known eigendecomposition A = U diag(λ) U*. Generators use this so
    /// that operators built blockwise in U see exactly the same eigenspaces.
    pub fn from_spectrum(u: &ComplexMatrix, lambda: &[f64], tol: TolerancePolicy) -> Result<Self> {
        tol.validate()?;
        if !u.is_square() || u.rows() != lambda.len() {
            return Err(LabError::DimensionMismatch {
                expected: (lambda.len(), lambda.len()),
                found: u.shape(),
            });
        }
        if let Some(&l) = lambda.iter().find(|&&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(LabError::NotPsd { min_eig: l, floor: 0.0 });
        }
        let a = eigen_apply(u.as_na(), lambda, |l| l).hermitian_part();
        Self::assemble(a, u.clone(), lambda.to_vec(), tol)
    }

    fn assemble(
        a: ComplexMatrix,
        eigvecs: ComplexMatrix,
        mut eigvals: Vec<f64>,
        tol: TolerancePolicy,
    ) -> Result<Self> {
        let scale = eigvals.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let cutoff = tol.rank_cutoff_rel * scale;
        for l in eigvals.iter_mut() {
            if *l <= cutoff {
                *l = 0.0;
            }
        }
        let support_idx: Vec<usize> = (0..eigvals.len()).filter(|&k| eigvals[k] > 0.0).collect();
        let v = eigvecs.as_na();
        let inv = |l: f64| if l > 0.0 { 1.0 / l } else { 0.0 };
        let a_pinv = eigen_apply(v, &eigvals, inv);
        let a_half = eigen_apply(v, &eigvals, f64::sqrt);
        let a_half_pinv = eigen_apply(v, &eigvals, |l| inv(l).sqrt());
        let p_a = eigen_apply(v, &eigvals, |l| if l > 0.0 { 1.0 } else { 0.0 });
        let n = eigvals.len();
        let support = DMatrix::from_fn(n, support_idx.len(), |i, j| v[(i, support_idx[j])]);
        let support_eigs = support_idx.iter().map(|&k| eigvals[k]).collect();
        Ok(SemiHilbertContext {
            a,
            tol,
            eigvecs,
            eigvals,
            support_idx,
            a_pinv,
            a_half,
            a_half_pinv,
            p_a,
            support,
            support_eigs,
        })
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }
    pub fn tol(&self) -> &TolerancePolicy {
        &self.tol
    }
    pub fn dim(&self) -> usize {
        self.a.rows()
    }
    pub fn rank(&self) -> usize {
        self.support_idx.len()
    }
    pub fn a_pinv(&self) -> &ComplexMatrix {
        &self.a_pinv
    }
    pub fn a_half(&self) -> &ComplexMatrix {
        &self.a_half
    }
    pub fn a_half_pinv(&self) -> &ComplexMatrix {
        &self.a_half_pinv
    }
    pub fn p_a(&self) -> &ComplexMatrix {
        &self.p_a
    }
    /// Eigenvectors of A (columns) and clamped eigenvalues, in matching order.
    pub fn eigen(&self) -> (&ComplexMatrix, &[f64]) {
        (&self.eigvecs, &self.eigvals)
    }
    pub fn support_basis(&self) -> &DMatrix<C64> {
        &self.support
    }
    pub fn support_eigs(&self) -> &[f64] {
        &self.support_eigs
    }

    /// Tolerance for structural predicates (membership, commutation, A-selfadjointness).
    pub fn structural_tol(&self) -> f64 {
        self.tol.hermitize_tol
    }

    fn check_op(&self, t: &ComplexMatrix) -> Result<()> {
        let n = self.dim();
        if t.shape() != (n, n) {
            return Err(LabError::DimensionMismatch { expected: (n, n), found: t.shape() });
        }
        Ok(())
    }

    fn check_vec(&self, x: &CVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: (self.dim(), 1), found: (x.len(), 1) });
        }
        Ok(())
    }

    /// ⟨x, y⟩_A = y* A x
    pub fn a_inner(&self, x: &CVector, y: &CVector) -> Result<C64> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        Ok(y.dotc(&(self.a.as_na() * x)))
    }

    pub fn a_norm(&self, x: &CVector) -> Result<f64> {
        Ok(self.a_inner(x, x)?.re.max(0.0).sqrt())
    }

    /// (‖(I − P_A) T*A‖_F, tolerance bound)
    pub fn douglas_residual(&self, t: &ComplexMatrix) -> Result<(f64, f64)> {
        self.check_op(t)?;
        let ta = t.adjoint() * &self.a;
        let resid = (&ta - &(&self.p_a * &ta)).fro_norm();
        Ok((resid, self.structural_tol() * (1.0 + ta.fro_norm())))
    }

    pub fn douglas_member(&self, t: &ComplexMatrix) -> Result<bool> {
        let (r, b) = self.douglas_residual(t)?;
        Ok(r <= b)
    }

    fn require_ba(&self, t: &ComplexMatrix) -> Result<()> {
        let (residual, bound) = self.douglas_residual(t)?;
        if residual > bound {
            return Err(LabError::NotInBA { residual, bound });
        }
        Ok(())
    }

    /// T^♯ = A† T* A
    pub fn a_adjoint(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_ba(t)?;
        Ok(self.sharp(t))
    }

    pub(crate) fn sharp(&self, t: &ComplexMatrix) -> ComplexMatrix {
        &self.a_pinv * &(t.adjoint() * &self.a)
    }

    /// Compression of T to range(A) in A-orthonormal coordinates:
    /// Λ_r^{1/2} V_r* T V_r Λ_r^{-1/2}. For x = V_r Λ_r^{-1/2} y one has
    /// ⟨Tx, x⟩_A = y* M y and ‖Tx‖_A = ‖M y‖.
    pub fn compress(&self, t: &ComplexMatrix) -> DMatrix<C64> {
        let v = &self.support;
        let mut m = v.adjoint() * t.as_na() * v;
        for (i, &li) in self.support_eigs.iter().enumerate() {
            for (j, &lj) in self.support_eigs.iter().enumerate() {
                m[(i, j)] *= (li / lj).sqrt();
            }
        }
        m
    }

    /// A-unit vector x = V_r Λ_r^{-1/2} y for a unit y in compressed coordinates.
    pub fn expand(&self, y: &CVector) -> CVector {
        let scaled = CVector::from_iterator(
            y.len(),
            y.iter().zip(&self.support_eigs).map(|(z, &l)| z / l.sqrt()),
        );
        &self.support * scaled
    }

    /// y = Λ_r^{1/2} V_r* x, so that ‖y‖ = ‖x‖_A.
    pub fn contract(&self, x: &CVector) -> CVector {
        let p = self.support.adjoint() * x;
        CVector::from_iterator(p.len(), p.iter().zip(&self.support_eigs).map(|(z, &l)| z * l.sqrt()))
    }

    /// sup ‖Tx‖_A over ‖x‖_A = 1; 0 when rank A = 0.
    pub fn a_seminorm_op(&self, t: &ComplexMatrix) -> f64 {
        if self.rank() == 0 {
            return 0.0;
        }
        let m = self.compress(t);
        let g = m.adjoint() * &m;
        let g = (&g + g.adjoint()) * c(0.5, 0.0);
        crate::core_linalg::lambda_max(&g).max(0.0).sqrt()
    }

    /// |T|_A = (T* A T)^{1/2}
    pub fn a_abs(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_ba(t)?;
        let g = &(t.adjoint() * &self.a) * t;
        psd_sqrt(&g.hermitian_part(), &self.tol)
    }

    /// |T^♯|_A = (A T A† T* A)^{1/2}
    pub fn a_abs_sharp(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_ba(t)?;
        let at = &self.a * t;
        let g = &(&at * &self.a_pinv) * &at.adjoint();
        psd_sqrt(&g.hermitian_part(), &self.tol)
    }

    pub fn cartesian(&self, t: &ComplexMatrix) -> Result<CartesianPair> {
        let ts = self.a_adjoint(t)?;
        let real_part = (t + &ts).scale_re(0.5);
        let imag_part = (t - &ts).scale(c(0.0, -0.5));
        Ok(CartesianPair { real_part, imag_part })
    }

    pub fn predicates(&self, t: &ComplexMatrix) -> Result<Predicates> {
        self.check_op(t)?;
        let eps = self.structural_tol();
        let at = &self.a * t;
        let ta = t * &self.a;
        let a_selfadjoint = at.asymmetry() <= eps * (1.0 + at.fro_norm());
        let a_positive = a_selfadjoint && relative_min_eig(&at) >= -self.tol.psd_tol.max(eps * 1e-2);
        let commutes_with_a = (&at - &ta).fro_norm() <= eps * (1.0 + at.fro_norm());
        let mut p = Predicates { a_selfadjoint, a_positive, commutes_with_a, ..Default::default() };
        if !self.douglas_member(t)? {
            p.reason = Some("T is not in B_A; adjoint-based flags are false".into());
            return Ok(p);
        }
        p.in_ba = true;
        let ts = self.sharp(t);
        let comm = (&(t * &ts) - &(&ts * t)).fro_norm();
        p.a_normal = comm <= eps * (1.0 + t.fro_norm() * ts.fro_norm());
        p.sharp_a_selfadjoint = (t - &ts).fro_norm() <= eps * (1.0 + t.fro_norm());
        Ok(p)
    }

    /// Context for A ⊕ A on H ⊕ H.
    pub fn block_bold_a(&self) -> SemiHilbertContext {
        let z = ComplexMatrix::zeros(self.dim(), self.dim());
        let u = ComplexMatrix::block2(&self.eigvecs, &z, &z, &self.eigvecs);
        let mut l = self.eigvals.clone();
        l.extend_from_slice(&self.eigvals);
        SemiHilbertContext::from_spectrum(&u, &l, self.tol).expect("doubled spectrum is valid")
    }

    pub fn to_file(&self) -> ContextFile {
        ContextFile { a: MatrixFile::from(&self.a), tol: self.tol }
    }

    pub fn from_file(f: &ContextFile) -> Result<Self> {
        Self::new(&f.a.to_matrix()?, f.tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("context serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: ContextFile =
            serde_json::from_str(s).map_err(|e| LabError::InvalidInput(format!("context JSON: {e}")))?;
        Self::from_file(&f)
    }
}

fn eigen_apply(v: &DMatrix<C64>, lambda: &[f64], f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let mut scaled = v.clone();
    for (j, &l) in lambda.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(l));
    }
    ComplexMatrix::wrap(scaled * v.adjoint())
}

/// i·T, handy when assembling Cartesian parts.
pub fn times_i(t: &ComplexMatrix) -> ComplexMatrix {
    t.scale(I)
}
