//! Per-instance evaluation state shared by every checker run on that instance.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::core_linalg::{c, func_calculus, psd_power, relative_min_eig, CVector, ComplexMatrix, C64};
use crate::error::Result;
use crate::generators::random::derive_seed;
use crate::generators::OperatorInstance;
use crate::radii::{r_a, w_a, TupleProblem, R_A_DEFAULT_LEVELS};
use crate::semi_hilbert::SemiHilbertContext;

pub struct Workspace<'a> {
    inst: &'a OperatorInstance,
    mats: RefCell<HashMap<String, ComplexMatrix>>,
    vals: RefCell<HashMap<String, f64>>,
    radii: RefCell<HashMap<String, (f64, CVector)>>,
    tuple: OnceCell<TupleProblem<'a>>,
}

/// FNV-1a, used to derive per-form search seeds.
pub(crate) fn salt(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

impl<'a> Workspace<'a> {
    pub fn new(inst: &'a OperatorInstance) -> Self {
        Workspace { inst, mats: RefCell::default(), vals: RefCell::default(), radii: RefCell::default(), tuple: OnceCell::new() }
    }

    pub fn instance(&self) -> &'a OperatorInstance {
        self.inst
    }

    pub fn ctx(&self) -> &'a SemiHilbertContext {
        &self.inst.ctx
    }

    pub fn ops(&self) -> &'a [ComplexMatrix] {
        &self.inst.operators
    }

    pub fn seed(&self) -> u64 {
        self.inst.seed
    }

    /// Search seed for a form; identical forms on one instance get identical searches.
    pub(crate) fn search_seed(&self, form: &str) -> u64 {
        derive_seed(self.inst.seed, salt(form))
    }

    pub(crate) fn mat(&self, key: &str, f: impl FnOnce() -> Result<ComplexMatrix>) -> Result<ComplexMatrix> {
        if let Some(m) = self.mats.borrow().get(key) {
            return Ok(m.clone());
        }
        let m = f()?;
        self.mats.borrow_mut().insert(key.to_string(), m.clone());
        Ok(m)
    }

    pub(crate) fn val(&self, key: &str, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if let Some(&v) = self.vals.borrow().get(key) {
            return Ok(v);
        }
        let v = f()?;
        self.vals.borrow_mut().insert(key.to_string(), v);
        Ok(v)
    }

    /// |Z|_A for a named operator.
    pub(crate) fn abs(&self, name: &str, z: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.mat(&format!("abs:{name}"), || self.ctx().a_abs(z))
    }

    /// |Z^♯|_A for a named operator.
    pub(crate) fn abs_sharp(&self, name: &str, z: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.mat(&format!("abs#:{name}"), || self.ctx().a_abs_sharp(z))
    }

    pub(crate) fn sharp(&self, name: &str, z: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.mat(&format!("sharp:{name}"), || self.ctx().a_adjoint(z))
    }

    /// (Re_A Z, Im_A Z)
    pub(crate) fn cartesian(&self, name: &str, z: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let re = self.mat(&format!("re:{name}"), || Ok(self.ctx().cartesian(z)?.real_part))?;
        let im = self.mat(&format!("im:{name}"), || Ok(self.ctx().cartesian(z)?.imag_part))?;
        Ok((re, im))
    }

    /// |Z|_A^s
    pub(crate) fn abs_pow(&self, name: &str, z: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
        let base = self.abs(name, z)?;
        self.mat(&format!("abs:{name}^{s:e}"), || self.power(&base, s))
    }

    /// |Z^♯|_A^s
    pub(crate) fn abs_sharp_pow(&self, name: &str, z: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
        let base = self.abs_sharp(name, z)?;
        self.mat(&format!("abs#:{name}^{s:e}"), || self.power(&base, s))
    }

    /// M^s for PSD M; s = 1 returns M unchanged.
    pub(crate) fn power(&self, m: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
        if s == 1.0 {
            return Ok(m.clone());
        }
        psd_power(m, s, self.ctx().tol())
    }

    pub(crate) fn apply(&self, m: &ComplexMatrix, f: &dyn Fn(f64) -> f64) -> Result<ComplexMatrix> {
        func_calculus(m, f, self.ctx().tol())
    }

    /// w_A(Z) with its witness.
    pub(crate) fn w(&self, name: &str, z: &ComplexMatrix) -> Result<(f64, CVector)> {
        if let Some(v) = self.radii.borrow().get(name) {
            return Ok(v.clone());
        }
        let est = w_a(self.ctx(), z)?;
        let v = (est.value, est.lower_witness);
        self.radii.borrow_mut().insert(name.to_string(), v.clone());
        Ok(v)
    }

    pub(crate) fn norm(&self, z: &ComplexMatrix) -> f64 {
        self.ctx().a_seminorm_op(z)
    }

    pub(crate) fn spectral_radius(&self, name: &str, z: &ComplexMatrix) -> Result<f64> {
        self.val(&format!("r:{name}"), || Ok(r_a(self.ctx(), z, R_A_DEFAULT_LEVELS)?.value))
    }

    pub(crate) fn tuple(&self) -> Result<&TupleProblem<'a>> {
        if let Some(t) = self.tuple.get() {
            return Ok(t);
        }
        let t = TupleProblem::with_seed(self.ctx(), self.ops(), derive_seed(self.inst.seed, salt("tuple")))?;
        Ok(self.tuple.get_or_init(|| t))
    }

    pub(crate) fn compress(&self, z: &ComplexMatrix) -> DMatrix<C64> {
        self.ctx().compress(z)
    }
}

/// ⟨Zx, y⟩_A = y* A Z x
pub(crate) fn form(ctx: &SemiHilbertContext, z: &ComplexMatrix, x: &CVector, y: &CVector) -> C64 {
    y.dotc(&(ctx.a().as_na() * (z.as_na() * x)))
}

/// ‖Zx‖_A
pub(crate) fn a_norm(ctx: &SemiHilbertContext, z: &ComplexMatrix, x: &CVector) -> f64 {
    let zx = z.as_na() * x;
    zx.dotc(&(ctx.a().as_na() * &zx)).re.max(0.0).sqrt()
}

pub(crate) fn herm(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub(crate) fn quad(m: &DMatrix<C64>, u: &CVector) -> f64 {
    u.dotc(&(m * u)).re
}

/// −λ_min/‖H‖ of the Hermitian part: ≤ 0 exactly when H is PSD.
pub(crate) fn psd_defect(h: &ComplexMatrix) -> f64 {
    -relative_min_eig(h)
}
