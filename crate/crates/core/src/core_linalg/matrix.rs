use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type C64 = Complex64;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix with finite entries. Read access goes through `Deref`
/// to the underlying nalgebra matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn from_na(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(LabError::InvalidInput("matrix must have at least one row and column".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LabError::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix(m))
    }

    /// For results of arithmetic on already validated matrices.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        debug_assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        ComplexMatrix(m)
    }

    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(LabError::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_na(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Real matrix from row-major data. Panics on malformed input; intended for literals.
    pub fn real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        let z: Vec<C64> = entries.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_row_slice(rows, cols, &z).expect("valid real matrix literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let v = DVector::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0)));
        ComplexMatrix(DMatrix::from_diagonal(&v))
    }

    pub fn diag(d: &[C64]) -> Self {
        ComplexMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn as_na(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_na(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.0.is_square()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn fro_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.0
            .singular_values()
            .iter()
            .fold(0.0f64, |acc, &s| acc.max(s))
    }

    pub fn hermitian_part(&self) -> Self {
        ComplexMatrix((&self.0 + self.0.adjoint()) * c(0.5, 0.0))
    }

    /// ‖M − M*‖_F
    pub fn asymmetry(&self) -> f64 {
        (&self.0 - self.0.adjoint()).norm()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix(&self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        &self.0 * x
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// ‖self − other‖_F / max(‖other‖_F, 1e-300)
    pub fn rel_dist(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).norm() / other.fro_norm().max(1e-300)
    }

    /// [[a, b], [c, d]]
    pub fn block2(a: &Self, b: &Self, cc: &Self, d: &Self) -> Self {
        let (n, m) = (a.rows(), a.cols());
        assert_eq!(b.shape(), (n, d.cols()));
        assert_eq!(cc.shape(), (d.rows(), m));
        let mut out = DMatrix::zeros(n + d.rows(), m + d.cols());
        out.view_mut((0, 0), (n, m)).copy_from(&a.0);
        out.view_mut((0, m), (n, d.cols())).copy_from(&b.0);
        out.view_mut((n, 0), (d.rows(), m)).copy_from(&cc.0);
        out.view_mut((n, m), d.shape()).copy_from(&d.0);
        ComplexMatrix(out)
    }

    pub fn block_diag(a: &Self, d: &Self) -> Self {
        Self::block2(
            a,
            &Self::zeros(a.rows(), d.cols()),
            &Self::zeros(d.rows(), a.cols()),
            d,
        )
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;
    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix((&self.0).$f(&rhs.0))
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0.$f(rhs.0))
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0.$f(&rhs.0))
            }
        }
        impl $tr<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix((&self.0).$f(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: C64) -> ComplexMatrix {
        self.scale(s)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: f64) -> ComplexMatrix {
        self.scale_re(s)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: C64) -> ComplexMatrix {
        ComplexMatrix(self.0 * s)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: f64) -> ComplexMatrix {
        ComplexMatrix(self.0 * c(s, 0.0))
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Mul<&CVector> for &ComplexMatrix {
    type Output = CVector;
    fn mul(self, x: &CVector) -> CVector {
        &self.0 * x
    }
}
