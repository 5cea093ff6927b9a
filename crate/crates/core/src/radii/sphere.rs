//! Riemannian gradient ascent on the unit sphere of ℂ^r.

use crate::core_linalg::{c, CVector};

#[derive(Clone, Copy, Debug)]
pub struct AscentOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { max_iter: 400, grad_tol: 1e-12 }
    }
}

pub fn normalize(y: &CVector) -> CVector {
    let n = y.norm();
    if n > 0.0 {
        y / c(n, 0.0)
    } else {
        y.clone()
    }
}

/// Maximizes `obj` (value and Euclidean gradient w.r.t. the real inner product
/// Re⟨g, dy⟩) over unit vectors, starting at `y0`. Armijo backtracking with an
/// adaptive trial step.
pub fn ascend<F>(obj: F, y0: &CVector, opts: AscentOptions) -> (f64, CVector)
where
    F: Fn(&CVector) -> (f64, CVector),
{
    let mut y = normalize(y0);
    let (mut f, mut g) = obj(&y);
    let mut step = 0.5 / (1.0 + g.norm());
    for _ in 0..opts.max_iter {
        let radial = y.dotc(&g).re;
        let gt = &g - &y * c(radial, 0.0);
        let gn2 = gt.norm_squared();
        if gn2.sqrt() <= opts.grad_tol * (1.0 + f.abs()) {
            break;
        }
        let mut accepted = false;
        while step > 1e-18 {
            let yn = normalize(&(&y + &gt * c(step, 0.0)));
            let (fnew, gnew) = obj(&yn);
            if fnew >= f + 1e-4 * step * gn2 {
                let gain = fnew - f;
                y = yn;
                f = fnew;
                g = gnew;
                step *= 2.0;
                accepted = true;
                if gain <= 1e-16 * (1.0 + f.abs()) {
                    return (f, y);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (f, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn finds_top_eigenvector_of_hermitian_form() {
        // max y*Hy on the sphere is λ_max
        let h = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let obj = |y: &CVector| {
            let hy = &h * y;
            (y.dotc(&hy).re, hy * c(2.0, 0.0))
        };
        let y0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.3, 0.2)]);
        let (f, _) = ascend(obj, &y0, AscentOptions::default());
        assert!((f - 3.0).abs() < 1e-10, "{f}");
    }
}
