//! Radius-type functionals: w_A, c_A, r_A, W_A sampling and joint radii of tuples.

pub mod classical;
pub mod sphere;
mod tuple;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::core_linalg::{c, CVector, ComplexMatrix, C64};
use crate::error::{LabError, Result};
use crate::generators::random::{complex_normal, random_unit, rng_from};
use crate::semi_hilbert::SemiHilbertContext;
use classical::{crawford_sweep, numerical_radius};
use sphere::{ascend, AscentOptions};

pub use tuple::{w_pa, TupleMode, TupleProblem, TupleRadiusQuery};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ThetaSweep,
    Sampling,
    GradientRefine,
    ExactReduction,
}

#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    pub value: f64,
    /// A-unit vector in the original coordinates
    pub lower_witness: CVector,
    pub method: Method,
    pub certified_digits: u32,
}

pub(crate) fn vector_json(x: &CVector) -> Value {
    json!({
        "re": x.iter().map(|z| z.re).collect::<Vec<_>>(),
        "im": x.iter().map(|z| z.im).collect::<Vec<_>>(),
    })
}

impl RadiusEstimate {
    pub fn to_json(&self, params: Value) -> Value {
        json!({
            "value": self.value,
            "witness": vector_json(&self.lower_witness),
            "method": self.method,
            "certified_digits": self.certified_digits,
            "params": params,
        })
    }
}

/// Agreement of two estimates in decimal digits, capped at 15.
pub(crate) fn digits(a: f64, b: f64) -> u32 {
    let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    if rel == 0.0 {
        return 15;
    }
    (-rel.log10()).clamp(0.0, 15.0) as u32
}

fn check_square(ctx: &SemiHilbertContext, t: &ComplexMatrix) -> Result<()> {
    let n = ctx.dim();
    if t.shape() != (n, n) {
        return Err(LabError::DimensionMismatch { expected: (n, n), found: t.shape() });
    }
    Ok(())
}

/// Compressed operator for a member of B_A. Outside B_A the supremum over the A-unit
/// sphere is unbounded (kernel components reach ⟨ATx_k, x_s⟩), so membership is required.
pub(crate) fn compressed(ctx: &SemiHilbertContext, t: &ComplexMatrix) -> Result<DMatrix<C64>> {
    check_square(ctx, t)?;
    if ctx.rank() == 0 {
        return Err(LabError::DegenerateContext);
    }
    let (residual, bound) = ctx.douglas_residual(t)?;
    if residual > bound {
        return Err(LabError::NotInBA { residual, bound });
    }
    Ok(ctx.compress(t))
}

fn abs_sq_objective(m: &DMatrix<C64>, sign: f64) -> impl Fn(&CVector) -> (f64, CVector) + '_ {
    move |y: &CVector| {
        let my = m * y;
        let mhy = m.adjoint() * y;
        let q = y.dotc(&my);
        let g = (mhy * q + my * q.conj()) * c(2.0 * sign, 0.0);
        (sign * q.norm_sqr(), g)
    }
}

/// Sweep plus gradient cross-check on a compressed matrix: (value, witness, digits).
pub(crate) fn numerical_radius_checked(m: &DMatrix<C64>) -> (f64, CVector, u32) {
    let (w, y) = numerical_radius(m);
    let (f, y2) = ascend(abs_sq_objective(m, 1.0), &y, AscentOptions::default());
    let w2 = f.max(0.0).sqrt();
    let d = digits(w, w2);
    if w2 > w {
        (w2, y2, d)
    } else {
        (w, y, d)
    }
}

pub fn w_a(ctx: &SemiHilbertContext, t: &ComplexMatrix) -> Result<RadiusEstimate> {
    let m = compressed(ctx, t)?;
    let (value, y, certified_digits) = numerical_radius_checked(&m);
    Ok(RadiusEstimate { value, lower_witness: ctx.expand(&y), method: Method::ThetaSweep, certified_digits })
}

/// Best |q| after projected-gradient descent of |y*My|² from several starts.
pub(crate) fn min_abs_form(m: &DMatrix<C64>, starts: &[CVector]) -> (f64, CVector) {
    let mut best = (f64::INFINITY, starts[0].clone());
    for s in starts {
        let (f, y) = ascend(abs_sq_objective(m, -1.0), s, AscentOptions { max_iter: 2000, grad_tol: 1e-14 });
        let v = (-f).max(0.0).sqrt();
        if v < best.0 {
            best = (v, y);
        }
    }
    best
}

/// Crawford number. The value is the exact reduction max(0, max_θ λ_min(Re(e^{iθ}M)));
/// the witness comes from descent and its digits record how well it reproduces the value.
pub fn c_a(ctx: &SemiHilbertContext, t: &ComplexMatrix) -> Result<RadiusEstimate> {
    let m = compressed(ctx, t)?;
    let (d, _, y0) = crawford_sweep(&m);
    let value = d.max(0.0);
    let mut rng = rng_from(0xC4A3_F0D0);
    let mut starts = vec![y0];
    starts.extend((0..8).map(|_| random_unit(&mut rng, m.nrows())));
    let (achieved, y) = min_abs_form(&m, &starts);
    let scale = m.norm().max(1e-300);
    let certified_digits = if value > 0.0 {
        digits(value, achieved)
    } else {
        ((-(achieved / scale).max(1e-16).log10()).clamp(0.0, 15.0)) as u32
    };
    Ok(RadiusEstimate { value, lower_witness: ctx.expand(&y), method: Method::ExactReduction, certified_digits })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralRadius {
    /// min over computed levels of ‖Tⁿ‖_A^{1/n}
    pub value: f64,
    pub attained_at: usize,
    pub levels_computed: usize,
    pub n_max: usize,
    /// ‖Tⁿ‖_A^{1/n} for n = 1..levels_computed; also the limsup-style diagnostic sequence
    pub sequence: Vec<f64>,
}

pub const R_A_DEFAULT_LEVELS: usize = 24;

pub fn r_a(ctx: &SemiHilbertContext, t: &ComplexMatrix, n_max: usize) -> Result<SpectralRadius> {
    check_square(ctx, t)?;
    if n_max == 0 {
        return Err(LabError::InvalidInput("n_max must be at least 1".into()));
    }
    let (residual, bound) = ctx.douglas_residual(t)?;
    if residual > bound {
        return Err(LabError::NotInBA { residual, bound });
    }
    let mut seq: Vec<f64> = Vec::new();
    let mut power = t.clone();
    let mut rises = 0;
    for k in 1..=n_max {
        if k > 1 {
            power = &power * t;
        }
        let v = ctx.a_seminorm_op(&power).powf(1.0 / k as f64);
        if let Some(&prev) = seq.last() {
            rises = if v > prev { rises + 1 } else { 0 };
        }
        seq.push(v);
        if v == 0.0 || rises >= 2 {
            break;
        }
    }
    let (idx, &value) = seq
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one level");
    Ok(SpectralRadius { value, attained_at: idx + 1, levels_computed: seq.len(), n_max, sequence: seq })
}

/// ⟨Tx, x⟩_A for `count` random A-unit x: Gaussian vectors projected to range(P_A)
/// and A-normalized.
pub fn sample_w_a(ctx: &SemiHilbertContext, t: &ComplexMatrix, count: usize, seed: u64) -> Result<Vec<C64>> {
    check_square(ctx, t)?;
    if ctx.rank() == 0 {
        return Err(LabError::DegenerateContext);
    }
    let n = ctx.dim();
    let mut rng = rng_from(seed);
    let at = ctx.a() * t;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = CVector::from_iterator(n, (0..n).map(|_| complex_normal(&mut rng)));
        let x = ctx.p_a() * &g;
        let nx = ctx.a_norm(&x)?;
        if nx < 1e-150 {
            continue;
        }
        let x = x / c(nx, 0.0);
        out.push(x.dotc(&(&at * &x)));
    }
    Ok(out)
}

/// |⟨Tx, x⟩_A| of the witness, for checking estimates.
pub fn witness_value(ctx: &SemiHilbertContext, t: &ComplexMatrix, x: &CVector) -> Result<f64> {
    Ok(ctx.a_inner(&(t * x), x)?.norm())
}
