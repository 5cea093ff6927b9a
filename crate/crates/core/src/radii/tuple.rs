//! Joint radii of operator tuples: sup/inf of Σ|⟨T_k x, x⟩_A|^p over the A-unit sphere.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::classical::{crawford_sweep, numerical_radius};
use super::sphere::{ascend, AscentOptions};
use super::{compressed, Method, RadiusEstimate};
use crate::core_linalg::{c, CVector, ComplexMatrix, C64};
use crate::error::{LabError, Result};
use crate::generators::random::{derive_seed, random_unit, rng_from};
use crate::semi_hilbert::SemiHilbertContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleMode {
    Radius,
    Crawford,
}

#[derive(Clone, Debug)]
pub struct TupleRadiusQuery {
    pub operators: Vec<ComplexMatrix>,
    /// p ≥ 1; `f64::INFINITY` selects w_∞ = w_R − c_R
    pub p: f64,
    pub mode: TupleMode,
}

const INITIAL_STARTS: usize = 32;
const MAX_STARTS: usize = 1024;
const ROUND_AGREEMENT: f64 = 1e-7;
const SCREEN_ITERS: usize = 8;
const REFINED_PER_ROUND: usize = 4;

#[derive(Clone, Copy)]
enum Functional {
    /// Σ|q_k|^p
    SumPow(f64),
    /// Σ||q_k| − c|^p
    Deviation(f64, f64),
}

/// Value and gradient of a functional at unit y, for compressed matrices ms.
fn evaluate(ms: &[DMatrix<C64>], y: &CVector, fun: Functional) -> (f64, CVector) {
    let mut val = 0.0;
    let mut grad = CVector::zeros(y.len());
    for m in ms {
        let my = m * y;
        let mhy = m.adjoint() * y;
        let q = y.dotc(&my);
        let a = q.norm();
        let (term, coef) = match fun {
            Functional::SumPow(p) => (a.powf(p), if a > 0.0 { p * a.powf(p - 1.0) } else { 0.0 }),
            Functional::Deviation(p, cc) => {
                let d = a - cc;
                let s = d.signum();
                (d.abs().powf(p), if d != 0.0 { p * d.abs().powf(p - 1.0) * s } else { 0.0 })
            }
        };
        val += term;
        if a > 1e-300 && coef != 0.0 {
            // ∇|q| = (M* y q + M y q̄) / |q|
            grad += (mhy * q + my * q.conj()) * c(coef / a, 0.0);
        }
    }
    (val, grad)
}

/// A fixed tuple in compressed coordinates with memoized optima.
pub struct TupleProblem<'a> {
    ctx: &'a SemiHilbertContext,
    ms: Vec<DMatrix<C64>>,
    seed: u64,
    sup_seeds: RefCell<Option<Vec<CVector>>>,
    inf_seeds: RefCell<Option<Vec<CVector>>>,
    memo: RefCell<HashMap<(u8, u64, u64), (f64, CVector, u32)>>,
}

impl<'a> TupleProblem<'a> {
    pub fn new(ctx: &'a SemiHilbertContext, operators: &[ComplexMatrix]) -> Result<Self> {
        Self::with_seed(ctx, operators, 0x7E57_AB1E)
    }

    pub fn with_seed(ctx: &'a SemiHilbertContext, operators: &[ComplexMatrix], seed: u64) -> Result<Self> {
        if operators.is_empty() {
            return Err(LabError::InvalidInput("tuple must contain at least one operator".into()));
        }
        let ms = operators.iter().map(|t| compressed(ctx, t)).collect::<Result<Vec<_>>>()?;
        Ok(TupleProblem {
            ctx,
            ms,
            seed,
            sup_seeds: RefCell::new(None),
            inf_seeds: RefCell::new(None),
            memo: RefCell::new(HashMap::new()),
        })
    }

    pub fn len(&self) -> usize {
        self.ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ms.is_empty()
    }

    pub fn compressed_ops(&self) -> &[DMatrix<C64>] {
        &self.ms
    }

    /// (|q_1|, …, |q_n|) at an A-unit vector given in compressed coordinates.
    pub fn moduli(&self, y: &CVector) -> Vec<f64> {
        self.ms.iter().map(|m| y.dotc(&(m * y)).norm()).collect()
    }

    /// Numerical-radius witnesses of each operator and of T_j + e^{iφ}T_k.
    fn sup_seeds(&self) -> Vec<CVector> {
        let mut cache = self.sup_seeds.borrow_mut();
        cache
            .get_or_insert_with(|| {
                let mut out: Vec<CVector> = self.ms.iter().map(|m| numerical_radius(m).1).collect();
                for j in 0..self.ms.len() {
                    for k in j + 1..self.ms.len() {
                        for ph in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)] {
                            let m = &self.ms[j] + &self.ms[k] * ph;
                            out.push(numerical_radius(&m).1);
                        }
                    }
                }
                out
            })
            .clone()
    }

    fn inf_seeds(&self) -> Vec<CVector> {
        let mut cache = self.inf_seeds.borrow_mut();
        cache.get_or_insert_with(|| self.ms.iter().map(|m| crawford_sweep(m).2).collect()).clone()
    }

    /// Multi-start optimization of a functional: rounds of 32, 64, … random starts (the
    /// first round also gets the structured seeds), each screened briefly with the best
    /// few refined, until two consecutive rounds agree to 1e-7.
    fn optimize(&self, fun: Functional, maximize: bool, seeds: Vec<CVector>) -> (f64, CVector, u32) {
        let key = match fun {
            Functional::SumPow(p) => (maximize as u8, p.to_bits(), u64::MAX),
            Functional::Deviation(p, cc) => (2 + maximize as u8, p.to_bits(), cc.to_bits()),
        };
        if let Some(hit) = self.memo.borrow().get(&key) {
            return hit.clone();
        }
        let sign = if maximize { 1.0 } else { -1.0 };
        let obj = |y: &CVector| {
            let (v, g) = evaluate(&self.ms, y, fun);
            (sign * v, g * c(sign, 0.0))
        };
        let r = self.ms[0].nrows();
        let mut rng = rng_from(derive_seed(self.seed, key.0 as u64 ^ key.1.rotate_left(7) ^ key.2));
        let mut best: Option<(f64, CVector)> = None;
        let mut prev: Option<f64> = None;
        let mut n_random = INITIAL_STARTS;
        let mut pending_seeds = seeds;
        let agreement = loop {
            let mut starts = std::mem::take(&mut pending_seeds);
            starts.extend((0..n_random).map(|_| random_unit(&mut rng, r)));
            let mut screened: Vec<(f64, CVector)> = starts
                .iter()
                .map(|s| ascend(obj, s, AscentOptions { max_iter: SCREEN_ITERS, grad_tol: 1e-12 }))
                .collect();
            screened.sort_by(|a, b| b.0.total_cmp(&a.0));
            for (_, y) in screened.iter().take(REFINED_PER_ROUND) {
                let (f, y) = ascend(obj, y, AscentOptions { max_iter: 2000, grad_tol: 1e-13 });
                if best.as_ref().is_none_or(|b| f > b.0) {
                    best = Some((f, y));
                }
            }
            let b = best.as_ref().expect("at least one start").0;
            if let Some(pv) = prev {
                let agreement = (b - pv).abs() / b.abs().max(1.0);
                if agreement <= ROUND_AGREEMENT || n_random >= MAX_STARTS {
                    break agreement;
                }
            }
            prev = Some(b);
            n_random *= 2;
        };
        let (f, y) = best.expect("at least one start");
        let d = if agreement == 0.0 { 15 } else { (-agreement.log10()).clamp(0.0, 15.0) as u32 };
        let out = (sign * f, y, d);
        self.memo.borrow_mut().insert(key, out.clone());
        out
    }

    /// sup Σ|⟨T_k x, x⟩_A|^p with the maximizing compressed vector.
    pub fn sup_pow(&self, p: f64) -> (f64, CVector) {
        let (v, y, _) = self.optimize(Functional::SumPow(p), true, self.sup_seeds());
        (v, y)
    }

    pub fn inf_pow(&self, p: f64) -> (f64, CVector) {
        let (v, y, _) = self.optimize(Functional::SumPow(p), false, self.inf_seeds());
        (v, y)
    }

    /// inf Σ_k ||⟨T_k x, x⟩_A| − c|^p
    pub fn inf_deviation(&self, p: f64, cc: f64) -> (f64, CVector) {
        let mut seeds = self.inf_seeds();
        seeds.extend(self.sup_seeds());
        let (v, y, _) = self.optimize(Functional::Deviation(p, cc), false, seeds);
        (v.max(0.0), y)
    }

    /// w_{p,A}; p = ∞ gives w_R − c_R.
    pub fn radius(&self, p: f64) -> Result<RadiusEstimate> {
        check_p(p)?;
        if p.is_infinite() {
            let r = self.radius(1.0)?;
            let cr = self.crawford(1.0)?;
            return Ok(RadiusEstimate {
                value: r.value - cr.value,
                lower_witness: r.lower_witness,
                method: Method::GradientRefine,
                certified_digits: r.certified_digits.min(cr.certified_digits),
            });
        }
        let (v, y, d) = self.optimize(Functional::SumPow(p), true, self.sup_seeds());
        Ok(self.estimate(v.max(0.0).powf(1.0 / p), &y, d))
    }

    /// c_{p,A} for finite p.
    pub fn crawford(&self, p: f64) -> Result<RadiusEstimate> {
        check_p(p)?;
        if p.is_infinite() {
            return Err(LabError::InvalidInput("the Crawford mode is defined for finite p".into()));
        }
        let (v, y, d) = self.optimize(Functional::SumPow(p), false, self.inf_seeds());
        Ok(self.estimate(v.max(0.0).powf(1.0 / p), &y, d))
    }

    fn estimate(&self, value: f64, y: &CVector, d: u32) -> RadiusEstimate {
        RadiusEstimate {
            value,
            lower_witness: self.ctx.expand(y),
            method: Method::GradientRefine,
            certified_digits: d,
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(LabError::InvalidInput(format!("p must be at least 1, got {p}")));
    }
    Ok(())
}

pub fn w_pa(ctx: &SemiHilbertContext, query: &TupleRadiusQuery) -> Result<RadiusEstimate> {
    check_p(query.p)?;
    let prob = TupleProblem::new(ctx, &query.operators)?;
    match query.mode {
        TupleMode::Radius => prob.radius(query.p),
        TupleMode::Crawford => prob.crawford(query.p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_linalg::TolerancePolicy;
    use crate::radii::w_a;
    use crate::semi_hilbert::make_context;

    #[test]
    fn single_operator_any_p_is_w_a() {
        let k = make_context(&ComplexMatrix::real(2, 2, &[2.0, 1.0, 1.0, 1.0]), TolerancePolicy::default()).unwrap();
        let t = ComplexMatrix::real(2, 2, &[0.3, 1.0, -0.5, 0.2]);
        let w = w_a(&k, &t).unwrap().value;
        for p in [1.0, 2.0, 3.5] {
            let q = TupleRadiusQuery { operators: vec![t.clone()], p, mode: TupleMode::Radius };
            assert!((w_pa(&k, &q).unwrap().value - w).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn copies_at_p_one() {
        let k = make_context(&ComplexMatrix::identity(3), TolerancePolicy::default()).unwrap();
        let t = ComplexMatrix::real(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 2.0, 0.5, 0.0, 0.0]);
        let w = w_a(&k, &t).unwrap().value;
        let q = TupleRadiusQuery { operators: vec![t.clone(); 3], p: 1.0, mode: TupleMode::Radius };
        assert!((w_pa(&k, &q).unwrap().value - 3.0 * w).abs() < 1e-9);
    }

    #[test]
    fn crawford_infinite_p_rejected() {
        let k = make_context(&ComplexMatrix::identity(2), TolerancePolicy::default()).unwrap();
        let q = TupleRadiusQuery { operators: vec![ComplexMatrix::identity(2)], p: f64::INFINITY, mode: TupleMode::Crawford };
        assert!(w_pa(&k, &q).is_err());
        let q = TupleRadiusQuery { operators: vec![ComplexMatrix::identity(2)], p: 0.5, mode: TupleMode::Radius };
        assert!(w_pa(&k, &q).is_err());
    }
}
