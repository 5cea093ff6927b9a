//! Joint radii of operator tuples: Euclidean bounds, the w_p chain, power means and
//! the sym-square bounds.

use serde_json::json;

use super::params::Params;
use super::radius::sym_square;
use super::record::Link;
use super::search::SearchBudget;
use super::workspace::Workspace;
use super::Evaluation;
use crate::core_linalg::ComplexMatrix;
use crate::error::Result;

fn link(label: &'static str, lhs: f64, rhs: f64) -> Link {
    Link::new(label, lhs, rhs).denoise(1.0 + lhs.abs().max(rhs.abs()))
}

/// Σ_k (T_k^♯T_k + T_kT_k^♯)^e, integer e.
fn sym_sum(ws: &Workspace, e: u32) -> Result<ComplexMatrix> {
    let n = ws.ctx().dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (i, t) in ws.ops().iter().enumerate() {
        let x = ws.mat(&format!("sym:{i}"), || sym_square(ws, &format!("T{i}"), t))?;
        acc = acc + x.powi(e);
    }
    Ok(acc)
}

pub(crate) fn eq41(ws: &Workspace, _p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let n = ws.ops().len() as f64;
    let mut sum = ComplexMatrix::zeros(ctx.dim(), ctx.dim());
    for (i, t) in ws.ops().iter().enumerate() {
        sum = sum + t * &ws.sharp(&format!("T{i}"), t)?;
    }
    let root = ws.norm(&sum).sqrt();
    let we = ws.tuple()?.radius(2.0)?;
    Ok(Evaluation::links(vec![
        link("lower", root / (2.0 * n.sqrt()), we.value).with_witness(vec![we.lower_witness.clone()]),
        link("upper", we.value, root).with_witness(vec![we.lower_witness]),
    ]))
}

/// w_∞ ≤ w_p ≤ w_R ≤ n^{1−1/p} w_p
pub(crate) fn chain_468(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let pp = p.req_p();
    let n = ws.ops().len() as f64;
    let tp = ws.tuple()?;
    let winf = tp.radius(f64::INFINITY)?.value;
    let wp = tp.radius(pp)?;
    let wr = tp.radius(1.0)?;
    Ok(Evaluation::links(vec![
        link("infinity_p", winf, wp.value),
        link("p_rhombic", wp.value, wr.value).with_witness(vec![wr.lower_witness.clone()]),
        link("rhombic_power", wr.value, n.powf(1.0 - 1.0 / pp) * wp.value).with_witness(vec![wr.lower_witness]),
    ]))
}

/// w_p ≤ n^{1/p−1/q} w_q for p ≤ q
pub(crate) fn power_mean_49(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let (pp, qq) = (p.req_p(), p.q.unwrap_or(2.0));
    let n = ws.ops().len() as f64;
    let tp = ws.tuple()?;
    let wp = tp.radius(pp)?;
    let wq = tp.radius(qq)?.value;
    Ok(Evaluation::links(vec![
        link("power_mean", wp.value, n.powf(1.0 / pp - 1.0 / qq) * wq).with_witness(vec![wp.lower_witness])
    ]))
}

/// w_R^p ≤ n^{p−1} w_p^p − n^{p−1} inf Σ_k ||q_k| − w_R/n|^p
pub(crate) fn superquad_refine(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let pp = p.req_p();
    let n = ws.ops().len() as f64;
    let tp = ws.tuple()?;
    let wr = tp.radius(1.0)?;
    let (sp, _) = tp.sup_pow(pp);
    let (dev, _) = tp.inf_deviation(pp, wr.value / n);
    let np = n.powf(pp - 1.0);
    let mut ev = Evaluation::links(vec![
        link("refined", wr.value.powf(pp), np * sp - np * dev).with_witness(vec![wr.lower_witness])
    ]);
    ev.note("correction", json!(np * dev));
    Ok(ev)
}

/// sup Σ|q_k|^{2p} between the two sym-square seminorm bounds, with a common lower
/// constant `lower_c`.
fn sym_bounds(ws: &Workspace, pp: f64, lower_c: f64) -> Result<Vec<Link>> {
    let e = pp.round() as u32;
    let tp = ws.tuple()?;
    let (mid, y) = tp.sup_pow(2.0 * pp);
    let x = ws.ctx().expand(&y);
    let lower = lower_c * ws.norm(&sym_sum(ws, 1)?).powf(pp);
    let upper = ws.norm(&sym_sum(ws, e)?) / 2f64.powf(pp);
    Ok(vec![link("lower", lower, mid).with_witness(vec![x.clone()]), link("upper", mid, upper).with_witness(vec![x])])
}

pub(crate) fn thm10(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let pp = p.req_p();
    let n = ws.ops().len();
    let lower_c = 1.0 / (2f64.powf(pp + 1.0) * (n as f64).powf(pp - 1.0));
    let mut ev = Evaluation::links(sym_bounds(ws, pp, lower_c)?);
    ev.note("n", json!(n));
    ev.note("lower_constant", json!(lower_c));
    if n == 1 && pp == 1.0 {
        ev.note("remark_constant", json!(1.0 / 16.0));
    }
    Ok(ev)
}

pub(crate) fn cor_412(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let pp = p.req_p();
    Ok(Evaluation::links(sym_bounds(ws, pp, 1.0 / 4f64.powf(pp))?))
}

/// Rhombic chain for p = 2q:
/// c‖ΣX‖^q ≤ w_{2q}^{2q}, w_{2q}^q ≤ w_R^q ≤ n^{q−½} w_{2q}^q, n^{q−½} w_{2q}^{2q} ≤ n^{q−½}/2^q ‖ΣX^q‖.
pub(crate) fn rhombic_chain(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let q = p.q.unwrap_or(1.0);
    let n = ws.ops().len() as f64;
    let tp = ws.tuple()?;
    let (mid, _) = tp.sup_pow(2.0 * q);
    let w2q = tp.radius(2.0 * q)?.value;
    let wr = tp.radius(1.0)?;
    let c0 = 1.0 / (2f64.powf(2.0 * q + 1.0) * n.powf(q - 1.0));
    let lower = c0 * ws.norm(&sym_sum(ws, 1)?).powf(q);
    let nq = n.powf(q - 0.5);
    let upper = nq / 2f64.powf(q) * ws.norm(&sym_sum(ws, q.round() as u32)?);
    Ok(Evaluation::links(vec![
        link("sym_lower", lower, mid),
        link("rhombic_lower", w2q.powf(q), wr.value.powf(q)).with_witness(vec![wr.lower_witness]),
        link("rhombic_upper", wr.value.powf(q), nq * w2q.powf(q)),
        link("sym_upper", nq * mid, upper),
    ]))
}
