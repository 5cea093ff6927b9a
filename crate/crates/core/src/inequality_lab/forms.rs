//! Vector-quantified inequalities: Schwarz-type bilinear bounds, block positivity,
//! Jensen/McCarty forms and their Cartesian variants.

use nalgebra::DMatrix;
use serde_json::{json, Map};

use super::params::{FgPair, Params};
use super::record::Link;
use super::search::{bilinear_ratio, maximize_vectors, SearchBudget};
use super::workspace::{a_norm, form, herm, psd_defect, quad, Workspace};
use super::Evaluation;
use crate::core_linalg::{c, CVector, ComplexMatrix, C64};
use crate::error::Result;
use crate::semi_hilbert::SemiHilbertContext;

fn fro(m: &DMatrix<C64>) -> f64 {
    m.norm()
}

/// Expanded A-unit pair from compressed unit vectors.
fn expand_pair(ctx: &SemiHilbertContext, u: &CVector, v: &CVector) -> (CVector, CVector) {
    (ctx.expand(u), ctx.expand(v))
}

fn unit_search(ws: &Workspace, form_id: &str, b: SearchBudget, score: &dyn Fn(&CVector) -> f64) -> CVector {
    let r = ws.ctx().rank();
    let obj = |s: &[CVector]| score(&s[0]);
    let (best, _) = maximize_vectors(&obj, &[r], Vec::new(), ws.search_seed(form_id), b);
    best.into_iter().next().expect("one vector")
}

fn pair_search(
    ws: &Workspace,
    form_id: &str,
    b: SearchBudget,
    start: (CVector, CVector),
    score: &dyn Fn(&CVector, &CVector) -> f64,
) -> (CVector, CVector) {
    let r = ws.ctx().rank();
    let obj = |s: &[CVector]| score(&s[0], &s[1]);
    let (best, _) = maximize_vectors(&obj, &[r, r], vec![vec![start.0, start.1]], ws.search_seed(form_id), b);
    (best[0].clone(), best[1].clone())
}

fn single(links: Link) -> Result<Evaluation> {
    Ok(Evaluation::links(vec![links]))
}

pub(crate) fn schwarz(ws: &Workspace, _p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let cm = ws.compress(t);
    let h = herm(&cm);
    let (u, v) = bilinear_ratio(&cm, &h, &h, ws.search_seed("schwarz"), b);
    let (x, y) = expand_pair(ctx, &u, &v);
    let lhs = form(ctx, t, &x, &y).norm_sqr();
    let rhs = form(ctx, t, &x, &x).re * form(ctx, t, &y, &y).re;
    single(Link::new("schwarz", lhs, rhs).denoise(fro(&cm).powi(2)).with_witness(vec![x, y]))
}

fn bold_block(a: &ComplexMatrix, b: &ComplexMatrix, cc: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::block2(a, b, cc, d)
}

/// Block [[T, R^♯], [R, S]] tested for bold-A positivity against the sampled scalar
/// inequality |⟨Rx,y⟩_A|² ≤ ⟨Tx,x⟩_A⟨Sy,y⟩_A. The record's lhs is 1 when the two
/// verdicts disagree (then rhs is 0), and 0 against rhs 1 when they agree.
pub(crate) fn lemma1(ws: &Workspace, _p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let (t, s, r) = (&ws.ops()[0], &ws.ops()[1], &ws.ops()[2]);
    let rs = ws.sharp("R", r)?;
    let bold = ctx.block_bold_a();
    let h = bold.a() * &bold_block(t, &rs, r, s);
    let defect = psd_defect(&h);
    let block_positive = defect <= 1e-9;

    let cm = ws.compress(r);
    let (u, v) = bilinear_ratio(&cm, &herm(&ws.compress(t)), &herm(&ws.compress(s)), ws.search_seed("lemma1"), b);
    let (x, y) = expand_pair(ctx, &u, &v);
    let lhs = form(ctx, r, &x, &y).norm_sqr();
    let rhs = form(ctx, t, &x, &x).re * form(ctx, s, &y, &y).re;
    let ratio = lhs / rhs.max(1e-300);
    let scalar_holds = ratio <= 1.0 + 1e-8;
    let agree = block_positive == scalar_holds;

    let mut notes = Map::new();
    notes.insert("block_psd_defect".into(), json!(defect));
    notes.insert("block_positive".into(), json!(block_positive));
    notes.insert("scalar_ratio".into(), json!(ratio));
    notes.insert("scalar_holds".into(), json!(scalar_holds));
    let (l, r) = if agree { (0.0, 1.0) } else { (1.0, 0.0) };
    let link = Link::new("agreement", l, r).with_witness(vec![x, y]);
    Ok(Evaluation::Links { links: vec![link], notes })
}

pub(crate) fn lemma2(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let fg = p.req_fg();
    let (t, s, r) = (&ws.ops()[0], &ws.ops()[1], &ws.ops()[2]);
    let rs = ws.sharp("R", r)?;
    let f2 = ws.apply(t, &|x| fg.f(x).powi(2))?;
    let g2 = ws.apply(s, &|x| fg.g(x).powi(2))?;
    let bold = ctx.block_bold_a();
    let h = bold.a() * &bold_block(&f2, &rs, r, &g2);
    let premise = bold.a() * &bold_block(t, &rs, r, s);
    let mut notes = Map::new();
    notes.insert("premise_psd_defect".into(), json!(psd_defect(&premise)));
    Ok(Evaluation::Links { links: vec![Link::new("block_positive", psd_defect(&h), ctx.tol().psd_tol)], notes })
}

pub(crate) fn lemma3(ws: &Workspace, _p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let ts = ws.sharp("T", t)?;
    let abs_t = ws.abs("T", t)?;
    let abs_ts = ws.abs_sharp("T", t)?;
    let z = ComplexMatrix::zeros(ctx.dim(), ctx.dim());
    let bold = ctx.block_bold_a();
    let f = bold_block(&z, &ts, t, &z);
    let abs_f = bold.a_abs(&f)?;
    let expected = ComplexMatrix::block_diag(&abs_t, &abs_ts);
    let resid = (&abs_f - &expected).fro_norm() / (1.0 + expected.fro_norm());
    let h = bold.a() * &bold_block(&abs_t, &ts, t, &abs_ts);
    Ok(Evaluation::links(vec![
        Link::new("abs_block_formula", resid, 1e-9),
        Link::new("block_positive", psd_defect(&h), ctx.tol().psd_tol),
    ]))
}

/// f(|T|_A) and g(|T^♯|_A) for the first operator.
fn fg_ops(ws: &Workspace, fg: FgPair) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let t = &ws.ops()[0];
    let f = ws.apply(&ws.abs("T", t)?, &|x| fg.f(x))?;
    let g = ws.apply(&ws.abs_sharp("T", t)?, &|x| fg.g(x))?;
    Ok((f, g))
}

fn mixed_schwarz(ws: &Workspace, p: &Params, b: SearchBudget, factor: f64, label: &'static str) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let (f, g) = fg_ops(ws, p.req_fg())?;
    let cm = ws.compress(t);
    let (fm, gm) = (ws.compress(&f), ws.compress(&g));
    let (u, v) = bilinear_ratio(&cm, &(fm.adjoint() * &fm), &(gm.adjoint() * &gm), ws.search_seed("mixed_schwarz"), b);
    let (x, y) = expand_pair(ctx, &u, &v);
    let lhs = form(ctx, t, &x, &y).norm();
    let rhs = factor * a_norm(ctx, &f, &x) * a_norm(ctx, &g, &y);
    single(Link::new(label, lhs, rhs).denoise(fro(&cm)).with_witness(vec![x, y]))
}

pub(crate) fn thm1(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    mixed_schwarz(ws, p, b, 1.0, "mixed_schwarz")
}

pub(crate) fn thm2(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let rho = ws.spectral_radius("T", t)?;
    let mut ev = mixed_schwarz(ws, p, b, rho, "spectral_factor")?;
    if let Evaluation::Links { notes, .. } = &mut ev {
        notes.insert("r_A".into(), json!(rho));
    }
    Ok(ev)
}

pub(crate) fn kato_alpha(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let alpha = p.req_alpha();
    let xa = ws.abs_pow("T", t, 2.0 * alpha)?;
    let yb = ws.abs_sharp_pow("T", t, 2.0 * (1.0 - alpha))?;
    let cm = ws.compress(t);
    let (u, v) = bilinear_ratio(&cm, &herm(&ws.compress(&xa)), &herm(&ws.compress(&yb)), ws.search_seed("kato"), b);
    let (x, y) = expand_pair(ctx, &u, &v);
    let lhs = form(ctx, t, &x, &y).norm_sqr();
    let rhs = form(ctx, &xa, &x, &x).re * form(ctx, &yb, &y, &y).re;
    single(Link::new("kato", lhs, rhs).denoise(fro(&cm).powi(2)).with_witness(vec![x, y]))
}

pub(crate) fn kato_half(ws: &Workspace, _p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let xa = ws.abs_pow("T", t, 1.0)?;
    let yb = ws.abs_sharp_pow("T", t, 1.0)?;
    let cm = ws.compress(t);
    let (u, v) = bilinear_ratio(&cm, &herm(&ws.compress(&xa)), &herm(&ws.compress(&yb)), ws.search_seed("kato"), b);
    let (x, y) = expand_pair(ctx, &u, &v);
    let lhs = form(ctx, t, &x, &y).norm();
    let rhs = (form(ctx, &xa, &x, &x).re * form(ctx, &yb, &y, &y).re).max(0.0).sqrt();
    single(Link::new("kato_half", lhs, rhs).denoise(fro(&cm)).with_witness(vec![x, y]))
}

/// Single A-unit vector inequality lhs(s, sf) ≤ rhs(s, sf) where s = ⟨Zx,x⟩_A and
/// sf = ⟨Wx,x⟩_A.
fn vector_form(
    ws: &Workspace,
    b: SearchBudget,
    form_id: &str,
    label: &'static str,
    z: &ComplexMatrix,
    w: &ComplexMatrix,
    sides: &dyn Fn(f64, f64) -> (f64, f64),
) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let (zm, wm) = (herm(&ws.compress(z)), herm(&ws.compress(w)));
    let scale = 1.0 + {
        let (l, r) = sides(fro(&zm), fro(&wm));
        l.abs().max(r.abs())
    };
    let floor = 1e-12 * scale;
    let score = |u: &CVector| {
        let (l, r) = sides(quad(&zm, u), quad(&wm, u));
        l / (r.max(0.0) + floor)
    };
    let u = unit_search(ws, form_id, b, &score);
    let x = ctx.expand(&u);
    let (lhs, rhs) = sides(form(ctx, z, &x, &x).re, form(ctx, w, &x, &x).re);
    single(Link::new(label, lhs, rhs).denoise(scale).with_witness(vec![x]))
}

pub(crate) fn lemma4(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let f = p.func.expect("lemma4 grid sets func");
    let ft = ws.apply(t, &|x| f.eval(x))?;
    if f.is_convex() {
        vector_form(ws, b, "jensen", "jensen", t, &ft, &|s, sf| (f.eval(s), sf))
    } else {
        vector_form(ws, b, "jensen", "jensen_reversed", t, &ft, &|s, sf| (sf, f.eval(s)))
    }
}

pub(crate) fn mccarty_up(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let r = p.req_r();
    let tr = ws.power(t, r)?;
    vector_form(ws, b, "mccarty", "mccarty_up", t, &tr, &|s, sr| (s.max(0.0).powf(r), sr))
}

pub(crate) fn mccarty_down(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let r = p.req_r();
    let tr = ws.power(t, r)?;
    vector_form(ws, b, "mccarty", "mccarty_down", t, &tr, &|s, sr| (sr, s.max(0.0).powf(r)))
}

pub(crate) fn mccarty_a_positive(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let r = p.req_r();
    let at = (ctx.a() * t).hermitian_part();
    let z = t * &ws.power(&at, r - 1.0)?;
    vector_form(ws, b, "mccarty_a", "mccarty_a_positive", t, &z, &|s, sz| (s.max(0.0).powf(r), sz))
}

pub(crate) fn cor2(ws: &Workspace, _p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let abs_t = ws.abs("T", t)?;
    let (cm, am) = (ws.compress(t), herm(&ws.compress(&abs_t)));
    let floor = 1e-12 * (1.0 + fro(&cm));
    let score = |u: &CVector| u.dotc(&(&cm * u)).norm() / (quad(&am, u).max(0.0) + floor);
    let u = unit_search(ws, "abs_bound", b, &score);
    let x = ctx.expand(&u);
    let lhs = form(ctx, t, &x, &x).norm();
    let rhs = form(ctx, &abs_t, &x, &x).re;
    single(Link::new("abs_bound", lhs, rhs).denoise(fro(&cm)).with_witness(vec![x]))
}

fn norms(ms: &[DMatrix<C64>], u: &CVector) -> Vec<f64> {
    ms.iter().map(|m| (m * u).norm()).collect()
}

fn holder(a: &[f64], bb: &[f64], p: f64, q: f64) -> f64 {
    let sp: f64 = a.iter().map(|x| x.powf(p)).sum();
    let sq: f64 = bb.iter().map(|x| x.powf(q)).sum();
    sp.powf(1.0 / p) * sq.powf(1.0 / q)
}

fn dot(a: &[f64], bb: &[f64]) -> f64 {
    a.iter().zip(bb).map(|(x, y)| x * y).sum()
}

pub(crate) fn multi_holder(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let fg = p.req_fg();
    let (pp, qq) = p.req_pq();
    let n = ws.ops().len();
    let mut fs = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n);
    let mut sum = ComplexMatrix::zeros(ctx.dim(), ctx.dim());
    for (i, t) in ws.ops().iter().enumerate() {
        let name = format!("T{i}");
        fs.push(ws.apply(&ws.abs(&name, t)?, &|x| fg.f(x))?);
        gs.push(ws.apply(&ws.abs_sharp(&name, t)?, &|x| fg.g(x))?);
        sum = &sum + t;
    }
    let cm = ws.compress(&sum);
    let fm: Vec<_> = fs.iter().map(|f| ws.compress(f)).collect();
    let gm: Vec<_> = gs.iter().map(|g| ws.compress(g)).collect();
    let gram = |ms: &[DMatrix<C64>]| ms.iter().fold(DMatrix::zeros(cm.nrows(), cm.nrows()), |acc, m| acc + m.adjoint() * m);
    let start = bilinear_ratio(&cm, &gram(&fm), &gram(&gm), ws.search_seed("multi_holder:start"), SearchBudget { samples: 32, ..b });
    let floor = 1e-12 * (1.0 + fro(&cm));
    let sum_score = |u: &CVector, v: &CVector| v.dotc(&(&cm * u)).norm() / (dot(&norms(&fm, u), &norms(&gm, v)) + floor);
    let (u, v) = pair_search(ws, "multi_holder", b, start, &sum_score);
    let holder_score = |u: &CVector, v: &CVector| {
        let (a, bb) = (norms(&fm, u), norms(&gm, v));
        dot(&a, &bb) / (holder(&a, &bb, pp, qq) + floor)
    };
    let (u2, v2) = pair_search(ws, "multi_holder:holder", SearchBudget { refine: 1, ..b }, (u.clone(), v.clone()), &holder_score);

    let eval = |u: &CVector, v: &CVector| {
        let (x, y) = expand_pair(ctx, u, v);
        let a: Vec<f64> = fs.iter().map(|f| a_norm(ctx, f, &x)).collect();
        let bb: Vec<f64> = gs.iter().map(|g| a_norm(ctx, g, &y)).collect();
        (form(ctx, &sum, &x, &y).norm(), dot(&a, &bb), holder(&a, &bb, pp, qq), x, y)
    };
    let (l1, m1, _, x1, y1) = eval(&u, &v);
    let (_, m2, h2, x2, y2) = eval(&u2, &v2);
    let scale = fro(&cm);
    Ok(Evaluation::links(vec![
        Link::new("sum_bound", l1, m1).denoise(scale).with_witness(vec![x1, y1]),
        Link::new("holder", m2, h2).denoise(scale).with_witness(vec![x2, y2]),
    ]))
}

pub(crate) fn norm_sum(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let fg = p.req_fg();
    let (pp, qq) = p.req_pq();
    let mut sum = ComplexMatrix::zeros(ctx.dim(), ctx.dim());
    let mut a = Vec::new();
    let mut bb = Vec::new();
    for (i, t) in ws.ops().iter().enumerate() {
        let name = format!("T{i}");
        a.push(ws.norm(&ws.apply(&ws.abs(&name, t)?, &|x| fg.f(x))?));
        bb.push(ws.norm(&ws.apply(&ws.abs_sharp(&name, t)?, &|x| fg.g(x))?));
        sum = &sum + t;
    }
    let lhs = ws.norm(&sum);
    let rhs = holder(&a, &bb, pp, qq);
    single(Link::new("norm_sum", lhs, rhs).denoise(1.0 + lhs))
}

/// Compressed pieces for the Cartesian forms: per part (X-side, Y-side) operators.
struct CartesianParts {
    left: [ComplexMatrix; 2],
    right: [ComplexMatrix; 2],
}

fn cartesian_parts(
    ws: &Workspace,
    left: &dyn Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    right: &dyn Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
) -> Result<CartesianParts> {
    let t = &ws.ops()[0];
    let (pp, qq) = ws.cartesian("T", t)?;
    let lp = left(&ws.abs("P", &pp)?)?;
    let lq = left(&ws.abs("Q", &qq)?)?;
    let rp = right(&ws.abs_sharp("P", &pp)?)?;
    let rq = right(&ws.abs_sharp("Q", &qq)?)?;
    Ok(CartesianParts { left: [lp, lq], right: [rp, rq] })
}

pub(crate) fn thm3(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let fg = p.req_fg();
    let parts = cartesian_parts(ws, &|m| ws.apply(m, &|x| fg.f(x)), &|m| ws.apply(m, &|x| fg.g(x)))?;
    let cm = ws.compress(t);
    let lm: Vec<_> = parts.left.iter().map(|m| ws.compress(m)).collect();
    let rm: Vec<_> = parts.right.iter().map(|m| ws.compress(m)).collect();
    let floor = 1e-12 * (1.0 + fro(&cm));
    let xg = lm.iter().fold(DMatrix::zeros(cm.nrows(), cm.nrows()), |acc, m| acc + m.adjoint() * m);
    let yg = rm.iter().fold(DMatrix::zeros(cm.nrows(), cm.nrows()), |acc, m| acc + m.adjoint() * m);
    let start = bilinear_ratio(&cm, &xg, &yg, ws.search_seed("cartesian:start"), SearchBudget { samples: 32, ..b });
    let score = |u: &CVector, v: &CVector| v.dotc(&(&cm * u)).norm() / (dot(&norms(&lm, u), &norms(&rm, v)) + floor);
    let (u, v) = pair_search(ws, "cartesian_fg", b, start, &score);
    let (x, y) = expand_pair(ctx, &u, &v);
    let lhs = form(ctx, t, &x, &y).norm();
    let rhs: f64 = (0..2).map(|k| a_norm(ctx, &parts.left[k], &x) * a_norm(ctx, &parts.right[k], &y)).sum();
    single(Link::new("cartesian_fg", lhs, rhs).denoise(fro(&cm)).with_witness(vec![x, y]))
}

/// ⟨|P|^{2α}x,x⟩^{1/2}⟨|P^♯|^{2(1−α)}y,y⟩^{1/2} + (same for Q)
pub(crate) fn cor3(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let alpha = p.req_alpha();
    let parts = cartesian_parts(ws, &|m| ws.power(m, 2.0 * alpha), &|m| ws.power(m, 2.0 * (1.0 - alpha)))?;
    let cm = ws.compress(t);
    let lm: Vec<_> = parts.left.iter().map(|m| herm(&ws.compress(m))).collect();
    let rm: Vec<_> = parts.right.iter().map(|m| herm(&ws.compress(m))).collect();
    let floor = 1e-12 * (1.0 + fro(&cm));
    let side = |ms: &[DMatrix<C64>], u: &CVector| ms.iter().map(|m| quad(m, u).max(0.0).sqrt()).collect::<Vec<_>>();
    let start = bilinear_ratio(&cm, &(&lm[0] + &lm[1]), &(&rm[0] + &rm[1]), ws.search_seed("cartesian:start"), SearchBudget { samples: 32, ..b });
    let score = |u: &CVector, v: &CVector| v.dotc(&(&cm * u)).norm() / (dot(&side(&lm, u), &side(&rm, v)) + floor);
    let (u, v) = pair_search(ws, "cartesian_alpha", b, start, &score);
    let (x, y) = expand_pair(ctx, &u, &v);
    let lhs = form(ctx, t, &x, &y).norm();
    let rhs: f64 = (0..2)
        .map(|k| {
            (form(ctx, &parts.left[k], &x, &x).re.max(0.0) * form(ctx, &parts.right[k], &y, &y).re.max(0.0)).sqrt()
        })
        .sum();
    single(Link::new("cartesian_alpha", lhs, rhs).denoise(fro(&cm)).with_witness(vec![x, y]))
}

/// |⟨Tx,y⟩_A| ≤ ½⟨Xx,x⟩_A + ½⟨Yy,y⟩_A over all x, y. The sup of the ratio against
/// the geometric mean is found on unit pairs, then x, y are rescaled so the two
/// halves balance.
pub(crate) fn cor4(ws: &Workspace, p: &Params, b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let t = &ws.ops()[0];
    let alpha = p.req_alpha();
    let parts = cartesian_parts(ws, &|m| ws.power(m, 2.0 * alpha), &|m| ws.power(m, 2.0 * (1.0 - alpha)))?;
    let xo = &parts.left[0] + &parts.left[1];
    let yo = &parts.right[0] + &parts.right[1];
    let cm = ws.compress(t);
    let (u, v) = bilinear_ratio(&cm, &herm(&ws.compress(&xo)), &herm(&ws.compress(&yo)), ws.search_seed("cartesian_half_sum"), b);
    let (mut x, mut y) = expand_pair(ctx, &u, &v);
    let (qa, qb) = (form(ctx, &xo, &x, &x).re, form(ctx, &yo, &y, &y).re);
    if qa > 0.0 && qb > 0.0 {
        let s = (qb / qa).sqrt().sqrt();
        x *= c(s, 0.0);
        y /= c(s, 0.0);
    }
    let lhs = form(ctx, t, &x, &y).norm();
    let rhs = 0.5 * form(ctx, &xo, &x, &x).re + 0.5 * form(ctx, &yo, &y, &y).re;
    single(Link::new("cartesian_half_sum", lhs, rhs).denoise(fro(&cm)).with_witness(vec![x, y]))
}
