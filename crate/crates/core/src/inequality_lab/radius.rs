//! Bounds on w_A and ‖·‖_A of a single operator (or a sum) by seminorms of
//! functions of |·|_A and of the A-Cartesian parts.

use serde_json::{json, Map};

use super::params::{FgPair, Params};
use super::record::Link;
use super::search::SearchBudget;
use super::workspace::Workspace;
use super::Evaluation;
use crate::core_linalg::ComplexMatrix;
use crate::error::Result;

fn w_link(ws: &Workspace, label: &'static str, name: &str, z: &ComplexMatrix, exp: f64, rhs: f64) -> Result<Link> {
    let (w, x) = ws.w(name, z)?;
    let lhs = w.powf(exp);
    Ok(Link::new(label, lhs, rhs).denoise(1.0 + lhs.max(rhs)).with_witness(vec![x]))
}

/// |Z|_A^{2rα} + |Z^♯|_A^{2r(1−α)}
fn abs_pair(ws: &Workspace, name: &str, z: &ComplexMatrix, r: f64, alpha: f64) -> Result<ComplexMatrix> {
    Ok(ws.abs_pow(name, z, 2.0 * r * alpha)? + ws.abs_sharp_pow(name, z, 2.0 * r * (1.0 - alpha))?)
}

pub(crate) fn thm4(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let (r, alpha) = (p.req_r(), p.req_alpha());
    let rhs = 0.5 * ws.norm(&abs_pair(ws, "T", t, r, alpha)?);
    Ok(Evaluation::links(vec![w_link(ws, "w_r", "T", t, r, rhs)?]))
}

pub(crate) fn thm5(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let (r, alpha) = (p.req_r(), p.req_alpha());
    let m = ws.abs_pow("T", t, 2.0 * r)? * alpha + ws.abs_sharp_pow("T", t, 2.0 * r)? * (1.0 - alpha);
    let rhs = ws.norm(&m);
    Ok(Evaluation::links(vec![w_link(ws, "w_2r", "T", t, 2.0 * r, rhs)?]))
}

/// Two-level bound over the Cartesian parts P, Q; only conjugate pairs with p, q ≥ 2.
pub(crate) fn thm6(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let (pp, qq) = p.req_pq();
    if pp < 2.0 || qq < 2.0 {
        return Ok(Evaluation::Skip(format!("requires p, q >= 2, got ({pp}, {qq})")));
    }
    let fg: FgPair = p.req_fg();
    let t = &ws.ops()[0];
    let (re, im) = ws.cartesian("T", t)?;
    let fp = |m: &ComplexMatrix| ws.apply(m, &|x| fg.f(x).powf(pp));
    let gq = |m: &ComplexMatrix| ws.apply(m, &|x| fg.g(x).powf(qq));
    let fsum = fp(&ws.abs("P", &re)?)? + fp(&ws.abs("Q", &im)?)?;
    let gsum = gq(&ws.abs_sharp("P", &re)?)? + gq(&ws.abs_sharp("Q", &im)?)?;
    let (nf, ng) = (ws.norm(&fsum), ws.norm(&gsum));
    let mid = nf.powf(1.0 / pp) * ng.powf(1.0 / qq);
    let top = ws.norm(&(fsum * (1.0 / pp) + gsum * (1.0 / qq)));
    let (w, x) = ws.w("T", t)?;
    let scale = 1.0 + w.max(mid).max(top);
    Ok(Evaluation::links(vec![
        Link::new("holder_product", w, mid).denoise(scale).with_witness(vec![x]),
        Link::new("young", mid, top).denoise(scale),
    ]))
}

pub(crate) fn thm7(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let ctx = ws.ctx();
    let (pp, alpha) = (p.req_p(), p.req_alpha());
    let n = ws.ops().len();
    let mut sum = ComplexMatrix::zeros(ctx.dim(), ctx.dim());
    let mut bound = ComplexMatrix::zeros(ctx.dim(), ctx.dim());
    for (i, t) in ws.ops().iter().enumerate() {
        sum = sum + t;
        bound = bound + abs_pair(ws, &format!("T{i}"), t, pp, alpha)?;
    }
    let rhs = ws.norm(&bound) / (2.0 * (n as f64).powf(pp - 1.0));
    let mut ev = Evaluation::links(vec![w_link(ws, "sum_power", "sum", &sum, pp, rhs)?]);
    ev.note("n", json!(n));
    Ok(ev)
}

/// The six operators (T, S, C, D, E, F) after applying a named specialization.
fn thm8_operators(ws: &Workspace, variant: &str) -> [(String, ComplexMatrix); 6] {
    let ops = ws.ops();
    let n = ws.ctx().dim();
    let id = || ("I".to_string(), ComplexMatrix::identity(n));
    let named = |k: usize, s: &str| (s.to_string(), ops[k].clone());
    let [t, s, c, d, e, f] = ["T", "S", "C", "D", "E", "F"].map(|s| s.to_string());
    let base = [named(0, &t), named(1, &s), named(2, &c), named(3, &d), named(4, &e), named(5, &f)];
    match variant {
        "identity_t" => {
            let [_, _, c, d, e, f] = base;
            [id(), ("0".to_string(), ComplexMatrix::zeros(n, n)), c, d, e, f]
        }
        "identity_outer" => {
            let [t, s, ..] = base;
            [t, s, id(), id(), id(), id()]
        }
        "commutator_plus" | "commutator_minus" => {
            let [_, _, c, d, ..] = base;
            let f = if variant == "commutator_plus" { c.clone() } else { ("-C".to_string(), -&c.1) };
            [id(), id(), c, d.clone(), d, f]
        }
        _ => base,
    }
}

pub(crate) fn thm8(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let alpha = p.req_alpha();
    let variant = p.variant.as_deref().unwrap_or("general");
    let [(tn, t), (sn, s), (cn, c), (dn, d), (en, e), (fn_, f)] = thm8_operators(ws, variant);
    let z = &(&c * &t) * &d + &(&e * &s) * &f;
    let sandwich = |inner: ComplexMatrix, left: &ComplexMatrix, right: &ComplexMatrix| &(left * &inner) * right;
    let bound = sandwich(ws.abs_pow(&tn, &t, 2.0 * alpha)?, &ws.sharp(&dn, &d)?, &d)
        + sandwich(ws.abs_sharp_pow(&tn, &t, 2.0 * (1.0 - alpha))?, &c, &ws.sharp(&cn, &c)?)
        + sandwich(ws.abs_pow(&sn, &s, 2.0 * alpha)?, &ws.sharp(&fn_, &f)?, &f)
        + sandwich(ws.abs_sharp_pow(&sn, &s, 2.0 * (1.0 - alpha))?, &e, &ws.sharp(&en, &e)?);
    let rhs = 0.5 * ws.norm(&bound);
    let key = format!("CTD+ESF:{variant}");
    Ok(Evaluation::links(vec![w_link(ws, "sandwich", &key, &z, 1.0, rhs)?]))
}

/// T^♯T + TT^♯
pub(crate) fn sym_square(ws: &Workspace, name: &str, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ts = ws.sharp(name, t)?;
    Ok(&ts * t + t * &ts)
}

fn two_sided(ws: &Workspace, lower_c: f64, upper_c: f64, labels: [&'static str; 2], m: &ComplexMatrix) -> Result<Vec<Link>> {
    let t = &ws.ops()[0];
    let nm = ws.norm(m);
    let (w, x) = ws.w("T", t)?;
    let w2 = w * w;
    let scale = 1.0 + w2.max(nm);
    Ok(vec![
        Link::new(labels[0], lower_c * nm, w2).denoise(scale).with_witness(vec![x.clone()]),
        Link::new(labels[1], w2, upper_c * nm).denoise(scale).with_witness(vec![x]),
    ])
}

pub(crate) fn eq42(ws: &Workspace, _p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let m = sym_square(ws, "T", &ws.ops()[0])?;
    Ok(Evaluation::links(two_sided(ws, 1.0 / 16.0, 0.5, ["lower", "upper"], &m)?))
}

pub(crate) fn eq43(ws: &Workspace, _p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let m = sym_square(ws, "T", &ws.ops()[0])?;
    Ok(Evaluation::links(two_sided(ws, 0.25, 0.5, ["lower", "upper"], &m)?))
}

/// Cartesian reformulations: ½‖B²+C²‖ and ¼‖(B+C)²+(B−C)²‖ forms.
pub(crate) fn eq44(ws: &Workspace, _p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let (b, c) = ws.cartesian("T", t)?;
    let sq = &b * &b + &c * &c;
    let (bp, bm) = (&b + &c, &b - &c);
    let pm = &bp * &bp + &bm * &bm;
    let mut links = two_sided(ws, 0.5, 1.0, ["squares_lower", "squares_upper"], &sq)?;
    links.extend(two_sided(ws, 0.25, 0.5, ["pm_lower", "pm_upper"], &pm)?);
    Ok(Evaluation::links(links))
}

pub(crate) fn thm9(ws: &Workspace, p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let (r, alpha) = (p.req_r(), p.req_alpha());
    let (b, c) = ws.cartesian("T", t)?;
    let m = abs_pair(ws, "B", &b, r, alpha)? + abs_pair(ws, "C", &c, r, alpha)?;
    let rhs = 0.5 * ws.norm(&m);
    Ok(Evaluation::links(vec![w_link(ws, "cartesian_r", "T", t, r, rhs)?]))
}

/// r_A ≤ w_A ≤ ‖T‖_A
pub(crate) fn fund_r_w_norm(ws: &Workspace, _p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let rho = ws.spectral_radius("T", t)?;
    let (w, x) = ws.w("T", t)?;
    let nm = ws.norm(t);
    let scale = 1.0 + nm;
    Ok(Evaluation::links(vec![
        Link::new("spectral_radius", rho, w).denoise(scale).with_witness(vec![x]),
        Link::new("norm", w, nm).denoise(scale),
    ]))
}

/// ½‖T‖_A ≤ w_A ≤ ‖T‖_A; the notes carry both sides for equality harvesting.
pub(crate) fn fund_half_norm(ws: &Workspace, _p: &Params, _b: SearchBudget) -> Result<Evaluation> {
    let t = &ws.ops()[0];
    let (w, x) = ws.w("T", t)?;
    let nm = ws.norm(t);
    let scale = 1.0 + nm;
    let mut notes = Map::new();
    notes.insert("w_A".into(), json!(w));
    notes.insert("norm_A".into(), json!(nm));
    notes.insert("tags".into(), json!(ws.instance().tags.iter().map(|t| t.name()).collect::<Vec<_>>()));
    Ok(Evaluation::Links {
        links: vec![
            Link::new("half_norm", 0.5 * nm, w).denoise(scale).with_witness(vec![x]),
            Link::new("norm", w, nm).denoise(scale),
        ],
        notes,
    })
}
