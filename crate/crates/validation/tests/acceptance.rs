use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use seminorm_lab::core_linalg::{c, CVector, ComplexMatrix, TolerancePolicy, C64};
use seminorm_lab::generators::random::{derive_seed, random_unit, rng_from};
use seminorm_lab::generators::{gen_context, gen_tuple, generate, InstanceSpec, OperatorInstance, Tag};
use seminorm_lab::inequality_lab::campaign::records_to_jsonl;
use seminorm_lab::inequality_lab::record::relative_slack;
use seminorm_lab::inequality_lab::{
    checker_by_id, fuzz_campaign, run_check, CampaignPlan, CampaignReport, Params, Template, Verdict,
};
use seminorm_lab::radii::classical::numerical_radius;
use seminorm_lab::radii::sphere::{ascend, AscentOptions};
use seminorm_lab::radii::{r_a, sample_w_a, w_a, w_pa, TupleMode, TupleRadiusQuery, R_A_DEFAULT_LEVELS};
use seminorm_lab::semi_hilbert::SemiHilbertContext;

const SEED: u64 = 0x5EED_2026;

struct Outcome {
    pass: bool,
    detail: String,
    extra: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail, extra: Vec::new() }
    }
}

fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn shape(base: u64, i: u64) -> (u64, usize, usize) {
    let seed = derive_seed(base, i);
    let h = derive_seed(seed, 0xD1);
    let dim = 2 + (h % 5) as usize;
    let rank = 1 + ((h >> 8) % dim as u64) as usize;
    (seed, dim, rank)
}

fn instance(base: u64, i: u64, tags: &[Tag], n: usize) -> OperatorInstance {
    let (seed, dim, mut rank) = shape(base, i);
    if tags.contains(&Tag::NilpotentAT2) {
        rank = rank.max(2);
    }
    generate(&InstanceSpec::new(dim, rank, tags, n, seed)).expect("generator")
}

fn fro_rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = (a - b).fro_norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.fro_norm().max(b.fro_norm())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

// oracles on the real embedding [[Re, -Im], [Im, Re]], whose spectrum doubles the complex one

fn lambda_max(h: &DMatrix<C64>) -> f64 {
    let n = h.nrows();
    let herm = (h + h.adjoint()) * c(0.5, 0.0);
    let emb = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = herm[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    SymmetricEigen::new(emb).eigenvalues.max()
}

fn classical_radius(m: &DMatrix<C64>) -> f64 {
    let f = |t: f64| lambda_max(&(m * C64::from_polar(1.0, t)));
    let grid = 4096;
    let step = std::f64::consts::TAU / grid as f64;
    let mut pts: Vec<(f64, f64)> = (0..grid).map(|k| (f(k as f64 * step), k as f64 * step)).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = pts[0].0;
    for &(_, t0) in pts.iter().take(8) {
        let (mut a, mut b) = (t0 - step, t0 + step);
        while b - a > 1e-12 {
            let (m1, m2) = (b - gr * (b - a), a + gr * (b - a));
            if f(m1) < f(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        best = best.max(f(0.5 * (a + b)));
    }
    best
}

/// 1: A·T^♯ = T*A, (T^♯)^♯ = P_A T P_A, ‖T^♯‖_A = ‖T‖_A over 500 instances.
fn fundamental_identities(insts: &[OperatorInstance], generation: Duration) -> Outcome {
    let start = Instant::now() - generation;
    let (mut e1, mut e2, mut e3) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for inst in insts {
        let (ctx, t) = (&inst.ctx, &inst.operators[0]);
        let ts = ctx.a_adjoint(t).expect("general_in_BA operator");
        let tss = ctx.a_adjoint(&ts).expect("adjoint is in B_A");
        let d1 = fro_rel(&(ctx.a() * &ts), &(t.adjoint() * ctx.a()));
        let d2 = fro_rel(&tss, &(&(ctx.p_a() * t) * ctx.p_a()));
        let d3 = rel(ctx.a_seminorm_op(&ts), ctx.a_seminorm_op(t));
        failures += (d1 > 1e-10 || d2 > 1e-9 || d3 > 1e-8) as usize;
        (e1, e2, e3) = (e1.max(d1), e2.max(d2), e3.max(d3));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        failures == 0 && secs < 30.0,
        format!(
            "{} instances, max errors {e1:.2e} / {e2:.2e} / {e3:.2e} (tol 1e-10 / 1e-9 / 1e-8), {failures} failing, {secs:.2}s including generation",
            insts.len()
        ),
    )
}

/// 2: r_A ≤ w_A ≤ ‖T‖_A and ½‖T‖_A ≤ w_A, relative slack ≥ −1e−8.
fn radius_chain(insts: &[OperatorInstance]) -> Outcome {
    let mut worst = [f64::INFINITY; 3];
    for inst in insts {
        let (ctx, t) = (&inst.ctx, &inst.operators[0]);
        let n = ctx.a_seminorm_op(t);
        let w = w_a(ctx, t).expect("w_A").value;
        let r = r_a(ctx, t, R_A_DEFAULT_LEVELS).expect("r_A").value;
        for (k, (l, h)) in [(r, w), (w, n), (0.5 * n, w)].into_iter().enumerate() {
            worst[k] = worst[k].min(relative_slack(l, h));
        }
    }
    let pass = worst.iter().all(|&s| s >= -1e-8);
    Outcome::new(
        pass,
        format!(
            "min relative slack r<=w {:.2e}, w<=norm {:.2e}, norm/2<=w {:.2e} (floor -1e-8)",
            worst[0], worst[1], worst[2]
        ),
    )
}

/// 3: equality probes for AT² = 0 and A-normal commuting T.
fn equality_probes() -> Outcome {
    let mut worst_nil = 0.0f64;
    let mut worst_normal = 0.0f64;
    let mut failures = 0;
    for i in 0..50 {
        let inst = instance(SEED ^ 0x3A, i, &[Tag::NilpotentAT2], 1);
        let (ctx, t) = (&inst.ctx, &inst.operators[0]);
        let n = ctx.a_seminorm_op(t);
        let d = (w_a(ctx, t).unwrap().value - 0.5 * n).abs() / n;
        failures += (d > 1e-6) as usize;
        worst_nil = worst_nil.max(d);

        let inst = instance(SEED ^ 0x3B, i, &[Tag::ANormal, Tag::CommutesWithA], 1);
        let (ctx, t) = (&inst.ctx, &inst.operators[0]);
        let n = ctx.a_seminorm_op(t);
        let d = (w_a(ctx, t).unwrap().value - n).abs() / n;
        failures += (d > 1e-6) as usize;
        worst_normal = worst_normal.max(d);
    }
    Outcome::new(
        failures == 0,
        format!("50 nilpotent_AT2: max |w-norm/2|/norm {worst_nil:.2e}; 50 a_normal: max |w-norm|/norm {worst_normal:.2e} (tol 1e-6)"),
    )
}

fn acceptance_plan(threads: usize) -> CampaignPlan {
    CampaignPlan { seed: SEED, instance_count: 500, threads, ..Default::default() }
}

/// 4: the full assert-severity campaign.
fn assert_campaign(report: &CampaignReport, elapsed: Duration) -> Outcome {
    let violations: usize = report.summary.values().map(|s| s.violations).sum();
    let violating: Vec<&str> =
        report.summary.iter().filter(|(_, s)| s.violations > 0).map(|(id, _)| id.as_str()).collect();
    let secs = elapsed.as_secs_f64();
    let mut out = Outcome::new(
        violations == 0 && secs < 300.0,
        format!(
            "{} checkers x 500 instances, {} records, {violations} violated in {} checkers {:?}, {secs:.1}s",
            report.summary.len(),
            report.records.len(),
            violating.len(),
            violating
        ),
    );
    for (id, s) in &report.summary {
        let slack = s.min_rel_slack.map_or_else(|| "-".to_string(), |v| format!("{v:+.3e}"));
        out.extra.push(format!(
            "{id:<24} min_rel_slack {slack:>11}  violations {:>5}/{:<5}  skipped {:>4}  degenerate {:>3}",
            s.violations, s.evaluated, s.hypothesis_skipped, s.degenerate
        ));
    }
    out
}

/// 5: block positivity agrees with the sampled scalar inequality.
fn block_equivalence() -> Outcome {
    let checker = checker_by_id("lemma1_block_equiv").unwrap();
    let (mut agree, mut non_psd) = (0, 0);
    for i in 0..100 {
        let (seed, dim, rank) = shape(SEED ^ 0x5A, i);
        let ctx = gen_context(&InstanceSpec::new(dim, rank, &[], 1, seed)).unwrap();
        let inst = Template::Block.build(&ctx, seed).unwrap();
        let rec = run_check(&checker, &inst, &Params::default());
        agree += (rec.verdict == Verdict::Holds) as usize;
        non_psd += (rec.parameter_values.get("block_positive") == Some(&serde_json::Value::Bool(false))) as usize;
    }
    Outcome::new(agree == 100, format!("{agree}/100 agree ({non_psd} blocks not A-positive)"))
}

fn compressed_abs_sq(m: &DMatrix<C64>) -> impl Fn(&CVector) -> (f64, CVector) + '_ {
    move |y: &CVector| {
        let my = m * y;
        let mhy = m.adjoint() * y;
        let q = y.dotc(&my);
        ((q.norm_sqr()), (mhy * q + my * q.conj()) * c(2.0, 0.0))
    }
}

/// 6: θ-sweep vs best of 10⁵ samples vs projected-gradient refinement, within 1e−6.
fn oracle_agreement() -> Outcome {
    let (mut sweep_refine, mut sweep_sample) = (0.0f64, 0.0f64);
    let (mut within, mut rank_one) = (0, 0);
    let mut gap_by_rank: BTreeMap<usize, f64> = BTreeMap::new();
    for i in 0..100 {
        let inst = instance(SEED ^ 0x6A, i, &[Tag::GeneralInBA], 1);
        let (ctx, t) = (&inst.ctx, &inst.operators[0]);
        let m = ctx.compress(t);
        let sweep = numerical_radius(&m).0;
        let sampled = sample_w_a(ctx, t, 100_000, derive_seed(inst.seed, 6)).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut rng = rng_from(derive_seed(inst.seed, 66));
        let refined = (0..8)
            .map(|_| ascend(compressed_abs_sq(&m), &random_unit(&mut rng, m.nrows()), AscentOptions { max_iter: 4000, grad_tol: 1e-14 }).0)
            .fold(0.0, f64::max)
            .sqrt();
        let (a, b) = ((sweep - refined).abs(), (sweep - sampled).abs());
        sweep_refine = sweep_refine.max(a);
        sweep_sample = sweep_sample.max(b);
        let spread = a.max(b).max((sampled - refined).abs());
        within += (spread <= 1e-6) as usize;
        rank_one += (ctx.rank() == 1) as usize;
        let g = gap_by_rank.entry(ctx.rank()).or_insert(0.0);
        *g = g.max(b);
    }
    let mut out = Outcome::new(
        within == 100,
        format!(
            "{within}/100 within 1e-6; max |sweep-refine| {sweep_refine:.2e}, max |sweep-best sample| {sweep_sample:.2e} ({rank_one} rank-one instances)"
        ),
    );
    out.extra.push(format!(
        "max sampling gap by rank_A: {}",
        gap_by_rank.iter().map(|(r, g)| format!("{r}: {g:.2e}")).collect::<Vec<_>>().join(", ")
    ));
    out
}

/// 7: A = I reduction against classical quantities.
fn identity_reduction() -> Outcome {
    let kato = checker_by_id("kato_alpha").unwrap();
    let (mut e_w, mut e_n, mut e_abs) = (0.0f64, 0.0f64, 0.0f64);
    let (mut kato_ok, mut failures) = (0, 0);
    for i in 0..100u64 {
        let n = 2 + (i % 5) as usize;
        let ctx = SemiHilbertContext::new(&ComplexMatrix::identity(n), TolerancePolicy::default()).unwrap();
        let spec = InstanceSpec::new(n, n, &[Tag::GeneralInBA], 1, derive_seed(SEED ^ 0x7A, i));
        let inst = gen_tuple(&spec, &ctx).unwrap();
        let t = &inst.operators[0];
        let svd = t.as_na().clone().svd(true, true);
        let sig = DMatrix::from_diagonal(&svd.singular_values.map(|s| c(s, 0.0)));
        let vt = svd.v_t.unwrap();
        let abs_classical = ComplexMatrix::from_na(vt.adjoint() * &sig * &vt).unwrap();
        let d_w = rel(w_a(&ctx, t).unwrap().value, classical_radius(t.as_na()));
        let d_n = rel(ctx.a_seminorm_op(t), svd.singular_values.max());
        let d_abs = fro_rel(&ctx.a_abs(t).unwrap(), &abs_classical);
        failures += (d_w > 1e-9 || d_n > 1e-9 || d_abs > 1e-9) as usize;
        (e_w, e_n, e_abs) = (e_w.max(d_w), e_n.max(d_n), e_abs.max(d_abs));
        // the classical inequality holds with equality at the top singular pair
        let inst = OperatorInstance { tags: [Tag::CommutesWithA].into_iter().collect(), ..inst };
        let all = [0.0, 0.25, 0.5, 0.75, 1.0].iter().all(|&a| {
            let rec = run_check(&kato, &inst, &Params::alpha(a));
            rec.verdict == Verdict::Holds && rec.is_equality_case()
        });
        kato_ok += all as usize;
    }
    Outcome::new(
        failures == 0 && kato_ok == 100,
        format!(
            "kato_alpha sharp and holding on {kato_ok}/100; max rel errors w {e_w:.2e}, norm {e_n:.2e}, |T| {e_abs:.2e} (tol 1e-9)"
        ),
    )
}

/// 8: copies at p = 1, Euclidean radius of the Cartesian parts, and the sym-square
/// tuple bounds for n ∈ {1, 2, 3}, p ∈ {1, 2}.
fn tuple_radii() -> Outcome {
    let mut copies_err = 0.0f64;
    for i in 0..25 {
        let inst = instance(SEED ^ 0x8A, i, &[Tag::GeneralInBA], 1);
        let (ctx, t) = (&inst.ctx, &inst.operators[0]);
        let w = w_a(ctx, t).unwrap().value;
        for n in 1..=4 {
            let q = TupleRadiusQuery { operators: vec![t.clone(); n], p: 1.0, mode: TupleMode::Radius };
            copies_err = copies_err.max(rel(w_pa(ctx, &q).unwrap().value, n as f64 * w));
        }
    }
    let mut euclid_err = 0.0f64;
    for i in 0..50 {
        let inst = instance(SEED ^ 0x8B, i, &[Tag::GeneralInBA], 1);
        let (ctx, t) = (&inst.ctx, &inst.operators[0]);
        let parts = ctx.cartesian(t).unwrap();
        let q = TupleRadiusQuery { operators: vec![parts.real_part, parts.imag_part], p: 2.0, mode: TupleMode::Radius };
        euclid_err = euclid_err.max((w_pa(ctx, &q).unwrap().value - w_a(ctx, t).unwrap().value).abs());
    }
    let thm10 = checker_by_id("thm10_tuple").unwrap();
    let mut bounds: BTreeMap<(usize, u32), (f64, usize, usize)> = BTreeMap::new();
    for n in 1..=3usize {
        for i in 0..20 {
            let (seed, dim, rank) = shape(SEED ^ 0x8C ^ n as u64, i);
            let ctx = gen_context(&InstanceSpec::new(dim, rank, &[], 1, seed)).unwrap();
            let inst = gen_tuple(&InstanceSpec::new(dim, rank, &[Tag::GeneralInBA], n, seed), &ctx).unwrap();
            for p in [1.0, 2.0] {
                let rec = run_check(&thm10, &inst, &Params { p: Some(p), ..Default::default() });
                let e = bounds.entry((n, p as u32)).or_insert((f64::INFINITY, 0, 0));
                e.0 = e.0.min(rec.relative_slack);
                e.1 += (rec.relative_slack < -1e-8) as usize;
                e.2 += 1;
            }
        }
    }
    let bounds_ok = bounds.values().all(|b| b.1 == 0);
    let mut out = Outcome::new(
        copies_err <= 1e-7 && euclid_err <= 1e-6 && bounds_ok,
        format!(
            "copies max rel err {copies_err:.2e} (tol 1e-7); Cartesian p=2 max abs err {euclid_err:.2e} (tol 1e-6); tuple bounds {}",
            if bounds_ok { "hold" } else { "violated" }
        ),
    );
    for ((n, p), (s, v, k)) in &bounds {
        out.extra.push(format!("tuple bounds n={n} p={p}: min relative slack {s:+.3e}, {v}/{k} below -1e-8"));
    }
    out
}

/// 9: two runs of the acceptance campaign give byte-identical JSONL.
fn determinism(first: &str, second: &str) -> Outcome {
    let same = first.as_bytes() == second.as_bytes();
    Outcome::new(same, format!("{} bytes vs {} bytes, identical: {same}", first.len(), second.len()))
}

#[test]
fn acceptance() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |n: u32, name: &'static str, o: Outcome| {
        say(&format!("criterion {n} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail));
        for e in &o.extra {
            say(&format!("    {e}"));
        }
        results.push((n, name, o));
    };

    let start = Instant::now();
    let base: Vec<OperatorInstance> = (0..500).map(|i| instance(SEED, i, &[Tag::GeneralInBA], 1)).collect();
    run(1, "fundamental identities", fundamental_identities(&base, start.elapsed()));
    run(2, "radius chain", radius_chain(&base));
    run(3, "equality probes", equality_probes());

    let start = Instant::now();
    let first = fuzz_campaign(&acceptance_plan(0)).expect("campaign");
    let elapsed = start.elapsed();
    let first_jsonl = records_to_jsonl(&first.records);
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    if std::fs::create_dir_all(&dir).is_ok() {
        let _ = std::fs::write(dir.join("records.jsonl"), &first_jsonl);
        let _ = std::fs::write(dir.join("summary.json"), seminorm_lab::inequality_lab::campaign::summary_to_json(&first.summary));
    }
    run(4, "assert-severity campaign", assert_campaign(&first, elapsed));
    run(5, "block equivalence", block_equivalence());
    run(6, "w_A oracle agreement", oracle_agreement());
    run(7, "identity reduction", identity_reduction());
    run(8, "tuple radii", tuple_radii());

    let second = fuzz_campaign(&acceptance_plan(3)).expect("campaign");
    run(9, "determinism", determinism(&first_jsonl, &records_to_jsonl(&second.records)));

    let failed: Vec<String> = results.iter().filter(|r| !r.2.pass).map(|r| format!("{} ({})", r.0, r.1)).collect();
    say(&format!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len()));
    assert!(failed.is_empty(), "failing criteria: {}", failed.join(", "));
}
