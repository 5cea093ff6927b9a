//! Registry of inequality checkers, their hypotheses and parameter grids, and the
//! evaluation of one check into a [`CheckRecord`].

pub mod campaign;
mod forms;
pub mod params;
mod radius;
pub mod record;
pub mod search;
mod tuples;
mod workspace;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::core_linalg::{relative_min_eig, ComplexMatrix};
use crate::error::{LabError, Result};
use crate::generators::random::derive_seed;
use crate::generators::{gen_block_triple, gen_intertwined_triple, gen_tuple, InstanceSpec, OperatorInstance, Tag};
use crate::semi_hilbert::SemiHilbertContext;

pub use campaign::{fuzz_campaign, summarize, CampaignPlan, CampaignReport, CheckerSummary};
pub use params::{alpha_values, fg_values, BoundedFactor, FgPair, Params, ScalarFn};
pub use record::{CheckRecord, Verdict, VectorValue};
pub use search::SearchBudget;
pub use workspace::Workspace;

use record::Link;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Assert,
    Explore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// every operator is in B_A
    InBA,
    /// every operator commutes with A
    CommutesWithA,
    /// the first two operators commute with A
    OuterCommute,
    /// the first operator is A-positive
    APositive,
    /// the first operator is Hermitian PSD and commutes with A
    PsdCommuting,
    /// the first operator equals its A-adjoint
    SharpSelfadjoint,
    /// (T, S, R) with T, S A-positive
    BlockTriple,
    /// block triple with SR = RT and the block A-positive
    Intertwined,
    /// exactly two operators
    Pair,
    Nonempty,
}

impl Hypothesis {
    fn holds(self, inst: &OperatorInstance) -> Result<bool> {
        let ctx = &inst.ctx;
        let ops = &inst.operators;
        let eps = ctx.structural_tol();
        let commutes = |t: &ComplexMatrix| {
            let at = ctx.a() * t;
            (&at - &(t * ctx.a())).fro_norm() <= eps * (1.0 + at.fro_norm())
        };
        let a_positive = |t: &ComplexMatrix| -> Result<bool> { Ok(ctx.predicates(t)?.a_positive) };
        Ok(match self {
            Hypothesis::InBA => {
                for t in ops {
                    if !ctx.douglas_member(t)? {
                        return Ok(false);
                    }
                }
                true
            }
            Hypothesis::CommutesWithA => ops.iter().all(commutes),
            Hypothesis::OuterCommute => ops.len() >= 2 && ops[..2].iter().all(commutes),
            Hypothesis::APositive => !ops.is_empty() && a_positive(&ops[0])?,
            Hypothesis::PsdCommuting => {
                let t = &ops[0];
                t.asymmetry() <= eps * (1.0 + t.fro_norm())
                    && relative_min_eig(t) >= -ctx.tol().psd_tol.max(eps * 1e-2)
                    && commutes(t)
            }
            Hypothesis::SharpSelfadjoint => !ops.is_empty() && ctx.predicates(&ops[0])?.sharp_a_selfadjoint,
            Hypothesis::BlockTriple => ops.len() == 3 && a_positive(&ops[0])? && a_positive(&ops[1])?,
            Hypothesis::Intertwined => {
                if !Hypothesis::BlockTriple.holds(inst)? {
                    return Ok(false);
                }
                let (t, s, r) = (&ops[0], &ops[1], &ops[2]);
                let sr = s * r;
                let inter = (&sr - &(r * t)).fro_norm() <= eps * (1.0 + sr.fro_norm());
                inter && block_defect(ctx, t, s, r)? <= 1e-9
            }
            Hypothesis::Pair => ops.len() == 2,
            Hypothesis::Nonempty => !ops.is_empty(),
        })
    }
}

/// −λ_min/‖H‖ for H = 𝐀·[[T, R^♯], [R, S]].
fn block_defect(ctx: &SemiHilbertContext, t: &ComplexMatrix, s: &ComplexMatrix, r: &ComplexMatrix) -> Result<f64> {
    let rs = ctx.a_adjoint(r)?;
    let bold = ctx.block_bold_a();
    Ok(-relative_min_eig(&(bold.a() * &ComplexMatrix::block2(t, &rs, r, s))))
}

/// How the operators of a check are generated on a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    Single(&'static [Tag]),
    Tuple { tags: &'static [Tag], sizes: &'static [usize] },
    /// (T, S, R), T and S A-positive, block positivity mixed
    Block,
    /// (T, S, R) with SR = RT and a positive block
    Intertwined,
    /// (T, S, C, D, E, F) with T, S commuting with A
    SixOperator,
    /// general, A-normal commuting, or AT² = 0, by seed
    HalfNormProbe,
}

const GENERAL: &[Tag] = &[Tag::GeneralInBA];
const COMMUTING: &[Tag] = &[Tag::CommutesWithA];
const POSITIVE: &[Tag] = &[Tag::APositive];
const SHARP_SELFADJOINT: &[Tag] = &[Tag::SharpASelfadjoint];

impl Template {
    pub fn build(self, ctx: &SemiHilbertContext, seed: u64) -> Result<OperatorInstance> {
        let (dim, rank) = (ctx.dim(), ctx.rank().max(1));
        let tuple = |tags: &[Tag], n: usize, s: u64| gen_tuple(&InstanceSpec::new(dim, rank, tags, n, s), ctx);
        match self {
            Template::Single(tags) => tuple(tags, 1, seed),
            Template::Tuple { tags, sizes } => {
                let n = sizes[(derive_seed(seed, 0x5123) % sizes.len() as u64) as usize];
                tuple(tags, n, seed)
            }
            Template::Block | Template::Intertwined => {
                let bt = if self == Template::Block { gen_block_triple(ctx, seed)? } else { gen_intertwined_triple(ctx, seed)? };
                Ok(OperatorInstance {
                    ctx: ctx.clone(),
                    operators: vec![bt.t, bt.s, bt.r],
                    tags: [Tag::APositive].into_iter().collect(),
                    seed,
                })
            }
            Template::SixOperator => {
                let mut inst = tuple(COMMUTING, 2, seed)?;
                let outer = tuple(GENERAL, 4, derive_seed(seed, 0x0C7E))?;
                inst.operators.extend(outer.operators);
                inst.tags.extend(outer.tags);
                Ok(inst)
            }
            Template::HalfNormProbe => {
                let tags: &[Tag] = match derive_seed(seed, 0x4A1F) % 3 {
                    1 => &[Tag::ANormal, Tag::CommutesWithA],
                    2 if rank >= 2 => &[Tag::NilpotentAT2],
                    _ => GENERAL,
                };
                tuple(tags, 1, seed)
            }
        }
    }

    fn is_tuple(self) -> bool {
        matches!(self, Template::Tuple { .. })
    }
}

/// Parameter grid of a checker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Grid {
    None,
    Alpha,
    Fg,
    FgPq,
    R(&'static [f64]),
    AlphaR,
    AlphaP(&'static [f64]),
    AlphaVariants(&'static [&'static str]),
    Funcs,
    P(&'static [f64]),
    PQ(&'static [(f64, f64)]),
    Q(&'static [f64]),
}

pub const LEMMA4_FUNCS: [ScalarFn; 6] = [
    ScalarFn::Square,
    ScalarFn::ExpMinusOne,
    ScalarFn::Power { r: 1.5 },
    ScalarFn::Power { r: 3.0 },
    ScalarFn::Sqrt,
    ScalarFn::Log1p,
];
pub const THM8_VARIANTS: [&str; 5] = ["general", "identity_t", "identity_outer", "commutator_plus", "commutator_minus"];
pub const CHAIN_P: [f64; 3] = [1.5, 2.0, 3.0];
pub const POWER_MEAN_PQ: [(f64, f64); 4] = [(1.0, 2.0), (1.0, 3.0), (2.0, 3.0), (1.5, 4.0)];
pub const SUPERQUAD_P: [f64; 2] = [2.0, 3.0];
pub const SYM_P: [f64; 2] = [1.0, 2.0];

impl Grid {
    pub fn values(self, seed: u64) -> Vec<Params> {
        let none = Params::default();
        match self {
            Grid::None => vec![none],
            Grid::Alpha => alpha_values(seed).into_iter().map(Params::alpha).collect(),
            Grid::Fg => fg_values(seed).into_iter().map(|fg| Params { fg: Some(fg), ..none.clone() }).collect(),
            Grid::FgPq => fg_values(seed)
                .into_iter()
                .flat_map(|fg| {
                    params::PQ_GRID.iter().map(move |&(p, q)| Params { fg: Some(fg), p: Some(p), q: Some(q), ..Default::default() })
                })
                .collect(),
            Grid::R(rs) => rs.iter().map(|&r| Params { r: Some(r), ..none.clone() }).collect(),
            Grid::AlphaR => alpha_values(seed)
                .into_iter()
                .flat_map(|a| params::R_GRID.iter().map(move |&r| Params { alpha: Some(a), r: Some(r), ..Default::default() }))
                .collect(),
            Grid::AlphaP(ps) => alpha_values(seed)
                .into_iter()
                .flat_map(|a| ps.iter().map(move |&p| Params { alpha: Some(a), p: Some(p), ..Default::default() }))
                .collect(),
            Grid::AlphaVariants(vs) => alpha_values(seed)
                .into_iter()
                .flat_map(|a| {
                    vs.iter().map(move |v| Params { alpha: Some(a), variant: Some(v.to_string()), ..Default::default() })
                })
                .collect(),
            Grid::Funcs => LEMMA4_FUNCS.iter().map(|&f| Params { func: Some(f), ..none.clone() }).collect(),
            Grid::P(ps) => ps.iter().map(|&p| Params { p: Some(p), ..none.clone() }).collect(),
            Grid::PQ(pqs) => pqs.iter().map(|&(p, q)| Params { p: Some(p), q: Some(q), ..none.clone() }).collect(),
            Grid::Q(qs) => qs.iter().map(|&q| Params { q: Some(q), ..none.clone() }).collect(),
        }
    }
}

pub(crate) type EvalFn = fn(&Workspace, &Params, SearchBudget) -> Result<Evaluation>;

pub(crate) enum Evaluation {
    Links { links: Vec<Link>, notes: Map<String, Value> },
    Skip(String),
}

impl Evaluation {
    pub(crate) fn links(links: Vec<Link>) -> Self {
        Evaluation::Links { links, notes: Map::new() }
    }

    pub(crate) fn note(&mut self, key: &str, v: Value) {
        if let Evaluation::Links { notes, .. } = self {
            notes.insert(key.to_string(), v);
        }
    }
}

#[derive(Clone)]
pub struct InequalityChecker {
    pub id: &'static str,
    /// the inequality in compact notation
    pub anchor: &'static str,
    pub severity: Severity,
    pub hypotheses: &'static [Hypothesis],
    pub template: Template,
    pub grid: Grid,
    /// lhs maximized by a vector search
    pub searched: bool,
    eval: EvalFn,
}

impl std::fmt::Debug for InequalityChecker {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InequalityChecker").field("id", &self.id).field("severity", &self.severity).finish()
    }
}

impl InequalityChecker {
    pub fn describe(&self) -> Value {
        json!({
            "id": self.id,
            "anchor": self.anchor,
            "severity": self.severity,
            "hypotheses": self.hypotheses,
            "searched": self.searched,
        })
    }

    pub fn params_for(&self, seed: u64) -> Vec<Params> {
        self.grid.values(seed)
    }

    /// First failing hypothesis, if any.
    pub fn failed_hypothesis(&self, inst: &OperatorInstance) -> Result<Option<Hypothesis>> {
        for &h in self.hypotheses {
            if !h.holds(inst)? {
                return Ok(Some(h));
            }
        }
        Ok(None)
    }
}

use Hypothesis as H;
use Severity::{Assert, Explore};

macro_rules! checker {
    ($id:expr, $anchor:expr, $sev:expr, $hyp:expr, $tpl:expr, $grid:expr, $searched:expr, $eval:path) => {
        InequalityChecker {
            id: $id,
            anchor: $anchor,
            severity: $sev,
            hypotheses: $hyp,
            template: $tpl,
            grid: $grid,
            searched: $searched,
            eval: $eval,
        }
    };
}

const SMALL_TUPLES: &[usize] = &[1, 2, 3];
const MULTI_TUPLES: &[usize] = &[2, 3];
const CHAIN_TUPLES: &[usize] = &[2, 3, 4];
const PAIR: &[usize] = &[2];

pub fn registry() -> Vec<InequalityChecker> {
    use Template::*;
    let single_general = Single(GENERAL);
    let single_commuting = Single(COMMUTING);
    vec![
        checker!("schwarz_A_positive", "|<Tx,y>_A|^2 <= <Tx,x>_A <Ty,y>_A", Assert, &[H::InBA, H::APositive], Single(POSITIVE), Grid::None, true, forms::schwarz),
        checker!("lemma1_block_equiv", "A-[[T,R#],[R,S]] >= 0 <=> |<Rx,y>_A|^2 <= <Tx,x>_A <Sy,y>_A", Assert, &[H::InBA, H::BlockTriple], Block, Grid::None, true, forms::lemma1),
        checker!("lemma2_fg_block", "A-[[f^2(T),R#],[R,g^2(S)]] >= 0", Assert, &[H::InBA, H::Intertwined], Intertwined, Grid::Fg, false, forms::lemma2),
        checker!("lemma3_abs_block", "A-[[|T|_A,T#],[T,|T#|_A]] >= 0", Assert, &[H::InBA, H::APositive, H::CommutesWithA], Single(POSITIVE), Grid::None, false, forms::lemma3),
        checker!("thm1_mixed_schwarz", "|<Tx,y>_A| <= ||f(|T|_A)x||_A ||g(|T#|_A)y||_A", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::Fg, true, forms::thm1),
        checker!("kato_alpha", "|<Tx,y>_A|^2 <= <|T|_A^{2a}x,x>_A <|T#|_A^{2(1-a)}y,y>_A", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::Alpha, true, forms::kato_alpha),
        checker!("kato_half", "|<Tx,y>_A| <= <|T|_A x,x>_A^{1/2} <|T#|_A y,y>_A^{1/2}", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::None, true, forms::kato_half),
        checker!("thm2_spectral_factor", "|<Tx,y>_A| <= r_A(T) ||f(|T|_A)x||_A ||g(|T#|_A)y||_A", Explore, &[H::InBA, H::CommutesWithA], single_commuting, Grid::Fg, true, forms::thm2),
        checker!("lemma4_jensen", "f(<Tx,x>_A) <= <f(T)x,x>_A, f convex (reversed for concave)", Assert, &[H::InBA, H::PsdCommuting], Single(POSITIVE), Grid::Funcs, true, forms::lemma4),
        checker!("mccarty_up", "<Tx,x>_A^r <= <T^r x,x>_A, r >= 1", Assert, &[H::InBA, H::PsdCommuting], Single(POSITIVE), Grid::R(&params::R_GRID), true, forms::mccarty_up),
        checker!("mccarty_down", "<T^r x,x>_A <= <Tx,x>_A^r, 0 <= r <= 1", Assert, &[H::InBA, H::PsdCommuting], Single(POSITIVE), Grid::R(&params::R_DOWN_GRID), true, forms::mccarty_down),
        checker!("mccarty_A_positive", "<Tx,x>_A^r <= <T(AT)^{r-1}x,x>_A, r >= 1", Assert, &[H::InBA, H::APositive], Single(POSITIVE), Grid::R(&params::R_GRID), true, forms::mccarty_a_positive),
        checker!("cor2_abs_bound", "|<Tx,x>_A| <= <|T|_A x,x>_A, T = T#", Assert, &[H::InBA, H::SharpSelfadjoint], Single(SHARP_SELFADJOINT), Grid::None, true, forms::cor2),
        checker!("multi_holder", "|<(sum T_i)x,u>_A| <= sum ||f(|T_i|_A)x||_A ||g(|T_i#|_A)u||_A <= Holder(p,q)", Assert, &[H::InBA, H::CommutesWithA], Tuple { tags: COMMUTING, sizes: MULTI_TUPLES }, Grid::FgPq, true, forms::multi_holder),
        checker!("norm_sum", "||sum T_i||_A <= (sum ||f(|T_i|_A)||_A^p)^{1/p} (sum ||g(|T_i#|_A)||_A^q)^{1/q}", Assert, &[H::InBA, H::CommutesWithA], Tuple { tags: COMMUTING, sizes: SMALL_TUPLES }, Grid::FgPq, false, forms::norm_sum),
        checker!("thm3_cartesian", "|<Tx,y>_A| <= sum_{P,Q} ||f(|P|_A)x||_A ||g(|P#|_A)y||_A", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::Fg, true, forms::thm3),
        checker!("cor3_cartesian_alpha", "|<Tx,y>_A| <= sum_{P,Q} <|P|_A^{2a}x,x>_A^{1/2} <|P#|_A^{2(1-a)}y,y>_A^{1/2}", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::Alpha, true, forms::cor3),
        checker!("cor4_cartesian_half_sum", "|<Tx,y>_A| <= 1/2 <(|P|^{2a}+|Q|^{2a})x,x>_A + 1/2 <(|P#|^{2(1-a)}+|Q#|^{2(1-a)})y,y>_A", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::Alpha, true, forms::cor4),
        checker!("thm4_wr", "w_A^r(T) <= 1/2 || |T|_A^{2ra} + |T#|_A^{2r(1-a)} ||_A", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::AlphaR, false, radius::thm4),
        checker!("thm5_w2r", "w_A^{2r}(T) <= || a|T|_A^{2r} + (1-a)|T#|_A^{2r} ||_A", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::AlphaR, false, radius::thm5),
        checker!("thm6_fg_holder", "w_A(T) <= ||f^p(|P|)+f^p(|Q|)||^{1/p} ||g^q(|P#|)+g^q(|Q#|)||^{1/q} <= ||[..]/p + [..]/q||", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::FgPq, false, radius::thm6),
        checker!("thm7_sum", "w_A^p(sum T_i) <= 1/(2n^{p-1}) || sum |T_i|_A^{2pa} + |T_i#|_A^{2p(1-a)} ||_A", Assert, &[H::InBA, H::CommutesWithA], Tuple { tags: COMMUTING, sizes: SMALL_TUPLES }, Grid::AlphaP(&params::R_GRID), false, radius::thm7),
        checker!("thm8_ctdesf", "w_A(CTD+ESF) <= 1/2 || D#|T|^{2a}D + C|T#|^{2(1-a)}C# + F#|S|^{2a}F + E|S#|^{2(1-a)}E# ||_A", Assert, &[H::InBA, H::OuterCommute], SixOperator, Grid::AlphaVariants(&THM8_VARIANTS), false, radius::thm8),
        checker!("eq41_tuple_bounds", "1/(2 sqrt n) ||sum T T#||_A^{1/2} <= w_e,A <= ||sum T T#||_A^{1/2}", Assert, &[H::InBA, H::Nonempty], Tuple { tags: GENERAL, sizes: SMALL_TUPLES }, Grid::None, false, tuples::eq41),
        checker!("eq42_sixteenth", "1/16 ||T#T + TT#||_A <= w_A^2 <= 1/2 ||T#T + TT#||_A", Assert, &[H::InBA], single_general, Grid::None, false, radius::eq42),
        checker!("eq43_quarter", "1/4 ||T#T + TT#||_A <= w_A^2 <= 1/2 ||T#T + TT#||_A", Assert, &[H::InBA], single_general, Grid::None, false, radius::eq43),
        checker!("eq44_pm_forms", "1/2 ||B^2+C^2||_A <= w_A^2 <= ||B^2+C^2||_A; 1/4 ||(B+C)^2+(B-C)^2||_A <= w_A^2 <= 1/2 ||..||_A", Assert, &[H::InBA], single_general, Grid::None, false, radius::eq44),
        checker!("thm9_cartesian_r", "w_A^r(T) <= 1/2 || |B|^{2ra} + |B#|^{2r(1-a)} + |C|^{2ra} + |C#|^{2r(1-a)} ||_A", Assert, &[H::InBA, H::CommutesWithA], single_commuting, Grid::AlphaR, false, radius::thm9),
        checker!("chain_468", "w_inf,A <= w_p,A <= w_R,A <= n^{1-1/p} w_p,A", Assert, &[H::InBA, H::Nonempty], Tuple { tags: GENERAL, sizes: CHAIN_TUPLES }, Grid::P(&CHAIN_P), false, tuples::chain_468),
        checker!("power_mean_49", "w_p,A <= n^{1/p-1/q} w_q,A, q >= p >= 1", Assert, &[H::InBA, H::Nonempty], Tuple { tags: GENERAL, sizes: CHAIN_TUPLES }, Grid::PQ(&POWER_MEAN_PQ), false, tuples::power_mean_49),
        checker!("superquad_refine", "w_R,A^p <= n^{p-1} w_p,A^p - n^{p-1} inf sum ||<T_k x,x>_A| - w_R,A/n|^p", Explore, &[H::InBA, H::Nonempty], Tuple { tags: GENERAL, sizes: CHAIN_TUPLES }, Grid::P(&SUPERQUAD_P), false, tuples::superquad_refine),
        checker!("thm10_tuple", "1/(2^{p+1} n^{p-1}) ||sum X_k||_A^p <= sup sum |<T_k x,x>_A|^{2p} <= 2^{-p} ||sum X_k^p||_A, X = T#T + TT#", Assert, &[H::InBA, H::Nonempty], Tuple { tags: GENERAL, sizes: SMALL_TUPLES }, Grid::P(&SYM_P), false, tuples::thm10),
        checker!("cor_412", "2^{-2p} ||X_T + X_S||_A^p <= sup |<Tx,x>_A|^{2p} + |<Sx,x>_A|^{2p} <= 2^{-p} ||X_T^p + X_S^p||_A", Assert, &[H::InBA, H::Pair], Tuple { tags: GENERAL, sizes: PAIR }, Grid::P(&SYM_P), false, tuples::cor_412),
        checker!("rhombic_chain", "c ||sum X||_A^q <= w_2q^{2q}; w_2q^q <= w_R^q <= n^{q-1/2} w_2q^q; n^{q-1/2} w_2q^{2q} <= n^{q-1/2} 2^{-q} ||sum X^q||_A", Assert, &[H::InBA, H::Nonempty], Tuple { tags: GENERAL, sizes: SMALL_TUPLES }, Grid::Q(&SYM_P), false, tuples::rhombic_chain),
        checker!("fund_r_w_norm", "r_A(T) <= w_A(T) <= ||T||_A", Assert, &[H::InBA], single_general, Grid::None, false, radius::fund_r_w_norm),
        checker!("fund_half_norm", "1/2 ||T||_A <= w_A(T) <= ||T||_A", Assert, &[H::InBA], HalfNormProbe, Grid::None, false, radius::fund_half_norm),
    ]
}

pub fn checker_by_id(id: &str) -> Option<InequalityChecker> {
    registry().into_iter().find(|c| c.id == id)
}

/// Outcome of one (checker, params) pair on an already-built workspace.
pub fn evaluate(
    checker: &InequalityChecker,
    ws: &Workspace,
    params: &Params,
    budget: SearchBudget,
    slack_tol: f64,
) -> CheckRecord {
    let mut pv = params.to_map();
    if checker.template.is_tuple() {
        pv.insert("n".into(), json!(ws.ops().len()));
    }
    if checker.searched {
        pv.insert("search_budget".into(), json!(budget));
    }
    let seed = ws.seed();
    match (checker.eval)(ws, params, budget) {
        Ok(Evaluation::Skip(reason)) => {
            pv.insert("skip_reason".into(), json!(reason));
            CheckRecord::unevaluated(checker.id, seed, pv, Verdict::HypothesisSkipped)
        }
        Ok(Evaluation::Links { links, notes }) => {
            let worst = links
                .iter()
                .min_by(|a, b| a.relative_slack().total_cmp(&b.relative_slack()))
                .expect("at least one link");
            pv.insert("link".into(), json!(worst.label));
            if links.len() > 1 {
                let all: Vec<Value> = links
                    .iter()
                    .map(|l| json!({"label": l.label, "lhs": l.lhs, "rhs": l.rhs, "relative_slack": l.relative_slack()}))
                    .collect();
                pv.insert("links".into(), Value::Array(all));
            }
            pv.extend(notes);
            let mut rec = CheckRecord::evaluated(checker.id, seed, pv, worst.lhs, worst.rhs, slack_tol, None);
            if rec.verdict == Verdict::Violated && !worst.witness.is_empty() {
                rec.witness = Some(worst.witness.iter().map(VectorValue::from).collect());
            }
            rec
        }
        Err(e) => {
            pv.insert("error".into(), json!(e.name()));
            CheckRecord::unevaluated(checker.id, seed, pv, Verdict::Degenerate)
        }
    }
}

/// All checks of one checker on an instance: hypotheses first, then the grid.
pub fn check_instance(
    checker: &InequalityChecker,
    ws: &Workspace,
    grid: &[Params],
    budget: SearchBudget,
    slack_tol: f64,
) -> Vec<CheckRecord> {
    let seed = ws.seed();
    if ws.ctx().rank() == 0 {
        return grid.iter().map(|p| CheckRecord::unevaluated(checker.id, seed, p.to_map(), Verdict::Degenerate)).collect();
    }
    match checker.failed_hypothesis(ws.instance()) {
        Ok(None) => grid.iter().map(|p| evaluate(checker, ws, p, budget, slack_tol)).collect(),
        Ok(Some(h)) => grid
            .iter()
            .map(|p| {
                let mut pv = p.to_map();
                pv.insert("failed_hypothesis".into(), json!(h));
                CheckRecord::unevaluated(checker.id, seed, pv, Verdict::HypothesisSkipped)
            })
            .collect(),
        Err(e) => grid
            .iter()
            .map(|p| {
                let mut pv = p.to_map();
                pv.insert("error".into(), json!(e.name()));
                CheckRecord::unevaluated(checker.id, seed, pv, Verdict::Degenerate)
            })
            .collect(),
    }
}

/// One check with the default budget and tolerance.
pub fn run_check(checker: &InequalityChecker, instance: &OperatorInstance, params: &Params) -> CheckRecord {
    let ws = Workspace::new(instance);
    let tol = instance.ctx.tol().slack_tol;
    check_instance(checker, &ws, std::slice::from_ref(params), SearchBudget::default(), tol).remove(0)
}

pub fn assert_checker_ids() -> Vec<String> {
    registry().into_iter().filter(|c| c.severity == Severity::Assert).map(|c| c.id.to_string()).collect()
}

pub fn all_checker_ids() -> Vec<String> {
    registry().into_iter().map(|c| c.id.to_string()).collect()
}

pub(crate) fn unknown_checker(id: &str) -> LabError {
    LabError::InvalidInput(format!("unknown checker id: {id}"))
}
