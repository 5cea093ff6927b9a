//! Seeded structured instances. Hypotheses are satisfied by construction in the
//! eigenbasis of A and then re-verified with the predicates.

pub mod random;

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::core_linalg::{c, psd_power, ComplexMatrix, MatrixFile, TolerancePolicy, C64};
use crate::error::{LabError, Result};
use crate::semi_hilbert::{ContextFile, SemiHilbertContext};
use random::{derive_seed, ginibre, haar_unitary, random_hermitian, random_normal, random_psd, rng_from, LabRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "commutes_with_A")]
    CommutesWithA,
    #[serde(rename = "a_selfadjoint")]
    ASelfadjoint,
    #[serde(rename = "a_positive")]
    APositive,
    #[serde(rename = "sharp_a_selfadjoint")]
    SharpASelfadjoint,
    #[serde(rename = "a_normal")]
    ANormal,
    #[serde(rename = "nilpotent_AT2")]
    NilpotentAT2,
    #[serde(rename = "general_in_BA")]
    GeneralInBA,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::CommutesWithA => "commutes_with_A",
            Tag::ASelfadjoint => "a_selfadjoint",
            Tag::APositive => "a_positive",
            Tag::SharpASelfadjoint => "sharp_a_selfadjoint",
            Tag::ANormal => "a_normal",
            Tag::NilpotentAT2 => "nilpotent_AT2",
            Tag::GeneralInBA => "general_in_BA",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dim: usize,
    #[serde(rename = "rank_A")]
    pub rank_a: usize,
    pub structure: BTreeSet<Tag>,
    pub tuple_size: usize,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(dim: usize, rank_a: usize, tags: &[Tag], tuple_size: usize, seed: u64) -> Self {
        InstanceSpec { dim, rank_a, structure: tags.iter().copied().collect(), tuple_size, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.rank_a == 0 || self.rank_a > self.dim {
            return Err(LabError::InvalidInput(format!(
                "need 1 <= rank_A <= dim, got rank_A={} dim={}",
                self.rank_a, self.dim
            )));
        }
        if self.tuple_size == 0 {
            return Err(LabError::InvalidInput("tuple_size must be at least 1".into()));
        }
        let tags = &self.structure;
        if tags.contains(&Tag::NilpotentAT2) && tags.iter().any(|t| !matches!(t, Tag::NilpotentAT2 | Tag::GeneralInBA)) {
            return Err(LabError::InconsistentTags(
                "nilpotent_AT2 only combines with general_in_BA (A-selfadjoint, A-normal or commuting nilpotents are trivial)".into(),
            ));
        }
        if tags.contains(&Tag::NilpotentAT2) && self.rank_a < 2 {
            return Err(LabError::InconsistentTags("nilpotent_AT2 needs rank_A >= 2; on a rank-one support ‖T‖_A = 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OperatorInstance {
    pub ctx: SemiHilbertContext,
    pub operators: Vec<ComplexMatrix>,
    pub tags: BTreeSet<Tag>,
    pub seed: u64,
}

/// Replayable dump of an instance in the repository matrix format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceDump {
    pub context: ContextFile,
    pub operators: Vec<MatrixFile>,
    pub tags: BTreeSet<Tag>,
    pub seed: u64,
}

impl OperatorInstance {
    pub fn dump(&self) -> InstanceDump {
        InstanceDump {
            context: self.ctx.to_file(),
            operators: self.operators.iter().map(MatrixFile::from).collect(),
            tags: self.tags.clone(),
            seed: self.seed,
        }
    }

    pub fn from_dump(d: &InstanceDump) -> Result<Self> {
        let ctx = SemiHilbertContext::from_file(&d.context)?;
        let operators = d.operators.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>>>()?;
        Ok(OperatorInstance { ctx, operators, tags: d.tags.clone(), seed: d.seed })
    }
}

/// Indices of A's eigenvalues grouped by (near) equality; the kernel separately.
pub fn eigen_groups(ctx: &SemiHilbertContext) -> (Vec<Vec<usize>>, Vec<usize>) {
    let (_, lam) = ctx.eigen();
    let scale = lam.iter().fold(0.0f64, |m, &l| m.max(l));
    let kernel: Vec<usize> = (0..lam.len()).filter(|&k| lam[k] == 0.0).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in (0..lam.len()).filter(|&k| lam[k] > 0.0) {
        match groups.iter_mut().find(|g| (lam[g[0]] - lam[k]).abs() <= 1e-12 * scale) {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }
    (groups, kernel)
}

pub fn gen_context(spec: &InstanceSpec) -> Result<SemiHilbertContext> {
    gen_context_with(spec, TolerancePolicy::default())
}

pub fn gen_context_with(spec: &InstanceSpec, tol: TolerancePolicy) -> Result<SemiHilbertContext> {
    spec.validate()?;
    let mut rng = rng_from(derive_seed(spec.seed, 0));
    let n = spec.dim;
    let u = ComplexMatrix::from_na(haar_unitary(&mut rng, n))?;
    let (lo, hi) = (1e-2f64.ln(), 1e2f64.ln());
    let mut lam: Vec<f64> = (0..n)
        .map(|k| if k < spec.rank_a { rng.random_range(lo..hi).exp() } else { 0.0 })
        .collect();
    // repeated eigenvalues make room for non-normal commuting operators
    if spec.rank_a >= 2 && rng.random_bool(0.5) {
        lam[1] = lam[0];
        if spec.rank_a >= 4 && rng.random_bool(0.5) {
            lam[3] = lam[2];
        }
    }
    SemiHilbertContext::from_spectrum(&u, &lam, tol)
}

/// U B U* for a matrix B given in the eigenbasis of A.
fn from_eigenbasis(ctx: &SemiHilbertContext, b: &DMatrix<C64>) -> ComplexMatrix {
    let u = ctx.eigen().0.as_na();
    ComplexMatrix::from_na(u * b * u.adjoint()).expect("finite construction")
}

fn put_block(b: &mut DMatrix<C64>, rows: &[usize], cols: &[usize], blk: &DMatrix<C64>) {
    for (a, &i) in rows.iter().enumerate() {
        for (bb, &j) in cols.iter().enumerate() {
            b[(i, j)] = blk[(a, bb)];
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum BlockKind {
    Dense,
    Hermitian,
    Psd,
    Normal,
    Zero,
}

fn block(rng: &mut LabRng, kind: BlockKind, k: usize) -> DMatrix<C64> {
    match kind {
        BlockKind::Dense => ginibre(rng, k, k),
        BlockKind::Hermitian => random_hermitian(rng, k),
        BlockKind::Psd => random_psd(rng, k),
        BlockKind::Normal => random_normal(rng, k),
        BlockKind::Zero => DMatrix::zeros(k, k),
    }
}

/// T = U B U* with B block-diagonal over the eigenspaces of A (kernel included).
pub fn gen_commuting(ctx: &SemiHilbertContext, rng: &mut LabRng) -> ComplexMatrix {
    commuting_with(ctx, rng, BlockKind::Dense, BlockKind::Dense)
}

fn commuting_with(ctx: &SemiHilbertContext, rng: &mut LabRng, support: BlockKind, kernel: BlockKind) -> ComplexMatrix {
    let n = ctx.dim();
    let (groups, ker) = eigen_groups(ctx);
    let mut b = DMatrix::zeros(n, n);
    for g in &groups {
        let blk = block(rng, support, g.len());
        put_block(&mut b, g, g, &blk);
    }
    if !ker.is_empty() {
        let blk = block(rng, kernel, ker.len());
        put_block(&mut b, &ker, &ker, &blk);
    }
    from_eigenbasis(ctx, &b)
}

fn support_and_kernel(ctx: &SemiHilbertContext) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let (_, lam) = ctx.eigen();
    let s: Vec<usize> = (0..lam.len()).filter(|&k| lam[k] > 0.0).collect();
    let kk: Vec<usize> = (0..lam.len()).filter(|&k| lam[k] == 0.0).collect();
    let ls = s.iter().map(|&k| lam[k]).collect();
    (s, kk, ls)
}

/// diag(d)·B·diag(e) on a block
fn scale_rows_cols(m: &mut DMatrix<C64>, rows: &[f64], cols: &[f64]) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            m[(i, j)] *= rows[i] * cols[j];
        }
    }
}

fn build_operator(ctx: &SemiHilbertContext, tags: &BTreeSet<Tag>, rng: &mut LabRng) -> ComplexMatrix {
    let has = |t: Tag| tags.contains(&t);
    let commuting = has(Tag::CommutesWithA) || has(Tag::APositive);
    if commuting {
        let support = if has(Tag::APositive) {
            BlockKind::Psd
        } else if has(Tag::ASelfadjoint) || has(Tag::SharpASelfadjoint) {
            BlockKind::Hermitian
        } else if has(Tag::ANormal) {
            BlockKind::Normal
        } else {
            BlockKind::Dense
        };
        let kernel = if has(Tag::SharpASelfadjoint) {
            BlockKind::Zero
        } else if has(Tag::APositive) {
            BlockKind::Psd
        } else {
            BlockKind::Dense
        };
        return commuting_with(ctx, rng, support, kernel);
    }

    let n = ctx.dim();
    let (s, k, ls) = support_and_kernel(ctx);
    let r = s.len();
    let ones_s = vec![1.0; r];
    let mut b = DMatrix::zeros(n, n);
    if has(Tag::SharpASelfadjoint) || has(Tag::ASelfadjoint) {
        // support block Λ⁻¹H; A-selfadjointness forbids the support-from-kernel block
        let mut h = random_hermitian(rng, r);
        let inv: Vec<f64> = ls.iter().map(|l| 1.0 / l).collect();
        scale_rows_cols(&mut h, &inv, &ones_s);
        put_block(&mut b, &s, &s, &h);
        if !has(Tag::SharpASelfadjoint) && !k.is_empty() {
            if !has(Tag::ANormal) {
                put_block(&mut b, &k, &s, &ginibre(rng, k.len(), r));
            }
            put_block(&mut b, &k, &k, &ginibre(rng, k.len(), k.len()));
        }
    } else if has(Tag::ANormal) {
        // Λ^{-1/2} N Λ^{1/2}: the compression is the normal N
        let mut nm = random_normal(rng, r);
        let rs: Vec<f64> = ls.iter().map(|l| 1.0 / l.sqrt()).collect();
        let cs: Vec<f64> = ls.iter().map(|l| l.sqrt()).collect();
        scale_rows_cols(&mut nm, &rs, &cs);
        put_block(&mut b, &s, &s, &nm);
        if !k.is_empty() {
            put_block(&mut b, &k, &k, &ginibre(rng, k.len(), k.len()));
        }
    } else if has(Tag::NilpotentAT2) {
        // support split S1 ⊕ S2 with only S2 → S1 nonzero, plus anything landing in the kernel
        if r >= 2 {
            let cut = rng.random_range(1..r);
            let (s1, s2) = s.split_at(cut);
            put_block(&mut b, s1, s2, &ginibre(rng, s1.len(), s2.len()));
        }
        if !k.is_empty() {
            put_block(&mut b, &k, &s, &ginibre(rng, k.len(), r));
            put_block(&mut b, &k, &k, &ginibre(rng, k.len(), k.len()));
        }
    } else {
        // general member of B_A: everything except the kernel → support block
        put_block(&mut b, &s, &s, &ginibre(rng, r, r));
        if !k.is_empty() {
            put_block(&mut b, &k, &s, &ginibre(rng, k.len(), r));
            put_block(&mut b, &k, &k, &ginibre(rng, k.len(), k.len()));
        }
    }
    from_eigenbasis(ctx, &b)
}

/// Re-checks every claimed tag; a failure is an error, never a silent re-tag.
pub fn verify_tags(ctx: &SemiHilbertContext, t: &ComplexMatrix, tags: &BTreeSet<Tag>) -> Result<()> {
    let p = ctx.predicates(t)?;
    if !p.in_ba {
        return Err(LabError::ConstructionFailed("operator is not in B_A".into()));
    }
    for &tag in tags {
        let ok = match tag {
            Tag::CommutesWithA => p.commutes_with_a,
            Tag::ASelfadjoint => p.a_selfadjoint,
            Tag::APositive => p.a_positive,
            Tag::SharpASelfadjoint => p.sharp_a_selfadjoint,
            Tag::ANormal => p.a_normal,
            Tag::NilpotentAT2 => {
                let at2 = &(ctx.a() * t) * t;
                at2.fro_norm() <= ctx.structural_tol() * (1.0 + ctx.a().fro_norm() * t.fro_norm().powi(2))
            }
            Tag::GeneralInBA => p.in_ba,
        };
        if !ok {
            return Err(LabError::ConstructionFailed(format!("tag {} failed verification", tag.name())));
        }
    }
    Ok(())
}

fn realized_tags(spec: &InstanceSpec) -> BTreeSet<Tag> {
    let mut tags = spec.structure.clone();
    if tags.contains(&Tag::APositive) {
        tags.insert(Tag::CommutesWithA);
        tags.insert(Tag::ASelfadjoint);
    }
    if tags.contains(&Tag::SharpASelfadjoint) {
        tags.insert(Tag::ASelfadjoint);
    }
    tags
}

pub fn gen_tagged(spec: &InstanceSpec, ctx: &SemiHilbertContext) -> Result<OperatorInstance> {
    let one = InstanceSpec { tuple_size: 1, ..spec.clone() };
    gen_tuple(&one, ctx)
}

pub fn gen_tuple(spec: &InstanceSpec, ctx: &SemiHilbertContext) -> Result<OperatorInstance> {
    spec.validate()?;
    if ctx.dim() != spec.dim {
        return Err(LabError::DimensionMismatch { expected: (spec.dim, spec.dim), found: (ctx.dim(), ctx.dim()) });
    }
    let tags = realized_tags(spec);
    let mut operators = Vec::with_capacity(spec.tuple_size);
    for k in 0..spec.tuple_size {
        let mut rng = rng_from(derive_seed(spec.seed, 1 + k as u64));
        let t = build_operator(ctx, &tags, &mut rng);
        verify_tags(ctx, &t, &tags)?;
        operators.push(t);
    }
    Ok(OperatorInstance { ctx: ctx.clone(), operators, tags, seed: spec.seed })
}

/// Context plus tuple in one call.
pub fn generate(spec: &InstanceSpec) -> Result<OperatorInstance> {
    let ctx = gen_context(spec)?;
    gen_tuple(spec, &ctx)
}

/// Operators T, S (A-positive) and R for the block matrix [[T, R^♯], [R, S]].
#[derive(Clone, Debug)]
pub struct BlockTriple {
    pub t: ComplexMatrix,
    pub s: ComplexMatrix,
    pub r: ComplexMatrix,
    /// ‖(AS)^{†½} A R (AT)^{†½}‖ after scaling; the block is A-positive iff this is ≤ 1.
    pub coupling: f64,
}

/// ‖(AS)^{†½} A R (AT)^{†½}‖
pub fn block_coupling(ctx: &SemiHilbertContext, t: &ComplexMatrix, s: &ComplexMatrix, r: &ComplexMatrix) -> Result<f64> {
    let tol = ctx.tol();
    let at = (ctx.a() * t).hermitian_part();
    let as_ = (ctx.a() * s).hermitian_part();
    let m = &(&psd_power(&as_, -0.5, tol)? * &(ctx.a() * r)) * &psd_power(&at, -0.5, tol)?;
    Ok(m.spectral_norm())
}

/// T, S A-positive; R a general member of B_A rescaled so that the coupling is drawn
/// from [0.2, 0.8] (block A-positive) or [1.25, 3] (not), each with probability ½.
pub fn gen_block_triple(ctx: &SemiHilbertContext, seed: u64) -> Result<BlockTriple> {
    if ctx.rank() == 0 {
        return Err(LabError::DegenerateContext);
    }
    let pos: BTreeSet<Tag> = [Tag::APositive].into_iter().collect();
    let gen: BTreeSet<Tag> = [Tag::GeneralInBA].into_iter().collect();
    let t = build_operator(ctx, &pos, &mut rng_from(derive_seed(seed, 1)));
    let s = build_operator(ctx, &pos, &mut rng_from(derive_seed(seed, 2)));
    let r0 = build_operator(ctx, &gen, &mut rng_from(derive_seed(seed, 3)));
    verify_tags(ctx, &t, &pos)?;
    verify_tags(ctx, &s, &pos)?;
    let mut rng = rng_from(derive_seed(seed, 4));
    let target = if rng.random_bool(0.5) { rng.random_range(0.2..0.8) } else { rng.random_range(1.25..3.0) };
    let rho0 = block_coupling(ctx, &t, &s, &r0)?;
    if rho0 < 1e-12 {
        return Err(LabError::ConstructionFailed("R is invisible to the A-block".into()));
    }
    let r = r0.scale_re(target / rho0);
    let coupling = block_coupling(ctx, &t, &s, &r)?;
    Ok(BlockTriple { t, s, r, coupling })
}

/// T, S A-positive and R with SR = RT and [[T, R^♯], [R, S]] A-positive:
/// per eigenspace of A, T = V diag(t) V*, S = W diag(t) W*, R = W diag(d) V*, |dᵢ| ≤ tᵢ.
pub fn gen_intertwined_triple(ctx: &SemiHilbertContext, seed: u64) -> Result<BlockTriple> {
    let n = ctx.dim();
    let mut rng = rng_from(derive_seed(seed, 5));
    let (groups, ker) = eigen_groups(ctx);
    let mut bt = DMatrix::zeros(n, n);
    let mut bs = DMatrix::zeros(n, n);
    let mut br = DMatrix::zeros(n, n);
    for g in groups.iter().chain(std::iter::once(&ker)).filter(|g| !g.is_empty()) {
        let k = g.len();
        let v = haar_unitary(&mut rng, k);
        let w = haar_unitary(&mut rng, k);
        let t: Vec<f64> = (0..k).map(|_| rng.random_range(0.1f64.ln()..10f64.ln()).exp()).collect();
        let d: Vec<C64> = t
            .iter()
            .map(|&ti| C64::from_polar(ti * rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let dt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(k, t.iter().map(|&x| c(x, 0.0))));
        let dd = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
        put_block(&mut bt, g, g, &(&v * &dt * v.adjoint()));
        put_block(&mut bs, g, g, &(&w * &dt * w.adjoint()));
        put_block(&mut br, g, g, &(&w * &dd * v.adjoint()));
    }
    let t = from_eigenbasis(ctx, &bt).hermitian_part();
    let s = from_eigenbasis(ctx, &bs).hermitian_part();
    let r = from_eigenbasis(ctx, &br);
    let coupling = if ctx.rank() > 0 { block_coupling(ctx, &t, &s, &r)? } else { 0.0 };
    Ok(BlockTriple { t, s, r, coupling })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dim: usize, rank: usize, tags: &[Tag], seed: u64) -> InstanceSpec {
        InstanceSpec::new(dim, rank, tags, 1, seed)
    }

    #[test]
    fn context_rank_and_determinism() {
        let s = spec(3, 3, &[], 11);
        let a = gen_context(&s).unwrap();
        assert_eq!(a.rank(), 3);
        let b = gen_context(&s).unwrap();
        assert_eq!(a.a(), b.a());
        let k = gen_context(&spec(3, 1, &[], 11)).unwrap();
        assert!((k.p_a().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distinct_eigenvalues_give_diagonal_commutant() {
        // find a seed with distinct eigenvalues
        for seed in 0..20 {
            let s = spec(3, 3, &[Tag::CommutesWithA], seed);
            let ctx = gen_context(&s).unwrap();
            let (groups, _) = eigen_groups(&ctx);
            if groups.len() == 3 {
                let t = &gen_tagged(&s, &ctx).unwrap().operators[0];
                let u = ctx.eigen().0;
                let b = &(u.adjoint() * t) * u;
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            assert!(b[(i, j)].norm() < 1e-12);
                        }
                    }
                }
                return;
            }
        }
        panic!("no seed with distinct eigenvalues");
    }

    #[test]
    fn every_tag_builds_and_verifies() {
        let sets: &[&[Tag]] = &[
            &[Tag::CommutesWithA],
            &[Tag::ASelfadjoint],
            &[Tag::ASelfadjoint, Tag::CommutesWithA],
            &[Tag::APositive],
            &[Tag::SharpASelfadjoint],
            &[Tag::SharpASelfadjoint, Tag::CommutesWithA],
            &[Tag::ANormal],
            &[Tag::ANormal, Tag::CommutesWithA],
            &[Tag::ASelfadjoint, Tag::ANormal],
            &[Tag::NilpotentAT2],
            &[Tag::GeneralInBA],
        ];
        for seed in 0..40u64 {
            for tags in sets {
                let dim = 2 + (seed as usize % 5);
                let mut rank = 1 + (seed as usize / 5) % dim;
                if tags.contains(&Tag::NilpotentAT2) {
                    rank = rank.max(2);
                }
                let s = spec(dim, rank, tags, seed);
                let inst = generate(&s).unwrap_or_else(|e| panic!("{tags:?} seed {seed}: {e}"));
                assert_eq!(inst.operators.len(), 1);
            }
        }
    }

    #[test]
    fn nilpotent_rejects_positive() {
        let s = spec(3, 2, &[Tag::NilpotentAT2, Tag::APositive], 1);
        assert!(matches!(generate(&s), Err(LabError::InconsistentTags(_))));        let s = spec(3, 1, &[Tag::NilpotentAT2], 1);
        assert!(matches!(generate(&s), Err(LabError::InconsistentTags(_))));
    }

    #[test]
    fn tuple_extends_tagged() {
        let s = InstanceSpec::new(4, 2, &[Tag::GeneralInBA], 3, 8);
        let ctx = gen_context(&s).unwrap();
        let tup = gen_tuple(&s, &ctx).unwrap();
        let one = gen_tagged(&s, &ctx).unwrap();
        assert_eq!(tup.operators.len(), 3);
        assert_eq!(tup.operators[0], one.operators[0]);
    }

    #[test]
    fn block_triples() {
        for seed in 0..20 {
            let ctx = gen_context(&spec(4, 1 + seed as usize % 4, &[], seed)).unwrap();
            let b = gen_block_triple(&ctx, seed).unwrap();
            assert!((0.2..=3.0 + 1e-9).contains(&b.coupling), "{}", b.coupling);
            let w = gen_intertwined_triple(&ctx, seed).unwrap();
            assert!(w.coupling <= 1.0 + 1e-9);
            let sr = &w.s * &w.r;
            let rt = &w.r * &w.t;
            assert!((&sr - &rt).fro_norm() <= 1e-10 * (1.0 + sr.fro_norm()));
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let s = InstanceSpec::new(4, 2, &[Tag::NilpotentAT2], 1, 99);
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"rank_A\":2") && j.contains("nilpotent_AT2"));
        let back: InstanceSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
