mod common;

use seminorm_lab::core_linalg::ComplexMatrix;
use seminorm_lab::generators::random::rng_from;
use seminorm_lab::generators::{
    eigen_groups, gen_commuting, gen_context, gen_tagged, gen_tuple, generate, InstanceSpec, OperatorInstance, Tag,
};

use common::shape;

fn bits(m: &ComplexMatrix) -> Vec<(u64, u64)> {
    m.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
}

fn fingerprint(inst: &OperatorInstance) -> Vec<Vec<(u64, u64)>> {
    std::iter::once(bits(inst.ctx.a())).chain(inst.operators.iter().map(bits)).collect()
}

const TAG_SETS: &[&[Tag]] = &[
    &[Tag::GeneralInBA],
    &[Tag::CommutesWithA],
    &[Tag::ASelfadjoint],
    &[Tag::APositive],
    &[Tag::SharpASelfadjoint],
    &[Tag::ANormal, Tag::CommutesWithA],
    &[Tag::NilpotentAT2],
];

fn spec_for(i: u64, tags: &[Tag], n: usize) -> InstanceSpec {
    let (seed, dim, mut rank) = shape(31, i);
    if tags.contains(&Tag::NilpotentAT2) {
        rank = rank.max(2);
    }
    InstanceSpec::new(dim, rank, tags, n, seed)
}

#[test]
fn identical_specs_give_bit_identical_instances_across_threads() {
    let specs: Vec<InstanceSpec> =
        (0..40).map(|i| spec_for(i, TAG_SETS[i as usize % TAG_SETS.len()], 1 + i as usize % 3)).collect();
    let here: Vec<_> = specs.iter().map(|s| fingerprint(&generate(s).unwrap())).collect();
    let there: Vec<_> = std::thread::scope(|sc| {
        let handles: Vec<_> =
            specs.chunks(7).map(|ch| sc.spawn(move || ch.iter().map(|s| fingerprint(&generate(s).unwrap())).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(here, there);
    let again: Vec<_> = specs.iter().map(|s| fingerprint(&generate(s).unwrap())).collect();
    assert_eq!(here, again);
}

#[test]
fn context_examples() {
    let full = gen_context(&InstanceSpec::new(4, 4, &[], 1, 9)).unwrap();
    assert_eq!(full.rank(), 4);
    assert!(full.a().as_na().clone().try_inverse().is_some());
    let thin = gen_context(&InstanceSpec::new(3, 1, &[], 1, 9)).unwrap();
    assert!((thin.p_a().trace().re - 1.0).abs() < 1e-12);
    let (_, lam) = thin.eigen();
    let top = lam.iter().cloned().fold(0.0, f64::max);
    assert!((1e-2..=1e2).contains(&top));
}

#[test]
fn coverage_of_singular_and_repeated_spectra() {
    let (mut singular, mut repeated) = (0, 0);
    for i in 0..1000 {
        let (seed, dim, rank) = shape(32, i);
        let ctx = gen_context(&InstanceSpec::new(dim, rank, &[], 1, seed)).unwrap();
        singular += (ctx.rank() < ctx.dim()) as usize;
        let (support, _) = eigen_groups(&ctx);
        repeated += support.iter().any(|g| g.len() >= 2) as usize;
    }
    assert!(singular >= 300, "singular {singular}/1000");
    assert!(repeated >= 200, "repeated {repeated}/1000");
}

#[test]
fn commuting_operators_commute_and_lie_in_ba() {
    for i in 0..100 {
        let (seed, dim, rank) = shape(33, i);
        let ctx = gen_context(&InstanceSpec::new(dim, rank, &[], 1, seed)).unwrap();
        let t = gen_commuting(&ctx, &mut rng_from(seed));
        let comm = &(ctx.a() * &t) - &(&t * ctx.a());
        assert!(comm.fro_norm() <= 1e-12 * (1.0 + ctx.a().fro_norm() * t.fro_norm()), "seed {seed}");
        assert!(ctx.douglas_member(&t).unwrap());
    }
}

#[test]
fn distinct_spectrum_forces_diagonal_commutant() {
    for seed in 0..200 {
        let ctx = gen_context(&InstanceSpec::new(4, 4, &[], 1, seed)).unwrap();
        let (groups, kernel) = eigen_groups(&ctx);
        if groups.iter().any(|g| g.len() > 1) || !kernel.is_empty() {
            continue;
        }
        let t = gen_commuting(&ctx, &mut rng_from(seed));
        let (v, _) = ctx.eigen();
        let b = &(v.adjoint() * &t) * v;
        let off: f64 = (0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j))).map(|ij| b[ij].norm()).sum();
        assert!(off < 1e-10 * (1.0 + t.fro_norm()));
        return;
    }
    panic!("no distinct-spectrum context in 200 seeds");
}

#[test]
fn tags_hold_over_a_hundred_seeds() {
    for tags in TAG_SETS {
        for i in 0..100 {
            let spec = spec_for(100 + i, tags, 2);
            let ctx = gen_context(&spec).unwrap();
            let inst = gen_tuple(&spec, &ctx).unwrap();
            assert_eq!(inst.operators.len(), 2);
            for t in &inst.operators {
                let p = ctx.predicates(t).unwrap();
                assert!(p.in_ba, "{tags:?} {i}");
                for tag in *tags {
                    let ok = match tag {
                        Tag::CommutesWithA => p.commutes_with_a,
                        Tag::ASelfadjoint => p.a_selfadjoint,
                        Tag::APositive => p.a_positive,
                        Tag::SharpASelfadjoint => {
                            let ts = ctx.a_adjoint(t).unwrap();
                            p.sharp_a_selfadjoint && (t - &ts).fro_norm() <= 1e-10 * (1.0 + t.fro_norm())
                        }
                        Tag::ANormal => p.a_normal,
                        Tag::NilpotentAT2 => (&(ctx.a() * t) * t).fro_norm() <= 1e-12 * (1.0 + ctx.a().fro_norm() * t.fro_norm().powi(2)),
                        Tag::GeneralInBA => true,
                    };
                    assert!(ok, "{tags:?} {i}: {tag:?}");
                }
            }
        }
    }
}

#[test]
fn single_member_tuple_is_the_tagged_instance() {
    let spec = spec_for(7, &[Tag::ASelfadjoint], 1);
    let ctx = gen_context(&spec).unwrap();
    assert_eq!(fingerprint(&gen_tuple(&spec, &ctx).unwrap()), fingerprint(&gen_tagged(&spec, &ctx).unwrap()));
}

#[test]
fn inconsistent_specs_are_rejected() {
    assert!(generate(&InstanceSpec::new(3, 2, &[Tag::NilpotentAT2, Tag::APositive], 1, 1)).is_err());
    assert!(generate(&InstanceSpec::new(3, 4, &[], 1, 1)).is_err());
    assert!(generate(&InstanceSpec::new(3, 0, &[], 1, 1)).is_err());
    assert!(generate(&InstanceSpec::new(3, 2, &[], 0, 1)).is_err());
}
