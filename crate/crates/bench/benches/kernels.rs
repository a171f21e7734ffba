//! Hot kernels at desk scale: twisted convolution, the p-norm bracket,
//! the projective-norm simplex, semigroup closure, and the germ
//! groupoid construction.

use criterion::{criterion_group, criterion_main, Criterion};
use lpalg_core::algebra::{AlgElement, Carrier};
use lpalg_core::groupoid::{
    bisection_semigroup, canonical_action, singleton_bisections, transformation_groupoid,
    FiniteGroupoid,
};
use lpalg_core::opnorm::opnorm_bracket;
use lpalg_core::reps::regular_representation;
use lpalg_core::scalar::{Exponent, Rational, Scalar};
use lpalg_core::semigroup::{exel_semigroup, GroupTable};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn random_element(carrier: &std::sync::Arc<Carrier>, seed: u64) -> AlgElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Scalar> = (0..carrier.groupoid.arrows())
        .map(|_| {
            Scalar::from_rational(Rational::new(
                rng.gen_range(-5i64..=5).into(),
                rng.gen_range(1i64..=3).into(),
            ))
        })
        .collect();
    AlgElement::from_coeffs(carrier.clone(), coeffs).unwrap()
}

fn bench_convolution(c: &mut Criterion) {
    let carrier = Carrier::untwisted(FiniteGroupoid::pair(8));
    let f = random_element(&carrier, 1);
    let g = random_element(&carrier, 2);
    c.bench_function("convolve_pair8", |b| {
        b.iter(|| black_box(f.convolve(&g).unwrap()))
    });
}

fn bench_bracket(c: &mut Criterion) {
    let carrier = Carrier::untwisted(FiniteGroupoid::pair(5));
    let f = random_element(&carrier, 3);
    let m = regular_representation(&f);
    let p = Exponent::new(lpalg_core::scalar::rat(3, 1)).unwrap();
    c.bench_function("opnorm_bracket_25x25_p3", |b| {
        b.iter(|| black_box(opnorm_bracket(&m, &p).unwrap()))
    });
}

fn bench_projective(c: &mut Criterion) {
    let g = FiniteGroupoid::pair(3);
    let carrier = Carrier::untwisted(g.clone());
    let f = random_element(&carrier, 4);
    let singles = singleton_bisections(&g);
    c.bench_function("projective_norm_m3_singletons", |b| {
        b.iter(|| black_box(f.norm_projective(&singles).unwrap()))
    });
}

fn bench_exel(c: &mut Criterion) {
    let group = GroupTable::klein_four();
    c.bench_function("exel_semigroup_k4", |b| {
        b.iter(|| black_box(exel_semigroup(&group).unwrap()))
    });
}

fn bench_germ_groupoid(c: &mut Criterion) {
    let g = FiniteGroupoid::pair(4);
    let bs = bisection_semigroup(&g, &singleton_bisections(&g), 64).unwrap();
    let action = canonical_action(&g, &bs).unwrap();
    c.bench_function("transformation_groupoid_pair4", |b| {
        b.iter(|| black_box(transformation_groupoid(&action).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_convolution,
    bench_bracket,
    bench_projective,
    bench_exel,
    bench_germ_groupoid
);
criterion_main!(benches);
