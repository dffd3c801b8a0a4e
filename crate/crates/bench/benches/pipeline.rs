use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tcm_core::character::{self, LambdaAlgebra};
use tcm_core::fgl::Fgl;
use tcm_core::groups::{self, corpus};
use tcm_core::weierstrass::weierstrass_prepare;
use tcm_core::{RingCtx, RingSpec};

fn ring(c: &mut Criterion) {
    let r = RingCtx::new(RingSpec::e_flavor(2, 2, 8, 16)).unwrap();
    let u = r.var(1);
    let a = r.one().add(&u).add(&u.pow(5).scale(3));
    let b = u.scale(5).add(&u.pow(3)).add(&r.from_int(7));
    c.bench_function("ring/mul E a=8 d=16", |bn| bn.iter(|| black_box(&a).mul(black_box(&b))));

    let lt = RingCtx::new(RingSpec::lt_flavor(2, 2, 8, 1, 16, 4)).unwrap();
    let x = lt.one().add(&lt.var(1));
    c.bench_function("ring/inverse Lt a=8 d=16 e=4", |bn| bn.iter(|| black_box(&x).is_unit_with_inverse()));
}

fn fgl(c: &mut Criterion) {
    c.bench_function("fgl/construct p=2 n=2 a=8 d=16 df=12", |b| b.iter(|| Fgl::new(2, 2, 8, 16, 12).unwrap()));
    let f = Fgl::new(2, 2, 8, 16, 12).unwrap();
    c.bench_function("fgl/axioms df=12", |b| b.iter(|| f.axiom_check().unwrap()));
    let s = f.p_power_series(1, 12).unwrap();
    c.bench_function("weierstrass/prepare [2](x)", |b| b.iter(|| weierstrass_prepare(black_box(&s)).unwrap()));
}

fn character_map(c: &mut Criterion) {
    let f = Arc::new(Fgl::new(2, 2, 4, 12, 12).unwrap());
    let lt = RingCtx::new(RingSpec::lt_flavor(2, 2, 4, 1, 12, 12)).unwrap();
    let mut g = c.benchmark_group("flagship");
    g.sample_size(10);
    g.bench_function("lambda algebra", |b| b.iter(|| LambdaAlgebra::new(f.clone(), &lt, 1, 1).unwrap()));
    let a = LambdaAlgebra::new(f.clone(), &lt, 1, 1).unwrap();
    g.bench_function("character matrix Z/2", |b| b.iter(|| character::character_map_cyclic(1, &a).unwrap()));
    let m = character::character_map_cyclic(1, &a).unwrap();
    g.bench_function("iso certificate Z/2", |b| b.iter(|| character::iso_certificate(&m, &a, 4).unwrap()));
    g.finish();
}

fn finite_groups(c: &mut Criterion) {
    let d4 = corpus::dihedral4();
    c.bench_function("groups/tuple classes D4 p=2 r=2", |b| b.iter(|| groups::tuple_classes(&d4, 2, 2)));
}

criterion_group!(benches, ring, fgl, character_map, finite_groups);
criterion_main!(benches);
