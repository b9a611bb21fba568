use std::hint::black_box;

use addrccz::address::build_rs_addressable;
use addrccz::concat::mfe_degree3;
use addrccz::gates::PhasePoly;
use addrccz::verify::{verify_exhaustive, verify_sampled, CodeSpace, LogicalSpec};
use addrccz::{Elem, FieldCtx};
use criterion::{criterion_group, criterion_main, Criterion};

fn field_mul(c: &mut Criterion) {
    for t in [4, 8, 16] {
        let f = FieldCtx::new(t).unwrap();
        let xs: Vec<Elem> = (0..1024u32).map(|i| Elem(i.wrapping_mul(2654435761) & (f.q() - 1))).collect();
        c.bench_function(&format!("mul_1024_gf2^{t}"), |b| {
            b.iter(|| xs.windows(2).fold(Elem::ZERO, |acc, w| acc + f.mul(w[0], w[1])))
        });
        c.bench_function(&format!("trace_1024_gf2^{t}"), |b| b.iter(|| xs.iter().map(|&x| f.trace(x)).sum::<u8>()));
    }
}

fn construction(c: &mut Criterion) {
    c.bench_function("build_rs_n8_m3_k2", |b| b.iter(|| build_rs_addressable(black_box(8), 3, 2).unwrap()));
    c.bench_function("build_rs_n16_m6_k6", |b| b.iter(|| build_rs_addressable(black_box(16), 6, 6).unwrap()));
    let f = FieldCtx::new(4).unwrap();
    let basis = f.self_dual_basis();
    c.bench_function("mfe_identity_gf16_exhaustive", |b| {
        b.iter(|| mfe_degree3(&f, &basis).unwrap().check_exhaustive())
    });
}

fn verification(c: &mut Criterion) {
    let rs = build_rs_addressable(4, 2, 1).unwrap();
    let gamma = Elem(7);
    let intra = rs.intra_ccz_schedule(0, 0, 0, gamma).unwrap();
    let spec = LogicalSpec::on(PhasePoly::ccz(&rs.field, gamma), &[(0, 0), (0, 0), (0, 0)]).unwrap();
    let one: [&dyn CodeSpace; 1] = [&rs.code];
    c.bench_function("exhaustive_intra_n4", |b| b.iter(|| verify_exhaustive(&one, &intra, &spec, 1 << 26).unwrap()));

    let inter = rs.inter_ccz_schedule(0, 0, 0, gamma, [0, 1, 2]).unwrap();
    let spec = LogicalSpec::on(PhasePoly::ccz(&rs.field, gamma), &[(0, 0), (1, 0), (2, 0)]).unwrap();
    let three: [&dyn CodeSpace; 3] = [&rs.code, &rs.code, &rs.code];
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("exhaustive_inter_n4", |b| b.iter(|| verify_exhaustive(&three, &inter, &spec, 1 << 26).unwrap()));
    g.finish();

    let rs = build_rs_addressable(8, 3, 2).unwrap();
    let s = rs.inter_ccz_schedule(0, 1, 1, gamma, [0, 1, 2]).unwrap();
    let spec = LogicalSpec::on(PhasePoly::ccz(&rs.field, gamma), &[(0, 0), (1, 1), (2, 1)]).unwrap();
    let three: [&dyn CodeSpace; 3] = [&rs.code, &rs.code, &rs.code];
    c.bench_function("sampled_inter_n8_10k", |b| b.iter(|| verify_sampled(&three, &s, &spec, 10_000, 1).unwrap()));
}

criterion_group!(benches, field_mul, construction, verification);
criterion_main!(benches);
