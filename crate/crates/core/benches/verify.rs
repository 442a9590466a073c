use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qonsager_core::loopsl2::{evaluation_unchecked, kacmoody_from_drinfeld, tensor, verify_drinfeld_relations, EvalParams};
use qonsager_core::onsager::{family_on, verify_luwang, OnsagerParams};
use qonsager_core::ranka::{build_vector_evaluation, generate_rankn_family, verify_grel, AffineTypeA, RankParams};
use qonsager_core::{Exec, Scalar};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn drinfeld(c: &mut Criterion) {
    let v = evaluation_unchecked(&EvalParams::new(3, Scalar::q()).unwrap(), 3, 8);
    let mut g = c.benchmark_group("drinfeld relations V_3(q)");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| black_box(verify_drinfeld_relations(&v, 3, e)))
        });
    }
    g.finish();
}

fn luwang(c: &mut Criterion) {
    let v = kacmoody_from_drinfeld(&evaluation_unchecked(&EvalParams::new(1, Scalar::q()).unwrap(), 2, 8)).unwrap();
    let w = kacmoody_from_drinfeld(&evaluation_unchecked(&EvalParams::new(1, Scalar::q_pow(3)).unwrap(), 2, 8)).unwrap();
    let m = tensor(&v, &w).unwrap();
    let p = OnsagerParams::new([Scalar::q_pow(2), Scalar::q_pow(-2)], [Scalar::one(), Scalar::q()]).unwrap();
    let f = family_on(&p, &m, 8).unwrap();
    let mut g = c.benchmark_group("lu-wang V_1 x V_1");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| black_box(verify_luwang(&f, 4, 3, e)))
        });
    }
    g.finish();
}

fn grel(c: &mut Criterion) {
    let ty = AffineTypeA::new(3).unwrap();
    let m = build_vector_evaluation(&ty, &Scalar::q_pow(2)).unwrap();
    let p = RankParams::new(&ty, vec![Scalar::one(); 4], vec![Scalar::zero(); 4]).unwrap();
    let f = generate_rankn_family(&m, &p, 6, Exec::Parallel).unwrap();
    let mut g = c.benchmark_group("grel N=3");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| black_box(verify_grel(&f, 2, 3, e)))
        });
    }
    g.finish();
}

criterion_group!(benches, drinfeld, luwang, grel);
criterion_main!(benches);
