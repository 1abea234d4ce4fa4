use std::f64::consts::{FRAC_PI_4, PI};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polyzeta::bk_model::{PolymerScale, SelfAdjointDomain};
use polyzeta::exec::Exec;
use polyzeta::riemann::{find_zeros_with, ZRoute};
use polyzeta::verify_numeric::{shoot_spectrum_with, ModelSpec};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn zero_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_zeros");
    group.sample_size(10);
    for t_max in [100.0, 400.0] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, t_max), &t_max, |b, &t| {
                b.iter(|| find_zeros_with(black_box(t), ZRoute::Auto, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn shooting(c: &mut Criterion) {
    let scale = PolymerScale::unit(0.05).unwrap();
    let domain = SelfAdjointDomain::new(2.0 * (FRAC_PI_4 - 0.3) / 0.05, PI, &scale).unwrap();
    let model = ModelSpec::bk(scale, &domain).unwrap().with_steps(5_000);
    let mut group = c.benchmark_group("shoot_spectrum");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| shoot_spectrum_with(black_box(&model), 10, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, zero_scan, shooting);
criterion_main!(benches);
