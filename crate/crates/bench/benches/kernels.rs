use criterion::{black_box, criterion_group, criterion_main, Criterion};
use odduniv::analytic::{f4_candidates, F4Search};
use odduniv::escalation::TargetSet;
use odduniv::forms::{discriminant, find_representation, level, theta_series};
use odduniv::local::{eisenstein_coefficient, DensityTable};
use odduniv::verify::{check_interval, SweepConfig};
use odduniv::QuadraticForm;

fn form(s: &str) -> QuadraticForm {
    s.parse().unwrap()
}

fn theta(c: &mut Criterion) {
    let q = form("x^2+2y^2+5z^2+xz");
    c.bench_function("theta ternary 1e4", |b| b.iter(|| theta_series(black_box(&q), 10_000).unwrap()));
    let q = form("x^2+y^2+z^2+w^2");
    c.bench_function("theta four squares 2e3", |b| b.iter(|| theta_series(black_box(&q), 2_000).unwrap()));
}

fn enumeration(c: &mut Criterion) {
    let q = form("x^2+3y^2+3yz+3yw+5z^2+zw+34w^2");
    c.bench_function("find representation 10^6 odds", |b| {
        b.iter(|| (1_000_001..1_000_201).step_by(2).filter(|&n| find_representation(&q, n).is_some()).count())
    });
}

fn density(c: &mut Criterion) {
    let q = form("x^2+3y^2+3yz+3yw+5z^2+zw+34w^2");
    c.bench_function("density table cold", |b| {
        b.iter(|| {
            let t = DensityTable::new(&q);
            (1..200u64).map(|n| t.density(n, 2)).count()
        })
    });
    c.bench_function("eisenstein coefficient", |b| b.iter(|| eisenstein_coefficient(&q, black_box(9_999_991)).unwrap()));
}

fn f4(c: &mut Criterion) {
    c.bench_function("f4 candidates F=50", |b| b.iter(|| f4_candidates(50.0, 151, 151, 1_000_000)));
    let q = form("x^2+3y^2+3yz+3yw+5z^2+zw+34w^2");
    let s = F4Search::new(6535.0, level(&q), discriminant(&q));
    c.bench_function("f4 stream first 1e5", |b| {
        b.iter(|| {
            let mut k = 0u64;
            s.for_each_candidate(100_000, |_| k += 1);
            k
        })
    });
}

fn sweep(c: &mut Criterion) {
    let q = form("x^2+3y^2+3yz+3yw+5z^2+zw+34w^2");
    let cfg = SweepConfig::default();
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("interval 2e5", |b| b.iter(|| check_interval(&q, 1, 200_000, &TargetSet::OddPositive, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, theta, enumeration, density, f4, sweep);
criterion_main!(benches);
