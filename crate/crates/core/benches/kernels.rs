use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spectacle::exec::{self, Mode};
use spectacle::lift::{lift_geometric_side, LiftConfig};
use spectacle::qseries::cohen_eisenstein;
use spectacle::quad::HTag;
use spectacle::theta11::{theta11_series, SplitLatticeU};
use spectacle::Rational;

fn modes() -> [(&'static str, Mode); 2] {
    [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)]
}

fn bench_theta11(c: &mut Criterion) {
    let mut g = c.benchmark_group("theta11_k3_n400");
    let (w_u, w_up) = (Rational::from_integer(0.into()), Rational::from_integer(1.into()));
    for (name, m) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_mode(m);
            b.iter(|| theta11_series(&SplitLatticeU::level1(), 3, &w_u, &w_up, 400))
        });
    }
    g.finish();
}

fn bench_lift(c: &mut Criterion) {
    let mut g = c.benchmark_group("lift_geometric_k3_n60");
    g.sample_size(10);
    let cfg = LiftConfig::new(3, HTag::Zero, 60).expect("config");
    for (name, m) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_mode(m);
            b.iter(|| lift_geometric_side(&cfg).expect("lift"))
        });
    }
    g.finish();
}

fn bench_cohen(c: &mut Criterion) {
    let mut g = c.benchmark_group("cohen_r4_n600");
    g.sample_size(10);
    for (name, m) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_mode(m);
            b.iter(|| cohen_eisenstein(4, 600).expect("cohen"))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_theta11, bench_lift, bench_cohen);
criterion_main!(benches);
