use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qshuffle::battery;
use qshuffle::par;
use qshuffle::quiver_cells::{enumerate_acceptable, PathOrder};
use qshuffle::root_data::Quiver;
use qshuffle::theta_ideals::{theta_intersected, Window};

fn pools(c: &mut Criterion, name: &str, work: impl Fn() + Sync + Send + Copy) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    g.bench_function("one_thread", |b| b.iter(|| par::with_threads(1, work)));
    g.bench_function("default_pool", |b| b.iter(|| par::with_threads(0, work)));
    g.finish();
}

fn theta(c: &mut Criterion) {
    let q = Quiver::one_vertex(5, 0);
    pools(c, "theta_intersected_m5_n3", || {
        black_box(theta_intersected(&q, &[3], Window::Auto).unwrap().corank());
    });
    let jordan = Quiver::one_vertex(2, 1);
    pools(c, "cells_jordan_m2_n6", || {
        black_box(enumerate_acceptable(&jordan, &[6], PathOrder::LengthLex).len());
    });
}

fn sl2_routes(c: &mut Criterion) {
    pools(c, "sl2_route_battery", || {
        black_box(battery::run_criterion(10, battery::DEFAULT_SEED).passed);
    });
}

criterion_group!(benches, theta, sl2_routes);
criterion_main!(benches);
