use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nls_scatter::bracket::bracket_pi_closed_form;
use nls_scatter::divisor::divisor_sweep;
use nls_scatter::scattering::{a_coefficient, scattering_coefficients};
use nls_scatter::C64;
use nls_scatter_bench::{lambda_grid, potential};
use std::hint::black_box;

fn transfer(c: &mut Criterion) {
    let mut g = c.benchmark_group("a_coefficient");
    for n in [1024, 2048, 6144] {
        let p = potential("chirped_sech:A=0.5,c=1", n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| a_coefficient(p, black_box(C64::new(0.7, 0.0))).unwrap())
        });
    }
    g.finish();
}

fn coefficients(c: &mut Criterion) {
    let p = potential("sech:A=0.5", 2048);
    let l = lambda_grid(33);
    c.bench_function("scattering_coefficients/33", |b| {
        b.iter(|| scattering_coefficients(&p, black_box(&l)).unwrap())
    });
}

fn divisor(c: &mut Criterion) {
    let p = potential("chirped_sech:A=0.5,c=1", 2048);
    let l = lambda_grid(17);
    c.bench_function("divisor_sweep/17", |b| b.iter(|| divisor_sweep(&p, black_box(0.3), &l).unwrap()));
}

fn bracket(c: &mut Criterion) {
    let p = potential("sech:A=0.5", 2048);
    let (l, m) = (C64::new(0.5, 1.0), C64::new(1.0, 0.5));
    c.bench_function("bracket_pi_closed_form", |b| {
        b.iter(|| bracket_pi_closed_form(&p, black_box(0.0), l, m).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = transfer, coefficients, divisor, bracket
}
criterion_main!(benches);
