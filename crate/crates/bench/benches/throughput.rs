use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ocb_core::linksim::{block_rng, run_trials, transmit_block};
use ocb_core::modem::demap_stage1;
use ocb_core::rates::sweep;
use ocb_core::{mi_awgn_2d, Constellation, LinearCode, LinkConfig, NoiseModel, SweepSpec};

fn quadrature(c: &mut Criterion) {
    let points = Constellation::with_energy(2.0).unwrap().point_set();
    let unit = NoiseModel::new(1.0).unwrap();
    let mut group = c.benchmark_group("mi_awgn_2d");
    for order in [32, 64, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &order| {
            b.iter(|| mi_awgn_2d(black_box(&points), &unit, order).unwrap())
        });
    }
    group.finish();
}

fn rate_sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        count: 12,
        ..SweepSpec::default()
    };
    c.bench_function("sweep_12_points", |b| {
        b.iter(|| sweep(black_box(&spec)).unwrap())
    });
}

fn link(c: &mut Criterion) {
    let cfg = LinkConfig::at_snr(LinearCode::hamming74(), LinearCode::hamming74(), 2.0)
        .unwrap()
        .with_trials(2000);
    c.bench_function("run_trials_hamming74_2000_blocks", |b| {
        b.iter(|| run_trials(black_box(&cfg)).unwrap())
    });
}

fn ldpc_decode(c: &mut Criterion) {
    let code = LinearCode::ldpc_regular(1024, 1).unwrap();
    let cfg = LinkConfig::at_snr(code.clone(), code.clone(), 4.0).unwrap();
    let block = transmit_block(&cfg, &mut block_rng(7, 0)).unwrap();
    let cons = Constellation::new(cfg.alpha).unwrap();
    let noise = NoiseModel::new(cfg.sigma2).unwrap();
    let llr: Vec<f64> = block
        .rx
        .iter()
        .map(|y| demap_stage1(y, &cons, &noise))
        .collect();
    c.bench_function("ldpc_1024_bp_decode", |b| {
        b.iter(|| code.decode(black_box(&llr)).unwrap())
    });
}

criterion_group!(benches, quadrature, rate_sweep, link, ldpc_decode);
criterion_main!(benches);
