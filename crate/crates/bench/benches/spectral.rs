use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use noisebench::spectral::{dpss, Multitaper};
use noisebench::transforms::{Stft, StftConfig};
use noisebench::{geodesic_distance, MultitaperConfig, NoiseSpec, QuantileMap};
use noisebench_bench::{fixture, LEN};

fn spectral(c: &mut Criterion) {
    c.bench_function("spectral/dpss_4096_nw4_k7", |b| b.iter(|| dpss(black_box(LEN), 4.0, 7).unwrap()));

    let ds = fixture(&NoiseSpec::fgn(0.7).unwrap(), 16);
    let mt = Multitaper::new(MultitaperConfig::default(), LEN).unwrap();
    c.bench_function("spectral/multitaper_psd", |b| b.iter(|| mt.psd(black_box(ds.series(0))).unwrap()));
    c.bench_function("spectral/median_psd_16", |b| b.iter(|| mt.median_psd(black_box(&ds)).unwrap()));

    let p = mt.psd(ds.series(0)).unwrap();
    let q = mt.psd(ds.series(1)).unwrap();
    c.bench_function("spectral/geodesic_distance", |b| b.iter(|| geodesic_distance(black_box(&p), &q).unwrap()));

    let stft = Stft::new(StftConfig::new(128, 0.5)).unwrap();
    let spec = stft.forward(ds.series(0)).unwrap();
    c.bench_function("transform/stft_128", |b| b.iter(|| stft.forward(black_box(ds.series(0))).unwrap()));
    c.bench_function("transform/istft_128", |b| b.iter(|| stft.inverse(black_box(&spec)).unwrap()));

    let map = QuantileMap::fit_dataset(&ds, 1024).unwrap();
    c.bench_function("transform/quantile_apply", |b| b.iter(|| map.apply(0, black_box(ds.series(0)))));
}

criterion_group!(benches, spectral);
criterion_main!(benches);
