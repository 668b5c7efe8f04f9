use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use graykeep::baselines::{decode_scheme, run_scheme, RunParams};
use graykeep::codec::rank_thresholds;
use graykeep::locmap::{compress, decompress, LocationMap};
use graykeep::payload::random_bits;
use graykeep::predict::{agsp_predict, med_predict, Context9};
use graykeep::{ColorImage, SchemeId, Thresholds};
use graykeep_bench::{synthetic, testdata_image};

const BITS: usize = 50_000;

fn cover() -> ColorImage {
    testdata_image("lena.png").unwrap_or_else(|| synthetic(512, 512, 1))
}

fn encode_decode(c: &mut Criterion) {
    let cover = cover();
    let secret = random_bits(BITS, 1);
    let mut g = c.benchmark_group("codec_512");
    g.sample_size(10);
    g.throughput(Throughput::Elements(BITS as u64));
    for scheme in SchemeId::ALL {
        let th = Thresholds::new(0, 8).unwrap();
        g.bench_function(BenchmarkId::new("encode_fixed", scheme), |b| {
            b.iter(|| run_scheme(scheme, &cover, black_box(&secret), RunParams::Fixed(th)).unwrap())
        });
        let (marked, _) = run_scheme(scheme, &cover, &secret, RunParams::Fixed(th)).unwrap();
        g.bench_function(BenchmarkId::new("decode", scheme), |b| {
            b.iter(|| decode_scheme(scheme, black_box(&marked)).unwrap())
        });
    }
    g.bench_function("encode_auto/proposed", |b| {
        b.iter(|| run_scheme(SchemeId::Proposed, &cover, black_box(&secret), RunParams::Auto).unwrap())
    });
    g.bench_function("rank_thresholds/proposed", |b| {
        b.iter(|| rank_thresholds(SchemeId::Proposed, black_box(&cover), BITS).unwrap())
    });
    g.finish();
}

fn predictors(c: &mut Criterion) {
    let contexts: Vec<Context9> = (0..1024u32)
        .map(|k| {
            let v = |s: u32| ((k.wrapping_mul(2654435761).rotate_left(s) >> 24) % 256) as i32;
            Context9 {
                e: v(1),
                ee: v(5),
                s: v(9),
                se: v(13),
                sw: v(17),
                ss: v(21),
                sse: v(25),
                ssw: v(29),
                see: v(3),
            }
        })
        .collect();
    let mut g = c.benchmark_group("predict");
    g.throughput(Throughput::Elements(contexts.len() as u64));
    g.bench_function("med", |b| b.iter(|| contexts.iter().map(|c| med_predict(black_box(c))).sum::<i32>()));
    g.bench_function("agsp", |b| b.iter(|| contexts.iter().map(|c| agsp_predict(black_box(c))).sum::<i32>()));
    g.finish();
}

fn location_map(c: &mut Criterion) {
    let n = 100_000;
    let mut g = c.benchmark_group("locmap");
    g.throughput(Throughput::Elements(n as u64));
    for ones_per_mille in [1u64, 50, 500] {
        let bits = random_bits(n * 10, ones_per_mille);
        let flags: Vec<bool> = bits
            .as_slice()
            .chunks(10)
            .map(|c| c.iter().fold(0u64, |a, &b| a * 2 + b as u64) % 1000 < ones_per_mille)
            .collect();
        let lm = LocationMap::new(flags);
        let packed = compress(&lm);
        g.bench_function(BenchmarkId::new("compress", ones_per_mille), |b| b.iter(|| compress(black_box(&lm))));
        g.bench_function(BenchmarkId::new("decompress", ones_per_mille), |b| {
            b.iter(|| decompress(black_box(&packed), n).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, encode_decode, predictors, location_map);
criterion_main!(benches);
