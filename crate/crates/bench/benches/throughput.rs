use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use plastream::{compress, protocol_decode, segment_stream, ErrorThreshold, MethodKind, Protocol};
use plastream_bench::{records, walk};

const N: usize = 100_000;
const EPS: f64 = 1.0;

fn methods(c: &mut Criterion) {
    let tuples = walk(N);
    let eps = ErrorThreshold::new(EPS).unwrap();
    let mut g = c.benchmark_group("segment");
    g.throughput(Throughput::Elements(N as u64));
    for kind in MethodKind::ALL {
        g.bench_with_input(BenchmarkId::from_parameter(kind), &tuples, |b, t| {
            b.iter(|| segment_stream(kind, eps, 256, black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn pipelines(c: &mut Criterion) {
    let tuples = walk(N);
    let eps = ErrorThreshold::new(EPS).unwrap();
    let mut g = c.benchmark_group("compress");
    g.throughput(Throughput::Elements(N as u64));
    for (m, p) in Protocol::pairings() {
        g.bench_with_input(BenchmarkId::new(m.name(), p), &tuples, |b, t| {
            b.iter(|| compress(m, p, eps, None, black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn decoding(c: &mut Criterion) {
    let tuples = walk(N);
    let ts: Vec<f64> = tuples.iter().map(|p| p.t).collect();
    let mut g = c.benchmark_group("decode");
    g.throughput(Throughput::Elements(N as u64));
    for (m, p) in Protocol::pairings() {
        let recs = records(m, p, EPS, &tuples);
        g.bench_with_input(BenchmarkId::new(m.name(), p), &recs, |b, r| {
            b.iter(|| protocol_decode(p, black_box(&ts), black_box(r)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, methods, pipelines, decoding);
criterion_main!(benches);
