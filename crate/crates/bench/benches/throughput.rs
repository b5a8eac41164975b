use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use select_core::eval::build_system;
use select_core::generators::build_stream;
use select_core::{prequential_run, RunConfig, SelectParams, Stream, StreamSpec, SystemKind};

fn small_stagger() -> Stream {
    let mut spec = StreamSpec::stagger(1);
    spec.segment_length = 1000;
    spec.segments = Some(6);
    build_stream(&spec).expect("valid spec")
}

fn systems(c: &mut Criterion) {
    let stream = small_stagger();
    let params = SelectParams::default();
    let mut group = c.benchmark_group("prequential_stagger_6k");
    group.sample_size(10);
    group.throughput(Throughput::Elements(stream.len() as u64));
    for kind in [SystemKind::Lb, SystemKind::Sparse, SystemKind::Select] {
        group.bench_function(kind.name(), |b| {
            b.iter_batched(
                || build_system(kind, &stream, &params).unwrap(),
                |mut sys| black_box(prequential_run(sys.as_mut(), &stream, &RunConfig::default()).unwrap().kappa),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let mut spec = StreamSpec::tree(1, 2);
    spec.segment_length = 1000;
    c.bench_function("generate_tree_18k", |b| b.iter(|| black_box(build_stream(&spec).unwrap().len())));
}

criterion_group!(benches, systems, generation);
criterion_main!(benches);
