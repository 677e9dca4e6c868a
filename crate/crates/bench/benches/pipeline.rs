use criterion::{criterion_group, criterion_main, Criterion};
use gauge2d::commands::load_system;
use gauge2d::{run_pipeline, PipelineOptions};
use gauge2d_core::noether::analyze;

const FIXTURES: [(&str, &str); 5] = [
    ("coupled", include_str!("../../cli/fixtures/coupled.g2d")),
    ("coupled_g0", include_str!("../../cli/fixtures/coupled_g0.g2d")),
    ("integrable", include_str!("../../cli/fixtures/integrable.g2d")),
    ("trivial", include_str!("../../cli/fixtures/trivial.g2d")),
    ("gaugeless", include_str!("../../cli/fixtures/gaugeless.g2d")),
];

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    for (name, text) in FIXTURES {
        let sys = load_system(text).unwrap().1;
        group.bench_function(name, |b| b.iter(|| analyze(&sys, None).unwrap()));
    }
    group.finish();
    let sys = load_system(FIXTURES[0].1).unwrap().1;
    c.bench_function("report/coupled", |b| {
        b.iter(|| run_pipeline(&sys, &PipelineOptions::default()).unwrap())
    });
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
