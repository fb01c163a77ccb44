use criterion::{criterion_group, criterion_main, Criterion};
use ntm::export::{read_dot, to_dot};
use ntm::model::{build_graph, parse, refine_check};
use ntm_bench::fixture;

fn models(c: &mut Criterion) {
    let text = std::fs::read_to_string(fixture("model2.ctx")).unwrap();
    c.bench_function("parse/model2", |b| b.iter(|| parse(&text).unwrap()));

    let model = parse(&text).unwrap();
    c.bench_function("graph+dot/model2", |b| b.iter(|| to_dot(&build_graph(&model, false).unwrap())));
    let dot = to_dot(&build_graph(&model, false).unwrap());
    c.bench_function("read_dot/model2", |b| b.iter(|| read_dot(&dot).unwrap()));

    let coarse = parse(&std::fs::read_to_string(fixture("model1.ctx")).unwrap()).unwrap();
    let mapping = ntm::io::load_mapping(&fixture("model1_to_model2.map.json")).unwrap();
    c.bench_function("refine_check/model1-model2", |b| b.iter(|| refine_check(&coarse, &model, &mapping).unwrap()));
}

criterion_group!(benches, models);
criterion_main!(benches);
