//! Pipeline benchmarks over the routing example: lexing, parsing,
//! translation, emission, and the bounded oracle.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use clp2chc::oracle::{fixpoint, Bounds};
use clp2chc::smtlib::{emit, parse_script, Style};
use clp2chc::syntax::{parse_program, print_program, tokenize};
use clp2chc::translator::translate_program;

const CITIES: &str = include_str!("../../clp2chc/tests/data/cities.pl");

fn bench_pipeline(c: &mut Criterion) {
    let db = parse_program(CITIES).unwrap().database;
    let script = translate_program(&db).unwrap().script;
    let emitted = emit(&script, Style::Modern);

    c.bench_function("tokenize/cities", |b| {
        b.iter(|| tokenize(black_box(CITIES)).unwrap())
    });
    c.bench_function("parse/cities", |b| {
        b.iter(|| parse_program(black_box(CITIES)).unwrap())
    });
    c.bench_function("print/cities", |b| b.iter(|| print_program(black_box(&db))));
    c.bench_function("translate/cities", |b| {
        b.iter(|| translate_program(black_box(&db)).unwrap())
    });
    c.bench_function("emit/cities", |b| {
        b.iter(|| emit(black_box(&script), Style::Legacy))
    });
    c.bench_function("parse_script/cities", |b| {
        b.iter(|| parse_script(black_box(&emitted)).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let db = parse_program(CITIES).unwrap().database;
    let bounds = Bounds::new(3, 0, 40, 6, 100);
    let mut group = c.benchmark_group("oracle");
    group.sample_size(20);
    group.bench_function("fixpoint/cities", |b| {
        b.iter(|| fixpoint(black_box(&db), black_box(&bounds)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_pipeline, bench_oracle);
criterion_main!(benches);
