use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use permguard::corpus::gen::generate_corpus;
use permguard::infer::infer_program;
use permguard::par::Parallelism;
use permguard::quant::{privilege_reduction, program_universes, BuiltinCatalog};
use permguard::resolve::Project;

fn corpus(lines: usize) -> Project {
    let mut files = generate_corpus(11, lines);
    let index: String = files
        .iter()
        .filter(|(n, _)| n.ends_with("/main.mjs"))
        .map(|(n, _)| format!("require(\"./{}\");\n", n.trim_end_matches(".mjs")))
        .collect();
    files.push(("main.mjs".to_string(), index));
    Project::in_memory(files)
}

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn infer(c: &mut Criterion) {
    let p = corpus(3000);
    let mut g = c.benchmark_group("infer");
    g.sample_size(10);
    for (name, par) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| infer_program(&p, "main.mjs", par).unwrap())
        });
    }
    g.finish();
}

fn quantify(c: &mut Criterion) {
    let p = corpus(1500);
    let inf = infer_program(&p, "main.mjs", Parallelism::Parallel).unwrap();
    let perms = inf.perms();
    let modules: Vec<String> = inf.modules.keys().cloned().collect();
    let catalog = BuiltinCatalog::shipped();
    let mut g = c.benchmark_group("quantify");
    g.sample_size(10);
    for (name, par) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| {
                let us = program_universes(&p, &modules, catalog, 3, par);
                privilege_reduction(&perms, &us, catalog.hash(), 3, par).ok()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, infer, quantify);
criterion_main!(benches);
