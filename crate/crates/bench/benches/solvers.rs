use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use symparity::pgsolver::{emit_solution, SolutionFormat};
use symparity::{solve, AlgoChoice, Backend, Policy, SolveOptions};
use symparity_bench::random_family;

/// The structured dump must carry the counters the comparisons read.
fn check_structured_keys() {
    let games = random_family(16, 5, 1);
    let report = solve(&games[0], AlgoChoice::ProgressMeasure, &SolveOptions::default()).unwrap().report;
    let dump = emit_solution(&report, SolutionFormat::Structured);
    for key in ["cpre_ops:", "peak_live_sets:"] {
        assert!(dump.lines().any(|l| l.starts_with(key)), "structured output lacks {key}");
    }
}

fn solvers(c: &mut Criterion) {
    check_structured_keys();
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    let variants = [
        ("zielonka", AlgoChoice::Zielonka, Policy::Sqrt),
        ("pm", AlgoChoice::ProgressMeasure, Policy::Sqrt),
        ("bigstep-sqrt", AlgoChoice::BigStep, Policy::Sqrt),
        ("bigstep-gamma", AlgoChoice::BigStep, Policy::Gamma),
        ("explicit", AlgoChoice::Explicit, Policy::Sqrt),
    ];
    for n in [16usize, 64, 128] {
        let games = random_family(n, 5, 4);
        for (name, algo, policy) in variants {
            let opts = SolveOptions {
                policy,
                ..SolveOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(name, n), &games, |b, games| {
                b.iter(|| {
                    for g in games {
                        solve(g, algo, &opts).unwrap();
                    }
                })
            });
        }
    }
    group.finish();
}

fn backends(c: &mut Criterion) {
    let mut group = c.benchmark_group("backend");
    group.sample_size(20);
    let games = random_family(64, 5, 4);
    for backend in [Backend::Bits, Backend::Bdd] {
        let opts = SolveOptions {
            backend,
            ..SolveOptions::default()
        };
        let name = format!("{backend:?}").to_lowercase();
        group.bench_function(BenchmarkId::new("zielonka", name), |b| {
            b.iter(|| {
                for g in &games {
                    solve(g, AlgoChoice::Zielonka, &opts).unwrap();
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, solvers, backends);
criterion_main!(benches);
