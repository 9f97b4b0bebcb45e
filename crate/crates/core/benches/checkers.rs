//! Checker throughput on the rayon pool against a single worker thread.
//!
//! Built with `--no-default-features` both variants run on the calling
//! thread, which measures the sequential fallback itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mosva_core::exact_laurent::scalar::int;
use mosva_core::structures::Ctx;
use mosva_core::verification::{check_assoc_suite, check_contragredient_obligations, run_suite, Suite, SuiteOptions};
use mosva_core::workbench::build_heisenberg;

fn variants<R: Send>(c: &mut Criterion, group: &str, f: impl Fn() -> R + Sync) {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    let label = if mosva_core::par::is_parallel() { "rayon" } else { "sequential-build" };
    g.bench_function(BenchmarkId::new(label, rayon::current_num_threads()), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("one-thread", 1), |b| b.iter(|| one.install(&f)));
    g.finish();
}

fn checkers(c: &mut Criterion) {
    let (h, _) = build_heisenberg(&int(1), 6).unwrap();
    let opts = SuiteOptions::default();
    variants(c, "assoc suite, Heisenberg cutoff 6", || check_assoc_suite(&Ctx::algebra(&h), &opts).unwrap());
    variants(c, "D suite, Heisenberg cutoff 6", || run_suite(&Ctx::algebra(&h), Suite::D, &opts).unwrap());
    let (_, small) = build_heisenberg(&int(1), 5).unwrap();
    variants(c, "contragredient obligations, Fock cutoff 5", || {
        check_contragredient_obligations(&small, None, &opts, 4, 6).unwrap()
    });
    variants(c, "Heisenberg build, cutoff 7", || build_heisenberg(&int(1), 7).unwrap());
}

criterion_group!(benches, checkers);
criterion_main!(benches);
