//! Sequential against data-parallel execution on the main workloads.
//!
//! Without the `parallel` feature both variants run sequentially, which gives the baseline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rho1::invariant::{build_a, invariant_pair_with};
use rho1::polymat::det_auto;
use rho1::table::{compute_table, diagram_from_pd, read_table, KnotRecord};
use rho1::verify::oracle_sweep;
use rho1::Exec;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn table(c: &mut Criterion) {
    let recs: Vec<KnotRecord> =
        read_table(data("knots_le12.csv")).unwrap().into_iter().filter(|r| r.dt.split_whitespace().count() <= 8).collect();
    let mut g = c.benchmark_group("table_le8");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| compute_table(&recs, e)));
    }
    g.finish();
}

fn gst(c: &mut Criterion) {
    let d = diagram_from_pd(&std::fs::read_to_string(data("gst48_pd.txt")).unwrap()).unwrap();
    let a = build_a(&d);
    let mut g = c.benchmark_group("gst48");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::new("det", name), &exec, |b, &e| b.iter(|| det_auto(&a, e)));
        g.bench_with_input(BenchmarkId::new("pair", name), &exec, |b, &e| b.iter(|| invariant_pair_with(&d, e).unwrap()));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let recs = read_table(data("knots_le12.csv")).unwrap();
    let small: Vec<_> = recs
        .iter()
        .filter(|r| r.dt.split_whitespace().count() <= 6)
        .map(|r| rho1::table::diagram_from_dt(&r.dt).unwrap())
        .collect();
    let mut g = c.benchmark_group("oracle_le6");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| oracle_sweep(&small, &[0.8, 0.9, 1.1], 2000, 1e-6, e))
        });
    }
    g.finish();
}

criterion_group!(benches, table, gst, oracle);
criterion_main!(benches);
