//! The benchmark harness as a library: a small approximation-ratio grid and
//! a runtime-scaling run, both emitting CSV with the configuration embedded.
//!
//!     cargo run --release --example bench_grid

use mincsp::additive::AdditiveBackend;
use mincsp::bench::{bench_ratio, bench_scaling, BenchProblem, RatioConfig, ScalingConfig};
use mincsp::cost::ExactCost;

fn main() -> mincsp::Result<()> {
    let ratio_cfg = RatioConfig {
        problem: BenchProblem::Gb,
        sizes: vec![6, 8],
        noises: vec![0.0, 0.05],
        epsilon: ExactCost::new(1, 5),
        samples: 4,
        seeds: 10,
        base_seed: 42,
        clusters: 2,
        backend: AdditiveBackend::exact(),
        allow_planted_bound: false,
        threads: 1,
    };
    let csv = bench_ratio(&ratio_cfg)?;
    println!("ratio grid (summary rows):");
    for line in csv.lines().filter(|l| l.starts_with("summary,")) {
        println!("  {line}");
    }

    let scaling_cfg = ScalingConfig {
        sizes: vec![50, 100, 200],
        samples: 4,
        additive_t: 5,
        epsilon: ExactCost::new(1, 5),
        noise: 0.0,
        reps: 3,
        base_seed: 7,
    };
    let run = bench_scaling(&scaling_cfg)?;
    println!("\nscaling medians:");
    for s in &run.summary.per_size {
        println!(
            "  m = {:3}: dense {:>12} ns, guess machinery {:>7} ns",
            s.size, s.dense_median_ns, s.guess_min_ns
        );
    }
    println!(
        "dense ratios per doubling: {:?}, fitted exponent {:.2}",
        run.summary
            .dense_ratios
            .iter()
            .map(|r| format!("{r:.2}"))
            .collect::<Vec<_>>(),
        run.summary.fitted_exponent
    );
    Ok(())
}
