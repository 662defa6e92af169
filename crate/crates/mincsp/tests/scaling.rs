//! Runtime-scaling criterion, kept in its own test binary so the wall-clock
//! measurements never share the process with a parallel test suite.
//!
//! The dense phase (additive pre-pass, greedy rounds, clear-cut scans,
//! constrained finish) scales with the board area; doubling the side should
//! roughly quadruple it. The per-guess machinery (sample drawing, guess
//! decoding, bookkeeping) is size-free at a fixed sample count.

use mincsp::bench::{bench_scaling, ScalingConfig};
use mincsp::cost::ExactCost;

#[test]
fn c12_runtime_scaling() {
    let cfg = ScalingConfig {
        sizes: vec![100, 200, 400],
        samples: 4,
        additive_t: 5,
        epsilon: ExactCost::new(1, 5),
        noise: 0.0,
        reps: 3,
        base_seed: 12,
    };
    let run = bench_scaling(&cfg).expect("scaling run");
    let summary = &run.summary;
    for s in &summary.per_size {
        println!(
            "criterion 12 (runtime scaling): m = {:3}  dense {:>12} ns  guess {:>9} ns",
            s.size, s.dense_median_ns, s.guess_min_ns
        );
    }
    println!(
        "criterion 12 (runtime scaling): dense ratios {:?}, guess spread {:.2}, fitted exponent {:.2}",
        summary
            .dense_ratios
            .iter()
            .map(|r| format!("{r:.2}"))
            .collect::<Vec<_>>(),
        summary.guess_spread,
        summary.fitted_exponent
    );
    let mut ok = true;
    for (i, &ratio) in summary.dense_ratios.iter().enumerate() {
        if !(3.0..=5.5).contains(&ratio) {
            println!(
                "criterion 12 (runtime scaling): FAIL — dense ratio {} at doubling {} outside [3.0, 5.5]",
                ratio, i
            );
            ok = false;
        }
    }
    if summary.guess_spread > 2.0 {
        println!(
            "criterion 12 (runtime scaling): FAIL — guess-loop spread {:.2} exceeds 2x",
            summary.guess_spread
        );
        ok = false;
    }
    if ok {
        println!("criterion 12 (runtime scaling): PASS — dense phase ~ area, guess loop size-free");
    }
    assert!(ok, "scaling criterion failed; see printed summary");
}
