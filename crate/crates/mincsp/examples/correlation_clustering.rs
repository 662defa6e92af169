//! Correlation clustering with a fixed cluster count: minimize cut edges
//! plus uncut non-edges. Not fragile beyond two clusters, but rigid — the
//! recursive scheme fixes clear-cut vertices level by level.
//!
//!     cargo run --release --example correlation_clustering

use mincsp::cost::ExactCost;
use mincsp::encode::hier::{hier_to_rigid_csp, Trunk};
use mincsp::generate::planted_cc;
use mincsp::oracle;
use mincsp::report::ReportDetail;
use mincsp::rigid::{solve_rigid, trace_principal_path, RigidPtasParams};

fn main() -> mincsp::Result<()> {
    let (n, clusters) = (12usize, 3usize);
    let planted = planted_cc(n, clusters, 0.06, 77)?;
    let inst = hier_to_rigid_csp(&planted.problem, &Trunk::flat(clusters))?;
    println!(
        "planted {n}-vertex, {clusters}-cluster instance; planted cost {}",
        planted.planted_cost
    );

    let opt = oracle::exact_csp(&inst, &vec![None; n], 1 << 24)?;
    println!("exact optimum {}", opt.cost);

    let params = RigidPtasParams::new(ExactCost::new(3, 10), ExactCost::integer(1), 5)
        .with_samples(4);
    let report = solve_rigid(&inst, &params)?;
    println!("scheme answer {} with clustering {:?}", report.cost, report.assignment);
    if let ReportDetail::Rigid(detail) = &report.detail {
        println!("  recursion visited {} frames:", detail.trace.frame_count);
        for f in detail.trace.frames.iter().take(5) {
            println!(
                "  depth {} |T| = {:2} additive {} vs threshold {} -> {:?}",
                f.depth, f.tricky, f.additive_cost, f.threshold, f.branch
            );
        }
    }

    // the diagnostic walker follows the branch that always guesses the
    // optimum correctly and reports what each frame froze
    let frames = trace_principal_path(&inst, &opt.assignment, &params)?;
    println!("principal path ({} frames):", frames.len());
    for f in &frames {
        println!(
            "  depth {}: |T| = {:2}, froze {:2}, pins correct: {}",
            f.depth,
            f.tricky.len(),
            f.clear_cut.len(),
            f.pins_correct
        );
    }
    Ok(())
}
