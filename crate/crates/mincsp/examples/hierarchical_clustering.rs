//! Hierarchical clustering: fit an M-level tree to a dissimilarity matrix by
//! enumerating trunks (the internal-node trees) and solving one rigid
//! MIN-2CSP per trunk with delta = 1/M.
//!
//!     cargo run --release --example hierarchical_clustering

use mincsp::cost::ExactCost;
use mincsp::encode::hier::Trunk;
use mincsp::generate::planted_hier;
use mincsp::oracle;
use mincsp::report::ReportDetail;
use mincsp::rigid::{solve_hierarchical, RigidPtasParams};

fn main() -> mincsp::Result<()> {
    let (n, levels, clusters) = (9usize, 2usize, 2usize);
    let planted = planted_hier(n, levels, clusters, 0.1, 404)?;
    println!(
        "planted {levels}-level hierarchy over {n} objects, {clusters} clusters; planted cost {}",
        planted.planted_cost
    );
    println!("dissimilarity matrix:");
    print!("{}", planted.problem.to_text());

    println!(
        "trunks to try: {} (bound d^((M-1)d) = {})",
        Trunk::enumerate(clusters, levels).len(),
        (clusters as u64).pow(((levels - 1) * clusters) as u32)
    );

    let opt = oracle::exact_hier(&planted.problem, 1 << 24)?;
    println!(
        "exact optimum {} with trunk parents {:?}",
        opt.cost,
        opt.trunk.flat_parents()
    );

    let params = RigidPtasParams::new(ExactCost::new(3, 10), ExactCost::new(1, 2), 6)
        .with_samples(4);
    let report = solve_hierarchical(&planted.problem, &params)?;
    println!("scheme answer {}", report.cost);
    if let ReportDetail::Hierarchical(detail) = &report.detail {
        println!(
            "  winning trunk #{} (parents {:?}), per-trunk costs {:?}",
            detail.winning_trunk_index,
            detail.winning_trunk_parents,
            detail
                .per_trunk_cost
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}
