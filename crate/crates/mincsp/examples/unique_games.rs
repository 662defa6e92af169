//! Unique games over a color domain: permutation constraints are fragile,
//! so the sampling scheme applies directly.
//!
//!     cargo run --release --example unique_games

use mincsp::cost::ExactCost;
use mincsp::fragile::{solve_fragile, FragilePtasParams};
use mincsp::fragility::verify_fragile_dense;
use mincsp::generate::{planted_csp, CspTemplate};
use mincsp::oracle;

fn main() -> mincsp::Result<()> {
    let n = 9;
    let colors = 3;
    let planted = planted_csp(n, CspTemplate::Ugp { colors }, 1.0, 0.08, 17, None)?;
    println!(
        "planted {n}-vertex unique game over {colors} colors: {} permutation edges",
        planted.inst.table_count()
    );
    println!(
        "planted coloring violates {} (exact cost {})",
        planted.planted_cost,
        planted.inst.objective(&planted.planted)?
    );

    // each vertex participates only in fragile permutation tables
    for v in [0usize, n / 2] {
        println!(
            "vertex {v}: {} fragile constraints",
            planted.inst.count_fragile_constraints(v)?
        );
    }
    let report = verify_fragile_dense(&planted.inst, planted.delta, 0, 0)?;
    println!(
        "fragile-dense at the declared delta = {}? {} ({:?})",
        planted.delta, report.pass, report.mode
    );

    let opt = oracle::exact_csp(&planted.inst, &vec![None; n], 1 << 24)?;
    let params =
        FragilePtasParams::new(ExactCost::new(1, 4), planted.delta, 23).with_samples(3);
    let solved = solve_fragile(&planted.inst, &params)?;
    println!("scheme cost {} vs exact optimum {}", solved.cost, opt.cost);
    Ok(())
}
