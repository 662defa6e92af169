//! The Gale-Berlekamp switching game end to end: generate a planted board,
//! inspect its equivalent formulations, encode it as a fragile MIN-2CSP,
//! solve it with the sampling scheme, and compare against the exact oracle.
//!
//!     cargo run --release --example gale_berlekamp

use mincsp::cost::ExactCost;
use mincsp::encode::gb::gb_equivalences;
use mincsp::fragile::{solve_fragile, FragilePtasParams};
use mincsp::fragility::verify_fragile_dense;
use mincsp::generate::planted_gb;
use mincsp::oracle;
use mincsp::report::ReportDetail;

fn main() -> mincsp::Result<()> {
    let m = 10;
    let planted = planted_gb(m, 0.05, 2024)?;
    println!("{m} x {m} board, 5% noise on a rank-1 pattern:");
    print!("{}", planted.board.to_text());
    println!("planted switches light {} bulbs", planted.planted_cost);

    // the four formulations agree at the planted switches
    let eq = gb_equivalences(&planted.board, &planted.rows, &planted.cols)?;
    println!(
        "at the planted switches: d(M, xy^T) = {}, xor mismatches = {}, x^T M y = {} (= m^2 - 2d)",
        eq.d_rank1, eq.xor_count, eq.bilinear
    );

    // the encoding is fragile-dense at delta = 1/2: every row/column switch
    // participates in exactly m fragile parity constraints
    let inst = planted.board.to_csp();
    let density = verify_fragile_dense(&inst, ExactCost::new(1, 2), 200, 7)?;
    println!(
        "fragile-dense at delta = 1/2? {} (min pair sum {})",
        density.pass, density.min_pair_sum
    );

    let opt = oracle::exact_gb(&planted.board, 24)?;
    println!("exact optimum: {} lit bulbs", opt.cost);

    let params = FragilePtasParams::new(ExactCost::new(1, 5), ExactCost::new(1, 2), 1)
        .with_samples(4);
    let report = solve_fragile(&inst, &params)?;
    println!("scheme answer: {} lit bulbs (seed {})", report.cost, report.seed);
    if let ReportDetail::Fragile(detail) = &report.detail {
        println!(
            "  pre-pass cost {} vs threshold {} -> {}",
            detail.trace.prepass_cost,
            detail.trace.threshold,
            if detail.trace.threshold_branch {
                "additive branch"
            } else {
                "sampling branch"
            }
        );
        if let Some(g) = detail.trace.chosen_guess {
            println!("  best of {} guesses: #{g}", detail.trace.guesses.len());
        }
    }
    Ok(())
}
