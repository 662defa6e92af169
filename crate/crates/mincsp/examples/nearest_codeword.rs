//! Maximum-likelihood decoding as a fragile CSP: XOR equations over F2,
//! including sub-arity equations lifted by the uniform padding mixture.
//!
//!     cargo run --release --example nearest_codeword

use mincsp::cost::ExactCost;
use mincsp::csp::Assignment;
use mincsp::encode::ncp::{NcpInstance, XorEquation};
use mincsp::fragile::{solve_fragile, FragilePtasParams};
use mincsp::generate::{planted_csp, CspTemplate};
use mincsp::oracle;

fn main() -> mincsp::Result<()> {
    // a small hand-rolled system with mixed arities
    let ncp = NcpInstance::new(
        6,
        vec![
            XorEquation::new(vec![0, 1, 2], false)?,
            XorEquation::new(vec![1, 3], true)?,
            XorEquation::new(vec![2, 4, 5], true)?,
            XorEquation::new(vec![0], false)?, // unary: padded to arity 3
            XorEquation::new(vec![3, 4, 5], false)?,
        ],
    )?;
    let inst = ncp.to_csp(3)?;
    println!(
        "5 equations over 6 bits -> arity-3 CSP with {} tables, scale eta = {}",
        inst.table_count(),
        inst.eta()
    );
    let x = Assignment::new(vec![0, 1, 0, 0, 1, 0]);
    println!(
        "codeword 010010... violates {} equations; CSP objective {}",
        ncp.violated_count(x.values()),
        inst.objective(&x)?
    );

    // a planted dense system: noise flips right-hand sides
    let planted = planted_csp(10, CspTemplate::Ncp { arity: 2 }, 1.0, 0.05, 9, None)?;
    println!(
        "\nplanted 10-bit system: {} tables, fragile density delta = {}, planted cost {}",
        planted.inst.table_count(),
        planted.delta,
        planted.planted_cost
    );
    let opt = oracle::exact_csp(&planted.inst, &vec![None; 10], 1 << 24)?;
    let params = FragilePtasParams::new(ExactCost::new(1, 5), planted.delta, 3).with_samples(4);
    let report = solve_fragile(&planted.inst, &params)?;
    println!(
        "decoded cost {} vs exact optimum {} (planted bound {})",
        report.cost, opt.cost, planted.planted_cost
    );
    Ok(())
}
