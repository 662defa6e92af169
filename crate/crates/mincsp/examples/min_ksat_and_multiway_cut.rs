//! Two more encoders: MIN-kSAT in its DNF-conjunction reading and multiway
//! cut with the terminal-coloring workaround folded into the edge tables.
//!
//!     cargo run --release --example min_ksat_and_multiway_cut

use mincsp::csp::Assignment;
use mincsp::encode::ksat::{Conjunction, DnfInstance};
use mincsp::encode::mwc::MwcInstance;
use mincsp::oracle;

fn main() -> mincsp::Result<()> {
    // minimize unsatisfied conjunctions: each conjunction has exactly one
    // satisfying local assignment, so the tables are fragile
    let dnf = DnfInstance::new(
        4,
        2,
        vec![
            Conjunction::new(vec![(0, true), (1, false)])?,
            Conjunction::new(vec![(1, true), (2, true)])?,
            Conjunction::new(vec![(2, false), (3, true)])?,
        ],
    )?;
    let inst = dnf.to_csp()?;
    let x = Assignment::new(vec![1, 0, 0, 1]);
    println!(
        "DNF with 3 conjunctions at x = 1001: {} unsatisfied (CSP cost {})",
        dnf.unsatisfied_count(x.values()),
        inst.objective(&x)?
    );
    let opt = oracle::exact_csp(&inst, &vec![None; 4], 1 << 24)?;
    println!("optimal assignment {:?} leaves cost {}", opt.assignment.values(), opt.cost);

    // multiway cut: terminals 0 and 3 demand their own colors; an edge is
    // satisfied only if monochromatic AND its terminals are colored right
    let mwc = MwcInstance::new(
        5,
        2,
        vec![(0, 1), (1, 2), (2, 3), (1, 3), (0, 4)],
        vec![(0, 0), (3, 1)],
    )?;
    let inst = mwc.to_csp()?;
    let all_zero = Assignment::constant(5, 0);
    println!(
        "\nmultiway cut, all vertices color 0: {} violated edges (terminal 3 wants color 1)",
        inst.objective(&all_zero)?
    );
    let opt = oracle::exact_csp(&inst, &vec![None; 5], 1 << 24)?;
    println!(
        "optimal coloring {:?} cuts {} edges",
        opt.assignment.values(),
        opt.cost
    );
    Ok(())
}
