//! The additive-error solver behind the schemes: EXACT enumerates the free
//! set, SAMPLED extends enumerated sample assignments greedily. Both honor
//! pinned variables and per-variable linear cost terms; SAMPLED's contract
//! is statistical.
//!
//!     cargo run --release --example additive_backends

use mincsp::additive::{
    additive_solve, build_padded_subproblem, padded_objective, AdditiveBackend,
    AdditiveRequest, LinearCosts,
};
use mincsp::cost::ExactCost;
use mincsp::csp::Assignment;
use mincsp::generate::{planted_csp, CspTemplate};

fn main() -> mincsp::Result<()> {
    let n = 10;
    let planted = planted_csp(n, CspTemplate::Ncp { arity: 2 }, 1.0, 0.15, 55, None)?;
    let inst = &planted.inst;

    let req = AdditiveRequest::whole(inst, ExactCost::new(1, 5));
    let (x_exact, exact) = additive_solve(&req, AdditiveBackend::exact())?;
    println!("EXACT backend: optimum {} at {:?}", exact, x_exact.values());

    for t in [2usize, 4, 6] {
        let (_, cost) = additive_solve(&req, AdditiveBackend::sampled(t, 9))?;
        println!("SAMPLED t = {t}: cost {} (gap {})", cost, cost.abs_diff(exact));
    }

    // pinned variables and linear costs
    let mut pinned = vec![None; n];
    pinned[0] = Some(x_exact.get(0));
    pinned[1] = Some(1 - x_exact.get(1)); // deliberately against the optimum
    let mut lin = LinearCosts::zero(n, 2);
    lin.num[2 * 2] = 3; // charging x_2 = 0 three units
    let constrained = AdditiveRequest {
        inst,
        pinned,
        linear: Some(lin),
        epsilon: ExactCost::new(1, 5),
    };
    let (x, cost) = additive_solve(&constrained, AdditiveBackend::exact())?;
    println!(
        "pinned + linear terms: constrained total {} at {:?}",
        cost,
        x.values()
    );

    // the padding reduction: fixing a clear-cut set and re-expressing the
    // rest as an arity-uniform subproblem, exactly
    let base = x_exact.clone();
    let clear: Vec<usize> = (0..n / 2).collect();
    let tricky: Vec<usize> = (n / 2..n).collect();
    let ps = build_padded_subproblem(inst, &base, &clear, &tricky)?;
    let y = Assignment::constant(tricky.len(), 1);
    let lifted = ps.lift(&base, &y);
    println!(
        "padding identity: decomposed {} == direct {}",
        padded_objective(&ps, &y)?,
        inst.objective(&lifted)?
    );
    Ok(())
}
