//! Runs the gluing construction on a random weighted graph and prints the
//! certified bound next to the constant actually achieved.

use lipext::gluing::{run_claim1, GluingOptions};
use lipext::lab::generate;
use lipext::metric::{PartialMap, TargetSpace};
use lipext::solvers::{Oracle, DEFAULT_ENUMERATION_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate(&"random-graph:7:0.4:1:3".parse()?, 11)?;
    let target = TargetSpace::equilateral(3, 1.0)?;
    let phi = PartialMap::indexed(inst.space.clone(), vec![0, 1, 3, 6], &[0, 1, 2, 0], target)?;
    let oracle = Oracle::BruteForce {
        cap: DEFAULT_ENUMERATION_CAP,
    };
    for delta in [0.0, 0.1, 0.5] {
        let opts = GluingOptions {
            delta,
            perturb: true,
            k: Some(1.0),
        };
        let trace = run_claim1(&phi, &[2, 4, 5], &oracle, &opts)?;
        println!(
            "delta {delta}: ys {:?}, L {:.3}, C_psi {:.3}, achieved {:.3} <= {:.3}",
            trace.ys, trace.lipschitz, trace.c_psi, trace.achieved, trace.certified_bound
        );
        for audit in &trace.audits {
            println!(
                "  {:?}: worst {:.3} vs bound {:.3} over {} pairs",
                audit.class, audit.worst_ratio, audit.bound, audit.pairs
            );
        }
    }
    Ok(())
}
