//! Exact e^n and e_n on small paths and cycles, checking e^n <= e_n + 2.

use std::sync::Arc;

use lipext::metric::{unit_cycle, unit_path, TargetSpace};
use lipext::moduli::check_claim1;
use lipext::solvers::DEFAULT_ENUMERATION_CAP;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let targets = [
        ("two-point", TargetSpace::two_point(1.0)?),
        ("equilateral:3", TargetSpace::equilateral(3, 1.0)?),
    ];
    let spaces = [("path:4", unit_path(4)), ("cycle:5", unit_cycle(5))];
    for (name, space) in spaces {
        let space = Arc::new(space);
        for (tname, target) in &targets {
            for n in 1..=2 {
                let c = check_claim1(&space, n, target, DEFAULT_ENUMERATION_CAP)?;
                println!(
                    "{name} -> {tname}, n = {n}: e^n = {}, e_n = {}, slack {}",
                    c.e_up_n.value, c.e_n.value, c.slack
                );
            }
        }
    }
    Ok(())
}
