//! Real-valued extension with no loss in the Lipschitz constant.

use std::sync::Arc;

use lipext::metric::{lipschitz_constant, unit_cycle, PartialMap};
use lipext::solvers::mcshane_extend;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cycle = Arc::new(unit_cycle(8));
    let phi = PartialMap::real(cycle.clone(), vec![0, 3, 5], &[0.0, 2.5, -1.0])?;
    let lip = lipschitz_constant(&phi);
    let all: Vec<usize> = (0..cycle.size()).collect();
    let ext = mcshane_extend(&phi, &all)?;
    println!("L = {} (witness {:?})", lip.constant, lip.witness_pair);
    println!("extension constant = {} ({:?})", ext.constant, ext.optimality);
    for (i, v) in ext.map.iter() {
        println!("  {i}: {:.3}", v.coords().unwrap()[0]);
    }
    Ok(())
}
