//! Exact optimal extension into a three-point equilateral space.

use std::sync::Arc;

use lipext::metric::{unit_path, PartialMap, TargetSpace};
use lipext::solvers::{brute_force_extend, enumeration_count, DEFAULT_ENUMERATION_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Arc::new(unit_path(5));
    let target = TargetSpace::equilateral(3, 1.0)?;
    let phi = PartialMap::indexed(path.clone(), vec![0, 2, 5], &[0, 1, 2], target)?;
    println!("{} candidate extensions", enumeration_count(3, 3));
    let all: Vec<usize> = (0..path.size()).collect();
    let ext = brute_force_extend(&phi, &all, DEFAULT_ENUMERATION_CAP)?;
    println!(
        "optimal constant {} with values {:?}",
        ext.constant,
        ext.map.index_values().unwrap()
    );
    Ok(())
}
