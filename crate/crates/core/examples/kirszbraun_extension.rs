//! Extends a map from a planar point cloud into the plane. By Kirszbraun's
//! theorem the optimum equals the Lipschitz constant of the data; the solver
//! reports how close it got.

use std::sync::Arc;

use lipext::lab::generate;
use lipext::metric::{lipschitz_constant, PartialMap, TargetPoint, TargetSpace};
use lipext::solvers::{euclidean_extend, EuclideanConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate(&"lp-cloud:10:2:2".parse()?, 3)?;
    let space: Arc<_> = inst.space.clone();
    // Rotate-and-stretch the first five points.
    let coords = inst.coords().unwrap();
    let domain: Vec<usize> = (0..5).collect();
    let values = domain
        .iter()
        .map(|&i| {
            let [x, y] = [coords[i][0], coords[i][1]];
            TargetPoint::Coords(vec![2.0 * y, -x + 0.3 * y * y])
        })
        .collect();
    let phi = PartialMap::new(space.clone(), domain, values, TargetSpace::Euclidean { dim: 2 })?;
    let all: Vec<usize> = (0..space.size()).collect();
    let ext = euclidean_extend(&phi, &all, &EuclideanConfig::default())?;
    let l = lipschitz_constant(&phi).constant;
    println!("L = {l:.6}");
    println!(
        "extension constant = {:.6} ({:?}) after {} iterations",
        ext.constant, ext.optimality, ext.iterations
    );
    println!("relative excess = {:.2e}", ext.constant / l - 1.0);
    Ok(())
}
