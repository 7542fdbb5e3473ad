//! Builds metrics three ways and shows how invalid matrices are reported.

use lipext::metric::{graph_metric, points_to_metric, validate_metric, Exponent};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = points_to_metric(
        &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        Exponent::new(1.0)?,
    )?;
    println!("l1 unit square, diameter {}", square.diameter());

    let graph = graph_metric(&[(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)], 3)?;
    println!(
        "graph metric d(0, 2) = {} (the direct edge is not a shortest path)",
        graph.d(0, 2)
    );

    let broken = vec![vec![0.0, 3.0, 1.0], vec![2.0, 0.0, 1.0], vec![1.0, 1.0, -1.0]];
    match validate_metric(&broken) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
