//! Lipschitz extension on finite metric spaces.
//!
//! The crate computes extension moduli of finite metric spaces and runs the
//! gluing construction that bounds `e^n(M; N)` by `e_n(M; N) + 2`:
//!
//! * [`metric`]: validated distance matrices, partial maps, Lipschitz
//!   constants and instance generators (point clouds, graph metrics).
//! * [`solvers`]: extension oracles. McShane for real-valued maps, a
//!   minimax solver for Euclidean targets, exhaustive search for finite ones.
//! * [`gluing`]: the gluing construction with every inequality of its
//!   bound checked at runtime.
//! * [`moduli`]: exact `e(M, S; N)`, `e_n` and `e^n` for finite targets,
//!   lower-bound estimates for Euclidean ones.
//! * [`lab`]: experiment specs, a deterministic runner, CSV/JSON results
//!   and plot data. The `lipext` binary is a thin front end over it.
//! * [`io`]: the JSON instance and map schemas.
//!
//! ```
//! use std::sync::Arc;
//! use lipext::metric::{unit_path, TargetSpace};
//! use lipext::moduli::modulus_for_subset;
//!
//! // A map from the endpoints of a 4-edge path to a two-point space has
//! // constant 1/4, but every extension must jump across some unit edge.
//! let path = Arc::new(unit_path(4));
//! let two = TargetSpace::two_point(1.0).unwrap();
//! let e = modulus_for_subset(&path, &[0, 4], &two, 1_000).unwrap();
//! assert_eq!(e.value, 4.0);
//! ```

pub mod gluing;
pub mod io;
pub mod lab;
pub mod metric;
pub mod moduli;
pub mod solvers;

pub use metric::TOL;
