//! On the unit path with endpoints fixed, every map to two points that sends
//! the endpoints apart must jump somewhere, so e(P, {0, m}; {0, 1}) = m.

use std::sync::Arc;

use lipext::metric::{unit_path, TargetSpace};
use lipext::moduli::modulus_for_subset;
use lipext::solvers::DEFAULT_ENUMERATION_CAP;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let two = TargetSpace::two_point(1.0)?;
    for m in 2..=8 {
        let path = Arc::new(unit_path(m));
        let r = modulus_for_subset(&path, &[0, m], &two, DEFAULT_ENUMERATION_CAP)?;
        let ext = r.witness_extension.as_ref().unwrap().index_values().unwrap();
        println!("m = {m}: e = {}  extension {ext:?}", r.value);
    }
    Ok(())
}
