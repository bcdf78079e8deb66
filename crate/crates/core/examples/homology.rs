//! Exact homology, tensor products and mapping cones over Q.

use std::collections::BTreeMap;

use operad_forge::chain::{homology, homotopy_solve, mapping_cone, tensor, ChainComplex, ChainMap};
use operad_forge::qlinalg::{q, Matrix};

fn main() {
    // C_1 = Q^2 -> C_0 = Q^2 with rank one
    let d = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
    let c = ChainComplex::new(BTreeMap::from([(0, 2), (1, 2)]), BTreeMap::from([(1, d)])).unwrap();
    println!("H(C) = {:?}", homology(&c).dims());
    println!("H(C x C) = {:?}", homology(&tensor(&c, &c)).dims());

    let id = ChainMap::identity(&c);
    println!("H(cone of id) = {:?}", homology(&mapping_cone(&id).complex).dims());

    let twice = id.scale(&q(2));
    match homotopy_solve(&id, &twice) {
        Ok(_) => println!("id ~ 2 id"),
        Err(_) => println!("id and 2 id are not homotopic"),
    }
}
