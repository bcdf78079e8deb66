//! Rooted trees and free operads on a Σ-module.

use std::collections::BTreeMap;

use operad_forge::fixtures;
use operad_forge::operad::free::free_operad;
use operad_forge::trees::enumerate_trees;

fn main() {
    for n in 2..=4 {
        println!("arity {n}: {} reduced trees", enumerate_trees(n).len());
    }
    for t in enumerate_trees(3) {
        println!("  {t}");
    }

    for name in ["trivial", "regular", "mixed"] {
        let gens: BTreeMap<_, _> = fixtures::generators(name).unwrap();
        let f = free_operad(&gens, 5);
        f.operad.validate().unwrap();
        println!("free on {name}: graded dims {:?}", f.operad.graded_dims());
    }
}
