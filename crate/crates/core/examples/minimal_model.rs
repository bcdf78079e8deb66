//! Minimal models through a window, and their uniqueness up to isomorphism.

use operad_forge::fixtures;
use operad_forge::minimal::{is_minimal, iso_between_minimal, minimal_model};
use operad_forge::operad::weak_equivalence_test;

fn main() {
    let p = fixtures::com(4);
    let m0 = minimal_model(&p, 4, 0).unwrap();
    let m7 = minimal_model(&p, 4, 7).unwrap();
    assert!(is_minimal(&m0.model).is_ok());
    for step in &m0.steps {
        println!("level {}: generators {:?}", step.level, step.generators);
    }
    let weq = weak_equivalence_test(&m0.rho, &m0.model.operad, &p);
    println!("rho is a weak equivalence: {}", weq.equivalence);
    let iso = iso_between_minimal(&m0, &m7, &p).unwrap();
    println!("seed 0 and seed 7 models are isomorphic ({} components)", iso.comps.len());
}
