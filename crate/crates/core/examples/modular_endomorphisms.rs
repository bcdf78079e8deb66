//! Stable graphs and the modular endomorphism operad of an inner product space.

use operad_forge::fixtures;
use operad_forge::operad::homology_operad;
use operad_forge::trees::enumerate_stable_graphs;

fn main() {
    for (g, l) in [(0, 4), (1, 1), (1, 2), (2, 0)] {
        println!("stable graphs of type ({g}, {l}): {}", enumerate_stable_graphs(g, l).len());
    }
    for graph in enumerate_stable_graphs(1, 1) {
        println!("  {graph}");
    }

    let e = fixtures::symplectic_endomorphisms(2);
    e.validate().unwrap();
    println!("E[V] for the odd symplectic plane: {:?}", e.dims());
    let (h, _) = homology_operad(&e);
    println!("its homology: {:?}", h.graded_dims());
}
