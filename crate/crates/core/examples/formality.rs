//! Weight gradings and formality witnesses.

use operad_forge::fixtures;
use operad_forge::qlinalg::q;
use operad_forge::weight::{formality_check, FormalityOutcome};

fn main() {
    for (name, p) in [("com4", fixtures::com(4)), ("E[line]", fixtures::line_endomorphisms(2)), ("free-binary", fixtures::free_binary(4))] {
        let up_to = p.window;
        match formality_check(&p, up_to, q(2)).unwrap() {
            FormalityOutcome::Formal(w) => {
                println!("{name}: formal");
                for a in &w.arrows {
                    println!("  {}", a.label);
                }
            }
            FormalityOutcome::Inconclusive { idx, reason } => println!("{name}: inconclusive at {idx:?}: {reason}"),
        }
    }
}
