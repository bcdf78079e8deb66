//! Cubical chains, the cross product and the alternation operator.

use operad_forge::cubical::alt_check;

fn main() {
    let report = alt_check(4, 50, 3);
    println!(
        "{} cubes, {} random chains, {} permutation triples, {} failures",
        report.cubes,
        report.random_chains,
        report.permutations,
        report.failures.len()
    );
    assert!(report.passed());
}
