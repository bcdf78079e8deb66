//! Small named objects used by tests, examples and the golden files.

use std::collections::BTreeMap;

use crate::minimal::minimal_model;
use crate::operad::endo::{endomorphism_modular_operad, InnerProductSpace};
use crate::operad::free::{free_modular_operad, free_operad};
use crate::operad::{Component, Kind, Operad, OperadMorphism};
use crate::qlinalg::{q, sv_unit, Matrix, SVec, SpMat};
use crate::sigma::SymComplex;
use crate::chain::ChainComplex;

/// `Com` truncated at arity `n`: one degree-0 element per arity, compositions the identity.
pub fn com(n: usize) -> Operad {
    let mut p = Operad::new(Kind::Plain, n);
    for l in 2..=n {
        p.comps.insert((0, l), Component::graded(l, vec![0]));
    }
    for l in 2..=n {
        for m in 2..=n + 1 - l {
            for i in 0..l {
                p.set_compose((0, l), (0, m), i, 0, 0, sv_unit(0));
            }
        }
    }
    p
}

/// `Com` in arities 2, 3 plus an acyclic pair `d a = b` in arity 3.
pub fn com_plus_acyclic() -> Operad {
    let mut p = com(3);
    let c = p.comps.get_mut(&(0, 3)).expect("arity 3");
    c.degrees = vec![0, 1, 0];
    c.d = SpMat::zeros(3, 3);
    c.d.cols[1] = sv_unit(2);
    c.gens = (0..2).map(|_| SpMat::identity(3)).collect();
    p
}

/// Cone of the identity of a trivial line in every arity up to `n`, zero compositions.
pub fn cone_of_identity(n: usize) -> Operad {
    let mut p = Operad::new(Kind::Plain, n);
    for l in 2..=n {
        let mut c = Component::graded(l, vec![0, 1]);
        c.d.cols[1] = sv_unit(0);
        p.comps.insert((0, l), c);
    }
    p
}

/// Free operad on one symmetric binary operation of degree 0, through arity `n`.
pub fn free_binary(n: usize) -> Operad {
    free_operad(&BTreeMap::from([(2, Component::graded(2, vec![0]))]), n).operad
}

/// `E[V]` for the line with `B = (1)`.
pub fn line_endomorphisms(window: usize) -> Operad {
    let v = InnerProductSpace { degrees: vec![0], d: SpMat::zeros(1, 1), b: Matrix::from_i64(&[&[1]]) };
    endomorphism_modular_operad(&v, window).expect("valid form")
}

/// `E[V]` for the odd symplectic plane in degrees -1 and 1.
pub fn symplectic_endomorphisms(window: usize) -> Operad {
    let v = InnerProductSpace { degrees: vec![-1, 1], d: SpMat::zeros(2, 2), b: Matrix::from_i64(&[&[0, -1], &[1, 0]]) };
    endomorphism_modular_operad(&v, window).expect("valid form")
}

/// The arity-3 model of `Com`, extended freely to arity 4 with no new generators.
pub fn truncated_com_model() -> Operad {
    let mut m = minimal_model(&com(3), 3, 0).expect("model of Com").model;
    m.push_level(4, BTreeMap::new(), BTreeMap::new());
    m.operad
}

/// Generator Σ-modules: trivial, regular and mixed-degree.
pub fn generators(name: &str) -> Option<BTreeMap<usize, Component>> {
    let line = |n: usize, d: i64| Component::from_sym(&SymComplex::trivial(n, ChainComplex::graded([(d, 1)])));
    match name {
        "trivial" => Some(BTreeMap::from([(2, line(2, 0))])),
        "regular" => Some(BTreeMap::from([(2, Component::from_sym(&SymComplex::regular(2, 0)))])),
        "mixed" => Some(BTreeMap::from([(2, line(2, 0)), (3, Component::from_sym(&SymComplex::sign_rep(3, 1)))])),
        _ => None,
    }
}

/// Modular generators: one trivial `(0,3)` in degree 0 and one `(1,1)` in degree 1.
pub fn modular_generators() -> BTreeMap<(usize, usize), Component> {
    BTreeMap::from([((0, 3), Component::graded(3, vec![0])), ((1, 1), Component::graded(1, vec![1]))])
}

pub fn free_modular(window: usize) -> Operad {
    free_modular_operad(&modular_generators(), window).operad
}

/// A weight-pure endomorphism of [`com_plus_acyclic`]: identity on `Com`, `5` on the acyclic pair.
pub fn com_plus_acyclic_endomorphism() -> OperadMorphism {
    let p = com_plus_acyclic();
    let mut f = OperadMorphism::identity(&p);
    let m = f.comps.get_mut(&(0, 3)).expect("arity 3");
    m.cols[1] = SVec::from([(1, q(5))]);
    m.cols[2] = SVec::from([(2, q(5))]);
    f
}

pub const NAMES: &[&str] = &[
    "com3",
    "com4",
    "com3-star4",
    "com-plus-acyclic",
    "cone-of-identity",
    "free-binary",
    "line-endomorphisms",
    "symplectic-endomorphisms",
    "truncated-com-model",
    "free-modular",
];

pub fn build(name: &str) -> Option<Operad> {
    Some(match name {
        "com3" => com(3),
        "com4" => com(4),
        "com3-star4" => com(3).extend_by_zero(4),
        "com-plus-acyclic" => com_plus_acyclic(),
        "cone-of-identity" => cone_of_identity(3),
        "free-binary" => free_binary(4),
        "line-endomorphisms" => line_endomorphisms(2),
        "symplectic-endomorphisms" => symplectic_endomorphisms(1),
        "truncated-com-model" => truncated_com_model(),
        "free-modular" => free_modular(1),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_validates() {
        for name in NAMES {
            build(name).unwrap().validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        let p = com_plus_acyclic();
        com_plus_acyclic_endomorphism().check(&p, &p).unwrap();
        for g in ["trivial", "regular", "mixed"] {
            for c in generators(g).unwrap().values() {
                c.validate().unwrap();
            }
        }
    }
}
