//! The endomorphism modular operad `E[V]` of a complex with an inner product.
//!
//! `E[V]((g,l)) = V^{⊗l}` for every stable `(g,l)` in the window. Slots are
//! contracted with `B` after Koszul-moving them next to each other: for
//! `∘_i` the block `w` moves past `v_{i+1}, ..., v_{l-1}`, for `ξ_ij` the
//! factor `v_j` moves past `v_{i+1}, ..., v_{j-1}`.

use num_traits::Zero;

use super::product::{sign_pow, ProductBasis};
use super::{violation, Component, Kind, Operad, Violation};
use crate::chain::ChainComplex;
use crate::qlinalg::{sv_add_scaled, Matrix, Rational, SVec, SpMat};

/// A graded vector space with differential and a bilinear form, in one flat basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProductSpace {
    pub degrees: Vec<i64>,
    /// Columns are images of basis vectors.
    pub d: SpMat,
    pub b: Matrix,
}

impl InnerProductSpace {
    /// Flattens a complex, degrees ascending; `b` is given in that basis.
    pub fn new(v: &ChainComplex, b: Matrix) -> Result<Self, Violation> {
        let c = Component::from_sym(&crate::sigma::SymComplex::trivial(1, v.clone()));
        let s = InnerProductSpace { degrees: c.degrees, d: c.d, b };
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.dim();
        if self.b.rows() != n || self.b.cols() != n {
            return Err(violation("inner product shape", format!("{}x{} for dimension {n}", self.b.rows(), self.b.cols())));
        }
        for i in 0..n {
            for j in 0..n {
                let x = self.b.get(i, j);
                if !x.is_zero() && self.degrees[i] + self.degrees[j] != 0 {
                    return Err(violation("inner product degree", format!("B(e{}, e{}) pairs degrees {} and {}", i + 1, j + 1, self.degrees[i], self.degrees[j])));
                }
                if *x != sign_pow(self.degrees[i] * self.degrees[j]) * self.b.get(j, i) {
                    return Err(violation("inner product symmetry", format!("B(e{}, e{})", i + 1, j + 1)));
                }
            }
        }
        if self.b.rank() != n {
            return Err(violation("inner product nondegenerate", format!("rank {} < {n}", self.b.rank())));
        }
        // B(dv, w) + (-1)^{|v|} B(v, dw) = 0
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for (&k, x) in &self.d.cols[i] {
                    s += x * self.b.get(k, j);
                }
                for (&k, x) in &self.d.cols[j] {
                    s += sign_pow(self.degrees[i]) * x * self.b.get(i, k);
                }
                if !s.is_zero() {
                    return Err(violation("inner product compatible with d", format!("B on e{}, e{}", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    fn tensor_component(&self, l: usize) -> Component {
        let n = self.dim();
        let pb = ProductBasis::new(vec![n; l]);
        let degrees: Vec<i64> = (0..pb.total).map(|j| pb.multi(j).iter().map(|&x| self.degrees[x]).sum()).collect();
        let mut d = SpMat::zeros(pb.total, pb.total);
        let mut gens = vec![SpMat::zeros(pb.total, pb.total); l.saturating_sub(1)];
        for j in 0..pb.total {
            let m = pb.multi(j);
            let mut before = 0;
            for k in 0..l {
                let sign = sign_pow(before);
                for (&y, x) in &self.d.cols[m[k]] {
                    let mut mm = m.clone();
                    mm[k] = y;
                    sv_add_scaled(&mut d.cols[j], &SVec::from([(pb.index(&mm), x.clone())]), &sign);
                }
                before += self.degrees[m[k]];
            }
            for (k, g) in gens.iter_mut().enumerate() {
                let mut mm = m.clone();
                mm.swap(k, k + 1);
                g.cols[j] = SVec::from([(pb.index(&mm), sign_pow(self.degrees[m[k]] * self.degrees[m[k + 1]]))]);
            }
        }
        Component { arity: l, degrees, d, gens }
    }
}

/// `E[V]` in the window of modular dimensions `0..=window`.
pub fn endomorphism_modular_operad(v: &InnerProductSpace, window: usize) -> Result<Operad, Violation> {
    v.validate()?;
    let n = v.dim();
    let mut p = Operad::new(Kind::Modular, window);
    let idxs = p.indices();
    for &idx in &idxs {
        p.comps.insert(idx, v.tensor_component(idx.1));
    }
    let deg = |m: &[usize]| -> i64 { m.iter().map(|&x| v.degrees[x]).sum() };
    for &a in &idxs {
        for &b in &idxs {
            if a.1 == 0 || b.1 == 0 {
                continue;
            }
            let t = p.compose_target(a, b);
            if !p.in_window(t) {
                continue;
            }
            let (l, m) = (a.1, b.1);
            let (pa, pbb, pt) = (ProductBasis::new(vec![n; l]), ProductBasis::new(vec![n; m]), ProductBasis::new(vec![n; t.1]));
            for i in 0..l {
                for x in 0..pa.total {
                    let vx = pa.multi(x);
                    let after = deg(&vx[i + 1..]);
                    for y in 0..pbb.total {
                        let wy = pbb.multi(y);
                        let c = v.b.get(vx[i], wy[0]);
                        if c.is_zero() {
                            continue;
                        }
                        let mut out: Vec<usize> = vx[..i].to_vec();
                        out.extend(&wy[1..]);
                        out.extend(&vx[i + 1..]);
                        let val = sign_pow(deg(&wy) * after) * c;
                        p.set_compose(a, b, i, x, y, SVec::from([(pt.index(&out), val)]));
                    }
                }
            }
        }
    }
    for &a in &idxs {
        let l = a.1;
        if l < 2 || !p.in_window(super::contract_target(a)) {
            continue;
        }
        let (pa, pt) = (ProductBasis::new(vec![n; l]), ProductBasis::new(vec![n; l - 2]));
        for i in 0..l {
            for j in i + 1..l {
                let mut mat = SpMat::zeros(pt.total, pa.total);
                for x in 0..pa.total {
                    let vx = pa.multi(x);
                    let c = v.b.get(vx[i], vx[j]);
                    if c.is_zero() {
                        continue;
                    }
                    let between = deg(&vx[i + 1..j]);
                    let out: Vec<usize> = vx.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, &y)| y).collect();
                    mat.cols[x] = SVec::from([(pt.index(&out), sign_pow(v.degrees[vx[j]] * between) * c)]);
                }
                p.set_contract(a, i, j, mat);
            }
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{q, sv_unit};

    fn space(degrees: Vec<i64>, b: &[&[i64]]) -> InnerProductSpace {
        let n = degrees.len();
        InnerProductSpace { degrees, d: SpMat::zeros(n, n), b: Matrix::from_i64(b) }
    }

    #[test]
    fn one_dimensional() {
        let e = endomorphism_modular_operad(&space(vec![0], &[&[1]]), 2).unwrap();
        e.validate().unwrap();
        for (_, d) in e.dims() {
            assert_eq!(d, 1);
        }
        assert_eq!(e.contract_vec((0, 4), 0, 1, &sv_unit(0)), sv_unit(0));
    }

    #[test]
    fn dimension_is_a_power() {
        let e = endomorphism_modular_operad(&space(vec![0, 0], &[&[0, 1], &[1, 0]]), 1).unwrap();
        e.validate().unwrap();
        assert_eq!(e.dim((0, 4)), 16);
        assert_eq!(e.dim((1, 1)), 2);
    }

    #[test]
    fn hyperbolic_trace() {
        let e = endomorphism_modular_operad(&space(vec![0, 0], &[&[0, 1], &[1, 0]]), 1).unwrap();
        // basis of V⊗V⊗V: index 4a + 2b + c; ξ_12 keeps the third factor
        let m = &e.contract[&((0, 3), 0, 1)];
        let traced: Vec<(usize, SVec)> = m.cols.iter().cloned().enumerate().filter(|(_, c)| !c.is_empty()).collect();
        assert_eq!(traced.len(), 4);
        assert_eq!(m.cols[2], SVec::from([(0, q(1))]));
        assert_eq!(m.cols[4], SVec::from([(0, q(1))]));
    }

    #[test]
    fn odd_symplectic_pairing() {
        let v = space(vec![-1, 1], &[&[0, -1], &[1, 0]]);
        let e = endomorphism_modular_operad(&v, 2).unwrap();
        e.validate().unwrap();
    }

    #[test]
    fn window_three_skips_legless_indices() {
        let e = endomorphism_modular_operad(&space(vec![0], &[&[1]]), 3).unwrap();
        assert!(e.in_window((2, 0)));
        e.validate().unwrap();
    }

    #[test]
    fn rejects_bad_forms() {
        assert!(endomorphism_modular_operad(&space(vec![0, 0], &[&[1, 1], &[1, 1]]), 1).is_err());
        assert!(endomorphism_modular_operad(&space(vec![0, 0], &[&[0, 1], &[2, 0]]), 1).is_err());
        assert!(endomorphism_modular_operad(&space(vec![0, 1], &[&[1, 0], &[0, 1]]), 1).is_err());
    }
}
