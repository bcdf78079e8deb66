//! Tensor products of flat graded bases with Koszul signs.

use num_traits::One;

use crate::qlinalg::{sv_add_scaled, Rational, SVec};

/// Basis of `X_1 ⊗ ... ⊗ X_k`, ordered lexicographically with the last factor fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBasis {
    pub dims: Vec<usize>,
    strides: Vec<usize>,
    pub total: usize,
}

impl ProductBasis {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total = dims.iter().product();
        ProductBasis { dims, strides, total }
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(m, s)| m * s).sum()
    }

    pub fn multi(&self, mut idx: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let m = idx / s;
                idx %= s;
                m
            })
            .collect()
    }

    /// `v_1 ⊗ ... ⊗ v_k`.
    pub fn tensor(&self, vs: &[SVec]) -> SVec {
        let mut acc: Vec<(usize, Rational)> = vec![(0, Rational::one())];
        for (k, v) in vs.iter().enumerate() {
            let mut next = Vec::with_capacity(acc.len() * v.len());
            for (i, c) in &acc {
                for (&j, x) in v {
                    next.push((i + j * self.strides[k], c * x));
                }
            }
            acc = next;
            if acc.is_empty() {
                return SVec::new();
            }
        }
        let mut out = SVec::new();
        for (i, c) in acc {
            sv_add_scaled(&mut out, &SVec::from([(i, c)]), &Rational::one());
        }
        out
    }
}

/// Sign of moving factor `k` (of degree `degrees[k]`) to position `new_pos[k]`.
pub fn koszul_sign(degrees: &[i64], new_pos: &[usize]) -> Rational {
    let mut odd = 0;
    for a in 0..degrees.len() {
        for b in a + 1..degrees.len() {
            if new_pos[a] > new_pos[b] && degrees[a] % 2 != 0 && degrees[b] % 2 != 0 {
                odd += 1;
            }
        }
    }
    if odd % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `(-1)^e` as a rational.
pub fn sign_pow(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Sum of a derivation-like expansion: term `k` replaces factor `k` by `h_k`, earlier factors by `f`, later by `g`.
///
/// `h_degree` is the degree of the replacing operation; the sign is `(-1)^{h_degree · Σ_{j<k} |x_j|}`.
pub fn derivation_terms<T: Clone>(
    degrees: &[i64],
    h_degree: i64,
    f: &[T],
    h: &[T],
    g: &[T],
) -> Vec<(Rational, Vec<T>)> {
    let k = degrees.len();
    let mut out = Vec::new();
    let mut before = 0i64;
    for j in 0..k {
        let sign = sign_pow(h_degree * before);
        let mut decos = Vec::with_capacity(k);
        decos.extend(f[..j].iter().cloned());
        decos.push(h[j].clone());
        decos.extend(g[j + 1..].iter().cloned());
        out.push((sign, decos));
        before += degrees[j];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{q, sv_unit};

    #[test]
    fn index_round_trip() {
        let pb = ProductBasis::new(vec![2, 3, 4]);
        assert_eq!(pb.total, 24);
        for i in 0..24 {
            assert_eq!(pb.index(&pb.multi(i)), i);
        }
        assert_eq!(pb.index(&[1, 0, 2]), 14);
    }

    #[test]
    fn tensor_of_units() {
        let pb = ProductBasis::new(vec![2, 2]);
        let v = pb.tensor(&[sv_unit(1), SVec::from([(0, q(2)), (1, q(3))])]);
        assert_eq!(v, SVec::from([(2, q(2)), (3, q(3))]));
    }

    #[test]
    fn koszul_signs() {
        assert_eq!(koszul_sign(&[1, 1], &[1, 0]), q(-1));
        assert_eq!(koszul_sign(&[1, 2], &[1, 0]), q(1));
        assert_eq!(koszul_sign(&[1, 1, 1], &[2, 1, 0]), q(-1));
    }
}
