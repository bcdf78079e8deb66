//! Cubic chains on finite cubical sets, the cross product and its symmetrization.
//!
//! A cube of dimension `p` in a product `X_1 × ... × X_k` of finite cubical
//! sets is a product cell together with an affine coordinate map
//! `I^p → I^N`: output coordinate `k` equals input coordinate `coords[k]`.
//! Constant coordinates are pushed into faces on construction, and a cube
//! that ignores an input coordinate is degenerate and read as 0.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::chain::ChainComplex;
use crate::qlinalg::{Matrix, Rational};
use crate::sigma::Permutation;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CubicalError {
    #[error("face ({i}, {eps}) of cell {cell} in dimension {dim} is out of range")]
    FaceRange { dim: usize, cell: usize, i: usize, eps: u8 },
    #[error("cubical identity fails on cell {cell} in dimension {dim} for faces {i} < {j}")]
    Identity { dim: usize, cell: usize, i: usize, j: usize },
}

/// Cells per dimension with face assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalSet {
    pub counts: Vec<usize>,
    /// `faces[dim][cell][2(i-1) + ε]` for `1 ≤ i ≤ dim`.
    pub faces: Vec<Vec<Vec<usize>>>,
}

impl CubicalSet {
    pub fn new(counts: Vec<usize>, faces: Vec<Vec<Vec<usize>>>) -> Result<Self, CubicalError> {
        let s = CubicalSet { counts, faces };
        s.validate()?;
        Ok(s)
    }

    pub fn point() -> Self {
        CubicalSet { counts: vec![1], faces: vec![vec![vec![]]] }
    }

    pub fn interval() -> Self {
        CubicalSet { counts: vec![2, 1], faces: vec![vec![vec![], vec![]], vec![vec![0, 1]]] }
    }

    /// One vertex and one loop.
    pub fn circle() -> Self {
        CubicalSet { counts: vec![1, 1], faces: vec![vec![vec![]], vec![vec![0, 0]]] }
    }

    /// A square with opposite edges identified.
    pub fn torus() -> Self {
        // faces of the square: t1 = ε gives b, t2 = ε gives a
        CubicalSet { counts: vec![1, 2, 1], faces: vec![vec![vec![]], vec![vec![0, 0], vec![0, 0]], vec![vec![1, 1, 0, 0]]] }
    }

    pub fn max_dim(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn face(&self, dim: usize, cell: usize, i: usize, eps: u8) -> usize {
        self.faces[dim][cell][2 * (i - 1) + eps as usize]
    }

    pub fn validate(&self) -> Result<(), CubicalError> {
        for dim in 1..self.counts.len() {
            for cell in 0..self.counts[dim] {
                for i in 1..=dim {
                    for eps in 0..2u8 {
                        let ok = self.faces[dim][cell].get(2 * (i - 1) + eps as usize).is_some_and(|&f| f < self.counts[dim - 1]);
                        if !ok {
                            return Err(CubicalError::FaceRange { dim, cell, i, eps });
                        }
                    }
                }
                // δ_j^η δ_i^ε = δ_i^ε δ_{j-1}^η for i < j
                for j in 2..=dim {
                    for i in 1..j {
                        for (e, h) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                            let a = self.face(dim - 1, self.face(dim, cell, j, h), i, e);
                            let b = self.face(dim - 1, self.face(dim, cell, i, e), j - 1, h);
                            if a != b {
                                return Err(CubicalError::Identity { dim, cell, i, j });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Cellular chains: cells with `d = Σ (-1)^{i+ε} δ_i^ε`.
    pub fn chain_complex(&self) -> ChainComplex {
        let dims = self.counts.iter().enumerate().map(|(d, &n)| (d as i64, n)).collect();
        let mut diffs = BTreeMap::new();
        for dim in 1..self.counts.len() {
            let mut m = Matrix::zeros(self.counts[dim - 1], self.counts[dim]);
            for cell in 0..self.counts[dim] {
                for i in 1..=dim {
                    for eps in 0..2u8 {
                        m.add_at(self.face(dim, cell, i, eps), cell, &face_sign(i, eps));
                    }
                }
            }
            diffs.insert(dim as i64, m);
        }
        ChainComplex::new(dims, diffs).expect("cubical identities give d² = 0")
    }
}

fn face_sign(i: usize, eps: u8) -> Rational {
    Rational::from_integer(if (i + eps as usize) % 2 == 0 { 1.into() } else { (-1).into() })
}

/// An iterated product of cubical sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpace {
    pub factors: Vec<CubicalSet>,
}

impl ProductSpace {
    pub fn of(x: CubicalSet) -> Self {
        ProductSpace { factors: vec![x] }
    }

    pub fn power(x: &CubicalSet, n: usize) -> Self {
        ProductSpace { factors: vec![x.clone(); n] }
    }

    pub fn product(&self, other: &ProductSpace) -> ProductSpace {
        ProductSpace { factors: self.factors.iter().chain(&other.factors).cloned().collect() }
    }

    /// The cube given by a product cell and its identity coordinates.
    pub fn cell(&self, cell: Vec<(usize, usize)>) -> Cube {
        let n = cell.iter().map(|c| c.0).sum();
        Cube { cell, coords: (0..n).collect(), dim: n }
    }

    /// Builds a cube from a product cell and a coordinate map, pushing constants into faces.
    pub fn cube(&self, cell: Vec<(usize, usize)>, coords: Vec<Coord>, dim: usize) -> Cube {
        let mut cell = cell;
        let mut coords = coords;
        while let Some(k) = coords.iter().position(|c| matches!(c, Coord::Const(_))) {
            let Coord::Const(eps) = coords[k] else { unreachable!() };
            let mut local = k;
            for (f, c) in cell.iter_mut().enumerate() {
                if local < c.0 {
                    *c = (c.0 - 1, self.factors[f].face(c.0, c.1, local + 1, eps));
                    break;
                }
                local -= c.0;
            }
            coords.remove(k);
        }
        let coords = coords.into_iter().map(|c| if let Coord::Var(j) = c { j } else { unreachable!() }).collect();
        Cube { cell, coords, dim }
    }

    /// `Σ_{i,ε} (-1)^{i+ε} c ∘ δ_i^ε`.
    pub fn boundary(&self, c: &CubicChain) -> CubicChain {
        let mut out = CubicChain::zero(c.dim.saturating_sub(1));
        if c.dim == 0 {
            return out;
        }
        for (cube, x) in &c.terms {
            for i in 1..=c.dim {
                for eps in 0..2u8 {
                    out.add(self.face_of(cube, i, eps), &(x * face_sign(i, eps)));
                }
            }
        }
        out
    }

    /// `c ∘ δ_i^ε`.
    pub fn face_of(&self, c: &Cube, i: usize, eps: u8) -> Cube {
        let coords = c
            .coords
            .iter()
            .map(|&j| match j.cmp(&(i - 1)) {
                std::cmp::Ordering::Less => Coord::Var(j),
                std::cmp::Ordering::Equal => Coord::Const(eps),
                std::cmp::Ordering::Greater => Coord::Var(j - 1),
            })
            .collect();
        self.cube(c.cell.clone(), coords, c.dim - 1)
    }

    /// All nondegenerate cubes of dimension `p` over cells of dimension at most `max_cell`.
    pub fn cubes(&self, p: usize, max_cell: usize) -> Vec<Cube> {
        let mut cells: Vec<Vec<(usize, usize)>> = vec![vec![]];
        for f in &self.factors {
            cells = cells.into_iter().flat_map(|pre| (0..=f.max_dim()).flat_map(move |d| (0..f.counts[d]).map(move |id| (d, id))).map(move |c| [pre.clone(), vec![c]].concat())).collect();
        }
        let mut out = Vec::new();
        for cell in cells {
            let n: usize = cell.iter().map(|c| c.0).sum();
            if n > max_cell || n < p {
                continue;
            }
            for map in surjections(n, p) {
                out.push(Cube { cell: cell.clone(), coords: map, dim: p });
            }
        }
        out
    }
}

fn surjections(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(k: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            if (0..p).all(|j| cur.contains(&j)) {
                out.push(cur.clone());
            }
            return;
        }
        for j in 0..p {
            cur[k] = j;
            rec(k + 1, p, cur, out);
        }
    }
    rec(0, p, &mut cur, &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    Const(u8),
    Var(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    /// `(dimension, id)` per factor.
    pub cell: Vec<(usize, usize)>,
    pub coords: Vec<usize>,
    pub dim: usize,
}

impl Cube {
    pub fn is_degenerate(&self) -> bool {
        let used: BTreeSet<usize> = self.coords.iter().copied().collect();
        used.len() < self.dim
    }

    /// `c ∘ σ`, with `σ` moving input coordinate `k` to position `σ(k)`.
    pub fn permuted(&self, sigma: &Permutation) -> Cube {
        let inv = sigma.inverse();
        Cube { cell: self.cell.clone(), coords: self.coords.iter().map(|&j| inv.apply(j)).collect(), dim: self.dim }
    }
}

/// A rational combination of nondegenerate cubes of one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicChain {
    pub dim: usize,
    pub terms: BTreeMap<Cube, Rational>,
}

impl CubicChain {
    pub fn zero(dim: usize) -> Self {
        CubicChain { dim, terms: BTreeMap::new() }
    }

    pub fn cube(c: Cube) -> Self {
        let mut out = Self::zero(c.dim);
        out.add(c, &Rational::from_integer(1.into()));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, c: Cube, x: &Rational) {
        if c.is_degenerate() || x.is_zero() {
            return;
        }
        let e = self.terms.entry(c).or_insert_with(Rational::zero);
        *e += x;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn plus(&self, other: &CubicChain, s: &Rational) -> CubicChain {
        let mut out = self.clone();
        for (c, x) in &other.terms {
            out.add(c.clone(), &(x * s));
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> CubicChain {
        CubicChain::zero(self.dim).plus(self, s)
    }
}

/// `c × e`: concatenate cells and coordinates.
pub fn cross(c: &CubicChain, e: &CubicChain) -> CubicChain {
    let mut out = CubicChain::zero(c.dim + e.dim);
    for (a, x) in &c.terms {
        for (b, y) in &e.terms {
            let cell = [a.cell.clone(), b.cell.clone()].concat();
            let coords = a.coords.iter().copied().chain(b.coords.iter().map(|j| j + c.dim)).collect();
            out.add(Cube { cell, coords, dim: c.dim + e.dim }, &(x * y));
        }
    }
    out
}

/// `(1/n!) Σ_σ (-1)^{|σ|} c ∘ σ`.
pub fn alt(c: &CubicChain) -> CubicChain {
    let perms = Permutation::all(c.dim);
    let inv = Rational::new(1.into(), (perms.len() as i64).into());
    let mut out = CubicChain::zero(c.dim);
    for (cube, x) in &c.terms {
        for s in &perms {
            out.add(cube.permuted(s), &(x * &inv * Rational::from_integer(s.sign().into())));
        }
    }
    out
}

/// `κ(c ⊗ e) = Alt(c × e)`.
pub fn kappa(c: &CubicChain, e: &CubicChain) -> CubicChain {
    alt(&cross(c, e))
}

/// Swaps the first `left_factors` factors behind the rest, coordinates included.
pub fn swap_factors(chain: &CubicChain, left_factors: usize) -> CubicChain {
    let mut out = CubicChain::zero(chain.dim);
    for (cube, x) in &chain.terms {
        let (l, r) = cube.cell.split_at(left_factors);
        let ln: usize = l.iter().map(|c| c.0).sum();
        let coords = cube.coords[ln..].iter().chain(&cube.coords[..ln]).copied().collect();
        out.add(Cube { cell: [r, l].concat(), coords, dim: chain.dim }, x);
    }
    out
}

/// `σ_{τ,r,i} = (r,...,n) ∘ τ̄ ∘ (i,...,n)^{-1}` with 1-based `r, i`.
pub fn sigma_tau_r_i(tau: &Permutation, r: usize, i: usize) -> Permutation {
    let n = tau.n() + 1;
    let cycle = |r: usize| {
        let images = (0..n).map(|k| if k + 1 < r { k } else if k + 1 == n { r - 1 } else { k + 1 }).collect();
        Permutation::new(images).expect("cycle")
    };
    let mut bar: Vec<usize> = tau.images().to_vec();
    bar.push(n - 1);
    let bar = Permutation::new(bar).expect("extension");
    cycle(r).compose(&bar).compose(&cycle(i).inverse())
}

/// `σ(t)_m = t_{σ^{-1}(m)}` on symbolic points.
fn act(sigma: &Permutation, t: &[Coord]) -> Vec<Coord> {
    let inv = sigma.inverse();
    (0..t.len()).map(|m| t[inv.apply(m)]).collect()
}

fn insert(t: &[Coord], i: usize, eps: u8) -> Vec<Coord> {
    let mut v = t.to_vec();
    v.insert(i - 1, Coord::Const(eps));
    v
}

/// `σ ∘ δ_i^ε = δ_r^ε ∘ τ` as maps `I^{n-1} → I^n`.
pub fn face_identity(sigma: &Permutation, tau: &Permutation, r: usize, i: usize) -> bool {
    let s: Vec<Coord> = (0..tau.n()).map(Coord::Var).collect();
    (0..2u8).all(|eps| act(sigma, &insert(&s, i, eps)) == insert(&act(tau, &s), r, eps))
}

/// Outcome of [`alt_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AltReport {
    pub max_dim: usize,
    pub cubes: usize,
    pub random_chains: usize,
    pub permutations: usize,
    pub failures: Vec<String>,
}

impl AltReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sample_spaces(max_dim: usize) -> Vec<(String, ProductSpace)> {
    let mut out: Vec<(String, ProductSpace)> = (1..=max_dim).map(|p| (format!("I^{p}"), ProductSpace::power(&CubicalSet::interval(), p))).collect();
    out.push(("S1 x T2".into(), ProductSpace { factors: vec![CubicalSet::circle(), CubicalSet::torus()] }));
    out.push(("I x S1 x I".into(), ProductSpace { factors: vec![CubicalSet::interval(), CubicalSet::circle(), CubicalSet::interval()] }));
    out
}

/// `d ∘ Alt = Alt ∘ d` on every nondegenerate cube of dimension at most
/// `max_dim` in a few product spaces, on `trials` random chains, and the
/// `σ_{τ,r,i}` claims for `n ≤ min(max_dim + 1, 6)`.
pub fn alt_check(max_dim: usize, trials: usize, seed: u64) -> AltReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = AltReport { max_dim, ..Default::default() };
    let mut pools: Vec<(String, ProductSpace, Vec<Cube>)> = Vec::new();
    for (name, s) in sample_spaces(max_dim) {
        let top: usize = s.factors.iter().map(CubicalSet::max_dim).sum();
        for p in 1..=max_dim.min(top) {
            let cubes = s.cubes(p, p);
            for c in &cubes {
                let c = CubicChain::cube(c.clone());
                report.cubes += 1;
                if s.boundary(&alt(&c)) != alt(&s.boundary(&c)) {
                    report.failures.push(format!("{name}: d Alt != Alt d on {:?}", c.terms.keys().next()));
                }
            }
            if !cubes.is_empty() {
                pools.push((name.clone(), s.clone(), cubes));
            }
        }
    }
    for _ in 0..trials {
        if pools.is_empty() {
            break;
        }
        let (name, s, cubes) = &pools[rng.gen_range(0..pools.len())];
        let mut c = CubicChain::zero(cubes[0].dim);
        for _ in 0..rng.gen_range(1..=4) {
            let x = Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into());
            c.add(cubes[rng.gen_range(0..cubes.len())].clone(), &x);
        }
        report.random_chains += 1;
        if s.boundary(&alt(&c)) != alt(&s.boundary(&c)) {
            report.failures.push(format!("{name}: d Alt != Alt d on a random chain"));
        }
    }
    for n in 1..=(max_dim + 1).min(6) {
        let all_n = Permutation::all(n);
        let mut seen = BTreeSet::new();
        for tau in Permutation::all(n - 1) {
            for r in 1..=n {
                for i in 1..=n {
                    report.permutations += 1;
                    let s = sigma_tau_r_i(&tau, r, i);
                    if !face_identity(&s, &tau, r, i) {
                        report.failures.push(format!("n = {n}: face identity fails for {tau:?}, r = {r}, i = {i}"));
                    }
                    if (s.inversions() + i + tau.inversions() + r) % 2 != 0 {
                        report.failures.push(format!("n = {n}: sign identity fails for {tau:?}, r = {r}, i = {i}"));
                    }
                    if all_n.iter().filter(|t| face_identity(t, &tau, r, i)).count() != 1 {
                        report.failures.push(format!("n = {n}: solution not unique for {tau:?}, r = {r}, i = {i}"));
                    }
                    seen.insert((s.images().to_vec(), i));
                }
            }
        }
        if seen.len() != all_n.len() * n {
            report.failures.push(format!("n = {n}: (tau, r, i) -> (sigma, i) is not a bijection"));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology;
    use crate::qlinalg::{q, qf};

    fn unit_cube(p: usize) -> (ProductSpace, CubicChain) {
        let s = ProductSpace::power(&CubicalSet::interval(), p);
        let c = s.cell(vec![(1, 0); p]);
        (s, CubicChain::cube(c))
    }

    #[test]
    fn boundary_of_low_cubes() {
        let s = ProductSpace::of(CubicalSet::interval());
        assert!(s.boundary(&CubicChain::cube(s.cell(vec![(0, 0)]))).is_zero());
        let d = s.boundary(&CubicChain::cube(s.cell(vec![(1, 0)])));
        // (-1)^{1+0} at t = 0 and (-1)^{1+1} at t = 1
        assert_eq!(d.terms[&s.cell(vec![(0, 0)])], q(-1));
        assert_eq!(d.terms[&s.cell(vec![(0, 1)])], q(1));
        let (sq, c) = unit_cube(2);
        let d = sq.boundary(&c);
        assert_eq!(d.terms.len(), 4);
        assert!(sq.boundary(&d).is_zero());
        // hand expansion: -δ_1^0 + δ_1^1 + δ_2^0 - δ_2^1
        let e = |a, b| sq.cell(vec![a, b]);
        assert_eq!(d.terms[&e((0, 0), (1, 0))], q(-1));
        assert_eq!(d.terms[&e((0, 1), (1, 0))], q(1));
        assert_eq!(d.terms[&e((1, 0), (0, 0))], q(1));
        assert_eq!(d.terms[&e((1, 0), (0, 1))], q(-1));
    }

    #[test]
    fn cross_has_unit_and_leibniz() {
        let x = ProductSpace::of(CubicalSet::interval());
        let pt = CubicChain::cube(ProductSpace::of(CubicalSet::point()).cell(vec![(0, 0)]));
        let c = CubicChain::cube(x.cell(vec![(1, 0)]));
        let pc = cross(&pt, &c);
        assert_eq!(pc.terms.len(), 1);
        assert_eq!(pc.terms.keys().next().unwrap().coords, vec![0]);
        let (s2, sq) = unit_cube(2);
        let xs = x.product(&s2);
        let ce = cross(&c, &sq);
        let lhs = xs.boundary(&ce);
        let rhs = cross(&x.boundary(&c), &sq).plus(&cross(&c, &s2.boundary(&sq)), &q(-1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn alt_in_low_dimensions() {
        let x = ProductSpace::of(CubicalSet::interval());
        let c = CubicChain::cube(x.cell(vec![(1, 0)]));
        assert_eq!(alt(&c), c);
        let (_, sq) = unit_cube(2);
        let swap = Permutation::adjacent(2, 0);
        let swapped = CubicChain::cube(sq.terms.keys().next().unwrap().permuted(&swap));
        assert_eq!(alt(&sq), sq.plus(&swapped, &q(-1)).scale(&qf(1, 2)));
        assert_eq!(alt(&alt(&sq)), alt(&sq));
        let degenerate = Cube { cell: vec![(1, 0), (0, 0)], coords: vec![0], dim: 2 };
        assert!(degenerate.is_degenerate());
        assert!(alt(&CubicChain { dim: 2, terms: BTreeMap::from([(degenerate, q(1))]) }).is_zero());
    }

    #[test]
    fn alt_commutes_with_d_up_to_dimension_five() {
        for p in 1..=5 {
            let s = ProductSpace::power(&CubicalSet::interval(), p);
            for cube in s.cubes(p, p) {
                let c = CubicChain::cube(cube);
                assert_eq!(s.boundary(&alt(&c)), alt(&s.boundary(&c)), "dimension {p}");
            }
        }
        // cubes through a diagonal
        let s = ProductSpace::power(&CubicalSet::interval(), 3);
        for cube in s.cubes(2, 3) {
            let c = CubicChain::cube(cube);
            assert_eq!(s.boundary(&alt(&c)), alt(&s.boundary(&c)));
        }
    }

    #[test]
    fn kappa_symmetry_and_associativity() {
        let x = ProductSpace::of(CubicalSet::interval());
        let a = CubicChain::cube(x.cell(vec![(1, 0)]));
        let pt = CubicChain::cube(ProductSpace::of(CubicalSet::point()).cell(vec![(0, 0)]));
        assert_eq!(kappa(&pt, &a), cross(&pt, &a));
        let (_, sq) = unit_cube(2);
        let ab = kappa(&a, &sq);
        let ba = kappa(&sq, &a);
        // (-1)^{pq} with p = 1, q = 2
        assert_eq!(swap_factors(&ab, 1), ba);
        let aa = kappa(&a, &a);
        assert_eq!(swap_factors(&aa, 1), aa.scale(&q(-1)));
        let c = CubicChain::cube(x.cell(vec![(1, 0)])).plus(&CubicChain::cube(x.cell(vec![(0, 1)])), &q(3));
        assert_eq!(kappa(&kappa(&a, &sq), &c), kappa(&a, &kappa(&sq, &c)));
    }

    #[test]
    fn sigma_tau_r_i_claim() {
        for n in 1..=6 {
            let all_n = Permutation::all(n);
            let mut seen = BTreeSet::new();
            for tau in Permutation::all(n - 1) {
                for r in 1..=n {
                    for i in 1..=n {
                        let s = sigma_tau_r_i(&tau, r, i);
                        assert!(face_identity(&s, &tau, r, i));
                        let parity = (s.inversions() + i + tau.inversions() + r) % 2;
                        assert_eq!(parity, 0);
                        assert!(seen.insert((s.images().to_vec(), i)));
                        assert_eq!(all_n.iter().filter(|t| face_identity(t, &tau, r, i)).count(), 1);
                    }
                }
            }
            assert_eq!(seen.len(), all_n.len() * n);
        }
    }

    #[test]
    fn alt_check_report() {
        let r = alt_check(3, 20, 7);
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.random_chains, 20);
        assert_eq!(r, alt_check(3, 20, 7));
        assert_eq!(r.permutations, 1 + 4 + 2 * 9 + 6 * 16);
    }

    #[test]
    fn identity_tau_with_equal_indices() {
        for n in 1..=4 {
            for i in 1..=n {
                assert!(sigma_tau_r_i(&Permutation::identity(n - 1), i, i).is_identity());
            }
        }
    }

    #[test]
    fn homology_of_small_models() {
        assert_eq!(homology(&CubicalSet::interval().chain_complex()).dims(), BTreeMap::from([(0, 1)]));
        let t = CubicalSet::torus();
        t.validate().unwrap();
        assert_eq!(homology(&t.chain_complex()).dims(), BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        assert_eq!(homology(&CubicalSet::circle().chain_complex()).dims(), BTreeMap::from([(0, 1), (1, 1)]));
        let bad = CubicalSet { counts: vec![2, 1, 1], faces: vec![vec![vec![]; 2], vec![vec![0, 1]], vec![vec![0, 0, 0, 0]]] };
        assert!(bad.validate().is_err());
    }
}
