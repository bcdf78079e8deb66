//! Finite chain complexes of rational vector spaces, differential of degree -1.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::qlinalg::{kernel, q, solve, sv_from_dense, sv_unit, Echelon, Matrix, NoSolution, Rational, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("differential d_{degree} has shape {got:?}, expected {expected:?}")]
    Shape { degree: i64, got: (usize, usize), expected: (usize, usize) },
    #[error("d o d is nonzero starting from degree {degree}")]
    NotSquareZero { degree: i64 },
    #[error("chain map component in degree {degree} has shape {got:?}, expected {expected:?}")]
    MapShape { degree: i64, got: (usize, usize), expected: (usize, usize) },
    #[error("map does not commute with differentials in degree {degree}")]
    NotChainMap { degree: i64 },
}

/// Graded space with dims per degree and `d_i : C_i -> C_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChainComplex {
    dims: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, Matrix>,
}

impl ChainComplex {
    pub fn new(dims: BTreeMap<i64, usize>, diffs: BTreeMap<i64, Matrix>) -> Result<Self, ChainError> {
        let dims: BTreeMap<i64, usize> = dims.into_iter().filter(|&(_, d)| d > 0).collect();
        let dim = |i: i64| dims.get(&i).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (i, m) in diffs {
            let expected = (dim(i - 1), dim(i));
            if (m.rows(), m.cols()) != expected {
                return Err(ChainError::Shape { degree: i, got: (m.rows(), m.cols()), expected });
            }
            if !m.is_zero() {
                kept.insert(i, m);
            }
        }
        let c = ChainComplex { dims, diffs: kept };
        for (&i, m) in &c.diffs {
            if let Some(prev) = c.diffs.get(&(i - 1)) {
                if !prev.mul(m).is_zero() {
                    return Err(ChainError::NotSquareZero { degree: i });
                }
            }
        }
        Ok(c)
    }

    /// Complex with zero differential.
    pub fn graded(dims: impl IntoIterator<Item = (i64, usize)>) -> Self {
        Self::new(dims.into_iter().collect(), BTreeMap::new()).unwrap()
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// One-dimensional complex in degree 0.
    pub fn unit() -> Self {
        Self::graded([(0, 1)])
    }

    pub fn dim(&self, i: i64) -> usize {
        self.dims.get(&i).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Degrees with nonzero dimension, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        self.dims.keys().copied().collect()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.dims.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.dims.keys().next_back().copied()
    }

    /// `d_i : C_i -> C_{i-1}`.
    pub fn d(&self, i: i64) -> Matrix {
        self.diffs.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(i - 1), self.dim(i)))
    }

    pub fn nonzero_diffs(&self) -> &BTreeMap<i64, Matrix> {
        &self.diffs
    }

    pub fn has_zero_differential(&self) -> bool {
        self.diffs.is_empty()
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let mut dims = self.dims.clone();
        for (&i, &d) in &other.dims {
            *dims.entry(i).or_insert(0) += d;
        }
        let mut diffs = BTreeMap::new();
        for &i in dims.keys() {
            diffs.insert(i, self.d(i).block_diag(&other.d(i)));
        }
        ChainComplex::new(dims, diffs).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    comps: BTreeMap<i64, Matrix>,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, comps: BTreeMap<i64, Matrix>) -> Result<Self, ChainError> {
        let f = Self::new_unchecked(source, target, comps)?;
        f.check_commutes()?;
        Ok(f)
    }

    /// Shape-checked but without the commutation check, for graded maps.
    pub fn new_unchecked(source: ChainComplex, target: ChainComplex, comps: BTreeMap<i64, Matrix>) -> Result<Self, ChainError> {
        let mut kept = BTreeMap::new();
        for (i, m) in comps {
            let expected = (target.dim(i), source.dim(i));
            if (m.rows(), m.cols()) != expected {
                return Err(ChainError::MapShape { degree: i, got: (m.rows(), m.cols()), expected });
            }
            if !m.is_zero() {
                kept.insert(i, m);
            }
        }
        Ok(ChainMap { source, target, comps: kept })
    }

    pub fn check_commutes(&self) -> Result<(), ChainError> {
        for i in self.degree_range() {
            let lhs = self.target.d(i).mul(&self.comp(i));
            let rhs = self.comp(i - 1).mul(&self.source.d(i));
            if lhs != rhs {
                return Err(ChainError::NotChainMap { degree: i });
            }
        }
        Ok(())
    }

    pub fn is_chain_map(&self) -> bool {
        self.check_commutes().is_ok()
    }

    fn degree_range(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.source.degrees();
        ds.extend(self.target.degrees());
        ds.extend(self.target.degrees().iter().map(|i| i + 1));
        ds.sort();
        ds.dedup();
        ds
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let comps = c.dims.iter().map(|(&i, &d)| (i, Matrix::identity(d))).collect();
        ChainMap { source: c.clone(), target: c.clone(), comps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), comps: BTreeMap::new() }
    }

    pub fn comp(&self, i: i64) -> Matrix {
        self.comps.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(self.target.dim(i), self.source.dim(i)))
    }

    pub fn components(&self) -> &BTreeMap<i64, Matrix> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ChainMap) -> ChainMap {
        let comps = other.source.degrees().into_iter().map(|i| (i, self.comp(i).mul(&other.comp(i)))).collect();
        Self::new_unchecked(other.source.clone(), self.target.clone(), comps).unwrap()
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        let comps = self.source.degrees().into_iter().map(|i| (i, self.comp(i).add(&other.comp(i)))).collect();
        Self::new_unchecked(self.source.clone(), self.target.clone(), comps).unwrap()
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, s: &Rational) -> ChainMap {
        let comps = self.comps.iter().map(|(&i, m)| (i, m.scale(s))).collect();
        Self::new_unchecked(self.source.clone(), self.target.clone(), comps).unwrap()
    }

    /// `H_i(f)` in the homology bases of source and target.
    pub fn on_homology(&self, hs: &HomologyRecord, ht: &HomologyRecord, i: i64) -> Matrix {
        let s = hs.degree(i);
        let t = ht.degree(i);
        t.proj.mul(&self.comp(i)).mul(&s.reps)
    }

    pub fn is_weak_equivalence(&self) -> bool {
        let hs = homology(&self.source);
        let ht = homology(&self.target);
        let mut ds = hs.support();
        ds.extend(ht.support());
        ds.into_iter().all(|i| {
            let m = self.on_homology(&hs, &ht, i);
            m.is_square() && m.rank() == m.rows()
        })
    }
}

impl std::hash::Hash for ChainMap {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.comps.hash(state);
    }
}

/// Homology in one degree, with a deterministic section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyDegree {
    pub dim: usize,
    pub cycles: Subspace,
    pub boundaries: Subspace,
    /// Columns are cycle representatives of a homology basis.
    pub reps: Matrix,
    /// Sends a cycle to its homology class coordinates.
    pub proj: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomologyRecord {
    degrees: BTreeMap<i64, HomologyDegree>,
}

impl HomologyRecord {
    pub fn degree(&self, i: i64) -> HomologyDegree {
        self.degrees.get(&i).cloned().unwrap_or_else(|| HomologyDegree {
            dim: 0,
            cycles: Subspace::zero(0),
            boundaries: Subspace::zero(0),
            reps: Matrix::zeros(0, 0),
            proj: Matrix::zeros(0, 0),
        })
    }

    pub fn dim(&self, i: i64) -> usize {
        self.degrees.get(&i).map_or(0, |h| h.dim)
    }

    /// Degrees with nonzero homology.
    pub fn support(&self) -> Vec<i64> {
        self.degrees.iter().filter(|(_, h)| h.dim > 0).map(|(&i, _)| i).collect()
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.degrees.iter().filter(|(_, h)| h.dim > 0).map(|(&i, h)| (i, h.dim)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(|h| h.dim).sum()
    }

    /// Homology as a complex with zero differential.
    pub fn as_complex(&self) -> ChainComplex {
        ChainComplex::graded(self.dims())
    }
}

/// Chooses representatives greedily: cycle basis vectors that are independent modulo boundaries.
fn homology_degree(c: &ChainComplex, i: i64) -> HomologyDegree {
    let n = c.dim(i);
    let cycles = kernel(&c.d(i));
    let boundaries = Subspace::column_space(&c.d(i + 1));
    let mut ech = Echelon::new();
    for b in boundaries.basis() {
        ech.insert(&sv_from_dense(b));
    }
    let mut reps = Vec::new();
    let mut rep_ids = Vec::new();
    for z in cycles.basis() {
        if let Some(id) = ech.insert(&sv_from_dense(z)) {
            reps.push(z.clone());
            rep_ids.push(id);
        }
    }
    for j in 0..n {
        ech.insert(&sv_unit(j));
    }
    let h = reps.len();
    let mut proj = Matrix::zeros(h, n);
    for j in 0..n {
        let coords = ech.coordinates(&sv_unit(j)).expect("extended to a basis");
        for (r, id) in rep_ids.iter().enumerate() {
            if let Some(x) = coords.get(id) {
                proj.set(r, j, x.clone());
            }
        }
    }
    HomologyDegree { dim: h, cycles, boundaries, reps: Matrix::from_cols(n, &reps), proj }
}

pub fn homology(c: &ChainComplex) -> HomologyRecord {
    let degrees = c.degrees().into_iter().map(|i| (i, homology_degree(c, i))).collect();
    HomologyRecord { degrees }
}

pub fn is_acyclic(c: &ChainComplex) -> bool {
    homology(c).total_dim() == 0
}

/// `A[n]_i = A_{i-n}` with differential `(-1)^n d_A`.
pub fn shift(c: &ChainComplex, n: i64) -> ChainComplex {
    let sign = if n.rem_euclid(2) == 0 { q(1) } else { q(-1) };
    let dims = c.dims.iter().map(|(&i, &d)| (i + n, d)).collect();
    let diffs = c.diffs.iter().map(|(&i, m)| (i + n, m.scale(&sign))).collect();
    ChainComplex::new(dims, diffs).unwrap()
}

/// Componentwise shift of a map; components are unchanged.
pub fn shift_map(f: &ChainMap, n: i64) -> ChainMap {
    let comps = f.comps.iter().map(|(&i, m)| (i + n, m.clone())).collect();
    ChainMap::new_unchecked(shift(&f.source, n), shift(&f.target, n), comps).unwrap()
}

#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: ChainComplex,
    /// `A -> Cη`.
    pub inclusion: ChainMap,
    /// `Cη -> B[1]`.
    pub projection: ChainMap,
}

/// Cone of `η : B -> A`: `(Cη)_i = A_i ⊕ B_{i-1}`, `d(a,b) = (d_A a + η b, -d_B b)`.
pub fn mapping_cone(eta: &ChainMap) -> Cone {
    let a = &eta.target;
    let b = &eta.source;
    let mut degs: Vec<i64> = a.degrees();
    degs.extend(b.degrees().iter().map(|i| i + 1));
    degs.sort();
    degs.dedup();
    let dims: BTreeMap<i64, usize> = degs.iter().map(|&i| (i, a.dim(i) + b.dim(i - 1))).collect();
    let mut diffs = BTreeMap::new();
    for &i in &degs {
        let (ai, bi) = (a.dim(i), b.dim(i - 1));
        let (aj, bj) = (a.dim(i - 1), b.dim(i - 2));
        let mut m = Matrix::zeros(aj + bj, ai + bi);
        m.put_block(0, 0, &a.d(i));
        m.put_block(0, ai, &eta.comp(i - 1));
        m.put_block(aj, ai, &b.d(i - 1).neg());
        diffs.insert(i, m);
    }
    let complex = ChainComplex::new(dims, diffs).expect("cone differential squares to zero");
    let b1 = shift(b, 1);
    let mut inc = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for &i in &degs {
        let (ai, bi) = (a.dim(i), b.dim(i - 1));
        let mut m = Matrix::zeros(ai + bi, ai);
        m.put_block(0, 0, &Matrix::identity(ai));
        inc.insert(i, m);
        let mut p = Matrix::zeros(bi, ai + bi);
        p.put_block(0, ai, &Matrix::identity(bi));
        proj.insert(i, p);
    }
    let inclusion = ChainMap::new(a.clone(), complex.clone(), inc).unwrap();
    let projection = ChainMap::new(complex.clone(), b1, proj).unwrap();
    Cone { complex, inclusion, projection }
}

/// `τ_{≥n} C = Z_n ⊕ ⊕_{i>n} C_i`, with its inclusion into `C`.
pub fn canonical_truncation(c: &ChainComplex, n: i64) -> (ChainComplex, ChainMap) {
    let z = kernel(&c.d(n));
    let zb = z.basis_matrix();
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut inc = BTreeMap::new();
    dims.insert(n, z.dim());
    inc.insert(n, zb.clone());
    for i in c.degrees().into_iter().filter(|&i| i > n) {
        dims.insert(i, c.dim(i));
        inc.insert(i, Matrix::identity(c.dim(i)));
        if i == n + 1 {
            let d = c.d(i);
            let cols: Vec<Vec<Rational>> =
                d.columns().iter().map(|v| z.coordinates(v).expect("boundary is a cycle")).collect();
            diffs.insert(i, Matrix::from_cols(z.dim(), &cols));
        } else {
            diffs.insert(i, c.d(i));
        }
    }
    let t = ChainComplex::new(dims, diffs).unwrap();
    let inc = ChainMap::new(t.clone(), c.clone(), inc).unwrap();
    (t, inc)
}

/// Basis bookkeeping for `(X ⊗ Y)_n = ⊕_{i+j=n} X_i ⊗ Y_j`.
#[derive(Clone, Debug)]
pub struct TensorLayout {
    /// Per total degree: list of (i, j, offset) blocks, ordered by `i`.
    blocks: BTreeMap<i64, Vec<(i64, i64, usize)>>,
    xdims: BTreeMap<i64, usize>,
    ydims: BTreeMap<i64, usize>,
}

impl TensorLayout {
    pub fn new(x: &ChainComplex, y: &ChainComplex) -> Self {
        let mut blocks: BTreeMap<i64, Vec<(i64, i64, usize)>> = BTreeMap::new();
        let mut sizes: BTreeMap<i64, usize> = BTreeMap::new();
        for (&i, &dx) in x.dims() {
            for (&j, &dy) in y.dims() {
                let off = sizes.entry(i + j).or_insert(0);
                blocks.entry(i + j).or_default().push((i, j, *off));
                *off += dx * dy;
            }
        }
        TensorLayout { blocks, xdims: x.dims.clone(), ydims: y.dims.clone() }
    }

    /// Index of `x_a ⊗ y_b` with `x_a ∈ X_i`, `y_b ∈ Y_j` in degree `i + j`.
    pub fn index(&self, i: i64, a: usize, j: i64, b: usize) -> usize {
        let off = self.blocks[&(i + j)].iter().find(|blk| blk.0 == i).expect("block present").2;
        off + a * self.ydims[&j] + b
    }

    pub fn dim(&self, n: i64) -> usize {
        self.blocks.get(&n).map_or(0, |bs| bs.iter().map(|&(i, j, _)| self.xdims[&i] * self.ydims[&j]).sum())
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.blocks.keys().map(|&n| (n, self.dim(n))).collect()
    }

    /// All basis elements of degree `n` as `(i, a, j, b)` in index order.
    pub fn basis(&self, n: i64) -> Vec<(i64, usize, i64, usize)> {
        let mut out = Vec::new();
        if let Some(bs) = self.blocks.get(&n) {
            for &(i, j, _) in bs {
                for a in 0..self.xdims[&i] {
                    for b in 0..self.ydims[&j] {
                        out.push((i, a, j, b));
                    }
                }
            }
        }
        out
    }
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// Tensor product with the Leibniz differential `d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db`.
pub fn tensor(x: &ChainComplex, y: &ChainComplex) -> ChainComplex {
    let lay = TensorLayout::new(x, y);
    let dims = lay.dims();
    let mut diffs = BTreeMap::new();
    for &n in dims.keys() {
        let mut m = Matrix::zeros(lay.dim(n - 1), lay.dim(n));
        for (col, (i, a, j, b)) in lay.basis(n).into_iter().enumerate() {
            let dx = x.d(i);
            for r in 0..x.dim(i - 1) {
                let c = dx.get(r, a);
                if !c.is_zero() {
                    m.add_at(lay.index(i - 1, r, j, b), col, c);
                }
            }
            let dy = y.d(j);
            let s = sign(i);
            for r in 0..y.dim(j - 1) {
                let c = dy.get(r, b);
                if !c.is_zero() {
                    m.add_at(lay.index(i, a, j - 1, r), col, &(c * &s));
                }
            }
        }
        diffs.insert(n, m);
    }
    ChainComplex::new(dims, diffs).expect("Leibniz differential squares to zero")
}

/// Iterated tensor product `((c_0 ⊗ c_1) ⊗ ...)`; the empty product is the unit.
pub fn tensor_all(cs: &[ChainComplex]) -> ChainComplex {
    let mut acc = ChainComplex::unit();
    for c in cs {
        acc = tensor(&acc, c);
    }
    acc
}

/// Tensor product of degree-0 maps, `(f⊗g)(a⊗b) = f(a)⊗g(b)`.
pub fn tensor_maps(f: &ChainMap, g: &ChainMap) -> ChainMap {
    let src = tensor(&f.source, &g.source);
    let tgt = tensor(&f.target, &g.target);
    let ls = TensorLayout::new(&f.source, &g.source);
    let lt = TensorLayout::new(&f.target, &g.target);
    let mut comps = BTreeMap::new();
    for &n in src.dims().keys() {
        let mut m = Matrix::zeros(tgt.dim(n), src.dim(n));
        for (col, (i, a, j, b)) in ls.basis(n).into_iter().enumerate() {
            let fi = f.comp(i);
            let gj = g.comp(j);
            for r in 0..f.target.dim(i) {
                let c1 = fi.get(r, a);
                if c1.is_zero() {
                    continue;
                }
                for s in 0..g.target.dim(j) {
                    let c2 = gj.get(s, b);
                    if !c2.is_zero() {
                        m.add_at(lt.index(i, r, j, s), col, &(c1 * c2));
                    }
                }
            }
        }
        comps.insert(n, m);
    }
    ChainMap::new_unchecked(src, tgt, comps).unwrap()
}

/// Symmetry `x⊗y -> y⊗x`, `a⊗b ↦ (-1)^{|a||b|} b⊗a`.
pub fn tensor_symmetry(x: &ChainComplex, y: &ChainComplex) -> ChainMap {
    let src = tensor(x, y);
    let tgt = tensor(y, x);
    let ls = TensorLayout::new(x, y);
    let lt = TensorLayout::new(y, x);
    let mut comps = BTreeMap::new();
    for &n in src.dims().keys() {
        let mut m = Matrix::zeros(tgt.dim(n), src.dim(n));
        for (col, (i, a, j, b)) in ls.basis(n).into_iter().enumerate() {
            m.set(lt.index(j, b, i, a), col, sign(i * j));
        }
        comps.insert(n, m);
    }
    ChainMap::new(src, tgt, comps).expect("symmetry is a chain map")
}

/// Finds `h` of degree +1 with `f - g = d h + h d`, by one linear solve.
pub fn homotopy_solve(f: &ChainMap, g: &ChainMap) -> Result<BTreeMap<i64, Matrix>, NoSolution> {
    let c = &f.source;
    let d = &f.target;
    let diff = f.sub(g);
    // unknowns: h_i : C_i -> D_{i+1}, row-major
    let mut offsets = BTreeMap::new();
    let mut nvars = 0;
    for i in c.degrees() {
        offsets.insert(i, nvars);
        nvars += d.dim(i + 1) * c.dim(i);
    }
    let mut eq_degrees: Vec<i64> = c.degrees();
    eq_degrees.retain(|&i| d.dim(i) > 0);
    let neqs: usize = eq_degrees.iter().map(|&i| d.dim(i) * c.dim(i)).sum();
    let mut a = Matrix::zeros(neqs, nvars);
    let mut rhs = vec![Rational::zero(); neqs];
    let mut row = 0;
    for &i in &eq_degrees {
        let (di, ci) = (d.dim(i), c.dim(i));
        let dd = d.d(i + 1); // D_{i+1} -> D_i
        let dc = c.d(i); // C_i -> C_{i-1}
        let delta = diff.comp(i);
        for r in 0..di {
            for s in 0..ci {
                rhs[row] = delta.get(r, s).clone();
                // (d h_i)[r,s] = Σ_k dd[r,k] h_i[k,s]
                if let Some(&off) = offsets.get(&i) {
                    for k in 0..d.dim(i + 1) {
                        let v = dd.get(r, k);
                        if !v.is_zero() {
                            a.add_at(row, off + k * ci + s, v);
                        }
                    }
                }
                // (h_{i-1} d)[r,s] = Σ_k h_{i-1}[r,k] dc[k,s]
                if let Some(&off) = offsets.get(&(i - 1)) {
                    let cprev = c.dim(i - 1);
                    for k in 0..cprev {
                        let v = dc.get(k, s);
                        if !v.is_zero() {
                            a.add_at(row, off + r * cprev + k, v);
                        }
                    }
                }
                row += 1;
            }
        }
    }
    let x = solve(&a, &rhs)?;
    let mut h = BTreeMap::new();
    for i in c.degrees() {
        let (rows, cols) = (d.dim(i + 1), c.dim(i));
        let off = offsets[&i];
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for s in 0..cols {
                m.set(r, s, x[off + r * cols + s].clone());
            }
        }
        h.insert(i, m);
    }
    Ok(h)
}

/// Checks `f - g = d h + h d` in every degree.
pub fn is_homotopy(f: &ChainMap, g: &ChainMap, h: &BTreeMap<i64, Matrix>) -> bool {
    let c = &f.source;
    let d = &f.target;
    let hc = |i: i64| h.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(d.dim(i + 1), c.dim(i)));
    c.degrees().into_iter().all(|i| {
        let lhs = f.comp(i).sub(&g.comp(i));
        let rhs = d.d(i + 1).mul(&hc(i)).add(&hc(i - 1).mul(&c.d(i)));
        lhs == rhs
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term(m: Matrix) -> ChainComplex {
        // C_1 -> C_0
        let dims = [(0, m.rows()), (1, m.cols())].into_iter().collect();
        ChainComplex::new(dims, [(1, m)].into_iter().collect()).unwrap()
    }

    #[test]
    fn invalid_complex_rejected() {
        let dims = [(0, 1), (1, 1), (2, 1)].into_iter().collect();
        let diffs = [(1, Matrix::identity(1)), (2, Matrix::identity(1))].into_iter().collect();
        assert_eq!(ChainComplex::new(dims, diffs), Err(ChainError::NotSquareZero { degree: 2 }));
    }

    #[test]
    fn homology_examples() {
        let g = ChainComplex::graded([(0, 2), (3, 1)]);
        assert_eq!(homology(&g).dims(), g.dims().clone());
        let c = two_term(Matrix::from_i64(&[&[2]]));
        assert_eq!(homology(&c).total_dim(), 0);
        let cone = mapping_cone(&ChainMap::identity(&g));
        assert!(is_acyclic(&cone.complex));
    }

    #[test]
    fn homology_section_is_a_section() {
        let c = two_term(Matrix::from_i64(&[&[1, 1, 0], &[0, 0, 0]]));
        let h = homology(&c);
        for i in [0, 1] {
            let hd = h.degree(i);
            assert_eq!(hd.proj.mul(&hd.reps), Matrix::identity(hd.dim));
        }
        assert_eq!(h.dims(), [(0, 1), (1, 2)].into_iter().collect());
    }

    #[test]
    fn shift_examples() {
        let c = two_term(Matrix::from_i64(&[&[3]]));
        assert_eq!(shift(&c, 0), c);
        let g = ChainComplex::graded([(0, 2)]);
        assert_eq!(shift(&g, 1).degrees(), vec![1]);
        assert_eq!(shift(&shift(&c, 1), 1), shift(&c, 2));
        assert_eq!(shift(&c, 1).d(2), Matrix::from_i64(&[&[-3]]));
    }

    #[test]
    fn cone_examples() {
        let a = ChainComplex::graded([(0, 1)]);
        let b = ChainComplex::graded([(0, 2), (1, 1)]);
        let cone = mapping_cone(&ChainMap::zero(&b, &a));
        let h = homology(&cone.complex);
        assert_eq!(h.dims(), [(0, 1), (1, 2), (2, 1)].into_iter().collect());
        let eta = ChainMap::new(a.clone(), a.clone(), [(0, Matrix::from_i64(&[&[2]]))].into_iter().collect()).unwrap();
        assert!(is_acyclic(&mapping_cone(&eta).complex));
    }

    #[test]
    fn truncation_examples() {
        let g = ChainComplex::graded([(-1, 1), (0, 2), (2, 1)]);
        let (t, inc) = canonical_truncation(&g, 0);
        assert_eq!(t.dims(), &[(0, 2), (2, 1)].into_iter().collect());
        assert!(inc.is_chain_map());
        let iso = two_term(Matrix::identity(1));
        assert!(canonical_truncation(&iso, 1).0.is_zero());
        let c = two_term(Matrix::from_i64(&[&[1, 0]]));
        assert_eq!(canonical_truncation(&c, -5).0, c);
    }

    #[test]
    fn truncation_homology_agrees_above() {
        let c = ChainComplex::new(
            [(0, 1), (1, 2), (2, 1)].into_iter().collect(),
            [(1, Matrix::from_i64(&[&[1, 0]])), (2, Matrix::from_i64(&[&[0], &[1]]))].into_iter().collect(),
        )
        .unwrap();
        let (t, inc) = canonical_truncation(&c, 1);
        let ht = homology(&t);
        let hc = homology(&c);
        for i in 1..=2 {
            assert_eq!(ht.dim(i), hc.dim(i));
            let m = inc.on_homology(&ht, &hc, i);
            assert_eq!(m.rank(), hc.dim(i));
        }
        assert_eq!(ht.dim(0), 0);
    }

    #[test]
    fn tensor_examples() {
        let u = ChainComplex::unit();
        let c = two_term(Matrix::from_i64(&[&[1, 2]]));
        assert_eq!(tensor(&u, &c), c);
        let x = ChainComplex::graded([(0, 1), (1, 1)]);
        assert_eq!(tensor(&x, &x).dims(), &[(0, 1), (1, 2), (2, 1)].into_iter().collect());
    }

    #[test]
    fn symmetry_is_involution() {
        let x = ChainComplex::new(
            [(0, 1), (1, 1)].into_iter().collect(),
            [(1, Matrix::identity(1))].into_iter().collect(),
        )
        .unwrap();
        let y = ChainComplex::graded([(1, 2), (2, 1)]);
        let s = tensor_symmetry(&x, &y);
        let t = tensor_symmetry(&y, &x);
        assert_eq!(t.compose(&s), ChainMap::identity(&tensor(&x, &y)));
    }

    #[test]
    fn homotopy_examples() {
        let c = two_term(Matrix::identity(1));
        let f = ChainMap::identity(&c);
        let h = homotopy_solve(&f, &f).unwrap();
        assert!(h.values().all(Matrix::is_zero));
        // identity on a contractible complex is null-homotopic
        let z = ChainMap::zero(&c, &c);
        let h = homotopy_solve(&f, &z).unwrap();
        assert!(is_homotopy(&f, &z, &h));
        let g = ChainComplex::graded([(0, 1)]);
        assert_eq!(homotopy_solve(&ChainMap::identity(&g), &ChainMap::zero(&g, &g)), Err(NoSolution));
    }
}
