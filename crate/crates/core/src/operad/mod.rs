//! Dg pseudo-operads and modular operads over the rationals.
//!
//! Both kinds share one representation. Components are indexed by
//! `(g, l)`; plain operads use `g = 0` and `l` = arity, modular operads
//! use genus and number of legs. Every component has a flat graded
//! basis; structure maps are sparse tables on basis pairs.
//!
//! Conventions (0-based):
//! * right actions: `x·σ` gives leaf `j` of `x` the label `σ⁻¹(j)`;
//! * plain `a ∘_i b` plugs `b` into input `i`; inputs of `b` land at
//!   `i..i+m`, later inputs of `a` shift by `m-1`;
//! * modular `a ∘_i b` glues leg `i` of `a` to leg `0` of `b`; legs
//!   `k ≥ 1` of `b` land at `i+k-1`, later legs of `a` shift by `m-2`;
//! * `ξ_ij` (`i < j`) glues two legs; the remaining legs keep their order.

pub mod endo;
pub mod free;
pub mod ideal;
pub mod product;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::{homology, ChainComplex, ChainMap};
use crate::qlinalg::{sv_add_scaled, sv_from_dense, sv_scale, sv_unit, Matrix, Rational, SVec, SpMat};
use crate::sigma::{is_stable, Permutation, SymComplex};
use crate::trees::Half;

pub use product::{koszul_sign, sign_pow, ProductBasis};

pub type Idx = (usize, usize);

/// Composition table of one `∘_i`: basis pair to result vector.
pub type Bilinear = BTreeMap<(usize, usize), SVec>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Plain,
    Modular,
}

impl Kind {
    /// Arity for plain operads, modular dimension `3g-3+l` otherwise.
    pub fn level(self, idx: Idx) -> usize {
        match self {
            Kind::Plain => idx.1,
            Kind::Modular => 3 * idx.0 + idx.1 - 3,
        }
    }

    pub fn min_level(self) -> usize {
        match self {
            Kind::Plain => 2,
            Kind::Modular => 0,
        }
    }

    pub fn is_index(self, idx: Idx) -> bool {
        match self {
            Kind::Plain => idx.0 == 0 && idx.1 >= 2,
            Kind::Modular => is_stable(idx.0, idx.1),
        }
    }

    pub fn indices_at(self, level: usize) -> Vec<Idx> {
        match self {
            Kind::Plain => {
                if level >= 2 {
                    vec![(0, level)]
                } else {
                    vec![]
                }
            }
            Kind::Modular => (0..=(level + 3) / 3)
                .map(|g| (g, level + 3 - 3 * g))
                .filter(|&(g, l)| is_stable(g, l))
                .collect(),
        }
    }

    pub fn indices_upto(self, n: usize) -> Vec<Idx> {
        (self.min_level()..=n).flat_map(|k| self.indices_at(k)).collect()
    }

    /// Only meaningful when both indices have a leg.
    pub fn compose_target(self, a: Idx, b: Idx) -> Idx {
        match self {
            Kind::Plain => (0, (a.1 + b.1).saturating_sub(1)),
            Kind::Modular => (a.0 + b.0, (a.1 + b.1).saturating_sub(2)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Plain => "operad",
            Kind::Modular => "modular",
        }
    }
}

pub fn contract_target(a: Idx) -> Idx {
    (a.0 + 1, a.1 - 2)
}

pub fn fmt_idx(kind: Kind, idx: Idx) -> String {
    match kind {
        Kind::Plain => format!("{}", idx.1),
        Kind::Modular => format!("({},{})", idx.0, idx.1),
    }
}

/// A failed axiom instance.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{axiom}: {instance}")]
pub struct Violation {
    pub axiom: String,
    pub instance: String,
}

pub(crate) fn violation(axiom: &str, instance: impl Into<String>) -> Violation {
    Violation { axiom: axiom.to_string(), instance: instance.into() }
}

/// A complex with a flat graded basis and a right `Σ_arity` action on adjacent transpositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub arity: usize,
    pub degrees: Vec<i64>,
    pub d: SpMat,
    pub gens: Vec<SpMat>,
}

impl Component {
    pub fn zero(arity: usize) -> Self {
        Component::graded(arity, vec![])
    }

    /// Zero differential and trivial action.
    pub fn graded(arity: usize, degrees: Vec<i64>) -> Self {
        let n = degrees.len();
        Component { arity, degrees, d: SpMat::zeros(n, n), gens: vec![SpMat::identity(n); arity.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Flattens a symmetric complex, degrees ascending.
    pub fn from_sym(s: &SymComplex) -> Self {
        let c = &s.complex;
        let mut degrees = Vec::new();
        let mut offset = BTreeMap::new();
        for (&i, &n) in c.dims() {
            offset.insert(i, degrees.len());
            degrees.extend(std::iter::repeat(i).take(n));
        }
        let n = degrees.len();
        let mut d = SpMat::zeros(n, n);
        for (&i, m) in c.nonzero_diffs() {
            for (cj, col) in m.columns().iter().enumerate() {
                d.cols[offset[&i] + cj] = sv_from_dense(col).into_iter().map(|(r, x)| (offset[&(i - 1)] + r, x)).collect();
            }
        }
        let gens = s
            .gens
            .iter()
            .map(|g| {
                let mut m = SpMat::zeros(n, n);
                for (&i, &o) in &offset {
                    for (cj, col) in g.comp(i).columns().iter().enumerate() {
                        m.cols[o + cj] = sv_from_dense(col).into_iter().map(|(r, x)| (o + r, x)).collect();
                    }
                }
                m
            })
            .collect();
        Component { arity: s.arity, degrees, d, gens }
    }

    /// Basis indices of each degree.
    pub fn blocks(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (j, &k) in self.degrees.iter().enumerate() {
            out.entry(k).or_default().push(j);
        }
        out
    }

    fn positions(&self) -> Vec<usize> {
        let mut count: BTreeMap<i64, usize> = BTreeMap::new();
        self.degrees
            .iter()
            .map(|k| {
                let c = count.entry(*k).or_default();
                *c += 1;
                *c - 1
            })
            .collect()
    }

    /// Degree block of `m` with rows in degree `r` and columns in degree `c`.
    fn dense_between(m: &SpMat, rows: &[usize], cols: &[usize], row_pos: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (cj, &j) in cols.iter().enumerate() {
            for (&i, x) in &m.cols[j] {
                if rows.binary_search(&i).is_ok() {
                    out.set(row_pos[i], cj, x.clone());
                }
            }
        }
        out
    }

    pub fn try_complex(&self) -> Result<ChainComplex, Violation> {
        let blocks = self.blocks();
        let pos = self.positions();
        for (j, col) in self.d.cols.iter().enumerate() {
            if col.keys().any(|&i| self.degrees[i] != self.degrees[j] - 1) {
                return Err(violation("differential degree", format!("basis {j}")));
            }
        }
        let dims = blocks.iter().map(|(&k, v)| (k, v.len())).collect();
        let mut diffs = BTreeMap::new();
        for (&k, cols) in &blocks {
            if let Some(rows) = blocks.get(&(k - 1)) {
                diffs.insert(k, Self::dense_between(&self.d, rows, cols, &pos));
            }
        }
        ChainComplex::new(dims, diffs).map_err(|e| violation("differential", e.to_string()))
    }

    pub fn to_complex(&self) -> ChainComplex {
        self.try_complex().expect("valid component")
    }

    /// Degree-0 chain map between components as a `ChainMap`.
    pub fn chain_map(&self, tgt: &Component, m: &SpMat) -> ChainMap {
        let (sb, tb) = (self.blocks(), tgt.blocks());
        let tpos = tgt.positions();
        let comps = sb
            .iter()
            .filter_map(|(k, cols)| tb.get(k).map(|rows| (*k, Self::dense_between(m, rows, cols, &tpos))))
            .collect();
        ChainMap::new_unchecked(self.to_complex(), tgt.to_complex(), comps).expect("shapes match")
    }

    pub fn try_sym(&self) -> Result<SymComplex, Violation> {
        let c = self.try_complex()?;
        let mut gens = Vec::new();
        for (k, g) in self.gens.iter().enumerate() {
            for (j, col) in g.cols.iter().enumerate() {
                if col.keys().any(|&i| self.degrees[i] != self.degrees[j]) {
                    return Err(violation("action degree", format!("s_{k} on basis {j}")));
                }
            }
            let m = self.chain_map(self, g);
            if !m.is_chain_map() {
                return Err(violation("action commutes with d", format!("s_{k}")));
            }
            gens.push(m);
        }
        SymComplex::new(self.arity, c, gens).map_err(|e| violation("symmetric group relations", e.to_string()))
    }

    pub fn to_sym(&self) -> SymComplex {
        self.try_sym().expect("valid component")
    }

    pub fn validate(&self) -> Result<(), Violation> {
        if self.gens.len() != self.arity.saturating_sub(1) || self.d.rows != self.dim() || self.d.ncols() != self.dim() {
            return Err(violation("component shape", format!("arity {}", self.arity)));
        }
        self.try_sym().map(|_| ())
    }

    /// `v·p`, applied generator by generator.
    pub fn act(&self, p: &Permutation, v: &SVec) -> SVec {
        let mut out = v.clone();
        for k in p.adjacent_word() {
            out = self.gens[k].apply(&out);
        }
        out
    }

    /// Gives the leaf in position `j` the label `new_of_old[j]`.
    pub fn relabel(&self, new_of_old: &[usize], v: &SVec) -> SVec {
        let p = Permutation::new(new_of_old.to_vec()).expect("a permutation").inverse();
        self.act(&p, v)
    }

    pub fn act_matrix(&self, p: &Permutation) -> SpMat {
        SpMat { rows: self.dim(), cols: (0..self.dim()).map(|j| self.act(p, &sv_unit(j))).collect() }
    }

    /// Degree of a nonzero homogeneous vector.
    pub fn degree_of(&self, v: &SVec) -> Option<i64> {
        let mut ks = v.keys().map(|&i| self.degrees[i]);
        let first = ks.next()?;
        ks.all(|k| k == first).then_some(first)
    }
}

/// A dg operad or modular operad, known up to level `window`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operad {
    pub kind: Kind,
    pub window: usize,
    pub comps: BTreeMap<Idx, Component>,
    pub compose: BTreeMap<(Idx, Idx, usize), Bilinear>,
    pub contract: BTreeMap<(Idx, usize, usize), SpMat>,
    /// `Some(n)` when the operad is known to agree with `t_! t_n` of itself in the window.
    pub tower: Option<usize>,
}

impl Operad {
    pub fn new(kind: Kind, window: usize) -> Self {
        Operad { kind, window, comps: BTreeMap::new(), compose: BTreeMap::new(), contract: BTreeMap::new(), tower: None }
    }

    pub fn with_component(mut self, idx: Idx, c: Component) -> Self {
        self.comps.insert(idx, c);
        self
    }

    pub fn level(&self, idx: Idx) -> usize {
        self.kind.level(idx)
    }

    pub fn in_window(&self, idx: Idx) -> bool {
        self.kind.is_index(idx) && self.level(idx) <= self.window
    }

    pub fn indices(&self) -> Vec<Idx> {
        self.kind.indices_upto(self.window)
    }

    /// Indices with nonzero components.
    pub fn support(&self) -> Vec<Idx> {
        self.comps.iter().filter(|(_, c)| c.dim() > 0).map(|(k, _)| *k).collect()
    }

    pub fn dim(&self, idx: Idx) -> usize {
        self.comps.get(&idx).map_or(0, Component::dim)
    }

    pub fn component(&self, idx: Idx) -> Component {
        self.comps.get(&idx).cloned().unwrap_or_else(|| Component::zero(idx.1))
    }

    pub fn degree(&self, idx: Idx, j: usize) -> i64 {
        self.comps[&idx].degrees[j]
    }

    pub fn degree_of(&self, idx: Idx, v: &SVec) -> Option<i64> {
        self.comps.get(&idx).and_then(|c| c.degree_of(v))
    }

    pub fn compose_target(&self, a: Idx, b: Idx) -> Idx {
        self.kind.compose_target(a, b)
    }

    /// Whether `∘_i` with these indices is defined and lands in the window.
    pub fn composable(&self, a: Idx, b: Idx, i: usize) -> bool {
        i < a.1 && (self.kind == Kind::Plain || b.1 >= 1) && self.in_window(self.compose_target(a, b))
    }

    pub fn compose_basis(&self, a: Idx, x: usize, b: Idx, y: usize, i: usize) -> SVec {
        self.compose.get(&(a, b, i)).and_then(|t| t.get(&(x, y))).cloned().unwrap_or_default()
    }

    pub fn compose_vec(&self, a: Idx, xv: &SVec, b: Idx, yv: &SVec, i: usize) -> SVec {
        let mut out = SVec::new();
        let Some(t) = self.compose.get(&(a, b, i)) else {
            return out;
        };
        for (&x, cx) in xv {
            for (&y, cy) in yv {
                if let Some(r) = t.get(&(x, y)) {
                    sv_add_scaled(&mut out, r, &(cx * cy));
                }
            }
        }
        out
    }

    pub fn contract_vec(&self, a: Idx, i: usize, j: usize, v: &SVec) -> SVec {
        self.contract.get(&(a, i, j)).map(|m| m.apply(v)).unwrap_or_default()
    }

    pub fn d_vec(&self, idx: Idx, v: &SVec) -> SVec {
        self.comps.get(&idx).map(|c| c.d.apply(v)).unwrap_or_default()
    }

    pub fn act_vec(&self, idx: Idx, p: &Permutation, v: &SVec) -> SVec {
        self.comps.get(&idx).map(|c| c.act(p, v)).unwrap_or_default()
    }

    pub fn relabel_vec(&self, idx: Idx, new_of_old: &[usize], v: &SVec) -> SVec {
        self.comps.get(&idx).map(|c| c.relabel(new_of_old, v)).unwrap_or_default()
    }

    pub fn set_compose(&mut self, a: Idx, b: Idx, i: usize, x: usize, y: usize, v: SVec) {
        if !v.is_empty() {
            self.compose.entry((a, b, i)).or_default().insert((x, y), v);
        }
    }

    pub fn set_contract(&mut self, a: Idx, i: usize, j: usize, m: SpMat) {
        if !m.is_zero() {
            self.contract.insert((a, i, j), m);
        }
    }

    /// Total dimension per index inside the window.
    pub fn dims(&self) -> BTreeMap<Idx, usize> {
        self.indices().into_iter().map(|k| (k, self.dim(k))).collect()
    }

    /// Graded dimensions per index.
    pub fn graded_dims(&self) -> BTreeMap<Idx, BTreeMap<i64, usize>> {
        self.comps.iter().filter(|(_, c)| c.dim() > 0).map(|(k, c)| (*k, c.blocks().into_iter().map(|(d, v)| (d, v.len())).collect())).collect()
    }

    /// Evaluates a decorated graph by contracting its edges in `order`.
    ///
    /// Each step names an edge id; the flag swaps which endpoint acts as
    /// the outer factor of the composition. `None` if a step leaves the window.
    pub fn eval_decorated(&self, mut verts: Vec<DVertex>, order: &[(usize, bool)]) -> Option<(Idx, SVec)> {
        for &(e, flip) in order {
            let locs: Vec<(usize, usize)> = verts
                .iter()
                .enumerate()
                .flat_map(|(v, dv)| dv.halves.iter().enumerate().filter(|(_, h)| **h == Half::Edge(e)).map(move |(p, _)| (v, p)))
                .collect();
            let [(iu, p), (iw, q)] = locs[..] else { return None };
            if iu == iw {
                let u = &mut verts[iu];
                let t = contract_target(u.idx);
                if !self.in_window(t) {
                    return None;
                }
                u.vec = self.contract_vec(u.idx, p, q, &u.vec);
                u.halves.remove(q);
                u.halves.remove(p);
                u.idx = t;
                continue;
            }
            let ((iu, p), (iw, q)) = if flip { ((iw, q), (iu, p)) } else { ((iu, p), (iw, q)) };
            let (u, w) = (&verts[iu], &verts[iw]);
            if !self.composable(u.idx, w.idx, p) {
                return None;
            }
            let between: i64 = if iw > iu {
                verts[iu + 1..iw].iter().map(|v| v.deg).sum()
            } else {
                verts[iw + 1..=iu].iter().map(|v| v.deg).sum()
            };
            let sign = sign_pow(w.deg * between);
            let nof: Vec<usize> = (0..w.halves.len()).map(|x| if x == q { 0 } else if x < q { x + 1 } else { x }).collect();
            let wv = self.relabel_vec(w.idx, &nof, &w.vec);
            let vec = sv_scale(&self.compose_vec(u.idx, &u.vec, w.idx, &wv, p), &sign);
            let mut halves: Vec<Half> = u.halves[..p].to_vec();
            halves.extend(w.halves.iter().enumerate().filter(|(x, _)| *x != q).map(|(_, h)| h.clone()));
            halves.extend(u.halves[p + 1..].iter().cloned());
            let merged = DVertex { idx: self.compose_target(u.idx, w.idx), vec, deg: u.deg + w.deg, halves };
            verts.remove(iw);
            let iu = if iw < iu { iu - 1 } else { iu };
            verts[iu] = merged;
        }
        if verts.len() != 1 {
            return None;
        }
        let v = verts.pop().unwrap();
        let nof: Option<Vec<usize>> = v.halves.iter().map(|h| if let Half::Leg(x) = h { Some(*x) } else { None }).collect();
        let nof = nof?;
        Some((v.idx, self.relabel_vec(v.idx, &nof, &v.vec)))
    }

    /// Checks component validity and every structure axiom on basis elements inside the window.
    pub fn validate(&self) -> Result<(), Violation> {
        for (&idx, c) in &self.comps {
            let name = fmt_idx(self.kind, idx);
            if c.dim() > 0 && !self.in_window(idx) {
                return Err(violation("support", format!("component {name} outside the window")));
            }
            if c.arity != idx.1 {
                return Err(violation("component shape", format!("component {name} has arity {}", c.arity)));
            }
            c.validate().map_err(|v| violation(&v.axiom, format!("component {name}: {}", v.instance)))?;
        }
        self.check_tables()?;
        match self.kind {
            Kind::Plain => self.check_plain(),
            Kind::Modular => self.check_modular(),
        }
    }

    fn check_tables(&self) -> Result<(), Violation> {
        for (&(a, b, i), t) in &self.compose {
            let tgt = self.compose_target(a, b);
            if !self.composable(a, b, i) {
                return Err(violation("composition index", format!("o_{} on {a:?},{b:?}", i + 1)));
            }
            for (&(x, y), r) in t {
                if x >= self.dim(a) || y >= self.dim(b) || r.keys().any(|&z| z >= self.dim(tgt)) {
                    return Err(violation("composition index", format!("o_{} on {a:?},{b:?}", i + 1)));
                }
                if self.degree_of(tgt, r) != Some(self.degree(a, x) + self.degree(b, y)) {
                    return Err(violation("composition degree", format!("o_{} on {a:?}[{x}], {b:?}[{y}]", i + 1)));
                }
            }
        }
        for (&(a, i, j), m) in &self.contract {
            let t = contract_target(a);
            if self.kind != Kind::Modular || !(i < j && j < a.1) || !self.in_window(t) || m.ncols() != self.dim(a) || m.rows != self.dim(t) {
                return Err(violation("contraction index", format!("xi_{}{} on {a:?}", i + 1, j + 1)));
            }
            for (x, r) in m.cols.iter().enumerate() {
                if !r.is_empty() && self.degree_of(t, r) != Some(self.degree(a, x)) {
                    return Err(violation("contraction degree", format!("xi_{}{} on {a:?}[{x}]", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }

    fn check_plain(&self) -> Result<(), Violation> {
        let sup = self.support();
        let shift = |x: usize, i: usize, m: usize| if x < i { x } else { x + m - 1 };
        for &a in &sup {
            for &b in &sup {
                let t = self.compose_target(a, b);
                if !self.in_window(t) {
                    continue;
                }
                let (l, m) = (a.1, b.1);
                for x in 0..self.dim(a) {
                    let xv = sv_unit(x);
                    let dx = self.degree(a, x);
                    for y in 0..self.dim(b) {
                        let yv = sv_unit(y);
                        for i in 0..l {
                            let inst = || format!("{a:?}[{x}] o_{} {b:?}[{y}]", i + 1);
                            let base = self.compose_vec(a, &xv, b, &yv, i);
                            let lhs = self.d_vec(t, &base);
                            let mut rhs = self.compose_vec(a, &self.d_vec(a, &xv), b, &yv, i);
                            sv_add_scaled(&mut rhs, &self.compose_vec(a, &xv, b, &self.d_vec(b, &yv), i), &sign_pow(dx));
                            if lhs != rhs {
                                return Err(violation("d is a derivation of o_i", inst()));
                            }
                            for s in 0..l - 1 {
                                let sigma = Permutation::adjacent(l, s);
                                let lhs = self.compose_vec(a, &self.act_vec(a, &sigma, &xv), b, &yv, i);
                                let j = sigma.apply(i);
                                let inv = sigma.inverse();
                                let mut nof = vec![0; l + m - 1];
                                for xx in (0..l).filter(|&xx| xx != j) {
                                    nof[shift(xx, j, m)] = shift(inv.apply(xx), i, m);
                                }
                                for k in 0..m {
                                    nof[j + k] = i + k;
                                }
                                let rhs = self.relabel_vec(t, &nof, &self.compose_vec(a, &xv, b, &yv, j));
                                if lhs != rhs {
                                    return Err(violation("equivariance in the first argument", format!("{} with s_{}", inst(), s + 1)));
                                }
                            }
                            for s in 0..m - 1 {
                                let tau = Permutation::adjacent(m, s);
                                let lhs = self.compose_vec(a, &xv, b, &self.act_vec(b, &tau, &yv), i);
                                let inv = tau.inverse();
                                let mut nof: Vec<usize> = (0..l + m - 1).collect();
                                for k in 0..m {
                                    nof[i + k] = i + inv.apply(k);
                                }
                                let rhs = self.relabel_vec(t, &nof, &base);
                                if lhs != rhs {
                                    return Err(violation("equivariance in the second argument", format!("{} with s_{}", inst(), s + 1)));
                                }
                            }
                        }
                    }
                }
            }
        }
        for &a in &sup {
            for &b in &sup {
                let t1 = self.compose_target(a, b);
                for &c in &sup {
                    let t = self.compose_target(t1, c);
                    if !self.in_window(t) {
                        continue;
                    }
                    let (l, m) = (a.1, b.1);
                    let (tbc, tac) = (self.compose_target(b, c), self.compose_target(a, c));
                    for x in 0..self.dim(a) {
                        for y in 0..self.dim(b) {
                            let dy = self.degree(b, y);
                            for z in 0..self.dim(c) {
                                let dz = self.degree(c, z);
                                let (xv, yv, zv) = (sv_unit(x), sv_unit(y), sv_unit(z));
                                for i in 0..l {
                                    let xy = self.compose_vec(a, &xv, b, &yv, i);
                                    for j in 0..m {
                                        let lhs = self.compose_vec(t1, &xy, c, &zv, i + j);
                                        let rhs = self.compose_vec(a, &xv, tbc, &self.compose_vec(b, &yv, c, &zv, j), i);
                                        if lhs != rhs {
                                            return Err(violation(
                                                "sequential associativity",
                                                format!("{a:?}[{x}] o_{} ({b:?}[{y}] o_{} {c:?}[{z}])", i + 1, j + 1),
                                            ));
                                        }
                                    }
                                    for k in i + 1..l {
                                        let lhs = self.compose_vec(t1, &xy, c, &zv, k + m - 1);
                                        let xz = self.compose_vec(a, &xv, c, &zv, k);
                                        let rhs = sv_scale(&self.compose_vec(tac, &xz, b, &yv, i), &sign_pow(dy * dz));
                                        if lhs != rhs {
                                            return Err(violation(
                                                "parallel associativity",
                                                format!("{a:?}[{x}] with {b:?}[{y}] at {} and {c:?}[{z}] at {}", i + 1, k + 1),
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn basis_vertex(&self, idx: Idx, x: usize, halves: Vec<Half>) -> DVertex {
        DVertex { idx, vec: sv_unit(x), deg: self.degree(idx, x), halves }
    }

    fn check_modular(&self) -> Result<(), Violation> {
        let sup = self.support();
        // contractions: derivation and equivariance
        for &a in &sup {
            let l = a.1;
            if l < 2 || !self.in_window(contract_target(a)) {
                continue;
            }
            for x in 0..self.dim(a) {
                for p in 0..l {
                    for q in p + 1..l {
                        let inst = || format!("xi_{}{} on {a:?}[{x}]", p + 1, q + 1);
                        let xv = sv_unit(x);
                        let t = contract_target(a);
                        if self.d_vec(t, &self.contract_vec(a, p, q, &xv)) != self.contract_vec(a, p, q, &self.d_vec(a, &xv)) {
                            return Err(violation("d commutes with xi", inst()));
                        }
                        let halves = legs_with_edges(l, &[(p, 0), (q, 0)], 0);
                        let base = self.eval_decorated(vec![self.basis_vertex(a, x, halves.clone())], &[(0, false)]);
                        for s in 0..l - 1 {
                            let sigma = Permutation::adjacent(l, s);
                            let hv: Vec<Half> = (0..l).map(|y| halves[sigma.apply(y)].clone()).collect();
                            let v = DVertex { idx: a, vec: self.act_vec(a, &sigma, &xv), deg: self.degree(a, x), halves: hv };
                            if self.eval_decorated(vec![v], &[(0, false)]) != base {
                                return Err(violation("equivariance of xi", format!("{} with s_{}", inst(), s + 1)));
                            }
                        }
                    }
                }
            }
        }
        // compositions: derivation, symmetry and equivariance
        for &a in &sup {
            for &b in &sup {
                let t = self.compose_target(a, b);
                if !self.in_window(t) || b.1 == 0 {
                    continue;
                }
                let (l, m) = (a.1, b.1);
                for x in 0..self.dim(a) {
                    let xv = sv_unit(x);
                    let dx = self.degree(a, x);
                    for y in 0..self.dim(b) {
                        let yv = sv_unit(y);
                        for i in 0..l {
                            let lhs = self.d_vec(t, &self.compose_vec(a, &xv, b, &yv, i));
                            let mut rhs = self.compose_vec(a, &self.d_vec(a, &xv), b, &yv, i);
                            sv_add_scaled(&mut rhs, &self.compose_vec(a, &xv, b, &self.d_vec(b, &yv), i), &sign_pow(dx));
                            if lhs != rhs {
                                return Err(violation("d is a derivation of o_i", format!("{a:?}[{x}] o_{} {b:?}[{y}]", i + 1)));
                            }
                            for q in 0..m {
                                let hu = legs_with_edges(l, &[(i, 0)], 0);
                                let hw = legs_with_edges(m, &[(q, 0)], l - 1);
                                let inst = || format!("{a:?}[{x}] leg {} glued to {b:?}[{y}] leg {}", i + 1, q + 1);
                                let u = self.basis_vertex(a, x, hu.clone());
                                let w = self.basis_vertex(b, y, hw.clone());
                                let r = self.eval_decorated(vec![u.clone(), w.clone()], &[(0, false)]);
                                if self.eval_decorated(vec![u.clone(), w.clone()], &[(0, true)]) != r {
                                    return Err(violation("symmetry of composition", inst()));
                                }
                                let swapped = self.eval_decorated(vec![w.clone(), u.clone()], &[(0, false)]);
                                let sign = sign_pow(dx * self.degree(b, y));
                                if swapped.map(|(k, v)| (k, sv_scale(&v, &sign))) != r {
                                    return Err(violation("symmetry of composition", inst()));
                                }
                                for s in 0..l - 1 {
                                    let sigma = Permutation::adjacent(l, s);
                                    let hv: Vec<Half> = (0..l).map(|z| hu[sigma.apply(z)].clone()).collect();
                                    let u2 = DVertex { idx: a, vec: self.act_vec(a, &sigma, &xv), deg: dx, halves: hv };
                                    if self.eval_decorated(vec![u2, w.clone()], &[(0, false)]) != r {
                                        return Err(violation("equivariance of composition", format!("{} with s_{} on the first", inst(), s + 1)));
                                    }
                                }
                                for s in 0..m - 1 {
                                    let tau = Permutation::adjacent(m, s);
                                    let hv: Vec<Half> = (0..m).map(|z| hw[tau.apply(z)].clone()).collect();
                                    let w2 = DVertex { idx: b, vec: self.act_vec(b, &tau, &yv), deg: self.degree(b, y), halves: hv };
                                    if self.eval_decorated(vec![u.clone(), w2], &[(0, false)]) != r {
                                        return Err(violation("equivariance of composition", format!("{} with s_{} on the second", inst(), s + 1)));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        self.check_two_edge_graphs(&sup)
    }

    /// All graphs with two edges on one to three basis-decorated vertices: every contraction order agrees.
    fn check_two_edge_graphs(&self, sup: &[Idx]) -> Result<(), Violation> {
        for k in 1..=3usize {
            for tuple in nondecreasing_tuples(sup, k) {
                let g: usize = tuple.iter().map(|t| t.0).sum::<usize>() + 2 + 1 - k;
                let halves: usize = tuple.iter().map(|t| t.1).sum();
                if halves < 4 || !self.in_window((g, halves - 4)) {
                    continue;
                }
                let slots: Vec<(usize, usize)> = tuple.iter().enumerate().flat_map(|(v, t)| (0..t.1).map(move |p| (v, p))).collect();
                let n = slots.len();
                let mut configs = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        for c in a + 1..n {
                            for d in c + 1..n {
                                if [b, c, d].iter().collect::<std::collections::BTreeSet<_>>().len() < 3 {
                                    continue;
                                }
                                let edges = [(slots[a], slots[b]), (slots[c], slots[d])];
                                if connected(k, &edges) {
                                    configs.push(edges);
                                }
                            }
                        }
                    }
                }
                let dims: Vec<usize> = tuple.iter().map(|&t| self.dim(t)).collect();
                let pb = ProductBasis::new(dims);
                for cfg in &configs {
                    let mut hs: Vec<Vec<Half>> = tuple.iter().map(|t| vec![Half::Leg(usize::MAX); t.1]).collect();
                    for (e, &((v1, p1), (v2, p2))) in cfg.iter().enumerate() {
                        hs[v1][p1] = Half::Edge(e);
                        hs[v2][p2] = Half::Edge(e);
                    }
                    let mut leg = 0;
                    for h in hs.iter_mut().flatten() {
                        if *h == Half::Leg(usize::MAX) {
                            *h = Half::Leg(leg);
                            leg += 1;
                        }
                    }
                    for flat in 0..pb.total {
                        let multi = pb.multi(flat);
                        let verts: Vec<DVertex> = (0..k).map(|v| self.basis_vertex(tuple[v], multi[v], hs[v].clone())).collect();
                        let first = self.eval_decorated(verts.clone(), &[(0, false), (1, false)]);
                        for order in [[(1, false), (0, false)], [(0, true), (1, true)], [(1, true), (0, true)]] {
                            if self.eval_decorated(verts.clone(), &order) != first {
                                return Err(violation(
                                    "associativity of compositions and contractions",
                                    format!("vertices {tuple:?} basis {multi:?} edges {cfg:?}"),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Every nonzero structure map raises the level strictly.
    pub fn check_filtration(&self) -> Result<(), Violation> {
        for (&(a, b, i), t) in &self.compose {
            let tl = self.level(self.compose_target(a, b));
            if t.values().any(|v| !v.is_empty()) && (tl <= self.level(a) || tl <= self.level(b)) {
                return Err(violation("filtration", format!("o_{} on {a:?},{b:?}", i + 1)));
            }
        }
        for (&(a, i, j), m) in &self.contract {
            if !m.is_zero() && self.level(contract_target(a)) <= self.level(a) {
                return Err(violation("filtration", format!("xi_{}{} on {a:?}", i + 1, j + 1)));
            }
        }
        Ok(())
    }

    /// `t_n`: forget everything above level `n`.
    pub fn truncate(&self, n: usize) -> Operad {
        let mut out = Operad::new(self.kind, n.min(self.window));
        out.comps = self.comps.iter().filter(|(k, _)| out.in_window(**k)).map(|(k, c)| (*k, c.clone())).collect();
        out.compose = self.compose.iter().filter(|((a, b, _), _)| out.in_window(self.compose_target(*a, *b))).map(|(k, v)| (*k, v.clone())).collect();
        out.contract = self.contract.iter().filter(|((a, _, _), _)| out.in_window(contract_target(*a))).map(|(k, v)| (*k, v.clone())).collect();
        out.tower = self.tower.filter(|&k| k <= out.window);
        out
    }

    /// `t_*`: extend by zero components up to level `up_to`.
    pub fn extend_by_zero(&self, up_to: usize) -> Operad {
        let mut out = self.clone();
        out.window = up_to.max(self.window);
        out.tower = None;
        out
    }

    /// Drops zero components and empty tables.
    pub fn normalized(mut self) -> Operad {
        self.comps.retain(|_, c| c.dim() > 0);
        self.compose.retain(|_, t| {
            t.retain(|_, v| !v.is_empty());
            !t.is_empty()
        });
        self.contract.retain(|_, m| !m.is_zero());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|c| c.dim() == 0)
    }
}

impl fmt::Display for Operad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} window {}", self.kind.name(), self.window)?;
        for (idx, c) in &self.comps {
            let dims: Vec<String> = c.blocks().into_iter().map(|(d, v)| format!("{d}:{}", v.len())).collect();
            writeln!(f, "  {}  {}", fmt_idx(self.kind, *idx), dims.join(" "))?;
        }
        Ok(())
    }
}

/// A vertex of a decorated graph: component, element, its degree and ordered half-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DVertex {
    pub idx: Idx,
    pub vec: SVec,
    pub deg: i64,
    pub halves: Vec<Half>,
}

/// Halves `0..n`: given positions become edges, the rest legs numbered from `first_leg`.
fn legs_with_edges(n: usize, edges: &[(usize, usize)], first_leg: usize) -> Vec<Half> {
    let mut leg = first_leg;
    (0..n)
        .map(|p| match edges.iter().find(|(q, _)| *q == p) {
            Some(&(_, e)) => Half::Edge(e),
            None => {
                leg += 1;
                Half::Leg(leg - 1)
            }
        })
        .collect()
}

fn nondecreasing_tuples(items: &[Idx], k: usize) -> Vec<Vec<Idx>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &it) in items.iter().enumerate() {
        for mut rest in nondecreasing_tuples(&items[i..], k - 1) {
            rest.insert(0, it);
            out.push(rest);
        }
    }
    out
}

fn connected(k: usize, edges: &[((usize, usize), (usize, usize))]) -> bool {
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &((a, _), (b, _)) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let r = find(&mut parent, 0);
    (0..k).all(|v| find(&mut parent, v) == r)
}

/// Per-component maps commuting with all structure.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OperadMorphism {
    pub comps: BTreeMap<Idx, SpMat>,
}

impl OperadMorphism {
    pub fn identity(p: &Operad) -> Self {
        OperadMorphism { comps: p.comps.iter().map(|(k, c)| (*k, SpMat::identity(c.dim()))).collect() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn apply(&self, idx: Idx, v: &SVec) -> SVec {
        self.comps.get(&idx).map(|m| m.apply(v)).unwrap_or_default()
    }

    /// Matrix at `idx`, zero when absent.
    pub fn matrix(&self, idx: Idx, src: &Operad, tgt: &Operad) -> SpMat {
        self.comps.get(&idx).cloned().unwrap_or_else(|| SpMat::zeros(tgt.dim(idx), src.dim(idx)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OperadMorphism) -> OperadMorphism {
        let comps = other.comps.iter().filter_map(|(k, m)| self.comps.get(k).map(|s| (*k, s.compose(m)))).collect();
        OperadMorphism { comps }
    }

    /// Checks shapes, degrees, chain-map property, equivariance and compatibility with structure maps.
    pub fn check(&self, src: &Operad, tgt: &Operad) -> Result<(), Violation> {
        for (&idx, m) in &self.comps {
            if m.ncols() != src.dim(idx) || m.rows != tgt.dim(idx) {
                return Err(violation("morphism shape", fmt_idx(src.kind, idx)));
            }
        }
        let common: Vec<Idx> = src.support().into_iter().filter(|k| tgt.in_window(*k)).collect();
        for &idx in &common {
            let name = fmt_idx(src.kind, idx);
            let sc = &src.comps[&idx];
            for x in 0..sc.dim() {
                let xv = sv_unit(x);
                let fx = self.apply(idx, &xv);
                if !fx.is_empty() && tgt.degree_of(idx, &fx) != Some(sc.degrees[x]) {
                    return Err(violation("morphism degree", format!("{name}[{x}]")));
                }
                if self.apply(idx, &src.d_vec(idx, &xv)) != tgt.d_vec(idx, &fx) {
                    return Err(violation("morphism commutes with d", format!("{name}[{x}]")));
                }
                for s in 0..idx.1.saturating_sub(1) {
                    let p = Permutation::adjacent(idx.1, s);
                    if self.apply(idx, &src.act_vec(idx, &p, &xv)) != tgt.act_vec(idx, &p, &fx) {
                        return Err(violation("morphism equivariance", format!("{name}[{x}] with s_{}", s + 1)));
                    }
                }
                if src.kind == Kind::Modular && idx.1 >= 2 && tgt.in_window(contract_target(idx)) {
                    let t = contract_target(idx);
                    for i in 0..idx.1 {
                        for j in i + 1..idx.1 {
                            if self.apply(t, &src.contract_vec(idx, i, j, &xv)) != tgt.contract_vec(idx, i, j, &fx) {
                                return Err(violation("morphism commutes with xi", format!("{name}[{x}] xi_{}{}", i + 1, j + 1)));
                            }
                        }
                    }
                }
            }
        }
        for &a in &common {
            for &b in &common {
                let t = src.compose_target(a, b);
                for i in 0..a.1 {
                    if !src.composable(a, b, i) || !tgt.in_window(t) {
                        continue;
                    }
                    for x in 0..src.dim(a) {
                        let fx = self.apply(a, &sv_unit(x));
                        for y in 0..src.dim(b) {
                            let fy = self.apply(b, &sv_unit(y));
                            let lhs = self.apply(t, &src.compose_basis(a, x, b, y, i));
                            if lhs != tgt.compose_vec(a, &fx, b, &fy, i) {
                                return Err(violation("morphism commutes with o_i", format!("{a:?}[{x}] o_{} {b:?}[{y}]", i + 1)));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Homology of one component with a fixed section.
#[derive(Clone, Debug)]
pub struct ComponentHomology {
    pub degrees: Vec<i64>,
    /// Cycle representatives, in the component's basis.
    pub reps: Vec<SVec>,
    blocks: Vec<(Vec<usize>, Matrix, usize)>,
}

impl ComponentHomology {
    pub fn of(c: &Component) -> Self {
        let cc = c.to_complex();
        let h = homology(&cc);
        let mut degrees = Vec::new();
        let mut reps = Vec::new();
        let mut blocks = Vec::new();
        for (k, idxs) in c.blocks() {
            let hd = h.degree(k);
            let offset = degrees.len();
            for col in hd.reps.columns() {
                reps.push(col.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(r, x)| (idxs[r], x.clone())).collect());
                degrees.push(k);
            }
            if hd.dim > 0 {
                blocks.push((idxs, hd.proj, offset));
            }
        }
        ComponentHomology { degrees, reps, blocks }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Class of a cycle.
    pub fn project(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (idxs, proj, offset) in &self.blocks {
            let x: Vec<Rational> = idxs.iter().map(|i| v.get(i).cloned().unwrap_or_else(Rational::zero)).collect();
            if x.iter().all(Zero::is_zero) {
                continue;
            }
            for (r, val) in proj.mul_vec(&x).into_iter().enumerate() {
                if !val.is_zero() {
                    out.insert(offset + r, val);
                }
            }
        }
        out
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &k in &self.degrees {
            *out.entry(k).or_default() += 1;
        }
        out
    }
}

/// The homology operad `HP` with its chosen sections.
pub fn homology_operad(p: &Operad) -> (Operad, BTreeMap<Idx, ComponentHomology>) {
    let hs: BTreeMap<Idx, ComponentHomology> = p.comps.iter().map(|(k, c)| (*k, ComponentHomology::of(c))).collect();
    let mut out = Operad::new(p.kind, p.window);
    for (&k, h) in &hs {
        let c = &p.comps[&k];
        let n = h.dim();
        let gens = c.gens.iter().map(|g| SpMat { rows: n, cols: h.reps.iter().map(|r| h.project(&g.apply(r))).collect() }).collect();
        out.comps.insert(k, Component { arity: c.arity, degrees: h.degrees.clone(), d: SpMat::zeros(n, n), gens });
    }
    for &(a, b, i) in p.compose.keys() {
        let t = p.compose_target(a, b);
        for (x, rx) in hs[&a].reps.iter().enumerate() {
            for (y, ry) in hs[&b].reps.iter().enumerate() {
                let v = hs[&t].project(&p.compose_vec(a, rx, b, ry, i));
                out.set_compose(a, b, i, x, y, v);
            }
        }
    }
    for (&(a, i, j), m) in &p.contract {
        let t = contract_target(a);
        let cols = hs[&a].reps.iter().map(|r| hs[&t].project(&m.apply(r))).collect();
        out.set_contract(a, i, j, SpMat { rows: hs[&t].dim(), cols });
    }
    (out.normalized(), hs)
}

/// Result of a componentwise homology comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeqReport {
    pub equivalence: bool,
    /// Per index and degree: `(dim H source, dim H target, rank of H(f))`.
    pub ranks: BTreeMap<Idx, BTreeMap<i64, (usize, usize, usize)>>,
}

/// Checks whether `f: src → tgt` induces isomorphisms on homology in every component of the window.
pub fn weak_equivalence_test(f: &OperadMorphism, src: &Operad, tgt: &Operad) -> WeqReport {
    let mut ranks = BTreeMap::new();
    let mut ok = true;
    let window: Vec<Idx> = src.indices().into_iter().filter(|k| tgt.in_window(*k)).collect();
    for idx in window {
        let hs = ComponentHomology::of(&src.component(idx));
        let ht = ComponentHomology::of(&tgt.component(idx));
        let (sd, td) = (hs.dims(), ht.dims());
        let mut per = BTreeMap::new();
        for k in sd.keys().chain(td.keys()).copied().collect::<std::collections::BTreeSet<_>>() {
            let cols: Vec<SVec> = hs.reps.iter().zip(&hs.degrees).filter(|(_, d)| **d == k).map(|(r, _)| ht.project(&f.apply(idx, r))).collect();
            let m = SpMat { rows: ht.dim(), cols }.to_dense();
            let r = m.rank();
            let (a, b) = (sd.get(&k).copied().unwrap_or(0), td.get(&k).copied().unwrap_or(0));
            ok &= a == b && r == a;
            per.insert(k, (a, b, r));
        }
        ranks.insert(idx, per);
    }
    WeqReport { equivalence: ok, ranks }
}

/// Averages a linear map given on basis vectors over the symmetric group: `f'(e) = avg_σ f(e·σ⁻¹)·σ`.
///
/// Fixes every equivariant map; the result is always equivariant.
pub fn equivariant_average(src: &Component, tgt: &Component, images: &[SVec]) -> Vec<SVec> {
    if src.arity <= 1 {
        return images.to_vec();
    }
    let perms = Permutation::all(src.arity);
    let inv = Rational::new(1.into(), (perms.len() as i64).into());
    let apply = |v: &SVec| {
        let mut out = SVec::new();
        for (&k, c) in v {
            sv_add_scaled(&mut out, &images[k], c);
        }
        out
    };
    (0..src.dim())
        .map(|y| {
            let mut acc = SVec::new();
            for s in &perms {
                let pre = src.act(&s.inverse(), &sv_unit(y));
                sv_add_scaled(&mut acc, &tgt.act(s, &apply(&pre)), &inv);
            }
            acc
        })
        .collect()
}

/// Scales each degree-`i` basis vector by `alpha^i`.
pub fn grading_automorphism(p: &Operad, alpha: &Rational) -> OperadMorphism {
    let comps = p
        .comps
        .iter()
        .map(|(k, c)| {
            let cols = c.degrees.iter().enumerate().map(|(j, &d)| SVec::from([(j, rational_pow(alpha, d))])).collect();
            (*k, SpMat { rows: c.dim(), cols })
        })
        .collect();
    OperadMorphism { comps }
}

pub fn rational_pow(a: &Rational, e: i64) -> Rational {
    let mut r = Rational::one();
    for _ in 0..e.unsigned_abs() {
        r *= a;
    }
    if e < 0 {
        r.recip()
    } else {
        r
    }
}
