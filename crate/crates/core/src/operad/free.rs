//! Free and quasi-free operads and modular operads.
//!
//! A component of the free object is a sum of blocks, one per tree (or
//! stable graph) shape; a block is the tensor product of the generators
//! at its vertices, in vertex order, modulo the automorphisms of the shape.
//! Blocks are stored decomposables first and the one-vertex block last,
//! so adding generators never moves existing coordinates.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::product::{derivation_terms, koszul_sign, ProductBasis};
use super::{contract_target, Component, DVertex, Idx, Kind, Operad, OperadMorphism};
use crate::qlinalg::{kernel, sv_add_scaled, sv_scale, sv_unit, Echelon, Rational, SVec, SpMat};
use crate::trees::{enumerate_stable_graphs, enumerate_trees, GraphMap, Half, StableGraph, TaggedTree, Tree};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Tree(Tree),
    Graph(StableGraph),
}

impl Shape {
    pub fn corolla(kind: Kind, idx: Idx) -> Shape {
        match kind {
            Kind::Plain => Shape::Tree(Tree::corolla(idx.1)),
            Kind::Modular => Shape::Graph(StableGraph::corolla(idx.0, idx.1)),
        }
    }

    /// Generator index at each vertex, in vertex order.
    pub fn types(&self) -> Vec<Idx> {
        match self {
            Shape::Tree(t) => t.vertex_arities().into_iter().map(|a| (0, a)).collect(),
            Shape::Graph(g) => g.vertex_types(),
        }
    }

    pub fn is_corolla(&self) -> bool {
        match self {
            Shape::Tree(t) => t.num_vertices() == 1,
            Shape::Graph(g) => g.num_vertices() == 1 && g.num_edges() == 0,
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shape::Tree(t) => write!(f, "{t}"),
            Shape::Graph(g) => write!(f, "{g}"),
        }
    }
}

/// A canonical shape with the position and input relabelling of each presented vertex.
#[derive(Clone, Debug)]
struct Placement {
    shape: Shape,
    vertex: Vec<usize>,
    relabel: Vec<Vec<usize>>,
}

fn place_tree(t: &TaggedTree, k: usize) -> Placement {
    let (tree, m) = t.canonicalize();
    Placement { shape: Shape::Tree(tree), vertex: (0..k).map(|v| m.position[&v]).collect(), relabel: (0..k).map(|v| m.relabel[&v].clone()).collect() }
}

fn place_graph(g: &StableGraph) -> Placement {
    let (c, m) = g.canonicalize();
    Placement { shape: Shape::Graph(c), vertex: m.vertex, relabel: m.relabel }
}

fn map_halves(g: &StableGraph, f: impl Fn(&Half) -> Half) -> Vec<Vec<Half>> {
    g.halves.iter().map(|hs| hs.iter().map(&f).collect()).collect()
}

fn graft(a: &Shape, b: &Shape, i: usize) -> Placement {
    match (a, b) {
        (Shape::Tree(s), Shape::Tree(t)) => {
            let k = s.num_vertices();
            place_tree(&s.tagged(0).graft(i, &t.tagged(k)), k + t.num_vertices())
        }
        (Shape::Graph(s), Shape::Graph(t)) => {
            let (ea, m) = (s.num_edges() + t.num_edges(), t.num_legs());
            let se = s.num_edges();
            let mut halves = map_halves(s, |h| match *h {
                Half::Leg(x) if x == i => Half::Edge(ea),
                Half::Leg(x) if x > i => Half::Leg(x + m - 2),
                ref other => other.clone(),
            });
            halves.extend(map_halves(t, |h| match *h {
                Half::Leg(0) => Half::Edge(ea),
                Half::Leg(k) => Half::Leg(i + k - 1),
                Half::Edge(e) => Half::Edge(e + se),
            }));
            let genus = s.genus.iter().chain(&t.genus).copied().collect();
            place_graph(&StableGraph { genus, halves })
        }
        _ => unreachable!("mixed shapes"),
    }
}

fn act_adjacent(a: &Shape, k: usize) -> Placement {
    let swap = |x: usize| if x == k { k + 1 } else if x == k + 1 { k } else { x };
    match a {
        Shape::Tree(t) => {
            let n = t.arity();
            let nof: Vec<usize> = (0..n).map(swap).collect();
            place_tree(&t.tagged(0).relabel(&nof), t.num_vertices())
        }
        Shape::Graph(g) => {
            let halves = map_halves(g, |h| match *h {
                Half::Leg(x) => Half::Leg(swap(x)),
                ref e => e.clone(),
            });
            place_graph(&StableGraph { genus: g.genus.clone(), halves })
        }
    }
}

fn contract_shape(g: &StableGraph, i: usize, j: usize) -> Placement {
    let e = g.num_edges();
    let halves = map_halves(g, |h| match *h {
        Half::Leg(x) if x == i || x == j => Half::Edge(e),
        Half::Leg(x) if x < i => Half::Leg(x),
        Half::Leg(x) if x < j => Half::Leg(x - 1),
        Half::Leg(x) => Half::Leg(x - 2),
        ref other => other.clone(),
    });
    place_graph(&StableGraph { genus: g.genus.clone(), halves })
}

fn then(first: &GraphMap, second: &GraphMap) -> GraphMap {
    GraphMap {
        vertex: first.vertex.iter().map(|&v| second.vertex[v]).collect(),
        relabel: first.relabel.iter().enumerate().map(|(v, r)| r.iter().map(|&p| second.relabel[first.vertex[v]][p]).collect()).collect(),
    }
}

fn automorphism_group(g: &StableGraph) -> Vec<GraphMap> {
    let gens = g.automorphism_generators();
    let mut seen = BTreeSet::from([GraphMap::identity(g)]);
    let mut frontier: Vec<GraphMap> = seen.iter().cloned().collect();
    while let Some(x) = frontier.pop() {
        for s in &gens {
            let y = then(&x, s);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// One shape summand of a free component.
#[derive(Clone, Debug)]
pub struct FreeBlock {
    pub shape: Shape,
    pub types: Vec<Idx>,
    pub basis: ProductBasis,
    pub offset: usize,
    /// Product index lifting each block basis element.
    pub reps: Vec<usize>,
    /// Block coordinates of each product unit; `None` when the shape has no automorphisms.
    proj: Option<Vec<SVec>>,
}

impl FreeBlock {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Component coordinates of a vector of the product space.
    pub fn project(&self, v: &SVec) -> SVec {
        match &self.proj {
            None => v.iter().map(|(&j, x)| (self.offset + j, x.clone())).collect(),
            Some(p) => {
                let mut out = SVec::new();
                for (&j, x) in v {
                    sv_add_scaled(&mut out, &p[j], x);
                }
                out.into_iter().map(|(j, x)| (self.offset + j, x)).collect()
            }
        }
    }

    pub fn rep_multi(&self, r: usize) -> Vec<usize> {
        self.basis.multi(self.reps[r])
    }
}

/// A quasi-free operad: free on generators, with a differential given on generators.
#[derive(Clone, Debug)]
pub struct FreeOperad {
    pub gens: BTreeMap<Idx, Component>,
    /// Differential of each generator, in free coordinates.
    pub dgen: BTreeMap<Idx, Vec<SVec>>,
    pub blocks: BTreeMap<Idx, Vec<FreeBlock>>,
    pub operad: Operad,
}

impl FreeOperad {
    pub fn new(kind: Kind) -> Self {
        FreeOperad { gens: BTreeMap::new(), dgen: BTreeMap::new(), blocks: BTreeMap::new(), operad: Operad::new(kind, 0) }
    }

    pub fn kind(&self) -> Kind {
        self.operad.kind
    }

    pub fn gen_dim(&self, idx: Idx) -> usize {
        self.gens.get(&idx).map_or(0, Component::dim)
    }

    pub fn gen_degree(&self, idx: Idx, y: usize) -> i64 {
        self.gens[&idx].degrees[y]
    }

    /// Offset of the generator block inside the component.
    pub fn corolla_offset(&self, idx: Idx) -> usize {
        self.operad.dim(idx) - self.gen_dim(idx)
    }

    /// Generator `y` of `idx` as an element of the free object.
    pub fn generator(&self, idx: Idx, y: usize) -> SVec {
        sv_unit(self.corolla_offset(idx) + y)
    }

    pub fn embed(&self, idx: Idx, v: &SVec) -> SVec {
        let o = self.corolla_offset(idx);
        v.iter().map(|(&j, x)| (o + j, x.clone())).collect()
    }

    fn block_of(&self, idx: Idx, shape: &Shape) -> Option<&FreeBlock> {
        self.blocks.get(&idx)?.iter().find(|b| &b.shape == shape)
    }

    /// Pure tensor of generator vectors, moved along a placement into its canonical block.
    fn push(&self, types: &[Idx], factors: &[SVec], degs: &[i64], pl: &Placement, target: Idx) -> SVec {
        let Some(block) = self.block_of(target, &pl.shape) else {
            return SVec::new();
        };
        let mut placed = vec![SVec::new(); factors.len()];
        for v in 0..factors.len() {
            placed[pl.vertex[v]] = self.gens[&types[v]].relabel(&pl.relabel[v], &factors[v]);
        }
        let t = sv_scale(&block.basis.tensor(&placed), &koszul_sign(degs, &pl.vertex));
        block.project(&t)
    }

    fn rep_factors(&self, block: &FreeBlock, r: usize) -> (Vec<SVec>, Vec<i64>) {
        let m = block.rep_multi(r);
        let f = m.iter().map(|&x| sv_unit(x)).collect();
        let d = block.types.iter().zip(&m).map(|(&t, &x)| self.gen_degree(t, x)).collect();
        (f, d)
    }

    fn shapes(&self, idx: Idx) -> Vec<Shape> {
        let mut shapes: Vec<Shape> = match self.kind() {
            Kind::Plain => enumerate_trees(idx.1).into_iter().map(Shape::Tree).collect(),
            Kind::Modular => enumerate_stable_graphs(idx.0, idx.1).into_iter().map(Shape::Graph).collect(),
        };
        shapes.retain(|s| !s.is_corolla() && s.types().iter().all(|&t| self.gen_dim(t) > 0));
        shapes.push(Shape::corolla(self.kind(), idx));
        shapes
    }

    fn build_block(&self, shape: Shape, offset: usize) -> FreeBlock {
        let types = shape.types();
        let basis = ProductBasis::new(types.iter().map(|&t| self.gen_dim(t)).collect());
        let group = match &shape {
            Shape::Graph(g) if g.num_vertices() > 1 || g.num_edges() > 0 => automorphism_group(g),
            _ => vec![],
        };
        if group.len() <= 1 {
            let reps = (0..basis.total).collect();
            return FreeBlock { shape, types, basis, offset, reps, proj: None };
        }
        let inv = Rational::new(1.into(), (group.len() as i64).into());
        let mut averaged = Vec::with_capacity(basis.total);
        for j in 0..basis.total {
            let m = basis.multi(j);
            let degs: Vec<i64> = types.iter().zip(&m).map(|(&t, &x)| self.gen_degree(t, x)).collect();
            let mut acc = SVec::new();
            for gm in &group {
                let mut placed = vec![SVec::new(); m.len()];
                for v in 0..m.len() {
                    placed[gm.vertex[v]] = self.gens[&types[v]].relabel(&gm.relabel[v], &sv_unit(m[v]));
                }
                sv_add_scaled(&mut acc, &basis.tensor(&placed), &(koszul_sign(&degs, &gm.vertex) * &inv));
            }
            averaged.push(acc);
        }
        let mut ech = Echelon::new();
        let mut reps = Vec::new();
        for (j, a) in averaged.iter().enumerate() {
            if ech.insert(a).is_some() {
                reps.push(j);
            }
        }
        let proj = averaged.iter().map(|a| ech.coordinates(a).expect("in the span")).collect();
        FreeBlock { shape, types, basis, offset, reps, proj: Some(proj) }
    }

    /// Builds every component at `level` from the generators there and everything below.
    ///
    /// The differential of the new component is computed by [`FreeOperad::finish_level`].
    pub fn begin_level(&mut self, level: usize, gens: BTreeMap<Idx, Component>) {
        let kind = self.kind();
        let idxs = kind.indices_at(level);
        for idx in &idxs {
            self.gens.remove(idx);
            self.dgen.remove(idx);
            self.blocks.remove(idx);
            self.operad.comps.remove(idx);
        }
        self.operad.compose.retain(|(a, b, _), _| kind.level(kind.compose_target(*a, *b)) != level);
        self.operad.contract.retain(|(a, _, _), _| kind.level(*a) + 1 != level);
        self.gens.extend(gens.into_iter().filter(|(_, c)| c.dim() > 0));
        self.operad.window = level;
        for &idx in &idxs {
            let mut blocks = Vec::new();
            let mut offset = 0;
            for shape in self.shapes(idx) {
                let b = self.build_block(shape, offset);
                offset += b.dim();
                if b.dim() > 0 {
                    blocks.push(b);
                }
            }
            let mut degrees = Vec::with_capacity(offset);
            for b in &blocks {
                for r in 0..b.dim() {
                    degrees.push(self.rep_factors(b, r).1.iter().sum());
                }
            }
            self.blocks.insert(idx, blocks);
            let mut comp = Component::graded(idx.1, degrees);
            for k in 0..idx.1.saturating_sub(1) {
                comp.gens[k] = SpMat { rows: offset, cols: self.block_images(idx, |b| act_adjacent(&b.shape, k), idx) };
            }
            if offset > 0 {
                self.operad.comps.insert(idx, comp);
            }
        }
        let sup = self.operad.support();
        for &a in &sup {
            for &b in &sup {
                let t = kind.compose_target(a, b);
                if !idxs.contains(&t) {
                    continue;
                }
                for i in 0..a.1 {
                    if !self.operad.composable(a, b, i) {
                        continue;
                    }
                    self.fill_compose(a, b, i);
                }
            }
        }
        if kind == Kind::Modular {
            for &a in &sup {
                if a.1 >= 2 && idxs.contains(&contract_target(a)) {
                    for i in 0..a.1 {
                        for j in i + 1..a.1 {
                            let cols = self.block_images(a, |b| if let Shape::Graph(g) = &b.shape { contract_shape(g, i, j) } else { unreachable!() }, contract_target(a));
                            self.operad.set_contract(a, i, j, SpMat { rows: self.operad.dim(contract_target(a)), cols });
                        }
                    }
                }
            }
        }
    }

    /// Image of every basis element of `src` under a per-shape placement landing in `target`.
    fn block_images(&self, src: Idx, place: impl Fn(&FreeBlock) -> Placement, target: Idx) -> Vec<SVec> {
        let mut cols = Vec::new();
        for b in &self.blocks[&src] {
            let pl = place(b);
            for r in 0..b.dim() {
                let (f, d) = self.rep_factors(b, r);
                cols.push(self.push(&b.types, &f, &d, &pl, target));
            }
        }
        cols
    }

    fn fill_compose(&mut self, a: Idx, b: Idx, i: usize) {
        let t = self.kind().compose_target(a, b);
        let mut entries = Vec::new();
        for ba in &self.blocks[&a] {
            for bb in &self.blocks[&b] {
                let pl = graft(&ba.shape, &bb.shape, i);
                let types: Vec<Idx> = ba.types.iter().chain(&bb.types).copied().collect();
                for x in 0..ba.dim() {
                    let (fx, dx) = self.rep_factors(ba, x);
                    for y in 0..bb.dim() {
                        let (fy, dy) = self.rep_factors(bb, y);
                        let f: Vec<SVec> = fx.iter().chain(&fy).cloned().collect();
                        let d: Vec<i64> = dx.iter().chain(&dy).copied().collect();
                        entries.push((ba.offset + x, bb.offset + y, self.push(&types, &f, &d, &pl, t)));
                    }
                }
            }
        }
        for (x, y, v) in entries {
            self.operad.set_compose(a, b, i, x, y, v);
        }
    }

    /// Sets the differential on the generators at `level` and extends it as a derivation.
    pub fn finish_level(&mut self, level: usize, dgen: BTreeMap<Idx, Vec<SVec>>) {
        let idxs = self.kind().indices_at(level);
        for (idx, v) in dgen {
            self.dgen.insert(idx, v);
        }
        for idx in idxs {
            if self.operad.dim(idx) == 0 {
                continue;
            }
            let iota = |t: Idx, y: usize| self.generator(t, y);
            let dg = |t: Idx, y: usize| self.dgen.get(&t).and_then(|v| v.get(y)).cloned().unwrap_or_default();
            let d = self.derivation_on(&self.operad, idx, &iota, &dg, -1, &iota);
            self.operad.comps.get_mut(&idx).unwrap().d = d;
        }
    }

    /// Adds a level whose generators have the given differentials.
    pub fn push_level(&mut self, level: usize, gens: BTreeMap<Idx, Component>, dgen: BTreeMap<Idx, Vec<SVec>>) {
        self.begin_level(level, gens);
        self.finish_level(level, dgen);
    }

    /// Evaluates every basis element of `idx` in `q`, decorating vertex generators by `images`.
    pub fn morphism_on(&self, q: &Operad, idx: Idx, images: &dyn Fn(Idx, usize) -> SVec) -> SpMat {
        let mut cols = Vec::new();
        for b in self.blocks.get(&idx).into_iter().flatten() {
            for r in 0..b.dim() {
                let m = b.rep_multi(r);
                let (_, degs) = self.rep_factors(b, r);
                let decos: Vec<SVec> = b.types.iter().zip(&m).map(|(&t, &x)| images(t, x)).collect();
                cols.push(eval_shape(q, &b.shape, &decos, &degs));
            }
        }
        SpMat { rows: q.dim(idx), cols }
    }

    /// Extension of `h` on generators to the composites, as an `(f, g)`-derivation of degree `h_degree`.
    pub fn derivation_on(
        &self,
        q: &Operad,
        idx: Idx,
        f: &dyn Fn(Idx, usize) -> SVec,
        h: &dyn Fn(Idx, usize) -> SVec,
        h_degree: i64,
        g: &dyn Fn(Idx, usize) -> SVec,
    ) -> SpMat {
        let mut cols = Vec::new();
        for b in self.blocks.get(&idx).into_iter().flatten() {
            for r in 0..b.dim() {
                let m = b.rep_multi(r);
                let (_, degs) = self.rep_factors(b, r);
                let fs: Vec<(SVec, i64)> = b.types.iter().zip(&m).zip(&degs).map(|((&t, &x), &d)| (f(t, x), d)).collect();
                let hs: Vec<(SVec, i64)> = b.types.iter().zip(&m).zip(&degs).map(|((&t, &x), &d)| (h(t, x), d + h_degree)).collect();
                let gs: Vec<(SVec, i64)> = b.types.iter().zip(&m).zip(&degs).map(|((&t, &x), &d)| (g(t, x), d)).collect();
                let mut col = SVec::new();
                for (sign, decos) in derivation_terms(&degs, h_degree, &fs, &hs, &gs) {
                    if decos.iter().any(|(v, _)| v.is_empty()) {
                        continue;
                    }
                    let (vs, ds): (Vec<SVec>, Vec<i64>) = decos.into_iter().unzip();
                    sv_add_scaled(&mut col, &eval_shape(q, &b.shape, &vs, &ds), &sign);
                }
                cols.push(col);
            }
        }
        SpMat { rows: q.dim(idx), cols }
    }

    /// Basis element of `idx` described as shape and generator indices.
    pub fn describe(&self, idx: Idx, j: usize) -> (Shape, Vec<usize>) {
        let b = self.blocks[&idx].iter().find(|b| j >= b.offset && j < b.offset + b.dim()).expect("basis index in range");
        (b.shape.clone(), b.rep_multi(j - b.offset))
    }

    /// Span of the composites (non-generator blocks) of `idx`, as an index range.
    pub fn decomposable_dim(&self, idx: Idx) -> usize {
        self.corolla_offset(idx)
    }
}

/// Evaluates a decorated tree or graph in an operad.
///
/// Trees compose children left to right and then relabel by the leaf
/// order; graphs contract their edges in id order.
pub fn eval_shape(q: &Operad, shape: &Shape, decos: &[SVec], degs: &[i64]) -> SVec {
    match shape {
        Shape::Tree(t) => {
            let mut pos = 0;
            let v = eval_tree(q, t, decos, &mut pos);
            q.relabel_vec((0, t.arity()), &t.leaves(), &v)
        }
        Shape::Graph(g) => {
            let verts = g
                .halves
                .iter()
                .enumerate()
                .map(|(v, hs)| DVertex { idx: (g.genus[v], hs.len()), vec: decos[v].clone(), deg: degs[v], halves: hs.clone() })
                .collect();
            let order: Vec<(usize, bool)> = g.edge_ends().keys().map(|&e| (e, false)).collect();
            q.eval_decorated(verts, &order).map(|(_, v)| v).unwrap_or_default()
        }
    }
}

fn eval_tree(q: &Operad, t: &Tree, decos: &[SVec], pos: &mut usize) -> SVec {
    let mut val = decos[*pos].clone();
    *pos += 1;
    let mut cur = (0, t.children.len());
    let mut slot = 0;
    for c in &t.children {
        match c {
            crate::trees::Child::Leaf(_) => slot += 1,
            crate::trees::Child::Sub(s) => {
                let sv = eval_tree(q, s, decos, pos);
                let m = s.arity();
                val = q.compose_vec(cur, &val, (0, m), &sv, slot);
                cur = (0, cur.1 + m - 1);
                slot += m;
            }
        }
    }
    val
}

fn levels(kind: Kind, window: usize) -> std::ops::RangeInclusive<usize> {
    kind.min_level()..=window
}

/// Free object on a dg Σ-module: the differential is the internal one, extended as a derivation.
pub fn free_on(kind: Kind, gens: &BTreeMap<Idx, Component>, window: usize) -> FreeOperad {
    let mut f = FreeOperad::new(kind);
    for n in levels(kind, window) {
        let here: BTreeMap<Idx, Component> = gens.iter().filter(|(k, c)| kind.level(**k) == n && c.dim() > 0).map(|(k, c)| (*k, c.clone())).collect();
        f.begin_level(n, here.clone());
        let dgen = here.iter().map(|(&k, c)| (k, (0..c.dim()).map(|y| f.embed(k, &c.d.apply(&sv_unit(y)))).collect())).collect();
        f.finish_level(n, dgen);
    }
    f
}

/// `Γ(V)`: free operad on a Σ-module, arities `2..=max_arity`.
pub fn free_operad(gens: &BTreeMap<usize, Component>, max_arity: usize) -> FreeOperad {
    let g = gens.iter().filter(|(a, _)| **a >= 2).map(|(&a, c)| ((0, a), c.clone())).collect();
    free_on(Kind::Plain, &g, max_arity)
}

/// `M(V)`: free modular operad on a modular Σ-module, modular dimension up to `max_dim`.
pub fn free_modular_operad(gens: &BTreeMap<Idx, Component>, max_dim: usize) -> FreeOperad {
    free_on(Kind::Modular, gens, max_dim)
}

/// Extends generator images to the whole free object, on the indices both windows share.
pub fn extend_morphism(f: &FreeOperad, q: &Operad, images: &BTreeMap<Idx, Vec<SVec>>) -> OperadMorphism {
    let img = |t: Idx, y: usize| images.get(&t).and_then(|v| v.get(y)).cloned().unwrap_or_default();
    let comps = f
        .operad
        .comps
        .keys()
        .filter(|k| q.in_window(**k))
        .map(|&k| (k, f.morphism_on(q, k, &img)))
        .collect();
    OperadMorphism { comps }
}

/// `t_!` of a truncated operad, with its presentation.
#[derive(Clone, Debug)]
pub struct FreeExtension {
    pub operad: Operad,
    pub free: FreeOperad,
    /// The quotient map from the free object.
    pub projection: OperadMorphism,
    /// `t_n t_! P → P`, induced by evaluation.
    pub counit: OperadMorphism,
}

/// `t_!`: the free object on a truncated operad modulo the ideal generated by the kernel of evaluation.
pub fn extend_freely(p: &Operad, up_to: usize) -> FreeExtension {
    let kind = p.kind;
    let cut = p.window;
    let gens: BTreeMap<Idx, Component> = p.comps.iter().filter(|(_, c)| c.dim() > 0).map(|(k, c)| (*k, c.clone())).collect();
    let f = free_on(kind, &gens, up_to.max(cut));
    let images: BTreeMap<Idx, Vec<SVec>> = gens.iter().map(|(&k, c)| (k, (0..c.dim()).map(sv_unit).collect())).collect();
    let ev = extend_morphism(&f, p, &images);
    let mut seeds = BTreeMap::new();
    for (&idx, m) in &ev.comps {
        let ker = kernel(&m.to_dense());
        let vs: Vec<SVec> = ker.basis().iter().map(|v| crate::qlinalg::sv_from_dense(v)).collect();
        if !vs.is_empty() {
            seeds.insert(idx, vs);
        }
    }
    let ideal = super::ideal::ideal_closure(&f.operad, &seeds);
    let (mut q, projection) = super::ideal::quotient(&f.operad, &ideal).expect("closure is an ideal");
    q.window = up_to.max(cut);
    q.tower = Some(cut);
    let mut counit = OperadMorphism::default();
    for (&idx, pm) in &projection.comps {
        if !p.in_window(idx) {
            continue;
        }
        // quotient basis vectors are images of coordinate vectors
        let cols = (0..pm.rows)
            .map(|j| {
                let src = pm.cols.iter().position(|c| *c == sv_unit(j)).expect("quotient basis is a coordinate");
                ev.apply(idx, &sv_unit(src))
            })
            .collect();
        counit.comps.insert(idx, SpMat { rows: p.dim(idx), cols });
    }
    FreeExtension { operad: q, free: f, projection, counit }
}

/// Basis of the degree-0 equivariant chain maps from the generators into `q`, per index.
///
/// These are exactly the morphisms out of the free object on a dg Σ-module.
pub fn generator_maps(gens: &BTreeMap<Idx, Component>, q: &Operad) -> BTreeMap<Idx, Vec<SpMat>> {
    let mut out = BTreeMap::new();
    for (&idx, v) in gens {
        if !q.in_window(idx) || v.dim() == 0 {
            continue;
        }
        let w = q.component(idx);
        let unknowns: Vec<(usize, usize)> = (0..w.dim()).flat_map(|r| (0..v.dim()).map(move |c| (r, c))).filter(|&(r, c)| w.degrees[r] == v.degrees[c]).collect();
        if unknowns.is_empty() {
            continue;
        }
        let pos: BTreeMap<(usize, usize), usize> = unknowns.iter().enumerate().map(|(k, &rc)| (rc, k)).collect();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        // equation rows: (A f - f B) entries for each pair (A, B) of target/source operators
        let mut pairs: Vec<(SpMat, SpMat)> = vec![(w.d.clone(), v.d.clone())];
        pairs.extend(w.gens.iter().cloned().zip(v.gens.iter().cloned()));
        for (a, b) in &pairs {
            for r in 0..w.dim() {
                for c in 0..v.dim() {
                    let mut row = vec![Rational::zero(); unknowns.len()];
                    // (A f)[r][c] = Σ_k A[r][k] f[k][c]
                    for k in 0..w.dim() {
                        if let (Some(x), Some(&u)) = (a.cols[k].get(&r), pos.get(&(k, c))) {
                            row[u] += x;
                        }
                    }
                    // (f B)[r][c] = Σ_k f[r][k] B[k][c]
                    for (&k, x) in &b.cols[c] {
                        if let Some(&u) = pos.get(&(r, k)) {
                            row[u] -= x;
                        }
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        let m = crate::qlinalg::Matrix::from_rows_sized(rows.len(), unknowns.len(), rows);
        let sols = kernel(&m);
        let maps: Vec<SpMat> = sols
            .basis()
            .iter()
            .map(|s| {
                let mut mat = SpMat::zeros(w.dim(), v.dim());
                for (k, &(r, c)) in unknowns.iter().enumerate() {
                    if !s[k].is_zero() {
                        mat.cols[c].insert(r, s[k].clone());
                    }
                }
                mat
            })
            .collect();
        out.insert(idx, maps);
    }
    out
}

/// Dimension of the space of morphisms from the free object on `gens` into `q`.
pub fn hom_dim_from_free(gens: &BTreeMap<Idx, Component>, q: &Operad) -> usize {
    generator_maps(gens, q).values().map(Vec::len).sum()
}

/// Turns a generator-level map into images suitable for [`extend_morphism`].
pub fn images_of(maps: &BTreeMap<Idx, SpMat>) -> BTreeMap<Idx, Vec<SVec>> {
    maps.iter().map(|(&k, m)| (k, m.cols.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::com;
    use crate::operad::{homology_operad, weak_equivalence_test};
    use crate::qlinalg::q;
    use crate::sigma::{Permutation, SymComplex};

    fn triv(arity: usize, degrees: Vec<i64>) -> Component {
        Component::graded(arity, degrees)
    }

    /// Independent count: `f(n) = Σ_k dim V(k) · #{weighted partitions of n into k blocks}`.
    fn tree_sum_oracle(vdims: &BTreeMap<usize, usize>, n: usize) -> usize {
        let mut f = vec![0usize; n + 1];
        let binom = |a: usize, b: usize| -> usize { (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1)) };
        for m in 2..=n {
            // g[k][s]: weighted partitions of an s-set into k blocks
            let mut g = vec![vec![0usize; m + 1]; m + 1];
            g[0][0] = 1;
            for k in 1..=m {
                for s in 1..=m {
                    for b in 1..=s {
                        let w = if b == 1 { 1 } else { f[b] };
                        g[k][s] += binom(s - 1, b - 1) * w * g[k - 1][s - b];
                    }
                }
            }
            f[m] = (2..=m).map(|k| vdims.get(&k).copied().unwrap_or(0) * g[k][m]).sum();
        }
        f[n]
    }

    #[test]
    fn binary_generator_gives_tree_counts() {
        let gens = BTreeMap::from([(2, triv(2, vec![0]))]);
        let f = free_operad(&gens, 4);
        f.operad.validate().unwrap();
        let vd = BTreeMap::from([(2, 1)]);
        for n in 2..=4 {
            assert_eq!(f.operad.dim((0, n)), tree_sum_oracle(&vd, n));
        }
        assert_eq!(f.operad.dim((0, 3)), 3);
    }

    #[test]
    fn regular_binary_generator() {
        let reg = Component::from_sym(&SymComplex::regular(2, 1));
        let gens = BTreeMap::from([(2, reg), (3, triv(3, vec![0]))]);
        let f = free_operad(&gens, 4);
        f.operad.validate().unwrap();
        let vd = BTreeMap::from([(2, 2), (3, 1)]);
        for n in 2..=4 {
            assert_eq!(f.operad.dim((0, n)), tree_sum_oracle(&vd, n));
        }
    }

    #[test]
    fn evaluation_in_the_free_operad_is_the_identity() {
        let gens = BTreeMap::from([(2, Component::from_sym(&SymComplex::sign_rep(2, 1))), (3, triv(3, vec![2]))]);
        let f = free_operad(&gens, 4);
        let images: BTreeMap<Idx, Vec<SVec>> = f.gens.iter().map(|(&k, c)| (k, (0..c.dim()).map(|y| f.generator(k, y)).collect())).collect();
        let id = extend_morphism(&f, &f.operad, &images);
        assert_eq!(id, OperadMorphism::identity(&f.operad));
    }

    #[test]
    fn morphism_to_com() {
        let gens = BTreeMap::from([(2, triv(2, vec![0])), (3, triv(3, vec![0]))]);
        let f = free_operad(&gens, 4);
        let target = com(4);
        let maps = generator_maps(&f.gens, &target);
        assert_eq!(maps.values().map(Vec::len).sum::<usize>(), 2);
        let images = BTreeMap::from([((0, 2), vec![sv_unit(0)]), ((0, 3), vec![SVec::new()])]);
        let m = extend_morphism(&f, &target, &images);
        m.check(&f.operad, &target).unwrap();
    }

    #[test]
    fn quasi_free_differential() {
        // d(c) = the two composites of the binary generator with a sign: an associator
        let mut f = FreeOperad::new(Kind::Plain);
        f.push_level(2, BTreeMap::from([((0, 2), triv(2, vec![0]))]), BTreeMap::new());
        f.begin_level(3, BTreeMap::from([((0, 3), Component::from_sym(&SymComplex::regular(3, 1)))]));
        let a = f.operad.compose_basis((0, 2), 0, (0, 2), 0, 0);
        let b = f.operad.compose_basis((0, 2), 0, (0, 2), 0, 1);
        let mut assoc = a.clone();
        sv_add_scaled(&mut assoc, &b, &q(-1));
        // e·p ↦ associator·p
        let comp = &f.operad.comps[&(0, 3)];
        let v = &f.gens[&(0, 3)];
        let mut dgen = vec![SVec::new(); 6];
        for p in Permutation::all(3) {
            let e = v.act(&p, &sv_unit(0));
            let (&y, c) = e.iter().next().unwrap();
            assert_eq!(e.len(), 1);
            dgen[y] = sv_scale(&comp.act(&p, &assoc), &c.recip());
        }
        f.finish_level(3, BTreeMap::from([((0, 3), dgen)]));
        f.operad.validate().unwrap();
        let (h, _) = homology_operad(&f.operad);
        assert_eq!(h.graded_dims()[&(0, 3)], BTreeMap::from([(0, 1), (1, 4)]));
    }

    #[test]
    fn modular_free_dims() {
        let gens = BTreeMap::from([((0, 3), triv(3, vec![0])), ((1, 1), triv(1, vec![0]))]);
        let f = free_modular_operad(&gens, 2);
        f.operad.validate().unwrap();
        assert_eq!(f.operad.dim((0, 3)), 1);
        assert_eq!(f.operad.dim((1, 1)), 2);
        assert_eq!(f.operad.dim((0, 4)), 3);
        assert_eq!(f.operad.dim((1, 2)), 3);
    }

    #[test]
    fn odd_modular_generators_kill_symmetric_loops() {
        let odd = triv(3, vec![1]);
        let f = free_modular_operad(&BTreeMap::from([((0, 3), odd)]), 1);
        f.operad.validate().unwrap();
        assert_eq!(f.operad.dim((1, 1)), 1);
        let sign = Component::from_sym(&SymComplex::sign_rep(3, 0));
        let f = free_modular_operad(&BTreeMap::from([((0, 3), sign)]), 1);
        f.operad.validate().unwrap();
        assert_eq!(f.operad.dim((1, 1)), 0);
    }

    #[test]
    fn extend_freely_of_a_free_truncation() {
        let gens = BTreeMap::from([(2, triv(2, vec![0]))]);
        let f = free_operad(&gens, 4);
        let t = extend_freely(&f.operad.truncate(2), 4).operad;
        t.validate().unwrap();
        assert_eq!(t.dims(), f.operad.dims());
        let mut low = t.truncate(2);
        low.tower = None;
        assert_eq!(low, f.operad.truncate(2));
    }

    #[test]
    fn extend_freely_of_com() {
        let ext = extend_freely(&com(4).truncate(3), 4);
        let t = ext.operad;
        t.validate().unwrap();
        let low = t.truncate(3);
        ext.counit.check(&low, &com(3)).unwrap();
        assert!(ext.counit.comps.values().all(|m| m.rows == m.cols.len() && m.to_dense().rank() == m.rows));
        assert_eq!(t.dim((0, 4)), 1);
        let id = OperadMorphism::identity(&t);
        assert!(weak_equivalence_test(&id, &t, &t).equivalence);
    }
}
