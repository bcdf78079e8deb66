//! Reduced labelled trees and stable graphs, enumerated up to isomorphism.
//!
//! Leaves and legs are 0-based internally and printed 1-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::chain::{tensor_all, ChainComplex};
use crate::sigma::{is_stable, ModularSigmaModule, Permutation, SigmaModule};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Child {
    Leaf(usize),
    Sub(Tree),
}

/// A reduced rooted tree; inputs of each vertex sorted by their minimal leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    pub children: Vec<Child>,
}

impl Child {
    fn min_leaf(&self) -> usize {
        match self {
            Child::Leaf(x) => *x,
            Child::Sub(t) => t.min_leaf(),
        }
    }
}

impl Tree {
    pub fn corolla(n: usize) -> Tree {
        Tree { children: (0..n).map(Child::Leaf).collect() }
    }

    pub fn min_leaf(&self) -> usize {
        self.children.iter().map(Child::min_leaf).min().expect("vertex has inputs")
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for c in &self.children {
            match c {
                Child::Leaf(x) => out.push(*x),
                Child::Sub(t) => out.extend(t.leaves()),
            }
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.leaves().len()
    }

    /// Input counts of the vertices in preorder.
    pub fn vertex_arities(&self) -> Vec<usize> {
        let mut out = vec![self.children.len()];
        for c in &self.children {
            if let Child::Sub(t) = c {
                out.extend(t.vertex_arities());
            }
        }
        out
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_arities().len()
    }

    pub fn is_reduced(&self) -> bool {
        self.children.len() >= 2
            && self.children.iter().all(|c| match c {
                Child::Leaf(_) => true,
                Child::Sub(t) => t.is_reduced(),
            })
    }

    pub fn is_canonical(&self) -> bool {
        self.children.windows(2).all(|w| w[0].min_leaf() < w[1].min_leaf())
            && self.children.iter().all(|c| match c {
                Child::Leaf(_) => true,
                Child::Sub(t) => t.is_canonical(),
            })
    }

    pub fn tagged(&self, offset: usize) -> TaggedTree {
        let mut counter = offset;
        self.tagged_rec(&mut counter)
    }

    fn tagged_rec(&self, counter: &mut usize) -> TaggedTree {
        let tag = *counter;
        *counter += 1;
        let children = self
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(x) => TChild::Leaf(*x),
                Child::Sub(t) => TChild::Sub(t.tagged_rec(counter)),
            })
            .collect();
        TaggedTree { tag, children }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.children.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            match c {
                Child::Leaf(x) => write!(f, "{}", x + 1)?,
                Child::Sub(t) => write!(f, "{t}")?,
            }
        }
        write!(f, ")")
    }
}

/// A tree presentation whose vertices carry tags (tensor positions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedTree {
    pub tag: usize,
    pub children: Vec<TChild>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TChild {
    Leaf(usize),
    Sub(TaggedTree),
}

/// Where each tagged vertex goes: canonical preorder index and input relabelling.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexMap {
    pub position: BTreeMap<usize, usize>,
    pub relabel: BTreeMap<usize, Vec<usize>>,
}

impl TaggedTree {
    pub fn arity(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                TChild::Leaf(_) => 1,
                TChild::Sub(t) => t.arity(),
            })
            .sum()
    }

    fn map_leaves(&mut self, f: &dyn Fn(usize) -> usize) {
        for c in &mut self.children {
            match c {
                TChild::Leaf(x) => *x = f(*x),
                TChild::Sub(t) => t.map_leaves(f),
            }
        }
    }

    /// Leaf `x` becomes `new_of_old[x]`.
    pub fn relabel(&self, new_of_old: &[usize]) -> TaggedTree {
        let mut t = self.clone();
        t.map_leaves(&|x| new_of_old[x]);
        t
    }

    /// Grafts `other` onto leaf `i`, with the usual shift of labels.
    pub fn graft(&self, i: usize, other: &TaggedTree) -> TaggedTree {
        let m = other.arity();
        let mut base = self.clone();
        base.map_leaves(&|x| if x > i { x + m - 1 } else { x });
        let mut sub = other.clone();
        sub.map_leaves(&|x| x + i);
        assert!(base.replace_leaf(i, &sub), "leaf {i} not found");
        base
    }

    fn replace_leaf(&mut self, i: usize, sub: &TaggedTree) -> bool {
        for c in &mut self.children {
            match c {
                TChild::Leaf(x) if *x == i => {
                    *c = TChild::Sub(sub.clone());
                    return true;
                }
                TChild::Sub(t) => {
                    if t.replace_leaf(i, sub) {
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }

    pub fn canonicalize(&self) -> (Tree, VertexMap) {
        let (tree, entries, _) = self.canon_rec();
        let mut position = BTreeMap::new();
        let mut relabel = BTreeMap::new();
        for (tag, pos, perm) in entries {
            position.insert(tag, pos);
            relabel.insert(tag, perm);
        }
        (tree, VertexMap { position, relabel })
    }

    #[allow(clippy::type_complexity)]
    fn canon_rec(&self) -> (Tree, Vec<(usize, usize, Vec<usize>)>, usize) {
        let mut kids: Vec<(usize, Child, Vec<(usize, usize, Vec<usize>)>, usize)> = Vec::new();
        for c in &self.children {
            match c {
                TChild::Leaf(x) => kids.push((*x, Child::Leaf(*x), vec![], 0)),
                TChild::Sub(t) => {
                    let (ct, e, n) = t.canon_rec();
                    kids.push((ct.min_leaf(), Child::Sub(ct), e, n));
                }
            }
        }
        let mut order: Vec<usize> = (0..kids.len()).collect();
        order.sort_by_key(|&k| kids[k].0);
        let mut new_of_old = vec![0; kids.len()];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        let mut entries = vec![(self.tag, 0, new_of_old)];
        let mut offset = 1;
        let mut children = Vec::new();
        for &k in &order {
            let (_, ch, e, n) = &kids[k];
            children.push(ch.clone());
            entries.extend(e.iter().map(|(t, p, perm)| (*t, p + offset, perm.clone())));
            offset += n;
        }
        (Tree { children }, entries, offset)
    }
}

/// Set partitions of `items` into blocks, blocks ordered by first element.
pub fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for mut p in set_partitions(&items[1..]) {
        for b in 0..p.len() {
            let mut q = p.clone();
            q[b].insert(0, first);
            out.push(q);
        }
        p.insert(0, vec![first]);
        out.push(p);
    }
    for p in &mut out {
        p.sort();
    }
    out
}

fn trees_on(leaves: &[usize]) -> Vec<Tree> {
    let mut out = Vec::new();
    for part in set_partitions(leaves) {
        if part.len() < 2 {
            continue;
        }
        let options: Vec<Vec<Child>> = part
            .iter()
            .map(|b| if b.len() == 1 { vec![Child::Leaf(b[0])] } else { trees_on(b).into_iter().map(Child::Sub).collect() })
            .collect();
        let mut acc: Vec<Vec<Child>> = vec![vec![]];
        for opts in &options {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    opts.iter().map(move |o| {
                        let mut p = prefix.clone();
                        p.push(o.clone());
                        p
                    })
                })
                .collect();
        }
        out.extend(acc.into_iter().map(|children| Tree { children }));
    }
    out
}

/// All reduced trees with leaves `0..n`, one per isomorphism class, sorted.
pub fn enumerate_trees(n: usize) -> Vec<Tree> {
    if n < 2 {
        return vec![];
    }
    let leaves: Vec<usize> = (0..n).collect();
    let mut ts = trees_on(&leaves);
    ts.sort();
    ts
}

/// `V(T) = ⊗_v V(In(v))` over vertices in preorder.
pub fn tree_space(t: &Tree, v: &SigmaModule) -> ChainComplex {
    let factors: Vec<ChainComplex> = t.vertex_arities().into_iter().map(|a| v.complex(a)).collect();
    tensor_all(&factors)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Half {
    Leg(usize),
    Edge(usize),
}

/// A connected graph with genus-decorated vertices and ordered half-edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StableGraph {
    pub genus: Vec<usize>,
    pub halves: Vec<Vec<Half>>,
}

/// A map of presented vertices into a canonical graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphMap {
    /// Target vertex of each source vertex.
    pub vertex: Vec<usize>,
    /// Per source vertex, the target position of each of its half-edge positions.
    pub relabel: Vec<Vec<usize>>,
}

impl StableGraph {
    pub fn corolla(g: usize, l: usize) -> StableGraph {
        StableGraph { genus: vec![g], halves: vec![(0..l).map(Half::Leg).collect()] }
    }

    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    pub fn num_edges(&self) -> usize {
        self.halves.iter().flatten().filter(|h| matches!(h, Half::Edge(_))).count() / 2
    }

    pub fn num_legs(&self) -> usize {
        self.halves.iter().flatten().filter(|h| matches!(h, Half::Leg(_))).count()
    }

    /// `Σ g(v) + b_1`.
    pub fn total_genus(&self) -> usize {
        let b1 = self.num_edges() + 1 - self.num_vertices();
        self.genus.iter().sum::<usize>() + b1
    }

    /// `(g(v), |Leg(v)|)` per vertex.
    pub fn vertex_types(&self) -> Vec<(usize, usize)> {
        self.genus.iter().zip(&self.halves).map(|(&g, h)| (g, h.len())).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return false;
        }
        let ends = self.edge_ends();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &((a, _), (b, _)) in ends.values() {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_stable(&self) -> bool {
        self.vertex_types().into_iter().all(|(g, n)| is_stable(g, n))
    }

    /// Checks edge pairing, leg labels, connectivity and stability.
    pub fn is_valid(&self) -> bool {
        let mut edges: BTreeMap<usize, usize> = BTreeMap::new();
        let mut legs = BTreeSet::new();
        for h in self.halves.iter().flatten() {
            match h {
                Half::Leg(x) => {
                    if !legs.insert(*x) {
                        return false;
                    }
                }
                Half::Edge(e) => *edges.entry(*e).or_default() += 1,
            }
        }
        edges.values().all(|&c| c == 2)
            && legs.iter().copied().eq(0..legs.len())
            && self.is_connected()
            && self.is_stable()
    }

    /// For each edge id, its two half-edge locations `(vertex, position)`, in reading order.
    pub fn edge_ends(&self) -> BTreeMap<usize, ((usize, usize), (usize, usize))> {
        let mut first: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for (v, hs) in self.halves.iter().enumerate() {
            for (p, h) in hs.iter().enumerate() {
                if let Half::Edge(e) = h {
                    match first.get(e) {
                        Some(&a) => {
                            out.insert(*e, (a, (v, p)));
                        }
                        None => {
                            first.insert(*e, (v, p));
                        }
                    }
                }
            }
        }
        out
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut a = vec![vec![0; n]; n];
        for ((u, _), (w, _)) in self.edge_ends().into_values() {
            a[u][w] += 1;
            if u != w {
                a[w][u] += 1;
            }
        }
        a
    }

    fn legs_at(&self, v: usize) -> Vec<usize> {
        let mut ls: Vec<usize> = self.halves[v].iter().filter_map(|h| if let Half::Leg(x) = h { Some(*x) } else { None }).collect();
        ls.sort();
        ls
    }

    #[allow(clippy::type_complexity)]
    fn encoding(&self, order: &[usize], adj: &[Vec<usize>]) -> Vec<(usize, Vec<usize>, Vec<usize>)> {
        order
            .iter()
            .map(|&old| (self.genus[old], self.legs_at(old), order.iter().map(|&w| adj[old][w]).collect()))
            .collect()
    }

    /// Vertex orders (`order[new] = old`) of minimal encoding, in lexicographic order.
    fn minimal_orders(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut best: Option<Vec<(usize, Vec<usize>, Vec<usize>)>> = None;
        let mut orders = Vec::new();
        for p in Permutation::all(self.num_vertices()) {
            let order = p.images().to_vec();
            let enc = self.encoding(&order, &adj);
            match &best {
                Some(b) if enc > *b => {}
                Some(b) if enc == *b => orders.push(order),
                _ => {
                    best = Some(enc);
                    orders = vec![order];
                }
            }
        }
        orders
    }

    /// Canonical representative built from a vertex order.
    fn build_canonical(&self, order: &[usize]) -> StableGraph {
        let adj = self.adjacency();
        let n = order.len();
        let a: Vec<Vec<usize>> = (0..n).map(|u| (0..n).map(|w| adj[order[u]][order[w]]).collect()).collect();
        let mut ids: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        for u in 0..n {
            for w in u..n {
                for t in 0..a[u][w] {
                    let id = ids.len();
                    ids.insert((u, w, t), id);
                }
            }
        }
        let mut halves = Vec::new();
        for u in 0..n {
            let mut hs: Vec<Half> = self.legs_at(order[u]).into_iter().map(Half::Leg).collect();
            for w in 0..n {
                for t in 0..a[u][w] {
                    let e = ids[&(u.min(w), u.max(w), t)];
                    hs.push(Half::Edge(e));
                    if w == u {
                        hs.push(Half::Edge(e));
                    }
                }
            }
            halves.push(hs);
        }
        StableGraph { genus: order.iter().map(|&o| self.genus[o]).collect(), halves }
    }

    /// Maps `self` onto the canonical graph obtained from vertex order `order`.
    fn map_onto(&self, order: &[usize], target: &StableGraph) -> GraphMap {
        let n = self.num_vertices();
        let mut vertex = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            vertex[old] = new;
        }
        let adj = target.adjacency();
        // block start of neighbour w inside target vertex u
        let base = |u: usize, w: usize| -> usize {
            let mut p = target.legs_at(u).len();
            for x in 0..w {
                p += if x == u { 2 * adj[u][x] } else { adj[u][x] };
            }
            p
        };
        let mut relabel: Vec<Vec<usize>> = self.halves.iter().map(|h| vec![usize::MAX; h.len()]).collect();
        for (v, hs) in self.halves.iter().enumerate() {
            let legs = target.legs_at(vertex[v]);
            for (p, h) in hs.iter().enumerate() {
                if let Half::Leg(x) = h {
                    relabel[v][p] = legs.iter().position(|y| y == x).unwrap();
                }
            }
        }
        // group presented edges by endpoint pair
        let mut groups: BTreeMap<(usize, usize), Vec<((usize, usize), (usize, usize))>> = BTreeMap::new();
        for (_, (h1, h2)) in self.edge_ends() {
            let (a, b) = (vertex[h1.0], vertex[h2.0]);
            // orient so the first end sits at the smaller target vertex
            let (x, y) = if a <= b { (h1, h2) } else { (h2, h1) };
            groups.entry((a.min(b), a.max(b))).or_default().push((x, y));
        }
        for ((u, w), mut es) in groups {
            if u == w {
                es.iter_mut().for_each(|e| {
                    if e.0 .1 > e.1 .1 {
                        std::mem::swap(&mut e.0, &mut e.1)
                    }
                });
                es.sort_by_key(|e| e.0 .1);
                let b = base(u, u);
                for (t, (x, y)) in es.into_iter().enumerate() {
                    relabel[x.0][x.1] = b + 2 * t;
                    relabel[y.0][y.1] = b + 2 * t + 1;
                }
            } else {
                es.sort_by_key(|e| e.0 .1);
                let (bu, bw) = (base(u, w), base(w, u));
                for (t, (x, y)) in es.into_iter().enumerate() {
                    relabel[x.0][x.1] = bu + t;
                    relabel[y.0][y.1] = bw + t;
                }
            }
        }
        GraphMap { vertex, relabel }
    }

    /// Canonical form and the map from `self` onto it.
    pub fn canonicalize(&self) -> (StableGraph, GraphMap) {
        let order = self.minimal_orders().into_iter().next().expect("nonempty graph");
        let c = self.build_canonical(&order);
        let m = self.map_onto(&order, &c);
        (c, m)
    }

    pub fn canonical(&self) -> StableGraph {
        self.canonicalize().0
    }

    /// Generators of the automorphism group of a canonical graph.
    pub fn automorphism_generators(&self) -> Vec<GraphMap> {
        let mut gens = Vec::new();
        for order in self.minimal_orders() {
            let m = self.map_onto(&order, self);
            if !m.is_identity() {
                gens.push(m);
            }
        }
        let ident = GraphMap::identity(self);
        let ends = self.edge_ends();
        let adj = self.adjacency();
        let n = self.num_vertices();
        for u in 0..n {
            for w in u..n {
                let es: Vec<_> = ends.values().filter(|((a, _), (b, _))| (*a, *b) == (u, w) || (*a, *b) == (w, u)).collect();
                debug_assert_eq!(es.len(), adj[u][w]);
                for t in 0..es.len() {
                    let (x, y) = *es[t];
                    if u == w {
                        let mut flip = ident.clone();
                        flip.relabel[u].swap(x.1, y.1);
                        gens.push(flip);
                    }
                    if t + 1 < es.len() {
                        let (x2, y2) = *es[t + 1];
                        let mut swap = ident.clone();
                        swap.relabel[x.0].swap(x.1, x2.1);
                        swap.relabel[y.0].swap(y.1, y2.1);
                        gens.push(swap);
                    }
                }
            }
        }
        gens.sort_by(|a, b| (&a.vertex, &a.relabel).cmp(&(&b.vertex, &b.relabel)));
        gens.dedup();
        gens
    }

    /// Checks that `m` maps `self` isomorphically onto `target`.
    pub fn is_isomorphism(&self, m: &GraphMap, target: &StableGraph) -> bool {
        let n = self.num_vertices();
        if target.num_vertices() != n || m.vertex.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in &m.vertex {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        for v in 0..n {
            let (s, t) = (&self.halves[v], &target.halves[m.vertex[v]]);
            if self.genus[v] != target.genus[m.vertex[v]] || s.len() != t.len() {
                return false;
            }
            if Permutation::new(m.relabel[v].clone()).is_none() {
                return false;
            }
            for (p, h) in s.iter().enumerate() {
                if let Half::Leg(x) = h {
                    if t[m.relabel[v][p]] != Half::Leg(*x) {
                        return false;
                    }
                }
            }
        }
        let te = target.edge_ends();
        let mut image_pairs = BTreeSet::new();
        for ((a, pa), (b, pb)) in self.edge_ends().into_values() {
            let x = (m.vertex[a], m.relabel[a][pa]);
            let y = (m.vertex[b], m.relabel[b][pb]);
            let pair = if x < y { (x, y) } else { (y, x) };
            if !matches!(target.halves[x.0][x.1], Half::Edge(_)) {
                return false;
            }
            image_pairs.insert(pair);
        }
        let target_pairs: BTreeSet<_> = te.into_values().map(|(x, y)| if x < y { (x, y) } else { (y, x) }).collect();
        image_pairs == target_pairs
    }
}

impl GraphMap {
    pub fn identity(g: &StableGraph) -> GraphMap {
        GraphMap { vertex: (0..g.num_vertices()).collect(), relabel: g.halves.iter().map(|h| (0..h.len()).collect()).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex.iter().enumerate().all(|(i, &v)| i == v) && self.relabel.iter().all(|r| r.iter().enumerate().all(|(i, &p)| i == p))
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .genus
            .iter()
            .zip(&self.halves)
            .map(|(g, hs)| {
                let hs: Vec<String> = hs
                    .iter()
                    .map(|h| match h {
                        Half::Leg(x) => format!("{}", x + 1),
                        Half::Edge(e) => format!("e{e}"),
                    })
                    .collect();
                format!("g{g}[{}]", hs.join(" "))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn compositions_of(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in compositions_of(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn perfect_matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let a = items[0];
    let mut out = Vec::new();
    for k in 1..items.len() {
        let b = items[k];
        let rest: Vec<usize> = items[1..].iter().copied().filter(|&x| x != b).collect();
        for mut m in perfect_matchings(&rest) {
            m.insert(0, (a, b));
            out.push(m);
        }
    }
    out
}

/// Presented graphs with the given vertex types, legs and edges, before dedup.
fn graphs_with_types(types: &[(usize, usize)], l: usize, out: &mut BTreeSet<StableGraph>) {
    let n = types.len();
    let mut assign = vec![0usize; l];
    loop {
        let mut count = vec![0usize; n];
        for &v in &assign {
            count[v] += 1;
        }
        if count.iter().zip(types).all(|(&c, &(_, nv))| c <= nv) {
            let mut halves: Vec<Vec<Half>> = vec![vec![]; n];
            for (leg, &v) in assign.iter().enumerate() {
                halves[v].push(Half::Leg(leg));
            }
            let mut slots = Vec::new();
            for v in 0..n {
                for _ in count[v]..types[v].1 {
                    slots.push(v);
                }
            }
            let idx: Vec<usize> = (0..slots.len()).collect();
            for m in perfect_matchings(&idx) {
                let mut hs = halves.clone();
                let mut owner = vec![0; slots.len()];
                for (e, &(a, b)) in m.iter().enumerate() {
                    owner[a] = e;
                    owner[b] = e;
                }
                for (s, &v) in slots.iter().enumerate() {
                    hs[v].push(Half::Edge(owner[s]));
                }
                let g = StableGraph { genus: types.iter().map(|t| t.0).collect(), halves: hs };
                if g.is_connected() {
                    out.insert(g.canonical());
                }
            }
        }
        // next leg assignment
        let mut k = 0;
        while k < l {
            assign[k] += 1;
            if assign[k] < n {
                break;
            }
            assign[k] = 0;
            k += 1;
        }
        if k == l {
            break;
        }
    }
}

/// All stable graphs of genus `g` with `l` legs, one per isomorphism class, sorted.
pub fn enumerate_stable_graphs(g: usize, l: usize) -> Vec<StableGraph> {
    if !is_stable(g, l) {
        return vec![];
    }
    let total = 2 * g + l - 2;
    let mut out = BTreeSet::new();
    for nv in 1..=total {
        for excess in compositions_of(total, nv) {
            // vertex genus choices with 2g_v - 2 + n_v = excess_v, n_v >= 0
            let choices: Vec<Vec<(usize, usize)>> = excess
                .iter()
                .map(|&e| (0..=(e + 2) / 2).filter(|&gv| e + 2 >= 2 * gv).map(|gv| (gv, e + 2 - 2 * gv)).collect())
                .collect();
            let mut acc: Vec<Vec<(usize, usize)>> = vec![vec![]];
            for c in &choices {
                acc = acc
                    .into_iter()
                    .flat_map(|p| {
                        c.iter().map(move |&t| {
                            let mut q = p.clone();
                            q.push(t);
                            q
                        })
                    })
                    .collect();
            }
            for types in acc {
                let gsum: usize = types.iter().map(|t| t.0).sum();
                if gsum + 1 > g + nv {
                    continue;
                }
                let edges = g + nv - 1 - gsum;
                let halves: usize = types.iter().map(|t| t.1).sum();
                if halves != l + 2 * edges {
                    continue;
                }
                graphs_with_types(&types, l, &mut out);
            }
        }
    }
    out.into_iter().collect()
}

/// `V((γ)) = ⊗_v V((g(v), Leg(v)))` over vertices in canonical order.
pub fn graph_space(gamma: &StableGraph, v: &ModularSigmaModule) -> ChainComplex {
    let factors: Vec<ChainComplex> = gamma.vertex_types().into_iter().map(|(g, n)| v.complex(g, n)).collect();
    tensor_all(&factors)
}
