//! Symmetric groups, Σ-modules and modular Σ-modules.
//!
//! Right actions are stored on the adjacent transpositions `s_k = (k k+1)`.
//! Matrices act on columns, so `x·σ = ρ(σ) x` and `ρ(στ) = ρ(τ) ρ(σ)`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use crate::chain::{homology, ChainComplex, ChainMap};
use crate::qlinalg::{q, Matrix, Rational, Subspace};

/// A bijection of `{0..n-1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation { images })
    }

    /// From 1-based images.
    pub fn from_one_based(images: &[usize]) -> Option<Self> {
        if images.contains(&0) {
            return None;
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// The adjacent transposition swapping `k` and `k+1` (0-based).
    pub fn adjacent(n: usize, k: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(k, k + 1);
        p
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n());
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inversions(&self) -> usize {
        let n = self.n();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| self.images[i] > self.images[j]).count()
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i64 {
        if self.inversions() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Word `[k_1, ..., k_m]` with `self = s_{k_1} ∘ ... ∘ s_{k_m}`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut cur = self.clone();
        let mut recorded = Vec::new();
        while let Some(k) = (0..cur.n().saturating_sub(1)).find(|&k| cur.images[k] > cur.images[k + 1]) {
            cur = cur.compose(&Permutation::adjacent(cur.n(), k));
            recorded.push(k);
        }
        recorded.reverse();
        recorded
    }

    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        permute_rec(&mut cur, 0, &mut out);
        out.sort();
        out
    }
}

fn permute_rec(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
    if k == cur.len() {
        out.push(Permutation { images: cur.clone() });
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute_rec(cur, k + 1, out);
        cur.swap(k, i);
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.images.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", s.join(" "))
    }
}

/// Matrix of the right permutation action on `Q^n`: `e_i · σ = e_{σ^{-1}(i)}`.
pub fn permutation_matrix(p: &Permutation) -> Matrix {
    let n = p.n();
    let inv = p.inverse();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m.set(inv.apply(i), i, q(1));
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionViolation {
    #[error("expected {expected} generators, found {found}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("generator s_{gen} is not a chain endomorphism of the component")]
    NotChainMap { gen: usize },
    #[error("s_{gen}^2 != id")]
    Involution { gen: usize },
    #[error("braid relation fails for s_{gen}, s_{}", .gen + 1)]
    Braid { gen: usize },
    #[error("s_{a} and s_{b} do not commute")]
    Commutation { a: usize, b: usize },
}

/// A chain complex with a right Σ_l-action given on adjacent transpositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymComplex {
    pub arity: usize,
    pub complex: ChainComplex,
    /// `gens[k]` is the action of `s_k`, `0 ≤ k < arity-1`.
    pub gens: Vec<ChainMap>,
}

impl SymComplex {
    pub fn new(arity: usize, complex: ChainComplex, gens: Vec<ChainMap>) -> Result<Self, ActionViolation> {
        let s = SymComplex { arity, complex, gens };
        s.validate()?;
        Ok(s)
    }

    pub fn trivial(arity: usize, complex: ChainComplex) -> Self {
        let id = ChainMap::identity(&complex);
        SymComplex { arity, gens: vec![id; arity.saturating_sub(1)], complex }
    }

    pub fn zero(arity: usize) -> Self {
        Self::trivial(arity, ChainComplex::zero())
    }

    /// The regular representation `Q[Σ_l]` placed in `degree`.
    pub fn regular(arity: usize, degree: i64) -> Self {
        let elems = Permutation::all(arity);
        let index: BTreeMap<&Permutation, usize> = elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let n = elems.len();
        let c = ChainComplex::graded([(degree, n)]);
        let gens = (0..arity.saturating_sub(1))
            .map(|k| {
                let s = Permutation::adjacent(arity, k);
                let mut m = Matrix::zeros(n, n);
                for (i, p) in elems.iter().enumerate() {
                    m.set(index[&p.compose(&s)], i, q(1));
                }
                ChainMap::new(c.clone(), c.clone(), [(degree, m)].into_iter().collect()).unwrap()
            })
            .collect();
        SymComplex { arity, complex: c, gens }
    }

    /// One-dimensional sign representation in `degree`.
    pub fn sign_rep(arity: usize, degree: i64) -> Self {
        let c = ChainComplex::graded([(degree, 1)]);
        let g = ChainMap::new(c.clone(), c.clone(), [(degree, Matrix::from_i64(&[&[-1]]))].into_iter().collect()).unwrap();
        SymComplex { arity, gens: vec![g; arity.saturating_sub(1)], complex: c }
    }

    pub fn validate(&self) -> Result<(), ActionViolation> {
        let expected = self.arity.saturating_sub(1);
        if self.gens.len() != expected {
            return Err(ActionViolation::GeneratorCount { expected, found: self.gens.len() });
        }
        let id = ChainMap::identity(&self.complex);
        for (k, g) in self.gens.iter().enumerate() {
            if g.source != self.complex || g.target != self.complex || !g.is_chain_map() {
                return Err(ActionViolation::NotChainMap { gen: k });
            }
            if g.compose(g) != id {
                return Err(ActionViolation::Involution { gen: k });
            }
        }
        for k in 0..expected.saturating_sub(1) {
            let (a, b) = (&self.gens[k], &self.gens[k + 1]);
            if a.compose(b).compose(a) != b.compose(a).compose(b) {
                return Err(ActionViolation::Braid { gen: k });
            }
        }
        for a in 0..expected {
            for b in a + 2..expected {
                let (x, y) = (&self.gens[a], &self.gens[b]);
                if x.compose(y) != y.compose(x) {
                    return Err(ActionViolation::Commutation { a, b });
                }
            }
        }
        Ok(())
    }

    /// `ρ(σ)`, evaluated through an adjacent-transposition word.
    pub fn action(&self, p: &Permutation) -> ChainMap {
        assert_eq!(p.n(), self.arity);
        let mut acc = ChainMap::identity(&self.complex);
        for k in p.adjacent_word() {
            acc = self.gens[k].compose(&acc);
        }
        acc
    }

    /// Action of a word `s_{k_1} ... s_{k_m}` evaluated generator by generator.
    pub fn act_word(&self, word: &[usize]) -> ChainMap {
        let mut acc = ChainMap::identity(&self.complex);
        for &k in word {
            acc = self.gens[k].compose(&acc);
        }
        acc
    }

    /// Averaging idempotent `(1/l!) Σ_σ ρ(σ)`.
    pub fn averaging(&self) -> ChainMap {
        averaging(&self.complex, &self.gens)
    }
}

/// Closes a set of invertible endomorphisms under composition.
pub fn group_closure(c: &ChainComplex, gens: &[ChainMap]) -> Vec<ChainMap> {
    let id = ChainMap::identity(c);
    let mut seen: HashSet<ChainMap> = HashSet::new();
    let mut out = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    out
}

pub fn averaging(c: &ChainComplex, gens: &[ChainMap]) -> ChainMap {
    let elems = group_closure(c, gens);
    let n = elems.len() as i64;
    let mut acc = ChainMap::zero(c, c);
    for e in &elems {
        acc = acc.add(e);
    }
    acc.scale(&Rational::new(1.into(), n.into()))
}

/// Coinvariants `C_G`, realised as the image of the averaging idempotent.
pub fn coinvariants(c: &ChainComplex, action: &[ChainMap]) -> (ChainComplex, ChainMap) {
    let e = averaging(c, action);
    let images: BTreeMap<i64, Subspace> = c.degrees().into_iter().map(|i| (i, Subspace::column_space(&e.comp(i)))).collect();
    let dims = images.iter().map(|(&i, s)| (i, s.dim())).collect();
    let mut diffs = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for (&i, s) in &images {
        let coords = |v: &[Rational], sub: &Subspace| sub.coordinates(v).expect("vector lies in the image");
        let ei = e.comp(i);
        let p: Vec<Vec<Rational>> = ei.columns().iter().map(|v| coords(v, s)).collect();
        proj.insert(i, Matrix::from_cols(s.dim(), &p));
        if let Some(prev) = images.get(&(i - 1)) {
            let d = c.d(i);
            let cols: Vec<Vec<Rational>> = s.basis().iter().map(|b| coords(&d.mul_vec(b), prev)).collect();
            diffs.insert(i, Matrix::from_cols(prev.dim(), &cols));
        }
    }
    let quot = ChainComplex::new(dims, diffs).expect("averaging commutes with d");
    let proj = ChainMap::new(c.clone(), quot.clone(), proj).expect("projection is a chain map");
    (quot, proj)
}

/// Arity-indexed family of complexes with right Σ_l-actions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SigmaModule {
    pub components: BTreeMap<usize, SymComplex>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("arity {arity}: {violation}")]
pub struct SigmaViolation {
    pub arity: String,
    pub violation: ActionViolation,
}

impl SigmaModule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, c: SymComplex) -> Self {
        self.components.insert(c.arity, c);
        self
    }

    pub fn get(&self, arity: usize) -> Option<&SymComplex> {
        self.components.get(&arity).filter(|c| !c.complex.is_zero())
    }

    pub fn complex(&self, arity: usize) -> ChainComplex {
        self.get(arity).map(|c| c.complex.clone()).unwrap_or_default()
    }

    pub fn max_arity(&self) -> usize {
        self.components.iter().filter(|(_, c)| !c.complex.is_zero()).map(|(&a, _)| a).max().unwrap_or(0)
    }

    pub fn validate_action(&self) -> Result<(), SigmaViolation> {
        for (a, c) in &self.components {
            if c.arity != *a {
                return Err(SigmaViolation {
                    arity: a.to_string(),
                    violation: ActionViolation::GeneratorCount { expected: a.saturating_sub(1), found: c.gens.len() },
                });
            }
            c.validate().map_err(|violation| SigmaViolation { arity: a.to_string(), violation })?;
        }
        Ok(())
    }
}

/// `(g,l)`-indexed family with `2g - 2 + l > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModularSigmaModule {
    pub components: BTreeMap<(usize, usize), SymComplex>,
}

pub fn is_stable(g: usize, l: usize) -> bool {
    2 * g + l > 2
}

/// Modular dimension `d(g,l) = 3g - 3 + l`.
pub fn modular_dimension(g: usize, l: usize) -> i64 {
    3 * g as i64 - 3 + l as i64
}

/// All stable `(g,l)` with `d(g,l) = d`.
pub fn indices_of_dimension(d: i64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if d < 0 {
        return out;
    }
    for g in 0..=((d + 3) / 3) as usize {
        let l = d + 3 - 3 * g as i64;
        if l >= 0 && is_stable(g, l as usize) {
            out.push((g, l as usize));
        }
    }
    out
}

impl ModularSigmaModule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, g: usize, c: SymComplex) -> Self {
        assert!(is_stable(g, c.arity), "unstable index ({g},{})", c.arity);
        self.components.insert((g, c.arity), c);
        self
    }

    pub fn get(&self, g: usize, l: usize) -> Option<&SymComplex> {
        self.components.get(&(g, l)).filter(|c| !c.complex.is_zero())
    }

    pub fn complex(&self, g: usize, l: usize) -> ChainComplex {
        self.get(g, l).map(|c| c.complex.clone()).unwrap_or_default()
    }

    pub fn validate_action(&self) -> Result<(), SigmaViolation> {
        for (&(g, l), c) in &self.components {
            let arity = format!("({g},{l})");
            if !is_stable(g, l) {
                return Err(SigmaViolation { arity, violation: ActionViolation::GeneratorCount { expected: 0, found: 0 } });
            }
            if c.arity != l {
                return Err(SigmaViolation {
                    arity,
                    violation: ActionViolation::GeneratorCount { expected: l.saturating_sub(1), found: c.gens.len() },
                });
            }
            c.validate().map_err(|violation| SigmaViolation { arity, violation })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("map in arity {arity} does not commute with generator s_{generator}")]
pub struct EquivarianceViolation {
    pub arity: String,
    pub generator: usize,
}

/// Checks `f ∘ ρ(s_k) = ρ(s_k) ∘ f` on one component.
pub fn check_equivariant(src: &SymComplex, tgt: &SymComplex, f: &ChainMap, arity: String) -> Result<(), EquivarianceViolation> {
    for k in 0..src.arity.saturating_sub(1) {
        let lhs = f.compose(&src.gens[k]);
        let rhs = tgt.gens[k].compose(f);
        if lhs.components() != rhs.components() {
            return Err(EquivarianceViolation { arity, generator: k });
        }
    }
    Ok(())
}

/// Checks equivariance of a per-arity family of maps between Σ-modules.
pub fn weight_of_equivariance_check(
    src: &SigmaModule,
    tgt: &SigmaModule,
    f: &BTreeMap<usize, ChainMap>,
) -> Result<(), EquivarianceViolation> {
    for (&a, fa) in f {
        let s = src.components.get(&a).cloned().unwrap_or_else(|| SymComplex::zero(a));
        let t = tgt.components.get(&a).cloned().unwrap_or_else(|| SymComplex::zero(a));
        check_equivariant(&s, &t, fa, a.to_string())?;
    }
    Ok(())
}

/// Homology of a Σ-complex with the induced action.
pub fn homology_sym(c: &SymComplex) -> SymComplex {
    let h = homology(&c.complex);
    let hc = h.as_complex();
    let gens = c
        .gens
        .iter()
        .map(|g| {
            let comps = hc.degrees().into_iter().map(|i| (i, g.on_homology(&h, &h, i))).collect();
            ChainMap::new(hc.clone(), hc.clone(), comps).unwrap()
        })
        .collect();
    SymComplex { arity: c.arity, complex: hc, gens }
}
