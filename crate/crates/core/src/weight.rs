//! Weights, purity and formality.
//!
//! Weights live in the cyclic group generated by a rational `α ∉ {0, ±1}`;
//! an eigenvalue `λ` has weight `n` when `λ = α^n`. A pure endomorphism acts
//! on `H_i` with the single eigenvalue `α^i`. The functor `T` keeps, in each
//! weight `n`, the canonical truncation `τ_{≥n}` of the weight-`n` summand.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::chain::{canonical_truncation, homology, tensor, tensor_maps, ChainComplex, ChainMap};
use crate::minimal::{minimal_model, ModelError};
use crate::operad::free::{extend_morphism, FreeOperad};
use crate::operad::{
    contract_target, equivariant_average, fmt_idx, grading_automorphism, homology_operad, rational_pow, weak_equivalence_test, Component, ComponentHomology, Idx, Operad,
    OperadMorphism,
};
use crate::qlinalg::{rational_eigen_split, rational_to_string, solve_matrix, solve_sparse, sv_add_scaled, sv_unit, Echelon, Matrix, Rational, SVec, SpMat, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weight base {0} is 0 or a root of unity")]
    BadBase(String),
    #[error("not pure at {location}: {reason}")]
    NotPure { location: String, reason: String },
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn not_pure(location: impl Into<String>, reason: impl Into<String>) -> WeightError {
    WeightError::NotPure { location: location.into(), reason: reason.into() }
}

/// `w(α^n) = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    alpha: Rational,
}

impl WeightFunction {
    pub fn new(alpha: Rational) -> Result<Self, WeightError> {
        if alpha.is_zero() || alpha.abs().is_one() {
            return Err(WeightError::BadBase(rational_to_string(&alpha)));
        }
        Ok(WeightFunction { alpha })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn value(&self, n: i64) -> Rational {
        rational_pow(&self.alpha, n)
    }

    /// The `n` with `α^n = λ`, if any.
    pub fn weight_of(&self, lambda: &Rational) -> Option<i64> {
        if lambda.is_one() {
            return Some(0);
        }
        if lambda.is_zero() {
            return None;
        }
        let target = lambda.abs();
        for step in [1i64, -1] {
            let base = rational_pow(&self.alpha, step);
            let growing = base.abs() > Rational::one();
            let mut p = Rational::one();
            let mut n = 0;
            loop {
                n += step;
                p *= &base;
                if p == *lambda {
                    return Some(n);
                }
                let a = p.abs();
                if (growing && a > target) || (!growing && a < target) {
                    break;
                }
            }
        }
        None
    }
}

/// `V = ⊕_n V^n ⊕ C`, per degree.
#[derive(Clone, Debug)]
pub struct WeightDecomposition {
    /// Weight, then degree.
    pub pure: BTreeMap<i64, BTreeMap<i64, Subspace>>,
    pub residual: BTreeMap<i64, Subspace>,
}

pub fn weight_decompose(c: &ChainComplex, f: &ChainMap, w: &WeightFunction) -> WeightDecomposition {
    let mut pure: BTreeMap<i64, BTreeMap<i64, Subspace>> = BTreeMap::new();
    let mut residual = BTreeMap::new();
    for i in c.degrees() {
        let split = rational_eigen_split(&f.comp(i));
        let mut rest = split.residual;
        for (lambda, space) in split.components {
            match w.weight_of(&lambda) {
                Some(n) => {
                    pure.entry(n).or_default().insert(i, space);
                }
                None => rest = rest.sum(&space),
            }
        }
        residual.insert(i, rest);
    }
    WeightDecomposition { pure, residual }
}

impl WeightDecomposition {
    fn families(&self) -> impl Iterator<Item = &BTreeMap<i64, Subspace>> {
        self.pure.values().chain(std::iter::once(&self.residual))
    }

    /// Every summand is a subcomplex.
    pub fn summands_are_subcomplexes(&self, c: &ChainComplex) -> bool {
        self.families().all(|fam| {
            fam.iter().all(|(&i, s)| {
                let d = c.d(i);
                s.basis().iter().all(|v| {
                    let dv = d.mul_vec(v);
                    dv.iter().all(Zero::is_zero) || fam.get(&(i - 1)).is_some_and(|t| t.contains(&dv))
                })
            })
        })
    }

    pub fn piece(&self, c: &ChainComplex, n: i64) -> (ChainComplex, ChainMap) {
        let empty = BTreeMap::new();
        sub_complex(c, &spaces_to_bases(self.pure.get(&n).unwrap_or(&empty))).expect("weight summands are subcomplexes")
    }

    pub fn residual_piece(&self, c: &ChainComplex) -> (ChainComplex, ChainMap) {
        sub_complex(c, &spaces_to_bases(&self.residual)).expect("residual is a subcomplex")
    }
}

fn spaces_to_bases(s: &BTreeMap<i64, Subspace>) -> BTreeMap<i64, Vec<Vec<Rational>>> {
    s.iter().map(|(&i, sp)| (i, sp.basis().to_vec())).collect()
}

/// The subcomplex spanned by the given independent vectors, with its inclusion.
pub fn sub_complex(c: &ChainComplex, bases: &BTreeMap<i64, Vec<Vec<Rational>>>) -> Option<(ChainComplex, ChainMap)> {
    let mats: BTreeMap<i64, Matrix> = c.degrees().into_iter().map(|i| (i, Matrix::from_cols(c.dim(i), bases.get(&i).map_or(&[][..], Vec::as_slice)))).collect();
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for (&i, b) in &mats {
        dims.insert(i, b.cols());
        if b.cols() == 0 {
            continue;
        }
        let image = c.d(i).mul(b);
        if image.is_zero() {
            continue;
        }
        let below = mats.get(&(i - 1))?;
        diffs.insert(i, solve_matrix(below, &image).ok()?);
    }
    let sub = ChainComplex::new(dims, diffs).ok()?;
    let inc = ChainMap::new(sub.clone(), c.clone(), mats).ok()?;
    Some((sub, inc))
}

/// A complex endomorphism certified pure of weight 0.
#[derive(Clone, Debug)]
pub struct PureEndomorphism {
    pub complex: ChainComplex,
    pub map: ChainMap,
    pub weight: WeightFunction,
}

pub fn purity_check_complex(c: &ChainComplex, f: &ChainMap, w: &WeightFunction) -> Result<PureEndomorphism, WeightError> {
    purity_at(c, f, w, "complex")?;
    Ok(PureEndomorphism { complex: c.clone(), map: f.clone(), weight: w.clone() })
}

fn purity_at(c: &ChainComplex, f: &ChainMap, w: &WeightFunction, location: &str) -> Result<(), WeightError> {
    if f.source != *c || f.target != *c || !f.is_chain_map() {
        return Err(not_pure(location, "not a chain endomorphism"));
    }
    let h = homology(c);
    for i in h.support() {
        let m = f.on_homology(&h, &h, i);
        let split = rational_eigen_split(&m);
        if split.residual.dim() > 0 {
            return Err(not_pure(format!("{location}, degree {i}"), "characteristic polynomial has an irrational factor"));
        }
        let want = w.value(i);
        if let Some((lambda, _)) = split.components.iter().find(|(l, _)| *l != want) {
            return Err(not_pure(format!("{location}, degree {i}"), format!("eigenvalue {} is not {}", rational_to_string(lambda), rational_to_string(&want))));
        }
    }
    Ok(())
}

/// An operad endomorphism certified pure of weight 0.
#[derive(Clone, Debug)]
pub struct PureOperadEndomorphism {
    pub operad: Operad,
    pub map: OperadMorphism,
    pub weight: WeightFunction,
}

pub fn purity_check(p: &Operad, f: &OperadMorphism, w: &WeightFunction) -> Result<PureOperadEndomorphism, WeightError> {
    f.check(p, p).map_err(|e| not_pure("structure maps", e.to_string()))?;
    for (&idx, c) in &p.comps {
        let (cc, fm) = component_pair(c, &f.matrix(idx, p, p));
        purity_at(&cc, &fm, w, &fmt_idx(p.kind, idx))?;
    }
    Ok(PureOperadEndomorphism { operad: p.clone(), map: f.clone(), weight: w.clone() })
}

/// `φ_α` on `p`, validated as an operad endomorphism.
pub fn grading_endomorphism(p: &Operad, w: &WeightFunction) -> Result<OperadMorphism, WeightError> {
    let f = grading_automorphism(p, w.alpha());
    f.check(p, p).map_err(|e| not_pure("grading automorphism", e.to_string()))?;
    Ok(f)
}

fn component_pair(c: &Component, f: &SpMat) -> (ChainComplex, ChainMap) {
    (c.to_complex(), c.chain_map(c, f))
}

/// The pieces `τ_{≥n} V^n` as (weight, vector) per degree, in `c`'s coordinates.
fn t_basis(c: &ChainComplex, f: &ChainMap, w: &WeightFunction) -> BTreeMap<i64, Vec<(i64, Vec<Rational>)>> {
    let dec = weight_decompose(c, f, w);
    let mut out: BTreeMap<i64, Vec<(i64, Vec<Rational>)>> = BTreeMap::new();
    for &n in dec.pure.keys() {
        let (piece, inc) = dec.piece(c, n);
        let (t, tinc) = canonical_truncation(&piece, n);
        let m = inc.compose(&tinc);
        for i in t.degrees() {
            out.entry(i).or_default().extend(m.comp(i).columns().into_iter().map(|v| (n, v)));
        }
    }
    out
}

/// `TP`, its inclusion into `P` and its projection onto `H(P)`.
#[derive(Clone, Debug)]
pub struct TFunctor {
    pub tp: ChainComplex,
    pub inclusion: ChainMap,
    pub homology: ChainComplex,
    pub projection: ChainMap,
    /// `f` restricted to `TP`.
    pub induced: ChainMap,
    /// Weight of each basis vector of `TP`, per degree.
    pub weights: BTreeMap<i64, Vec<i64>>,
}

pub fn t_functor(c: &ChainComplex, f: &ChainMap, w: &WeightFunction) -> Result<TFunctor, WeightError> {
    purity_at(c, f, w, "complex")?;
    let basis = t_basis(c, f, w);
    let bases = basis.iter().map(|(&i, v)| (i, v.iter().map(|(_, x)| x.clone()).collect())).collect();
    let (tp, inclusion) = sub_complex(c, &bases).ok_or_else(|| WeightError::Certificate("TP is not a subcomplex".into()))?;
    let h = homology(c);
    let hc = ChainComplex::graded(h.dims());
    let mut proj = BTreeMap::new();
    let mut induced = BTreeMap::new();
    for i in tp.degrees() {
        let hd = h.degree(i);
        let cols: Vec<Vec<Rational>> = basis[&i]
            .iter()
            .map(|(n, v)| if *n == i { hd.proj.mul_vec(v) } else { vec![Rational::zero(); hd.dim] })
            .collect();
        proj.insert(i, Matrix::from_cols(hd.dim, &cols));
        let image = f.comp(i).mul(&inclusion.comp(i));
        induced.insert(i, solve_matrix(&inclusion.comp(i), &image).map_err(|_| WeightError::Certificate("TP is not f-stable".into()))?);
    }
    let projection = ChainMap::new(tp.clone(), hc.clone(), proj).map_err(|e| WeightError::Certificate(e.to_string()))?;
    let induced = ChainMap::new(tp.clone(), tp.clone(), induced).map_err(|e| WeightError::Certificate(e.to_string()))?;
    if !inclusion.is_weak_equivalence() || !projection.is_weak_equivalence() {
        return Err(WeightError::Certificate("T arrows are not weak equivalences".into()));
    }
    let weights = basis.into_iter().map(|(i, v)| (i, v.into_iter().map(|(n, _)| n).collect())).collect();
    Ok(TFunctor { tp, inclusion, homology: hc, projection, induced, weights })
}

/// `TP ⊗ TQ ⊂ T(P ⊗ Q)` inside `P ⊗ Q`.
pub fn leibniz_containment(p: (&ChainComplex, &ChainMap), q: (&ChainComplex, &ChainMap), w: &WeightFunction) -> Result<bool, WeightError> {
    let tp = t_functor(p.0, p.1, w)?;
    let tq = t_functor(q.0, q.1, w)?;
    let tpq = t_functor(&tensor(p.0, q.0), &tensor_maps(p.1, q.1), w)?;
    let inc = tensor_maps(&tp.inclusion, &tq.inclusion);
    Ok(inc.source.degrees().into_iter().all(|n| {
        let space = Subspace::column_space(&tpq.inclusion.comp(n));
        inc.comp(n).columns().iter().all(|v| space.contains(v))
    }))
}

/// One arrow of a zigzag, certified a weak equivalence.
#[derive(Clone, Debug)]
pub struct Arrow {
    pub label: String,
    pub source: Operad,
    pub target: Operad,
    pub map: OperadMorphism,
}

impl Arrow {
    fn certified(label: &str, source: Operad, target: Operad, map: OperadMorphism) -> Result<Self, WeightError> {
        map.check(&source, &target).map_err(|e| WeightError::Certificate(format!("{label}: {e}")))?;
        if !weak_equivalence_test(&map, &source, &target).equivalence {
            return Err(WeightError::Certificate(format!("{label} is not a weak equivalence")));
        }
        Ok(Arrow { label: label.into(), source, target, map })
    }

    pub fn verify(&self) -> bool {
        self.map.check(&self.source, &self.target).is_ok() && weak_equivalence_test(&self.map, &self.source, &self.target).equivalence
    }
}

/// A zigzag of weak equivalences ending at the homology, or the automorphism it came from.
#[derive(Clone, Debug)]
pub struct FormalityWitness {
    pub arrows: Vec<Arrow>,
    /// An automorphism of a minimal model lifting `φ_α`.
    pub automorphism: Option<OperadMorphism>,
}

impl FormalityWitness {
    pub fn verify(&self) -> bool {
        self.arrows.iter().all(Arrow::verify)
    }
}

/// `P ← TP → HP` from a pure endomorphism.
pub fn formality_witness_from_pure(p: &Operad, f: &PureOperadEndomorphism) -> Result<FormalityWitness, WeightError> {
    let w = &f.weight;
    let mut bases: BTreeMap<Idx, Vec<(i64, i64, SVec)>> = BTreeMap::new();
    for (&idx, c) in &p.comps {
        let (cc, fm) = component_pair(c, &f.map.matrix(idx, p, p));
        let blocks = c.blocks();
        let mut list = Vec::new();
        for (i, vs) in t_basis(&cc, &fm, w) {
            for (n, v) in vs {
                let flat = v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(r, x)| (blocks[&i][r], x.clone())).collect();
                list.push((n, i, flat));
            }
        }
        bases.insert(idx, list);
    }
    let mut ech: BTreeMap<Idx, Echelon> = BTreeMap::new();
    for (&idx, list) in &bases {
        let e = ech.entry(idx).or_default();
        for (_, _, v) in list {
            e.insert(v).ok_or_else(|| WeightError::Certificate("T basis is dependent".into()))?;
        }
    }
    let empty = Echelon::new();
    let coords = |idx: Idx, v: &SVec| -> Result<SVec, WeightError> {
        if v.is_empty() {
            return Ok(SVec::new());
        }
        ech.get(&idx).unwrap_or(&empty).coordinates(v).ok_or_else(|| WeightError::Certificate(format!("TP is not closed at {}", fmt_idx(p.kind, idx))))
    };
    let mut tp = Operad::new(p.kind, p.window);
    let mut inclusion = OperadMorphism::default();
    for (&idx, c) in &p.comps {
        let list = &bases[&idx];
        let n = list.len();
        let vecs: Vec<SVec> = list.iter().map(|(_, _, v)| v.clone()).collect();
        let d = SpMat { rows: n, cols: vecs.iter().map(|v| coords(idx, &c.d.apply(v))).collect::<Result<_, _>>()? };
        let gens = c.gens.iter().map(|g| Ok(SpMat { rows: n, cols: vecs.iter().map(|v| coords(idx, &g.apply(v))).collect::<Result<_, WeightError>>()? })).collect::<Result<_, WeightError>>()?;
        tp.comps.insert(idx, Component { arity: c.arity, degrees: list.iter().map(|(_, i, _)| *i).collect(), d, gens });
        inclusion.comps.insert(idx, SpMat { rows: c.dim(), cols: vecs });
    }
    for &(a, b, i) in p.compose.keys() {
        let t = p.compose_target(a, b);
        for (x, (_, _, u)) in bases[&a].iter().enumerate() {
            for (y, (_, _, v)) in bases[&b].iter().enumerate() {
                tp.set_compose(a, b, i, x, y, coords(t, &p.compose_vec(a, u, b, v, i))?);
            }
        }
    }
    for &(a, i, j) in p.contract.keys() {
        let t = contract_target(a);
        let cols = bases[&a].iter().map(|(_, _, u)| coords(t, &p.contract_vec(a, i, j, u))).collect::<Result<_, _>>()?;
        tp.set_contract(a, i, j, SpMat { rows: bases.get(&t).map_or(0, Vec::len), cols });
    }
    let tp = tp.normalized();
    tp.validate().map_err(|e| WeightError::Certificate(format!("TP: {e}")))?;
    let (hp, hs) = homology_operad(p);
    let mut projection = OperadMorphism::default();
    for (&idx, list) in &bases {
        let cols = list.iter().map(|(n, i, v)| if n == i { hs[&idx].project(v) } else { SVec::new() }).collect();
        projection.comps.insert(idx, SpMat { rows: hp.dim(idx), cols });
    }
    Ok(FormalityWitness {
        arrows: vec![Arrow::certified("inclusion TP -> P", tp.clone(), p.clone(), inclusion)?, Arrow::certified("projection TP -> HP", tp, hp, projection)?],
        automorphism: None,
    })
}

/// Result of the lifting criterion in a finite window.
#[derive(Clone, Debug)]
pub enum FormalityOutcome {
    Formal(Box<FormalityWitness>),
    /// No lift of `φ_α` was found; this does not certify non-formality.
    Inconclusive { idx: Idx, reason: String },
}

fn lookup(m: &BTreeMap<Idx, Vec<SVec>>, t: Idx, y: usize) -> SVec {
    m.get(&t).and_then(|v| v.get(y)).cloned().unwrap_or_default()
}

/// Solves for `f` on the generators at `idx` with `d f = f d` and `H f = φ_α`.
fn lift_grading_at(m: &FreeOperad, idx: Idx, f_gens: &BTreeMap<Idx, Vec<SVec>>, w: &WeightFunction) -> Result<Vec<SVec>, String> {
    let mc = m.operad.component(idx);
    let hom = ComponentHomology::of(&mc);
    let n = mc.dim();
    let ngen = m.gen_dim(idx);
    let off = m.corolla_offset(idx);
    let f_dec = m.morphism_on(&m.operad, idx, &|t, y| if t == idx { SVec::new() } else { lookup(f_gens, t, y) });
    let blocks = mc.blocks();
    let none = Vec::new();
    // unknowns: f(v_y) over the degree block of v_y, then w_r over degree |z_r| + 1
    let mut layout = Vec::new();
    let mut start = 0;
    for y in 0..ngen {
        let b = blocks.get(&mc.degrees[off + y]).unwrap_or(&none);
        layout.push((start, b.clone()));
        start += b.len();
    }
    for k in &hom.degrees {
        let b = blocks.get(&(k + 1)).unwrap_or(&none);
        layout.push((start, b.clone()));
        start += b.len();
    }
    // one equation per (block, coordinate); columns are the unknowns of `layout`
    let neq = n * (ngen + hom.reps.len());
    let mut rows: Vec<SVec> = vec![SVec::new(); neq];
    let mut rhs = vec![Rational::zero(); neq];
    let place = |rows: &mut Vec<SVec>, row0: usize, slot: usize, map: &dyn Fn(usize) -> SVec, scale: &Rational| {
        let (s, ref cols) = layout[slot];
        for (c, &j) in cols.iter().enumerate() {
            for (i, x) in map(j) {
                let e = rows[row0 + i].entry(s + c).or_insert_with(Rational::zero);
                *e += x * scale;
                if e.is_zero() {
                    rows[row0 + i].remove(&(s + c));
                }
            }
        }
    };
    let one = Rational::one();
    for y in 0..ngen {
        let row0 = y * n;
        place(&mut rows, row0, y, &|j| mc.d.apply(&sv_unit(j)), &one);
        for (i, x) in f_dec.apply(&m.dgen[&idx][y]) {
            rhs[row0 + i] += x;
        }
    }
    for (r, z) in hom.reps.iter().enumerate() {
        let row0 = (ngen + r) * n;
        let dec: SVec = z.iter().filter(|(&j, _)| j < off).map(|(&j, x)| (j, x.clone())).collect();
        for y in 0..ngen {
            if let Some(c) = z.get(&(off + y)) {
                place(&mut rows, row0, y, &|j| sv_unit(j), c);
            }
        }
        place(&mut rows, row0, ngen + r, &|j| mc.d.apply(&sv_unit(j)), &-one.clone());
        let mut target = z.clone();
        target = target.into_iter().map(|(j, x)| (j, x * w.value(hom.degrees[r]))).collect();
        sv_add_scaled(&mut target, &f_dec.apply(&dec), &-one.clone());
        for (i, x) in target {
            rhs[row0 + i] += x;
        }
    }
    let sol = solve_sparse(rows.into_iter().zip(rhs)).ok_or_else(|| "no lift of the grading automorphism".to_string())?;
    let images: Vec<SVec> = (0..ngen)
        .map(|y| {
            let (s, ref cols) = layout[y];
            cols.iter().enumerate().filter_map(|(c, &j)| sol.get(&(s + c)).map(|x| (j, x.clone()))).collect()
        })
        .collect();
    let v = &m.gens.get(&idx).cloned().unwrap_or_else(|| Component::graded(idx.1, vec![]));
    Ok(if ngen > 0 { equivariant_average(v, &mc, &images) } else { images })
}

/// Looks for an automorphism of the minimal model acting on homology as `φ_α`.
pub fn formality_check(p: &Operad, up_to: usize, alpha: Rational) -> Result<FormalityOutcome, WeightError> {
    let w = WeightFunction::new(alpha)?;
    let mm = minimal_model(p, up_to, 0)?;
    let m = &mm.model;
    let kind = p.kind;
    let top = m.operad.window;
    let mut f_gens: BTreeMap<Idx, Vec<SVec>> = BTreeMap::new();
    for level in kind.min_level()..=top {
        for idx in kind.indices_at(level) {
            match lift_grading_at(m, idx, &f_gens, &w) {
                Ok(images) if !images.is_empty() => {
                    f_gens.insert(idx, images);
                }
                Ok(_) => {}
                Err(reason) => return Ok(FormalityOutcome::Inconclusive { idx, reason }),
            }
        }
    }
    let f = extend_morphism(m, &m.operad, &f_gens);
    for idx in m.operad.support() {
        let mc = m.operad.component(idx);
        let hom = ComponentHomology::of(&mc);
        for (r, z) in hom.reps.iter().enumerate() {
            let got = hom.project(&f.apply(idx, z));
            if got != SVec::from([(r, w.value(hom.degrees[r]))]) {
                return Ok(FormalityOutcome::Inconclusive { idx, reason: "lift does not induce the grading automorphism".into() });
            }
        }
    }
    let pure = purity_check(&m.operad, &f, &w)?;
    let mut wit = formality_witness_from_pure(&m.operad, &pure)?;
    let target = p.truncate(top);
    let (hm, hms) = homology_operad(&m.operad);
    let (hp, hps) = homology_operad(&target);
    let mut h_rho = OperadMorphism::default();
    for (&idx, h) in &hms {
        let cols = h.reps.iter().map(|r| hps.get(&idx).map_or_else(SVec::new, |t| t.project(&mm.rho.apply(idx, r)))).collect();
        h_rho.comps.insert(idx, SpMat { rows: hp.dim(idx), cols });
    }
    let mut arrows = vec![Arrow::certified("rho M -> P", m.operad.clone(), target, mm.rho.clone())?];
    arrows.append(&mut wit.arrows);
    arrows.push(Arrow::certified("H(rho) HM -> HP", hm, hp, h_rho)?);
    Ok(FormalityOutcome::Formal(Box::new(FormalityWitness { arrows, automorphism: Some(f) })))
}
