//! Principal extensions, minimal models, lifting and uniqueness.
//!
//! A model is a quasi-free object built level by level. At level `n` the
//! composites of lower generators are known; the cone of `ρ_n` onto the
//! target has homology `V`, and adjoining `V` with `d v = -s_M(v)` and
//! `ρ(v) = s_P(v)` (for an equivariant section `s` of the cone) kills it.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{mapping_cone, ChainComplex, ChainMap, Cone};
use crate::operad::free::{extend_morphism, FreeOperad};
use crate::operad::{equivariant_average, weak_equivalence_test, Component, ComponentHomology, Idx, Operad, OperadMorphism, Violation};
use crate::qlinalg::{solve_matrix, sv_add_scaled, sv_scale, sv_unit, Matrix, Rational, SVec, SpMat};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Violation(#[from] Violation),
    #[error("no solution for the lifting system at {idx:?}")]
    Obstruction { idx: Idx },
    #[error("not a weak equivalence")]
    NotWeakEquivalence,
    #[error("not isomorphic: {0}")]
    NotIsomorphic(String),
    #[error("{0}")]
    Precondition(String),
}

/// Generators at one level together with their differentials.
#[derive(Clone, Debug)]
pub struct PrincipalExtension {
    pub level: usize,
    pub generators: BTreeMap<Idx, Component>,
    /// `ξ` on each generator, in the coordinates of the level-`n` component.
    pub attachment: BTreeMap<Idx, Vec<SVec>>,
    pub result: FreeOperad,
}

fn sparse_block(m: &SpMat, rows: &[usize], cols: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(rows.len(), cols.len());
    for (c, &j) in cols.iter().enumerate() {
        for (r, &i) in rows.iter().enumerate() {
            if let Some(x) = m.cols[j].get(&i) {
                out.set(r, c, x.clone());
            }
        }
    }
    out
}

/// Adds the free levels below `level` that carry no generators.
fn extend_empty(base: &FreeOperad, level: usize) -> FreeOperad {
    let mut m = base.clone();
    let kind = m.kind();
    let start = if m.operad.comps.is_empty() && m.operad.window < kind.min_level() { kind.min_level() } else { m.operad.window + 1 };
    let start = start.min(level).max(kind.min_level());
    for n in start..=level {
        if n > m.operad.window || m.operad.comps.is_empty() {
            m.push_level(n, BTreeMap::new(), BTreeMap::new());
        }
    }
    m
}

/// `P ⊔_ξ V`: adjoins generators `V` (zero differential) at `level` with `d v = ξ(v)`.
///
/// `base` must carry no generators at or above `level`.
pub fn principal_extension(base: &FreeOperad, level: usize, v: BTreeMap<Idx, Component>, xi: BTreeMap<Idx, Vec<SVec>>) -> Result<PrincipalExtension, ModelError> {
    let kind = base.kind();
    if base.gens.keys().any(|&k| kind.level(k) >= level) {
        return Err(ModelError::Precondition(format!("base has generators at level {level} or above")));
    }
    let m = extend_empty(base, level);
    let before = m.operad.clone();
    for (&idx, c) in &v {
        if kind.level(idx) != level || !kind.is_index(idx) {
            return Err(ModelError::Precondition(format!("generator index {idx:?} not at level {level}")));
        }
        if !c.d.is_zero() {
            return Err(ModelError::Precondition("attached module has a nonzero differential".into()));
        }
        c.validate()?;
        let target = before.component(idx);
        let images = xi.get(&idx).cloned().unwrap_or_default();
        if images.len() != c.dim() {
            return Err(ModelError::Precondition(format!("attachment at {idx:?} has {} images for {} generators", images.len(), c.dim())));
        }
        for (y, img) in images.iter().enumerate() {
            if !img.is_empty() && target.degree_of(img) != Some(c.degrees[y] - 1) {
                return Err(Violation { axiom: "attachment degree".into(), instance: format!("{idx:?} generator {y}") }.into());
            }
            if !target.d.apply(img).is_empty() {
                return Err(Violation { axiom: "attachment is a chain map".into(), instance: format!("{idx:?} generator {y}") }.into());
            }
        }
        for (k, g) in c.gens.iter().enumerate() {
            for y in 0..c.dim() {
                let mut lhs = SVec::new();
                for (&z, x) in &g.cols[y] {
                    sv_add_scaled(&mut lhs, &images[z], x);
                }
                if lhs != target.gens[k].apply(&images[y]) {
                    return Err(Violation { axiom: "attachment is equivariant".into(), instance: format!("{idx:?} generator {y}, s_{}", k + 1) }.into());
                }
            }
        }
    }
    let mut result = m;
    let gens: BTreeMap<Idx, Component> = v.iter().filter(|(_, c)| c.dim() > 0).map(|(k, c)| (*k, c.clone())).collect();
    result.begin_level(level, gens.clone());
    result.finish_level(level, xi.iter().filter(|(k, _)| gens.contains_key(k)).map(|(k, x)| (*k, x.clone())).collect());
    // exact sequence 0 → P_n → (P ⊔ V)_n → V → 0 and unchanged lower truncation
    for idx in kind.indices_at(level) {
        if result.operad.dim(idx) != before.dim(idx) + v.get(&idx).map_or(0, Component::dim) {
            return Err(Violation { axiom: "principal extension exact sequence".into(), instance: format!("{idx:?}") }.into());
        }
    }
    if level > kind.min_level() && result.operad.truncate(level - 1) != before.truncate(level - 1) {
        return Err(Violation { axiom: "principal extension keeps lower levels".into(), instance: format!("level {level}") }.into());
    }
    result.operad.tower = Some(level);
    Ok(PrincipalExtension { level, generators: gens, attachment: xi, result })
}

/// One step of the canonical tower of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStep {
    pub level: usize,
    pub generators: BTreeMap<Idx, BTreeMap<i64, usize>>,
}

/// A minimal model `ρ: M → P` through a window.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub model: FreeOperad,
    /// `ρ` on generators.
    pub rho_gens: BTreeMap<Idx, Vec<SVec>>,
    pub rho: OperadMorphism,
    pub steps: Vec<TowerStep>,
    pub seed: u64,
}

impl MinimalModel {
    /// Graded generator dimensions per index.
    pub fn generator_dims(&self) -> BTreeMap<Idx, BTreeMap<i64, usize>> {
        self.model.gens.iter().map(|(k, c)| (*k, c.blocks().into_iter().map(|(d, v)| (d, v.len())).collect())).collect()
    }
}

/// Cone of `ρ: M_idx → P_idx` as a component: basis `P` then `M` shifted up by one.
fn cone_component(p: &Component, m: &Component, rho: &SpMat) -> Component {
    let (np, nm) = (p.dim(), m.dim());
    let n = np + nm;
    let mut degrees = p.degrees.clone();
    degrees.extend(m.degrees.iter().map(|d| d + 1));
    let mut d = SpMat::zeros(n, n);
    for j in 0..np {
        d.cols[j] = p.d.cols[j].clone();
    }
    for k in 0..nm {
        let mut col = rho.cols[k].clone();
        for (&i, x) in &m.d.cols[k] {
            col.insert(np + i, -x.clone());
        }
        d.cols[np + k] = col;
    }
    let gens = p
        .gens
        .iter()
        .zip(&m.gens)
        .map(|(gp, gm)| {
            let mut g = SpMat::zeros(n, n);
            for j in 0..np {
                g.cols[j] = gp.cols[j].clone();
            }
            for k in 0..nm {
                g.cols[np + k] = gm.cols[k].iter().map(|(&i, x)| (np + i, x.clone())).collect();
            }
            g
        })
        .collect();
    Component { arity: p.arity, degrees, d, gens }
}

/// Homology of a component as a module with zero differential, with an equivariant section.
/// Seed 0 keeps the echelon lift of each class; other seeds add a random boundary.
fn homology_with_section(c: &Component, rng: &mut Option<ChaCha8Rng>) -> (Component, Vec<SVec>) {
    let h = ComponentHomology::of(c);
    let n = h.dim();
    let gens = c.gens.iter().map(|g| SpMat { rows: n, cols: h.reps.iter().map(|r| h.project(&g.apply(r))).collect() }).collect();
    let v = Component { arity: c.arity, degrees: h.degrees.clone(), d: SpMat::zeros(n, n), gens };
    let blocks = c.blocks();
    let section: Vec<SVec> = h
        .reps
        .iter()
        .zip(&h.degrees)
        .map(|(r, k)| {
            let mut s = r.clone();
            if let (Some(up), Some(rng)) = (blocks.get(&(k + 1)), rng.as_mut()) {
                let chain: SVec = up.iter().map(|&j| (j, Rational::from_integer(rng.gen_range(-2i64..=2).into()))).filter(|(_, x)| !x.is_zero()).collect();
                sv_add_scaled(&mut s, &c.d.apply(&chain), &Rational::from_integer(1.into()));
            }
            s
        })
        .collect();
    let section = equivariant_average(&v, c, &section);
    (v, section)
}

/// Builds a minimal model of `p` through level `up_to`.
pub fn minimal_model(p: &Operad, up_to: usize, seed: u64) -> Result<MinimalModel, ModelError> {
    let kind = p.kind;
    let top = up_to.min(p.window);
    let mut rng = (seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed));
    let mut m = FreeOperad::new(kind);
    let mut rho_gens: BTreeMap<Idx, Vec<SVec>> = BTreeMap::new();
    let mut steps = Vec::new();
    for level in kind.min_level()..=top {
        m.push_level(level, BTreeMap::new(), BTreeMap::new());
        let mut gens = BTreeMap::new();
        let mut xi = BTreeMap::new();
        let mut new_rho = BTreeMap::new();
        for idx in kind.indices_at(level) {
            let mc = m.operad.component(idx);
            let pc = p.component(idx);
            let img = |t: Idx, y: usize| rho_gens.get(&t).and_then(|v| v.get(y)).cloned().unwrap_or_default();
            let r = m.morphism_on(p, idx, &img);
            let cone = cone_component(&pc, &mc, &r);
            let (v, s) = homology_with_section(&cone, &mut rng);
            if v.dim() == 0 {
                continue;
            }
            let np = pc.dim();
            let s_p: Vec<SVec> = s.iter().map(|x| x.range(..np).map(|(&i, c)| (i, c.clone())).collect()).collect();
            let s_m: Vec<SVec> = s.iter().map(|x| x.range(np..).map(|(&i, c)| (i - np, -c.clone())).collect()).collect();
            gens.insert(idx, v);
            xi.insert(idx, s_m);
            new_rho.insert(idx, s_p);
        }
        let ext = principal_extension(&m, level, gens, xi)?;
        m = ext.result;
        rho_gens.extend(new_rho);
        let generators = ext.generators.iter().map(|(k, c)| (*k, c.blocks().into_iter().map(|(d, v)| (d, v.len())).collect())).collect();
        steps.push(TowerStep { level, generators });
    }
    let rho = extend_morphism(&m, p, &rho_gens);
    rho.check(&m.operad, p)?;
    if !weak_equivalence_test(&rho, &m.operad, &p.truncate(top)).equivalence {
        return Err(ModelError::NotWeakEquivalence);
    }
    Ok(MinimalModel { model: m, rho_gens, rho, steps, seed })
}

/// Minimality of a quasi-free object: the differential of every generator is a sum of composites.
///
/// Returns the first level where a generator has a linear part.
pub fn is_minimal(m: &FreeOperad) -> Result<(), usize> {
    for (&idx, dg) in &m.dgen {
        let off = m.corolla_offset(idx);
        if dg.iter().any(|v| v.keys().any(|&j| j >= off)) {
            return Err(m.kind().level(idx));
        }
    }
    if m.operad.validate().is_err() {
        return Err(m.operad.window);
    }
    Ok(())
}

/// Data of a cone completion: `ν: Cη → X` and the homotopy on the right square.
#[derive(Clone, Debug)]
pub struct ConeCompletion {
    pub source: Cone,
    pub target: Cone,
    pub nu: ChainMap,
    /// `h_i: (Cη)_i → (Cζ)_{i+1}`.
    pub h: BTreeMap<i64, Matrix>,
}

fn comp_or_zero(m: &BTreeMap<i64, Matrix>, i: i64, rows: usize, cols: usize) -> Matrix {
    m.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(rows, cols))
}

/// Completes `η: B → A`, `μ: A → Y`, `ζ: Y → X` and `λ = (λ_X, λ_Y): B → (Cζ)[-1]` to `ν(a,b) = λ_X b + ζμ a`.
///
/// Requires `μη = -λ_Y` and `λ_X d = -dλ_X - ζλ_Y`. Returns `ν` with
/// `h(a,b) = (0, μ a)` satisfying `incl∘ν - λ[1]∘proj = dh + hd`.
pub fn cone_completion(
    eta: &ChainMap,
    mu: &ChainMap,
    zeta: &ChainMap,
    lambda_x: &BTreeMap<i64, Matrix>,
    lambda_y: &BTreeMap<i64, Matrix>,
) -> Result<ConeCompletion, ModelError> {
    let (b, a) = (&eta.source, &eta.target);
    let (y, x) = (&zeta.source, &zeta.target);
    if mu.source != *a || mu.target != *y {
        return Err(ModelError::Precondition("μ must map A to Y".into()));
    }
    let degs: Vec<i64> = b.degrees();
    for &i in &degs {
        let ly = comp_or_zero(lambda_y, i, y.dim(i), b.dim(i));
        if mu.comp(i).mul(&eta.comp(i)) != ly.neg() {
            return Err(Violation { axiom: "square commutes: μη = -λ_Y".into(), instance: format!("degree {i}") }.into());
        }
        // λ_X d_B = -d_X λ_X - ζ λ_Y on B_i
        let lhs = comp_or_zero(lambda_x, i - 1, x.dim(i), b.dim(i - 1)).mul(&b.d(i));
        let rhs = x.d(i + 1).mul(&comp_or_zero(lambda_x, i, x.dim(i + 1), b.dim(i))).add(&zeta.comp(i).mul(&ly)).neg();
        if lhs != rhs {
            return Err(Violation { axiom: "λ is a chain map into the shifted cone".into(), instance: format!("degree {i}") }.into());
        }
    }
    let source = mapping_cone(eta);
    let target = mapping_cone(zeta);
    let cs = &source.complex;
    let mut nu = BTreeMap::new();
    let mut h = BTreeMap::new();
    for i in cs.degrees() {
        let (ai, bi) = (a.dim(i), b.dim(i - 1));
        let mut m = Matrix::zeros(x.dim(i), ai + bi);
        m.put_block(0, 0, &zeta.comp(i).mul(&mu.comp(i)));
        m.put_block(0, ai, &comp_or_zero(lambda_x, i - 1, x.dim(i), bi));
        nu.insert(i, m);
        // (Cζ)_{i+1} = X_{i+1} ⊕ Y_i
        let mut hm = Matrix::zeros(x.dim(i + 1) + y.dim(i), ai + bi);
        hm.put_block(x.dim(i + 1), 0, &mu.comp(i));
        h.insert(i, hm);
    }
    let nu = ChainMap::new(cs.clone(), x.clone(), nu).map_err(|e| ModelError::Precondition(e.to_string()))?;
    // g - f = dh + hd with g = incl∘ν and f = λ[1]∘proj
    let ct = &target.complex;
    let g = target.inclusion.compose(&nu);
    let mut f = BTreeMap::new();
    for i in cs.degrees() {
        let (ai, bi) = (a.dim(i), b.dim(i - 1));
        let mut m = Matrix::zeros(ct.dim(i), ai + bi);
        m.put_block(0, ai, &comp_or_zero(lambda_x, i - 1, x.dim(i), bi));
        m.put_block(x.dim(i), ai, &comp_or_zero(lambda_y, i - 1, y.dim(i - 1), bi));
        f.insert(i, m);
    }
    let f = ChainMap::new_unchecked(cs.clone(), ct.clone(), f).map_err(|e| ModelError::Precondition(e.to_string()))?;
    if !crate::chain::is_homotopy(&g, &f, &h) {
        return Err(Violation { axiom: "cone completion homotopy".into(), instance: "g - f = dh + hd".into() }.into());
    }
    Ok(ConeCompletion { source, target, nu, h })
}

/// A lift `φ: M → Q` of `ψ: M → R` along `ρ: Q → R`, with a homotopy `ρφ ≃ ψ` on generators.
#[derive(Clone, Debug)]
pub struct Lift {
    pub phi_gens: BTreeMap<Idx, Vec<SVec>>,
    pub homotopy_gens: BTreeMap<Idx, Vec<SVec>>,
    pub phi: OperadMorphism,
}

fn lookup(m: &BTreeMap<Idx, Vec<SVec>>, t: Idx, y: usize) -> SVec {
    m.get(&t).and_then(|v| v.get(y)).cloned().unwrap_or_default()
}

/// Lifts `ψ` (given on the generators of `m`) along the weak equivalence `ρ: Q → R`.
pub fn lift(rho: &OperadMorphism, q: &Operad, r: &Operad, psi_gens: &BTreeMap<Idx, Vec<SVec>>, m: &FreeOperad) -> Result<Lift, ModelError> {
    if !weak_equivalence_test(rho, q, r).equivalence {
        return Err(ModelError::NotWeakEquivalence);
    }
    let kind = m.kind();
    let top = m.operad.window.min(q.window).min(r.window);
    let mut phi: BTreeMap<Idx, Vec<SVec>> = BTreeMap::new();
    let mut hom: BTreeMap<Idx, Vec<SVec>> = BTreeMap::new();
    for level in kind.min_level()..=top {
        for idx in kind.indices_at(level) {
            let Some(v) = m.gens.get(&idx) else { continue };
            let dgen = &m.dgen[&idx];
            let rho_phi = |t: Idx, y: usize| rho.apply(t, &lookup(&phi, t, y));
            let phi_dec = m.morphism_on(q, idx, &|t, y| lookup(&phi, t, y));
            let h_dec = m.derivation_on(r, idx, &rho_phi, &|t, y| lookup(&hom, t, y), 1, &|t, y| lookup(psi_gens, t, y));
            let (qc, rc) = (q.component(idx), r.component(idx));
            let (qb, rb) = (qc.blocks(), rc.blocks());
            let rho_m = rho.matrix(idx, q, r);
            let mut g_sol = vec![SVec::new(); v.dim()];
            let mut h_sol = vec![SVec::new(); v.dim()];
            for (k, ys) in v.blocks() {
                let none = Vec::new();
                let q_k = qb.get(&k).unwrap_or(&none);
                let q_km = qb.get(&(k - 1)).unwrap_or(&none);
                let r_k = rb.get(&k).unwrap_or(&none);
                let r_kp = rb.get(&(k + 1)).unwrap_or(&none);
                let (nq, nh) = (q_k.len(), r_kp.len());
                let mut a = Matrix::zeros(q_km.len() + r_k.len(), nq + nh);
                a.put_block(0, 0, &sparse_block(&qc.d, q_km, q_k));
                a.put_block(q_km.len(), 0, &sparse_block(&rho_m, r_k, q_k));
                a.put_block(q_km.len(), nq, &sparse_block(&rc.d, r_k, r_kp).neg());
                let mut rhs = Matrix::zeros(q_km.len() + r_k.len(), ys.len());
                for (c, &y) in ys.iter().enumerate() {
                    let top_part = phi_dec.apply(&dgen[y]);
                    let mut bottom = lookup(psi_gens, idx, y);
                    sv_add_scaled(&mut bottom, &h_dec.apply(&dgen[y]), &Rational::from_integer(1.into()));
                    for (rr, &i) in q_km.iter().enumerate() {
                        if let Some(x) = top_part.get(&i) {
                            rhs.set(rr, c, x.clone());
                        }
                    }
                    for (rr, &i) in r_k.iter().enumerate() {
                        if let Some(x) = bottom.get(&i) {
                            rhs.set(q_km.len() + rr, c, x.clone());
                        }
                    }
                }
                let sol = solve_matrix(&a, &rhs).map_err(|_| ModelError::Obstruction { idx })?;
                for (c, &y) in ys.iter().enumerate() {
                    for (rr, &i) in q_k.iter().enumerate() {
                        if !sol.get(rr, c).is_zero() {
                            g_sol[y].insert(i, sol.get(rr, c).clone());
                        }
                    }
                    for (rr, &i) in r_kp.iter().enumerate() {
                        if !sol.get(nq + rr, c).is_zero() {
                            h_sol[y].insert(i, sol.get(nq + rr, c).clone());
                        }
                    }
                }
            }
            phi.insert(idx, equivariant_average(v, &qc, &g_sol));
            hom.insert(idx, equivariant_average(v, &rc, &h_sol));
        }
    }
    let phi_m = extend_morphism(m, q, &phi);
    phi_m.check(&m.operad, q)?;
    // certificate: ρφ - ψ = dH + Hd on every basis element
    let psi_m = extend_morphism(m, r, psi_gens);
    let rho_phi = |t: Idx, y: usize| rho.apply(t, &lookup(&phi, t, y));
    for idx in m.operad.support().into_iter().filter(|k| kind.level(*k) <= top) {
        let hm = m.derivation_on(r, idx, &rho_phi, &|t, y| lookup(&hom, t, y), 1, &|t, y| lookup(psi_gens, t, y));
        let mc = m.operad.component(idx);
        for j in 0..mc.dim() {
            let e = sv_unit(j);
            let mut lhs = rho.apply(idx, &phi_m.apply(idx, &e));
            sv_add_scaled(&mut lhs, &psi_m.apply(idx, &e), &Rational::from_integer((-1).into()));
            let mut rhs = r.d_vec(idx, &hm.apply(&e));
            sv_add_scaled(&mut rhs, &hm.apply(&mc.d.apply(&e)), &Rational::from_integer(1.into()));
            if lhs != rhs {
                return Err(Violation { axiom: "lift homotopy certificate".into(), instance: format!("{idx:?} basis {j}") }.into());
            }
        }
    }
    Ok(Lift { phi_gens: phi, homotopy_gens: hom, phi: phi_m })
}

/// An isomorphism between two minimal models of the same operad, from a lift and a rank check.
pub fn iso_between_minimal(m1: &MinimalModel, m2: &MinimalModel, p: &Operad) -> Result<OperadMorphism, ModelError> {
    let (d1, d2) = (m1.generator_dims(), m2.generator_dims());
    if d1 != d2 {
        let idx = d1.keys().chain(d2.keys()).find(|k| d1.get(k) != d2.get(k)).copied();
        return Err(ModelError::NotIsomorphic(format!("generator dimensions differ at {idx:?}")));
    }
    let l = lift(&m2.rho, &m2.model.operad, p, &m1.rho_gens, &m1.model)?;
    for (idx, c) in &m1.model.operad.comps {
        let f = l.phi.matrix(*idx, &m1.model.operad, &m2.model.operad);
        if m2.model.operad.dim(*idx) != c.dim() || f.to_dense().rank() != c.dim() {
            return Err(ModelError::NotIsomorphic(format!("lift is not bijective at {idx:?}")));
        }
    }
    Ok(l.phi)
}

/// A homotopy between two morphisms out of a quasi-free object, built generator by generator.
pub fn homotopy_between(m: &FreeOperad, q: &Operad, f_gens: &BTreeMap<Idx, Vec<SVec>>, g_gens: &BTreeMap<Idx, Vec<SVec>>) -> Option<BTreeMap<Idx, Vec<SVec>>> {
    let kind = m.kind();
    let mut hom: BTreeMap<Idx, Vec<SVec>> = BTreeMap::new();
    for level in kind.min_level()..=m.operad.window.min(q.window) {
        for idx in kind.indices_at(level) {
            let Some(v) = m.gens.get(&idx) else { continue };
            let h_dec = m.derivation_on(q, idx, &|t, y| lookup(f_gens, t, y), &|t, y| lookup(&hom, t, y), 1, &|t, y| lookup(g_gens, t, y));
            let qc = q.component(idx);
            let qb = qc.blocks();
            let mut sol_all = vec![SVec::new(); v.dim()];
            for (k, ys) in v.blocks() {
                let none = Vec::new();
                let (r_k, r_kp) = (qb.get(&k).unwrap_or(&none), qb.get(&(k + 1)).unwrap_or(&none));
                let a = sparse_block(&qc.d, r_k, r_kp);
                let mut rhs = Matrix::zeros(r_k.len(), ys.len());
                for (c, &y) in ys.iter().enumerate() {
                    // d H(v) = f(v) - g(v) - H(dv)
                    let mut t = lookup(f_gens, idx, y);
                    sv_add_scaled(&mut t, &lookup(g_gens, idx, y), &Rational::from_integer((-1).into()));
                    sv_add_scaled(&mut t, &h_dec.apply(&m.dgen[&idx][y]), &Rational::from_integer((-1).into()));
                    for (rr, &i) in r_k.iter().enumerate() {
                        if let Some(x) = t.get(&i) {
                            rhs.set(rr, c, x.clone());
                        }
                    }
                }
                let sol = solve_matrix(&a, &rhs).ok()?;
                for (c, &y) in ys.iter().enumerate() {
                    sol_all[y] = r_kp.iter().enumerate().filter(|(rr, _)| !sol.get(*rr, c).is_zero()).map(|(rr, &i)| (i, sol.get(rr, c).clone())).collect();
                }
            }
            hom.insert(idx, equivariant_average(v, &qc, &sol_all));
        }
    }
    Some(hom)
}

/// Identity images of the generators of a quasi-free object.
pub fn identity_gens(m: &FreeOperad) -> BTreeMap<Idx, Vec<SVec>> {
    m.gens.iter().map(|(&k, c)| (k, (0..c.dim()).map(|y| m.generator(k, y)).collect())).collect()
}

/// Scales each generator image by a rational.
pub fn scale_gens(g: &BTreeMap<Idx, Vec<SVec>>, s: &Rational) -> BTreeMap<Idx, Vec<SVec>> {
    g.iter().map(|(k, v)| (*k, v.iter().map(|x| sv_scale(x, s)).collect())).collect()
}

/// Summary used by callers that only need the complex of a component.
pub fn component_complex(p: &Operad, idx: Idx) -> ChainComplex {
    p.component(idx).to_complex()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::free::free_operad;
    use crate::fixtures::com;
    use crate::operad::Kind;
    use crate::qlinalg::q;

    fn dims(m: &MinimalModel) -> BTreeMap<usize, BTreeMap<i64, usize>> {
        m.generator_dims().into_iter().map(|((_, l), d)| (l, d)).collect()
    }

    #[test]
    fn model_of_truncated_com() {
        let p = com(3).extend_by_zero(4);
        let mm = minimal_model(&p, 4, 0).unwrap();
        assert!(is_minimal(&mm.model).is_ok());
        let d = dims(&mm);
        assert_eq!(d[&2], BTreeMap::from([(0, 1)]));
        assert_eq!(d[&3], BTreeMap::from([(1, 2)]));
        assert_eq!(d[&4], BTreeMap::from([(1, 1), (2, 6)]));
    }

    #[test]
    fn two_seeds_are_isomorphic() {
        let p = com(3).extend_by_zero(4);
        let a = minimal_model(&p, 4, 1).unwrap();
        let b = minimal_model(&p, 4, 2).unwrap();
        iso_between_minimal(&a, &b, &p).unwrap();
        iso_between_minimal(&a, &a, &p).unwrap();
        let c = minimal_model(&p, 4, 0).unwrap();
        let again = minimal_model(&p, 4, 0).unwrap();
        assert_eq!(c.rho_gens, again.rho_gens);
        assert_eq!(c.model.dgen, again.model.dgen);
    }

    #[test]
    fn arity_three_generators_match_a_rank_count() {
        // free on one symmetric binary operation has dim 3 in arity 3, and ρ onto Com(3) is onto
        let gens = BTreeMap::from([(2, Component::graded(2, vec![0]))]);
        let free3 = free_operad(&gens, 3).operad.dim((0, 3));
        let p = com(3);
        let rank = 1;
        let mm = minimal_model(&p, 3, 5).unwrap();
        assert_eq!(dims(&mm)[&3], BTreeMap::from([(1, free3 - rank)]));
    }

    #[test]
    fn different_generators_are_not_isomorphic() {
        let p = com(3).extend_by_zero(4);
        let a = minimal_model(&p, 4, 0).unwrap();
        let b = minimal_model(&com(4), 4, 0).unwrap();
        assert!(matches!(iso_between_minimal(&a, &b, &p), Err(ModelError::NotIsomorphic(_))));
    }

    #[test]
    fn generator_dims_grow_with_the_window() {
        let p = com(3).extend_by_zero(5);
        let small = minimal_model(&p, 4, 0).unwrap().generator_dims();
        let big = minimal_model(&p, 5, 0).unwrap().generator_dims();
        for (k, d) in small {
            assert_eq!(big[&k], d);
        }
    }

    #[test]
    fn acyclic_complement_is_not_minimal() {
        // free on a binary a plus x, y in arity 3 with d y = x: H agrees with Γ(a) but is_minimal rejects
        let mut f = FreeOperad::new(Kind::Plain);
        f.push_level(2, BTreeMap::from([((0, 2), Component::graded(2, vec![0]))]), BTreeMap::from([((0, 2), vec![SVec::new()])]));
        let off = f.corolla_offset((0, 3));
        let mut x = Component::graded(3, vec![0]);
        let y = Component::graded(3, vec![1]);
        x.degrees.extend(y.degrees);
        x.d = SpMat::zeros(2, 2);
        x.gens = (0..2).map(|_| SpMat::identity(2)).collect();
        f.push_level(3, BTreeMap::from([((0, 3), x)]), BTreeMap::from([((0, 3), vec![SVec::new(), sv_unit(off)])]));
        assert_eq!(is_minimal(&f), Err(3));
        let sub = free_operad(&BTreeMap::from([(2, Component::graded(2, vec![0]))]), 3);
        for idx in [(0, 2), (0, 3)] {
            let h1 = ComponentHomology::of(&sub.operad.component(idx)).dim();
            let h2 = ComponentHomology::of(&f.operad.component(idx)).dim();
            assert_eq!(h1, h2);
        }
        assert!(f.operad.dim((0, 3)) > sub.operad.dim((0, 3)));
    }

    #[test]
    fn lift_along_an_isomorphism() {
        let p = com(3);
        let mm = minimal_model(&p, 3, 0).unwrap();
        let id = OperadMorphism::identity(&p);
        let l = lift(&id, &p, &p, &mm.rho_gens, &mm.model).unwrap();
        assert_eq!(l.phi, mm.rho);
    }

    #[test]
    fn model_of_the_endomorphism_operad_of_a_line() {
        use crate::operad::endo::{endomorphism_modular_operad, InnerProductSpace};
        let v = InnerProductSpace { degrees: vec![0], d: SpMat::zeros(1, 1), b: Matrix::from_i64(&[&[1]]) };
        let e = endomorphism_modular_operad(&v, 2).unwrap();
        let a = minimal_model(&e, 2, 0).unwrap();
        let d = a.generator_dims();
        assert_eq!(d[&(0, 3)], BTreeMap::from([(0, 1)]));
        assert!(!d.contains_key(&(1, 1)));
        assert_eq!(d[&(0, 4)], BTreeMap::from([(1, 2)]));
        assert!(is_minimal(&a.model).is_ok());
        let b = minimal_model(&e, 2, 9).unwrap();
        iso_between_minimal(&a, &b, &e).unwrap();
    }

    #[test]
    fn model_of_a_free_operad_has_the_same_generators() {
        let gens = BTreeMap::from([(2, Component::graded(2, vec![0])), (3, Component::graded(3, vec![1]))]);
        let f = free_operad(&gens, 4);
        let mm = minimal_model(&f.operad, 4, 0).unwrap();
        let d = dims(&mm);
        assert_eq!(d[&2], BTreeMap::from([(0, 1)]));
        assert_eq!(d[&3], BTreeMap::from([(1, 1)]));
        assert!(!d.contains_key(&4));
    }

    #[test]
    fn acyclic_operad_has_zero_model() {
        let mut p = Operad::new(Kind::Plain, 3);
        let mut c = Component::graded(2, vec![0, 1]);
        c.d.cols[1] = sv_unit(0);
        p.comps.insert((0, 2), c);
        p.validate().unwrap();
        let mm = minimal_model(&p, 3, 0).unwrap();
        assert!(mm.model.gens.is_empty());
    }

    #[test]
    fn linear_differential_is_not_minimal() {
        let mut f = FreeOperad::new(Kind::Plain);
        f.begin_level(2, BTreeMap::from([((0, 2), Component::graded(2, vec![0, 1]))]));
        f.finish_level(2, BTreeMap::from([((0, 2), vec![SVec::new(), sv_unit(0)])]));
        assert_eq!(is_minimal(&f), Err(2));
    }

    #[test]
    fn lift_against_itself_is_homotopic_to_the_identity() {
        let p = com(3).extend_by_zero(4);
        let mm = minimal_model(&p, 4, 3).unwrap();
        let l = lift(&mm.rho, &mm.model.operad, &p, &mm.rho_gens, &mm.model).unwrap();
        assert!(homotopy_between(&mm.model, &mm.model.operad, &l.phi_gens, &identity_gens(&mm.model)).is_some());
    }

    #[test]
    fn principal_extension_of_nothing_is_free() {
        let v = BTreeMap::from([((0, 2), Component::graded(2, vec![0]))]);
        let e = principal_extension(&FreeOperad::new(Kind::Plain), 2, v.clone(), BTreeMap::from([((0, 2), vec![SVec::new()])])).unwrap();
        assert_eq!(e.result.operad.dim((0, 2)), 1);
        let bad = principal_extension(&e.result, 2, v, BTreeMap::new());
        assert!(bad.is_err());
    }

    #[test]
    fn cone_completion_identities() {
        use crate::chain::ChainComplex;
        let c = ChainComplex::graded([(0, 1)]);
        let id = ChainMap::identity(&c);
        let zero_b = ChainComplex::zero();
        let eta = ChainMap::zero(&zero_b, &c);
        let r = cone_completion(&eta, &id, &id.scale(&q(2)), &BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert_eq!(r.nu.comp(0), Matrix::from_i64(&[&[2]]));
        // B = A = Y = k, X = (k -1-> k) in degrees 1, 0; η = μ = ζ = 1, λ_Y = -1, λ_X = 1
        let x = ChainComplex::new(BTreeMap::from([(0, 1), (1, 1)]), BTreeMap::from([(1, Matrix::from_i64(&[&[1]]))])).unwrap();
        let zeta = ChainMap::new(c.clone(), x, BTreeMap::from([(0, Matrix::from_i64(&[&[1]]))])).unwrap();
        let lx = BTreeMap::from([(0, Matrix::from_i64(&[&[1]]))]);
        let ly = BTreeMap::from([(0, Matrix::from_i64(&[&[-1]]))]);
        let r = cone_completion(&id, &id, &zeta, &lx, &ly).unwrap();
        assert!(r.nu.is_chain_map());
        assert_eq!(r.nu.comp(1), Matrix::from_i64(&[&[1]]));
        assert!(cone_completion(&id, &id, &zeta, &BTreeMap::new(), &ly).is_err());
        let bad = BTreeMap::from([(0, Matrix::from_i64(&[&[1]]))]);
        assert!(cone_completion(&id, &id, &zeta, &lx, &bad).is_err());
    }
}
