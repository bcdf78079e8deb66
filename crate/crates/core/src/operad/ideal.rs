//! Operadic ideals and quotients.

use std::collections::{BTreeMap, VecDeque};

use super::{contract_target, fmt_idx, violation, Component, Idx, Kind, Operad, OperadMorphism, Violation};
use crate::qlinalg::{sv_unit, Echelon, SVec, SpMat};
use crate::sigma::Permutation;

/// A collection of subspaces, one per index, in echelon form.
#[derive(Clone, Debug, Default)]
pub struct OperadIdeal {
    pub comps: BTreeMap<Idx, Echelon>,
}

impl OperadIdeal {
    pub fn dim(&self, idx: Idx) -> usize {
        self.comps.get(&idx).map_or(0, Echelon::rank)
    }

    pub fn contains(&self, idx: Idx, v: &SVec) -> bool {
        v.is_empty() || self.comps.get(&idx).is_some_and(|e| e.contains(v))
    }

    pub fn dims(&self) -> BTreeMap<Idx, usize> {
        self.comps.iter().map(|(k, e)| (*k, e.rank())).collect()
    }
}

/// Every image of `v ∈ P(idx)` under one structure operation with basis elements.
fn one_step(p: &Operad, idx: Idx, v: &SVec) -> Vec<(Idx, SVec)> {
    let mut out = vec![(idx, p.d_vec(idx, v))];
    for s in 0..idx.1.saturating_sub(1) {
        out.push((idx, p.act_vec(idx, &Permutation::adjacent(idx.1, s), v)));
    }
    for b in p.support() {
        for y in 0..p.dim(b) {
            let yv = sv_unit(y);
            for i in 0..idx.1 {
                if p.composable(idx, b, i) {
                    out.push((p.compose_target(idx, b), p.compose_vec(idx, v, b, &yv, i)));
                }
            }
            for i in 0..b.1 {
                if p.composable(b, idx, i) {
                    out.push((p.compose_target(b, idx), p.compose_vec(b, &yv, idx, v, i)));
                }
            }
        }
    }
    if p.kind == Kind::Modular && idx.1 >= 2 && p.in_window(contract_target(idx)) {
        for i in 0..idx.1 {
            for j in i + 1..idx.1 {
                out.push((contract_target(idx), p.contract_vec(idx, i, j, v)));
            }
        }
    }
    out.retain(|(_, w)| !w.is_empty());
    out
}

/// Smallest ideal containing the seeds and closed under `d`, the action and all structure maps.
pub fn ideal_closure(p: &Operad, seeds: &BTreeMap<Idx, Vec<SVec>>) -> OperadIdeal {
    let mut ideal = OperadIdeal::default();
    let mut queue: VecDeque<(Idx, SVec)> = seeds.iter().flat_map(|(k, vs)| vs.iter().map(move |v| (*k, v.clone()))).collect();
    while let Some((idx, v)) = queue.pop_front() {
        if v.is_empty() || !p.in_window(idx) {
            continue;
        }
        let ech = ideal.comps.entry(idx).or_default();
        if ech.insert(&v).is_none() {
            continue;
        }
        queue.extend(one_step(p, idx, &v));
    }
    ideal
}

/// Checks closure of a candidate ideal on its echelon rows.
pub fn check_ideal(p: &Operad, ideal: &OperadIdeal) -> Result<(), Violation> {
    for (&idx, ech) in &ideal.comps {
        for v in ech.rows() {
            for (t, w) in one_step(p, idx, &v) {
                if !ideal.contains(t, &w) {
                    return Err(violation("ideal closure", format!("image of an element of {} in {}", fmt_idx(p.kind, idx), fmt_idx(p.kind, t))));
                }
            }
        }
    }
    Ok(())
}

/// `P/I` with the projection; basis of each quotient component = non-pivot coordinates.
pub fn quotient(p: &Operad, ideal: &OperadIdeal) -> Result<(Operad, OperadMorphism), Violation> {
    check_ideal(p, ideal)?;
    let empty = Echelon::new();
    let mut keep: BTreeMap<Idx, Vec<usize>> = BTreeMap::new();
    for (&idx, c) in &p.comps {
        let piv = ideal.comps.get(&idx).map(Echelon::pivots).unwrap_or_default();
        keep.insert(idx, (0..c.dim()).filter(|j| piv.binary_search(j).is_err()).collect());
    }
    let proj = |idx: Idx, v: &SVec| -> SVec {
        let (r, _) = ideal.comps.get(&idx).unwrap_or(&empty).reduce(v);
        let k = &keep[&idx];
        r.into_iter().map(|(i, x)| (k.binary_search(&i).expect("remainder avoids pivots"), x)).collect()
    };
    let lift = |idx: Idx, j: usize| sv_unit(keep[&idx][j]);
    let mut out = Operad::new(p.kind, p.window);
    let mut f = OperadMorphism::default();
    for (&idx, c) in &p.comps {
        let k = &keep[&idx];
        let n = k.len();
        let d = SpMat { rows: n, cols: (0..n).map(|j| proj(idx, &c.d.apply(&lift(idx, j)))).collect() };
        let gens = c.gens.iter().map(|g| SpMat { rows: n, cols: (0..n).map(|j| proj(idx, &g.apply(&lift(idx, j)))).collect() }).collect();
        out.comps.insert(idx, Component { arity: c.arity, degrees: k.iter().map(|&j| c.degrees[j]).collect(), d, gens });
        f.comps.insert(idx, SpMat { rows: n, cols: (0..c.dim()).map(|j| proj(idx, &sv_unit(j))).collect() });
    }
    for &(a, b, i) in p.compose.keys() {
        let t = p.compose_target(a, b);
        for x in 0..keep[&a].len() {
            for y in 0..keep[&b].len() {
                let v = proj(t, &p.compose_vec(a, &lift(a, x), b, &lift(b, y), i));
                out.set_compose(a, b, i, x, y, v);
            }
        }
    }
    for (&(a, i, j), m) in &p.contract {
        let t = contract_target(a);
        let cols = (0..keep[&a].len()).map(|x| proj(t, &m.apply(&lift(a, x)))).collect();
        out.set_contract(a, i, j, SpMat { rows: keep[&t].len(), cols });
    }
    Ok((out.normalized(), f))
}
