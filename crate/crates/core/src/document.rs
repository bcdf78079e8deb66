//! The `operad-forge/1` text format: JSON with rationals as strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::minimal::MinimalModel;
use crate::operad::{Component, Idx, Kind, Operad, OperadMorphism};
use crate::qlinalg::{parse_rational, rational_to_string, SVec, SpMat};
use crate::weight::{FormalityOutcome, FormalityWitness};

pub const FORMAT: &str = "operad-forge/1";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Malformed(String),
}

fn malformed(s: impl Into<String>) -> DocError {
    DocError::Malformed(s.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocKind {
    Operad,
    Modular,
    Truncated,
    SigmaModule,
}

/// `[row, "p/q"]` entries of one sparse column.
pub type ColumnDoc = Vec<(usize, String)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDoc {
    /// `[g, l]`; plain operads use `g = 0`.
    pub index: Idx,
    pub degrees: Vec<i64>,
    #[serde(default)]
    pub d: Vec<ColumnDoc>,
    /// One matrix per adjacent transposition `s_1, ..., s_{l-1}`.
    #[serde(default)]
    pub action: Vec<Vec<ColumnDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionDoc {
    pub a: Idx,
    pub b: Idx,
    pub slot: usize,
    /// `[x, y, image]`.
    pub entries: Vec<(usize, usize, ColumnDoc)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionDoc {
    pub a: Idx,
    pub i: usize,
    pub j: usize,
    pub columns: Vec<ColumnDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDoc {
    pub index: Idx,
    pub columns: Vec<ColumnDoc>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub index: Idx,
    pub degrees: Vec<i64>,
    pub action: Vec<Vec<ColumnDoc>>,
    /// `d` of each generator in the model's component.
    pub attachment: Vec<ColumnDoc>,
    /// `ρ` of each generator in the target's component.
    pub rho: Vec<ColumnDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub level: usize,
    /// `[index, [[degree, dim], ...]]`.
    pub generators: Vec<(Idx, Vec<(i64, usize)>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDoc {
    pub seed: u64,
    pub steps: Vec<StepDoc>,
    pub generators: Vec<GeneratorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperadDocument {
    pub format: String,
    pub kind: DocKind,
    /// Underlying kind for `truncated` and `sigma-module` documents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Kind>,
    pub window: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_at: Option<usize>,
    #[serde(default)]
    pub metadata: Metadata,
    pub components: Vec<ComponentDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compositions: Vec<CompositionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub contractions: Vec<ContractionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endomorphism: Option<Vec<MapDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerDoc>,
}

pub fn column_doc(v: &SVec) -> ColumnDoc {
    v.iter().map(|(&i, x)| (i, rational_to_string(x))).collect()
}

pub fn matrix_doc(m: &SpMat) -> Vec<ColumnDoc> {
    m.cols.iter().map(column_doc).collect()
}

fn parse_column(c: &ColumnDoc, rows: usize) -> Result<SVec, DocError> {
    let mut out = SVec::new();
    for (i, s) in c {
        if *i >= rows {
            return Err(malformed(format!("row {i} out of range {rows}")));
        }
        let x = parse_rational(s).ok_or_else(|| malformed(format!("bad rational {s:?}")))?;
        if out.insert(*i, x).is_some() {
            return Err(malformed(format!("row {i} repeated")));
        }
    }
    out.retain(|_, x| !num_traits::Zero::is_zero(x));
    Ok(out)
}

fn parse_matrix(cols: &[ColumnDoc], rows: usize, ncols: usize, what: &str) -> Result<SpMat, DocError> {
    if cols.is_empty() {
        return Ok(SpMat::zeros(rows, ncols));
    }
    if cols.len() != ncols {
        return Err(malformed(format!("{what}: {} columns for {ncols}", cols.len())));
    }
    Ok(SpMat { rows, cols: cols.iter().map(|c| parse_column(c, rows)).collect::<Result<_, _>>()? })
}

fn component_doc(idx: Idx, c: &Component) -> ComponentDoc {
    ComponentDoc { index: idx, degrees: c.degrees.clone(), d: matrix_doc(&c.d), action: c.gens.iter().map(matrix_doc).collect() }
}

fn parse_component(doc: &ComponentDoc) -> Result<Component, DocError> {
    let n = doc.degrees.len();
    let arity = doc.index.1;
    let d = parse_matrix(&doc.d, n, n, "d")?;
    let expected = arity.saturating_sub(1);
    let gens = if doc.action.is_empty() {
        vec![SpMat::identity(n); expected]
    } else if doc.action.len() == expected {
        doc.action.iter().map(|g| parse_matrix(g, n, n, "action")).collect::<Result<_, _>>()?
    } else {
        return Err(malformed(format!("{:?}: {} action matrices for arity {arity}", doc.index, doc.action.len())));
    };
    Ok(Component { arity, degrees: doc.degrees.clone(), d, gens })
}

impl OperadDocument {
    pub fn from_operad(p: &Operad, name: Option<&str>) -> Self {
        let (kind, base, truncated_at) = match (p.kind, p.tower) {
            (_, Some(n)) => (DocKind::Truncated, Some(p.kind), Some(n)),
            (Kind::Plain, None) => (DocKind::Operad, None, None),
            (Kind::Modular, None) => (DocKind::Modular, None, None),
        };
        let compositions = p
            .compose
            .iter()
            .map(|(&(a, b, slot), table)| CompositionDoc { a, b, slot, entries: table.iter().map(|(&(x, y), v)| (x, y, column_doc(v))).collect() })
            .collect();
        let contractions = p.contract.iter().map(|(&(a, i, j), m)| ContractionDoc { a, i, j, columns: matrix_doc(m) }).collect();
        OperadDocument {
            format: FORMAT.into(),
            kind,
            base,
            window: p.window,
            truncated_at,
            metadata: Metadata { name: name.map(str::to_string), seed: None },
            components: p.comps.iter().map(|(&k, c)| component_doc(k, c)).collect(),
            compositions,
            contractions,
            endomorphism: None,
            tower: None,
        }
    }

    /// A Σ-module document holding generators.
    pub fn from_generators(kind: Kind, window: usize, gens: &BTreeMap<Idx, Component>, name: Option<&str>) -> Self {
        OperadDocument {
            format: FORMAT.into(),
            kind: DocKind::SigmaModule,
            base: Some(kind),
            window,
            truncated_at: None,
            metadata: Metadata { name: name.map(str::to_string), seed: None },
            components: gens.iter().map(|(&k, c)| component_doc(k, c)).collect(),
            compositions: vec![],
            contractions: vec![],
            endomorphism: None,
            tower: None,
        }
    }

    pub fn operad_kind(&self) -> Result<Kind, DocError> {
        match self.kind {
            DocKind::Operad => Ok(Kind::Plain),
            DocKind::Modular => Ok(Kind::Modular),
            DocKind::Truncated | DocKind::SigmaModule => self.base.ok_or_else(|| malformed("missing base kind")),
        }
    }

    pub fn check_format(&self) -> Result<(), DocError> {
        if self.format != FORMAT {
            return Err(malformed(format!("format {:?}, expected {FORMAT:?}", self.format)));
        }
        Ok(())
    }

    /// The components alone, for Σ-module documents.
    pub fn components(&self) -> Result<BTreeMap<Idx, Component>, DocError> {
        self.check_format()?;
        let kind = self.operad_kind()?;
        let mut out = BTreeMap::new();
        for c in &self.components {
            if !kind.is_index(c.index) {
                return Err(malformed(format!("{:?} is not an index of a {} object", c.index, kind.name())));
            }
            if out.insert(c.index, parse_component(c)?).is_some() {
                return Err(malformed(format!("{:?} repeated", c.index)));
            }
        }
        Ok(out)
    }

    pub fn to_operad(&self) -> Result<Operad, DocError> {
        let kind = self.operad_kind()?;
        let mut p = Operad::new(kind, self.window);
        p.comps = self.components()?;
        if let Some(k) = p.comps.keys().find(|k| !p.in_window(**k)) {
            return Err(malformed(format!("{k:?} outside the window {}", self.window)));
        }
        let dim = |p: &Operad, k: Idx| p.comps.get(&k).map_or(0, Component::dim);
        for c in &self.compositions {
            let t = p.compose_target(c.a, c.b);
            if !p.composable(c.a, c.b, c.slot) {
                return Err(malformed(format!("composition {:?} o_{} {:?} is not defined", c.a, c.slot + 1, c.b)));
            }
            let rows = dim(&p, t);
            for (x, y, v) in &c.entries {
                if *x >= dim(&p, c.a) || *y >= dim(&p, c.b) {
                    return Err(malformed(format!("composition entry ({x}, {y}) out of range")));
                }
                let v = parse_column(v, rows)?;
                p.set_compose(c.a, c.b, c.slot, *x, *y, v);
            }
        }
        for c in &self.contractions {
            if kind != Kind::Modular || c.a.1 < 2 || c.i >= c.j || c.j >= c.a.1 {
                return Err(malformed(format!("contraction {:?} xi_{}{} is not defined", c.a, c.i + 1, c.j + 1)));
            }
            let t = crate::operad::contract_target(c.a);
            let m = parse_matrix(&c.columns, dim(&p, t), dim(&p, c.a), "contraction")?;
            p.set_contract(c.a, c.i, c.j, m);
        }
        if self.kind == DocKind::Truncated {
            p.tower = Some(self.truncated_at.unwrap_or(self.window));
        }
        Ok(p)
    }

    pub fn endomorphism(&self, p: &Operad) -> Result<Option<OperadMorphism>, DocError> {
        let Some(maps) = &self.endomorphism else { return Ok(None) };
        let mut f = OperadMorphism::default();
        for m in maps {
            let n = p.dim(m.index);
            f.comps.insert(m.index, parse_matrix(&m.columns, n, n, "endomorphism")?);
        }
        Ok(Some(f))
    }

    pub fn with_endomorphism(mut self, f: &OperadMorphism) -> Self {
        self.endomorphism = Some(f.comps.iter().map(|(&index, m)| MapDoc { index, columns: matrix_doc(m) }).collect());
        self
    }

    pub fn from_model(mm: &MinimalModel, name: Option<&str>) -> Self {
        let mut doc = Self::from_operad(&mm.model.operad, name);
        doc.metadata.seed = Some(mm.seed);
        let steps = mm.steps.iter().map(|s| StepDoc { level: s.level, generators: s.generators.iter().map(|(k, d)| (*k, d.iter().map(|(a, b)| (*a, *b)).collect())).collect() }).collect();
        let generators = mm
            .model
            .gens
            .iter()
            .map(|(&k, c)| GeneratorDoc {
                index: k,
                degrees: c.degrees.clone(),
                action: c.gens.iter().map(matrix_doc).collect(),
                attachment: mm.model.dgen[&k].iter().map(column_doc).collect(),
                rho: mm.rho_gens.get(&k).map(|v| v.iter().map(column_doc).collect()).unwrap_or_default(),
            })
            .collect();
        doc.tower = Some(TowerDoc { seed: mm.seed, steps, generators });
        doc
    }

    pub fn parse(text: &str) -> Result<Self, DocError> {
        let doc: OperadDocument = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        doc.check_format()?;
        Ok(doc)
    }

    /// Canonical text: pretty JSON with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDoc {
    pub label: String,
    pub source_dims: Vec<(Idx, usize)>,
    pub target_dims: Vec<(Idx, usize)>,
    pub map: Vec<MapDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub format: String,
    pub kind: String,
    pub alpha: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrows: Vec<ArrowDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<Vec<MapDoc>>,
    #[serde(default)]
    pub metadata: Metadata,
}

fn maps(f: &OperadMorphism) -> Vec<MapDoc> {
    f.comps.iter().map(|(&index, m)| MapDoc { index, columns: matrix_doc(m) }).collect()
}

fn dims(p: &Operad) -> Vec<(Idx, usize)> {
    p.comps.iter().map(|(&k, c)| (k, c.dim())).collect()
}

impl WitnessDocument {
    pub fn new(alpha: &crate::qlinalg::Rational, outcome: &FormalityOutcome, metadata: Metadata) -> Self {
        let base = |outcome: &str| WitnessDocument {
            format: FORMAT.into(),
            kind: "formality-witness".into(),
            alpha: rational_to_string(alpha),
            outcome: outcome.into(),
            reason: None,
            arrows: vec![],
            automorphism: None,
            metadata: metadata.clone(),
        };
        match outcome {
            FormalityOutcome::Formal(w) => Self::from_witness(base("formal"), w),
            FormalityOutcome::Inconclusive { idx, reason } => WitnessDocument { reason: Some(format!("{idx:?}: {reason}")), ..base("inconclusive") },
        }
    }

    pub fn from_witness(mut self, w: &FormalityWitness) -> Self {
        self.arrows = w.arrows.iter().map(|a| ArrowDoc { label: a.label.clone(), source_dims: dims(&a.source), target_dims: dims(&a.target), map: maps(&a.map) }).collect();
        self.automorphism = w.automorphism.as_ref().map(maps);
        self
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn operads_round_trip() {
        for name in fixtures::NAMES {
            let p = fixtures::build(name).unwrap();
            let doc = OperadDocument::from_operad(&p, Some(name));
            let text = doc.to_text();
            let back = OperadDocument::parse(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_text(), text);
            assert_eq!(back.to_operad().unwrap(), p, "{name}");
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let good = OperadDocument::from_operad(&fixtures::com(3), None).to_text();
        assert!(OperadDocument::parse(&good.replace("operad-forge/1", "operad-forge/0")).is_err());
        assert!(OperadDocument::parse("{").is_err());
        let mut doc = OperadDocument::parse(&good).unwrap();
        doc.compositions[0].entries[0].2 = vec![(5, "1".into())];
        assert!(doc.to_operad().is_err());
        let mut doc = OperadDocument::parse(&good).unwrap();
        doc.components[0].d = vec![vec![(0, "1/0".into())]];
        assert!(doc.to_operad().is_err());
    }
}
