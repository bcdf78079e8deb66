//! Batch commands. Each returns its exit code and the text for both streams.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cubical::alt_check;
use crate::document::{DocKind, Metadata, OperadDocument, WitnessDocument};
use crate::minimal::{is_minimal, minimal_model};
use crate::operad::free::free_on;
use crate::operad::{fmt_idx, homology_operad, Kind};
use crate::qlinalg::parse_rational;
use crate::trees::{enumerate_stable_graphs, enumerate_trees};
use crate::weight::{formality_check, formality_witness_from_pure, purity_check, FormalityOutcome, WeightFunction};

pub const FIXTURE_ENV: &str = "OPERAD_FORGE_FIXTURES";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        let mut stderr = stderr.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome { code, stdout: String::new(), stderr }
    }
}

/// The shipped fixture directory, or the one named by `OPERAD_FORGE_FIXTURES`.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os(FIXTURE_ENV).map(PathBuf::from).unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

/// A path as given, or else `<fixture dir>/<name>.json`.
pub fn resolve(file: &str) -> PathBuf {
    let p = PathBuf::from(file);
    if p.exists() {
        return p;
    }
    let in_dir = fixture_dir().join(format!("{file}.json"));
    if in_dir.exists() {
        in_dir
    } else {
        p
    }
}

fn load(file: &str) -> Result<OperadDocument, Outcome> {
    let path = resolve(file);
    let text = std::fs::read_to_string(&path).map_err(|e| Outcome::fail(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
    OperadDocument::parse(&text).map_err(|e| Outcome::fail(EXIT_MALFORMED, format!("{}: {e}", path.display())))
}

fn name_of(doc: &OperadDocument, file: &str) -> String {
    doc.metadata.name.clone().unwrap_or_else(|| Path::new(file).file_stem().map_or(file.into(), |s| s.to_string_lossy().into_owned()))
}

pub fn cmd_validate(file: &str) -> Outcome {
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let name = name_of(&doc, file);
    if doc.kind == DocKind::SigmaModule {
        let comps = match doc.components() {
            Ok(c) => c,
            Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
        };
        for (k, c) in &comps {
            if let Err(v) = c.validate() {
                return Outcome::fail(EXIT_FAILURE, format!("{name}: component {k:?}: {v}"));
            }
        }
        return Outcome::ok(format!("{name}: valid sigma-module, {} components\n", comps.len()));
    }
    let p = match doc.to_operad() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
    };
    if let Err(v) = p.validate() {
        return Outcome::fail(EXIT_FAILURE, format!("{name}: {v}"));
    }
    match doc.endomorphism(&p) {
        Ok(Some(f)) => {
            if let Err(v) = f.check(&p, &p) {
                return Outcome::fail(EXIT_FAILURE, format!("{name}: endomorphism: {v}"));
            }
        }
        Ok(None) => {}
        Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
    }
    let mut out = format!("{name}: valid {} (window {}", p.kind.name(), p.window);
    if let Some(n) = p.tower {
        let _ = write!(out, ", truncated at {n}");
    }
    let _ = writeln!(out, ", {} components)", p.comps.len());
    Outcome::ok(out)
}

pub fn cmd_homology(file: &str) -> Outcome {
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let p = match doc.to_operad() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
    };
    if let Err(v) = p.validate() {
        return Outcome::fail(EXIT_FAILURE, format!("{}: {v}", name_of(&doc, file)));
    }
    let (_, hs) = homology_operad(&p);
    let mut out = String::from("component\tdim\thomology\n");
    for idx in p.indices() {
        let dim = p.dim(idx);
        let h = hs.get(&idx).map(|h| h.dims()).unwrap_or_default();
        let hs: Vec<String> = h.iter().filter(|(_, n)| **n > 0).map(|(d, n)| format!("H_{d}={n}")).collect();
        let _ = writeln!(out, "{}\t{dim}\t{}", fmt_idx(p.kind, idx), if hs.is_empty() { "0".into() } else { hs.join(" ") });
    }
    Outcome::ok(out)
}

/// Free operad (`max_arity`) or free modular operad (`max_dim`) on a Σ-module document.
pub fn cmd_free(file: &str, max_arity: Option<usize>, max_dim: Option<usize>) -> Outcome {
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    if doc.kind != DocKind::SigmaModule {
        return Outcome::fail(EXIT_FAILURE, "free: expected a sigma-module document");
    }
    let gens = match doc.components() {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
    };
    for (k, c) in &gens {
        if let Err(v) = c.validate() {
            return Outcome::fail(EXIT_FAILURE, format!("generator {k:?}: {v}"));
        }
    }
    let kind = doc.base.unwrap_or(Kind::Plain);
    let window = match (kind, max_arity, max_dim) {
        (Kind::Plain, Some(n), None) => n,
        (Kind::Modular, None, Some(n)) => n,
        (Kind::Plain, _, _) => return Outcome::fail(EXIT_FAILURE, "free: a plain sigma-module needs --max-arity"),
        (Kind::Modular, _, _) => return Outcome::fail(EXIT_FAILURE, "free: a modular sigma-module needs --max-dim"),
    };
    let f = free_on(kind, &gens, window);
    let name = format!("free-{}", name_of(&doc, file));
    Outcome::ok(OperadDocument::from_operad(&f.operad, Some(&name)).to_text())
}

pub fn cmd_minimal_model(file: &str, max: usize, seed: u64) -> Outcome {
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let p = match doc.to_operad() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
    };
    if let Err(v) = p.validate() {
        return Outcome::fail(EXIT_FAILURE, format!("{}: {v}", name_of(&doc, file)));
    }
    let mm = match minimal_model(&p, max, seed) {
        Ok(m) => m,
        Err(e) => return Outcome::fail(EXIT_FAILURE, format!("minimal-model: {e}")),
    };
    if let Err(level) = is_minimal(&mm.model) {
        return Outcome::fail(EXIT_FAILURE, format!("minimal-model: result is not minimal at level {level}"));
    }
    let name = format!("model-{}", name_of(&doc, file));
    Outcome::ok(OperadDocument::from_model(&mm, Some(&name)).to_text())
}

/// With an endomorphism in the document its purity is certified directly;
/// otherwise the grading automorphism is lifted through the minimal model.
pub fn cmd_check_formality(file: &str, alpha: &str, max: usize) -> Outcome {
    let Some(a) = parse_rational(alpha) else {
        return Outcome::fail(EXIT_MALFORMED, format!("bad --alpha {alpha:?}"));
    };
    let doc = match load(file) {
        Ok(d) => d,
        Err(o) => return o,
    };
    let p = match doc.to_operad() {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
    };
    if let Err(v) = p.validate() {
        return Outcome::fail(EXIT_FAILURE, format!("{}: {v}", name_of(&doc, file)));
    }
    let meta = Metadata { name: Some(format!("witness-{}", name_of(&doc, file))), seed: Some(0) };
    let endo = match doc.endomorphism(&p) {
        Ok(f) => f,
        Err(e) => return Outcome::fail(EXIT_MALFORMED, e.to_string()),
    };
    let outcome = match endo {
        Some(f) => {
            let w = match WeightFunction::new(a.clone()) {
                Ok(w) => w,
                Err(e) => return Outcome::fail(EXIT_FAILURE, format!("check-formality: {e}")),
            };
            match purity_check(&p, &f, &w).and_then(|pure| formality_witness_from_pure(&p, &pure)) {
                Ok(wit) => FormalityOutcome::Formal(Box::new(wit)),
                Err(e) => return Outcome::fail(EXIT_FAILURE, format!("check-formality: {e}")),
            }
        }
        None => match formality_check(&p, max, a.clone()) {
            Ok(o) => o,
            Err(e) => return Outcome::fail(EXIT_FAILURE, format!("check-formality: {e}")),
        },
    };
    match &outcome {
        FormalityOutcome::Formal(_) => Outcome::ok(WitnessDocument::new(&a, &outcome, meta).to_text()),
        FormalityOutcome::Inconclusive { idx, reason } => Outcome {
            code: EXIT_OK,
            stdout: "inconclusive\n".into(),
            stderr: format!("check-formality: inconclusive at {}: {reason}\n", fmt_idx(p.kind, *idx)),
        },
    }
}

#[derive(Serialize)]
struct Listing {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<usize>,
    legs: usize,
    count: usize,
    items: Vec<String>,
}

pub enum Enumerate {
    Trees(usize),
    StableGraphs(usize, usize),
}

/// A text table, or JSON with `json`.
pub fn cmd_enumerate(what: Enumerate, json: bool) -> Outcome {
    let listing = match what {
        Enumerate::Trees(n) => {
            if n < 2 {
                return Outcome::fail(EXIT_FAILURE, "enumerate: trees need at least 2 leaves");
            }
            let items: Vec<String> = enumerate_trees(n).iter().map(ToString::to_string).collect();
            Listing { kind: "trees", genus: None, legs: n, count: items.len(), items }
        }
        Enumerate::StableGraphs(g, l) => {
            if 2 * g + l < 3 {
                return Outcome::fail(EXIT_FAILURE, format!("enumerate: ({g}, {l}) is unstable"));
            }
            let items: Vec<String> = enumerate_stable_graphs(g, l).iter().map(ToString::to_string).collect();
            Listing { kind: "stable-graphs", genus: Some(g), legs: l, count: items.len(), items }
        }
    };
    if json {
        let mut s = serde_json::to_string_pretty(&listing).expect("serializable");
        s.push('\n');
        return Outcome::ok(s);
    }
    let mut out = match listing.genus {
        Some(g) => format!("# stable graphs of type ({g}, {}): {}\n", listing.legs, listing.count),
        None => format!("# trees with {} leaves: {}\n", listing.legs, listing.count),
    };
    for (i, t) in listing.items.iter().enumerate() {
        let _ = writeln!(out, "{}\t{t}", i + 1);
    }
    Outcome::ok(out)
}

pub fn cmd_alt_check(dim: usize, trials: usize, seed: u64) -> Outcome {
    let r = alt_check(dim, trials, seed);
    let mut out = String::new();
    let _ = writeln!(out, "seed\t{seed}");
    let _ = writeln!(out, "max dimension\t{}", r.max_dim);
    let _ = writeln!(out, "cubes checked\t{}", r.cubes);
    let _ = writeln!(out, "random chains\t{}", r.random_chains);
    let _ = writeln!(out, "(tau, r, i) triples\t{}", r.permutations);
    let _ = writeln!(out, "result\t{}", if r.passed() { "pass" } else { "fail" });
    if r.passed() {
        Outcome::ok(out)
    } else {
        Outcome { code: EXIT_FAILURE, stdout: out, stderr: r.failures.join("\n") + "\n" }
    }
}

/// Golden files: every named operad plus the generator Σ-modules.
pub fn golden_documents() -> BTreeMap<String, String> {
    use crate::fixtures;
    let mut out = BTreeMap::new();
    for name in fixtures::NAMES {
        let p = fixtures::build(name).expect("named fixture");
        out.insert((*name).to_string(), OperadDocument::from_operad(&p, Some(name)).to_text());
    }
    let p = fixtures::com_plus_acyclic();
    let doc = OperadDocument::from_operad(&p, Some("com-plus-acyclic-weighted")).with_endomorphism(&fixtures::com_plus_acyclic_endomorphism());
    out.insert("com-plus-acyclic-weighted".into(), doc.to_text());
    for g in ["trivial", "regular", "mixed"] {
        let gens = fixtures::generators(g).expect("named generators").into_iter().map(|(a, c)| ((0, a), c)).collect();
        let name = format!("generators-{g}");
        out.insert(name.clone(), OperadDocument::from_generators(Kind::Plain, 5, &gens, Some(&name)).to_text());
    }
    let name = "generators-modular";
    out.insert(name.into(), OperadDocument::from_generators(Kind::Modular, 2, &fixtures::modular_generators(), Some(name)).to_text());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(name: &str, text: &str) -> String {
        let dir = std::env::temp_dir().join(format!("operad-forge-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    #[test]
    fn homology_of_the_cone_is_zero() {
        let docs = golden_documents();
        let f = write_tmp("cone.json", &docs["cone-of-identity"]);
        let o = cmd_homology(&f);
        assert_eq!(o.code, 0);
        assert!(o.stdout.lines().skip(1).all(|l| l.ends_with("\t0")), "{}", o.stdout);
    }

    #[test]
    fn exit_codes() {
        let f = write_tmp("broken.json", "{ \"format\": ");
        assert_eq!(cmd_validate(&f).code, EXIT_MALFORMED);
        let mut doc = OperadDocument::parse(&golden_documents()["com3"]).unwrap();
        doc.compositions[0].entries[0].2 = vec![(0, "2".into())];
        let f = write_tmp("bad-com.json", &doc.to_text());
        let o = cmd_validate(&f);
        assert_eq!(o.code, EXIT_FAILURE, "{o:?}");
        assert!(!o.stderr.is_empty());
        assert_eq!(cmd_check_formality(&f, "x/y", 3).code, EXIT_MALFORMED);
    }

    #[test]
    fn one_stable_graph_of_type_zero_three() {
        let o = cmd_enumerate(Enumerate::StableGraphs(0, 3), false);
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("# stable graphs of type (0, 3): 1\n"));
        let o = cmd_enumerate(Enumerate::Trees(4), true);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["count"], 26);
    }

    #[test]
    fn free_needs_the_right_bound() {
        let docs = golden_documents();
        let f = write_tmp("gens.json", &docs["generators-trivial"]);
        assert_eq!(cmd_free(&f, None, Some(2)).code, EXIT_FAILURE);
        let o = cmd_free(&f, Some(4), None);
        assert_eq!(o.code, 0);
        let p = OperadDocument::parse(&o.stdout).unwrap().to_operad().unwrap();
        assert_eq!(p.dim((0, 4)), 15);
    }
}
