use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_operad-forge")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn validate_every_shipped_fixture() {
    for e in std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")).unwrap() {
        let path = e.unwrap().path();
        let o = run(&["validate", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn exit_codes_and_streams() {
    let o = run(&["validate", "/nonexistent/operad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    let o = run(&["check-formality", &fixture("com3"), "--alpha", "1", "--max", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["enumerate", "--trees", "3", "--stable-graphs", "0", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixture_directory_override() {
    let dir = std::env::temp_dir().join(format!("operad-forge-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::copy(fixture("cone-of-identity"), dir.join("my-cone.json")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_operad-forge")).env("OPERAD_FORGE_FIXTURES", &dir).args(["homology", "my-cone"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with("\t0")), "{text}");
    assert!(!run(&["homology", "my-cone"]).status.success());
}

#[test]
fn same_seed_same_bytes() {
    let dir = std::env::temp_dir().join(format!("operad-forge-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for seed in ["0", "5"] {
        let a = dir.join(format!("a{seed}.json"));
        let b = dir.join(format!("b{seed}.json"));
        for out in [&a, &b] {
            let o = run(&["minimal-model", &fixture("com4"), "--max", "4", "--seed", seed, "--out", out.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            assert!(o.stdout.is_empty());
        }
        let text = std::fs::read(&a).unwrap();
        assert_eq!(text, std::fs::read(&b).unwrap());
        assert!(String::from_utf8(text).unwrap().contains(&format!("\"seed\": {seed}")));
    }
    let a = run(&["alt-check", "--dim", "3", "--trials", "25", "--seed", "9"]);
    assert_eq!(a.stdout, run(&["alt-check", "--dim", "3", "--trials", "25", "--seed", "9"]).stdout);
}

#[test]
fn free_then_minimal_model() {
    let dir = std::env::temp_dir().join(format!("operad-forge-free-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let free = dir.join("free.json");
    let o = run(&["free", &fixture("generators-mixed"), "--max-arity", "4", "--out", free.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["minimal-model", free.to_str().unwrap(), "--max", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["validate", free.to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn formality_outcomes() {
    let o = run(&["check-formality", &fixture("com-plus-acyclic"), "--max", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"], "formal");
    assert_eq!(v["arrows"].as_array().unwrap().len(), 4);
    let o = run(&["check-formality", &fixture("truncated-com-model"), "--max", "4"]);
    assert!(o.status.success());
    assert_eq!(o.stdout, b"inconclusive\n");
}
