use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn nesy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nesy"))
        .args(args)
        .env_remove("NESY_CATALOG")
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = nesy(args);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_clean_document() {
    let (code, out, err) = run(&["check", path(&corpus("generate_and_train.nesy"))]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty() && err.is_empty());
}

#[test]
fn check_reports_positions_and_exit_codes() {
    let file = corpus("norefinement.nesy");
    let (code, out, err) = run(&["check", path(&file)]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.starts_with(&format!("{}:8:12: error: no refinement", file.display())), "{err}");

    let (code, _, err) = run(&["check", "/definitely/missing.nesy"]);
    assert_eq!(code, 2, "{err}");

    // several files: worst code wins, diagnostics in argument order
    let (code, _, err) = run(&["check", path(&corpus("generate_and_train.nesy")), path(&file), "/definitely/missing.nesy"]);
    assert_eq!(code, 2);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("norefinement") && lines[1].contains("missing"));
}

#[test]
fn check_is_deterministic() {
    let (clash, norefinement) = (corpus("clash.nesy"), corpus("norefinement.nesy"));
    let args = ["check", path(&clash), path(&norefinement)];
    let a = nesy(&args);
    let b = nesy(&args);
    assert_eq!(a.stderr, b.stderr);
    assert_eq!(a.status.code(), Some(1));
    let err = String::from_utf8(a.stderr).unwrap();
    assert!(err.contains("Semantic_Model and Statistical_Model"), "{err}");
}

#[test]
fn syntax_errors_are_positioned() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.nesy");
    std::fs::write(&file, "logic NeSyPatterns\npattern P = data ontohub:NeSyPatterns.omn\n  Model ->;\nend\n").unwrap();
    let (code, _, err) = run(&["check", path(&file)]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.nesy:3:11: error: expected"), "{err}");
}

#[test]
fn combine_formats() {
    let generate_and_train = corpus("generate_and_train.nesy");
    let (code, out, err) = run(&["combine", path(&generate_and_train), "--pattern", "SemanticGenerateAndTrain", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.matches("\"label\"").count(), 6);
    assert!(out.contains("\"injections\""));

    let (code, out, _) = run(&["combine", path(&generate_and_train), "--pattern", "Train", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("\"label\"").count(), 3);
    assert!(!out.contains("injections"));

    let (code, out, _) = run(&["combine", path(&generate_and_train), "--pattern", "SemanticGenerateAndTrain", "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph \"SemanticGenerateAndTrain\" {"));

    // the DSL rendering is itself a valid document
    let (code, out, _) = run(&["combine", path(&generate_and_train), "--pattern", "SemanticGenerateAndTrain", "--format", "dsl"]);
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let again = dir.path().join("again.nesy");
    std::fs::write(&again, &out).unwrap();
    let (code, _, err) = run(&["check", path(&again)]);
    assert_eq!(code, 0, "{err}\n{out}");
}

#[test]
fn combine_abox_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("abox.nesy");
    std::fs::write(
        &file,
        "logic NeSyPatterns\npattern P = data ontohub:NeSyPatterns.omn\n  a : Symbol -> b : Training -> c : Model;\nend\n",
    )
    .unwrap();
    let (code, out, err) = run(&["combine", path(&file), "--pattern", "P", "--format", "abox"]);
    assert_eq!(code, 0);
    assert_eq!(out, "a : Symbol\nprovidesInput(a,b)\nb : Training\nhasOutput(b,c)\nc : Model\n");
    assert!(err.is_empty());
}

#[test]
fn combine_failures() {
    let (code, out, err) = run(&["combine", path(&corpus("clash.nesy")), "--pattern", "Clash", "--format", "json"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("Semantic_Model and Statistical_Model"), "{err}");

    let (code, _, err) = run(&["combine", path(&corpus("generate_and_train.nesy")), "--pattern", "Nope"]);
    assert_eq!(code, 1);
    assert!(err.contains("no pattern named `Nope`"));

    let (code, out, _) = run(&["combine", path(&corpus("hybrid.nesy")), "--pattern", "Combined", "--format", "json"]);
    assert_eq!(code, 0);
    assert!(out.contains("Hybrid_Model"));
}

#[test]
fn infer_listing_and_failures() {
    let (code, out, _) = run(&["infer", path(&corpus("generate_and_train.nesy")), "--from", "Model", "--to", "Train"]);
    assert_eq!(code, 0);
    assert_eq!(out, "anon1 |-> anon3\n");

    let (code, out, _) = run(&["infer", path(&corpus("generate_and_train.nesy")), "--from", "Train", "--to", "Train"]);
    assert_eq!(code, 0);
    assert_eq!(out, "anon1 |-> anon1\nanon2 |-> anon2\nanon3 |-> anon3\n");

    let (code, out, err) = run(&["infer", path(&corpus("ambiguous.nesy")), "--from", "Symbol", "--to", "SemanticDeduction"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("{anon1 |-> anon1}") && err.contains("{anon1 |-> anon2}"), "{err}");

    let (code, _, err) = run(&["infer", path(&corpus("norefinement.nesy")), "--from", "Actor", "--to", "Train"]);
    assert_eq!(code, 1);
    assert!(err.contains("no refinement"), "{err}");
}

#[test]
fn catalogs() {
    let dir = tempfile::tempdir().unwrap();
    let generate_and_train = corpus("generate_and_train.nesy");

    let plain = dir.path().join("plain.json");
    std::fs::write(&plain, r#"{"prefixes":{"ontohub":"https://ontohub.org/meta/"},"mappings":{}}"#).unwrap();
    let (code, _, err) = run(&["--catalog", path(&plain), "check", path(&generate_and_train)]);
    assert_eq!(code, 0, "{err}");

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"prefixes":{},"mappings":{}}"#).unwrap();
    let (code, _, err) = run(&["check", path(&generate_and_train), "--catalog", path(&empty)]);
    assert_eq!(code, 2);
    assert!(err.contains("undeclared prefix `ontohub:`"), "{err}");

    let out = Command::new(env!("CARGO_BIN_EXE_nesy"))
        .args(["check", path(&generate_and_train)])
        .env("NESY_CATALOG", &empty)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let malformed = dir.path().join("malformed.json");
    std::fs::write(&malformed, "{").unwrap();
    assert_eq!(run(&["--catalog", path(&malformed), "check", path(&generate_and_train)]).0, 2);

    let dangling = dir.path().join("dangling.json");
    std::fs::write(&dangling, r#"{"prefixes":{},"mappings":{"urn:x":"missing.omn"}}"#).unwrap();
    assert_eq!(run(&["--catalog", path(&dangling), "check", path(&generate_and_train)]).0, 2);

    // a mapping to a local Manchester file
    std::fs::write(
        dir.path().join("gadgets.omn"),
        "Prefix: : <urn:gadgets#>\nOntology: <urn:gadgets>\nClass: Gadget\nClass: Widget SubClassOf: Gadget\n",
    )
    .unwrap();
    let mapped = dir.path().join("mapped.json");
    std::fs::write(&mapped, r#"{"prefixes":{"g":"urn:"},"mappings":{"urn:gadgets":"gadgets.omn"}}"#).unwrap();
    let doc = dir.path().join("gadgets.nesy");
    std::fs::write(
        &doc,
        "logic NeSyPatterns\npattern G = data g:gadgets\n  Gadget;\nend\npattern W = data g:gadgets\n  w : Widget;\nend\nrefinement R = G refined to W end\n",
    )
    .unwrap();
    let (code, _, err) = run(&["--catalog", path(&mapped), "check", path(&doc)]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = run(&["--catalog", path(&mapped), "infer", path(&doc), "--from", "G", "--to", "W"]);
    assert_eq!(code, 0);
    assert_eq!(out, "anon1 |-> w\n");

    // references outside the catalog are not fetched unless asked to
    let remote = dir.path().join("remote.nesy");
    std::fs::write(&remote, "logic NeSyPatterns\npattern P = data <https://example.invalid/x.omn>\n  A;\nend\n").unwrap();
    let (code, _, err) = run(&["check", path(&remote)]);
    assert_eq!(code, 2);
    assert!(err.contains("remote.nesy:2:18: error: cannot resolve ontology"), "{err}");
}
