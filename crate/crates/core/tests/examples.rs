//! Worked examples through the public API, mostly driven by the corpus.

mod common;

use common::*;
use nesy_core::colimit::{combine, evaluate_combines, CombineError};
use nesy_core::dsl::{parse, resolve, Decl, PatternBody, ResolveErrorKind};
use nesy_core::emit::{combination_to_json, emit_dot};
use nesy_core::network::{Network, NetworkError};
use nesy_core::pattern::isomorphic;
use nesy_core::refinement::{check_refinement, infer_refinement, NodeMap, Violation};
use nesy_core::{Catalog, Library, RefinementError};

fn generate_and_train() -> Library {
    load(&corpus("generate_and_train.nesy")).unwrap()
}

fn resolve_errors(text: &str) -> Vec<ResolveErrorKind> {
    let doc = parse(text).unwrap();
    resolve(&doc, &Catalog::builtin()).unwrap_err().into_iter().map(|e| e.kind).collect()
}

#[test]
fn generate_and_train_document_shape() {
    let doc = parse(&corpus("generate_and_train.nesy")).unwrap();
    let patterns = doc.declarations.iter().filter(|d| matches!(d, Decl::Pattern(_))).count();
    let combines = doc
        .declarations
        .iter()
        .filter(|d| matches!(d, Decl::Pattern(p) if matches!(p.body, PatternBody::Combine(_))))
        .count();
    let refinements = doc.declarations.iter().filter(|d| matches!(d, Decl::Refinement(_))).count();
    let networks = doc.declarations.iter().filter(|d| matches!(d, Decl::Network(_))).count();
    assert_eq!((patterns, combines, refinements, networks), (4, 1, 2, 1));
}

#[test]
fn embedding_extension_text() {
    let doc = parse(&corpus("embedding.nesy")).unwrap();
    let Decl::Pattern(p) = &doc.declarations[0] else { panic!() };
    let PatternBody::Data { ontology, .. } = &p.body else { panic!() };
    assert_eq!(ontology.extension.as_ref().unwrap().text, "Class Embedding SubClassOf: Transformation");
}

#[test]
fn shared_ids_and_label_mismatch() {
    let lib = generate_and_train();
    let sd = &lib.patterns["SemanticDeduction"];
    assert_eq!((sd.node_count(), sd.edge_count()), (4, 3));
    let symbols = sd.nodes().iter().filter(|n| n.label.local_name() == "Symbol").count();
    assert_eq!(symbols, 2);
    assert_eq!((lib.patterns["Model"].node_count(), lib.patterns["Model"].edge_count()), (1, 0));

    let errs = resolve_errors(
        "logic NeSyPatterns\npattern P = data ontohub:NeSyPatterns.omn\n  d : Deduction -> d2 : Deduction; d : Training;\nend\n",
    );
    assert!(matches!(&errs[..], [ResolveErrorKind::LabelMismatch { id, .. }] if id == "d"), "{errs:?}");
}

#[test]
fn unknown_names_classes_and_prefixes() {
    let errs = resolve_errors("logic NeSyPatterns\npattern P = data ontohub:NeSyPatterns.omn\n  Wizard;\nend\nrefinement R = P refined to Q end\n");
    assert!(matches!(&errs[0], ResolveErrorKind::UnknownClass(c) if c == "Wizard"));
    // R depends on the failed P and is not reported again
    assert_eq!(errs.len(), 1, "{errs:?}");

    let errs = resolve_errors("logic NeSyPatterns\npattern P = data nowhere:X.omn\n  Model;\nend\n");
    assert!(matches!(&errs[0], ResolveErrorKind::CatalogMiss(_)));

    let errs = resolve_errors("logic NeSyPatterns\nnetwork N = Ghost end\n");
    assert!(matches!(&errs[0], ResolveErrorKind::Network(NetworkError::UnknownName(n)) if n == "Ghost"), "{errs:?}");
}

#[test]
fn forward_references_are_rejected() {
    let errs = resolve_errors(
        "logic NeSyPatterns\nrefinement R = A refined to B end\npattern A = data ontohub:NeSyPatterns.omn\n  Model;\nend\n",
    );
    assert!(matches!(&errs[0], ResolveErrorKind::UnknownName(n) if n == "A"));
}

#[test]
fn refinement_examples() {
    let lib = generate_and_train();
    let r1 = &lib.refinements["R1"];
    let train = &lib.patterns["Train"];
    let image = &r1.node_map().values().next().unwrap();
    assert_eq!(train.label(image).unwrap().local_name(), "Model");
    let r2 = &lib.refinements["R2"];
    let sd = &lib.patterns["SemanticDeduction"];
    assert_eq!(sd.label(r2.node_map().values().next().unwrap()).unwrap().local_name(), "Semantic_Model");

    let lib = resolve_only(&corpus("ambiguous.nesy")).unwrap();
    match infer_refinement("R", lib.patterns["Symbol"].clone(), lib.patterns["SemanticDeduction"].clone()) {
        Err(RefinementError::Ambiguous { witnesses, .. }) => assert_ne!(witnesses[0], witnesses[1]),
        other => panic!("{other:?}"),
    }

    let errs = resolve_errors(&corpus("norefinement.nesy"));
    assert!(matches!(&errs[..], [ResolveErrorKind::Refinement(RefinementError::NoRefinement { .. })]), "{errs:?}");
}

#[test]
fn check_refinement_by_position_and_label_violation() {
    let lib = load(
        "logic NeSyPatterns
pattern Generic = data ontohub:NeSyPatterns.omn
  i : Instance -> t : Training -> m : Model;
end
pattern Stat = data ontohub:NeSyPatterns.omn
  d : Data -> t : Training -> s : Statistical_Model;
end
pattern Sym = data ontohub:NeSyPatterns.omn
  x : Symbol;
end
",
    )
    .unwrap();
    let map: NodeMap = [("i", "d"), ("t", "t"), ("m", "s")].into_iter().map(|(a, b)| (a.into(), b.into())).collect();
    assert!(check_refinement(&lib.patterns["Generic"], &lib.patterns["Stat"], &map).unwrap().is_empty());

    let model = load("logic NeSyPatterns\npattern M = data ontohub:NeSyPatterns.omn\n  m : Model;\nend\n").unwrap();
    let map: NodeMap = [("m".into(), "x".into())].into_iter().collect();
    let v = check_refinement(&model.patterns["M"], &lib.patterns["Sym"], &map).unwrap();
    assert!(matches!(&v[..], [Violation::Label { .. }]), "{v:?}");
}

#[test]
fn refinement_via_explicit_map() {
    let text = format!("{}refinement R3 = Symbol refined to SemanticDeduction via anon1 |-> anon2 end\n", corpus("ambiguous.nesy"));
    let lib = resolve_only(&text).unwrap();
    assert_eq!(lib.refinements["R3"].node_map()[&"anon1".into()].as_str(), "anon2");

    let bad = format!("{}refinement R3 = Symbol refined to SemanticDeduction via anon1 |-> nope end\n", corpus("ambiguous.nesy"));
    assert!(matches!(&resolve_errors(&bad)[0], ResolveErrorKind::UnknownNode { .. }));
}

#[test]
fn network_examples() {
    let lib = generate_and_train();
    let n = &lib.networks["N"];
    let names: Vec<&str> = n.patterns().iter().map(|p| p.name()).collect();
    assert_eq!(names, ["Model", "SemanticDeduction", "Train"]);
    assert_eq!(n.edges().len(), 2);

    let single = Network::new("One", [lib.patterns["Train"].clone()], []).unwrap();
    let res = combine(&single).unwrap();
    assert!(isomorphic(&res.pattern, &lib.patterns["Train"]));
    assert_eq!(res.injections["Train"].len(), 3);

    let embedding = load(&corpus("embedding.nesy")).unwrap();
    let err = Network::new("Mixed", [embedding.patterns["Embedding"].clone(), lib.patterns["Train"].clone()], []).unwrap_err();
    assert!(matches!(err, NetworkError::TaxonomyMismatch(..)));
    let text = format!(
        "{}pattern E = data {{ ontohub:NeSyPatterns.omn then Class Embedding SubClassOf: Transformation }}\n  Model;\nend\nrefinement RE = Model refined to E end\nnetwork M = Train, RE end\n",
        corpus("generate_and_train.nesy")
    );
    let errs = resolve_errors(&text);
    assert!(
        errs.iter().any(|e| matches!(e, ResolveErrorKind::Refinement(RefinementError::TaxonomyMismatch { .. }))),
        "{errs:?}"
    );
}

#[test]
fn disjoint_union_without_refinements() {
    let lib = generate_and_train();
    let n = Network::new("U", [lib.patterns["Train"].clone(), lib.patterns["SemanticDeduction"].clone()], []).unwrap();
    let res = combine(&n).unwrap();
    assert_eq!(res.pattern.node_count(), 7);
    assert_eq!(res.pattern.edge_count(), 5);
}

#[test]
fn generate_and_train_outputs() {
    let lib = generate_and_train();
    let p = &lib.patterns["SemanticGenerateAndTrain"];
    let dot = emit_dot(p);
    assert_eq!(dot.matches("[label=").count(), 6);
    assert_eq!(dot.matches(" -> ").count(), 5);

    let train = emit_dot(&lib.patterns["Train"]);
    assert_eq!(train.matches("[label=").count(), 3);
    assert!(train.contains(": Training\", shape=ellipse]"));

    let res = nesy_core::combine_named(&lib, "SemanticGenerateAndTrain").unwrap();
    let json = combination_to_json(&res);
    assert_eq!(json["nodes"].as_array().unwrap().len(), 6);
    assert_eq!(json["edges"].as_array().unwrap().len(), 5);
    assert_eq!(json["injections"].as_object().unwrap().len(), 3);
    assert_eq!(json["name"], "SemanticGenerateAndTrain");
}

#[test]
fn clash_names_both_labels() {
    let lib = resolve_only(&corpus("clash.nesy")).unwrap();
    let err = evaluate_combines(&lib).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("Clash") && msg.contains("Semantic_Model and Statistical_Model"), "{msg}");
}

#[test]
fn degenerate_loop() {
    let lib = load(
        "logic NeSyPatterns
pattern Two = data ontohub:NeSyPatterns.omn
  a : Symbol -> b : Symbol;
end
pattern One = data ontohub:NeSyPatterns.omn
  x : NeSy_Pattern_Element;
end
refinement Fa = One refined to Two via x |-> a end
refinement Fb = One refined to Two via x |-> b end
network N = Fa, Fb end
",
    )
    .unwrap();
    // a ~ x ~ b glues both ends of a -> b
    let err = combine(&lib.networks["N"]).unwrap_err();
    assert!(matches!(err, CombineError::DegenerateLoop { ref from, ref to, .. } if from == "Two.a" && to == "Two.b"), "{err:?}");
}

#[test]
fn cyclic_combines_are_detected() {
    let mut lib = generate_and_train();
    // N now lists the pattern defined as its own combination
    let sgt = lib.patterns["SemanticGenerateAndTrain"].clone();
    let n = Network::new("N", [lib.patterns["Train"].clone(), sgt], []).unwrap();
    lib.networks.insert("N".into(), n);
    lib.patterns.shift_remove("SemanticGenerateAndTrain");
    assert!(matches!(evaluate_combines(&lib), Err(CombineError::CyclicCombine(_))));
}

#[test]
fn library_without_combines_is_unchanged() {
    let lib = resolve_only(&corpus("ambiguous.nesy")).unwrap();
    assert_eq!(evaluate_combines(&lib).unwrap(), lib);
}

#[test]
fn extension_warnings_and_errors_are_positioned_in_the_document() {
    let text = "logic NeSyPatterns\npattern P = data { ontohub:NeSyPatterns.omn\n  then Class: A SubClassOf: Nope }\n  Model;\nend\n";
    let doc = parse(text).unwrap();
    let errs = resolve(&doc, &Catalog::builtin()).unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].pos.line, 3, "{:?}", errs[0]);
}
