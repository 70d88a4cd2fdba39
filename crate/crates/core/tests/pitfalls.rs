use std::collections::HashMap;
use std::path::Path;

use shaderlens_core::lang::{validate, DiagnosticCode, InterfaceContract};
use shaderlens_core::testkit::{check_pitfall, load_pitfall_corpus, mutants};
use shaderlens_core::effects;

fn corpus_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/pitfalls"))
}

#[test]
fn corpus_covers_every_code_twice() {
    let cases = load_pitfall_corpus(corpus_dir()).unwrap();
    assert!(cases.len() >= 20, "{} cases", cases.len());
    let mut per_code: HashMap<DiagnosticCode, usize> = HashMap::new();
    for c in &cases {
        *per_code.entry(c.code).or_default() += 1;
    }
    for code in DiagnosticCode::ALL {
        assert!(per_code.get(&code).copied().unwrap_or(0) >= 2, "{code} covered fewer than twice");
    }
}

#[test]
fn every_case_is_rejected_at_its_lexeme() {
    let failures: Vec<String> = load_pitfall_corpus(corpus_dir())
        .unwrap()
        .iter()
        .filter_map(|c| check_pitfall(c).err().map(|e| format!("{}: {e}", c.name)))
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn no_false_rejects_on_library_and_mutants() {
    let contract = InterfaceContract::default();
    for e in effects::entries() {
        assert!(validate(e.source, &contract).is_ok(), "{}", e.name);
    }
    for (i, m) in mutants(0x5eed, 100).iter().enumerate() {
        assert!(validate(m, &contract).is_ok(), "mutant {i}:\n{m}");
    }
}

#[test]
fn diagnostics_are_capped_and_sorted() {
    let mut src = String::from("void main() {\n");
    for i in 0..20 {
        src.push_str(&format!("    float a{i} = undefined{i};\n"));
    }
    src.push_str("    gl_FragColor = vec4(1.0);\n}\n");
    let diags = validate(&src, &InterfaceContract::default()).unwrap_err();
    assert_eq!(diags.len(), 10);
    assert!(diags.windows(2).all(|w| (w[0].line, w[0].col) <= (w[1].line, w[1].col)));
}

#[test]
fn validation_is_deterministic() {
    for c in load_pitfall_corpus(corpus_dir()).unwrap() {
        let a = validate(&c.source, &InterfaceContract::default()).unwrap_err();
        let b = validate(&c.source, &InterfaceContract::default()).unwrap_err();
        assert_eq!(a, b);
    }
    let src = effects::effect_source("keep_green").unwrap();
    let a = serde_json::to_string(validate(src, &InterfaceContract::default()).unwrap().ast()).unwrap();
    let b = serde_json::to_string(validate(src, &InterfaceContract::default()).unwrap().ast()).unwrap();
    assert_eq!(a, b);
}
