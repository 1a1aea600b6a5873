//! Emitted programs reparse, keep no sketch syntax and still pass.

mod support;

use oosketch::decode::{unparse, unparse_sketch};
use oosketch::frontend::parse_sources;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

#[test]
fn solved_programs_reparse_and_pass() {
    for set in [MULT2, DB, CADSR, CADSR_SHORT, CADSR_NO_MINIMIZE] {
        let syn = synth(set, &options()).unwrap();
        for (name, text) in &syn.files {
            assert!(sketch_tokens(text).is_empty(), "{name}: {:?}", sketch_tokens(text));
        }
        reparse_and_run(&syn).unwrap_or_else(|e| panic!("{set:?}: {e}"));
    }
}

#[test]
fn generator_copies_become_plain_classes() {
    let syn = synth(DB, &options()).unwrap();
    let automaton = &syn.files["Automaton.java"];
    assert!(automaton.contains("class Automaton1 {"));
    assert!(!automaton.contains("generator"));
    assert!(!automaton.contains("harness"));
    assert!(syn.files["DBConnection.java"].contains("class Monitor extends Automaton1"));
}

#[test]
fn minrepeat_expands_to_guarded_ifs() {
    let syn = synth(DB, &options()).unwrap();
    let dfa = Dfa::from_source(&syn.files["Automaton.java"]);
    assert_eq!(dfa.rules.len() as u32, syn.solution.stats.depth);
}

fn sources(files: &indexmap::IndexMap<String, String>) -> Vec<(String, String)> {
    files.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

#[test]
fn sketch_files_print_stably() {
    for set in [MULT2, DB, CADSR] {
        let once = unparse_sketch(&parse_sources(&load(set)).unwrap());
        let twice = unparse_sketch(&parse_sources(&sources(&once)).unwrap());
        assert_eq!(once, twice);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_is_idempotent(seed in any::<u64>()) {
        let t = Tiny::generate(&mut ChaCha8Rng::seed_from_u64(seed));
        let ast = parse_sources(&[("T.java", t.java())]).unwrap();
        let once = unparse_sketch(&ast);
        let again = parse_sources(&sources(&once)).unwrap();
        prop_assert_eq!(&again, &ast);
        prop_assert_eq!(unparse_sketch(&again), once);
    }

    #[test]
    fn decoded_tiny_sketches_are_clean(seed in any::<u64>()) {
        let t = Tiny::generate(&mut ChaCha8Rng::seed_from_u64(seed));
        let opts = oosketch::Options {
            bounds: oosketch::desugar::UnknownBounds { hole_bits: t.hole_bits, unroll_max: 0 },
            ..options()
        };
        let files = [("T.java".to_string(), t.java())];
        if let Ok(syn) = oosketch::pipeline::synthesize_sources(&files, &opts, &mut Default::default()) {
            let text = &syn.files["T.java"];
            prop_assert!(sketch_tokens(text).is_empty());
            let reparsed = parse_sources(&[("T.java", text.as_str())]).unwrap();
            prop_assert_eq!(&unparse(&reparsed)["T.java"], text);
            prop_assert!(reparse_and_run(&syn).is_ok());
        }
    }
}

#[test]
fn boolean_holes_print_as_literals() {
    let src = "class B { static boolean f() { return ??; } harness static void h() { assert f(); } }";
    let syn = oosketch::pipeline::synthesize_sources(&[("B.java", src)], &options(), &mut Default::default()).unwrap();
    assert!(syn.files["B.java"].contains("return true;"), "{}", syn.files["B.java"]);
    assert!(reparse_and_run(&syn).is_ok());
}
