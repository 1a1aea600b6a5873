//! A generator class gets a fresh copy, with its own unknowns, for every
//! class that extends it.

use oosketch::desugar::specialize_class_generators;
use oosketch::frontend::parse_sources;

const SOURCES: &[(&str, &str)] = &[(
    "Gen.java",
    "generator class Counter { int step = ??; int next(int x) { return x + step; } }
     class ByTwo extends Counter { }
     class ByThree extends Counter { }
     class Test {
         harness static void h() {
             assert new ByTwo().next(1) == 3;
             assert new ByThree().next(1) == 4;
         }
     }",
)];

pub fn main() {
    let ast = parse_sources(SOURCES).unwrap();
    let (_, map) = specialize_class_generators(&ast).unwrap();
    for s in &map.entries {
        println!("{} extends {} -> {}", s.context, s.generator, s.fresh);
    }
    assert_eq!(map.entries.len(), 2);

    let syn = oosketch::pipeline::synthesize_sources(SOURCES, &Default::default(), &mut Default::default()).unwrap();
    print!("{}", syn.files["Gen.java"]);
    assert!(syn.files["Gen.java"].contains("int step = 2;"));
    assert!(syn.files["Gen.java"].contains("int step = 3;"));
}
