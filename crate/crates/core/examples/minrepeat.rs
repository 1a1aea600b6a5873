//! `minrepeat` is replicated as few times as the harness allows, each copy
//! with fresh unknowns.

use oosketch::pipeline::synthesize_sources;

pub fn main() {
    let src = "class Lookup {
                   static int get(int k) {
                       minrepeat { if (k == ??) { return ??; } }
                       return 0;
                   }
                   harness static void table() {
                       assert get(1) == 10;
                       assert get(2) == 20;
                       assert get(3) == 0;
                   }
               }";
    let syn = synthesize_sources(&[("Lookup.java", src)], &Default::default(), &mut Default::default()).unwrap();
    print!("{}", syn.files["Lookup.java"]);
    assert_eq!(syn.solution.stats.depth, 2);
}
