//! `minimize(e)` picks, among all passing completions, one with the least `e`.

use oosketch::pipeline::synthesize_sources;

pub fn main() {
    let src = "class Box {
                   static int size = ??;
                   harness static void fits() {
                       minimize(size);
                       assert size * size >= 30;
                   }
               }";
    let syn = synthesize_sources(&[("Box.java", src)], &Default::default(), &mut Default::default()).unwrap();
    print!("{}", syn.solution_text);
    assert_eq!(syn.solution.objective_values.values().next(), Some(&6));
}
