//! `solution.txt` is line-oriented and parses back into an assignment.

use oosketch::engine::parse_solution;
use oosketch::pipeline::synthesize_sources;

pub fn main() {
    let src = "class P { harness static void h() { int a = ??; int b = ??; assert a * b == 6 && a < b; } }";
    let syn = synthesize_sources(&[("P.java", src)], &Default::default(), &mut Default::default()).unwrap();
    print!("{}", syn.solution_text);
    let parsed = parse_solution(&syn.solution_text).unwrap();
    assert_eq!(parsed.assignment(&syn.compiled.registry), Some(syn.solution.assignment.clone()));
}
