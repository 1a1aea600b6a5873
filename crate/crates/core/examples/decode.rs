//! Substitute chosen values into a sketch and print plain Java. Holes in
//! boolean position print as `true`/`false`.

use oosketch::decode::{apply_solution, unparse};
use oosketch::frontend::parse_sources;
use oosketch::pipeline::{compile, StageLog};
use oosketch::unknowns::Assignment;

pub fn main() {
    let src = "class Flag { static boolean on() { return {| true, false |} || ??; } }";
    let ast = parse_sources(&[("Flag.java", src)]).unwrap();
    let compiled = compile(&ast, Default::default(), &mut StageLog::default()).unwrap();
    let asg = Assignment { repeats: vec![], holes: vec![vec![0]], choices: vec![vec![1]] };
    let (concrete, log) = apply_solution(&compiled.sketch, &compiled.registry, &asg).unwrap();
    for r in &log {
        println!("{r}");
    }
    let text = &unparse(&concrete)["Flag.java"];
    print!("{text}");
    assert!(text.contains("return false || false;"));
}
