//! Run a harness under a hand-picked assignment of the unknowns.

use oosketch::engine::{eval_harness, EvalStatus, Limits};
use oosketch::pipeline::{compile, StageLog};
use oosketch::unknowns::Assignment;

pub fn main() {
    let src = "class Test { harness static void h() { int x = ??; assert x * x == 9; } }";
    let ast = oosketch::frontend::parse_sources(&[("Test.java", src)]).unwrap();
    let ir = compile(&ast, Default::default(), &mut StageLog::default()).unwrap().ir;
    for x in 0..5u64 {
        let asg = Assignment { repeats: vec![], holes: vec![vec![x]], choices: vec![] };
        let out = eval_harness(&ir, 0, &asg, &Limits::default());
        println!("x = {x}: {:?} in {} steps", out.status, out.steps_used);
        assert_eq!(out.status == EvalStatus::Pass, x == 3);
    }
}
