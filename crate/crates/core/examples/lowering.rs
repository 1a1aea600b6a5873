//! The flat program the engine runs: records, class-id dispatch and
//! harnesses as plain functions.

use oosketch::lowering::print_program;
use oosketch::pipeline::{compile, StageLog};

pub fn main() {
    let src = "interface Animal { int legs(); }
               class Bird implements Animal { public int legs() { return 2; } }
               class Cat implements Animal { public int legs() { return ??; } }
               class Test { harness static void h() { Animal a = new Cat(); assert a.legs() == 4; } }";
    let ast = oosketch::frontend::parse_sources(&[("Zoo.java", src)]).unwrap();
    let compiled = compile(&ast, Default::default(), &mut StageLog::default()).unwrap();
    let ir = print_program(&compiled.ir);
    print!("{ir}");
    assert!(ir.contains("fn dyn_dispatch_legs"));
}
