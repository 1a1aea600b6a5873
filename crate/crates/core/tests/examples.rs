//! Every example under `examples/` runs to completion.

#[path = "../examples/mult2.rs"]
mod mult2;

#[test]
fn mult2() {
    mult2::main();
}

#[path = "../examples/class_generators.rs"]
mod class_generators;

#[test]
fn class_generators() {
    class_generators::main();
}

#[path = "../examples/class_table.rs"]
mod class_table;

#[test]
fn class_table() {
    class_table::main();
}

#[path = "../examples/lowering.rs"]
mod lowering;

#[test]
fn lowering() {
    lowering::main();
}

#[path = "../examples/concrete_eval.rs"]
mod concrete_eval;

#[test]
fn concrete_eval() {
    concrete_eval::main();
}

#[path = "../examples/minimize.rs"]
mod minimize;

#[test]
fn minimize() {
    minimize::main();
}

#[path = "../examples/minrepeat.rs"]
mod minrepeat;

#[test]
fn minrepeat() {
    minrepeat::main();
}

#[path = "../examples/unsat.rs"]
mod unsat;

#[test]
fn unsat() {
    unsat::main();
}

#[path = "../examples/decode.rs"]
mod decode;

#[test]
fn decode() {
    decode::main();
}

#[path = "../examples/solution_file.rs"]
mod solution_file;

#[test]
fn solution_file() {
    solution_file::main();
}

#[path = "../examples/bitvector_sat.rs"]
mod bitvector_sat;

#[test]
fn bitvector_sat() {
    bitvector_sat::main();
}
