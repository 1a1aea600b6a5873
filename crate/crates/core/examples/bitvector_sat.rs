//! The engine's circuit layer on its own: find a nontrivial factor pair of
//! 35 with 6-bit multiplication.

use oosketch::engine::aig::{Aig, Bv, Cnf};

pub fn main() {
    let mut g = Aig::new();
    let a = Bv((0..6).map(|_| g.input()).collect());
    let b = Bv((0..6).map(|_| g.input()).collect());
    let (a12, b12) = (g.bv_zext(&a.0, 12), g.bv_zext(&b.0, 12));
    let prod = g.bv_mul(&a12, &b12);
    let target = g.bv_const(35, 12);
    let one = g.bv_const(1, 6);
    let eq = g.bv_eq(&prod, &target);
    let a_gt1 = g.bv_ult(&one, &a);
    let b_gt1 = g.bv_ult(&one, &b);
    let goal = g.and_all([eq, a_gt1, b_gt1]);
    let mut cnf = Cnf::new();
    cnf.assert(&g, goal);
    let model = cnf.solve(&g, &[]).expect("35 = 5 * 7");
    let value = |v: &Bv| v.0.iter().enumerate().map(|(i, &l)| (model[g.input_index(l).unwrap() as usize] as u64) << i).sum::<u64>();
    let (x, y) = (value(&a), value(&b));
    println!("{x} * {y} = 35");
    assert_eq!(x * y, 35);
}
