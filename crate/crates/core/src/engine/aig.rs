//! And-inverter graph with structural hashing, two's-complement bit-vector
//! operations on top of it, and a Tseitin bridge to the SAT solver.
//!
//! A literal is `node * 2 + negated`; node 0 is the constant false, so
//! literal 0 is false and literal 1 is true.

use std::collections::HashMap;

use varisat::{ExtendFormula, Solver};

pub type Lit = u32;

pub const FALSE: Lit = 0;
pub const TRUE: Lit = 1;

#[inline]
pub fn not(l: Lit) -> Lit {
    l ^ 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    False,
    Input(u32),
    And(Lit, Lit),
}

#[derive(Clone, Debug, Default)]
pub struct Aig {
    nodes: Vec<Node>,
    strash: HashMap<(Lit, Lit), Lit>,
    inputs: Vec<Lit>,
}

/// Bit-vector, least significant bit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bv(pub Vec<Lit>);

impl Bv {
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn msb(&self) -> Lit {
        *self.0.last().expect("empty bit-vector")
    }

    /// Signed value when every bit is constant.
    pub fn as_const(&self) -> Option<i64> {
        let mut v: i64 = 0;
        for (i, &b) in self.0.iter().enumerate() {
            match b {
                TRUE => v |= 1 << i,
                FALSE => {}
                _ => return None,
            }
        }
        let w = self.0.len() as u32;
        Some(if w < 64 && self.msb() == TRUE { v - (1i64 << w) } else { v })
    }
}

impl Aig {
    pub fn new() -> Self {
        Aig { nodes: vec![Node::False], strash: HashMap::new(), inputs: Vec::new() }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// Fresh primary input; inputs are numbered from 0 in creation order.
    pub fn input(&mut self) -> Lit {
        let idx = self.inputs.len() as u32;
        self.nodes.push(Node::Input(idx));
        let lit = (self.nodes.len() as Lit - 1) * 2;
        self.inputs.push(lit);
        lit
    }

    pub fn input_lit(&self, index: u32) -> Lit {
        self.inputs[index as usize]
    }

    /// Input number of a positive input literal.
    pub fn input_index(&self, l: Lit) -> Option<u32> {
        match self.nodes[(l >> 1) as usize] {
            Node::Input(i) if l & 1 == 0 => Some(i),
            _ => None,
        }
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        if a == FALSE || b == FALSE || a == not(b) {
            return FALSE;
        }
        if a == TRUE || a == b {
            return b;
        }
        if b == TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&l) = self.strash.get(&key) {
            return l;
        }
        self.nodes.push(Node::And(key.0, key.1));
        let lit = (self.nodes.len() as Lit - 1) * 2;
        self.strash.insert(key, lit);
        lit
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        not(self.and(not(a), not(b)))
    }

    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let x = self.and(a, not(b));
        let y = self.and(not(a), b);
        self.or(x, y)
    }

    pub fn xnor(&mut self, a: Lit, b: Lit) -> Lit {
        not(self.xor(a, b))
    }

    pub fn implies(&mut self, a: Lit, b: Lit) -> Lit {
        self.or(not(a), b)
    }

    pub fn ite(&mut self, c: Lit, t: Lit, e: Lit) -> Lit {
        match c {
            TRUE => return t,
            FALSE => return e,
            _ => {}
        }
        if t == e {
            return t;
        }
        let x = self.and(c, t);
        let y = self.and(not(c), e);
        self.or(x, y)
    }

    pub fn and_all(&mut self, lits: impl IntoIterator<Item = Lit>) -> Lit {
        lits.into_iter().fold(TRUE, |acc, l| self.and(acc, l))
    }

    pub fn or_all(&mut self, lits: impl IntoIterator<Item = Lit>) -> Lit {
        lits.into_iter().fold(FALSE, |acc, l| self.or(acc, l))
    }

    /// Input numbers `l` depends on, ascending.
    pub fn support(&self, l: Lit) -> Vec<u32> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![(l >> 1) as usize];
        let mut out = Vec::new();
        while let Some(n) = stack.pop() {
            if seen[n] {
                continue;
            }
            seen[n] = true;
            match self.nodes[n] {
                Node::False => {}
                Node::Input(i) => out.push(i),
                Node::And(a, b) => {
                    stack.push((a >> 1) as usize);
                    stack.push((b >> 1) as usize);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Value of `l` under an input assignment.
    pub fn eval(&self, l: Lit, inputs: &[bool]) -> bool {
        let mut memo: HashMap<usize, bool> = HashMap::new();
        let mut stack = vec![(l >> 1) as usize];
        while let Some(&n) = stack.last() {
            if memo.contains_key(&n) {
                stack.pop();
                continue;
            }
            match self.nodes[n] {
                Node::False => {
                    memo.insert(n, false);
                    stack.pop();
                }
                Node::Input(i) => {
                    memo.insert(n, inputs[i as usize]);
                    stack.pop();
                }
                Node::And(a, b) => {
                    let (na, nb) = ((a >> 1) as usize, (b >> 1) as usize);
                    match (memo.get(&na), memo.get(&nb)) {
                        (Some(&va), Some(&vb)) => {
                            let v = (va ^ (a & 1 == 1)) && (vb ^ (b & 1 == 1));
                            memo.insert(n, v);
                            stack.pop();
                        }
                        (ma, mb) => {
                            if ma.is_none() {
                                stack.push(na);
                            }
                            if mb.is_none() {
                                stack.push(nb);
                            }
                        }
                    }
                }
            }
        }
        memo[&((l >> 1) as usize)] ^ (l & 1 == 1)
    }

    // ---- bit-vectors ----

    pub fn bv_const(&self, v: i64, width: usize) -> Bv {
        Bv((0..width).map(|i| if i < 64 && (v >> i) & 1 == 1 { TRUE } else { FALSE }).collect())
    }

    /// Zero-extends `bits` to `width`.
    pub fn bv_zext(&self, bits: &[Lit], width: usize) -> Bv {
        let mut v: Vec<Lit> = bits.iter().copied().take(width).collect();
        v.resize(width, FALSE);
        Bv(v)
    }

    pub fn bv_ite(&mut self, c: Lit, t: &Bv, e: &Bv) -> Bv {
        Bv(t.0.iter().zip(&e.0).map(|(&a, &b)| self.ite(c, a, b)).collect())
    }

    fn full_add(&mut self, a: Lit, b: Lit, c: Lit) -> (Lit, Lit) {
        let ab = self.xor(a, b);
        let sum = self.xor(ab, c);
        let x = self.and(a, b);
        let y = self.and(ab, c);
        (sum, self.or(x, y))
    }

    /// Sum and carry out.
    fn add_carry(&mut self, a: &Bv, b: &Bv, mut carry: Lit) -> (Bv, Lit) {
        let mut out = Vec::with_capacity(a.width());
        for (&x, &y) in a.0.iter().zip(&b.0) {
            let (s, c) = self.full_add(x, y, carry);
            out.push(s);
            carry = c;
        }
        (Bv(out), carry)
    }

    pub fn bv_add(&mut self, a: &Bv, b: &Bv) -> Bv {
        self.add_carry(a, b, FALSE).0
    }

    pub fn bv_not(&self, a: &Bv) -> Bv {
        Bv(a.0.iter().map(|&l| not(l)).collect())
    }

    pub fn bv_sub(&mut self, a: &Bv, b: &Bv) -> Bv {
        let nb = self.bv_not(b);
        self.add_carry(a, &nb, TRUE).0
    }

    pub fn bv_neg(&mut self, a: &Bv) -> Bv {
        let zero = self.bv_const(0, a.width());
        self.bv_sub(&zero, a)
    }

    /// Low `width` bits of the product (shift and add).
    pub fn bv_mul(&mut self, a: &Bv, b: &Bv) -> Bv {
        let w = a.width();
        let mut acc = self.bv_const(0, w);
        for i in 0..w {
            let bit = b.0[i];
            if bit == FALSE {
                continue;
            }
            let mut shifted = vec![FALSE; i];
            shifted.extend(a.0.iter().take(w - i).map(|&l| self.and(l, bit)));
            acc = self.bv_add(&acc, &Bv(shifted));
        }
        acc
    }

    pub fn bv_eq(&mut self, a: &Bv, b: &Bv) -> Lit {
        let bits: Vec<Lit> = a.0.iter().zip(&b.0).map(|(&x, &y)| self.xnor(x, y)).collect();
        self.and_all(bits)
    }

    pub fn bv_ult(&mut self, a: &Bv, b: &Bv) -> Lit {
        let mut lt = FALSE;
        for (&x, &y) in a.0.iter().zip(&b.0) {
            let here = self.and(not(x), y);
            let same = self.xnor(x, y);
            let keep = self.and(same, lt);
            lt = self.or(here, keep);
        }
        lt
    }

    pub fn bv_slt(&mut self, a: &Bv, b: &Bv) -> Lit {
        let mut a2 = a.clone();
        let mut b2 = b.clone();
        let last = a.width() - 1;
        a2.0[last] = not(a.0[last]);
        b2.0[last] = not(b.0[last]);
        self.bv_ult(&a2, &b2)
    }

    pub fn bv_sle(&mut self, a: &Bv, b: &Bv) -> Lit {
        not(self.bv_slt(b, a))
    }

    fn bv_abs(&mut self, a: &Bv) -> Bv {
        let n = self.bv_neg(a);
        self.bv_ite(a.msb(), &n, a)
    }

    /// Unsigned quotient and remainder by restoring division. A zero
    /// divisor yields an all-ones quotient; callers guard against it.
    fn bv_udivrem(&mut self, a: &Bv, b: &Bv) -> (Bv, Bv) {
        let w = a.width();
        let bx = self.bv_zext(&b.0, w + 1);
        let mut r = self.bv_const(0, w + 1);
        let mut q = vec![FALSE; w];
        for i in (0..w).rev() {
            let mut shifted = vec![a.0[i]];
            shifted.extend_from_slice(&r.0[..w]);
            let shifted = Bv(shifted);
            let ge = not(self.bv_ult(&shifted, &bx));
            let diff = self.bv_sub(&shifted, &bx);
            r = self.bv_ite(ge, &diff, &shifted);
            q[i] = ge;
        }
        (Bv(q), Bv(r.0[..w].to_vec()))
    }

    /// Truncating signed division and remainder (Java semantics).
    pub fn bv_sdivrem(&mut self, a: &Bv, b: &Bv) -> (Bv, Bv) {
        let (ua, ub) = (self.bv_abs(a), self.bv_abs(b));
        let (q, r) = self.bv_udivrem(&ua, &ub);
        let qs = self.xor(a.msb(), b.msb());
        let nq = self.bv_neg(&q);
        let nr = self.bv_neg(&r);
        (self.bv_ite(qs, &nq, &q), self.bv_ite(a.msb(), &nr, &r))
    }
}

/// Incremental Tseitin encoding of AIG cones into a SAT solver.
pub struct Cnf {
    pub solver: Solver<'static>,
    vars: HashMap<u32, varisat::Var>,
    queries: u64,
}

impl Default for Cnf {
    fn default() -> Self {
        Self::new()
    }
}

impl Cnf {
    pub fn new() -> Self {
        Cnf { solver: Solver::new(), vars: HashMap::new(), queries: 0 }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Solver literal for an AIG literal, encoding its cone on first use.
    pub fn lit(&mut self, aig: &Aig, l: Lit) -> varisat::Lit {
        let root = l >> 1;
        if !self.vars.contains_key(&root) {
            let mut stack = vec![root];
            while let Some(&n) = stack.last() {
                if self.vars.contains_key(&n) {
                    stack.pop();
                    continue;
                }
                match aig.nodes[n as usize] {
                    Node::False => {
                        let v = self.solver.new_var();
                        self.solver.add_clause(&[v.negative()]);
                        self.vars.insert(n, v);
                        stack.pop();
                    }
                    Node::Input(_) => {
                        let v = self.solver.new_var();
                        self.vars.insert(n, v);
                        stack.pop();
                    }
                    Node::And(a, b) => {
                        let (na, nb) = (a >> 1, b >> 1);
                        let pending: Vec<u32> = [na, nb].into_iter().filter(|x| !self.vars.contains_key(x)).collect();
                        if !pending.is_empty() {
                            stack.extend(pending);
                            continue;
                        }
                        let v = self.solver.new_var();
                        let la = self.sat_lit(a);
                        let lb = self.sat_lit(b);
                        let o = v.positive();
                        self.solver.add_clause(&[!o, la]);
                        self.solver.add_clause(&[!o, lb]);
                        self.solver.add_clause(&[o, !la, !lb]);
                        self.vars.insert(n, v);
                        stack.pop();
                    }
                }
            }
        }
        self.sat_lit(l)
    }

    fn sat_lit(&self, l: Lit) -> varisat::Lit {
        let v = self.vars[&(l >> 1)];
        varisat::Lit::from_var(v, l & 1 == 0)
    }

    pub fn assert(&mut self, aig: &Aig, l: Lit) {
        let s = self.lit(aig, l);
        self.solver.add_clause(&[s]);
    }

    /// Adds a clause over AIG literals.
    pub fn clause(&mut self, aig: &Aig, lits: &[Lit]) {
        let c: Vec<varisat::Lit> = lits.iter().map(|&l| self.lit(aig, l)).collect();
        self.solver.add_clause(&c);
    }

    /// Solves under assumptions; returns the input values on SAT.
    pub fn solve(&mut self, aig: &Aig, assumptions: &[Lit]) -> Option<Vec<bool>> {
        let a: Vec<varisat::Lit> = assumptions.iter().map(|&l| self.lit(aig, l)).collect();
        // every input gets a variable so the model covers it
        for i in 0..aig.num_inputs() {
            self.lit(aig, aig.input_lit(i as u32));
        }
        self.solver.assume(&a);
        self.queries += 1;
        let sat = self.solver.solve().expect("SAT solver failure");
        if !sat {
            return None;
        }
        let model = self.solver.model().expect("model after SAT");
        let mut val = HashMap::with_capacity(model.len());
        for l in model {
            val.insert(l.var(), l.is_positive());
        }
        Some(
            (0..aig.num_inputs())
                .map(|i| {
                    let v = self.vars[&(aig.input_lit(i as u32) >> 1)];
                    val.get(&v).copied().unwrap_or(false)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inputs_for(aig: &mut Aig, w: usize) -> Bv {
        Bv((0..w).map(|_| aig.input()).collect())
    }

    fn assign(v: i64, w: usize) -> Vec<bool> {
        (0..w).map(|i| (v >> i) & 1 == 1).collect()
    }

    fn eval_bv(aig: &Aig, bv: &Bv, inputs: &[bool]) -> i64 {
        let w = bv.width();
        let mut v: i64 = 0;
        for (i, &l) in bv.0.iter().enumerate() {
            if aig.eval(l, inputs) {
                v |= 1 << i;
            }
        }
        if (v >> (w - 1)) & 1 == 1 {
            v - (1 << w)
        } else {
            v
        }
    }

    #[test]
    fn constant_folding() {
        let mut aig = Aig::new();
        let x = aig.input();
        assert_eq!(aig.and(x, FALSE), FALSE);
        assert_eq!(aig.and(x, TRUE), x);
        assert_eq!(aig.and(x, not(x)), FALSE);
        let a = aig.and(x, x);
        assert_eq!(a, x);
        let c = aig.bv_const(-3, 8);
        assert_eq!(c.as_const(), Some(-3));
        let d = aig.bv_const(5, 8);
        let s = aig.bv_mul(&c, &d);
        assert_eq!(s.as_const(), Some(-15));
    }

    proptest! {
        #[test]
        fn bitvector_ops_match_wrapping_i8(a in any::<i8>(), b in any::<i8>()) {
            let mut aig = Aig::new();
            let x = inputs_for(&mut aig, 8);
            let y = inputs_for(&mut aig, 8);
            let mut ins = assign(a as i64, 8);
            ins.extend(assign(b as i64, 8));
            let sum = aig.bv_add(&x, &y);
            let diff = aig.bv_sub(&x, &y);
            let prod = aig.bv_mul(&x, &y);
            let lt = aig.bv_slt(&x, &y);
            let eq = aig.bv_eq(&x, &y);
            prop_assert_eq!(eval_bv(&aig, &sum, &ins), a.wrapping_add(b) as i64);
            prop_assert_eq!(eval_bv(&aig, &diff, &ins), a.wrapping_sub(b) as i64);
            prop_assert_eq!(eval_bv(&aig, &prod, &ins), a.wrapping_mul(b) as i64);
            prop_assert_eq!(aig.eval(lt, &ins), a < b);
            prop_assert_eq!(aig.eval(eq, &ins), a == b);
            if b != 0 {
                let (q, r) = aig.bv_sdivrem(&x, &y);
                prop_assert_eq!(eval_bv(&aig, &q, &ins), a.wrapping_div(b) as i64);
                prop_assert_eq!(eval_bv(&aig, &r, &ins), a.wrapping_rem(b) as i64);
            }
        }
    }

    #[test]
    fn sat_finds_factor() {
        let mut aig = Aig::new();
        let x = inputs_for(&mut aig, 6);
        let three = aig.bv_const(3, 6);
        let target = aig.bv_const(21, 6);
        let p = aig.bv_mul(&x, &three);
        let eq = aig.bv_eq(&p, &target);
        let mut cnf = Cnf::new();
        cnf.assert(&aig, eq);
        let model = cnf.solve(&aig, &[]).unwrap();
        let v: i64 = model.iter().enumerate().map(|(i, b)| (*b as i64) << i).sum();
        assert_eq!((v * 3) & 63, 21);
        let seven = aig.bv_const(7, 6);
        let ne = not(aig.bv_eq(&x, &seven));
        assert!(cnf.solve(&aig, &[ne, not(x.0[5])]).is_none());
    }
}
