use std::time::Instant;

use indexmap::IndexMap;

use crate::lowering::IrProgram;
use crate::unknowns::Assignment;

use super::aig::{not, Aig, Bv, Cnf, Lit};
use super::interp::eval_all;
use super::symbolic::{encode_harness, Inputs};
use super::{EngineConfig, SolveError, Solution, Stats};

/// Repeat-count vectors with every count in `0..=max[i]`, ordered by total
/// and then lexicographically.
pub fn repeat_vectors(max: &[u32]) -> Vec<Vec<u32>> {
    let total: u32 = max.iter().sum();
    let mut out = Vec::new();
    for sum in 0..=total {
        let mut cur = Vec::with_capacity(max.len());
        fill(max, sum, &mut cur, &mut out);
    }
    out
}

fn fill(max: &[u32], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let i = cur.len();
    if i == max.len() {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let rest: u32 = max[i + 1..].iter().sum();
    for v in 0..=max[i].min(left) {
        if left - v > rest {
            continue;
        }
        cur.push(v);
        fill(max, left - v, cur, out);
        cur.pop();
    }
}

/// A model, its assignment and the objective values it achieves.
type Valid = (Vec<bool>, Assignment, IndexMap<String, i64>);

enum Outcome {
    Sat(Box<(Assignment, IndexMap<String, i64>)>),
    Unsat,
    Timeout,
    Error(String),
}

struct VectorSearch<'a> {
    prog: &'a IrProgram,
    cfg: &'a EngineConfig,
    start: Instant,
    aig: Aig,
    cnf: Cnf,
    inputs: Inputs,
    objectives: Vec<Bv>,
}

impl<'a> VectorSearch<'a> {
    fn timed_out(&self) -> bool {
        self.start.elapsed() >= self.cfg.timeout
    }

    fn assignment(&self, model: &[bool]) -> Assignment {
        let value = |bits: &[Lit]| -> u64 {
            bits.iter()
                .enumerate()
                .map(|(i, &l)| (model[self.aig.input_index(l).expect("input") as usize] as u64) << i)
                .sum()
        };
        Assignment {
            repeats: self.inputs.counts.clone(),
            holes: self.inputs.holes.iter().map(|h| h.iter().map(|b| value(b)).collect()).collect(),
            choices: self.inputs.choices.iter().map(|c| c.iter().map(|b| value(b) as u32).collect()).collect(),
        }
    }

    /// Next model that also passes concrete replay; failing models are
    /// blocked for good.
    fn solve_valid(&mut self, assumptions: &[Lit]) -> Result<Option<Valid>, Outcome> {
        loop {
            if self.timed_out() {
                return Err(Outcome::Timeout);
            }
            let Some(model) = self.cnf.solve(&self.aig, assumptions) else {
                return Ok(None);
            };
            let asg = self.assignment(&model);
            if let Some(values) = eval_all(self.prog, &asg, &self.cfg.limits) {
                return Ok(Some((model, asg, values)));
            }
            let block: Vec<Lit> = (0..self.aig.num_inputs() as u32)
                .map(|i| {
                    let l = self.aig.input_lit(i);
                    if model[i as usize] {
                        not(l)
                    } else {
                        l
                    }
                })
                .collect();
            if block.is_empty() {
                return Ok(None);
            }
            self.cnf.clause(&self.aig, &block);
        }
    }

    fn run(&mut self) -> Outcome {
        match self.run_inner() {
            Ok(o) | Err(o) => o,
        }
    }

    fn run_inner(&mut self) -> Result<Outcome, Outcome> {
        let Some((mut model, _, mut values)) = self.solve_valid(&[])? else {
            return Ok(Outcome::Unsat);
        };
        // objectives, lexicographically in declaration order
        for k in 0..self.objectives.len() {
            let name = self.prog.objectives[k].name.clone();
            loop {
                let v = values[&name];
                let c = self.aig.bv_const(v, self.objectives[k].width());
                let obj = self.objectives[k].clone();
                let lt = self.aig.bv_slt(&obj, &c);
                match self.solve_valid(&[lt])? {
                    Some((m, _, vals)) => {
                        if vals[&name] >= v {
                            return Err(Outcome::Error(format!("objective `{}` did not decrease", name)));
                        }
                        model = m;
                        values = vals;
                    }
                    None => {
                        let eq = self.aig.bv_eq(&obj, &c);
                        self.cnf.assert(&self.aig, eq);
                        break;
                    }
                }
            }
        }
        // smallest values: holes then choices, most significant bit first
        let order: Vec<Lit> = self
            .inputs
            .holes
            .iter()
            .chain(self.inputs.choices.iter())
            .flat_map(|u| u.iter().flat_map(|bits| bits.iter().rev().copied()))
            .collect();
        for l in order {
            let idx = self.aig.input_index(l).expect("input") as usize;
            if !model[idx] {
                self.cnf.assert(&self.aig, not(l));
                continue;
            }
            match self.solve_valid(&[not(l)])? {
                Some((m, _, vals)) => {
                    model = m;
                    values = vals;
                    self.cnf.assert(&self.aig, not(l));
                }
                None => self.cnf.assert(&self.aig, l),
            }
        }
        Ok(Outcome::Sat(Box::new((self.assignment(&model), values))))
    }
}

/// Searches one repeat vector; returns the outcome and the SAT calls made.
fn search_vector(prog: &IrProgram, cfg: &EngineConfig, counts: &[u32], start: Instant) -> (Outcome, u64) {
    let mut aig = Aig::new();
    let inputs = Inputs::allocate(&mut aig, prog, counts);
    let mut oks = Vec::new();
    let mut objectives = vec![None; prog.objectives.len()];
    for h in 0..prog.harnesses.len() {
        if start.elapsed() >= cfg.timeout {
            return (Outcome::Timeout, 0);
        }
        match encode_harness(&mut aig, prog, &inputs, h, &cfg.limits, cfg.max_leaves, cfg.node_cap) {
            Ok(enc) => {
                oks.push(enc.ok);
                for (k, bv) in prog.harnesses[h].objectives.iter().zip(enc.objectives) {
                    objectives[*k] = Some(bv);
                }
            }
            Err(e) => return (Outcome::Error(e), 0),
        }
    }
    let mut cnf = Cnf::new();
    for ok in oks {
        cnf.assert(&aig, ok);
    }
    for (c, info) in inputs.choices.iter().zip(&prog.registry.choices) {
        for bits in c {
            let w = bits.len() + 1;
            let idx = aig.bv_zext(bits, w);
            let arity = aig.bv_const(info.arity as i64, w);
            let lt = aig.bv_ult(&idx, &arity);
            cnf.assert(&aig, lt);
        }
    }
    let mut vs = VectorSearch {
        prog,
        cfg,
        start,
        aig,
        cnf,
        inputs,
        objectives: objectives.into_iter().map(|o| o.expect("objective encoded")).collect(),
    };
    let out = vs.run();
    (out, vs.cnf.queries())
}

/// Finds the first repeat vector with a solution, then minimizes objectives
/// and unknown values within it.
pub fn solve(prog: &IrProgram, cfg: &EngineConfig) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let max: Vec<u32> = prog.registry.repeats.iter().map(|r| r.max).collect();
    let vectors = repeat_vectors(&max);
    let jobs = cfg.jobs.max(1);
    let mut candidates = 0u64;
    let mut i = 0;
    while i < vectors.len() {
        // a batch never crosses a total boundary
        let sum: u32 = vectors[i].iter().sum();
        let mut end = i;
        while end < vectors.len() && end - i < jobs && vectors[end].iter().sum::<u32>() == sum {
            end += 1;
        }
        let batch = &vectors[i..end];
        let results: Vec<(Outcome, u64)> = if batch.len() == 1 {
            vec![search_vector(prog, cfg, &batch[0], start)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> =
                    batch.iter().map(|v| s.spawn(move || search_vector(prog, cfg, v, start))).collect();
                handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
            })
        };
        for (outcome, queries) in results {
            candidates += queries;
            match outcome {
                Outcome::Unsat => {}
                Outcome::Sat(found) => {
                    let (assignment, objective_values) = *found;
                    let depth = assignment.repeats.iter().sum();
                    let ms = if cfg.deterministic_time { 0 } else { start.elapsed().as_millis() as u64 };
                    return Ok(Solution { assignment, objective_values, stats: Stats { candidates, depth, ms } });
                }
                Outcome::Timeout => return Err(SolveError::Timeout { candidates }),
                Outcome::Error(e) => return Err(SolveError::Internal(e)),
            }
        }
        i = end;
    }
    Err(SolveError::Unsat { candidates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_by_total_then_lex() {
        let v = repeat_vectors(&[2, 1]);
        assert_eq!(v, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]]);
        assert_eq!(repeat_vectors(&[]), vec![Vec::<u32>::new()]);
    }
}
