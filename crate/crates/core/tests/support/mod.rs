//! Shared helpers for the integration tests. Oracles here are independent of
//! the crate's interpreter and solver.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;

use oosketch::decode::mark_harnesses;
use oosketch::engine::{eval_all, EngineConfig, Limits};
use oosketch::frontend::parse_sources;
use oosketch::pipeline::{compile, synthesize_sources, StageLog, Synthesis};
use oosketch::unknowns::Assignment;
use oosketch::{Error, Options};
use oosketch::desugar::UnknownBounds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

pub fn sketch_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("sketches")
}

/// `dir/file` pairs relative to the sketch directory, read into memory.
pub fn load(paths: &[&str]) -> Vec<(String, String)> {
    paths
        .iter()
        .map(|p| {
            let path = sketch_dir().join(p);
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&path).unwrap())
        })
        .collect()
}

pub const MULT2: &[&str] = &["mult2/SimpleMath.java", "mult2/Test.java"];
pub const DB: &[&str] = &["automata/Automaton.java", "automata/DBConnection.java", "automata/TestDBConnection.java"];
pub const DB_TWO_STATES: &[&str] =
    &["automata_two_states/Automaton.java", "automata/DBConnection.java", "automata/TestDBConnection.java"];
pub const CADSR: &[&str] = &["automata/Automaton.java", "automata/CADsR.java", "automata/TestCADsR.java"];
pub const CADSR_SHORT: &[&str] = &["automata/Automaton.java", "automata/CADsR.java", "cadsr_short/TestCADsR.java"];
pub const CADSR_NO_MINIMIZE: &[&str] =
    &["automaton_no_minimize/Automaton.java", "automata/CADsR.java", "automata/TestCADsR.java"];

pub fn options() -> Options {
    Options { engine: EngineConfig { deterministic_time: true, ..EngineConfig::default() }, ..Options::default() }
}

pub fn synth(paths: &[&str], opts: &Options) -> Result<Synthesis, Error> {
    synthesize_sources(&load(paths), opts, &mut StageLog::default())
}

/// Tokens that must not survive decoding.
pub fn sketch_tokens(text: &str) -> Vec<&'static str> {
    ["??", "{|", "|}", "minrepeat"].into_iter().filter(|t| text.contains(t)).collect()
}

/// Reparses the emitted sources, restores the harness markers and runs
/// every harness concretely.
pub fn reparse_and_run(syn: &Synthesis) -> Result<(), String> {
    let files: Vec<(String, String)> = syn.files.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut ast = parse_sources(&files).map_err(|e| e.to_string())?;
    let harnesses: Vec<(String, String)> =
        syn.compiled.ir.harnesses.iter().map(|h| (h.class.clone(), h.method.clone())).collect();
    mark_harnesses(&mut ast, &harnesses);
    let compiled = compile(&ast, Default::default(), &mut StageLog::default()).map_err(|e| e.to_string())?;
    if !compiled.registry.is_empty() {
        return Err("unknowns left in output".into());
    }
    if compiled.ir.harnesses.len() != harnesses.len() {
        return Err("harnesses lost in output".into());
    }
    let empty = Assignment { repeats: vec![], holes: vec![], choices: vec![] };
    eval_all(&compiled.ir, &empty, &Limits::default()).map(|_| ()).ok_or_else(|| "a harness fails".into())
}

/// The automaton encoded by a decoded generator class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub init: i64,
    pub num_state: i64,
    /// `(state, id, next)` in source order; the first match wins.
    pub rules: Vec<(i64, i64, i64)>,
    pub accept_le: i64,
}

impl Dfa {
    /// Reads the automaton back out of emitted Java text.
    pub fn from_source(text: &str) -> Dfa {
        let num = |re: &str| -> i64 {
            Regex::new(re).unwrap().captures(text).unwrap_or_else(|| panic!("no match for {re}"))[1].parse().unwrap()
        };
        let rule = Regex::new(r"if \(state == (\d+) && id == (\d+)\) \{\s*state = (\d+);").unwrap();
        Dfa {
            init: num(r"int state = (\d+);"),
            num_state: num(r"static int num_state = (\d+);"),
            rules: rule
                .captures_iter(text)
                .map(|c| (c[1].parse().unwrap(), c[2].parse().unwrap(), c[3].parse().unwrap()))
                .collect(),
            accept_le: num(r"return state <= (\d+);"),
        }
    }

    /// One transition; `None` when the range assertion fails.
    pub fn step(&self, state: i64, id: i64) -> Option<i64> {
        if !(0 <= state && state < self.num_state) {
            return None;
        }
        Some(self.rules.iter().find(|r| r.0 == state && r.1 == id).map_or(state, |r| r.2))
    }

    /// Runs a word; `None` when an assertion fails on the way.
    pub fn run(&self, word: &[i64]) -> Option<i64> {
        word.iter().try_fold(self.init, |s, &id| self.step(s, id))
    }

    pub fn accepts(&self, word: &[i64]) -> bool {
        self.run(word).is_some_and(|s| s <= self.accept_le)
    }

    pub fn states_used(&self) -> usize {
        let mut s: HashSet<i64> = HashSet::from([self.init]);
        for r in &self.rules {
            s.insert(r.0);
            s.insert(r.2);
        }
        s.len()
    }
}

/// The hand-written connection monitor: 0 closed, 1 open, 2 error (sink).
/// Tokens: 1 open, 2 close.
pub fn reference_monitor(state: u8, id: i64) -> u8 {
    match (state, id) {
        (0, 1) => 1,
        (1, 2) => 0,
        _ => 2,
    }
}

/// Product construction over alphabet {1, 2}: true iff no reachable pair
/// disagrees on "erroneous". A failed range assertion counts as erroneous.
pub fn monitor_equivalent(dfa: &Dfa) -> bool {
    let erroneous_synth = |s: Option<i64>| s.is_none_or(|s| s > dfa.accept_le);
    let start = (Some(dfa.init), 0u8);
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((s, r)) = queue.pop_front() {
        if erroneous_synth(s) != (r == 2) {
            return false;
        }
        for id in [1, 2] {
            let next = (s.and_then(|s| dfa.step(s, id)), reference_monitor(r, id));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    true
}

/// Every string over {c, a, d, r} of length 1..=6.
pub fn cadsr_words() -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..6 {
        layer = layer.iter().flat_map(|w| "cadr".chars().map(move |c| format!("{w}{c}"))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Words where the automaton and `c(a|d)+r` disagree.
pub fn cadsr_mismatches(dfa: &Dfa) -> Vec<String> {
    let re = Regex::new(r"^c(a|d)+r$").unwrap();
    cadsr_words()
        .into_iter()
        .filter(|w| {
            let ids: Vec<i64> = w.chars().map(|c| c as i64).collect();
            dfa.accepts(&ids) != re.is_match(w)
        })
        .collect()
}

// ---- random tiny sketches ----

#[derive(Clone, Debug)]
pub enum E {
    Lit(i32),
    Var(usize),
    Add(Box<E>, Box<E>),
    Sub(Box<E>, Box<E>),
    Mul(Box<E>, Box<E>),
}

#[derive(Clone, Debug)]
pub enum C {
    Lt(E, E),
    Le(E, E),
    Eq(E, E),
    Ne(E, E),
    And(Box<C>, Box<C>),
    Or(Box<C>, Box<C>),
    Not(Box<C>),
}

const VARS: [&str; 4] = ["a", "b", "c", "k"];

impl E {
    fn java(&self) -> String {
        match self {
            E::Lit(v) => v.to_string(),
            E::Var(i) => VARS[*i].to_string(),
            E::Add(a, b) => format!("({} + {})", a.java(), b.java()),
            E::Sub(a, b) => format!("({} - {})", a.java(), b.java()),
            E::Mul(a, b) => format!("({} * {})", a.java(), b.java()),
        }
    }

    fn eval(&self, env: &[i32]) -> i32 {
        match self {
            E::Lit(v) => *v,
            E::Var(i) => env[*i],
            E::Add(a, b) => a.eval(env).wrapping_add(b.eval(env)),
            E::Sub(a, b) => a.eval(env).wrapping_sub(b.eval(env)),
            E::Mul(a, b) => a.eval(env).wrapping_mul(b.eval(env)),
        }
    }

    fn max_lit(&self) -> i32 {
        match self {
            E::Lit(v) => *v,
            E::Var(_) => 0,
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) => a.max_lit().max(b.max_lit()),
        }
    }
}

impl C {
    fn java(&self) -> String {
        match self {
            C::Lt(a, b) => format!("{} < {}", a.java(), b.java()),
            C::Le(a, b) => format!("{} <= {}", a.java(), b.java()),
            C::Eq(a, b) => format!("{} == {}", a.java(), b.java()),
            C::Ne(a, b) => format!("{} != {}", a.java(), b.java()),
            C::And(a, b) => format!("({}) && ({})", a.java(), b.java()),
            C::Or(a, b) => format!("({}) || ({})", a.java(), b.java()),
            C::Not(a) => format!("!({})", a.java()),
        }
    }

    fn eval(&self, env: &[i32]) -> bool {
        match self {
            C::Lt(a, b) => a.eval(env) < b.eval(env),
            C::Le(a, b) => a.eval(env) <= b.eval(env),
            C::Eq(a, b) => a.eval(env) == b.eval(env),
            C::Ne(a, b) => a.eval(env) != b.eval(env),
            C::And(a, b) => a.eval(env) && b.eval(env),
            C::Or(a, b) => a.eval(env) || b.eval(env),
            C::Not(a) => !a.eval(env),
        }
    }

    fn max_lit(&self) -> i32 {
        match self {
            C::Lt(a, b) | C::Le(a, b) | C::Eq(a, b) | C::Ne(a, b) => a.max_lit().max(b.max_lit()),
            C::And(a, b) | C::Or(a, b) => a.max_lit().max(b.max_lit()),
            C::Not(a) => a.max_lit(),
        }
    }
}

/// A sketch with up to three holes, an optional choice, assertions and an
/// optional objective, all inside one harness.
#[derive(Clone, Debug)]
pub struct Tiny {
    pub holes: usize,
    pub hole_bits: u32,
    pub choice: Vec<E>,
    pub asserts: Vec<C>,
    pub objective: Option<E>,
}

fn gen_e<R: Rng>(rng: &mut R, vars: usize, depth: u32) -> E {
    if depth == 0 || rng.gen_bool(0.4) {
        return if vars > 0 && rng.gen_bool(0.6) { E::Var(rng.gen_range(0..vars)) } else { E::Lit(rng.gen_range(0..=5)) };
    }
    let a = Box::new(gen_e(rng, vars, depth - 1));
    let b = Box::new(gen_e(rng, vars, depth - 1));
    match rng.gen_range(0..3) {
        0 => E::Add(a, b),
        1 => E::Sub(a, b),
        _ => E::Mul(a, b),
    }
}

fn gen_c<R: Rng>(rng: &mut R, vars: usize, depth: u32) -> C {
    if depth == 0 || rng.gen_bool(0.6) {
        let a = gen_e(rng, vars, 2);
        let b = gen_e(rng, vars, 2);
        return match rng.gen_range(0..4) {
            0 => C::Lt(a, b),
            1 => C::Le(a, b),
            2 => C::Eq(a, b),
            _ => C::Ne(a, b),
        };
    }
    match rng.gen_range(0..3) {
        0 => C::And(Box::new(gen_c(rng, vars, depth - 1)), Box::new(gen_c(rng, vars, depth - 1))),
        1 => C::Or(Box::new(gen_c(rng, vars, depth - 1)), Box::new(gen_c(rng, vars, depth - 1))),
        _ => C::Not(Box::new(gen_c(rng, vars, depth - 1))),
    }
}

impl Tiny {
    pub fn generate<R: Rng>(rng: &mut R) -> Tiny {
        let holes = rng.gen_range(1..=3);
        let hole_bits = rng.gen_range(1..=3);
        let arity = if rng.gen_bool(0.6) { rng.gen_range(1..=3) } else { 0 };
        let choice: Vec<E> = (0..arity).map(|_| gen_e(rng, holes, 1)).collect();
        let vars = if arity > 0 { 4 } else { holes };
        // `k` is index 3; without a choice only the holes are in scope
        let pick = |rng: &mut R| {
            let e = gen_e(rng, vars.min(holes), 2);
            if arity > 0 && rng.gen_bool(0.5) {
                E::Add(Box::new(e), Box::new(E::Var(3)))
            } else {
                e
            }
        };
        let n = rng.gen_range(1..=3);
        let asserts = (0..n)
            .map(|_| {
                let c = gen_c(rng, holes, 2);
                if arity > 0 && rng.gen_bool(0.5) {
                    C::And(Box::new(c), Box::new(C::Le(E::Var(3), pick(rng))))
                } else {
                    c
                }
            })
            .collect();
        let objective = rng.gen_bool(0.5).then(|| pick(rng));
        Tiny { holes, hole_bits, choice, asserts, objective }
    }

    pub fn java(&self) -> String {
        let mut body = String::new();
        for v in VARS.iter().take(self.holes) {
            body.push_str(&format!("        int {} = ??;\n", v));
        }
        if !self.choice.is_empty() {
            let alts: Vec<String> = self.choice.iter().map(E::java).collect();
            body.push_str(&format!("        int k = {{| {} |}};\n", alts.join(", ")));
        }
        for a in &self.asserts {
            body.push_str(&format!("        assert {};\n", a.java()));
        }
        if let Some(o) = &self.objective {
            body.push_str(&format!("        minimize({});\n", o.java()));
        }
        format!("class T {{\n    harness static void h() {{\n{body}    }}\n}}\n")
    }

    /// Effective hole width: the configured bits, widened to fit literals.
    pub fn width(&self) -> u32 {
        let lit = self
            .asserts
            .iter()
            .map(C::max_lit)
            .chain(self.choice.iter().map(E::max_lit))
            .chain(self.objective.iter().map(E::max_lit))
            .max()
            .unwrap_or(0);
        self.hole_bits.max(32 - (lit as u32).leading_zeros())
    }

    /// Runs the harness on concrete values; `Some(objective)` when it passes.
    pub fn run(&self, holes: &[i32], choice: usize) -> Option<i32> {
        let mut env = [0i32; 4];
        env[..self.holes].copy_from_slice(holes);
        if !self.choice.is_empty() {
            env[3] = self.choice[choice].eval(&env);
        }
        self.asserts.iter().all(|a| a.eval(&env)).then(|| self.objective.as_ref().map_or(0, |o| o.eval(&env)))
    }

    /// Exhaustive search: `None` if unsatisfiable, else the least objective.
    pub fn brute_force(&self) -> Option<i32> {
        let max = 1i32 << self.width();
        let arity = self.choice.len().max(1);
        let mut best: Option<i32> = None;
        let mut holes = vec![0i32; self.holes];
        loop {
            for k in 0..arity {
                if let Some(v) = self.run(&holes, k) {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
            let mut i = 0;
            while i < holes.len() {
                holes[i] += 1;
                if holes[i] < max {
                    break;
                }
                holes[i] = 0;
                i += 1;
            }
            if i == holes.len() {
                return best;
            }
        }
    }
}

/// Exit code and stderr of the command-line tool.
pub fn run_cli(args: &[&str]) -> (i32, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_oosketch")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

pub fn sketch_path(p: &str) -> String {
    sketch_dir().join(p).to_string_lossy().into_owned()
}

pub const SKETCHES: usize = 240;

/// Mismatch descriptions; empty when every verdict agrees.
pub fn oracle_mismatches(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for n in 0..count {
        let t = Tiny::generate(&mut rng);
        let src = t.java();
        let opts = Options { bounds: UnknownBounds { hole_bits: t.hole_bits, unroll_max: 0 }, ..options() };
        let got = synthesize_sources(&[("T.java", src.as_str())], &opts, &mut StageLog::default());
        let want = t.brute_force();
        let ok = match (&got, want) {
            (Err(Error::Unsat { .. }), None) => true,
            (Ok(syn), Some(min)) => {
                let a = &syn.solution.assignment;
                let holes: Vec<i32> = a.holes.iter().map(|v| v[0] as i32).collect();
                let k = a.choices.first().map_or(0, |c| c[0] as usize);
                let replay = t.run(&holes, k);
                let obj = syn.solution.objective_values.values().next().copied();
                replay.is_some() && (t.objective.is_none() || obj == Some(min as i64))
            }
            _ => false,
        };
        if !ok {
            let verdict = got.map(|s| s.solution_text).map_err(|e| e.to_string());
            bad.push(format!("sketch {n}: oracle {want:?}, solver {verdict:?}\n{src}"));
        }
    }
    bad
}
