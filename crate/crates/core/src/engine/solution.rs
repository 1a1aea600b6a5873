use std::fmt::Write as _;

use indexmap::IndexMap;

use crate::unknowns::{instance_name, Assignment, UnknownRegistry};

use super::{Solution, Stats};

/// `solution.txt`: holes, choices, repeats, objectives, then stats.
pub fn format_solution(sol: &Solution, reg: &UnknownRegistry) -> String {
    let a = &sol.assignment;
    let mut s = String::new();
    for (h, vals) in reg.holes.iter().zip(&a.holes) {
        for (iter, v) in Assignment::iterations(h.repeat, vals.len()).into_iter().zip(vals) {
            let _ = writeln!(s, "hole {} = {}", instance_name(&h.id.name, iter), v);
        }
    }
    for (c, vals) in reg.choices.iter().zip(&a.choices) {
        for (iter, v) in Assignment::iterations(c.repeat, vals.len()).into_iter().zip(vals) {
            let _ = writeln!(s, "choice {} = {}", instance_name(&c.id.name, iter), v);
        }
    }
    for (r, n) in reg.repeats.iter().zip(&a.repeats) {
        let _ = writeln!(s, "repeat {} = {}", r.id.name, n);
    }
    for (name, v) in &sol.objective_values {
        let _ = writeln!(s, "objective {} = {}", name, v);
    }
    let _ = writeln!(s, "stats candidates={} depth={} ms={}", sol.stats.candidates, sol.stats.depth, sol.stats.ms);
    s
}

/// The records of a solution file, keyed by instance name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedSolution {
    pub holes: IndexMap<String, u64>,
    pub choices: IndexMap<String, u32>,
    pub repeats: IndexMap<String, u32>,
    pub objectives: IndexMap<String, i64>,
    pub stats: Option<Stats>,
}

impl ParsedSolution {
    /// Rebuilds the assignment; `None` when a value is missing.
    pub fn assignment(&self, reg: &UnknownRegistry) -> Option<Assignment> {
        let repeats: Vec<u32> = reg.repeats.iter().map(|r| self.repeats.get(&r.id.name).copied()).collect::<Option<_>>()?;
        let count = |r: Option<usize>| r.map_or(1, |r| repeats[r] as usize);
        let iters = |r: Option<usize>| Assignment::iterations(r, count(r));
        let holes = reg
            .holes
            .iter()
            .map(|h| iters(h.repeat).into_iter().map(|i| self.holes.get(&instance_name(&h.id.name, i)).copied()).collect())
            .collect::<Option<_>>()?;
        let choices = reg
            .choices
            .iter()
            .map(|c| iters(c.repeat).into_iter().map(|i| self.choices.get(&instance_name(&c.id.name, i)).copied()).collect())
            .collect::<Option<_>>()?;
        Some(Assignment { repeats, holes, choices })
    }
}

pub fn parse_solution(text: &str) -> Result<ParsedSolution, String> {
    let mut p = ParsedSolution::default();
    for (n, line) in text.lines().enumerate() {
        let bad = || format!("line {}: malformed record `{}`", n + 1, line);
        if let Some(rest) = line.strip_prefix("stats ") {
            let mut st = Stats { candidates: 0, depth: 0, ms: 0 };
            for kv in rest.split_whitespace() {
                let (k, v) = kv.split_once('=').ok_or_else(bad)?;
                match k {
                    "candidates" => st.candidates = v.parse().map_err(|_| bad())?,
                    "depth" => st.depth = v.parse().map_err(|_| bad())?,
                    "ms" => st.ms = v.parse().map_err(|_| bad())?,
                    _ => return Err(bad()),
                }
            }
            p.stats = Some(st);
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(kind), Some(name), Some("="), Some(value), None) =
            (parts.next(), parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let name = name.to_string();
        match kind {
            "hole" => {
                p.holes.insert(name, value.parse().map_err(|_| bad())?);
            }
            "choice" => {
                p.choices.insert(name, value.parse().map_err(|_| bad())?);
            }
            "repeat" => {
                p.repeats.insert(name, value.parse().map_err(|_| bad())?);
            }
            "objective" => {
                p.objectives.insert(name, value.parse().map_err(|_| bad())?);
            }
            _ => return Err(bad()),
        }
    }
    Ok(p)
}
