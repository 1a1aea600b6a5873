//! Unknowns of a sketch and assignments to them.
//!
//! Holes and choices that sit inside a `minrepeat` body are templates: each
//! unrolled copy of the body gets its own instance, numbered from 1.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnknownKind {
    Hole,
    Choice,
    Repeat,
}

impl UnknownKind {
    pub fn prefix(self) -> &'static str {
        match self {
            UnknownKind::Hole => "e_h",
            UnknownKind::Choice => "e_c",
            UnknownKind::Repeat => "e_r",
        }
    }
}

/// Stable identity of one unknown. `ordinal` is dense per kind, from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnknownId {
    pub kind: UnknownKind,
    pub ordinal: u32,
    pub name: String,
    /// Flattened name of the class the unknown was written in.
    pub owner: String,
}

impl UnknownId {
    pub fn new(kind: UnknownKind, ordinal: u32, owner: impl Into<String>) -> Self {
        UnknownId { kind, ordinal, name: format!("{}{}", kind.prefix(), ordinal), owner: owner.into() }
    }

    /// Position in the registry list of its kind.
    pub fn index(&self) -> usize {
        self.ordinal as usize - 1
    }
}

impl fmt::Display for UnknownId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Name of the `iter`-th instance of a template unknown.
pub fn instance_name(base: &str, iter: Option<u32>) -> String {
    match iter {
        Some(i) => format!("{}_{}", base, i),
        None => base.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleInfo {
    pub id: UnknownId,
    pub bits: u32,
    /// Set during lowering when the hole sits in a boolean position.
    pub is_bool: bool,
    /// Index of the enclosing `minrepeat` in `UnknownRegistry::repeats`.
    pub repeat: Option<usize>,
}

impl HoleInfo {
    pub fn max_value(&self) -> u64 {
        (1u64 << self.bits) - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceInfo {
    pub id: UnknownId,
    pub arity: u32,
    pub repeat: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepeatInfo {
    pub id: UnknownId,
    pub max: u32,
}

/// The search space: every unknown with its bounds.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UnknownRegistry {
    pub holes: Vec<HoleInfo>,
    pub choices: Vec<ChoiceInfo>,
    pub repeats: Vec<RepeatInfo>,
}

impl UnknownRegistry {
    pub fn is_empty(&self) -> bool {
        self.holes.is_empty() && self.choices.is_empty() && self.repeats.is_empty()
    }

    pub fn len(&self) -> usize {
        self.holes.len() + self.choices.len() + self.repeats.len()
    }

    fn instances(repeat: Option<usize>, counts: &[u32]) -> u32 {
        match repeat {
            Some(r) => counts[r],
            None => 1,
        }
    }

    /// log2 of the number of hole/choice assignments once repeats are fixed
    /// to `counts`.
    pub fn log2_space(&self, counts: &[u32]) -> f64 {
        let holes: f64 = self
            .holes
            .iter()
            .map(|h| h.bits as f64 * Self::instances(h.repeat, counts) as f64)
            .sum();
        let choices: f64 = self
            .choices
            .iter()
            .map(|c| (c.arity as f64).log2() * Self::instances(c.repeat, counts) as f64)
            .sum();
        holes + choices
    }

    /// Total size of the space including every repeat count, as log2.
    pub fn log2_total_space(&self) -> f64 {
        // upper bound: every repeat at its maximum
        let counts: Vec<u32> = self.repeats.iter().map(|r| r.max).collect();
        let repeats: f64 = self.repeats.iter().map(|r| ((r.max + 1) as f64).log2()).sum();
        self.log2_space(&counts) + repeats
    }
}

/// Values for every unknown instantiated at `repeats`.
///
/// `holes[i]` and `choices[i]` hold one value for a plain unknown and one
/// per iteration for a template.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub repeats: Vec<u32>,
    pub holes: Vec<Vec<u64>>,
    pub choices: Vec<Vec<u32>>,
}

impl Assignment {
    /// All unknowns set to zero at the given repeat counts.
    pub fn zeroed(reg: &UnknownRegistry, repeats: &[u32]) -> Self {
        let holes = reg
            .holes
            .iter()
            .map(|h| vec![0; UnknownRegistry::instances(h.repeat, repeats) as usize])
            .collect();
        let choices = reg
            .choices
            .iter()
            .map(|c| vec![0; UnknownRegistry::instances(c.repeat, repeats) as usize])
            .collect();
        Assignment { repeats: repeats.to_vec(), holes, choices }
    }

    pub fn hole(&self, index: usize, iter: Option<u32>) -> u64 {
        self.holes[index][iter.map_or(0, |i| i as usize - 1)]
    }

    pub fn choice(&self, index: usize, iter: Option<u32>) -> u32 {
        self.choices[index][iter.map_or(0, |i| i as usize - 1)]
    }

    /// True when the shape matches `reg` and every value is within bounds.
    pub fn is_total(&self, reg: &UnknownRegistry) -> bool {
        if self.repeats.len() != reg.repeats.len()
            || self.holes.len() != reg.holes.len()
            || self.choices.len() != reg.choices.len()
        {
            return false;
        }
        if self.repeats.iter().zip(&reg.repeats).any(|(n, r)| *n > r.max) {
            return false;
        }
        let holes_ok = self.holes.iter().zip(&reg.holes).all(|(vals, h)| {
            vals.len() == UnknownRegistry::instances(h.repeat, &self.repeats) as usize
                && vals.iter().all(|v| *v <= h.max_value())
        });
        let choices_ok = self.choices.iter().zip(&reg.choices).all(|(vals, c)| {
            vals.len() == UnknownRegistry::instances(c.repeat, &self.repeats) as usize
                && vals.iter().all(|v| *v < c.arity)
        });
        holes_ok && choices_ok
    }

    /// Iteration labels for the values of an unknown attached to `repeat`.
    pub fn iterations(repeat: Option<usize>, len: usize) -> Vec<Option<u32>> {
        match repeat {
            None => vec![None],
            Some(_) => (1..=len as u32).map(Some).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> UnknownRegistry {
        UnknownRegistry {
            holes: vec![
                HoleInfo { id: UnknownId::new(UnknownKind::Hole, 1, "A"), bits: 3, is_bool: false, repeat: None },
                HoleInfo { id: UnknownId::new(UnknownKind::Hole, 2, "A"), bits: 2, is_bool: false, repeat: Some(0) },
            ],
            choices: vec![ChoiceInfo { id: UnknownId::new(UnknownKind::Choice, 1, "A"), arity: 3, repeat: None }],
            repeats: vec![RepeatInfo { id: UnknownId::new(UnknownKind::Repeat, 1, "A"), max: 4 }],
        }
    }

    #[test]
    fn names_follow_kind_prefix() {
        assert_eq!(UnknownId::new(UnknownKind::Hole, 1, "SimpleMath").name, "e_h1");
        assert_eq!(UnknownId::new(UnknownKind::Choice, 2, "X").name, "e_c2");
        assert_eq!(UnknownId::new(UnknownKind::Repeat, 1, "X").name, "e_r1");
        assert_eq!(instance_name("e_h3", Some(2)), "e_h3_2");
    }

    #[test]
    fn space_size_counts_template_instances() {
        let reg = registry();
        let s = reg.log2_space(&[3]);
        assert!((s - (3.0 + 2.0 * 3.0 + 3f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn zeroed_assignment_is_total() {
        let reg = registry();
        let mut a = Assignment::zeroed(&reg, &[2]);
        assert!(a.is_total(&reg));
        assert_eq!(a.holes[1].len(), 2);
        a.holes[1][1] = 4;
        assert!(!a.is_total(&reg));
    }
}
