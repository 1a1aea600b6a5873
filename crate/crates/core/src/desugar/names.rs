use std::collections::{HashMap, HashSet};

use crate::frontend::ast::SketchAst;

/// Allocates flattened names for inner and anonymous classes.
///
/// Every pass that needs flattened names walks the AST in the same pre-order
/// (`walk_*` order) with a fresh allocator, so all passes agree.
#[derive(Clone, Debug)]
pub struct FlatNames {
    taken: HashSet<String>,
    anon: HashMap<String, u32>,
}

impl FlatNames {
    pub fn new(ast: &SketchAst) -> Self {
        let taken = ast.units.iter().flat_map(|u| u.types.iter().map(|t| t.name.clone())).collect();
        FlatNames { taken, anon: HashMap::new() }
    }

    fn claim(&mut self, base: String) -> String {
        if self.taken.insert(base.clone()) {
            return base;
        }
        let mut k = 2;
        loop {
            let candidate = format!("{}_{}", base, k);
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
            k += 1;
        }
    }

    /// `Inner_Outer`, suffixed with `_<k>` on collision.
    pub fn inner(&mut self, inner: &str, outer: &str) -> String {
        self.claim(mangle_inner(inner, outer))
    }

    /// `Base_<n>` with `n` counting anonymous subclasses of `base` from 1.
    pub fn anon(&mut self, base: &str) -> String {
        loop {
            let n = self.anon.entry(base.to_string()).or_insert(0);
            *n += 1;
            let candidate = format!("{}_{}", base, n);
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

pub fn mangle_inner(inner: &str, outer: &str) -> String {
    format!("{}_{}", inner, outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_sources;

    #[test]
    fn inner_and_anonymous_names() {
        let ast = parse_sources(&[("A.java", "class A {} class B_A {}")]).unwrap();
        let mut names = FlatNames::new(&ast);
        assert_eq!(names.inner("Monitor", "DBConnection"), "Monitor_DBConnection");
        assert_eq!(names.inner("B", "A"), "B_A_2");
        assert_eq!(names.anon("Token"), "Token_1");
        assert_eq!(names.anon("Token"), "Token_2");
    }

    #[test]
    fn anonymous_numbering_skips_user_names() {
        let ast = parse_sources(&[("A.java", "class Token_1 {}")]).unwrap();
        let mut names = FlatNames::new(&ast);
        assert_eq!(names.anon("Token"), "Token_2");
    }
}
