//! Interned atom names.
//!
//! Every atom in a program is a `Symbol`: a pointer into a process-wide
//! intern table. Symbols compare and sort by their textual name so that
//! serialized output is stable across runs regardless of interning order.
//!
//! A few names are reserved and carry fixed meaning:
//!
//! * `t`, `u`, `f` — truth-value constants. They may appear in rule bodies
//!   built internally (scenario rules) but never in user programs, and they
//!   never participate in literal closures.
//! * `bottom` — the head of integrity rules; falsum.
//! * `query` — the root goal atom attached ahead of an evaluation.
//! * anything prefixed `fold_a_` / `fold_b_` — folding atoms generated by
//!   the dual transformation.
//!
//! None of the reserved names may be explicitly negated.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// An interned atom name.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(&'static str);

static INTERN: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();

impl Symbol {
    /// Intern `name` and return its symbol.
    pub fn new(name: &str) -> Symbol {
        let table = INTERN.get_or_init(|| Mutex::new(HashSet::new()));
        let mut guard = table.lock().expect("intern table poisoned");
        if let Some(existing) = guard.get(name) {
            return Symbol(existing);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        guard.insert(leaked);
        Symbol(leaked)
    }

    pub fn name(&self) -> &'static str {
        self.0
    }

    /// True for the truth-value constants `t`, `u` and `f`.
    pub fn is_truth_constant(&self) -> bool {
        matches!(self.0, "t" | "u" | "f")
    }

    pub fn is_bottom(&self) -> bool {
        self.0 == "bottom"
    }

    pub fn is_query(&self) -> bool {
        self.0 == "query"
    }

    /// True for atoms generated by the folding step of the dual transform.
    pub fn is_folding(&self) -> bool {
        self.0.starts_with("fold_a_") || self.0.starts_with("fold_b_")
    }

    /// True if the name belongs to the reserved namespace and is therefore
    /// unavailable to user programs.
    pub fn is_reserved(&self) -> bool {
        self.is_truth_constant() || self.is_bottom() || self.is_query() || self.is_folding()
    }

    /// Reserved symbols and folding atoms never appear explicitly negated.
    pub fn admits_explicit_negation(&self) -> bool {
        !self.is_reserved()
    }

    pub fn bottom() -> Symbol {
        Symbol::new("bottom")
    }

    pub fn query() -> Symbol {
        Symbol::new("query")
    }

    pub fn truth_t() -> Symbol {
        Symbol::new("t")
    }

    pub fn truth_u() -> Symbol {
        Symbol::new("u")
    }

    pub fn truth_f() -> Symbol {
        Symbol::new("f")
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(other.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_dedupes() {
        let a = Symbol::new("p");
        let b = Symbol::new("p");
        assert_eq!(a, b);
        assert_eq!(a.name().as_ptr(), b.name().as_ptr());
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut names = vec![Symbol::new("q"), Symbol::new("p"), Symbol::new("r")];
        names.sort();
        let shown: Vec<_> = names.iter().map(|s| s.name()).collect();
        assert_eq!(shown, ["p", "q", "r"]);
    }

    #[test]
    fn reserved_namespace() {
        assert!(Symbol::new("t").is_truth_constant());
        assert!(Symbol::new("bottom").is_reserved());
        assert!(Symbol::new("query").is_reserved());
        assert!(Symbol::new("fold_a_1_m").is_folding());
        assert!(Symbol::new("fold_b_3_m").is_reserved());
        assert!(!Symbol::new("folding").is_reserved());
        assert!(!Symbol::new("tu").is_reserved());
    }
}
