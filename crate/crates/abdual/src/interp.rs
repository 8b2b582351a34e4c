//! Three-valued interpretations.
//!
//! An interpretation is a pair of sets of objective literals: those held
//! true and those held false by default (`not O` for every `O` in the
//! false set). An objective literal in neither set is undefined. Nothing
//! here enforces consistency or coherence; both are predicates, since the
//! semantics deliberately admits paraconsistent models.
//!
//! Truth lookup follows the convention that `t` and `not f` hold in every
//! interpretation while neither `u` nor `not u` holds in any.

use std::collections::BTreeSet;
use std::fmt;

use crate::literal::{Literal, ObjectiveLiteral};

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Interpretation {
    true_set: BTreeSet<ObjectiveLiteral>,
    false_set: BTreeSet<ObjectiveLiteral>,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    pub fn from_sets(
        true_set: BTreeSet<ObjectiveLiteral>,
        false_set: BTreeSet<ObjectiveLiteral>,
    ) -> Self {
        Interpretation { true_set, false_set }
    }

    /// Build from display names; `not `-prefixed names go to the false set.
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut interp = Interpretation::new();
        for name in names {
            match name.strip_prefix("not ") {
                Some(rest) => {
                    interp.false_set.insert(ObjectiveLiteral::from_name(rest.trim()));
                }
                None => {
                    interp.true_set.insert(ObjectiveLiteral::from_name(name));
                }
            }
        }
        interp
    }

    pub fn true_set(&self) -> &BTreeSet<ObjectiveLiteral> {
        &self.true_set
    }

    pub fn false_set(&self) -> &BTreeSet<ObjectiveLiteral> {
        &self.false_set
    }

    pub fn insert_true(&mut self, o: ObjectiveLiteral) -> bool {
        self.true_set.insert(o)
    }

    pub fn insert_false(&mut self, o: ObjectiveLiteral) -> bool {
        self.false_set.insert(o)
    }

    pub fn is_empty(&self) -> bool {
        self.true_set.is_empty() && self.false_set.is_empty()
    }

    /// Membership of a literal, honoring the truth-constant conventions.
    pub fn satisfies(&self, lit: &Literal) -> bool {
        let o = lit.objective();
        if o.is_truth_constant() {
            let name = o.symbol().name();
            return if lit.is_positive() { name == "t" } else { name == "f" };
        }
        if lit.is_positive() {
            self.true_set.contains(&o)
        } else {
            self.false_set.contains(&o)
        }
    }

    /// True when some objective literal is both true and default-false.
    pub fn is_consistent(&self) -> bool {
        self.true_set.is_disjoint(&self.false_set)
    }

    /// `O` true forces `not conj_E(O)`; explicit truth implies default
    /// falsity of the conjugate.
    pub fn is_coherent(&self) -> bool {
        self.true_set.iter().all(|o| match o.conj_e() {
            Ok(conj) => self.false_set.contains(&conj),
            Err(_) => true,
        })
    }

    /// The information ordering: pointwise set inclusion.
    pub fn info_leq(&self, other: &Interpretation) -> bool {
        self.true_set.is_subset(&other.true_set) && self.false_set.is_subset(&other.false_set)
    }

    /// Keep only literals over the given objective literals.
    pub fn restrict(&self, scope: &BTreeSet<ObjectiveLiteral>) -> Interpretation {
        Interpretation {
            true_set: self.true_set.intersection(scope).copied().collect(),
            false_set: self.false_set.intersection(scope).copied().collect(),
        }
    }

    pub fn union(&self, other: &Interpretation) -> Interpretation {
        Interpretation {
            true_set: self.true_set.union(&other.true_set).copied().collect(),
            false_set: self.false_set.union(&other.false_set).copied().collect(),
        }
    }

    /// All literals of the interpretation, positives before negatives.
    pub fn literals(&self) -> Vec<Literal> {
        let mut out: Vec<Literal> =
            self.true_set.iter().map(|o| Literal::positive(*o)).collect();
        out.extend(self.false_set.iter().map(|o| Literal::negative(*o)));
        out
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.literals().iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_information_least() {
        let bottom = Interpretation::new();
        let other = Interpretation::from_names(["p", "not q"]);
        assert!(bottom.info_leq(&other));
        assert!(!other.info_leq(&bottom));
        assert!(other.info_leq(&other));
    }

    #[test]
    fn incomparable_interpretations() {
        let a = Interpretation::from_names(["p"]);
        let b = Interpretation::from_names(["not p"]);
        assert!(!a.info_leq(&b));
        assert!(!b.info_leq(&a));
    }

    #[test]
    fn truth_constants_hold_by_convention() {
        let empty = Interpretation::new();
        assert!(empty.satisfies(&Literal::from_name("t")));
        assert!(empty.satisfies(&Literal::from_name("not f")));
        assert!(!empty.satisfies(&Literal::from_name("u")));
        assert!(!empty.satisfies(&Literal::from_name("not u")));
        assert!(!empty.satisfies(&Literal::from_name("f")));
        assert!(!empty.satisfies(&Literal::from_name("not t")));
    }

    #[test]
    fn restriction_drops_out_of_scope_literals() {
        let m = Interpretation::from_names(["s", "not p", "not q", "not r", "not -s"]);
        let scope: BTreeSet<_> = [ObjectiveLiteral::from_name("s")].into_iter().collect();
        let restricted = m.restrict(&scope);
        assert_eq!(restricted.to_string(), "{s}");
        assert_eq!(m.restrict(&BTreeSet::new()), Interpretation::new());
    }

    #[test]
    fn coherence_and_consistency_are_separate_predicates() {
        let incoherent = Interpretation::from_names(["-b"]);
        assert!(incoherent.is_consistent());
        assert!(!incoherent.is_coherent());

        let coherent = Interpretation::from_names(["-b", "not b"]);
        assert!(coherent.is_coherent());

        let paraconsistent = Interpretation::from_names(["p", "not p"]);
        assert!(!paraconsistent.is_consistent());
    }
}
