//! Objective literals and literals.
//!
//! An *objective literal* is an atom `p` or its explicit negation `-p`.
//! A *literal* is an objective literal `O` or its default negation `not O`.
//! The two negations are independent: `not -p` is the default negation of
//! the explicitly negated atom `p`.
//!
//! Both conjugation operators are involutions:
//!
//! * explicit conjugation swaps `p` and `-p`;
//! * default conjugation swaps `O` and `not O`.

use std::fmt;

use crate::error::ModelError;
use crate::symbol::Symbol;

/// An atom or its explicit negation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectiveLiteral {
    symbol: Symbol,
    negated: bool,
}

impl ObjectiveLiteral {
    pub fn atom(symbol: Symbol) -> Self {
        ObjectiveLiteral { symbol, negated: false }
    }

    pub fn negated_atom(symbol: Symbol) -> Self {
        ObjectiveLiteral { symbol, negated: true }
    }

    pub fn new(symbol: Symbol, negated: bool) -> Self {
        ObjectiveLiteral { symbol, negated }
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn is_explicitly_negated(&self) -> bool {
        self.negated
    }

    pub fn is_truth_constant(&self) -> bool {
        !self.negated && self.symbol.is_truth_constant()
    }

    pub fn is_bottom(&self) -> bool {
        !self.negated && self.symbol.is_bottom()
    }

    /// Whether an explicit conjugate exists for this literal. Reserved
    /// symbols and folding atoms have none.
    pub fn has_explicit_conjugate(&self) -> bool {
        self.symbol.admits_explicit_negation()
    }

    /// The explicit conjugate: `p ↦ -p`, `-p ↦ p`.
    pub fn conj_e(&self) -> Result<ObjectiveLiteral, ModelError> {
        if !self.has_explicit_conjugate() {
            return Err(ModelError::ReservedSymbol(self.symbol.name().to_owned()));
        }
        Ok(ObjectiveLiteral { symbol: self.symbol, negated: !self.negated })
    }

    /// Parse-free construction from a display name such as `p` or `-p`.
    pub fn from_name(name: &str) -> Self {
        match name.strip_prefix('-') {
            Some(rest) => ObjectiveLiteral::negated_atom(Symbol::new(rest)),
            None => ObjectiveLiteral::atom(Symbol::new(name)),
        }
    }

    pub fn bottom() -> Self {
        ObjectiveLiteral::atom(Symbol::bottom())
    }

    pub fn query() -> Self {
        ObjectiveLiteral::atom(Symbol::query())
    }
}

impl fmt::Display for ObjectiveLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.symbol)
        } else {
            write!(f, "{}", self.symbol)
        }
    }
}

impl fmt::Debug for ObjectiveLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// An objective literal, possibly under default negation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    objective: ObjectiveLiteral,
    default_negated: bool,
}

impl Literal {
    pub fn positive(objective: ObjectiveLiteral) -> Self {
        Literal { objective, default_negated: false }
    }

    pub fn negative(objective: ObjectiveLiteral) -> Self {
        Literal { objective, default_negated: true }
    }

    pub fn new(objective: ObjectiveLiteral, default_negated: bool) -> Self {
        Literal { objective, default_negated }
    }

    pub fn objective(&self) -> ObjectiveLiteral {
        self.objective
    }

    pub fn is_positive(&self) -> bool {
        !self.default_negated
    }

    pub fn is_negative(&self) -> bool {
        self.default_negated
    }

    /// The default conjugate: `O ↦ not O`, `not O ↦ O`.
    pub fn conj_d(&self) -> Literal {
        Literal { objective: self.objective, default_negated: !self.default_negated }
    }

    pub fn truth_t() -> Literal {
        Literal::positive(ObjectiveLiteral::atom(Symbol::truth_t()))
    }

    pub fn truth_u() -> Literal {
        Literal::positive(ObjectiveLiteral::atom(Symbol::truth_u()))
    }

    pub fn not_bottom() -> Literal {
        Literal::negative(ObjectiveLiteral::bottom())
    }

    /// Parse-free construction from names like `p`, `-p`, `not p`, `not -p`.
    pub fn from_name(name: &str) -> Self {
        match name.strip_prefix("not ") {
            Some(rest) => Literal::negative(ObjectiveLiteral::from_name(rest.trim())),
            None => Literal::positive(ObjectiveLiteral::from_name(name)),
        }
    }
}

impl From<ObjectiveLiteral> for Literal {
    fn from(o: ObjectiveLiteral) -> Self {
        Literal::positive(o)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.default_negated {
            write!(f, "not {}", self.objective)
        } else {
            write!(f, "{}", self.objective)
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_conjugation_flips_polarity() {
        let p = ObjectiveLiteral::from_name("p");
        let np = p.conj_e().unwrap();
        assert_eq!(np.to_string(), "-p");
        assert_eq!(np.conj_e().unwrap(), p);
    }

    #[test]
    fn explicit_conjugation_of_paper_example() {
        // inferring not(b) from -b starts from the conjugate pair (-b, b)
        let nb = ObjectiveLiteral::from_name("-b");
        assert_eq!(nb.conj_e().unwrap(), ObjectiveLiteral::from_name("b"));
    }

    #[test]
    fn reserved_symbols_reject_explicit_conjugation() {
        assert!(ObjectiveLiteral::bottom().conj_e().is_err());
        assert!(ObjectiveLiteral::query().conj_e().is_err());
        assert!(ObjectiveLiteral::from_name("fold_a_1_m").conj_e().is_err());
    }

    #[test]
    fn default_conjugation_is_involution() {
        let l = Literal::from_name("not -q");
        assert_eq!(l.conj_d().to_string(), "-q");
        assert_eq!(l.conj_d().conj_d(), l);
        // folding literals are ordinary objective literals under conj_d
        let fold = Literal::from_name("not fold_a_1_m");
        assert_eq!(fold.conj_d().to_string(), "fold_a_1_m");
    }
}
