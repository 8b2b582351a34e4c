//! Rules and programs.
//!
//! A rule is `head :- body` with a significant left-to-right body order
//! (the evaluation uses a fixed leftmost selection strategy). In source
//! programs the head is a positive objective literal; dual programs also
//! allow default-negated heads.
//!
//! `literals` and `objective_literals` are the closures of the literals
//! occurring in a program under default and explicit conjugation. Truth
//! constants never enter the closures, and reserved atoms close only under
//! default conjugation since they have no explicit conjugates.

use std::collections::BTreeSet;
use std::fmt;

use crate::literal::{Literal, ObjectiveLiteral};
use crate::symbol::Symbol;

/// A single ground rule.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Literal,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: Literal, body: Vec<Literal>) -> Self {
        Rule { head, body }
    }

    pub fn fact(head: Literal) -> Self {
        Rule { head, body: Vec::new() }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// 1 plus the number of body literals.
    pub fn size(&self) -> usize {
        1 + self.body.len()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.body.is_empty() {
            write!(f, "{}.", self.head)
        } else {
            let body: Vec<String> = self.body.iter().map(|l| l.to_string()).collect();
            write!(f, "{} :- {}.", self.head, body.join(", "))
        }
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// A finite set of rules, kept in insertion order for stable output.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    pub fn new() -> Self {
        Program { rules: Vec::new() }
    }

    pub fn from_rules(rules: impl IntoIterator<Item = Rule>) -> Self {
        let mut p = Program::new();
        for r in rules {
            p.push(r);
        }
        p
    }

    /// Insert a rule unless an identical one is already present.
    pub fn push(&mut self, rule: Rule) -> bool {
        if self.rules.contains(&rule) {
            return false;
        }
        self.rules.push(rule);
        true
    }

    pub fn extend(&mut self, other: &Program) {
        for r in &other.rules {
            self.push(r.clone());
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter()
    }

    /// All rules whose head equals `head`, in program order.
    pub fn rules_for<'a>(&'a self, head: &'a Literal) -> impl Iterator<Item = &'a Rule> {
        self.rules.iter().filter(move |r| r.head == *head)
    }

    pub fn has_rule_for(&self, head: &Literal) -> bool {
        self.rules.iter().any(|r| r.head == *head)
    }

    pub fn has_fact_for(&self, head: &Literal) -> bool {
        self.rules.iter().any(|r| r.head == *head && r.is_fact())
    }

    /// Sum over all rules of 1 plus the body length.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Rule::size).sum()
    }

    /// Every literal occurring in the program, without closure.
    pub fn occurring_literals(&self) -> BTreeSet<Literal> {
        let mut out = BTreeSet::new();
        for rule in &self.rules {
            out.insert(rule.head);
            out.extend(rule.body.iter().copied());
        }
        out
    }

    /// The closure of the occurring objective literals under explicit
    /// conjugation. Truth constants are excluded; reserved atoms stay
    /// un-conjugated.
    pub fn objective_literals(&self) -> BTreeSet<ObjectiveLiteral> {
        let mut out = BTreeSet::new();
        for lit in self.occurring_literals() {
            let o = lit.objective();
            if o.is_truth_constant() {
                continue;
            }
            out.insert(o);
            if let Ok(conj) = o.conj_e() {
                out.insert(conj);
            }
        }
        out
    }

    /// The closure of the occurring literals under default and explicit
    /// conjugation.
    pub fn literals(&self) -> BTreeSet<Literal> {
        let mut out = BTreeSet::new();
        for o in self.objective_literals() {
            out.insert(Literal::positive(o));
            out.insert(Literal::negative(o));
        }
        out
    }

    /// Atom symbols occurring anywhere in the program (truth constants
    /// excluded).
    pub fn atom_symbols(&self) -> BTreeSet<Symbol> {
        self.occurring_literals()
            .into_iter()
            .map(|l| l.objective().symbol())
            .filter(|s| !s.is_truth_constant())
            .collect()
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

impl FromIterator<Rule> for Program {
    fn from_iter<T: IntoIterator<Item = Rule>>(iter: T) -> Self {
        Program::from_rules(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Literal {
        Literal::from_name(s)
    }

    #[test]
    fn size_counts_head_plus_body() {
        let p = Program::from_rules([
            Rule::new(lit("p"), vec![lit("not q")]),
            Rule::new(lit("p"), vec![lit("not r")]),
            Rule::new(lit("q"), vec![lit("not p")]),
        ]);
        assert_eq!(p.size(), 6);
    }

    #[test]
    fn closures_cover_both_conjugations() {
        let p = Program::from_rules([Rule::new(lit("p"), vec![lit("not q")])]);
        let objs: Vec<String> = p.objective_literals().iter().map(|o| o.to_string()).collect();
        assert_eq!(objs, ["p", "-p", "q", "-q"]);
        assert_eq!(p.literals().len(), 8);
    }

    #[test]
    fn reserved_atoms_close_without_explicit_conjugates() {
        let p = Program::from_rules([Rule::new(
            lit("query"),
            vec![lit("q"), Literal::not_bottom()],
        )]);
        let objs = p.objective_literals();
        assert!(objs.contains(&ObjectiveLiteral::bottom()));
        assert!(objs.contains(&ObjectiveLiteral::query()));
        assert!(!objs.iter().any(|o| o.is_explicitly_negated() && !o.has_explicit_conjugate()));
        // q still closes fully
        assert!(objs.contains(&ObjectiveLiteral::from_name("-q")));
    }

    #[test]
    fn truth_constants_stay_out_of_closures() {
        let p = Program::from_rules([Rule::new(lit("a"), vec![Literal::truth_u()])]);
        assert!(!p.objective_literals().iter().any(|o| o.is_truth_constant()));
    }

    #[test]
    fn duplicate_rules_collapse() {
        let mut p = Program::new();
        assert!(p.push(Rule::fact(lit("a"))));
        assert!(!p.push(Rule::fact(lit("a"))));
        assert_eq!(p.len(), 1);
    }
}
