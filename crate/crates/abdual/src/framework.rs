//! Abductive frameworks and scenarios.
//!
//! A framework is a triple of a program, a finite set of abducible
//! objective literals closed under explicit conjugation, and a set of
//! integrity rules headed by `bottom`. A scenario commits a consistent
//! subset of the abducibles to be true; the remaining abducibles stay
//! undefined via `A :- u` scenario rules.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::ModelError;
use crate::literal::{Literal, ObjectiveLiteral};
use crate::program::{Program, Rule};

#[derive(Clone, Default, PartialEq, Eq)]
pub struct AbductiveFramework {
    pub program: Program,
    pub abducibles: BTreeSet<ObjectiveLiteral>,
    pub integrity_rules: Program,
}

impl AbductiveFramework {
    pub fn new(
        program: Program,
        abducibles: BTreeSet<ObjectiveLiteral>,
        integrity_rules: Program,
    ) -> Result<Self, ModelError> {
        let fw = AbductiveFramework { program, abducibles, integrity_rules };
        fw.validate()?;
        Ok(fw)
    }

    pub fn without_abduction(program: Program) -> Self {
        AbductiveFramework {
            program,
            abducibles: BTreeSet::new(),
            integrity_rules: Program::new(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for a in &self.abducibles {
            let conj = a.conj_e().map_err(|_| {
                ModelError::InvalidFramework(format!("abducible `{a}` is a reserved symbol"))
            })?;
            if !self.abducibles.contains(&conj) {
                return Err(ModelError::InvalidFramework(format!(
                    "abducibles are not closed under explicit conjugation: `{conj}` is missing"
                )));
            }
            if self.program.has_rule_for(&Literal::positive(*a)) {
                return Err(ModelError::InvalidFramework(format!(
                    "rule head `{a}` is abducible"
                )));
            }
        }
        for rule in self.integrity_rules.iter() {
            if !rule.head.is_positive() || !rule.head.objective().is_bottom() {
                return Err(ModelError::InvalidFramework(format!(
                    "integrity rule head must be bottom, found `{}`",
                    rule.head
                )));
            }
        }
        for lit in self.program.occurring_literals() {
            if lit.objective().is_bottom() {
                return Err(ModelError::InvalidFramework(
                    "bottom occurs in the program".to_owned(),
                ));
            }
        }
        Ok(())
    }

    /// Program and integrity rules combined.
    pub fn combined_program(&self) -> Program {
        let mut p = self.program.clone();
        p.extend(&self.integrity_rules);
        p
    }
}

impl fmt::Debug for AbductiveFramework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "program:")?;
        write!(f, "{:?}", self.program)?;
        let abds: Vec<String> = self.abducibles.iter().map(|a| a.to_string()).collect();
        writeln!(f, "abducibles: {{{}}}", abds.join(", "))?;
        writeln!(f, "integrity rules:")?;
        write!(f, "{:?}", self.integrity_rules)
    }
}

/// A framework together with an abduced subset of its abducibles.
#[derive(Clone, PartialEq, Eq)]
pub struct Scenario<'a> {
    pub framework: &'a AbductiveFramework,
    pub abduced: BTreeSet<ObjectiveLiteral>,
}

impl<'a> Scenario<'a> {
    pub fn new(
        framework: &'a AbductiveFramework,
        abduced: BTreeSet<ObjectiveLiteral>,
    ) -> Result<Self, ModelError> {
        for o in &abduced {
            if !framework.abducibles.contains(o) {
                return Err(ModelError::InconsistentScenario(format!(
                    "`{o}` is not an abducible of the framework"
                )));
            }
            if let Ok(conj) = o.conj_e() {
                if abduced.contains(&conj) {
                    return Err(ModelError::InconsistentScenario(format!(
                        "both `{o}` and `{conj}` are abduced"
                    )));
                }
            }
        }
        Ok(Scenario { framework, abduced })
    }

    /// The scenario program: `A :- t.` for each abduced `A`, `A :- u.` for
    /// every other abducible.
    pub fn scenario_program(&self) -> Program {
        let mut p = Program::new();
        for a in &self.framework.abducibles {
            let body = if self.abduced.contains(a) {
                Literal::truth_t()
            } else {
                Literal::truth_u()
            };
            p.push(Rule::new(Literal::positive(*a), vec![body]));
        }
        p
    }

    /// `P ∪ P_B ∪ I`, the program whose well-founded model is `M(σ)`.
    pub fn extended_program(&self) -> Program {
        let mut p = self.framework.program.clone();
        p.extend(&self.scenario_program());
        p.extend(&self.framework.integrity_rules);
        p
    }
}

/// Convenience for building a scenario program directly from sets.
pub fn scenario_program(s: &Scenario<'_>) -> Program {
    s.scenario_program()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn olit(s: &str) -> ObjectiveLiteral {
        ObjectiveLiteral::from_name(s)
    }

    fn abds(names: &[&str]) -> BTreeSet<ObjectiveLiteral> {
        names.iter().map(|n| olit(n)).collect()
    }

    #[test]
    fn scenario_program_assigns_t_and_u() {
        let fw = AbductiveFramework::new(Program::new(), abds(&["a", "-a"]), Program::new())
            .unwrap();
        let sc = Scenario::new(&fw, abds(&["a"])).unwrap();
        let p = sc.scenario_program();
        let lines: Vec<String> = p.iter().map(|r| r.to_string()).collect();
        assert_eq!(lines, ["a :- t.", "-a :- u."]);
    }

    #[test]
    fn empty_abduced_set_yields_all_u_rules() {
        let fw = AbductiveFramework::new(
            Program::new(),
            abds(&["p*", "q*", "-p*", "-q*"]),
            Program::new(),
        )
        .unwrap();
        let sc = Scenario::new(&fw, BTreeSet::new()).unwrap();
        let p = sc.scenario_program();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|r| r.body == vec![Literal::truth_u()]));
        // head set equals the abducibles
        let heads: BTreeSet<_> = p.iter().map(|r| r.head.objective()).collect();
        assert_eq!(heads, fw.abducibles);
    }

    #[test]
    fn positive_pair_abduction() {
        let fw = AbductiveFramework::new(
            Program::new(),
            abds(&["abd_p", "abd_q", "-abd_p", "-abd_q"]),
            Program::new(),
        )
        .unwrap();
        let sc = Scenario::new(&fw, abds(&["abd_p", "abd_q"])).unwrap();
        let p = sc.scenario_program();
        let lines: Vec<String> = p.iter().map(|r| r.to_string()).collect();
        assert_eq!(
            lines,
            ["abd_p :- t.", "-abd_p :- u.", "abd_q :- t.", "-abd_q :- u."]
        );
    }

    #[test]
    fn conjugate_pair_in_abduced_set_is_rejected() {
        let fw = AbductiveFramework::new(Program::new(), abds(&["a", "-a"]), Program::new())
            .unwrap();
        assert!(matches!(
            Scenario::new(&fw, abds(&["a", "-a"])),
            Err(ModelError::InconsistentScenario(_))
        ));
    }

    #[test]
    fn framework_invariants_are_enforced() {
        // abducibles must be closed under explicit conjugation
        let bad = AbductiveFramework::new(Program::new(), abds(&["a"]), Program::new());
        assert!(bad.is_err());

        // no rule head may be abducible
        let mut p = Program::new();
        p.push(Rule::fact(Literal::from_name("a")));
        let bad = AbductiveFramework::new(p, abds(&["a", "-a"]), Program::new());
        assert!(bad.is_err());
    }
}
