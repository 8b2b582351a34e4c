//! The dual transformation.
//!
//! For each objective literal `O` of a program, the dual program adds
//! rules for `not O` that derive `not O` exactly when `O` is false. Two
//! variants are provided:
//!
//! * [`dual_fold`] keeps the output linear in the input size by chaining
//!   per-rule folding atoms: `not O` holds when every rule for `O` is
//!   refuted, and a rule is refuted when one of its body literals is
//!   (witnessed by a leaf rule per body literal).
//! * [`dual_unfold`] produces one rule for `not O` per choice of a body
//!   literal from each rule of `O`. Exponential in the worst case, but it
//!   reads exactly like the worked evaluations, so it is kept for
//!   debugging and display.
//!
//! Both variants add the same closing rules: a fact `not O.` for every
//! non-abducible `O` in the literal closure that has no rules at all, and
//! coherency axioms `not O :- conj_E(O)` linking explicit to default
//! negation. Objective literals with a fact get no rules for `not O`;
//! such rules could only ever fire with a false body.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::ModelError;
use crate::framework::AbductiveFramework;
use crate::literal::{Literal, ObjectiveLiteral};
use crate::program::{Program, Rule};
use crate::symbol::Symbol;

/// Where a dual-program rule came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleOrigin {
    /// Copied verbatim from the input program.
    Source,
    /// The query rule attached ahead of dualization.
    Query,
    /// Generated negative rule (folding chain, leaf, or ruleless fact).
    Folding,
    /// Coherency axiom `not O :- conj_E(O)`.
    Coherency,
}

/// A dual program: the transformed rule set plus per-rule provenance and
/// the abducibles the transformation was performed against.
#[derive(Clone, PartialEq, Eq)]
pub struct DualProgram {
    program: Program,
    origins: Vec<RuleOrigin>,
    abducibles: BTreeSet<ObjectiveLiteral>,
}

impl DualProgram {
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn abducibles(&self) -> &BTreeSet<ObjectiveLiteral> {
        &self.abducibles
    }

    pub fn origins(&self) -> &[RuleOrigin] {
        &self.origins
    }

    pub fn rules_with_origin(&self, origin: RuleOrigin) -> impl Iterator<Item = &Rule> {
        self.program
            .iter()
            .zip(self.origins.iter())
            .filter(move |(_, o)| **o == origin)
            .map(|(r, _)| r)
    }

    pub fn size(&self) -> usize {
        self.program.size()
    }

    fn push(&mut self, rule: Rule, origin: RuleOrigin) {
        if self.program.push(rule) {
            self.origins.push(origin);
        }
    }
}

impl fmt::Debug for DualProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.program)
    }
}

fn source_origin(rule: &Rule) -> RuleOrigin {
    if rule.head.objective().symbol().is_query() {
        RuleOrigin::Query
    } else {
        RuleOrigin::Source
    }
}

/// Heads in order of first occurrence.
fn heads_in_order(p: &Program) -> Vec<Literal> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rule in p.iter() {
        if seen.insert(rule.head) {
            out.push(rule.head);
        }
    }
    out
}

/// Per-head folding-name bases. Explicit negation mangles to a `neg_`
/// prefix; bases are deduplicated so distinct heads never share one.
fn folding_bases(heads: &[Literal]) -> BTreeMap<ObjectiveLiteral, String> {
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut bases = BTreeMap::new();
    for head in heads {
        let o = head.objective();
        if bases.contains_key(&o) {
            continue;
        }
        let mut base = if o.is_explicitly_negated() {
            format!("neg_{}", o.symbol())
        } else {
            o.symbol().name().to_owned()
        };
        while !taken.insert(base.clone()) {
            base.push('_');
        }
        bases.insert(o, base);
    }
    bases
}

fn not_obj(name: &str) -> Literal {
    Literal::negative(ObjectiveLiteral::atom(Symbol::new(name)))
}

/// Shared tail of both transforms: ruleless facts and coherency axioms.
fn close_dual(out: &mut DualProgram, p: &Program, abducibles: &BTreeSet<ObjectiveLiteral>) {
    // `not O.` for objective literals without rules. Abducibles are
    // excluded: their default negation is reachable only through the
    // coherency axiom, i.e. by abducing the explicit conjugate.
    for o in p.objective_literals() {
        if abducibles.contains(&o) || p.has_rule_for(&Literal::positive(o)) {
            continue;
        }
        out.push(Rule::fact(Literal::negative(o)), RuleOrigin::Folding);
    }
    // coherency axioms for every conjugable objective literal in sight
    let mut scope = p.objective_literals();
    scope.extend(abducibles.iter().copied());
    for o in scope {
        if let Ok(conj) = o.conj_e() {
            out.push(
                Rule::new(Literal::negative(o), vec![Literal::positive(conj)]),
                RuleOrigin::Coherency,
            );
        }
    }
}

fn assert_no_folding_atoms(p: &Program) {
    debug_assert!(
        !p.atom_symbols().iter().any(|s| s.is_folding()),
        "input program uses the folding namespace"
    );
}

/// The folded dual transformation.
pub fn dual_fold(p: &Program, abducibles: &BTreeSet<ObjectiveLiteral>) -> DualProgram {
    assert_no_folding_atoms(p);
    let mut out = DualProgram {
        program: Program::new(),
        origins: Vec::new(),
        abducibles: abducibles.clone(),
    };
    for rule in p.iter() {
        out.push(rule.clone(), source_origin(rule));
    }

    let heads = heads_in_order(p);
    let bases = folding_bases(&heads);
    for head in &heads {
        let rules: Vec<&Rule> = p.rules_for(head).collect();
        if rules.iter().any(|r| r.is_fact()) {
            continue; // a fact makes O true outright; not O gets no rules
        }
        let base = &bases[&head.objective()];
        let m = rules.len();
        let fold_a = |i: usize| format!("fold_a_{i}_{base}");
        let fold_b = |i: usize| format!("fold_b_{i}_{base}");

        out.push(
            Rule::new(head.conj_d(), vec![not_obj(&fold_a(1))]),
            RuleOrigin::Folding,
        );
        for i in 1..=m {
            let chain_body = if i < m {
                vec![not_obj(&fold_b(i)), not_obj(&fold_a(i + 1))]
            } else {
                vec![not_obj(&fold_b(i))]
            };
            out.push(Rule::new(not_obj(&fold_a(i)), chain_body), RuleOrigin::Folding);
        }
        for (i, rule) in rules.iter().enumerate() {
            for lit in &rule.body {
                out.push(
                    Rule::new(not_obj(&fold_b(i + 1)), vec![lit.conj_d()]),
                    RuleOrigin::Folding,
                );
            }
        }
    }

    close_dual(&mut out, p, abducibles);
    out
}

/// The unfolded dual transformation.
pub fn dual_unfold(p: &Program, abducibles: &BTreeSet<ObjectiveLiteral>) -> DualProgram {
    assert_no_folding_atoms(p);
    let mut out = DualProgram {
        program: Program::new(),
        origins: Vec::new(),
        abducibles: abducibles.clone(),
    };
    for rule in p.iter() {
        out.push(rule.clone(), source_origin(rule));
    }

    let heads = heads_in_order(p);
    for head in heads {
        let rules: Vec<&Rule> = p.rules_for(&head).collect();
        if rules.iter().any(|r| r.is_fact()) {
            continue;
        }
        // one body-literal choice per rule; advance like an odometer
        let mut choice = vec![0usize; rules.len()];
        'choices: loop {
            let body: Vec<Literal> = rules
                .iter()
                .zip(choice.iter())
                .map(|(r, &j)| r.body[j].conj_d())
                .collect();
            out.push(Rule::new(head.conj_d(), body), RuleOrigin::Folding);

            let mut k = rules.len();
            while k > 0 {
                k -= 1;
                choice[k] += 1;
                if choice[k] < rules[k].body.len() {
                    continue 'choices;
                }
                choice[k] = 0;
            }
            break;
        }
    }

    close_dual(&mut out, p, abducibles);
    out
}

/// `P ∪ I ∪ {query :- Q, not bottom}`, the program an evaluation dualizes.
pub fn attach_query(fw: &AbductiveFramework, q: &Literal) -> Result<Program, ModelError> {
    if q.objective().symbol().is_reserved() {
        return Err(ModelError::ReservedSymbol(q.objective().symbol().name().to_owned()));
    }
    let mut p = fw.combined_program();
    p.push(Rule::new(
        Literal::positive(ObjectiveLiteral::query()),
        vec![*q, Literal::not_bottom()],
    ));
    Ok(p)
}

/// Like [`attach_query`] but without a goal literal: `query :- not bottom.`
/// succeeds for every context under which the integrity rules are refuted.
pub fn attach_constraint_query(fw: &AbductiveFramework) -> Program {
    let mut p = fw.combined_program();
    p.push(Rule::new(
        Literal::positive(ObjectiveLiteral::query()),
        vec![Literal::not_bottom()],
    ));
    p
}

/// Result of checking the size bound of the folded transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeCheck {
    pub size_in: usize,
    pub size_out: usize,
    pub bound_ok: bool,
}

/// Checks `size(dual_fold(P, A)) < 9·size(P) + 2·|A|`. An empty dual
/// trivially satisfies the bound.
pub fn dual_size_check(p: &Program, abducibles: &BTreeSet<ObjectiveLiteral>) -> SizeCheck {
    let size_in = p.size();
    let size_out = dual_fold(p, abducibles).size();
    let bound_ok = size_out == 0 || size_out < 9 * size_in + 2 * abducibles.len();
    SizeCheck { size_in, size_out, bound_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_framework, parse_query, serialize_rule};

    fn rule_strings(dp: &DualProgram) -> Vec<String> {
        dp.program().iter().map(serialize_rule).collect()
    }

    fn sorted(mut v: Vec<String>) -> Vec<String> {
        v.sort();
        v
    }

    #[test]
    fn folded_dual_of_three_rule_clause() {
        let fw = parse_framework(
            "m :- n1, not o1.\nm :- n2, not o2.\nm :- n3, not o3.\n",
        )
        .unwrap();
        let dp = dual_fold(&fw.program, &BTreeSet::new());
        let folding: Vec<String> =
            dp.rules_with_origin(RuleOrigin::Folding).map(serialize_rule).collect();
        let expected_chain = [
            "not m :- not fold_a_1_m.",
            "not fold_a_1_m :- not fold_b_1_m, not fold_a_2_m.",
            "not fold_a_2_m :- not fold_b_2_m, not fold_a_3_m.",
            "not fold_a_3_m :- not fold_b_3_m.",
            "not fold_b_1_m :- not n1.",
            "not fold_b_1_m :- o1.",
            "not fold_b_2_m :- not n2.",
            "not fold_b_2_m :- o2.",
            "not fold_b_3_m :- not n3.",
            "not fold_b_3_m :- o3.",
        ];
        for want in expected_chain {
            assert!(folding.contains(&want.to_owned()), "missing `{want}`");
        }
        // the ten rules above plus one `not X.` fact per ruleless literal
        let chain_count =
            folding.iter().filter(|r| r.contains("fold_")).count();
        assert_eq!(chain_count, 10);
    }

    #[test]
    fn facts_suppress_negative_rules() {
        let fw = parse_framework("p.\n").unwrap();
        let dp = dual_fold(&fw.program, &BTreeSet::new());
        assert!(dp
            .program()
            .rules_for(&Literal::from_name("not p"))
            .all(|r| r.body == vec![Literal::from_name("-p")]));
        let dp = dual_unfold(&fw.program, &BTreeSet::new());
        assert!(dp
            .program()
            .rules_for(&Literal::from_name("not p"))
            .all(|r| r.body == vec![Literal::from_name("-p")]));
    }

    #[test]
    fn empty_program_with_abducibles_yields_only_coherency_axioms() {
        let abds: BTreeSet<_> =
            [ObjectiveLiteral::from_name("a"), ObjectiveLiteral::from_name("-a")]
                .into_iter()
                .collect();
        let dp = dual_fold(&Program::new(), &abds);
        assert_eq!(
            sorted(rule_strings(&dp)),
            ["not -a :- a.", "not a :- -a."]
        );
    }

    #[test]
    fn unfolded_dual_of_first_worked_program() {
        let fw = parse_framework("p :- not q.\np :- not r.\nq :- not p.\n").unwrap();
        let q = parse_query("q").unwrap();
        let attached = attach_query(&fw, &q).unwrap();
        let dp = dual_unfold(&attached, &BTreeSet::new());
        let expected = sorted(
            [
                // source rules and the query rule
                "p :- not q.",
                "p :- not r.",
                "q :- not p.",
                "query :- q, not bottom.",
                // negative rules
                "not p :- q, r.",
                "not q :- p.",
                "not r.",
                "not query :- not q.",
                "not query :- bottom.",
                "not bottom.",
                // ruleless explicit conjugates
                "not -p.",
                "not -q.",
                "not -r.",
                // coherency axioms
                "not p :- -p.",
                "not -p :- p.",
                "not q :- -q.",
                "not -q :- q.",
                "not r :- -r.",
                "not -r :- r.",
            ]
            .map(str::to_owned)
            .to_vec(),
        );
        assert_eq!(sorted(rule_strings(&dp)), expected);
    }

    #[test]
    fn unfolded_dual_takes_one_choice_per_rule() {
        let fw = parse_framework("a :- b, c.\n").unwrap();
        let dp = dual_unfold(&fw.program, &BTreeSet::new());
        let negatives: Vec<String> = dp
            .program()
            .rules_for(&Literal::from_name("not a"))
            .filter(|r| r.body.first() != Some(&Literal::from_name("-a")))
            .map(serialize_rule)
            .collect();
        assert_eq!(negatives, ["not a :- not b.", "not a :- not c."]);
    }

    #[test]
    fn unfolded_dual_of_constraint_framework() {
        // framework with abducibles and inlined integrity rules
        let fw = parse_framework(
            "p :- not q*.\nq :- not p*.\nabducible p*.\nabducible q*.\n\
             p_constr :- p, -p*.\nq_constr :- q, -q*.\n\
             :- p_constr.\n:- q_constr.\n",
        )
        .unwrap();
        let q = parse_query("q").unwrap();
        let attached = attach_query(&fw, &q).unwrap();
        let dp = dual_unfold(&attached, &fw.abducibles);
        let rules = rule_strings(&dp);
        for want in [
            "not p :- q*.",
            "not q :- p*.",
            "not bottom :- not p_constr, not q_constr.",
            "not p_constr :- not p.",
            "not p_constr :- not -p*.",
            "not q_constr :- not q.",
            "not q_constr :- not -q*.",
            "not query :- not q.",
            "not query :- bottom.",
            "not -p* :- p*.",
            "not p* :- -p*.",
            "not -q* :- q*.",
            "not q* :- -q*.",
            "not -p_constr :- p_constr.",
            "not p_constr :- -p_constr.",
        ] {
            assert!(rules.contains(&want.to_owned()), "missing `{want}`");
        }
        // abducibles never get a ruleless `not X.` fact
        for a in &fw.abducibles {
            let fact = Rule::fact(Literal::negative(*a));
            assert!(!dp.program().rules().contains(&fact), "unexpected `not {a}.`");
        }
    }

    #[test]
    fn attach_query_rejects_reserved_goals() {
        let fw = parse_framework("p.\n").unwrap();
        let q = Literal::from_name("query");
        assert!(attach_query(&fw, &q).is_err());
    }

    #[test]
    fn folding_atoms_never_occur_in_source_rules() {
        let fw = parse_framework("p :- not q.\nq :- not p.\n").unwrap();
        let dp = dual_fold(&fw.program, &BTreeSet::new());
        for rule in dp.rules_with_origin(RuleOrigin::Source) {
            assert!(!rule.head.objective().symbol().is_folding());
            assert!(rule.body.iter().all(|l| !l.objective().symbol().is_folding()));
        }
    }

    #[test]
    fn folding_bases_for_conjugate_heads_stay_distinct() {
        let mut p = Program::new();
        p.push(Rule::new(Literal::from_name("neg_p"), vec![Literal::from_name("not x")]));
        p.push(Rule::new(Literal::from_name("-p"), vec![Literal::from_name("not x")]));
        let dp = dual_fold(&p, &BTreeSet::new());
        let heads: BTreeSet<_> = dp
            .rules_with_origin(RuleOrigin::Folding)
            .map(|r| r.head.objective().symbol().name().to_owned())
            .collect();
        assert!(heads.contains("fold_a_1_neg_p"));
        assert!(heads.contains("fold_a_1_neg_p_"));
    }

    #[test]
    fn size_bound_holds_on_small_programs() {
        let fw = parse_framework("p :- not q.\np :- not r.\nq :- not p.\n").unwrap();
        let check = dual_size_check(&fw.program, &BTreeSet::new());
        assert!(check.bound_ok, "{check:?}");

        let empty = dual_size_check(&Program::new(), &BTreeSet::new());
        assert_eq!(empty, SizeCheck { size_in: 0, size_out: 0, bound_ok: true });

        let m = parse_framework("m :- n1, not o1.\nm :- n2, not o2.\nm :- n3, not o3.\n")
            .unwrap();
        assert!(dual_size_check(&m.program, &BTreeSet::new()).bound_ok);
    }
}
