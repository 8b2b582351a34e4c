//! Generalized (partial) stable models via abduction.
//!
//! For each objective literal `O` appearing under default negation in
//! `P ∪ I`, a fresh shadow literal `abd_O` is introduced. Shadow rules
//! replace every body literal `not O` by `not abd_O`, so deriving through
//! default negation means committing to an assumption: abducing `-abd_O`
//! asserts `O` false, abducing `abd_O` blocks the assumption (leaving `O`
//! undefined unless derivable), and shadow constraints reject assignments
//! that disagree with what the rules actually derive. Totality rules
//! additionally force every literal to be decided, cutting the partial
//! models down to the (two-valued, consistent) stable models.
//!
//! Solutions are discovered by enumerating the fixpoints of the direct
//! consequence operator over `P ∪ P_B ∪ I` and encoding each fixpoint as
//! a shadow context; each encoded context is then validated against the
//! shadow framework's integrity rules, and its model is read back from
//! the framework's well-founded semantics. The dedicated enumeration
//! keeps partial models with undefined literals reachable, which a
//! purely goal-directed evaluation of the shadow framework cannot do
//! (an undefined literal leaves `bottom` undefined rather than false).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::OracleError;
use crate::framework::{AbductiveFramework, Scenario};
use crate::interp::Interpretation;
use crate::literal::{Literal, ObjectiveLiteral};
use crate::oracle;
use crate::program::{Program, Rule};
use crate::symbol::Symbol;

/// Mangled shadow name for an objective literal.
fn shadow_name(o: &ObjectiveLiteral) -> String {
    if o.is_explicitly_negated() {
        format!("abd_neg_{}", o.symbol())
    } else {
        format!("abd_{}", o.symbol())
    }
}

fn defined_name(o: &ObjectiveLiteral) -> String {
    if o.is_explicitly_negated() {
        format!("defined_neg_{}", o.symbol())
    } else {
        format!("defined_{}", o.symbol())
    }
}

/// The shadow literal `abd_O` for `O`.
pub fn shadow_literal(o: &ObjectiveLiteral) -> ObjectiveLiteral {
    ObjectiveLiteral::atom(Symbol::new(&shadow_name(o)))
}

/// Objective literals that occur under default negation in `p` and are
/// therefore shadowed.
pub fn shadowed_literals(p: &Program) -> BTreeSet<ObjectiveLiteral> {
    let mut out = BTreeSet::new();
    for rule in p.iter() {
        for lit in &rule.body {
            if lit.is_negative() && !lit.objective().is_truth_constant() {
                out.insert(lit.objective());
            }
        }
    }
    out
}

/// Per-rule copy of `p` with every default-negated body literal rewritten
/// to its shadow.
pub fn shadow(p: &Program) -> Program {
    let mut out = Program::new();
    for rule in p.iter() {
        let body = rule
            .body
            .iter()
            .map(|l| {
                if l.is_negative() && !l.objective().is_truth_constant() {
                    Literal::negative(shadow_literal(&l.objective()))
                } else {
                    *l
                }
            })
            .collect();
        out.push(Rule::new(rule.head, body));
    }
    out
}

fn bottom_head() -> Literal {
    Literal::positive(ObjectiveLiteral::bottom())
}

/// The two constraints per shadow literal appearing in `shadow(p)`:
/// `bottom :- O, not abd_O` and `bottom :- not O, abd_O`.
pub fn shadow_constraints(p: &Program) -> Program {
    let mut out = Program::new();
    for o in shadowed_literals(p) {
        let abd = shadow_literal(&o);
        out.push(Rule::new(
            bottom_head(),
            vec![Literal::positive(o), Literal::negative(abd)],
        ));
        out.push(Rule::new(
            bottom_head(),
            vec![Literal::negative(o), Literal::positive(abd)],
        ));
    }
    out
}

/// Shadow constraints plus, for every objective literal of `p`, the
/// schemata `bottom :- O, not O` and `bottom :- O, -O`.
pub fn consistency_constraints(p: &Program) -> Program {
    let mut out = shadow_constraints(p);
    for o in p.objective_literals() {
        out.push(Rule::new(
            bottom_head(),
            vec![Literal::positive(o), Literal::negative(o)],
        ));
        if let Ok(conj) = o.conj_e() {
            out.push(Rule::new(
                bottom_head(),
                vec![Literal::positive(o), Literal::positive(conj)],
            ));
        }
    }
    out
}

/// Three rules per objective literal of `p`: `bottom :- not defined_O`,
/// `defined_O :- O` and `defined_O :- not O`.
pub fn totality_rules(p: &Program) -> Program {
    let mut out = Program::new();
    for o in p.objective_literals() {
        let defined = Literal::positive(ObjectiveLiteral::atom(Symbol::new(&defined_name(&o))));
        out.push(Rule::new(bottom_head(), vec![defined.conj_d()]));
        out.push(Rule::new(defined, vec![Literal::positive(o)]));
        out.push(Rule::new(defined, vec![Literal::negative(o)]));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsmMode {
    Partial,
    Total,
}

/// The shadow reduction of a framework.
#[derive(Clone, Debug)]
pub struct GsmReduction {
    pub shadow_rules: Program,
    pub shadow_constraints: Program,
    pub consistency_constraints: Program,
    pub totality_rules: Program,
    pub shadow_abducibles: BTreeSet<ObjectiveLiteral>,
}

/// Build the reduction over `P ∪ I`.
pub fn reduction(fw: &AbductiveFramework) -> Result<GsmReduction, OracleError> {
    let combined = fw.combined_program();
    let atoms = combined.atom_symbols();
    for o in shadowed_literals(&combined) {
        let name = shadow_name(&o);
        if atoms.contains(&Symbol::new(&name)) {
            return Err(OracleError::Shape(format!(
                "program already uses the shadow name `{name}`"
            )));
        }
    }
    for o in combined.objective_literals() {
        let name = defined_name(&o);
        if atoms.contains(&Symbol::new(&name)) {
            return Err(OracleError::Shape(format!(
                "program already uses the totality name `{name}`"
            )));
        }
    }

    let mut shadow_abducibles = BTreeSet::new();
    for o in shadowed_literals(&combined) {
        let abd = shadow_literal(&o);
        shadow_abducibles.insert(abd);
        shadow_abducibles.insert(abd.conj_e().expect("shadow atoms are conjugable"));
    }
    Ok(GsmReduction {
        shadow_rules: shadow(&combined),
        shadow_constraints: shadow_constraints(&combined),
        consistency_constraints: consistency_constraints(&combined),
        totality_rules: totality_rules(&combined),
        shadow_abducibles,
    })
}

/// The abductive framework whose solutions encode the generalized
/// (partial) stable models: `P ∪ Shadow(P ∪ I)` with the shadow
/// abducibles and the shadow (plus, in total mode, consistency and
/// totality) constraints.
pub fn shadow_framework(
    fw: &AbductiveFramework,
    mode: GsmMode,
) -> Result<AbductiveFramework, OracleError> {
    let red = reduction(fw)?;
    let mut program = fw.program.clone();
    program.extend(&red.shadow_rules);
    let mut integrity = fw.integrity_rules.clone();
    integrity.extend(&red.shadow_constraints);
    if mode == GsmMode::Total {
        integrity.extend(&red.consistency_constraints);
        // totality rules are ordinary rules except for the constraint part
        for rule in red.totality_rules.iter() {
            if rule.head == bottom_head() {
                integrity.push(rule.clone());
            } else {
                program.push(rule.clone());
            }
        }
    }
    let mut abducibles = fw.abducibles.clone();
    abducibles.extend(red.shadow_abducibles.iter().copied());
    AbductiveFramework::new(program, abducibles, integrity)
        .map_err(|e| OracleError::Shape(e.to_string()))
}

/// One generalized (partial) stable model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsmSolution {
    /// The abduced set over the shadow framework's abducibles.
    pub context: BTreeSet<ObjectiveLiteral>,
    /// The fixpoint interpretation over `P ∪ P_B ∪ I`.
    pub fixpoint: Interpretation,
    /// `WFS` of the shadow framework under the context, restricted to the
    /// atoms of the user program.
    pub model: Interpretation,
}

impl fmt::Display for GsmSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx: Vec<String> = self.context.iter().map(|o| o.to_string()).collect();
        write!(f, "{{{}}} -> {}", ctx.join(", "), self.model)
    }
}

/// Value of an objective literal inside a candidate interpretation.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Undefined,
    Both,
}

const TRI_ALL: [Tri; 4] = [Tri::True, Tri::False, Tri::Undefined, Tri::Both];

/// Enumerate generalized (partial) stable models of the framework.
///
/// For every consistent scenario `B` over the original abducibles and
/// every fixpoint `J` of the consequence operator on `P ∪ P_B ∪ I` with
/// `bottom` not true, the shadow context is `B` plus `abd_O` for each
/// shadowed `O` undefined in `J` and `-abd_O` for each shadowed `O`
/// false in `J`. Contexts whose shadow-framework model makes `bottom`
/// true are rejected; in total mode `J` must also be total and
/// consistent. `query`, when given, filters on truth in `J`.
pub fn gsm_solve(
    fw: &AbductiveFramework,
    query: Option<&Literal>,
    mode: GsmMode,
    max_abducibles: usize,
) -> Result<Vec<GsmSolution>, OracleError> {
    if fw.abducibles.len() > max_abducibles {
        return Err(OracleError::TooManyAbducibles {
            count: fw.abducibles.len(),
            limit: max_abducibles,
        });
    }
    let shadow_fw = shadow_framework(fw, mode)?;
    let combined = fw.combined_program();
    let shadowed = shadowed_literals(&combined);
    let user_atoms: BTreeSet<ObjectiveLiteral> = fw.program.objective_literals();

    // scenarios over the original abducibles: one 3-way choice per pair
    let mut pairs: Vec<(ObjectiveLiteral, ObjectiveLiteral)> = Vec::new();
    let mut seen = BTreeSet::new();
    for a in &fw.abducibles {
        if seen.insert(a.symbol()) {
            let atom = ObjectiveLiteral::atom(a.symbol());
            pairs.push((atom, atom.conj_e().expect("abducibles are conjugable")));
        }
    }

    let mut solutions: Vec<GsmSolution> = Vec::new();
    let mut scenario_choice = vec![0usize; pairs.len()];
    loop {
        let mut abduced = BTreeSet::new();
        for (k, c) in scenario_choice.iter().enumerate() {
            match c {
                0 => {}
                1 => {
                    abduced.insert(pairs[k].0);
                }
                _ => {
                    abduced.insert(pairs[k].1);
                }
            }
        }
        let scenario = Scenario::new(fw, abduced.clone()).expect("consistent by construction");
        let extended = scenario.extended_program();
        for fixpoint in enumerate_fixpoints(&extended)? {
            if fixpoint.satisfies(&Literal::positive(ObjectiveLiteral::bottom())) {
                continue;
            }
            if let Some(q) = query {
                if !fixpoint.satisfies(q) {
                    continue;
                }
            }
            if mode == GsmMode::Total && !is_total_consistent(&extended, &fixpoint) {
                continue;
            }
            let mut context = abduced.clone();
            for o in &shadowed {
                let abd = shadow_literal(o);
                let truth = fixpoint.satisfies(&Literal::positive(*o));
                let falsity = fixpoint.satisfies(&Literal::negative(*o));
                if falsity {
                    context.insert(abd.conj_e().expect("shadow atoms are conjugable"));
                } else if !truth {
                    context.insert(abd);
                }
            }
            // validate the context against the shadow framework and read
            // the reported model from its well-founded semantics
            let shadow_scenario = match Scenario::new(&shadow_fw, context.clone()) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let shadow_model = oracle::wfs(&shadow_scenario.extended_program());
            if shadow_model.satisfies(&Literal::positive(ObjectiveLiteral::bottom())) {
                continue;
            }
            let solution = GsmSolution {
                context,
                fixpoint: fixpoint.clone(),
                model: shadow_model.restrict(&user_atoms),
            };
            if !solutions.iter().any(|s| s.context == solution.context) {
                solutions.push(solution);
            }
        }

        let mut k = 0;
        loop {
            if k == pairs.len() {
                break;
            }
            scenario_choice[k] += 1;
            if scenario_choice[k] < 3 {
                break;
            }
            scenario_choice[k] = 0;
            k += 1;
        }
        if k == pairs.len() {
            break;
        }
    }

    solutions.sort_by(|a, b| a.context.cmp(&b.context));
    Ok(solutions)
}

/// Is a body literal one that can never hold in any interpretation?
fn never_holds(l: &Literal) -> bool {
    let o = l.objective();
    if !o.is_truth_constant() {
        return false;
    }
    match (o.symbol().name(), l.is_positive()) {
        ("t", true) | ("f", false) => false,
        _ => true,
    }
}

/// All fixpoints of the consequence operator, by exhaustive assignment of
/// a four-valued truth value to every objective literal. The `Both` value
/// covers paraconsistent fixpoints. Literals without rules are pinned to
/// false and literals whose rules can never fire (scenario rules `A :- u`)
/// to false-or-undefined; that keeps the search space proportional to the
/// genuinely ruled part of the program.
fn enumerate_fixpoints(p: &Program) -> Result<Vec<Interpretation>, OracleError> {
    const SPACE_CAP: f64 = 2_000_000.0;
    let universe: Vec<ObjectiveLiteral> = p.objective_literals().into_iter().collect();
    let domains: Vec<&[Tri]> = universe
        .iter()
        .map(|o| {
            let head = Literal::positive(*o);
            let mut has_rule = false;
            let mut can_fire = false;
            for rule in p.rules_for(&head) {
                has_rule = true;
                if !rule.body.iter().any(never_holds) {
                    can_fire = true;
                }
            }
            if !has_rule {
                &[Tri::False][..]
            } else if can_fire {
                &TRI_ALL[..]
            } else {
                &[Tri::False, Tri::Undefined][..]
            }
        })
        .collect();
    let search_space: f64 = domains.iter().map(|d| d.len() as f64).product();
    if search_space > SPACE_CAP {
        return Err(OracleError::Shape(format!(
            "fixpoint enumeration over {search_space} candidate interpretations is too large"
        )));
    }

    let mut out = Vec::new();
    let mut assignment = vec![0usize; universe.len()];
    loop {
        let mut candidate = Interpretation::new();
        for ((o, domain), a) in universe.iter().zip(&domains).zip(assignment.iter()) {
            match domain[*a] {
                Tri::True => {
                    candidate.insert_true(*o);
                }
                Tri::False => {
                    candidate.insert_false(*o);
                }
                Tri::Undefined => {}
                Tri::Both => {
                    candidate.insert_true(*o);
                    candidate.insert_false(*o);
                }
            }
        }
        if oracle::is_partial_stable(p, &candidate) {
            out.push(candidate);
        }

        let mut k = 0;
        loop {
            if k == assignment.len() {
                break;
            }
            assignment[k] += 1;
            if assignment[k] < domains[k].len() {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
        if k == assignment.len() {
            break;
        }
    }
    Ok(out)
}

/// Total on every objective literal and consistent: the fixpoints that
/// are answer sets.
fn is_total_consistent(p: &Program, i: &Interpretation) -> bool {
    if !i.is_consistent() {
        return false;
    }
    p.objective_literals().iter().all(|o| {
        o.is_bottom()
            || i.satisfies(&Literal::positive(*o))
            || i.satisfies(&Literal::negative(*o))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_framework, serialize_rule};

    fn choice_framework() -> AbductiveFramework {
        parse_framework("p :- not q.\nq :- not p.\n").unwrap()
    }

    #[test]
    fn shadow_rewrites_negative_body_literals() {
        let fw = choice_framework();
        let shadowed = shadow(&fw.program);
        let lines: Vec<String> = shadowed.iter().map(serialize_rule).collect();
        assert_eq!(lines, ["p :- not abd_q.", "q :- not abd_p."]);

        // rules without negative body literals are copied unchanged
        let fw = parse_framework("c :- not b.\nb :- a.\n").unwrap();
        let shadowed = shadow(&fw.program);
        let lines: Vec<String> = shadowed.iter().map(serialize_rule).collect();
        assert_eq!(lines, ["c :- not abd_b.", "b :- a."]);
    }

    #[test]
    fn shadow_constraints_come_in_pairs() {
        let fw = choice_framework();
        let cons = shadow_constraints(&fw.program);
        let lines: Vec<String> = cons.iter().map(serialize_rule).collect();
        assert_eq!(
            lines,
            [
                ":- p, not abd_p.",
                ":- not p, abd_p.",
                ":- q, not abd_q.",
                ":- not q, abd_q.",
            ]
        );
        assert!(shadow_constraints(&parse_framework("b :- a.\n").unwrap().program).is_empty());
    }

    #[test]
    fn consistency_constraints_include_both_schemata() {
        let fw = parse_framework("p.\n").unwrap();
        let cons = consistency_constraints(&fw.program);
        let lines: Vec<String> = cons.iter().map(serialize_rule).collect();
        assert!(lines.contains(&":- p, not p.".to_owned()));
        assert!(lines.contains(&":- p, -p.".to_owned()));
        assert!(lines.contains(&":- -p, not -p.".to_owned()));
        assert!(consistency_constraints(&Program::new()).is_empty());
    }

    #[test]
    fn totality_rules_come_in_triples() {
        let fw = parse_framework("p.\n").unwrap();
        let rules = totality_rules(&fw.program);
        // three rules for p and three for -p
        assert_eq!(rules.len(), 6);
        let lines: Vec<String> = rules.iter().map(serialize_rule).collect();
        assert!(lines.contains(&":- not defined_p.".to_owned()));
        assert!(lines.contains(&"defined_p :- p.".to_owned()));
        assert!(lines.contains(&"defined_p :- not p.".to_owned()));
        assert!(lines.contains(&":- not defined_neg_p.".to_owned()));
        assert!(totality_rules(&Program::new()).is_empty());
    }

    #[test]
    fn partial_mode_finds_the_three_models_of_the_choice_program() {
        let fw = choice_framework();
        let sols = gsm_solve(&fw, None, GsmMode::Partial, 20).unwrap();
        let contexts: Vec<String> = sols
            .iter()
            .map(|s| {
                s.context.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")
            })
            .collect();
        assert_eq!(contexts, ["abd_p,abd_q", "-abd_p", "-abd_q"]);

        let models: BTreeSet<String> = sols
            .iter()
            .map(|s| {
                s.model
                    .true_set()
                    .iter()
                    .map(|o| o.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        assert_eq!(models, BTreeSet::from(["".to_owned(), "p".to_owned(), "q".to_owned()]));

        // pairing: assuming q false yields p, and vice versa
        for s in &sols {
            if s.context.contains(&ObjectiveLiteral::from_name("-abd_q")) {
                assert!(s.model.satisfies(&Literal::from_name("p")));
            }
            if s.context.contains(&ObjectiveLiteral::from_name("-abd_p")) {
                assert!(s.model.satisfies(&Literal::from_name("q")));
            }
        }
    }

    #[test]
    fn total_mode_drops_the_undefined_model() {
        let fw = choice_framework();
        let sols = gsm_solve(&fw, None, GsmMode::Total, 20).unwrap();
        let contexts: Vec<String> = sols
            .iter()
            .map(|s| {
                s.context.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")
            })
            .collect();
        assert_eq!(contexts, ["-abd_p", "-abd_q"]);
    }

    #[test]
    fn stratified_program_has_a_unique_stable_model() {
        let fw = parse_framework("a :- not b.\n").unwrap();
        let sols = gsm_solve(&fw, None, GsmMode::Total, 20).unwrap();
        assert_eq!(sols.len(), 1);
        let model = &sols[0].model;
        assert!(model.satisfies(&Literal::from_name("a")));
        assert!(model.satisfies(&Literal::from_name("not b")));
    }

    #[test]
    fn every_solution_fixpoint_is_partial_stable() {
        let fw = choice_framework();
        for sol in gsm_solve(&fw, None, GsmMode::Partial, 20).unwrap() {
            assert!(oracle::is_partial_stable(&fw.program, &sol.fixpoint));
        }
    }

    #[test]
    fn query_filters_solutions() {
        let fw = choice_framework();
        let q = Literal::from_name("p");
        let sols = gsm_solve(&fw, Some(&q), GsmMode::Partial, 20).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].context.contains(&ObjectiveLiteral::from_name("-abd_q")));
    }

    #[test]
    fn shadow_name_collisions_are_rejected() {
        let fw = parse_framework("abd_q.\np :- not q.\n").unwrap();
        assert!(reduction(&fw).is_err());
        let fw = parse_framework("defined_q :- not q.\n").unwrap();
        assert!(reduction(&fw).is_err());
    }
}
