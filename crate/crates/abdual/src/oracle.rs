//! Reference semantics by direct fixpoint computation.
//!
//! Everything here favors obvious correctness over speed: all fixpoints
//! are computed by naive iteration to stabilization, which terminates on
//! finite ground programs. The module provides
//!
//! * the inner operators `Tx`/`Fx` and the outer operator `ω_ext`, whose
//!   least fixpoint over the information ordering is the (possibly
//!   paraconsistent) well-founded model;
//! * the analogous operators `Td`/`Fd`/`ω_d` over dual programs, where
//!   false literals are *derived* via rules for `not O` and the greatest
//!   fixpoint of `Fd` makes co-unfounded sets true;
//! * brute-force enumeration of abductive solutions;
//! * decision procedures for unfounded and co-unfounded sets.
//!
//! A rule body holds when each literal is true; `u` in a body can never
//! hold and never yields a witness of falsity, which is exactly what makes
//! scenario rules `A :- u` leave `A` undefined.

use std::collections::BTreeSet;
use std::fmt;

use crate::dual::{dual_fold, DualProgram};
use crate::error::OracleError;
use crate::framework::{AbductiveFramework, Scenario};
use crate::interp::Interpretation;
use crate::literal::{Literal, ObjectiveLiteral};
use crate::program::Program;

/// Default cap on exhaustive solution enumeration.
pub const DEFAULT_MAX_ABDUCIBLES: usize = 20;

/// Is `lit` true under `i`, or contributed by the accumulator `acc` of
/// positive objective literals (used inside the lfp of `Tx`)?
fn holds(lit: &Literal, i: &Interpretation, acc: &BTreeSet<ObjectiveLiteral>) -> bool {
    if i.satisfies(lit) {
        return true;
    }
    lit.is_positive() && !lit.objective().is_truth_constant() && acc.contains(&lit.objective())
}

/// Is `lit` witnessed false: its default conjugate holds in `i`, or it is
/// a positive literal in the falsity accumulator `acc` (the gfp of `Fx`)?
fn witnessed(lit: &Literal, i: &Interpretation, acc: &BTreeSet<ObjectiveLiteral>) -> bool {
    if i.satisfies(&lit.conj_d()) {
        return true;
    }
    lit.is_positive() && !lit.objective().is_truth_constant() && acc.contains(&lit.objective())
}

/// One application of `Tx`: heads of rules whose body literals all hold in
/// `i` or in `acc`.
pub fn tx_step(
    p: &Program,
    i: &Interpretation,
    acc: &BTreeSet<ObjectiveLiteral>,
) -> BTreeSet<ObjectiveLiteral> {
    let mut out = BTreeSet::new();
    for rule in p.iter() {
        if !rule.head.is_positive() {
            continue;
        }
        if rule.body.iter().all(|l| holds(l, i, acc)) {
            out.insert(rule.head.objective());
        }
    }
    out
}

/// One application of `Fx` over the objective literals of `p`: an
/// objective literal is regenerated when its explicit conjugate is true in
/// `i`, or when every one of its rules has a witnessed-false body literal.
/// Literals without rules qualify vacuously; facts never do.
pub fn fx_step(
    p: &Program,
    i: &Interpretation,
    acc: &BTreeSet<ObjectiveLiteral>,
) -> BTreeSet<ObjectiveLiteral> {
    let universe = p.objective_literals();
    let mut out = BTreeSet::new();
    for o in universe {
        let coherence = match o.conj_e() {
            Ok(conj) => i.true_set().contains(&conj),
            Err(_) => false,
        };
        let refuted = p
            .rules_for(&Literal::positive(o))
            .all(|rule| rule.body.iter().any(|l| witnessed(l, i, acc)));
        if coherence || refuted {
            out.insert(o);
        }
    }
    out
}

fn lfp_tx(p: &Program, i: &Interpretation) -> BTreeSet<ObjectiveLiteral> {
    let mut acc = BTreeSet::new();
    loop {
        let next = tx_step(p, i, &acc);
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

fn gfp_fx(p: &Program, i: &Interpretation) -> BTreeSet<ObjectiveLiteral> {
    let mut acc = p.objective_literals();
    loop {
        let next = fx_step(p, i, &acc);
        if next == acc {
            return acc;
        }
        acc = next;
    }
}

/// The inner double fixpoint: new truths from the lfp of `Tx`, new
/// falsities from the gfp of `Fx` seeded with all objective literals.
pub fn omega_ext(p: &Program, i: &Interpretation) -> Interpretation {
    Interpretation::from_sets(lfp_tx(p, i), gfp_fx(p, i))
}

/// Iteration snapshots of an outer fixpoint computation.
#[derive(Clone, Debug, Default)]
pub struct FixpointTrace {
    pub snapshots: Vec<Interpretation>,
}

impl FixpointTrace {
    pub fn outer_iterations(&self) -> usize {
        self.snapshots.len()
    }

    /// The outer sequence must climb the information ordering.
    pub fn is_monotone(&self) -> bool {
        self.snapshots.windows(2).all(|w| w[0].info_leq(&w[1]))
    }
}

impl fmt::Display for FixpointTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, snap) in self.snapshots.iter().enumerate() {
            writeln!(f, "step {n}: {snap}")?;
        }
        Ok(())
    }
}

/// The well-founded model: least fixpoint of `ω_ext` over the information
/// ordering, starting from the empty interpretation. May be paraconsistent.
pub fn wfs(p: &Program) -> Interpretation {
    wfs_traced(p).0
}

pub fn wfs_traced(p: &Program) -> (Interpretation, FixpointTrace) {
    let mut trace = FixpointTrace::default();
    let mut i = Interpretation::new();
    loop {
        let next = omega_ext(p, &i);
        trace.snapshots.push(next.clone());
        if next == i {
            return (i, trace);
        }
        i = next;
    }
}

/// Is `i` a fixpoint of `ω_ext`?
pub fn is_partial_stable(p: &Program, i: &Interpretation) -> bool {
    omega_ext(p, i) == *i
}

/// One application of `Td` over a dual program: regenerates objective
/// heads only.
pub fn td_step(
    dp: &DualProgram,
    i: &Interpretation,
    acc: &BTreeSet<ObjectiveLiteral>,
) -> BTreeSet<ObjectiveLiteral> {
    tx_step(dp.program(), i, acc)
}

/// One application of `Fd`: regenerates default-negated heads of dual
/// rules whose body literals are each true in `i` or members of the
/// negative accumulator.
pub fn fd_step(
    dp: &DualProgram,
    i: &Interpretation,
    acc: &BTreeSet<Literal>,
) -> BTreeSet<Literal> {
    let mut out = BTreeSet::new();
    for rule in dp.program().iter() {
        if rule.head.is_positive() {
            continue;
        }
        let fires = rule
            .body
            .iter()
            .all(|l| i.satisfies(l) || (l.is_negative() && acc.contains(l)));
        if fires {
            out.insert(rule.head);
        }
    }
    out
}

/// All negative literals over the dual program's literal closure: the gfp
/// seed for `Fd`.
pub fn negative_literal_seed(dp: &DualProgram) -> BTreeSet<Literal> {
    dp.program()
        .literals()
        .into_iter()
        .filter(|l| l.is_negative())
        .collect()
}

/// The inner double fixpoint over a dual program.
pub fn omega_d(dp: &DualProgram, i: &Interpretation) -> Interpretation {
    let mut pos = BTreeSet::new();
    loop {
        let next = td_step(dp, i, &pos);
        if next == pos {
            break;
        }
        pos = next;
    }
    let mut neg = negative_literal_seed(dp);
    loop {
        let next = fd_step(dp, i, &neg);
        if next == neg {
            break;
        }
        neg = next;
    }
    Interpretation::from_sets(pos, neg.into_iter().map(|l| l.objective()).collect())
}

/// Least fixpoint of `ω_d` from the empty interpretation.
pub fn dual_wfs(dp: &DualProgram) -> Interpretation {
    let mut i = Interpretation::new();
    loop {
        let next = omega_d(dp, &i);
        if next == i {
            return i;
        }
        i = next;
    }
}

/// Does membership in `wfs(p)` agree with membership in the least fixpoint
/// of `ω_d` over the folded dual, for every literal of `p`?
pub fn wfs_dual_equiv_check(p: &Program) -> bool {
    let direct = wfs(p);
    let dual = dual_wfs(&dual_fold(p, &BTreeSet::new()));
    p.literals()
        .iter()
        .all(|l| direct.satisfies(l) == dual.satisfies(l))
}

/// A brute-force abductive solution: the abduced set and its model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteSolution {
    pub abduced: BTreeSet<ObjectiveLiteral>,
    pub model: Interpretation,
    pub minimal: bool,
}

/// All consistent `B ⊆ A` for which `not bottom` holds in
/// `WFS(P ∪ P_B ∪ I)` and the query is true there, with the ⊆-minimal
/// ones flagged. Exhaustive over scenarios, hence the guard.
pub fn brute_force_solutions(
    fw: &AbductiveFramework,
    query: &Literal,
    max_abducibles: usize,
) -> Result<Vec<BruteSolution>, OracleError> {
    if fw.abducibles.len() > max_abducibles {
        return Err(OracleError::TooManyAbducibles {
            count: fw.abducibles.len(),
            limit: max_abducibles,
        });
    }

    // one entry per conjugate pair, keyed by the positive form
    let mut pairs: Vec<(ObjectiveLiteral, ObjectiveLiteral)> = Vec::new();
    let mut seen = BTreeSet::new();
    for a in &fw.abducibles {
        if seen.insert(a.symbol()) {
            let atom = ObjectiveLiteral::atom(a.symbol());
            pairs.push((atom, atom.conj_e().expect("abducibles are conjugable")));
        }
    }

    let mut solutions = Vec::new();
    let mut stack: Vec<usize> = vec![0; pairs.len()];
    loop {
        let mut abduced = BTreeSet::new();
        for (k, choice) in stack.iter().enumerate() {
            match choice {
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
        let model = wfs(&extended);
        // without integrity rules, bottom never occurs and is vacuously false
        let bottom_false = !extended.objective_literals().contains(&ObjectiveLiteral::bottom())
            || model.satisfies(&Literal::not_bottom());
        if bottom_false && model.satisfies(query) {
            solutions.push(BruteSolution { abduced, model, minimal: false });
        }

        // advance the 3-way odometer over pairs
        let mut k = 0;
        loop {
            if k == pairs.len() {
                break;
            }
            stack[k] += 1;
            if stack[k] < 3 {
                break;
            }
            stack[k] = 0;
            k += 1;
        }
        if k == pairs.len() {
            break;
        }
    }

    solutions.sort_by(|a, b| a.abduced.cmp(&b.abduced));
    let sets: Vec<BTreeSet<ObjectiveLiteral>> =
        solutions.iter().map(|s| s.abduced.clone()).collect();
    for sol in &mut solutions {
        sol.minimal = !sets.iter().any(|b| b != &sol.abduced && b.is_subset(&sol.abduced));
    }
    Ok(solutions)
}

/// Is `s` an unfounded set of `p` with respect to `i`? Every rule for
/// every member needs a witness of unusability: a body literal false in
/// `i`, or a positive body literal inside `s`.
pub fn is_unfounded_set(
    p: &Program,
    i: &Interpretation,
    s: &BTreeSet<ObjectiveLiteral>,
) -> bool {
    s.iter().all(|h| {
        p.rules_for(&Literal::positive(*h)).all(|rule| {
            rule.body.iter().any(|l| {
                i.satisfies(&l.conj_d()) || (l.is_positive() && s.contains(&l.objective()))
            })
        })
    })
}

/// Is `s` a co-unfounded set of negative literals of the dual program with
/// respect to `i`? Every member needs some dual rule whose body literals
/// are each true in `i` or inside `s`.
pub fn is_co_unfounded_literal_set(
    dp: &DualProgram,
    i: &Interpretation,
    s: &BTreeSet<Literal>,
) -> Result<bool, OracleError> {
    if let Some(bad) = s.iter().find(|l| l.is_positive()) {
        return Err(OracleError::Shape(format!(
            "co-unfounded sets contain negative literals only, found `{bad}`"
        )));
    }
    Ok(s.iter().all(|h| {
        dp.program()
            .rules_for(h)
            .any(|rule| rule.body.iter().all(|l| i.satisfies(l) || s.contains(l)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::dual_unfold;
    use crate::parser::{parse_framework, parse_query};

    fn program(text: &str) -> Program {
        parse_framework(text).unwrap().program
    }

    fn interp(names: &[&str]) -> Interpretation {
        Interpretation::from_names(names.iter().copied())
    }

    fn olits(names: &[&str]) -> BTreeSet<ObjectiveLiteral> {
        names.iter().map(|n| ObjectiveLiteral::from_name(n)).collect()
    }

    #[test]
    fn tx_derives_facts_and_rule_heads() {
        let p = program("a.\n");
        assert_eq!(tx_step(&p, &Interpretation::new(), &BTreeSet::new()), olits(&["a"]));

        let p = program("b :- a.\n");
        let acc = olits(&["a"]);
        assert_eq!(tx_step(&p, &Interpretation::new(), &acc), olits(&["b"]));
    }

    #[test]
    fn tx_on_three_rule_program() {
        let p = program("p :- not q.\np :- not r.\nq :- not p.\n");
        let i = interp(&["not q", "not r"]);
        assert_eq!(tx_step(&p, &i, &BTreeSet::new()), olits(&["p"]));
    }

    #[test]
    fn fx_gfp_falsifies_positive_chains() {
        let p = program("p :- q.\n");
        // everything is false: q has no rules, hence p's rule is witnessed
        assert_eq!(gfp_fx(&p, &Interpretation::new()), olits(&["p", "q", "-p", "-q"]));
    }

    #[test]
    fn fx_uses_coherence() {
        let p = program("-b.\n");
        let i = interp(&["-b"]);
        let out = fx_step(&p, &i, &BTreeSet::new());
        assert!(out.contains(&ObjectiveLiteral::from_name("b")));
        // the fact itself is never refuted
        assert!(!out.contains(&ObjectiveLiteral::from_name("-b")));
    }

    #[test]
    fn fx_leaves_negative_loops_undefined() {
        let p = program("a :- not a.\n");
        let acc = olits(&["a", "-a"]);
        let out = fx_step(&p, &Interpretation::new(), &acc);
        // `not a` is not an objective literal, so the clause has no witness
        assert_eq!(out, olits(&["-a"]));
    }

    #[test]
    fn omega_ext_on_negative_loop() {
        let p = program("a :- not a.\n");
        let m = omega_ext(&p, &Interpretation::new());
        assert_eq!(m.to_string(), "{not -a}");
    }

    #[test]
    fn omega_ext_fixpoint_uses_coherency() {
        let p = program("c :- not b.\nb :- a.\n-b.\na :- not a.\n");
        let m = wfs(&p);
        assert_eq!(m, interp(&["-b", "c", "not -a", "not b", "not -c"]));
    }

    #[test]
    fn empty_program_has_empty_model() {
        assert_eq!(omega_ext(&Program::new(), &Interpretation::new()), Interpretation::new());
    }

    #[test]
    fn wfs_of_the_worked_programs() {
        let p1 = program("p :- not q.\np :- not r.\nq :- not p.\n");
        let m = wfs(&p1);
        assert_eq!(m.restrict(&olits(&["p", "q", "r"])), interp(&["p", "not q", "not r"]));

        let p2 = program(
            "s :- not p, not q, not r.\np :- not s, not r, q.\nq :- not p, r.\nr :- not q, p.\n",
        );
        let m = wfs(&p2);
        assert_eq!(
            m.restrict(&olits(&["s", "p", "q", "r"])),
            interp(&["s", "not p", "not q", "not r"])
        );
    }

    #[test]
    fn wfs_can_be_paraconsistent() {
        let p = program("p.\n-p.\n");
        let m = wfs(&p);
        for lit in ["p", "-p", "not p", "not -p"] {
            assert!(m.satisfies(&Literal::from_name(lit)), "missing {lit}");
        }
    }

    #[test]
    fn partial_stability() {
        let p1 = program("p :- not q.\np :- not r.\nq :- not p.\n");
        assert!(is_partial_stable(&p1, &wfs(&p1)));
        assert!(!is_partial_stable(&p1, &Interpretation::new()));

        let choice = program("p :- not q.\nq :- not p.\n");
        let m = interp(&["p", "not q", "not -p", "not -q"]);
        assert!(is_partial_stable(&choice, &m));
    }

    #[test]
    fn fd_ignores_unsupported_negatives() {
        let p = program("a :- not a.\n");
        let dp = dual_unfold(&p, &BTreeSet::new());
        let seed = negative_literal_seed(&dp);
        let out = fd_step(&dp, &Interpretation::new(), &seed);
        // not(a)'s only rule is `not a :- a`; `a` holds in neither place
        assert!(!out.contains(&Literal::from_name("not a")));
        // the ruleless conjugate is regenerated by its fact
        assert!(out.contains(&Literal::from_name("not -a")));
    }

    #[test]
    fn fd_over_empty_dual_is_empty() {
        let dp = dual_unfold(&Program::new(), &BTreeSet::new());
        assert!(fd_step(&dp, &Interpretation::new(), &BTreeSet::new()).is_empty());
        assert_eq!(dual_wfs(&dp), Interpretation::new());
    }

    #[test]
    fn omega_d_mirrors_omega_ext_on_negative_loop() {
        let p = program("a :- not a.\n");
        let dp = dual_unfold(&p, &BTreeSet::new());
        let m = dual_wfs(&dp);
        assert!(!m.satisfies(&Literal::from_name("a")));
        assert!(!m.satisfies(&Literal::from_name("not a")));
        assert!(m.satisfies(&Literal::from_name("not -a")));
    }

    #[test]
    fn dual_gfp_realizes_co_unfounded_sets() {
        let fw = parse_framework(
            "s :- not p, not q, not r.\np :- not s, not r, q.\nq :- not p, r.\nr :- not q, p.\n",
        )
        .unwrap();
        let attached =
            crate::dual::attach_query(&fw, &parse_query("s").unwrap()).unwrap();
        let dp = dual_unfold(&attached, &BTreeSet::new());
        let m = dual_wfs(&dp);
        for lit in ["not p", "not q", "not r", "s", "query"] {
            assert!(m.satisfies(&Literal::from_name(lit)), "missing {lit}");
        }
    }

    #[test]
    fn dual_equivalence_on_worked_programs() {
        for text in [
            "p :- not q.\np :- not r.\nq :- not p.\n",
            "s :- not p, not q, not r.\np :- not s, not r, q.\nq :- not p, r.\nr :- not q, p.\n",
            "c :- not b.\nb :- a.\n-b.\na :- not a.\n",
            "p.\n-p.\n",
        ] {
            assert!(wfs_dual_equiv_check(&program(text)), "disagreement on:\n{text}");
        }
    }

    #[test]
    fn brute_force_on_frameworks_without_abducibles() {
        let fw = parse_framework("p :- not q.\np :- not r.\nq :- not p.\n").unwrap();
        let sols = brute_force_solutions(&fw, &parse_query("q").unwrap(), 20).unwrap();
        assert!(sols.is_empty());

        let fw = parse_framework(
            "s :- not p, not q, not r.\np :- not s, not r, q.\nq :- not p, r.\nr :- not q, p.\n",
        )
        .unwrap();
        let sols = brute_force_solutions(&fw, &parse_query("s").unwrap(), 20).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].abduced.is_empty());
        assert!(sols[0].minimal);
    }

    #[test]
    fn brute_force_with_constraints() {
        let fw = parse_framework(
            "p :- not q*.\nq :- not p*.\nabducible p*.\nabducible q*.\n\
             p_constr :- p, -p*.\nq_constr :- q, -q*.\n:- p_constr.\n:- q_constr.\n",
        )
        .unwrap();
        let sols = brute_force_solutions(&fw, &parse_query("q").unwrap(), 20).unwrap();
        let minimal: Vec<_> = sols
            .iter()
            .filter(|s| s.minimal)
            .map(|s| {
                s.abduced.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")
            })
            .collect();
        assert_eq!(minimal, ["-p*,q*"]);
    }

    #[test]
    fn brute_force_guard() {
        let mut text = String::new();
        for k in 0..11 {
            text.push_str(&format!("abducible a{k}.\n"));
        }
        let fw = parse_framework(&text).unwrap();
        let err = brute_force_solutions(&fw, &parse_query("a0").unwrap(), 20).unwrap_err();
        assert!(matches!(err, OracleError::TooManyAbducibles { count: 22, limit: 20 }));
    }

    #[test]
    fn unfounded_sets() {
        let p = program("p :- q.\nq :- p.\n");
        let i = Interpretation::new();
        assert!(is_unfounded_set(&p, &i, &olits(&["p", "q"])));
        assert!(is_unfounded_set(&p, &i, &BTreeSet::new()));

        let facts = program("p.\n");
        assert!(!is_unfounded_set(&facts, &i, &olits(&["p"])));
    }

    #[test]
    fn co_unfounded_literal_sets() {
        let p2 = program(
            "s :- not p, not q, not r.\np :- not s, not r, q.\nq :- not p, r.\nr :- not q, p.\n",
        );
        let dp = dual_unfold(&p2, &BTreeSet::new());
        let i = Interpretation::new();
        let s: BTreeSet<Literal> =
            ["not p", "not q", "not r"].iter().map(|n| Literal::from_name(n)).collect();
        assert!(is_co_unfounded_literal_set(&dp, &i, &s).unwrap());
        assert!(is_co_unfounded_literal_set(&dp, &i, &BTreeSet::new()).unwrap());

        let p1 = program("p :- not q.\np :- not r.\nq :- not p.\n");
        let dp1 = dual_unfold(&p1, &BTreeSet::new());
        let only_q: BTreeSet<Literal> = [Literal::from_name("not q")].into_iter().collect();
        assert!(!is_co_unfounded_literal_set(&dp1, &i, &only_q).unwrap());

        let bad: BTreeSet<Literal> = [Literal::from_name("p")].into_iter().collect();
        assert!(is_co_unfounded_literal_set(&dp1, &i, &bad).is_err());
    }
}
