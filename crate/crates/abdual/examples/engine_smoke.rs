// Scratch stress harness used during development; superseded by the
// integration suites.

use std::collections::BTreeSet;

use abdual::engine::{self, EvalOptions};
use abdual::framework::AbductiveFramework;
use abdual::literal::{Literal, ObjectiveLiteral};
use abdual::oracle;
use abdual::program::{Program, Rule};

struct Rng(u64);
impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

fn random_framework(
    rng: &mut Rng,
    atoms: &[&str],
    pairs: usize,
    constraints: usize,
) -> AbductiveFramework {
    let mut abducibles = BTreeSet::new();
    let mut head_pool: Vec<&str> = atoms.to_vec();
    for _ in 0..pairs {
        if head_pool.len() <= 1 {
            break;
        }
        let k = rng.below(head_pool.len());
        let a = head_pool.remove(k);
        abducibles.insert(ObjectiveLiteral::from_name(a));
        abducibles.insert(ObjectiveLiteral::from_name(&format!("-{a}")));
    }
    let mut program = Program::new();
    let n_rules = rng.below(8) + 1;
    for _ in 0..n_rules {
        let head_atom = head_pool[rng.below(head_pool.len())];
        let head = if rng.below(5) == 0 {
            Literal::from_name(&format!("-{head_atom}"))
        } else {
            Literal::from_name(head_atom)
        };
        let mut body = Vec::new();
        for _ in 0..rng.below(4) {
            let atom = atoms[rng.below(atoms.len())];
            let neg = rng.below(5) == 0;
            let default = rng.below(2) == 0;
            let name = if neg { format!("-{atom}") } else { atom.to_string() };
            let o = ObjectiveLiteral::from_name(&name);
            body.push(if default { Literal::negative(o) } else { Literal::positive(o) });
        }
        program.push(Rule::new(head, body));
    }
    let mut integrity = Program::new();
    for _ in 0..constraints {
        if rng.below(2) == 0 {
            continue;
        }
        let mut body = Vec::new();
        for _ in 0..(rng.below(2) + 1) {
            let atom = atoms[rng.below(atoms.len())];
            let default = rng.below(2) == 0;
            let o = ObjectiveLiteral::from_name(atom);
            body.push(if default { Literal::negative(o) } else { Literal::positive(o) });
        }
        integrity.push(Rule::new(Literal::from_name("bottom"), body));
    }
    AbductiveFramework::new(program, abducibles, integrity).unwrap()
}

fn main() {
    let atoms = ["a", "b", "c", "d", "e", "g"];
    let mut rng = Rng(12345);
    let mut evals = 0u64;
    let mut failures = 0u64;
    let start = std::time::Instant::now();
    for case in 0..300 {
        let fw = random_framework(&mut rng, &atoms, 3, 2);
        let queries: Vec<Literal> = fw.program.literals().into_iter().collect();
        for q in &queries {
            evals += 1;
            let eval = match engine::run(&fw, Some(q), EvalOptions::default()) {
                Ok(e) => e,
                Err(err) => {
                    failures += 1;
                    println!("case {case} query {q}: ENGINE ERROR {err}");
                    println!("{:?}", fw);
                    continue;
                }
            };
            let answers = eval.query_answers();
            let sols = oracle::brute_force_solutions(&fw, q, 20).unwrap();
            for a in &answers {
                if !sols.iter().any(|s| a.is_subset(&s.abduced)) {
                    failures += 1;
                    println!("case {case} query {q}: answer {a:?} extends no solution");
                    println!("{:?}", fw);
                }
            }
            for s in sols.iter().filter(|s| s.minimal) {
                if !answers.contains(&s.abduced) {
                    failures += 1;
                    println!(
                        "case {case} query {q}: minimal solution {:?} missing; answers {answers:?}",
                        s.abduced
                    );
                    println!("{:?}", fw);
                }
            }
            if failures > 4 {
                println!("stopping early after {failures} failures, {evals} evals");
                return;
            }
        }
    }
    println!(
        "done: {evals} evaluations, {failures} failures, {:?}",
        start.elapsed()
    );
}
