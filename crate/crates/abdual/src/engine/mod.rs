//! The tabled abductive evaluator.
//!
//! An evaluation maintains a forest of trees over the dual program of
//! `P ∪ I ∪ {query :- Q, not bottom}` and applies seven operations until
//! none is applicable:
//!
//! 1. *new subgoal* — a tree for a selected, non-abducible literal;
//! 2. *program clause resolution* — expand a root against a dual clause;
//! 3. *answer clause resolution* — resolve a selected literal against an
//!    answer, unioning abductive contexts (conditional answers propagate
//!    the called literal into the delay list, never their own delays);
//! 4. *delaying* — move a selected negative, non-abducible literal into
//!    the delay list so evaluation can continue past it;
//! 5. *simplification* — discharge a delay literal against an
//!    unconditional answer, or fail the node when the literal's tree is
//!    completely evaluated without consistent answers or the literal is a
//!    non-supported positive;
//! 6. *co-unfounded set removal* — make the answers of a minimal
//!    co-unfounded set unconditional;
//! 7. *abduction* — move a selected abducible into the context.
//!
//! The scheduler is a deterministic saturation loop: operations 1-4 and 7
//! plus the success branch of 5 run to quiescence, completion is detected
//! bottom-up over the strongly connected components of the subgoal
//! dependency graph, then the completion-dependent operations fire and
//! the loop repeats. A seed permutes the application order inside each
//! sweep; evaluations are confluent, so the answer set is seed-invariant.

pub mod forest;

use std::collections::{BTreeMap, BTreeSet};

use crate::dual::{attach_constraint_query, attach_query, dual_fold, dual_unfold, DualProgram};
use crate::error::EngineError;
use crate::framework::AbductiveFramework;
use crate::interp::Interpretation;
use crate::literal::{Literal, ObjectiveLiteral};


pub use forest::{Context, Forest, Node, NodeBody, OpKind, Tree};
use forest::{context_consistent, merge_contexts};

/// Which dual transformation the evaluation runs against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualTransform {
    Fold,
    Unfold,
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    /// Permutes operation order inside sweeps. Answers are seed-invariant.
    pub seed: u64,
    /// Hard cap on applied operations; exceeding it is a defect signal.
    pub step_budget: u64,
    pub transform: DualTransform,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { seed: 0, step_budget: 1_000_000, transform: DualTransform::Fold }
    }
}

/// Applied-operation counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub new_subgoal: u64,
    pub program_clause_resolution: u64,
    pub answer_clause_resolution: u64,
    pub delaying: u64,
    pub simplification: u64,
    pub co_unfounded_removal: u64,
    pub abduction: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.new_subgoal
            + self.program_clause_resolution
            + self.answer_clause_resolution
            + self.delaying
            + self.simplification
            + self.co_unfounded_removal
            + self.abduction
    }

    fn bump(&mut self, op: OpKind) {
        match op {
            OpKind::NewSubgoal => self.new_subgoal += 1,
            OpKind::ProgramClauseResolution => self.program_clause_resolution += 1,
            OpKind::AnswerClauseResolution => self.answer_clause_resolution += 1,
            OpKind::Delaying => self.delaying += 1,
            OpKind::Simplification => self.simplification += 1,
            OpKind::CoUnfoundedRemoval => self.co_unfounded_removal += 1,
            OpKind::Abduction => self.abduction += 1,
            OpKind::Root => {}
        }
    }
}

/// A finished evaluation: the final forest plus bookkeeping.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub forest: Forest,
    pub dual: DualProgram,
    pub counts: OpCounts,
    /// `M × 2 × size(dual)` for the final maximal context size.
    pub operation_bound: u64,
}

impl Evaluation {
    fn query_tree(&self) -> Option<&Tree> {
        self.forest
            .tree_for(&Literal::positive(ObjectiveLiteral::query()))
            .map(|i| &self.forest.trees[i])
    }

    /// Contexts of unconditional query answers, sorted and deduplicated.
    pub fn query_answers(&self) -> Vec<Context> {
        let mut out = BTreeSet::new();
        if let Some(tree) = self.query_tree() {
            for i in tree.answers() {
                if let NodeBody::Regular { context, delays, .. } = &tree.nodes[i].body {
                    if delays.is_empty() {
                        out.insert(context.clone());
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Conditional query answers, for debugging dumps only.
    pub fn conditional_query_answers(&self) -> Vec<(Context, Vec<Literal>)> {
        let mut out = Vec::new();
        if let Some(tree) = self.query_tree() {
            for i in tree.answers() {
                if let NodeBody::Regular { context, delays, .. } = &tree.nodes[i].body {
                    if !delays.is_empty() {
                        out.push((context.clone(), delays.clone()));
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// The ⊆-minimal antichain of the unconditional answer contexts.
    pub fn minimal_answers(&self) -> Vec<Context> {
        let all = self.query_answers();
        all.iter()
            .filter(|c| !all.iter().any(|d| *d != **c && d.is_subset(c)))
            .cloned()
            .collect()
    }

    pub fn induced_interpretation(&self) -> Interpretation {
        self.forest.induced_interpretation()
    }
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

struct Engine {
    forest: Forest,
    dual: DualProgram,
    abducibles: BTreeSet<ObjectiveLiteral>,
    counts: OpCounts,
    step_budget: u64,
    rng: SplitMix64,
    co_unfounded_memo: Option<BTreeMap<Literal, Vec<CoCandidate>>>,
}

/// Reference to an answer usable across mutations (nodes are never
/// removed, only extended with children).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct AnswerRef {
    tree: usize,
    node: usize,
}

impl Engine {
    fn is_abducible_literal(&self, l: &Literal) -> bool {
        l.is_positive() && self.abducibles.contains(&l.objective())
    }

    fn count(&mut self, op: OpKind) -> Result<(), EngineError> {
        self.counts.bump(op);
        if self.counts.total() > self.step_budget {
            return Err(EngineError::BugAssertion(format!(
                "step budget of {} exceeded",
                self.step_budget
            )));
        }
        Ok(())
    }

    fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = (self.rng.next() % (i as u64 + 1)) as usize;
            v.swap(i, j);
        }
    }

    fn answer_alive(&self, r: &AnswerRef) -> bool {
        self.forest.trees[r.tree].answer_alive(r.node)
    }

    fn answer_fields(&self, r: &AnswerRef) -> Option<(&Context, &Vec<Literal>)> {
        match &self.forest.trees[r.tree].nodes[r.node].body {
            NodeBody::Regular { context, delays, goals } if goals.is_empty() => {
                Some((context, delays))
            }
            _ => None,
        }
    }

    // -- operation sweeps --------------------------------------------------

    fn sweep_new_subgoal(&mut self) -> Result<bool, EngineError> {
        let mut cands: Vec<Literal> = Vec::new();
        for tree in &self.forest.trees {
            for (i, node) in tree.nodes.iter().enumerate() {
                if i == 0 {
                    continue;
                }
                if let Some(l) = node.selected() {
                    if !self.is_abducible_literal(l) && self.forest.tree_for(l).is_none() {
                        cands.push(*l);
                    }
                }
            }
        }
        cands.sort();
        cands.dedup();
        self.shuffle(&mut cands);
        let mut fired = false;
        for l in cands {
            if self.forest.tree_for(&l).is_none() {
                self.forest.add_tree(l, OpKind::NewSubgoal);
                self.count(OpKind::NewSubgoal)?;
                fired = true;
            }
        }
        Ok(fired)
    }

    fn sweep_program_clause(&mut self) -> Result<bool, EngineError> {
        let mut cands: Vec<(usize, Vec<Literal>)> = Vec::new();
        for (ti, tree) in self.forest.trees.iter().enumerate() {
            for rule in self.dual.program().rules_for(&tree.root_goal) {
                cands.push((ti, rule.body.clone()));
            }
        }
        self.shuffle(&mut cands);
        let mut fired = false;
        for (ti, goals) in cands {
            let body =
                NodeBody::Regular { context: Context::new(), delays: Vec::new(), goals };
            if self.forest.add_child(ti, 0, body, OpKind::ProgramClauseResolution).is_some() {
                self.count(OpKind::ProgramClauseResolution)?;
                fired = true;
            }
        }
        Ok(fired)
    }

    fn sweep_answer_clause(&mut self) -> Result<bool, EngineError> {
        // (consumer tree, consumer node, answer)
        let mut cands: Vec<(usize, usize, AnswerRef)> = Vec::new();
        for (ti, tree) in self.forest.trees.iter().enumerate() {
            for (ni, node) in tree.nodes.iter().enumerate() {
                if ni == 0 {
                    continue;
                }
                let Some(l) = node.selected() else { continue };
                let Some(at) = self.forest.tree_for(l) else { continue };
                for ai in self.forest.trees[at].answers() {
                    cands.push((ti, ni, AnswerRef { tree: at, node: ai }));
                }
            }
        }
        self.shuffle(&mut cands);
        let mut fired = false;
        for (ti, ni, ans) in cands {
            if !self.answer_alive(&ans) {
                continue; // the answer was retracted meanwhile
            }
            let Some((actx, adelays)) = self.answer_fields(&ans) else { continue };
            let NodeBody::Regular { context, delays, goals } =
                &self.forest.trees[ti].nodes[ni].body
            else {
                continue;
            };
            let called = goals[0];
            let Some(merged) = merge_contexts(context, actx) else { continue };
            let mut new_delays = delays.clone();
            if !adelays.is_empty() {
                new_delays.push(called);
            }
            let body = NodeBody::Regular {
                context: merged,
                delays: new_delays,
                goals: goals[1..].to_vec(),
            };
            if self
                .forest
                .add_child(ti, ni, body, OpKind::AnswerClauseResolution)
                .is_some()
            {
                self.count(OpKind::AnswerClauseResolution)?;
                fired = true;
            }
        }
        Ok(fired)
    }

    fn sweep_abduction(&mut self) -> Result<bool, EngineError> {
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for (ti, tree) in self.forest.trees.iter().enumerate() {
            for (ni, node) in tree.nodes.iter().enumerate() {
                if let Some(l) = node.selected() {
                    if self.is_abducible_literal(l) {
                        cands.push((ti, ni));
                    }
                }
            }
        }
        self.shuffle(&mut cands);
        let mut fired = false;
        for (ti, ni) in cands {
            let NodeBody::Regular { context, delays, goals } =
                &self.forest.trees[ti].nodes[ni].body
            else {
                continue;
            };
            let abducible = goals[0].objective();
            let mut merged = context.clone();
            merged.insert(abducible);
            if !context_consistent(&merged) {
                continue;
            }
            let body = NodeBody::Regular {
                context: merged,
                delays: delays.clone(),
                goals: goals[1..].to_vec(),
            };
            if self.forest.add_child(ti, ni, body, OpKind::Abduction).is_some() {
                self.count(OpKind::Abduction)?;
                fired = true;
            }
        }
        Ok(fired)
    }

    fn sweep_delaying(&mut self) -> Result<bool, EngineError> {
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for (ti, tree) in self.forest.trees.iter().enumerate() {
            for (ni, node) in tree.nodes.iter().enumerate() {
                if ni == 0 || !node.children.is_empty() {
                    continue; // delaying applies to non-root leaves only
                }
                let Some(l) = node.selected() else { continue };
                if !l.is_negative() || self.abducibles.contains(&l.objective()) {
                    continue;
                }
                match self.forest.tree_for(l) {
                    Some(at) if !self.forest.trees[at].has_unconditional_empty_answer() => {
                        cands.push((ti, ni));
                    }
                    _ => {}
                }
            }
        }
        self.shuffle(&mut cands);
        let mut fired = false;
        for (ti, ni) in cands {
            if !self.forest.trees[ti].nodes[ni].children.is_empty() {
                continue;
            }
            let NodeBody::Regular { context, delays, goals } =
                &self.forest.trees[ti].nodes[ni].body
            else {
                continue;
            };
            let selected = goals[0];
            if let Some(at) = self.forest.tree_for(&selected) {
                if self.forest.trees[at].has_unconditional_empty_answer() {
                    continue;
                }
            }
            let mut new_delays = delays.clone();
            new_delays.push(selected);
            let body = NodeBody::Regular {
                context: context.clone(),
                delays: new_delays,
                goals: goals[1..].to_vec(),
            };
            if self.forest.add_child(ti, ni, body, OpKind::Delaying).is_some() {
                self.count(OpKind::Delaying)?;
                fired = true;
            }
        }
        Ok(fired)
    }

    /// Nodes with an empty goal list and delays, excluding failed ones.
    fn delay_nodes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (ti, tree) in self.forest.trees.iter().enumerate() {
            for (ni, node) in tree.nodes.iter().enumerate() {
                let NodeBody::Regular { delays, goals, .. } = &node.body else { continue };
                if !goals.is_empty() || delays.is_empty() {
                    continue;
                }
                let failed =
                    node.children.iter().any(|&c| tree.nodes[c].body.is_failure());
                if !failed {
                    out.push((ti, ni));
                }
            }
        }
        out
    }

    fn sweep_simplify_success(&mut self) -> Result<bool, EngineError> {
        let mut cands: Vec<(usize, usize, Literal, AnswerRef)> = Vec::new();
        for (ti, ni) in self.delay_nodes() {
            let NodeBody::Regular { delays, .. } = &self.forest.trees[ti].nodes[ni].body
            else {
                continue;
            };
            let mut seen = BTreeSet::new();
            for d in delays {
                if !seen.insert(*d) {
                    continue;
                }
                let Some(at) = self.forest.tree_for(d) else { continue };
                for ai in self.forest.trees[at].answers() {
                    if let NodeBody::Regular { delays: ad, .. } =
                        &self.forest.trees[at].nodes[ai].body
                    {
                        if ad.is_empty() {
                            cands.push((ti, ni, *d, AnswerRef { tree: at, node: ai }));
                        }
                    }
                }
            }
        }
        self.shuffle(&mut cands);
        let mut fired = false;
        for (ti, ni, d, ans) in cands {
            if !self.answer_alive(&ans) {
                continue;
            }
            let Some((actx, adelays)) = self.answer_fields(&ans) else { continue };
            if !adelays.is_empty() {
                continue;
            }
            let actx = actx.clone();
            let NodeBody::Regular { context, delays, .. } =
                &self.forest.trees[ti].nodes[ni].body
            else {
                continue;
            };
            let Some(merged) = merge_contexts(context, &actx) else { continue };
            let remaining: Vec<Literal> =
                delays.iter().copied().filter(|l| *l != d).collect();
            let body =
                NodeBody::Regular { context: merged, delays: remaining, goals: Vec::new() };
            if self
                .forest
                .add_descendant_checked(ti, ni, body, OpKind::Simplification)
                .is_some()
            {
                self.count(OpKind::Simplification)?;
                fired = true;
            }
        }
        Ok(fired)
    }

    // -- completion --------------------------------------------------------

    /// Mark completely evaluated trees. Assumes the main sweeps are
    /// saturated, so a tree completes when everything it depends on
    /// (through the selected literals of its nodes) is complete; strongly
    /// connected components complete together, bottom-up.
    fn completion_pass(&mut self) {
        for tree in &mut self.forest.trees {
            if !tree.completed && tree.has_unconditional_empty_answer() {
                tree.completed = true;
            }
        }

        let n = self.forest.trees.len();
        let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let mut blocked = vec![false; n];
        for (ti, tree) in self.forest.trees.iter().enumerate() {
            for node in &tree.nodes {
                let Some(l) = node.selected() else { continue };
                if self.is_abducible_literal(l) {
                    continue; // abducibles resolve by abduction, no tree
                }
                match self.forest.tree_for(l) {
                    Some(at) => {
                        if at != ti {
                            deps[ti].insert(at);
                        }
                    }
                    None => blocked[ti] = true,
                }
            }
        }

        // Tarjan emits each component after everything it reaches.
        let sccs = tarjan(&deps);
        for scc in sccs {
            if scc.iter().any(|&ti| blocked[ti]) {
                continue; // waiting on a missing subgoal tree
            }
            let scc_set: BTreeSet<usize> = scc.iter().copied().collect();
            let external_ok = scc.iter().all(|&ti| {
                deps[ti]
                    .iter()
                    .all(|d| scc_set.contains(d) || self.forest.trees[*d].completed)
            });
            if external_ok {
                for &ti in &scc {
                    self.forest.trees[ti].completed = true;
                }
            }
        }
    }

    fn sweep_simplify_failure(&mut self) -> Result<bool, EngineError> {
        let supported = supported_set(&self.forest);
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for (ti, ni) in self.delay_nodes() {
            let NodeBody::Regular { context, delays, .. } =
                &self.forest.trees[ti].nodes[ni].body
            else {
                continue;
            };
            let mut dead = false;
            for d in delays {
                if let Some(at) = self.forest.tree_for(d) {
                    let dtree = &self.forest.trees[at];
                    if dtree.completed {
                        let consistent_answer = dtree.answers().iter().any(|&ai| {
                            match &dtree.nodes[ai].body {
                                NodeBody::Regular { context: actx, .. } => {
                                    merge_contexts(context, actx).is_some()
                                }
                                NodeBody::Failure => false,
                            }
                        });
                        if !consistent_answer {
                            dead = true;
                            break;
                        }
                    }
                }
                if d.is_positive() && !supported.contains(d) {
                    dead = true;
                    break;
                }
            }
            if dead {
                cands.push((ti, ni));
            }
        }
        self.shuffle(&mut cands);
        let mut fired = false;
        for (ti, ni) in cands {
            if self.forest.trees[ti].nodes[ni]
                .children
                .iter()
                .any(|&c| self.forest.trees[ti].nodes[c].body.is_failure())
            {
                continue;
            }
            if self.forest.add_child(ti, ni, NodeBody::Failure, OpKind::Simplification).is_some()
            {
                self.count(OpKind::Simplification)?;
                fired = true;
            }
        }
        Ok(fired)
    }

    // -- co-unfounded set removal -------------------------------------------

    /// Candidate answers for co-unfounded sets: answers of completed
    /// negative-rooted trees whose nonempty delay lists hold only negative,
    /// completely evaluated literals. Deduplicated by content per literal;
    /// one representative node suffices since children are content-equal.
    fn co_unfounded_candidates(&self) -> BTreeMap<Literal, Vec<CoCandidate>> {
        let mut out: BTreeMap<Literal, Vec<CoCandidate>> = BTreeMap::new();
        let mut seen: BTreeSet<(Literal, Context, BTreeSet<Literal>)> = BTreeSet::new();
        for (ti, tree) in self.forest.trees.iter().enumerate() {
            if !tree.completed || !tree.root_goal.is_negative() {
                continue;
            }
            for ai in tree.answers() {
                let NodeBody::Regular { context, delays, .. } = &tree.nodes[ai].body else {
                    continue;
                };
                if delays.is_empty() {
                    continue;
                }
                let eligible = delays.iter().all(|d| {
                    d.is_negative()
                        && self
                            .forest
                            .tree_for(d)
                            .map(|at| self.forest.trees[at].completed)
                            .unwrap_or(false)
                });
                if !eligible {
                    continue;
                }
                let delay_set: BTreeSet<Literal> = delays.iter().copied().collect();
                if seen.insert((tree.root_goal, context.clone(), delay_set.clone())) {
                    out.entry(tree.root_goal).or_default().push(CoCandidate {
                        answer: AnswerRef { tree: ti, node: ai },
                        context: context.clone(),
                        delays: delay_set,
                    });
                }
            }
        }
        out
    }

    /// Every consistent context over the abducibles, ordered by size then
    /// lexicographically. One three-way choice per conjugate pair.
    fn consistent_contexts(&self) -> Vec<Context> {
        let mut pairs: Vec<(ObjectiveLiteral, ObjectiveLiteral)> = Vec::new();
        let mut seen = BTreeSet::new();
        for a in &self.abducibles {
            if seen.insert(a.symbol()) {
                let atom = ObjectiveLiteral::atom(a.symbol());
                pairs.push((atom, atom.conj_e().expect("abducibles are conjugable")));
            }
        }
        let mut out = Vec::new();
        let mut choice = vec![0usize; pairs.len()];
        loop {
            let mut ctx = Context::new();
            for (k, c) in choice.iter().enumerate() {
                match c {
                    0 => {}
                    1 => {
                        ctx.insert(pairs[k].0);
                    }
                    _ => {
                        ctx.insert(pairs[k].1);
                    }
                }
            }
            out.push(ctx);
            let mut k = 0;
            loop {
                if k == pairs.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < 3 {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == pairs.len() {
                break;
            }
        }
        out.sort_by(|a, b| (a.len(), a.clone()).cmp(&(b.len(), b.clone())));
        out
    }

    fn sweep_co_unfounded(&mut self) -> Result<bool, EngineError> {
        let candidates = self.co_unfounded_candidates();
        if self.co_unfounded_memo.as_ref() == Some(&candidates) {
            // nothing changed since the last detection pass; every set it
            // could find is already deduplicated away
            return Ok(false);
        }
        let mut fired = false;
        for ctx_bound in self.consistent_contexts() {
            // the largest set of candidates within the context bound in
            // which every delay literal keeps a surviving answer
            let mut alive: BTreeMap<Literal, Vec<CoCandidate>> = BTreeMap::new();
            for (lit, cands) in &candidates {
                let within: Vec<CoCandidate> = cands
                    .iter()
                    .filter(|c| c.context.is_subset(&ctx_bound))
                    .cloned()
                    .collect();
                if !within.is_empty() {
                    alive.insert(*lit, within);
                }
            }
            loop {
                let have: BTreeSet<Literal> = alive.keys().copied().collect();
                let mut changed = false;
                for cands in alive.values_mut() {
                    let before = cands.len();
                    cands.retain(|c| c.delays.iter().all(|d| have.contains(d)));
                    changed |= cands.len() != before;
                }
                alive.retain(|_, v| !v.is_empty());
                if !changed {
                    break;
                }
            }
            if alive.is_empty() {
                continue;
            }

            let mut seeds: Vec<(Literal, CoCandidate)> = Vec::new();
            for (lit, cands) in &alive {
                for c in cands {
                    seeds.push((*lit, c.clone()));
                }
            }
            self.shuffle(&mut seeds);
            for (lit, seed) in seeds {
                if !self.answer_alive(&seed.answer) {
                    continue; // retracted by a failure meanwhile
                }
                let Some((members, union)) = closure_containing(&lit, &seed, &alive) else {
                    continue;
                };
                let _ = members;
                let body = NodeBody::Regular {
                    context: union,
                    delays: Vec::new(),
                    goals: Vec::new(),
                };
                if self
                    .forest
                    .add_child(
                        seed.answer.tree,
                        seed.answer.node,
                        body,
                        OpKind::CoUnfoundedRemoval,
                    )
                    .is_some()
                {
                    self.count(OpKind::CoUnfoundedRemoval)?;
                    fired = true;
                }
            }
        }
        self.co_unfounded_memo = Some(candidates);
        Ok(fired)
    }

    // -- driver --------------------------------------------------------------

    fn saturate_main(&mut self) -> Result<(), EngineError> {
        let debug = std::env::var_os("ABDUAL_TRACE").is_some();
        loop {
            let mut fired = false;
            let t0 = std::time::Instant::now();
            fired |= self.sweep_new_subgoal()?;
            let t1 = std::time::Instant::now();
            fired |= self.sweep_program_clause()?;
            let t2 = std::time::Instant::now();
            fired |= self.sweep_answer_clause()?;
            let t3 = std::time::Instant::now();
            fired |= self.sweep_abduction()?;
            let t4 = std::time::Instant::now();
            fired |= self.sweep_delaying()?;
            let t5 = std::time::Instant::now();
            fired |= self.sweep_simplify_success()?;
            let t6 = std::time::Instant::now();
            if debug {
                eprintln!(
                    "  sweep: nodes={} total_ops={} ns={:?} pcr={:?} acr={:?} abd={:?} del={:?} simp={:?}",
                    self.forest.node_count(),
                    self.counts.total(),
                    t1 - t0, t2 - t1, t3 - t2, t4 - t3, t5 - t4, t6 - t5
                );
            }
            if !fired {
                return Ok(());
            }
        }
    }

    fn run_loop(&mut self) -> Result<(), EngineError> {
        let debug = std::env::var_os("ABDUAL_TRACE").is_some();
        loop {
            self.saturate_main()?;
            self.completion_pass();
            if debug {
                eprintln!(
                    "round: nodes={} ops={:?}",
                    self.forest.node_count(),
                    self.counts
                );
            }
            let mut fired = false;
            let t0 = std::time::Instant::now();
            fired |= self.sweep_simplify_failure()?;
            let t1 = std::time::Instant::now();
            fired |= self.sweep_co_unfounded()?;
            let t2 = std::time::Instant::now();
            if debug {
                eprintln!("  post: fail={:?} counf={:?}", t1 - t0, t2 - t1);
            }
            if !fired {
                return Ok(());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct CoCandidate {
    answer: AnswerRef,
    context: Context,
    delays: BTreeSet<Literal>,
}

/// Build a co-unfounded set of answers containing `seed` from the
/// surviving candidates, choosing one answer per delay literal. Answers
/// that delay the seed literal are preferred so the loop-closure condition
/// (the seed's own literal must occur in some member's delay list) holds
/// whenever any choice can make it hold; ties break on the smallest
/// context, then the smallest delay list. All survivors fit a common
/// consistent context bound, so the union is consistent by construction.
fn closure_containing(
    seed_lit: &Literal,
    seed: &CoCandidate,
    alive: &BTreeMap<Literal, Vec<CoCandidate>>,
) -> Option<(BTreeSet<AnswerRef>, Context)> {
    let mut chosen: BTreeMap<Literal, CoCandidate> = BTreeMap::new();
    chosen.insert(*seed_lit, seed.clone());
    let mut pending: Vec<Literal> = seed.delays.iter().copied().collect();
    while let Some(next) = pending.pop() {
        if chosen.contains_key(&next) {
            continue;
        }
        let options = alive.get(&next)?;
        let pick = options
            .iter()
            .min_by_key(|c| {
                (!c.delays.contains(seed_lit), c.context.len(), c.context.clone(), c.delays.clone())
            })
            .expect("alive entries are non-empty");
        pending.extend(pick.delays.iter().copied());
        chosen.insert(next, pick.clone());
    }
    if !chosen.values().any(|c| c.delays.contains(seed_lit)) {
        return None;
    }
    let mut union = Context::new();
    let mut members = BTreeSet::new();
    for c in chosen.values() {
        union.extend(c.context.iter().copied());
        members.insert(c.answer.clone());
    }
    Some((members, union))
}

fn tarjan(deps: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        deps: &'a [BTreeSet<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        counter: usize,
        out: Vec<Vec<usize>>,
    }

    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.counter);
        s.low[v] = s.counter;
        s.counter += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.deps[v].clone() {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(wi) if s.on_stack[w] => {
                    s.low[v] = s.low[v].min(wi);
                }
                _ => {}
            }
        }
        if s.low[v] == s.index[v].unwrap() {
            let mut scc = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                scc.push(w);
                if w == v {
                    break;
                }
            }
            scc.sort_unstable();
            s.out.push(scc);
        }
    }

    let n = deps.len();
    let mut state = State {
        deps,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        counter: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if state.index[v].is_none() {
            visit(&mut state, v);
        }
    }
    state.out
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out.min(u64::MAX as u128) as u64
}

/// The operation-count bound for a final forest: `M × 2 × size(dual)`
/// with `M` the binomial sum over context sizes up to the maximum that
/// actually occurred.
pub fn operation_bound(dual_size: usize, abducible_count: usize, max_context: usize) -> u64 {
    let m: u64 = (0..=max_context as u64)
        .map(|i| binomial(abducible_count as u64, i))
        .sum();
    m.saturating_mul(2).saturating_mul(dual_size as u64)
}

/// Run an evaluation of `query` against the framework. With `query =
/// None` the query rule degenerates to `query :- not bottom`, which
/// enumerates the contexts under which the integrity rules are satisfied.
pub fn run(
    fw: &AbductiveFramework,
    query: Option<&Literal>,
    opts: EvalOptions,
) -> Result<Evaluation, EngineError> {
    fw.validate()?;
    let attached = match query {
        Some(q) => attach_query(fw, q)?,
        None => attach_constraint_query(fw),
    };
    let dual = match opts.transform {
        DualTransform::Fold => dual_fold(&attached, &fw.abducibles),
        DualTransform::Unfold => dual_unfold(&attached, &fw.abducibles),
    };

    let mut engine = Engine {
        forest: Forest::new(),
        dual,
        abducibles: fw.abducibles.clone(),
        counts: OpCounts::default(),
        step_budget: opts.step_budget,
        rng: SplitMix64(opts.seed),
        co_unfounded_memo: None,
    };
    engine
        .forest
        .add_tree(Literal::positive(ObjectiveLiteral::query()), OpKind::Root);
    engine.run_loop()?;

    let bound = operation_bound(
        engine.dual.size(),
        engine.abducibles.len(),
        engine.forest.max_context_size(),
    );
    if engine.counts.total() > bound {
        return Err(EngineError::BugAssertion(format!(
            "{} operations exceed the bound of {bound}",
            engine.counts.total()
        )));
    }

    Ok(Evaluation {
        forest: engine.forest,
        dual: engine.dual,
        counts: engine.counts,
        operation_bound: bound,
    })
}

/// Is the set of root goals completely evaluated in the final forest of
/// `eval`? Checks the declarative conditions directly: each tree either
/// has an unconditional empty-context answer, or all its nodes select
/// literals whose trees lie in the set (or are themselves completely
/// evaluated) with no main operation applicable.
pub fn completely_evaluated(eval: &Evaluation, goals: &BTreeSet<Literal>) -> bool {
    let forest = &eval.forest;
    let trees: Vec<usize> = match goals
        .iter()
        .map(|g| forest.tree_for(g))
        .collect::<Option<Vec<_>>>()
    {
        Some(ts) => ts,
        None => return false,
    };
    let in_set: BTreeSet<usize> = trees.iter().copied().collect();
    trees.iter().all(|&ti| {
        let tree = &forest.trees[ti];
        if tree.has_unconditional_empty_answer() {
            return true;
        }
        tree.nodes.iter().all(|node| match node.selected() {
            None => true,
            Some(l) => {
                if l.is_positive() && eval.dual.abducibles().contains(&l.objective()) {
                    // an abducible blocks only while abduction is applicable
                    return abduction_settled(node, l);
                }
                match forest.tree_for(l) {
                    Some(at) => in_set.contains(&at) || forest.trees[at].completed,
                    None => false,
                }
            }
        })
    })
}

fn abduction_settled(node: &Node, l: &Literal) -> bool {
    let Some(ctx) = node.context() else { return true };
    let mut merged = ctx.clone();
    merged.insert(l.objective());
    !context_consistent(&merged) || !node.children.is_empty()
}

/// Is the positive literal `lit` supported in the final forest?
pub fn supported(eval: &Evaluation, lit: &Literal) -> bool {
    lit.is_positive() && supported_set(&eval.forest).contains(lit)
}

/// Positive root goals that are supported: their tree is incomplete, or
/// some answer has no positive delays, or some answer's positive delays
/// are all supported (least fixpoint of the last clause).
fn supported_set(forest: &Forest) -> BTreeSet<Literal> {
    let mut supported = BTreeSet::new();
    let positive_trees: Vec<&Tree> =
        forest.trees.iter().filter(|t| t.root_goal.is_positive()).collect();
    for tree in &positive_trees {
        if !tree.completed {
            supported.insert(tree.root_goal);
        }
    }
    loop {
        let mut changed = false;
        for tree in &positive_trees {
            if supported.contains(&tree.root_goal) {
                continue;
            }
            let ok = tree.answers().iter().any(|&i| match &tree.nodes[i].body {
                NodeBody::Regular { delays, .. } => delays
                    .iter()
                    .filter(|l| l.is_positive())
                    .all(|l| supported.contains(l)),
                NodeBody::Failure => false,
            });
            if ok {
                supported.insert(tree.root_goal);
                changed = true;
            }
        }
        if !changed {
            return supported;
        }
    }
}
