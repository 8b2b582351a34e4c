//! Forests of evaluation trees.
//!
//! Every tree is rooted at `<S, {}> :- | S` for its root goal `S`. Nodes
//! are either failure nodes or regular nodes carrying an abductive
//! context, a delay list and a goal list. A regular leaf with an empty
//! goal list is an answer; it is unconditional when its delay list is
//! empty too. Nodes are only ever added, never mutated or removed, so an
//! answer ceases to be one exactly when an operation gives it a child.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::interp::Interpretation;
use crate::literal::{Literal, ObjectiveLiteral};

/// A set of abduced objective literals attached to a subgoal.
pub type Context = BTreeSet<ObjectiveLiteral>;

/// No objective literal together with its explicit conjugate.
pub fn context_consistent(ctx: &Context) -> bool {
    ctx.iter().all(|o| match o.conj_e() {
        Ok(conj) => !ctx.contains(&conj),
        Err(_) => true,
    })
}

/// Union of two contexts if the result is consistent.
pub fn merge_contexts(a: &Context, b: &Context) -> Option<Context> {
    let merged: Context = a.union(b).copied().collect();
    context_consistent(&merged).then_some(merged)
}

/// The operation that created a node (or a whole tree).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Root,
    NewSubgoal,
    ProgramClauseResolution,
    AnswerClauseResolution,
    Delaying,
    Simplification,
    CoUnfoundedRemoval,
    Abduction,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OpKind::Root => "root",
            OpKind::NewSubgoal => "new-subgoal",
            OpKind::ProgramClauseResolution => "program-clause-resolution",
            OpKind::AnswerClauseResolution => "answer-clause-resolution",
            OpKind::Delaying => "delaying",
            OpKind::Simplification => "simplification",
            OpKind::CoUnfoundedRemoval => "co-unfounded-removal",
            OpKind::Abduction => "abduction",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeBody {
    Regular { context: Context, delays: Vec<Literal>, goals: Vec<Literal> },
    Failure,
}

impl NodeBody {
    pub fn is_failure(&self) -> bool {
        matches!(self, NodeBody::Failure)
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub body: NodeBody,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub op: OpKind,
    /// Global creation order across the whole forest.
    pub seq: u64,
}

impl Node {
    pub fn selected(&self) -> Option<&Literal> {
        match &self.body {
            NodeBody::Regular { goals, .. } => goals.first(),
            NodeBody::Failure => None,
        }
    }

    pub fn context(&self) -> Option<&Context> {
        match &self.body {
            NodeBody::Regular { context, .. } => Some(context),
            NodeBody::Failure => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tree {
    pub root_goal: Literal,
    pub nodes: Vec<Node>,
    pub completed: bool,
}

impl Tree {
    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// Indices of current answers: regular nodes with an empty goal list
    /// and no failure child. Children added by simplification or
    /// co-unfounded removal refine an answer without retracting it; a
    /// failure child retracts it.
    pub fn answers(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| self.is_answer_node(n))
            .map(|(i, _)| i)
            .collect()
    }

    fn is_answer_node(&self, n: &Node) -> bool {
        matches!(&n.body, NodeBody::Regular { goals, .. } if goals.is_empty())
            && !n.children.iter().any(|&c| self.nodes[c].body.is_failure())
    }

    pub fn answer_alive(&self, node: usize) -> bool {
        self.is_answer_node(&self.nodes[node])
    }

    /// Has an unconditional answer with empty context; such trees are
    /// completely evaluated outright.
    pub fn has_unconditional_empty_answer(&self) -> bool {
        self.answers().iter().any(|&i| match &self.nodes[i].body {
            NodeBody::Regular { context, delays, .. } => {
                context.is_empty() && delays.is_empty()
            }
            NodeBody::Failure => false,
        })
    }

    pub fn has_any_answer(&self) -> bool {
        !self.answers().is_empty()
    }

    fn is_descendant_body(&self, node: usize, body: &NodeBody) -> bool {
        let mut stack: Vec<usize> = self.nodes[node].children.clone();
        while let Some(i) = stack.pop() {
            if self.nodes[i].body == *body {
                return true;
            }
            stack.extend(self.nodes[i].children.iter().copied());
        }
        false
    }
}

#[derive(Clone, Debug, Default)]
pub struct Forest {
    pub trees: Vec<Tree>,
    index: BTreeMap<Literal, usize>,
    next_seq: u64,
}

impl Forest {
    pub fn new() -> Self {
        Forest::default()
    }

    pub fn tree_for(&self, goal: &Literal) -> Option<usize> {
        self.index.get(goal).copied()
    }

    /// Add a fresh tree `<goal, {}> :- | goal`.
    pub fn add_tree(&mut self, goal: Literal, op: OpKind) -> usize {
        debug_assert!(!self.index.contains_key(&goal));
        let seq = self.next_seq;
        self.next_seq += 1;
        let root = Node {
            body: NodeBody::Regular {
                context: Context::new(),
                delays: Vec::new(),
                goals: vec![goal],
            },
            parent: None,
            children: Vec::new(),
            op,
            seq,
        };
        let idx = self.trees.len();
        self.trees.push(Tree { root_goal: goal, nodes: vec![root], completed: false });
        self.index.insert(goal, idx);
        idx
    }

    /// Add `body` as a child of `parent` unless an identical child exists.
    /// Returns the new node index, or `None` when deduplicated.
    pub fn add_child(
        &mut self,
        tree: usize,
        parent: usize,
        body: NodeBody,
        op: OpKind,
    ) -> Option<usize> {
        let t = &mut self.trees[tree];
        if t.nodes[parent].children.iter().any(|&c| t.nodes[c].body == body) {
            return None;
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        let idx = t.nodes.len();
        t.nodes.push(Node { body, parent: Some(parent), children: Vec::new(), op, seq });
        t.nodes[parent].children.push(idx);
        Some(idx)
    }

    /// Like [`Forest::add_child`] but deduplicating against every
    /// descendant of `parent`, as simplification requires.
    pub fn add_descendant_checked(
        &mut self,
        tree: usize,
        parent: usize,
        body: NodeBody,
        op: OpKind,
    ) -> Option<usize> {
        if self.trees[tree].is_descendant_body(parent, &body) {
            return None;
        }
        self.add_child(tree, parent, body, op)
    }

    pub fn node(&self, tree: usize, node: usize) -> &Node {
        &self.trees[tree].nodes[node]
    }

    /// The interpretation induced by the forest: root goals with an
    /// unconditional empty-context answer, plus `not O` for every
    /// positive-rooted tree that is completely evaluated without answers.
    pub fn induced_interpretation(&self) -> Interpretation {
        let mut interp = Interpretation::new();
        for tree in &self.trees {
            if tree.has_unconditional_empty_answer() {
                if tree.root_goal.is_positive() {
                    interp.insert_true(tree.root_goal.objective());
                } else {
                    interp.insert_false(tree.root_goal.objective());
                }
            }
            if tree.root_goal.is_positive() && tree.completed && !tree.has_any_answer() {
                interp.insert_false(tree.root_goal.objective());
            }
        }
        interp
    }

    /// Maximal context cardinality over all regular nodes.
    pub fn max_context_size(&self) -> usize {
        self.trees
            .iter()
            .flat_map(|t| t.nodes.iter())
            .filter_map(|n| n.context().map(Context::len))
            .max()
            .unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        self.trees.iter().map(|t| t.nodes.len()).sum()
    }

    /// Indented per-tree text dump.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for tree in &self.trees {
            let status = if tree.completed { " [completed]" } else { "" };
            out.push_str(&format!("tree {}{status}\n", tree.root_goal));
            self.dump_node(tree, 0, 1, &mut out);
        }
        out
    }

    fn dump_node(&self, tree: &Tree, node: usize, depth: usize, out: &mut String) {
        let n = &tree.nodes[node];
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("{}. {}\n", n.seq, render_body(tree, n)));
        for &c in &n.children {
            self.dump_node(tree, c, depth + 1, out);
        }
    }

    /// Machine-readable dump: one record per node.
    pub fn dump_records(&self) -> String {
        let mut rows: Vec<(u64, String)> = Vec::new();
        for tree in &self.trees {
            for n in &tree.nodes {
                let parent = n
                    .parent
                    .map(|p| tree.nodes[p].seq.to_string())
                    .unwrap_or_else(|| "-".to_owned());
                rows.push((
                    n.seq,
                    format!(
                        "node\t{}\tparent={parent}\ttree={}\top={}\t{}",
                        n.seq,
                        tree.root_goal,
                        n.op,
                        render_fields(&n.body)
                    ),
                ));
            }
        }
        rows.sort();
        rows.into_iter().map(|(_, line)| line + "\n").collect()
    }
}

fn render_context(ctx: &Context) -> String {
    let parts: Vec<String> = ctx.iter().map(|o| o.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn render_literals(ls: &[Literal]) -> String {
    ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
}

fn render_body(tree: &Tree, node: &Node) -> String {
    match &node.body {
        NodeBody::Regular { context, delays, goals } => format!(
            "<{}, {}> :- {} | {}",
            tree.root_goal,
            render_context(context),
            render_literals(delays),
            render_literals(goals),
        ),
        NodeBody::Failure => "fail".to_owned(),
    }
}

fn render_fields(body: &NodeBody) -> String {
    match body {
        NodeBody::Regular { context, delays, goals } => format!(
            "ctx={}\tdelay=[{}]\tgoal=[{}]",
            render_context(context),
            render_literals(delays),
            render_literals(goals),
        ),
        NodeBody::Failure => "fail".to_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Literal {
        Literal::from_name(s)
    }

    #[test]
    fn answers_are_goal_free_unfailed_nodes() {
        let mut forest = Forest::new();
        let t = forest.add_tree(lit("q"), OpKind::Root);
        assert!(forest.trees[t].answers().is_empty());
        let child = forest
            .add_child(
                t,
                0,
                NodeBody::Regular {
                    context: Context::new(),
                    delays: vec![lit("not p")],
                    goals: Vec::new(),
                },
                OpKind::Delaying,
            )
            .unwrap();
        assert_eq!(forest.trees[t].answers(), vec![child]);
        assert!(!forest.trees[t].has_unconditional_empty_answer());
        // a refinement child keeps the answer alive
        let refined = forest
            .add_child(
                t,
                child,
                NodeBody::Regular {
                    context: Context::new(),
                    delays: Vec::new(),
                    goals: Vec::new(),
                },
                OpKind::Simplification,
            )
            .unwrap();
        assert_eq!(forest.trees[t].answers(), vec![child, refined]);
        assert!(forest.trees[t].has_unconditional_empty_answer());
        // a failure child retracts it
        forest.add_child(t, child, NodeBody::Failure, OpKind::Simplification).unwrap();
        assert_eq!(forest.trees[t].answers(), vec![refined]);
    }

    #[test]
    fn child_dedup_is_per_node() {
        let mut forest = Forest::new();
        let t = forest.add_tree(lit("q"), OpKind::Root);
        let body = NodeBody::Regular {
            context: Context::new(),
            delays: Vec::new(),
            goals: vec![lit("a")],
        };
        assert!(forest.add_child(t, 0, body.clone(), OpKind::ProgramClauseResolution).is_some());
        assert!(forest.add_child(t, 0, body, OpKind::ProgramClauseResolution).is_none());
    }

    #[test]
    fn context_consistency() {
        let mut ctx = Context::new();
        ctx.insert(ObjectiveLiteral::from_name("p*"));
        assert!(context_consistent(&ctx));
        ctx.insert(ObjectiveLiteral::from_name("-p*"));
        assert!(!context_consistent(&ctx));

        let a: Context = [ObjectiveLiteral::from_name("p*")].into_iter().collect();
        let b: Context = [ObjectiveLiteral::from_name("-p*")].into_iter().collect();
        assert!(merge_contexts(&a, &b).is_none());
        assert!(merge_contexts(&a, &a).is_some());
    }
}
