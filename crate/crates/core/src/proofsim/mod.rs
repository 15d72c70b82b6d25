//! Threshold decision trees, tree-like refutations and their compilation
//! into number-in-hand protocols.
//!
//! A tree-like refutation of size `S` (leaves) becomes a threshold decision
//! tree of depth at most `ceil(log_{3/2} S)` by repeatedly querying a proof
//! line whose subtree holds between a third and two thirds of the remaining
//! axiom leaves; see [`proof_to_dt`]. Every query of such a tree is then
//! evaluated by the players through a greater-than subprotocol; see
//! [`protocol`].

mod bounds;
pub mod protocol;
pub mod synth;

use serde::{Deserialize, Serialize};

use crate::bphp::{Inequality, LinearSystem};
use crate::error::{Error, Result};

pub use bounds::{lower_bound_estimate, BoundEstimate};
pub use protocol::{
    dt_to_protocol, exact_gt, ExactGt, GtQuery, GtSubprotocol, Protocol, ProtocolRun, VariablePartition,
};

/// Soundness is checked by enumeration up to this many variables.
pub const SOUNDNESS_CHECK_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtNode {
    Query {
        ineq: Inequality,
        if_true: usize,
        if_false: usize,
    },
    Leaf {
        axiom: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdDecisionTree {
    pub num_vars: usize,
    pub root: usize,
    pub nodes: Vec<DtNode>,
}

impl ThresholdDecisionTree {
    /// Checks indices, coefficient lengths, and that the nodes form a tree
    /// rooted at `root` whose leaves name axioms of `system`.
    pub fn validate(&self, system: &LinearSystem) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedTree(msg));
        if self.num_vars != system.num_vars {
            return bad(format!("tree has {} variables, system {}", self.num_vars, system.num_vars));
        }
        if self.root >= self.nodes.len() {
            return bad(format!("root {} out of range", self.root));
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                DtNode::Query { ineq, if_true, if_false } => {
                    if ineq.coeffs.len() != self.num_vars {
                        return bad(format!("node {i} has {} coefficients", ineq.coeffs.len()));
                    }
                    for &c in [if_true, if_false] {
                        if c >= self.nodes.len() {
                            return bad(format!("node {i} points to missing node {c}"));
                        }
                        parents[c] += 1;
                    }
                }
                DtNode::Leaf { axiom } => {
                    if *axiom >= system.rows.len() {
                        return bad(format!("leaf {i} names missing axiom {axiom}"));
                    }
                }
            }
        }
        for (i, &p) in parents.iter().enumerate() {
            let want = usize::from(i != self.root);
            if p != want {
                return bad(format!("node {i} has {p} parents"));
            }
        }
        // with one parent per non-root node, reachability rules out cycles
        let reached = preorder(self.root, |i| match &self.nodes[i] {
            DtNode::Query { if_true, if_false, .. } => vec![*if_true, *if_false],
            DtNode::Leaf { .. } => vec![],
        });
        if reached.len() != self.nodes.len() {
            return bad("unreachable nodes".into());
        }
        Ok(())
    }

    /// Number of queries on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(t: &ThresholdDecisionTree, i: usize) -> usize {
            match &t.nodes[i] {
                DtNode::Leaf { .. } => 0,
                DtNode::Query { if_true, if_false, .. } => 1 + go(t, *if_true).max(go(t, *if_false)),
            }
        }
        go(self, self.root)
    }

    /// Query nodes visited on `assignment`, then the axiom reached.
    pub fn path(&self, assignment: &[bool]) -> (Vec<usize>, usize) {
        let mut visited = Vec::new();
        let mut at = self.root;
        loop {
            match &self.nodes[at] {
                DtNode::Leaf { axiom } => return (visited, *axiom),
                DtNode::Query { ineq, if_true, if_false } => {
                    visited.push(at);
                    at = if ineq.holds(assignment) { *if_true } else { *if_false };
                }
            }
        }
    }

    pub fn eval(&self, assignment: &[bool]) -> usize {
        self.path(assignment).1
    }
}

/// The axiom index reached on `assignment`. Callers decide whether reaching
/// a satisfied axiom is a failure.
pub fn eval_dt(dt: &ThresholdDecisionTree, system: &LinearSystem, assignment: &[bool]) -> usize {
    debug_assert_eq!(dt.num_vars, system.num_vars);
    dt.eval(assignment)
}

/// Tests the axioms one after another; the first violated one is the leaf.
pub fn trivial_dt(system: &LinearSystem) -> ThresholdDecisionTree {
    let count = system.rows.len();
    let mut nodes = Vec::with_capacity(2 * count + 1);
    if count == 0 {
        // nothing to report; a lone leaf keeps the tree well formed
        nodes.push(DtNode::Leaf { axiom: 0 });
        return ThresholdDecisionTree { num_vars: system.num_vars, root: 0, nodes };
    }
    // query i at index 2i, its false leaf at 2i + 1; the final true branch is
    // unreachable on an unsatisfiable system and gets a leaf of its own
    for (i, row) in system.rows.iter().enumerate() {
        nodes.push(DtNode::Query { ineq: row.clone(), if_true: 2 * i + 2, if_false: 2 * i + 1 });
        nodes.push(DtNode::Leaf { axiom: i });
    }
    nodes.push(DtNode::Leaf { axiom: count - 1 });
    ThresholdDecisionTree { num_vars: system.num_vars, root: 0, nodes }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// The line is axiom `index` of the system.
    Axiom(usize),
    /// The line follows semantically from the listed lines (at most two).
    Derived(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNode {
    pub ineq: Inequality,
    pub rule: Rule,
}

/// Tree-like refutation; edges point from a line to its antecedents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTree {
    pub num_vars: usize,
    pub root: usize,
    pub nodes: Vec<ProofNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Soundness {
    /// Enumerate all assignments (at most [`SOUNDNESS_CHECK_VARS`] variables).
    Check,
    /// Skip the semantic check; structure is still validated.
    Trust,
}

impl ProofTree {
    fn children(&self, i: usize) -> &[usize] {
        match &self.nodes[i].rule {
            Rule::Axiom(_) => &[],
            Rule::Derived(c) => c,
        }
    }

    /// Number of axiom leaves.
    pub fn size(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.rule, Rule::Axiom(_))).count()
    }

    pub fn validate_structure(&self, system: &LinearSystem) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedProof(msg));
        if self.num_vars != system.num_vars {
            return bad(format!("proof has {} variables, system {}", self.num_vars, system.num_vars));
        }
        if self.root >= self.nodes.len() {
            return bad(format!("root {} out of range", self.root));
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.ineq.coeffs.len() != self.num_vars {
                return bad(format!("line {i} has {} coefficients", node.ineq.coeffs.len()));
            }
            match &node.rule {
                Rule::Axiom(a) => match system.rows.get(*a) {
                    None => return bad(format!("line {i} cites missing axiom {a}")),
                    Some(row) if *row != node.ineq => {
                        return bad(format!("line {i} differs from axiom {a}"));
                    }
                    Some(_) => {}
                },
                Rule::Derived(children) => {
                    if children.len() > 2 {
                        return bad(format!("line {i} has {} antecedents", children.len()));
                    }
                    for &c in children {
                        if c >= self.nodes.len() {
                            return bad(format!("line {i} cites missing line {c}"));
                        }
                        parents[c] += 1;
                    }
                }
            }
        }
        for (i, &p) in parents.iter().enumerate() {
            let want = usize::from(i != self.root);
            if p != want {
                return bad(format!("line {i} is used {p} times"));
            }
        }
        if preorder(self.root, |i| self.children(i).to_vec()).len() != self.nodes.len() {
            return bad("unreachable lines".into());
        }
        Ok(())
    }

    /// Every derived line holds whenever its antecedents hold, and the root
    /// holds for no assignment.
    pub fn check_soundness(&self) -> Result<()> {
        if self.num_vars > SOUNDNESS_CHECK_VARS {
            return Err(Error::UnsoundProof(format!(
                "{} variables exceed the enumeration limit {SOUNDNESS_CHECK_VARS}; pass --trust to skip",
                self.num_vars
            )));
        }
        let mut assignment = vec![false; self.num_vars];
        for mask in 0u64..(1 << self.num_vars) {
            for (v, x) in assignment.iter_mut().enumerate() {
                *x = (mask >> v) & 1 == 1;
            }
            let holds: Vec<bool> = self.nodes.iter().map(|n| n.ineq.holds(&assignment)).collect();
            if holds[self.root] {
                return Err(Error::UnsoundProof(format!("root holds on assignment {mask:#b}")));
            }
            for (i, node) in self.nodes.iter().enumerate() {
                if let Rule::Derived(children) = &node.rule {
                    if !holds[i] && children.iter().all(|&c| holds[c]) {
                        return Err(Error::UnsoundProof(format!(
                            "line {i} does not follow from {children:?} on assignment {mask:#b}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Preorder listing of the nodes reachable from `root`.
fn preorder(root: usize, children: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    let mut order = Vec::new();
    let mut stack = vec![root];
    let mut seen = std::collections::HashSet::new();
    while let Some(i) = stack.pop() {
        if !seen.insert(i) {
            continue;
        }
        order.push(i);
        for c in children(i).into_iter().rev() {
            stack.push(c);
        }
    }
    order
}

/// Builds a shallow decision tree from a tree-like refutation.
///
/// Invariant of the recursion: the current subproof's root line is false
/// under the assignment, and every contracted line is true. Soundness then
/// forces a false path from the root to an uncontracted axiom leaf, so once
/// a single such leaf remains it is the answer.
pub fn proof_to_dt(proof: &ProofTree, system: &LinearSystem, soundness: Soundness) -> Result<ThresholdDecisionTree> {
    proof.validate_structure(system)?;
    if soundness == Soundness::Check {
        proof.check_soundness()?;
    }
    let mut builder = DtBuilder {
        proof,
        contracted: vec![false; proof.nodes.len()],
        out: Vec::new(),
    };
    let root = builder.build(proof.root)?;
    Ok(ThresholdDecisionTree { num_vars: proof.num_vars, root, nodes: builder.out })
}

struct DtBuilder<'a> {
    proof: &'a ProofTree,
    contracted: Vec<bool>,
    out: Vec<DtNode>,
}

impl DtBuilder<'_> {
    /// Preorder of the live subproof below `top`, with depth and leaf weight.
    fn weigh(&self, top: usize) -> Vec<(usize, usize, usize)> {
        let mut order = Vec::new();
        let mut stack = vec![(top, 0usize)];
        while let Some((i, depth)) = stack.pop() {
            order.push((i, depth));
            if self.contracted[i] {
                continue;
            }
            for &c in self.proof.children(i).iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        let mut weight = vec![0usize; self.proof.nodes.len()];
        for &(i, _) in order.iter().rev() {
            weight[i] = if self.contracted[i] {
                0
            } else {
                match &self.proof.nodes[i].rule {
                    Rule::Axiom(_) => 1,
                    Rule::Derived(children) => children.iter().map(|&c| weight[c]).sum(),
                }
            };
        }
        order.into_iter().map(|(i, d)| (i, d, weight[i])).collect()
    }

    fn build(&mut self, top: usize) -> Result<usize> {
        let weighed = self.weigh(top);
        let total = weighed[0].2;
        if total == 0 {
            return Err(Error::UnsoundProof(format!("line {top} has no axiom below it")));
        }
        if total == 1 {
            let axiom = weighed
                .iter()
                .find_map(|&(i, _, w)| match self.proof.nodes[i].rule {
                    Rule::Axiom(a) if w == 1 => Some(a),
                    _ => None,
                })
                .expect("weight one implies an axiom leaf");
            self.out.push(DtNode::Leaf { axiom });
            return Ok(self.out.len() - 1);
        }
        // deepest line holding between 1/3 and 2/3 of the leaves; first in preorder
        let (pivot, _, _) = weighed
            .iter()
            .filter(|&&(_, _, w)| 3 * w >= total && 3 * w <= 2 * total)
            .fold(None::<(usize, usize, usize)>, |best, &cand| match best {
                Some(b) if b.1 >= cand.1 => Some(b),
                _ => Some(cand),
            })
            .ok_or_else(|| Error::MalformedProof(format!("no balanced line below {top}")))?;

        let slot = self.out.len();
        self.out.push(DtNode::Leaf { axiom: usize::MAX });
        let if_false = self.build(pivot)?;
        self.contracted[pivot] = true;
        let if_true = self.build(top);
        self.contracted[pivot] = false;
        self.out[slot] = DtNode::Query {
            ineq: self.proof.nodes[pivot].ineq.clone(),
            if_true: if_true?,
            if_false,
        };
        Ok(slot)
    }
}

/// `ceil(log_{3/2} s) + 1`, the depth guaranteed by [`proof_to_dt`] plus one.
pub fn depth_bound(size: usize) -> usize {
    // smallest d with (3/2)^d >= size, in exact integer arithmetic
    let mut d = 0usize;
    let (mut num, mut den) = (1u128, 1u128);
    while num < den * size as u128 {
        num *= 3;
        den *= 2;
        d += 1;
    }
    d + 1
}

#[cfg(test)]
mod tests;
