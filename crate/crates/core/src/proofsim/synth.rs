//! Random sound tree-like refutations for testing the conversion chain.
//!
//! A refutation is grown as a decision tree over the variables: the line at
//! a node with partial assignment `rho` says "the assignment does not extend
//! `rho`", written as `Σ c_l lit_l >= 1` with random positive weights `c_l`.
//! Its two antecedents extend `rho` by `x = 0` and `x = 1`, the root is
//! `0 <= -1`, and the leaves become the axioms of the system.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::Serialize;

use super::{ProofNode, ProofTree, Rule};
use crate::bphp::{Inequality, LinearSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// Random leaf splits, occasional single-antecedent rescaling steps.
    Random,
    /// One leaf split off at every step.
    Chain,
    /// Leaves split as evenly as possible.
    Balanced,
}

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub num_vars: usize,
    pub leaves: usize,
    pub shape: Shape,
    /// Extra random axioms not used by the proof.
    pub decoys: usize,
    /// Largest line weight.
    pub max_weight: i64,
}

impl SynthConfig {
    pub fn new(num_vars: usize, leaves: usize, shape: Shape) -> Self {
        SynthConfig { num_vars, leaves, shape, decoys: 2, max_weight: 3 }
    }
}

/// `Σ_{val=0} c x - Σ_{val=1} c x >= 1 - Σ_{val=1} c`, normalised to `<=`.
fn avoid_line<R: Rng + ?Sized>(num_vars: usize, path: &[(usize, bool)], max_weight: i64, rng: &mut R) -> Inequality {
    let mut coeffs = vec![0i64; num_vars];
    let mut bound = -1i64;
    for &(v, val) in path {
        let c = rng.random_range(1..=max_weight);
        if val {
            coeffs[v] = c;
            bound += c;
        } else {
            coeffs[v] = -c;
        }
    }
    Inequality { coeffs, bound }
}

struct Grower<'a, R: Rng + ?Sized> {
    config: SynthConfig,
    rng: &'a mut R,
    nodes: Vec<ProofNode>,
    /// Leaf lines, indexed by the placeholder axiom number in `Rule::Axiom`.
    leaf_lines: Vec<Inequality>,
}

impl<R: Rng + ?Sized> Grower<'_, R> {
    fn grow(&mut self, path: &mut Vec<(usize, bool)>, leaves: usize) -> usize {
        let line = avoid_line(self.config.num_vars, path, self.config.max_weight, self.rng);
        let slot = self.nodes.len();
        if leaves == 1 {
            self.leaf_lines.push(line.clone());
            self.nodes.push(ProofNode { ineq: line, rule: Rule::Axiom(self.leaf_lines.len() - 1) });
            return slot;
        }
        self.nodes.push(ProofNode { ineq: line, rule: Rule::Derived(Vec::new()) });

        let unused: Vec<usize> = (0..self.config.num_vars)
            .filter(|v| path.iter().all(|&(u, _)| u != *v))
            .collect();
        let var = match self.config.shape {
            Shape::Random => *unused.choose(self.rng).expect("leaf budget fits the variables"),
            Shape::Chain | Shape::Balanced => unused[0],
        };
        let cap = 1usize << (unused.len() - 1).min(40);
        let lo = leaves.saturating_sub(cap).max(1);
        let hi = (leaves - 1).min(cap);
        let left = match self.config.shape {
            Shape::Random => self.rng.random_range(lo..=hi),
            Shape::Chain => lo,
            Shape::Balanced => (leaves / 2).clamp(lo, hi),
        };
        let first_value: bool = self.config.shape == Shape::Random && self.rng.random();

        let mut children = Vec::with_capacity(2);
        for (value, count) in [(first_value, left), (!first_value, leaves - left)] {
            path.push((var, value));
            let mut child = self.grow(path, count);
            path.pop();
            if self.config.shape == Shape::Random && self.rng.random_bool(0.2) {
                child = self.rescale(child);
            }
            children.push(child);
        }
        self.nodes[slot].rule = Rule::Derived(children);
        slot
    }

    /// Single-antecedent step deriving the same line with doubled weights.
    fn rescale(&mut self, child: usize) -> usize {
        let src = &self.nodes[child].ineq;
        let ineq = Inequality {
            coeffs: src.coeffs.iter().map(|a| 2 * a).collect(),
            bound: 2 * src.bound,
        };
        self.nodes.push(ProofNode { ineq, rule: Rule::Derived(vec![child]) });
        self.nodes.len() - 1
    }
}

/// A random system together with a sound tree-like refutation of it.
pub fn random_refutation<R: Rng + ?Sized>(config: SynthConfig, rng: &mut R) -> Result<(LinearSystem, ProofTree)> {
    if config.leaves == 0 || config.num_vars >= 40 || config.leaves > 1usize << config.num_vars {
        return Err(Error::InvalidParameter(format!(
            "{} leaves do not fit {} variables",
            config.leaves, config.num_vars
        )));
    }
    if config.max_weight < 1 {
        return Err(Error::InvalidParameter("max_weight must be positive".into()));
    }
    let mut grower = Grower { config, rng, nodes: Vec::new(), leaf_lines: Vec::new() };
    let root = grower.grow(&mut Vec::new(), config.leaves);
    let Grower { rng, mut nodes, leaf_lines, .. } = grower;

    let mut rows = leaf_lines;
    for _ in 0..config.decoys {
        let width = rng.random_range(1..=config.num_vars.max(1));
        let mut vars: Vec<usize> = (0..config.num_vars).collect();
        vars.shuffle(rng);
        let path: Vec<(usize, bool)> = vars.into_iter().take(width).map(|v| (v, rng.random())).collect();
        rows.push(avoid_line(config.num_vars, &path, config.max_weight, rng));
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(rng);
    // rows[order[new]] is placed at position new
    let mut position = vec![0usize; rows.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let system = LinearSystem::new(config.num_vars, order.iter().map(|&old| rows[old].clone()).collect())?;
    for node in &mut nodes {
        if let Rule::Axiom(a) = &mut node.rule {
            *a = position[*a];
        }
    }
    Ok((system, ProofTree { num_vars: config.num_vars, root, nodes }))
}
