use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DtNode, ThresholdDecisionTree};
use crate::bphp::LinearSystem;
use crate::error::{Error, Result};
use crate::reduction::ceil_log2;
use crate::transcript::Transcript;

/// Which player holds each variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariablePartition {
    pub k: usize,
    pub owner: Vec<usize>,
}

impl VariablePartition {
    pub fn new(k: usize, owner: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("a partition needs at least one player".into()));
        }
        if let Some(v) = owner.iter().position(|&p| p >= k) {
            return Err(Error::OutOfRange(format!("variable {v} owned by player {} >= k = {k}", owner[v])));
        }
        Ok(VariablePartition { k, owner })
    }

    /// Contiguous blocks whose sizes differ by at most one.
    pub fn even(num_vars: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("a partition needs at least one player".into()));
        }
        let owner = (0..num_vars).map(|i| i * k / num_vars.max(1)).collect();
        Self::new(k, owner)
    }

    pub fn num_vars(&self) -> usize {
        self.owner.len()
    }

    /// Largest number of variables held by one player.
    pub fn max_share(&self) -> usize {
        let mut counts = vec![0usize; self.k];
        self.owner.iter().for_each(|&p| counts[p] += 1);
        counts.into_iter().max().unwrap_or(0)
    }
}

/// Parses `even:<k>` (variable count supplied later via [`PartitionSpec::resolve`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSpec {
    pub k: usize,
}

impl PartitionSpec {
    pub fn resolve(&self, num_vars: usize) -> Result<VariablePartition> {
        VariablePartition::even(num_vars, self.k)
    }
}

impl FromStr for PartitionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = s
            .strip_prefix("even:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("expected even:<k>, got {s:?}")))?;
        Ok(PartitionSpec { k })
    }
}

/// One threshold test `Σ_p partials[p] <= bound`, with the magnitudes the
/// players agreed on: weights below `2^weight_bits`, inputs below
/// `2^input_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtQuery {
    pub partials: Vec<i64>,
    pub bound: i64,
    pub weight_bits: u32,
    pub input_bits: u32,
}

/// A number-in-hand protocol deciding one threshold test.
pub trait GtSubprotocol {
    fn decide(&self, query: &GtQuery, transcript: &mut Transcript) -> Result<bool>;
}

/// Exact comparison in which every player broadcasts its partial sum as a
/// `w + t + ceil(log2 k) + 1`-bit signed number. Returns the answer and the
/// total bits, `k (w + t + ceil(log2 k) + 1)`.
pub fn exact_gt(partials: &[i64], bound: i64, weight_bits: u32, input_bits: u32) -> Result<(bool, u64)> {
    let k = partials.len() as u64;
    let magnitude_bits = weight_bits as u64 + input_bits as u64 + ceil_log2(k);
    if magnitude_bits >= 62 {
        return Err(Error::Overflow(format!("{magnitude_bits}-bit partial sums")));
    }
    let limit = 1i64 << magnitude_bits;
    if let Some(p) = partials.iter().position(|x| x.unsigned_abs() > limit as u64) {
        return Err(Error::Overflow(format!(
            "partial {} of player {p} exceeds 2^{magnitude_bits}",
            partials[p]
        )));
    }
    let total: i128 = partials.iter().map(|&x| x as i128).sum();
    Ok((total <= bound as i128, k * (magnitude_bits + 1)))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactGt;

impl GtSubprotocol for ExactGt {
    fn decide(&self, query: &GtQuery, transcript: &mut Transcript) -> Result<bool> {
        let (answer, bits) = exact_gt(&query.partials, query.bound, query.weight_bits, query.input_bits)?;
        let k = query.partials.len() as u64;
        for p in 0..query.partials.len() {
            transcript.charge(p, bits / k, "gt:partial");
        }
        Ok(answer)
    }
}

/// A decision tree compiled into a k-party protocol.
pub struct Protocol<'a> {
    dt: &'a ThresholdDecisionTree,
    system: &'a LinearSystem,
    partition: &'a VariablePartition,
    gt: &'a dyn GtSubprotocol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtocolRun {
    pub axiom: usize,
    /// Whether the returned axiom is violated by the assignment.
    pub violated: bool,
    pub queries: usize,
    pub transcript: Transcript,
}

pub fn dt_to_protocol<'a>(
    dt: &'a ThresholdDecisionTree,
    system: &'a LinearSystem,
    partition: &'a VariablePartition,
    gt: &'a dyn GtSubprotocol,
) -> Result<Protocol<'a>> {
    dt.validate(system)?;
    if partition.num_vars() != system.num_vars {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} variables, system has {}",
            partition.num_vars(),
            system.num_vars
        )));
    }
    Ok(Protocol { dt, system, partition, gt })
}

impl Protocol<'_> {
    pub fn players(&self) -> usize {
        self.partition.k
    }

    /// Walks the tree; at each query every player contributes the part of
    /// the left-hand side it can compute from its own variables.
    pub fn run(&self, assignment: &[bool]) -> Result<ProtocolRun> {
        if assignment.len() != self.system.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.system.num_vars
            )));
        }
        let k = self.partition.k;
        let input_bits = ceil_log2(self.partition.max_share() as u64) as u32;
        let mut transcript = Transcript::new(k);
        let mut queries = 0;
        let mut at = self.dt.root;
        let axiom = loop {
            match &self.dt.nodes[at] {
                DtNode::Leaf { axiom } => break *axiom,
                DtNode::Query { ineq, if_true, if_false } => {
                    let mut partials = vec![0i64; k];
                    for (v, (&a, &x)) in ineq.coeffs.iter().zip(assignment).enumerate() {
                        if x {
                            partials[self.partition.owner[v]] += a;
                        }
                    }
                    let query = GtQuery {
                        partials,
                        bound: ineq.bound,
                        weight_bits: ceil_log2(ineq.max_abs_coeff()) as u32,
                        input_bits,
                    };
                    queries += 1;
                    at = if self.gt.decide(&query, &mut transcript)? { *if_true } else { *if_false };
                }
            }
        };
        Ok(ProtocolRun {
            axiom,
            violated: !self.system.rows[axiom].holds(assignment),
            queries,
            transcript,
        })
    }
}
