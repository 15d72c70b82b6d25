//! Collision-finding instances and the greedy subset-announcement protocol.
//!
//! In `COLL^k_{m,ell}` each of `k` players holds a word in `[ell]^m`, and the
//! players must find coordinates `i != j` on which every player's symbols
//! agree. A solution always exists once `m > ell^k`.

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::rng;
use crate::transcript::Transcript;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollInstance {
    pub k: usize,
    pub m: usize,
    pub ell: u64,
    /// `inputs[p][i]` is player `p`'s symbol at coordinate `i`.
    pub inputs: Vec<Vec<u64>>,
}

impl CollInstance {
    pub fn new(ell: u64, inputs: Vec<Vec<u64>>) -> Result<Self> {
        let k = inputs.len();
        let m = inputs.first().map_or(0, Vec::len);
        let inst = CollInstance { k, m, ell, inputs };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "{} input rows for k = {}",
                self.inputs.len(),
                self.k
            )));
        }
        for (p, row) in self.inputs.iter().enumerate() {
            if row.len() != self.m {
                return Err(Error::DimensionMismatch(format!(
                    "player {p} holds {} symbols, expected m = {}",
                    row.len(),
                    self.m
                )));
            }
            if let Some(&s) = row.iter().find(|&&s| s >= self.ell) {
                return Err(Error::OutOfRange(format!(
                    "player {p} holds symbol {s} outside [0, {})",
                    self.ell
                )));
            }
        }
        Ok(())
    }

    /// The column of symbols at coordinate `i`, one per player.
    pub fn column(&self, i: usize) -> Vec<u64> {
        self.inputs.iter().map(|row| row[i]).collect()
    }

    pub fn is_collision(&self, i: usize, j: usize) -> bool {
        i != j && i < self.m && j < self.m && self.inputs.iter().all(|row| row[i] == row[j])
    }
}

pub fn random_instance(k: usize, m: usize, ell: u64, seed: u64) -> Result<CollInstance> {
    if k == 0 || m == 0 || ell == 0 {
        return Err(Error::InvalidParameter("k, m and ell must be positive".into()));
    }
    let mut rng = rng::seeded(seed);
    let inputs = (0..k)
        .map(|_| (0..m).map(|_| rng.random_range(0..ell)).collect())
        .collect();
    Ok(CollInstance { k, m, ell, inputs })
}

/// Lexicographically smallest colliding pair `(i, j)`, `i < j`.
pub fn find_collision_oracle(inst: &CollInstance) -> Option<(usize, usize)> {
    let mut first_seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(inst.m);
    let mut best: Option<(usize, usize)> = None;
    for j in 0..inst.m {
        match first_seen.entry(inst.column(j)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                let i = *e.get();
                // the first repeat of the smallest i is its smallest partner
                if best.is_none_or(|(bi, _)| i < bi) {
                    best = Some((i, j));
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(j);
            }
        }
    }
    best
}

/// `ell^k`, saturating at `u128::MAX`.
pub fn pigeonhole_capacity(k: usize, ell: u64) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(ell as u128);
    }
    acc
}

pub fn is_guaranteed(inst: &CollInstance) -> bool {
    (inst.m as u128) > pigeonhole_capacity(inst.k, inst.ell)
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::from(1u32);
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `ceil(log2 x)` for `x >= 1`.
pub fn ceil_log2_big(x: &BigUint) -> u64 {
    assert!(*x > BigUint::from(0u32), "log of zero");
    let one = BigUint::from(1u32);
    if *x == one {
        0
    } else {
        (x - one).bits()
    }
}

/// Bits charged for announcing a `size`-subset of a `live`-element set.
pub fn subset_announcement_bits(live: usize, size: usize) -> u64 {
    ceil_log2_big(&binomial(live as u64, size as u64))
}

/// Live-set sizes `m_0 = m, m_p = ceil(m_{p-1} / ell)` and the bits each
/// player is charged, without needing an instance.
pub fn greedy_schedule(k: usize, ell: u64, m: usize) -> (Vec<usize>, Vec<u64>) {
    let mut sizes = vec![m];
    let mut bits = Vec::with_capacity(k);
    for _ in 0..k {
        let live = *sizes.last().unwrap();
        let next = live.div_ceil(ell as usize);
        bits.push(subset_announcement_bits(live, next));
        sizes.push(next);
    }
    (sizes, bits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyOutcome {
    pub pair: (usize, usize),
    /// `m_0, ..., m_k`.
    pub round_sizes: Vec<usize>,
    pub transcript: Transcript,
}

/// Deterministic protocol: player `p` announces a subset of the live set of
/// size `ceil(|T| / ell)` on which its own symbols are all equal. After `k`
/// rounds any two surviving coordinates collide.
pub fn greedy_protocol(inst: &CollInstance) -> Result<GreedyOutcome> {
    inst.validate()?;
    if !is_guaranteed(inst) {
        return Err(Error::NotGuaranteed { k: inst.k, m: inst.m, ell: inst.ell });
    }
    let mut transcript = Transcript::new(inst.k);
    let mut live: Vec<usize> = (0..inst.m).collect();
    let mut round_sizes = vec![live.len()];

    for (p, row) in inst.inputs.iter().enumerate() {
        let size = live.len().div_ceil(inst.ell as usize);
        // coordinates of the live set grouped by this player's symbol, in order
        let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
        for &i in &live {
            groups.entry(row[i]).or_default().push(i);
        }
        let chosen = groups
            .into_values()
            .filter(|g| g.len() >= size)
            .map(|mut g| {
                g.truncate(size);
                g
            })
            .min()
            .ok_or(Error::NoMonochromaticSubset { player: p, size })?;
        transcript.charge(p, subset_announcement_bits(live.len(), size), format!("subset:{size}"));
        live = chosen;
        round_sizes.push(live.len());
    }

    if live.len() < 2 {
        return Err(Error::NotGuaranteed { k: inst.k, m: inst.m, ell: inst.ell });
    }
    let pair = (live[0], live[1]);
    if !inst.is_collision(pair.0, pair.1) {
        return Err(Error::NotACollision(pair.0, pair.1));
    }
    transcript.output = Some(pair);
    Ok(GreedyOutcome { pair, round_sizes, transcript })
}

/// Splits each row of an `m x log n` assignment into `k` contiguous blocks;
/// block `p`, read MSB-first, is player `p`'s symbol.
pub fn search_bphp_to_coll(assignment: &Gf2Matrix, k: usize) -> Result<CollInstance> {
    let width = assignment.cols();
    if k == 0 || !width.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must divide the row width {width}"
        )));
    }
    let block = width / k;
    if block >= 64 {
        return Err(Error::OutOfRange(format!("block width {block} exceeds 63 bits")));
    }
    let inputs = (0..k)
        .map(|p| {
            (0..assignment.rows())
                .map(|r| {
                    (0..block).fold(0u64, |acc, c| (acc << 1) | assignment.get(r, p * block + c) as u64)
                })
                .collect()
        })
        .collect();
    CollInstance::new(1u64 << block, inputs)
}
