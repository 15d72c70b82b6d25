//! Randomized reduction from k-party NIH disjointness to collision finding.
//!
//! Player inputs `x^(1..k)` are subsets of `[m^(k-1)]`. For every element `i`
//! the gadget matrix `M_k(x^(1)_i, ..., x^(k)_i)` is repeated `m` times, each
//! copy tagged with a distinct `k log m`-bit index block. Each player's share
//! of a row is one gadget bit plus a `log m`-bit slice of the index, fused into
//! a symbol in `[2m]` as `gadget_bit * m + slice`. The resulting matrix has
//! distinct rows iff the inputs are disjoint.
//!
//! Shared randomness then appends `2^(k-1) m` distinct fake rows with
//! perfectly balanced per-player histograms, shuffles all rows, and relabels
//! each player's alphabet. A collision solver run on this matrix reveals an
//! intersection whenever it returns a pair of real rows.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::collision::{find_collision_oracle, greedy_protocol, CollInstance};
use crate::error::{Error, Result};
use crate::gadget::{gadget_matrices, GadgetPair};
use crate::gf2::Gf2Matrix;
use crate::rng;
use crate::transcript::Transcript;

/// Upper bound on the number of rows of a reduction matrix.
pub const MAX_ROWS: u128 = 1 << 22;
/// Repetitions used by the decision procedure.
pub const DEFAULT_REPETITIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjInstance {
    pub k: usize,
    pub universe: usize,
    pub sets: Vec<Vec<bool>>,
}

impl DisjInstance {
    pub fn new(sets: Vec<Vec<bool>>) -> Result<Self> {
        let k = sets.len();
        let universe = sets.first().map_or(0, Vec::len);
        if let Some(p) = sets.iter().position(|s| s.len() != universe) {
            return Err(Error::DimensionMismatch(format!(
                "set {p} has length {}, expected {universe}",
                sets[p].len()
            )));
        }
        Ok(DisjInstance { k, universe, sets })
    }

    pub fn common_elements(&self) -> Vec<usize> {
        (0..self.universe)
            .filter(|&i| self.sets.iter().all(|s| s[i]))
            .collect()
    }

    pub fn is_disjoint(&self) -> bool {
        self.common_elements().is_empty()
    }

    /// Uniformly random sets with every common element removed from one
    /// randomly chosen player.
    pub fn random_disjoint<R: Rng + ?Sized>(k: usize, universe: usize, rng: &mut R) -> Self {
        let mut sets: Vec<Vec<bool>> = (0..k)
            .map(|_| (0..universe).map(|_| rng.random()).collect())
            .collect();
        for i in 0..universe {
            if sets.iter().all(|s| s[i]) {
                let p = rng.random_range(0..k);
                sets[p][i] = false;
            }
        }
        DisjInstance { k, universe, sets }
    }

    /// Uniformly random sets with one planted common element.
    pub fn random_intersecting<R: Rng + ?Sized>(k: usize, universe: usize, rng: &mut R) -> Self {
        let mut sets: Vec<Vec<bool>> = (0..k)
            .map(|_| (0..universe).map(|_| rng.random()).collect())
            .collect();
        let planted = rng.random_range(0..universe);
        for s in &mut sets {
            s[planted] = true;
        }
        DisjInstance { k, universe, sets }
    }
}

/// Size bookkeeping for one `(k, m)` reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReductionParams {
    pub k: usize,
    pub m: usize,
    pub log_m: usize,
}

impl ReductionParams {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "the reduction needs k >= 2 players, got {k}"
            )));
        }
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("m must be a power of two, got {m}")));
        }
        let rows = (m as u128)
            .checked_pow(k as u32)
            .and_then(|x| x.checked_mul(1u128 << k.min(127)))
            .unwrap_or(u128::MAX);
        if rows > MAX_ROWS {
            return Err(Error::OutOfRange(format!(
                "k = {k}, m = {m} needs {rows} rows (limit {MAX_ROWS})"
            )));
        }
        Ok(ReductionParams { k, m, log_m: m.trailing_zeros() as usize })
    }

    /// `m^(k-1)`, the disjointness universe size.
    pub fn universe(&self) -> usize {
        self.m.pow(self.k as u32 - 1)
    }

    /// `m^k 2^k` rows built from the inputs.
    pub fn real_rows(&self) -> usize {
        self.m.pow(self.k as u32) << self.k
    }

    /// `2^(k-1) m` fake rows.
    pub fn fake_rows(&self) -> usize {
        self.m << (self.k - 1)
    }

    pub fn tilde_m(&self) -> usize {
        self.real_rows() + self.fake_rows()
    }

    pub fn tilde_ell(&self) -> u64 {
        2 * self.m as u64
    }

    /// Bits per player symbol, `log m + 1`.
    pub fn symbol_bits(&self) -> u64 {
        self.log_m as u64 + 1
    }
}

/// `2^k` copies of `bin(j)` over `k log m` bits, MSB-first.
pub fn index_block(j: usize, m: usize, k: usize) -> Result<Gf2Matrix> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("m must be a power of two, got {m}")));
    }
    let width = k * m.trailing_zeros() as usize;
    let limit = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if (j as u128) >= limit || width > 63 || k > 20 {
        return Err(Error::OutOfRange(format!("index {j} not in [0, m^k) for m = {m}, k = {k}")));
    }
    let mut block = Gf2Matrix::zeros(1 << k, width);
    for r in 0..block.rows() {
        for c in 0..width {
            block.set(r, c, (j >> (width - 1 - c)) & 1 == 1);
        }
    }
    Ok(block)
}

/// Player `p`'s `log m`-bit slice of the index `j`.
fn index_slice(j: usize, p: usize, params: &ReductionParams) -> u64 {
    let shift = (params.k - 1 - p) * params.log_m;
    ((j >> shift) & (params.m - 1)) as u64
}

/// The unshuffled matrix of `m^k 2^k` rows, as a collision instance over
/// alphabet `[2m]`.
pub fn build_tilde_matrix(disj: &DisjInstance, m: usize) -> Result<CollInstance> {
    let params = ReductionParams::new(disj.k, m)?;
    if disj.universe != params.universe() {
        return Err(Error::InvalidParameter(format!(
            "universe {} does not equal m^(k-1) = {}",
            disj.universe,
            params.universe()
        )));
    }
    let k = params.k;
    let gadget = gadget_matrices(k)?;
    let mut inputs = vec![Vec::with_capacity(params.real_rows()); k];
    for i in 0..params.universe() {
        let selector: Vec<bool> = disj.sets.iter().map(|s| s[i]).collect();
        let mixed = gadget.mix(&selector)?;
        for r in 0..m {
            let index = index_block(i * m + r, m, k)?;
            for t in 0..mixed.rows() {
                for (p, column) in inputs.iter_mut().enumerate() {
                    let slice = (0..params.log_m)
                        .fold(0u64, |acc, c| (acc << 1) | index.get(t, p * params.log_m + c) as u64);
                    column.push(mixed.get(t, p) as u64 * m as u64 + slice);
                }
            }
        }
    }
    CollInstance::new(params.tilde_ell(), inputs)
}

/// Distinct fake rows in which every symbol of `[2m]` appears exactly
/// `2^(k-2)` times in each player's column.
pub fn gen_fake_rows<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> Result<CollInstance> {
    let params = ReductionParams::new(k, m)?;
    let copies = 1usize << (k - 2);
    let base: Vec<u64> = (0..params.tilde_ell())
        .flat_map(|s| std::iter::repeat_n(s, copies))
        .collect();
    const ATTEMPTS: usize = 10_000;
    for _ in 0..ATTEMPTS {
        let inputs: Vec<Vec<u64>> = (0..k)
            .map(|_| {
                let mut col = base.clone();
                col.shuffle(rng);
                col
            })
            .collect();
        let inst = CollInstance::new(params.tilde_ell(), inputs)?;
        if find_collision_oracle(&inst).is_none() {
            return Ok(inst);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no distinct fake rows found for k = {k}, m = {m} after {ATTEMPTS} attempts"
    )))
}

/// Appends the rows of `bottom` below `top`.
pub fn stack(top: &CollInstance, bottom: &CollInstance) -> Result<CollInstance> {
    if top.k != bottom.k || top.ell != bottom.ell {
        return Err(Error::DimensionMismatch("stacked instances differ in k or ell".into()));
    }
    let inputs = top
        .inputs
        .iter()
        .zip(&bottom.inputs)
        .map(|(a, b)| a.iter().chain(b).copied().collect())
        .collect();
    CollInstance::new(top.ell, inputs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionArtifact {
    pub m: usize,
    pub k: usize,
    pub tilde_m: usize,
    pub tilde_ell: u64,
    pub matrix: CollInstance,
    /// Positions of fake rows after shuffling, ascending.
    pub fake_row_indices: Vec<usize>,
    /// Row `i` of the unshuffled matrix moves to position `row_perm[i]`.
    pub row_perm: Vec<usize>,
    /// Player `p` relabels symbol `s` as `alphabet_perms[p][s]`.
    pub alphabet_perms: Vec<Vec<u64>>,
}

impl ReductionArtifact {
    pub fn is_fake(&self, row: usize) -> bool {
        self.fake_row_indices.binary_search(&row).is_ok()
    }
}

/// Row permutation and per-player relabelings, drawn from shared randomness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutations {
    pub rows: Vec<usize>,
    pub alphabets: Vec<Vec<u64>>,
}

impl Permutations {
    pub fn sample<R: Rng + ?Sized>(rows: usize, k: usize, ell: u64, rng: &mut R) -> Self {
        let mut row_perm: Vec<usize> = (0..rows).collect();
        row_perm.shuffle(rng);
        let alphabets = (0..k)
            .map(|_| {
                let mut perm: Vec<u64> = (0..ell).collect();
                perm.shuffle(rng);
                perm
            })
            .collect();
        Permutations { rows: row_perm, alphabets }
    }

    pub fn identity(rows: usize, k: usize, ell: u64) -> Self {
        Permutations {
            rows: (0..rows).collect(),
            alphabets: vec![(0..ell).collect(); k],
        }
    }

    /// Applies the permutations to one player's column.
    pub fn apply_to_column(&self, p: usize, column: &[u64]) -> Vec<u64> {
        let mut out = vec![0; column.len()];
        for (i, &s) in column.iter().enumerate() {
            out[self.rows[i]] = self.alphabets[p][s as usize];
        }
        out
    }
}

/// Applies fixed permutations to `matrix`.
pub fn shuffle_with(matrix: &CollInstance, fake_indices: &[usize], perms: &Permutations) -> Result<ReductionArtifact> {
    if perms.rows.len() != matrix.m || perms.alphabets.len() != matrix.k {
        return Err(Error::DimensionMismatch("permutations do not fit the matrix".into()));
    }
    let inputs = (0..matrix.k)
        .map(|p| perms.apply_to_column(p, &matrix.inputs[p]))
        .collect();
    let mut fake_row_indices: Vec<usize> = fake_indices.iter().map(|&i| perms.rows[i]).collect();
    fake_row_indices.sort_unstable();
    Ok(ReductionArtifact {
        m: (matrix.ell / 2) as usize,
        k: matrix.k,
        tilde_m: matrix.m,
        tilde_ell: matrix.ell,
        matrix: CollInstance { inputs, ..matrix.clone() },
        fake_row_indices,
        row_perm: perms.rows.clone(),
        alphabet_perms: perms.alphabets.clone(),
    })
}

/// Shuffles rows by a uniform permutation and relabels each player's
/// alphabet by an independent uniform permutation.
pub fn shuffle<R: Rng + ?Sized>(matrix: &CollInstance, fake_indices: &[usize], rng: &mut R) -> Result<ReductionArtifact> {
    let perms = Permutations::sample(matrix.m, matrix.k, matrix.ell, rng);
    shuffle_with(matrix, fake_indices, &perms)
}

/// All randomness one copy of the reduction consumes. None of it depends on
/// the players' inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedCoins {
    pub fake_rows: CollInstance,
    pub perms: Permutations,
}

impl SharedCoins {
    pub fn sample<R: Rng + ?Sized>(params: &ReductionParams, rng: &mut R) -> Result<Self> {
        let fake_rows = gen_fake_rows(params.k, params.m, rng)?;
        let perms = Permutations::sample(params.tilde_m(), params.k, params.tilde_ell(), rng);
        Ok(SharedCoins { fake_rows, perms })
    }
}

/// One shuffled copy of the reduction matrix.
pub fn build_artifact(disj: &DisjInstance, params: &ReductionParams, coins: &SharedCoins) -> Result<ReductionArtifact> {
    let tilde = build_tilde_matrix(disj, params.m)?;
    let full = stack(&tilde, &coins.fake_rows)?;
    let fakes: Vec<usize> = (params.real_rows()..params.tilde_m()).collect();
    shuffle_with(&full, &fakes, &coins.perms)
}

/// Player `p`'s column of the shuffled matrix, computed from `x^(p)` and the
/// shared coins only.
pub fn player_column(p: usize, own_set: &[bool], params: &ReductionParams, coins: &SharedCoins) -> Result<Vec<u64>> {
    if own_set.len() != params.universe() || p >= params.k {
        return Err(Error::DimensionMismatch("player input does not fit the parameters".into()));
    }
    let gadget: GadgetPair = gadget_matrices(params.k)?;
    let mut column = Vec::with_capacity(params.tilde_m());
    for (i, &bit) in own_set.iter().enumerate() {
        let gadget_col = gadget.column(p, bit);
        for r in 0..params.m {
            let slice = index_slice(i * params.m + r, p, params);
            column.extend(gadget_col.iter().map(|&g| g as u64 * params.m as u64 + slice));
        }
    }
    column.extend_from_slice(&coins.fake_rows.inputs[p]);
    Ok(coins.perms.apply_to_column(p, &column))
}

/// Unordered equal-row pairs with both rows real, and pairs touching a fake row.
pub fn count_real_collisions(matrix: &CollInstance, fake_indices: &[usize]) -> (u64, u64) {
    let mut is_fake = vec![false; matrix.m];
    for &i in fake_indices {
        if i < matrix.m {
            is_fake[i] = true;
        }
    }
    let mut groups: HashMap<Vec<u64>, (u64, u64)> = HashMap::new();
    for (i, &fake) in is_fake.iter().enumerate() {
        let entry = groups.entry(matrix.column(i)).or_default();
        if fake {
            entry.1 += 1;
        } else {
            entry.0 += 1;
        }
    }
    let pairs = |n: u64| n * n.saturating_sub(1) / 2;
    groups.values().fold((0, 0), |(real, fake), &(r, f)| {
        (real + pairs(r), fake + pairs(r + f) - pairs(r))
    })
}

/// Output of one solver run: a claimed pair (possibly wrong) and its cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverRun {
    pub claim: Option<(usize, usize)>,
    pub transcript: Transcript,
}

/// A (possibly erring) protocol for the collision problem. It is handed the
/// shuffled matrix only, never the fake-row bookkeeping.
pub trait CollisionSolver: Sync {
    fn solve(&self, view: &CollInstance, rng: &mut dyn RngCore) -> SolverRun;
}

/// Cost of the trivial protocol: players `1..k-1` broadcast their whole
/// column, and the last player announces the answer.
pub fn broadcast_cost(view: &CollInstance) -> Transcript {
    let mut t = Transcript::new(view.k);
    let symbol_bits = ceil_log2(view.ell);
    for p in 0..view.k.saturating_sub(1) {
        t.charge(p, view.m as u64 * symbol_bits, "column");
    }
    if view.k > 0 {
        t.charge(view.k - 1, 2 * ceil_log2(view.m as u64), "answer");
    }
    t
}

/// `ceil(log2 x)`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

fn with_output(mut transcript: Transcript, claim: Option<(usize, usize)>) -> SolverRun {
    transcript.output = claim;
    SolverRun { claim, transcript }
}

/// Zero-error solver returning the lexicographically first colliding pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScanSolver;

impl CollisionSolver for ScanSolver {
    fn solve(&self, view: &CollInstance, _rng: &mut dyn RngCore) -> SolverRun {
        with_output(broadcast_cost(view), find_collision_oracle(view))
    }
}

/// Zero-error solver returning a uniformly random colliding pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestSolver;

impl CollisionSolver for HonestSolver {
    fn solve(&self, view: &CollInstance, rng: &mut dyn RngCore) -> SolverRun {
        let mut pairs = Vec::new();
        for group in equal_row_groups(view) {
            for (a, &i) in group.iter().enumerate() {
                pairs.extend(group[a + 1..].iter().map(|&j| (i, j)));
            }
        }
        let claim = if pairs.is_empty() {
            None
        } else {
            Some(pairs[rng.random_range(0..pairs.len())])
        };
        with_output(broadcast_cost(view), claim)
    }
}

/// Solver that errs with probability `error_rate` (answering with a
/// non-colliding pair) and otherwise returns the first pair of the largest
/// group of equal rows.
#[derive(Debug, Clone, Copy)]
pub struct AdversarialSolver {
    pub error_rate: f64,
}

impl Default for AdversarialSolver {
    fn default() -> Self {
        AdversarialSolver { error_rate: 1.0 / 3.0 }
    }
}

impl CollisionSolver for AdversarialSolver {
    fn solve(&self, view: &CollInstance, rng: &mut dyn RngCore) -> SolverRun {
        let claim = if rng.random_bool(self.error_rate) {
            (1..view.m).find(|&j| !view.is_collision(0, j)).map(|j| (0, j))
        } else {
            equal_row_groups(view)
                .into_iter()
                .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
                .map(|g| (g[0], g[1]))
        };
        with_output(broadcast_cost(view), claim)
    }
}

/// The deterministic subset-announcement protocol, charged at its real cost.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedySolver;

impl CollisionSolver for GreedySolver {
    fn solve(&self, view: &CollInstance, _rng: &mut dyn RngCore) -> SolverRun {
        match greedy_protocol(view) {
            Ok(out) => SolverRun { claim: Some(out.pair), transcript: out.transcript },
            Err(_) => with_output(Transcript::new(view.k), None),
        }
    }
}

/// Groups (size >= 2) of equal rows, each ascending, ordered by first index.
fn equal_row_groups(view: &CollInstance) -> Vec<Vec<usize>> {
    let mut by_row: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for i in 0..view.m {
        by_row.entry(view.column(i)).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = by_row.into_values().filter(|g| g.len() >= 2).collect();
    groups.sort_unstable_by_key(|g| g[0]);
    groups
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Honest,
    Scan,
    Adversarial,
    Greedy,
}

impl SolverKind {
    pub fn solver(self) -> Box<dyn CollisionSolver> {
        match self {
            SolverKind::Honest => Box::new(HonestSolver),
            SolverKind::Scan => Box::new(ScanSolver),
            SolverKind::Adversarial => Box::new(AdversarialSolver::default()),
            SolverKind::Greedy => Box::new(GreedySolver),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Disjoint,
    NotDisjoint,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Disjoint => "DISJOINT",
            Verdict::NotDisjoint => "NOT-DISJOINT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimOutcome {
    NoClaim,
    /// Out of range, or the two rows differ.
    Invalid,
    FakeCollision,
    RealCollision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub outcomes: Vec<ClaimOutcome>,
    pub transcript: Transcript,
}

impl Decision {
    pub fn real_detected(&self) -> usize {
        self.outcomes.iter().filter(|&&o| o == ClaimOutcome::RealCollision).count()
    }
}

/// Bits spent verifying one claimed pair: the pair's indices, then both
/// symbols from every player.
pub fn verification_bits(params: &ReductionParams) -> u64 {
    2 * params.k as u64 * params.symbol_bits() + 2 * ceil_log2(params.tilde_m() as u64)
}

/// Decides disjointness with `repetitions` independent shuffled copies.
/// `NOT-DISJOINT` is only ever returned with a verified real collision in hand.
pub fn decide_disjointness<R: Rng + ?Sized>(
    disj: &DisjInstance,
    m: usize,
    solver: &dyn CollisionSolver,
    rng: &mut R,
    repetitions: usize,
) -> Result<Decision> {
    let params = ReductionParams::new(disj.k, m)?;
    let mut transcript = Transcript::new(params.k);
    let mut outcomes = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let coins = SharedCoins::sample(&params, rng)?;
        let artifact = build_artifact(disj, &params, &coins)?;
        let mut solver_rng = rng::seeded(rng.random());
        let run = solver.solve(&artifact.matrix, &mut solver_rng);
        transcript.absorb(&run.transcript);
        let outcome = match run.claim {
            None => ClaimOutcome::NoClaim,
            Some((i, j)) => {
                transcript.charge(0, 2 * ceil_log2(params.tilde_m() as u64), format!("verify:{rep}:pair"));
                for p in 0..params.k {
                    transcript.charge(p, 2 * params.symbol_bits(), format!("verify:{rep}:symbols"));
                }
                if !artifact.matrix.is_collision(i, j) {
                    ClaimOutcome::Invalid
                } else if artifact.is_fake(i) || artifact.is_fake(j) {
                    ClaimOutcome::FakeCollision
                } else {
                    ClaimOutcome::RealCollision
                }
            }
        };
        outcomes.push(outcome);
    }
    let verdict = if outcomes.contains(&ClaimOutcome::RealCollision) {
        Verdict::NotDisjoint
    } else {
        Verdict::Disjoint
    };
    Ok(Decision { verdict, outcomes, transcript })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimsReport {
    pub k: usize,
    pub m: usize,
    pub tuples: u64,
    pub disjoint_tuples: u64,
    /// Disjoint inputs always give distinct rows.
    pub claim1_ok: bool,
    /// `c` common elements always give at least `c 2^(k-1) m` real pairs.
    pub claim2_ok: bool,
    /// The count is exactly `c 2^(k-1) m` for every tuple.
    pub exact_count_ok: bool,
    pub first_failure: Option<String>,
}

/// Largest `k * m^(k-1)` (input bits) [`check_claims_exhaustive`] will enumerate.
pub const CLAIMS_ENUMERATION_BITS: usize = 20;

/// Checks both structural claims on every input tuple.
pub fn check_claims_exhaustive(k: usize, m: usize) -> Result<ClaimsReport> {
    let params = ReductionParams::new(k, m)?;
    let universe = params.universe();
    let bits = universe * k;
    if bits > CLAIMS_ENUMERATION_BITS {
        let size = if bits >= 128 { u128::MAX } else { 1u128 << bits };
        return Err(Error::EnumerationTooLarge(size));
    }
    let per_common = (m as u64) << (k - 1);
    let tuples = 1u64 << bits;
    let results: Vec<(bool, u64, u64)> = (0..tuples)
        .into_par_iter()
        .map(|t| {
            let sets = (0..k)
                .map(|p| (0..universe).map(|i| (t >> (p * universe + i)) & 1 == 1).collect())
                .collect();
            let disj = DisjInstance::new(sets).expect("sets have equal length");
            let common = disj.common_elements().len() as u64;
            let tilde = build_tilde_matrix(&disj, m).expect("parameters already validated");
            let (real, _) = count_real_collisions(&tilde, &[]);
            (common == 0, common, real)
        })
        .collect();

    let mut report = ClaimsReport {
        k,
        m,
        tuples,
        disjoint_tuples: 0,
        claim1_ok: true,
        claim2_ok: true,
        exact_count_ok: true,
        first_failure: None,
    };
    for (t, &(disjoint, common, real)) in results.iter().enumerate() {
        let mut failed = false;
        if disjoint {
            report.disjoint_tuples += 1;
            if real != 0 {
                report.claim1_ok = false;
                failed = true;
            }
        } else if real < common * per_common {
            report.claim2_ok = false;
            failed = true;
        }
        if real != common * per_common {
            report.exact_count_ok = false;
            failed = true;
        }
        if failed && report.first_failure.is_none() {
            report.first_failure = Some(format!("tuple {t}: {common} common elements, {real} real pairs"));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    /// Random sets with one planted common element.
    Intersecting,
    /// Random sets with all common elements removed.
    Disjoint,
}

#[derive(Debug, Clone, Copy)]
pub struct MonteCarloConfig {
    pub k: usize,
    pub m: usize,
    pub solver: SolverKind,
    pub inputs: InputKind,
    pub trials: usize,
    pub repetitions: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub verdict: Verdict,
    /// Repetitions that returned a verified real collision.
    pub real_detected: usize,
    pub bits_total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub k: usize,
    pub m: usize,
    pub trials: usize,
    pub repetitions: usize,
    /// Fraction of trials with verdict `NOT-DISJOINT`.
    pub not_disjoint_rate: f64,
    /// Fraction of single repetitions that returned a real collision.
    pub per_iteration_rate: f64,
    pub mean_bits: f64,
    pub records: Vec<TrialRecord>,
}

/// Runs independent trials; trial `i` draws everything from
/// `rng::child_rng(master_seed, i)`.
pub fn monte_carlo(config: &MonteCarloConfig) -> Result<MonteCarloSummary> {
    if config.trials == 0 || config.repetitions == 0 {
        return Err(Error::InvalidParameter("trials and repetitions must be positive".into()));
    }
    let params = ReductionParams::new(config.k, config.m)?;
    let solver = config.solver.solver();
    let records = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::child_rng(config.master_seed, trial as u64);
            let disj = match config.inputs {
                InputKind::Intersecting => DisjInstance::random_intersecting(params.k, params.universe(), &mut rng),
                InputKind::Disjoint => DisjInstance::random_disjoint(params.k, params.universe(), &mut rng),
            };
            let decision = decide_disjointness(&disj, params.m, solver.as_ref(), &mut rng, config.repetitions)?;
            Ok(TrialRecord {
                trial,
                verdict: decision.verdict,
                real_detected: decision.real_detected(),
                bits_total: decision.transcript.total_bits(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = records.len() as f64;
    let hits = records.iter().filter(|r| r.verdict == Verdict::NotDisjoint).count() as f64;
    let detections: usize = records.iter().map(|r| r.real_detected).sum();
    let bits: u64 = records.iter().map(|r| r.bits_total).sum();
    Ok(MonteCarloSummary {
        k: config.k,
        m: config.m,
        trials: config.trials,
        repetitions: config.repetitions,
        not_disjoint_rate: hits / n,
        per_iteration_rate: detections as f64 / (n * config.repetitions as f64),
        mean_bits: bits as f64 / n,
        records,
    })
}
