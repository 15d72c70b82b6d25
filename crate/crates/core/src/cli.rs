//! The `nihcoll` command line.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors. All randomness derives from `--seed`; experiment trial `i`
//! uses [`rng::derive_seed`]`(seed, i)`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bphp::{cnf_to_inequalities, generate_bphp, to_dimacs, LinearSystem};
use crate::collision::{greedy_protocol, greedy_schedule, pigeonhole_capacity, random_instance};
use crate::error::{Error, Result};
use crate::gadget::{gadget_matrices, verify_gadget};
use crate::proofsim::protocol::PartitionSpec;
use crate::proofsim::synth::{random_refutation, Shape, SynthConfig};
use crate::proofsim::{
    dt_to_protocol, lower_bound_estimate, proof_to_dt, ExactGt, ProofTree, Rule, Soundness, ThresholdDecisionTree,
};
use crate::reduction::{
    build_artifact, check_claims_exhaustive, monte_carlo, DisjInstance, InputKind, MonteCarloConfig,
    ReductionParams, SharedCoins, SolverKind, Verdict, DEFAULT_REPETITIONS,
};
use crate::rng;

#[derive(Debug, Parser)]
#[command(name = "nihcoll", version, about = "Number-in-hand collision finding and bit pigeonhole experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gadget matrices M0_k / M1_k.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Collision-finding protocol simulation.
    #[command(subcommand)]
    Coll(CollCommand),
    /// Disjointness-to-collision reduction.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Bit pigeonhole formulas.
    #[command(subcommand)]
    Bphp(BphpCommand),
    /// Tree-like refutations and threshold decision trees.
    #[command(subcommand)]
    Proof(ProofCommand),
    /// Lower-bound formula calculators.
    #[command(subcommand)]
    Bounds(BoundsCommand),
}

#[derive(Debug, Subcommand)]
enum GadgetCommand {
    /// Exhaustively check both gadget properties; prints a JSON report.
    Verify {
        #[arg(long)]
        k: usize,
    },
    /// Print one matrix in the text format.
    Dump {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        which: Which,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    M0,
    M1,
    F0,
    F1,
}

#[derive(Debug, Subcommand)]
enum CollCommand {
    /// Run the greedy subset-announcement protocol on a random instance.
    Run {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: u64,
        /// Coordinates; defaults to ell^k + 1.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-round CSV: round, player, live_size, subset_size, bits.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the instance as JSON.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ReduceCommand {
    /// Monte Carlo estimate of the reduction's success probability.
    Run {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SolverKind::Scan)]
        solver: SolverKind,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = InputKind::Intersecting)]
        inputs: InputKind,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        reps: usize,
        /// Per-trial CSV: trial, verdict, real_detected, bits_total.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check both structural claims on every input tuple.
    Claims {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// Dump one shuffled reduction matrix as JSON.
    Dump {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = InputKind::Intersecting)]
        inputs: InputKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum BphpCommand {
    /// Generate BPHP^n_m; prints DIMACS when no output file is given.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        dimacs: Option<PathBuf>,
        /// Linear-system JSON.
        #[arg(long)]
        ineq: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ProofCommand {
    /// Generate a random system with a sound tree-like refutation.
    Synth {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        leaves: usize,
        #[arg(long, value_enum, default_value_t = Shape::Random)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        system: PathBuf,
    },
    /// Convert a refutation into a shallow threshold decision tree.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Axiom system; inferred from the proof's leaves when omitted.
        #[arg(long)]
        system: Option<PathBuf>,
        /// Skip the enumeration soundness check.
        #[arg(long)]
        trust: bool,
    },
    /// Run the k-party protocol compiled from a decision tree.
    Run(ProofRunArgs),
}

#[derive(Debug, Args)]
struct ProofRunArgs {
    #[arg(long)]
    dt: PathBuf,
    #[arg(long)]
    system: PathBuf,
    /// Variable partition, `even:<k>`.
    #[arg(long)]
    partition: String,
    /// One assignment as a 0/1 string, variable 0 first.
    #[arg(long, conflicts_with = "exhaustive", required_unless_present = "exhaustive")]
    assignment: Option<String>,
    /// Run on every assignment.
    #[arg(long)]
    exhaustive: bool,
    /// Per-assignment CSV: assignment, axiom, violated, queries, bits.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum BoundsCommand {
    /// Tabulate the bound formulas (CSV).
    Table {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Outcome of a command that completed without an error.
enum Status {
    Ok,
    VerificationFailed,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(Status::Ok) => 0,
        Ok(Status::VerificationFailed) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::NotACollision(..) | Error::UnsoundProof(_) => 1,
                _ => 2,
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<Status> {
    match command {
        Command::Gadget(GadgetCommand::Verify { k }) => {
            let report = verify_gadget(k)?;
            print_json(out, &report)?;
            Ok(if report.property1_ok && report.property2_ok { Status::Ok } else { Status::VerificationFailed })
        }
        Command::Gadget(GadgetCommand::Dump { k, which }) => {
            let g = gadget_matrices(k)?;
            let m = match which {
                Which::M0 => &g.m0,
                Which::M1 => &g.m1,
                Which::F0 => &g.f0,
                Which::F1 => &g.f1,
            };
            write_out(out, &m.to_text())?;
            Ok(Status::Ok)
        }
        Command::Coll(CollCommand::Run { k, ell, m, seed, csv, instance }) => coll_run(k, ell, m, seed, csv, instance, out),
        Command::Reduce(cmd) => reduce(cmd, out),
        Command::Bphp(BphpCommand::Gen { n, m, dimacs, ineq }) => {
            let f = generate_bphp(n, m)?;
            let text = to_dimacs(&f);
            match &dimacs {
                Some(path) => write_file(path, &text)?,
                None if ineq.is_none() => write_out(out, &text)?,
                None => {}
            }
            if let Some(path) = &ineq {
                write_file(path, &to_json(&cnf_to_inequalities(&f))?)?;
            }
            Ok(Status::Ok)
        }
        Command::Proof(cmd) => proof(cmd, out),
        Command::Bounds(BoundsCommand::Table { n, k, csv }) => {
            let rows: Vec<BoundsRow> = n
                .iter()
                .flat_map(|&n| k.iter().map(move |&k| (n, k)))
                .map(|(n, k)| BoundsRow::compute(n, k))
                .collect::<Result<_>>()?;
            match csv {
                Some(path) => emit_csv(&rows, &path)?,
                None => write_csv(&rows, &mut *out)?,
            }
            Ok(Status::Ok)
        }
    }
}

fn coll_run(
    k: usize,
    ell: u64,
    m: Option<usize>,
    seed: u64,
    csv: Option<PathBuf>,
    instance_out: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<Status> {
    let m = match m {
        Some(m) => m,
        None => usize::try_from(pigeonhole_capacity(k, ell))
            .ok()
            .and_then(|c| c.checked_add(1))
            .ok_or_else(|| Error::OutOfRange(format!("ell^k + 1 too large for k = {k}, ell = {ell}")))?,
    };
    let inst = random_instance(k, m, ell, seed)?;
    if let Some(path) = &instance_out {
        write_file(path, &to_json(&inst)?)?;
    }
    let outcome = greedy_protocol(&inst)?;
    let rounds: Vec<RoundRow> = (0..k)
        .map(|p| RoundRow {
            round: p + 1,
            player: p,
            live_size: outcome.round_sizes[p],
            subset_size: outcome.round_sizes[p + 1],
            bits: outcome.transcript.bits_per_player[p],
        })
        .collect();
    if let Some(path) = &csv {
        emit_csv(&rounds, path)?;
    }
    #[derive(Serialize)]
    struct Summary {
        k: usize,
        m: usize,
        ell: u64,
        seed: u64,
        pair: (usize, usize),
        round_sizes: Vec<usize>,
        bits_per_player: Vec<u64>,
        bits_total: u64,
        schedule_bits_total: u64,
    }
    let (_, schedule_bits) = greedy_schedule(k, ell, m);
    print_json(
        out,
        &Summary {
            k,
            m,
            ell,
            seed,
            pair: outcome.pair,
            round_sizes: outcome.round_sizes.clone(),
            bits_per_player: outcome.transcript.bits_per_player.clone(),
            bits_total: outcome.transcript.total_bits(),
            schedule_bits_total: schedule_bits.iter().sum(),
        },
    )?;
    Ok(Status::Ok)
}

fn reduce(cmd: ReduceCommand, out: &mut dyn Write) -> Result<Status> {
    match cmd {
        ReduceCommand::Run { k, m, seed, solver, trials, inputs, reps, csv } => {
            let summary = monte_carlo(&MonteCarloConfig {
                k,
                m,
                solver,
                inputs,
                trials,
                repetitions: reps,
                master_seed: seed,
            })?;
            if let Some(path) = &csv {
                emit_csv(&summary.records, path)?;
            }
            #[derive(Serialize)]
            struct Summary {
                k: usize,
                m: usize,
                seed: u64,
                solver: SolverKind,
                inputs: InputKind,
                trials: usize,
                repetitions: usize,
                not_disjoint_rate: f64,
                per_iteration_rate: f64,
                mean_bits: f64,
                per_iteration_reference: f64,
                success_reference: f64,
            }
            print_json(
                out,
                &Summary {
                    k,
                    m,
                    seed,
                    solver,
                    inputs,
                    trials,
                    repetitions: reps,
                    not_disjoint_rate: summary.not_disjoint_rate,
                    per_iteration_rate: summary.per_iteration_rate,
                    mean_bits: summary.mean_bits,
                    per_iteration_reference: 2.0 / 9.0,
                    success_reference: 1.0 - (7.0f64 / 9.0).powi(reps as i32),
                },
            )?;
            // a NOT-DISJOINT verdict on disjoint inputs would break soundness
            let unsound = inputs == InputKind::Disjoint
                && summary.records.iter().any(|r| r.verdict == Verdict::NotDisjoint);
            Ok(if unsound { Status::VerificationFailed } else { Status::Ok })
        }
        ReduceCommand::Claims { k, m } => {
            let report = check_claims_exhaustive(k, m)?;
            print_json(out, &report)?;
            Ok(if report.claim1_ok && report.claim2_ok { Status::Ok } else { Status::VerificationFailed })
        }
        ReduceCommand::Dump { k, m, seed, inputs, out: path } => {
            let params = ReductionParams::new(k, m)?;
            let mut rng = rng::seeded(seed);
            let disj = match inputs {
                InputKind::Intersecting => DisjInstance::random_intersecting(k, params.universe(), &mut rng),
                InputKind::Disjoint => DisjInstance::random_disjoint(k, params.universe(), &mut rng),
            };
            let coins = SharedCoins::sample(&params, &mut rng)?;
            let artifact = build_artifact(&disj, &params, &coins)?;
            #[derive(Serialize)]
            struct Dump<'a> {
                inputs: &'a DisjInstance,
                artifact: &'a crate::reduction::ReductionArtifact,
            }
            let text = to_json(&Dump { inputs: &disj, artifact: &artifact })?;
            match path {
                Some(p) => write_file(&p, &text)?,
                None => write_out(out, &text)?,
            }
            Ok(Status::Ok)
        }
    }
}

fn proof(cmd: ProofCommand, out: &mut dyn Write) -> Result<Status> {
    match cmd {
        ProofCommand::Synth { vars, leaves, shape, seed, proof, system } => {
            let mut rng = rng::seeded(seed);
            let (sys, tree) = random_refutation(SynthConfig::new(vars, leaves, shape), &mut rng)?;
            write_file(&proof, &to_json(&tree)?)?;
            write_file(&system, &to_json(&sys)?)?;
            Ok(Status::Ok)
        }
        ProofCommand::Convert { input, out: dt_path, system, trust } => {
            let tree: ProofTree = read_json(&input)?;
            let sys = match &system {
                Some(path) => read_json(path)?,
                None => system_from_leaves(&tree)?,
            };
            let soundness = if trust { Soundness::Trust } else { Soundness::Check };
            let dt = proof_to_dt(&tree, &sys, soundness)?;
            write_file(&dt_path, &to_json(&dt)?)?;
            #[derive(Serialize)]
            struct Summary {
                proof_size: usize,
                depth: usize,
                nodes: usize,
            }
            print_json(out, &Summary { proof_size: tree.size(), depth: dt.depth(), nodes: dt.nodes.len() })?;
            Ok(Status::Ok)
        }
        ProofCommand::Run(args) => proof_run(args, out),
    }
}

fn proof_run(args: ProofRunArgs, out: &mut dyn Write) -> Result<Status> {
    let dt: ThresholdDecisionTree = read_json(&args.dt)?;
    let system: LinearSystem = read_json(&args.system)?;
    system.validate()?;
    let spec: PartitionSpec = args.partition.parse()?;
    let partition = spec.resolve(system.num_vars)?;
    let protocol = dt_to_protocol(&dt, &system, &partition, &ExactGt)?;

    let assignments: Vec<Vec<bool>> = match &args.assignment {
        Some(bits) => vec![parse_assignment(bits, system.num_vars)?],
        None => {
            if system.num_vars > 24 {
                return Err(Error::EnumerationTooLarge(1u128 << system.num_vars));
            }
            (0u64..1 << system.num_vars)
                .map(|mask| (0..system.num_vars).map(|v| (mask >> (system.num_vars - 1 - v)) & 1 == 1).collect())
                .collect()
        }
    };
    let mut rows = Vec::with_capacity(assignments.len());
    for a in &assignments {
        let run = protocol.run(a)?;
        rows.push(RunRow {
            assignment: a.iter().map(|&x| if x { '1' } else { '0' }).collect(),
            axiom: run.axiom,
            violated: run.violated,
            queries: run.queries,
            bits: run.transcript.total_bits(),
        });
    }
    if let Some(path) = &args.csv {
        emit_csv(&rows, path)?;
    }
    let failures = rows.iter().filter(|r| !r.violated).count();
    if args.exhaustive {
        #[derive(Serialize)]
        struct Summary {
            assignments: usize,
            failures: usize,
            max_queries: usize,
            max_bits: u64,
        }
        print_json(
            out,
            &Summary {
                assignments: rows.len(),
                failures,
                max_queries: rows.iter().map(|r| r.queries).max().unwrap_or(0),
                max_bits: rows.iter().map(|r| r.bits).max().unwrap_or(0),
            },
        )?;
    } else {
        print_json(out, &rows[0])?;
    }
    Ok(if failures == 0 { Status::Ok } else { Status::VerificationFailed })
}

fn parse_assignment(bits: &str, num_vars: usize) -> Result<Vec<bool>> {
    let parsed: Vec<bool> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidParameter(format!("assignment character {other:?}"))),
        })
        .collect::<Result<_>>()?;
    if parsed.len() != num_vars {
        return Err(Error::DimensionMismatch(format!(
            "assignment has {} bits, system has {num_vars} variables",
            parsed.len()
        )));
    }
    Ok(parsed)
}

/// Axiom `i` is the inequality of the leaf citing it. Indices no leaf cites
/// get the placeholder `0 <= 0`, which the converted tree never reaches.
fn system_from_leaves(tree: &ProofTree) -> Result<LinearSystem> {
    let mut rows: Vec<Option<crate::bphp::Inequality>> = Vec::new();
    for node in &tree.nodes {
        if let Rule::Axiom(a) = node.rule {
            if rows.len() <= a {
                rows.resize(a + 1, None);
            }
            rows[a] = Some(node.ineq.clone());
        }
    }
    let placeholder = crate::bphp::Inequality::new(vec![0; tree.num_vars], 0);
    LinearSystem::new(tree.num_vars, rows.into_iter().map(|r| r.unwrap_or_else(|| placeholder.clone())).collect())
}

/// A record that can be written as one CSV row.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Writes `rows` with a header line; probabilities use six decimals.
pub fn write_csv<T: CsvRecord, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(T::header())?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn emit_csv<T: CsvRecord>(rows: &[T], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    write_csv(rows, std::io::BufWriter::new(file))
}

pub fn format_float(x: f64) -> String {
    format!("{x:.6}")
}

impl CsvRecord for crate::reduction::TrialRecord {
    fn header() -> &'static [&'static str] {
        &["trial", "verdict", "real_detected", "bits_total"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.verdict.as_str().to_string(),
            self.real_detected.to_string(),
            self.bits_total.to_string(),
        ]
    }
}

struct RoundRow {
    round: usize,
    player: usize,
    live_size: usize,
    subset_size: usize,
    bits: u64,
}

impl CsvRecord for RoundRow {
    fn header() -> &'static [&'static str] {
        &["round", "player", "live_size", "subset_size", "bits"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.round.to_string(),
            self.player.to_string(),
            self.live_size.to_string(),
            self.subset_size.to_string(),
            self.bits.to_string(),
        ]
    }
}

#[derive(Serialize)]
struct RunRow {
    assignment: String,
    axiom: usize,
    violated: bool,
    queries: usize,
    bits: u64,
}

impl CsvRecord for RunRow {
    fn header() -> &'static [&'static str] {
        &["assignment", "axiom", "violated", "queries", "bits"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.assignment.clone(),
            self.axiom.to_string(),
            self.violated.to_string(),
            self.queries.to_string(),
            self.bits.to_string(),
        ]
    }
}

struct BoundsRow {
    n: u64,
    k: u32,
    t_lb: f64,
    size_exponent: f64,
    corollary_exponent: f64,
    /// Exact greedy protocol cost at `m = n + 1` when `n` is a perfect k-th power.
    greedy_bits: Option<u64>,
}

impl BoundsRow {
    fn compute(n: u64, k: u32) -> Result<Self> {
        if n < 4 || k < 2 {
            return Err(Error::InvalidParameter(format!("bounds need n >= 4 and k >= 2, got n = {n}, k = {k}")));
        }
        let e = lower_bound_estimate(n as f64, k);
        let root = (n as f64).powf(1.0 / k as f64).round() as u64;
        let greedy_bits = [root.saturating_sub(1), root, root + 1]
            .into_iter()
            .find(|&ell| ell >= 2 && pigeonhole_capacity(k as usize, ell) == n as u128)
            .filter(|_| n < 1 << 24)
            .map(|ell| greedy_schedule(k as usize, ell, n as usize + 1).1.iter().sum());
        Ok(BoundsRow {
            n,
            k,
            t_lb: e.t_lb,
            size_exponent: e.size_exponent,
            corollary_exponent: e.corollary_exponent,
            greedy_bits,
        })
    }
}

impl CsvRecord for BoundsRow {
    fn header() -> &'static [&'static str] {
        &["n", "k", "t_lb", "size_exponent", "corollary_exponent", "greedy_bits"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.k.to_string(),
            format_float(self.t_lb),
            format_float(self.size_exponent),
            format_float(self.corollary_exponent),
            self.greedy_bits.map(|b| b.to_string()).unwrap_or_default(),
        ]
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    write_out(out, &to_json(value)?)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("nihcoll").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn gadget_verify_reports_pairs() {
        let (code, out, _) = run_capture(&["gadget", "verify", "--k", "6"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["pair_count"], 32);
        assert_eq!(v["property1_ok"], true);
    }

    #[test]
    fn gadget_dump_text() {
        let (code, out, _) = run_capture(&["gadget", "dump", "--k", "2", "--which", "m1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "4 2\n00\n00\n11\n11\n");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["gadget", "verify"]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["bphp", "gen", "--n", "6", "--m", "3"]).0, 2);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("gadget"));
    }

    #[test]
    fn bounds_table_row() {
        let (code, out, _) = run_capture(&["bounds", "table", "--n", "65536", "--k", "4"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "n,k,t_lb,size_exponent,corollary_exponent,greedy_bits");
        assert!(lines[1].starts_with("65536,4,512.000000,"), "{}", lines[1]);
    }

    #[test]
    fn csv_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        emit_csv::<RoundRow>(&[], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "round,player,live_size,subset_size,bits\n");
        let rows: Vec<RoundRow> = (0..3)
            .map(|i| RoundRow { round: i, player: i, live_size: 1, subset_size: 1, bits: 0 })
            .collect();
        emit_csv(&rows, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 4);
        assert_eq!(format_float(2.0 / 9.0), "0.222222");
    }

    #[test]
    fn subcommand_help_lists_flags() {
        let cases: &[(&[&str], &[&str])] = &[
            (&["gadget", "verify"], &["--k"]),
            (&["gadget", "dump"], &["--k", "--which"]),
            (&["coll", "run"], &["--k", "--ell", "--m", "--seed", "--csv", "--instance"]),
            (&["reduce", "run"], &["--k", "--m", "--seed", "--solver", "--trials", "--inputs", "--reps", "--csv"]),
            (&["reduce", "claims"], &["--k", "--m"]),
            (&["reduce", "dump"], &["--k", "--m", "--seed", "--inputs", "--out"]),
            (&["bphp", "gen"], &["--n", "--m", "--dimacs", "--ineq"]),
            (&["proof", "synth"], &["--vars", "--leaves", "--shape", "--seed", "--proof", "--system"]),
            (&["proof", "convert"], &["--in", "--out", "--system", "--trust"]),
            (&["proof", "run"], &["--dt", "--system", "--partition", "--assignment", "--exhaustive", "--csv"]),
            (&["bounds", "table"], &["--n", "--k", "--csv"]),
        ];
        for (cmd, flags) in cases {
            let mut args = cmd.to_vec();
            args.push("--help");
            let (code, out, _) = run_capture(&args);
            assert_eq!(code, 0, "{cmd:?}");
            for flag in *flags {
                assert!(out.contains(flag), "{cmd:?} help lacks {flag}");
            }
        }
    }
}
