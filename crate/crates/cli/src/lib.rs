//! Implementation of the `pnhs` command line.
//!
//! [`run`] parses arguments, executes one command and writes its report to
//! the given streams; it returns the process exit code: 0 for a definite
//! answer, 2 for an unknown or inconclusive one and 1 for usage, input or
//! parse errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pnhs::homespace::{Blocker, Chain, Checker, HomeSpaceVerdict};
use pnhs::reach::{decide_with_stats, Budget, ReachQuery, ReachStats, ReachVerdict};
use pnhs::vj::{min_basis, Memoized};
use pnhs::witness::{witness_linear, DcbOracle, OracleStats, WitnessError, WitnessResult};
use pnhs::{format_semilinear, parse_net, parse_semilinear, Configuration, PetriNet, SemilinearSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_DEFINITE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pnhs", version, about = "Decide whether a semilinear set is a home-space of a Petri net")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Is every configuration reachable from X able to reach H?
    Check {
        #[command(flatten)]
        common: Common,
        /// Semilinear file with the initial set X.
        #[arg(long)]
        from: PathBuf,
        /// Semilinear file with the candidate home-space H.
        #[arg(long)]
        home: PathBuf,
    },
    /// Compute a non-home-space witness for a linear set.
    Witness {
        #[command(flatten)]
        common: Common,
        /// Semilinear file with exactly one linear component.
        #[arg(long)]
        linear: PathBuf,
    },
    /// Can some member of one semilinear set reach a member of another?
    Reach {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Minimal basis of the configurations that can lower their token count,
    /// or, with --linear, of the presentation pairs whose basis can shrink.
    Minbasis {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        linear: Option<PathBuf>,
    },
    /// Random walk from a configuration.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Start configuration, e.g. "1,0" or "1 0".
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Petri net file.
    #[arg(long)]
    net: PathBuf,
    /// Explored configurations per reachability sub-query [default: 100000,
    /// or PNHS_BUDGET].
    #[arg(long)]
    node_budget: Option<usize>,
    /// Wall-clock cap per reachability call, in seconds.
    #[arg(long, default_value_t = 10)]
    time_budget_secs: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized commands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: pnhs::ParseError },
    #[error("{0}")]
    Invalid(String),
    #[error("PNHS_BUDGET must be a positive integer, got {0:?}")]
    EnvBudget(String),
}

/// A finished command: what to print and how to exit.
struct Report {
    code: i32,
    text: String,
    json: Value,
}

/// Runs one invocation. `env_budget` is the value of `PNHS_BUDGET`, if set;
/// `--node-budget` takes precedence over it.
pub fn run<I, T>(args: I, env_budget: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_DEFINITE };
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(stream, "{}", e.render());
            return code;
        }
    };
    let format = match &cli.command {
        Command::Check { common, .. }
        | Command::Witness { common, .. }
        | Command::Reach { common, .. }
        | Command::Minbasis { common, .. }
        | Command::Simulate { common, .. } => common.format,
    };
    match execute(cli.command, env_budget) {
        Ok(report) => {
            let written = match format {
                Format::Text => write!(out, "{}", report.text),
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("JSON values serialize")
                ),
            };
            if written.is_err() {
                return EXIT_ERROR;
            }
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn budget(common: &Common, env_budget: Option<&str>) -> Result<Budget, CliError> {
    let nodes = match (common.node_budget, env_budget) {
        (Some(n), _) => n,
        (None, Some(s)) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::EnvBudget(s.to_string()))?,
        (None, None) => Budget::default().nodes,
    };
    if nodes == 0 {
        return Err(CliError::Invalid("--node-budget must be positive".into()));
    }
    if common.time_budget_secs == 0 {
        return Err(CliError::Invalid("--time-budget-secs must be positive".into()));
    }
    Ok(Budget {
        nodes,
        time: Duration::from_secs(common.time_budget_secs),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_net(path: &Path) -> Result<PetriNet, CliError> {
    parse_net(&read(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn load_set(path: &Path, dim: usize) -> Result<SemilinearSet, CliError> {
    parse_semilinear(&read(path)?, dim).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn execute(command: Command, env_budget: Option<&str>) -> Result<Report, CliError> {
    match command {
        Command::Check { common, from, home } => {
            let net = load_net(&common.net)?;
            let x = load_set(&from, net.dim())?;
            let h = load_set(&home, net.dim())?;
            let b = budget(&common, env_budget)?;
            Ok(check(&net, &x, &h, b))
        }
        Command::Witness { common, linear } => {
            let net = load_net(&common.net)?;
            let l = load_set(&linear, net.dim())?;
            let [component] = l.components() else {
                return Err(CliError::Invalid(format!(
                    "{} must contain exactly one linear component, found {}",
                    linear.display(),
                    l.components().len()
                )));
            };
            let b = budget(&common, env_budget)?;
            Ok(witness(&net, component, b))
        }
        Command::Reach { common, from, to } => {
            let net = load_net(&common.net)?;
            let src = load_set(&from, net.dim())?;
            let tgt = load_set(&to, net.dim())?;
            let b = budget(&common, env_budget)?;
            Ok(reach(&net, src, tgt, b))
        }
        Command::Minbasis { common, linear } => {
            let net = load_net(&common.net)?;
            let periods = match &linear {
                None => Vec::new(),
                Some(path) => {
                    let l = load_set(path, net.dim())?;
                    let [component] = l.components() else {
                        return Err(CliError::Invalid(format!(
                            "{} must contain exactly one linear component",
                            path.display()
                        )));
                    };
                    component.normalized().periods().to_vec()
                }
            };
            let b = budget(&common, env_budget)?;
            Ok(minbasis(&net, &periods, b))
        }
        Command::Simulate { common, init, steps } => {
            let net = load_net(&common.net)?;
            let start = parse_configuration(&init, net.dim())?;
            Ok(simulate(&net, start, steps, common.seed))
        }
    }
}

fn parse_configuration(text: &str, dim: usize) -> Result<Configuration, CliError> {
    let entries: Result<Vec<u64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse::<u64>)
        .collect();
    let entries = entries.map_err(|e| CliError::Invalid(format!("--init {text:?}: {e}")))?;
    if entries.len() != dim {
        return Err(CliError::Invalid(format!(
            "--init has {} entries, expected {dim}",
            entries.len()
        )));
    }
    Ok(Configuration::new(entries))
}

fn vector(v: &[u64]) -> Value {
    json!(v)
}

fn stats_json(s: &ReachStats) -> Value {
    json!({
        "reach_queries": s.queries,
        "pair_instances": s.pairs,
        "nodes": s.nodes,
        "unknown": s.unknown,
    })
}

fn budget_json(b: Budget) -> Value {
    json!({ "node_budget": b.nodes, "time_budget_secs": b.time.as_secs() })
}

fn action_names(net: &PetriNet, steps: &[usize]) -> Vec<String> {
    steps.iter().map(|&s| net.actions()[s].name.clone()).collect()
}

fn chain_json(net: &PetriNet, chain: &Chain) -> Value {
    let snapshots: Vec<Value> = chain
        .snapshots
        .iter()
        .zip(&chain.components)
        .zip(&chain.checkpoints)
        .map(|((c, comp), k)| json!({ "component": comp, "after_steps": k, "configuration": vector(c) }))
        .collect();
    json!({
        "start": vector(chain.start()),
        "steps": action_names(net, &chain.trace.steps),
        "snapshots": snapshots,
    })
}

fn chain_text(net: &PetriNet, chain: &Chain) -> String {
    let mut s = format!("chain from {}\n", chain.start());
    let names = action_names(net, &chain.trace.steps);
    let mut done = 0;
    for ((c, comp), &k) in chain.snapshots.iter().zip(&chain.components).zip(&chain.checkpoints) {
        if k > done {
            s += &format!("  fire {}\n", names[done..k].join(" "));
            done = k;
        }
        s += &format!("  reach {c} in the witness of H component {comp}\n");
    }
    s
}

fn witness_summary_json(i: usize, w: &WitnessResult) -> Value {
    json!({
        "component": i,
        "witness_components": w.witness.components().len(),
        "min_dcb": w.provenance.min_dcb.elements(),
        "small_bases": w.provenance.min_uy.len(),
        "oracle_calls": w.provenance.oracle_calls,
        "oracle_shortcuts": w.provenance.oracle_shortcuts,
        "reach": stats_json(&w.provenance.reach),
    })
}

fn witness_error_json(e: &WitnessError) -> Value {
    match e {
        WitnessError::Inconclusive { stage, query } => {
            json!({ "kind": "inconclusive", "stage": stage, "query": query.to_string() })
        }
        WitnessError::InconsistentOracle { stage, query } => {
            json!({ "kind": "inconsistent-oracle", "stage": stage, "query": query.to_string() })
        }
        WitnessError::Set(e) => json!({ "kind": "set", "message": e.to_string() }),
    }
}

fn check(net: &PetriNet, x: &SemilinearSet, h: &SemilinearSet, b: Budget) -> Report {
    let mut checker = Checker::new(net, b);
    let report = checker.check(x, h).expect("dimensions come from the net");
    let label = report.verdict.label();
    let mut text = format!("verdict: {label}\n");
    let mut out = json!({
        "version": VERSION,
        "command": "check",
        "verdict": label,
    });
    let code = match &report.verdict {
        HomeSpaceVerdict::HomeSpace => EXIT_DEFINITE,
        HomeSpaceVerdict::NotHomeSpace(chain) => {
            text += &chain_text(net, chain);
            out["witness_chain"] = chain_json(net, chain);
            EXIT_DEFINITE
        }
        HomeSpaceVerdict::Unknown(blocker) => {
            let (t, j) = match blocker {
                Blocker::Witness { component, error } => (
                    format!("blocked: witness for H component {component}: {error}\n"),
                    json!({ "kind": "witness", "component": component, "error": witness_error_json(error) }),
                ),
                Blocker::Reach(r) => (
                    format!("blocked: final reachability query: {}\n", r.kind()),
                    json!({ "kind": "reach", "reason": r.kind() }),
                ),
            };
            text += &t;
            out["blocker"] = j;
            EXIT_UNKNOWN
        }
    };
    let mut components = Vec::new();
    for (i, w) in report.witnesses.iter().enumerate() {
        text += &format!(
            "witness {i}: {} linear components, {} oracle calls, {} reachability queries\n",
            w.witness.components().len(),
            w.provenance.oracle_calls,
            w.provenance.reach.queries
        );
        components.push(witness_summary_json(i, w));
    }
    if let Some(s) = &report.freeze {
        text += &format!("freeze query: {} pair instances, {} nodes\n", s.pairs, s.nodes);
    }
    out["provenance"] = json!({
        "witnesses": components,
        "freeze": report.freeze.as_ref().map(stats_json),
        "budget": budget_json(b),
    });
    Report { code, text, json: out }
}

fn witness(net: &PetriNet, l: &pnhs::LinearSet, b: Budget) -> Report {
    match witness_linear(net, l, b) {
        Ok(w) => {
            let set = format_semilinear(&w.witness);
            let p = &w.provenance;
            let mut text = set.clone();
            text += &format!("# MIN(DCB): {}\n", basis_text(p.min_dcb.elements()));
            for (y, basis) in &p.min_uy {
                text += &format!("# MIN(U_y) for y = {}: {}\n", Configuration::from(y.as_slice()), basis_text(basis.elements()));
            }
            text += &format!(
                "# {} oracle calls ({} answered directly), {} reachability queries\n",
                p.oracle_calls, p.oracle_shortcuts, p.reach.queries
            );
            let min_uy: Vec<Value> = p
                .min_uy
                .iter()
                .map(|(y, basis)| json!({ "y": y, "basis": basis.elements() }))
                .collect();
            let json = json!({
                "version": VERSION,
                "command": "witness",
                "verdict": "witness",
                "witness": set,
                "provenance": {
                    "periods": p.periods,
                    "min_dcb": p.min_dcb.elements(),
                    "min_uy": min_uy,
                    "pieces": p.pieces.len(),
                    "oracle_calls": p.oracle_calls,
                    "oracle_shortcuts": p.oracle_shortcuts,
                    "reach": stats_json(&p.reach),
                    "budget": budget_json(b),
                },
            });
            Report {
                code: EXIT_DEFINITE,
                text,
                json,
            }
        }
        Err(e) => Report {
            code: EXIT_UNKNOWN,
            text: format!("verdict: inconclusive\nblocked: {e}\n"),
            json: json!({
                "version": VERSION,
                "command": "witness",
                "verdict": "inconclusive",
                "blocker": witness_error_json(&e),
                "provenance": { "budget": budget_json(b) },
            }),
        },
    }
}

fn basis_text(elements: &[Vec<u64>]) -> String {
    if elements.is_empty() {
        return "{}".into();
    }
    let parts: Vec<String> = elements
        .iter()
        .map(|e| Configuration::from(e.as_slice()).to_string())
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn reach(net: &PetriNet, src: SemilinearSet, tgt: SemilinearSet, b: Budget) -> Report {
    let q = ReachQuery::new(net.clone(), src, tgt).expect("dimensions come from the net");
    let (verdict, stats) = decide_with_stats(&q, b);
    let mut text = format!("verdict: {verdict}\n");
    let mut out = json!({
        "version": VERSION,
        "command": "reach",
        "verdict": verdict.to_string(),
    });
    let code = match &verdict {
        ReachVerdict::Reachable(w) => {
            let names = action_names(net, &w.run.steps);
            text += &format!("run: {} --[{}]--> {}\n", w.run.from, names.join(" "), w.run.to);
            out["witness_chain"] = json!({
                "start": vector(&w.run.from),
                "steps": names,
                "end": vector(&w.run.to),
                "source_component": w.source_component,
                "target_component": w.target_component,
            });
            EXIT_DEFINITE
        }
        ReachVerdict::Unreachable(certs) => {
            let kinds: Vec<&str> = certs.iter().map(|c| c.kind()).collect();
            text += &format!("certificates: {}\n", if kinds.is_empty() { "empty set".to_string() } else { kinds.join(", ") });
            out["certificates"] = json!(kinds);
            EXIT_DEFINITE
        }
        ReachVerdict::Unknown(r) => {
            text += &format!("reason: {}\n", r.kind());
            out["reason"] = json!(r.kind());
            EXIT_UNKNOWN
        }
    };
    out["provenance"] = json!({ "reach": stats_json(&stats), "budget": budget_json(b) });
    Report { code, text, json: out }
}

fn minbasis(net: &PetriNet, periods: &[Vec<u64>], b: Budget) -> Report {
    let stats = OracleStats::default();
    let oracle = Memoized::new(DcbOracle::new(net, periods, b, &stats));
    let what = if periods.is_empty() { "MIN(DC)" } else { "MIN(DCB)" };
    let provenance = |stats: &OracleStats| {
        json!({
            "oracle_calls": stats.calls(),
            "oracle_shortcuts": stats.shortcuts(),
            "reach": stats_json(&stats.reach()),
            "budget": budget_json(b),
        })
    };
    match min_basis(&oracle) {
        Ok(basis) => {
            let mut text = format!("{what} = {}\n", basis_text(basis.elements()));
            text += &format!("# {} oracle calls\n", stats.calls());
            Report {
                code: EXIT_DEFINITE,
                text,
                json: json!({
                    "version": VERSION,
                    "command": "minbasis",
                    "verdict": "basis",
                    "set": what,
                    "basis": basis.elements(),
                    "provenance": provenance(&stats),
                }),
            }
        }
        Err(e) => Report {
            code: EXIT_UNKNOWN,
            text: format!("verdict: inconclusive\nblocked: {e}\n"),
            json: json!({
                "version": VERSION,
                "command": "minbasis",
                "verdict": "inconclusive",
                "set": what,
                "blocker": e.to_string(),
                "provenance": provenance(&stats),
            }),
        },
    }
}

/// Uniform random walk over enabled actions.
pub fn random_walk(net: &PetriNet, start: Configuration, steps: usize, seed: u64) -> (pnhs::Trace, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start.clone();
    let mut taken = Vec::new();
    let mut deadlock = false;
    for _ in 0..steps {
        let options: Vec<(usize, Configuration)> = net.successors(&cur).collect();
        if options.is_empty() {
            deadlock = true;
            break;
        }
        let (a, next) = options[rng.gen_range(0..options.len())].clone();
        taken.push(a);
        cur = next;
    }
    if !deadlock && net.successors(&cur).next().is_none() {
        deadlock = true;
    }
    (
        pnhs::Trace {
            start,
            steps: taken,
            end: cur,
        },
        deadlock,
    )
}

fn simulate(net: &PetriNet, start: Configuration, steps: usize, seed: u64) -> Report {
    let (trace, deadlock) = random_walk(net, start, steps, seed);
    let mut cur = trace.start.clone();
    let mut text = format!("start {cur}\n");
    for &s in &trace.steps {
        cur = net.fire(&cur, s).expect("walk only fires enabled actions");
        text += &format!("{} -> {cur}\n", net.actions()[s].name);
    }
    if deadlock {
        text += &format!("deadlock at {}\n", trace.end);
    }
    Report {
        code: EXIT_DEFINITE,
        text,
        json: json!({
            "version": VERSION,
            "command": "simulate",
            "verdict": if deadlock { "deadlock" } else { "running" },
            "witness_chain": {
                "start": vector(&trace.start),
                "steps": action_names(net, &trace.steps),
                "end": vector(&trace.end),
            },
            "provenance": { "seed": seed, "requested_steps": steps },
        }),
    }
}
