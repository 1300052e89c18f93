//! Command-line toolkit: parameter checking, encoding, decoding, channel
//! simulation, secrecy audits, bound tables, wire-protocol wrapping, and
//! brute-force decoder cross-checks.
//!
//! Reports are line-delimited `kind key=value ...` records behind `#schema`
//! lines (bound tables are CSV).  Output is deterministic for a fixed
//! parameter document and seed.  Exit codes: 0 success, 2 bad invocation or
//! unreadable config, 3 structurally infeasible parameters, 4 failed
//! secrecy audit, 5 decoder/oracle mismatch.

use awtp_core::awtp::{capacity_bound, AwtpConfig, AwtpParams, DecodeOutcome};
use awtp_core::channel::{
    reliability_estimate, ChannelSpec, EvalWindows, FillerPlacement, ReliabilityReport,
    SecrecyInstance, StrategyKind,
};
use awtp_core::fields::PrimeField;
use awtp_core::frs::{format_symbols, parse_symbols, symbol_distance, FrsParams, ReceivedWord};
use awtp_core::report::{join_csv, render_csv, render_report, Record};
use awtp_core::smt::{smt_lower_bound, SmtProtocol};
use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "awtp", version, about = "adversarial wiretap code toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parameter document operations
    #[command(subcommand)]
    Params(ParamsCommand),
    /// Encode a message into a codeword file
    Encode(EncodeArgs),
    /// Decode a (possibly corrupted) codeword file
    Decode(DecodeArgs),
    /// Run an adversary campaign and report decode outcomes
    Simulate(SimulateArgs),
    /// Certify secrecy by rank audit and exhaustive view enumeration
    AuditSecrecy(AuditArgs),
    /// Tabulate rate bounds over a parameter grid (CSV)
    Bounds(BoundsArgs),
    /// Wrap the code as a 1-round N-wire transmission protocol
    Smt(SmtArgs),
    /// Cross-check the list decoder against brute force
    Oracle(OracleArgs),
}

#[derive(Subcommand)]
enum ParamsCommand {
    /// Validate a document and print the feasibility report
    Check(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Parameter document (TOML)
    #[arg(long)]
    params: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    params: PathBuf,
    /// Message coordinates, space separated (d*mu base-field values)
    #[arg(long, conflicts_with = "input")]
    message: Option<String>,
    /// File of message coordinates
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Overrides the seed in the document
    #[arg(long)]
    seed: Option<u64>,
    /// Codeword file destination (stdout otherwise)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    params: PathBuf,
    /// Codeword file (one symbol per line)
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    params: PathBuf,
    /// null | random-writer | two-pair | adaptive-probe | over-budget
    #[arg(long, default_value = "random-writer")]
    adversary: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Share one read/write position pool (needs equal budgets)
    #[arg(long)]
    restricted: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Audit the deployed layout of a parameter document
    #[arg(long)]
    params: Option<PathBuf>,
    /// Raw layout: field order (prime), with --u --N --secret --filler --read
    #[arg(long, requires_all = ["u", "n_sym", "secret", "filler", "read"], conflicts_with = "params")]
    q: Option<u64>,
    #[arg(long)]
    u: Option<usize>,
    #[arg(long = "N")]
    n_sym: Option<usize>,
    /// Secret coefficient count
    #[arg(long)]
    secret: Option<usize>,
    /// Filler coefficient count
    #[arg(long)]
    filler: Option<usize>,
    /// Adversary read budget in symbols
    #[arg(long)]
    read: Option<usize>,
    /// Random secret pairs for the exhaustive audit
    #[arg(long, default_value_t = 5)]
    pairs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Also audit a deliberately broken layout and expect it flagged
    #[arg(long)]
    control: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BoundKind {
    /// Achievable-rate upper bound over rho_r, rho_w, eps, alphabet
    Capacity,
    /// Wire-protocol transmission-rate lower bound over n, t, eps, alphabet
    Smt,
}

#[derive(Args)]
struct BoundsArgs {
    /// Semicolon-separated axes: name=v | name=v1,v2 | name=start:stop:step
    #[arg(long)]
    grid: String,
    #[arg(long, value_enum, default_value_t = BoundKind::Capacity)]
    kind: BoundKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SmtArgs {
    #[arg(long)]
    params: PathBuf,
    /// Also run a corruption campaign with this many trials
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    u: usize,
    #[arg(long = "N")]
    n_sym: usize,
    #[arg(long)]
    v: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Config(String),
    Infeasible(String),
    Audit(String),
    Mismatch(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Audit(_) => 4,
            CliError::Mismatch(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Infeasible(m)
            | CliError::Audit(m)
            | CliError::Mismatch(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Params(ParamsCommand::Check(args)) => cmd_check(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::AuditSecrecy(args) => cmd_audit(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Smt(args) => cmd_smt(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn load_params(path: &Path) -> Result<(AwtpConfig, AwtpParams), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let cfg = AwtpConfig::from_toml(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let params = AwtpParams::new(cfg.clone()).map_err(|e| CliError::Infeasible(e.to_string()))?;
    Ok((cfg, params))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn meta_record(command: &str) -> Record {
    Record::new("meta").with("schema", 1).with("command", command)
}

fn params_record(cfg: &AwtpConfig, seed: u64) -> Record {
    Record::new("params")
        .with("q", cfg.q)
        .with("u", cfg.u)
        .with("v", cfg.v)
        .with("N", cfg.n_sym)
        .with("mu", cfg.mu)
        .with("d", cfg.d)
        .with("w", cfg.w)
        .with("b", cfg.b)
        .with("rho_r", cfg.rho_r)
        .with("rho_w", cfg.rho_w)
        .with("seed", seed)
}

fn derived_record(p: &AwtpParams) -> Record {
    Record::new("derived")
        .with("secret_len", p.secret_len())
        .with("filler_len", p.filler_len())
        .with("coefficients", p.frs().dimension())
        .with("read_budget", p.read_budget())
        .with("write_budget", p.write_budget())
        .with("agreement_threshold", p.frs().agreement_threshold())
        .with(
            "decoding_radius",
            match p.frs().decoding_radius() {
                Some(r) => r.to_string(),
                None => "none".into(),
            },
        )
        .with("rate", p.rate())
}

/// Record values carry no spaces; free-text details are slugged.
fn slug(text: &str) -> String {
    let mut out: String = text
        .chars()
        .map(|c| if c == ' ' || c == '\n' { '_' } else { c })
        .collect();
    while out.contains("__") {
        out = out.replace("__", "_");
    }
    out
}

fn reliability_records(report: &ReliabilityReport) -> Vec<Record> {
    vec![Record::new("reliability")
        .with("trials", report.trials)
        .with("ok", report.ok)
        .with("wrong", report.wrong)
        .with("ambiguous", report.ambiguous)
        .with("no_candidate", report.no_candidate)
        .with("failures", report.failures())
        .with("failure_rate", report.failure_rate())
        .with("wilson_upper", report.wilson_upper())
        .with("refusals", report.refusals)
        .with("max_set_hits", report.max_set_hits)
        .with("max_valid", report.max_valid)]
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let (cfg, params) = load_params(&args.params)?;
    let report = params.check();
    let mut records = vec![
        meta_record("params-check"),
        params_record(&cfg, cfg.seed),
        derived_record(&params),
    ];
    for item in &report.items {
        records.push(
            Record::new("check")
                .with("name", slug(&item.name))
                .with("operative", item.operative)
                .with("pass", item.pass)
                .with("detail", slug(&item.detail)),
        );
    }
    records.push(
        Record::new("feasibility")
            .with("operative_ok", report.operative_ok)
            .with("asymptotic_ok", report.asymptotic_ok),
    );
    emit(&args.out, &render_report(&records))?;
    if report.operative_ok {
        Ok(())
    } else {
        Err(CliError::Infeasible(
            "operative feasibility checks failed".into(),
        ))
    }
}

fn read_coords(args: &EncodeArgs) -> Result<Vec<u64>, CliError> {
    let text = match (&args.message, &args.input) {
        (Some(m), None) => m.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        _ => {
            return Err(CliError::Config(
                "provide a message with --message or --in".into(),
            ))
        }
    };
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|e| CliError::Config(format!("message coordinate {tok:?}: {e}")))
        })
        .collect()
}

fn cmd_encode(args: EncodeArgs) -> Result<(), CliError> {
    let (cfg, params) = load_params(&args.params)?;
    let coords = read_coords(&args)?;
    let message = params
        .message_from_coords(&coords)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let codeword = params
        .encode(&message, &mut rng)
        .map_err(|e| CliError::Config(e.to_string()))?;
    emit(&args.out, &format_symbols(&codeword.symbols))
}

fn cmd_decode(args: DecodeArgs) -> Result<(), CliError> {
    let (cfg, params) = load_params(&args.params)?;
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.input.display())))?;
    let symbols = parse_symbols(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let word = ReceivedWord { symbols };
    let (outcome, stats) = params
        .decode_traced(&word)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut rec = Record::new("decode");
    match &outcome {
        DecodeOutcome::Message(msg) => {
            rec.push("outcome", "message");
            rec.push("coords", join_csv(params.message_to_coords(msg)));
        }
        DecodeOutcome::Ambiguous { candidates } => {
            rec.push("outcome", "ambiguous");
            rec.push("candidates", candidates);
        }
        DecodeOutcome::NoCandidate => rec.push("outcome", "no_candidate"),
    }
    rec.push(
        "list_dim",
        match stats.list_dim {
            Some(d) => d.to_string(),
            None => "none".into(),
        },
    );
    rec.push("set_hits", stats.set_hits);
    rec.push("valid", stats.valid);
    let records = vec![meta_record("decode"), params_record(&cfg, cfg.seed), rec];
    emit(&args.out, &render_report(&records))
}

fn strategy_by_name(name: &str, params: &AwtpParams) -> Result<StrategyKind, CliError> {
    Ok(match name {
        "null" => StrategyKind::Null,
        "random-writer" => StrategyKind::RandomWriter,
        "adaptive-probe" => StrategyKind::AdaptiveProbe,
        "over-budget" => StrategyKind::OverBudget,
        "two-pair" => {
            let n = params.config().n_sym;
            let rb = params.read_budget();
            let wb = params.write_budget();
            if rb + wb > n || 2 * rb > n {
                return Err(CliError::Config(format!(
                    "canonical two-pair sets need read+write budgets within {n} symbols"
                )));
            }
            // reads at the front, second write set at the back: disjoint
            StrategyKind::TwoPair {
                pair1: ((0..rb).collect(), (0..wb).collect()),
                pair2: ((rb..2 * rb).collect(), (n - wb..n).collect()),
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown adversary {other:?}; use null, random-writer, two-pair, adaptive-probe, or over-budget"
            )))
        }
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let (cfg, params) = load_params(&args.params)?;
    let spec = ChannelSpec::from_params(&params, args.restricted)
        .map_err(|e| CliError::Infeasible(e.to_string()))?;
    let strategy = strategy_by_name(&args.adversary, &params)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let report = reliability_estimate(&params, &spec, &strategy, args.trials, seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut records = vec![
        meta_record("simulate"),
        params_record(&cfg, seed),
        Record::new("channel")
            .with("restricted", args.restricted)
            .with("read_budget", spec.read_budget())
            .with("write_budget", spec.write_budget())
            .with("adversary", &args.adversary),
    ];
    records.extend(reliability_records(&report));
    emit(&args.out, &render_report(&records))
}

fn rank_records(kind: &str, report: &awtp_core::channel::RankAuditReport) -> Vec<Record> {
    let mut records = vec![Record::new(kind)
        .with("sets_checked", report.sets_checked)
        .with("exhaustive", report.exhaustive)
        .with("expected_rank", report.expected_rank)
        .with("certified", report.certified)];
    for set in &report.failures {
        records.push(Record::new("failing_set").with("audit", kind).with("set", join_csv(set.iter())));
    }
    records
}

fn cmd_audit(args: AuditArgs) -> Result<(), CliError> {
    let seed = args.seed.unwrap_or(0);
    let mut records = vec![meta_record("audit-secrecy")];
    let (instance, field, u, n_sym, secret_len, read) = if let Some(path) = &args.params {
        let (cfg, params) = load_params(path)?;
        records.push(params_record(&cfg, seed));
        (
            SecrecyInstance::from_params(&params),
            params.field(),
            cfg.u,
            cfg.n_sym,
            params.secret_len(),
            params.read_budget(),
        )
    } else if let Some(q) = args.q {
        let field = PrimeField::new(q).map_err(|e| CliError::Config(e.to_string()))?;
        let (u, n_sym) = (args.u.unwrap(), args.n_sym.unwrap());
        let (secret, filler, read) = (
            args.secret.unwrap(),
            args.filler.unwrap(),
            args.read.unwrap(),
        );
        let instance = SecrecyInstance::new(
            field,
            u,
            n_sym,
            secret,
            filler,
            read,
            FillerPlacement::Trailing,
            EvalWindows::Disjoint,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        records.push(
            Record::new("layout")
                .with("q", q)
                .with("u", u)
                .with("N", n_sym)
                .with("secret", secret)
                .with("filler", filler)
                .with("read", read)
                .with("seed", seed),
        );
        (instance, field, u, n_sym, secret, read)
    } else {
        return Err(CliError::Config(
            "provide --params or a raw layout via --q/--u/--N/--secret/--filler/--read".into(),
        ));
    };

    let rank = instance.rank_audit(seed);
    records.extend(rank_records("rank_audit", &rank));

    // exhaustive enumeration where the filler space is small enough
    let q = field.order();
    let states = (q as u128).checked_pow(instance.filler_len() as u32);
    let mut worst = Ratio::from_integer(BigUint::ZERO);
    let mut enumerated = false;
    if states.is_some_and(|s| s <= 1_000_000) {
        enumerated = true;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let read_sets = all_read_sets(n_sym, read, 20, &mut rng);
        for pair in 0..args.pairs {
            let sample = |rng: &mut ChaCha12Rng| -> Vec<u64> {
                (0..secret_len).map(|_| field.uniform(rng)).collect()
            };
            let s0 = sample(&mut rng);
            let mut s1 = sample(&mut rng);
            while s1 == s0 {
                s1 = sample(&mut rng);
            }
            for set in &read_sets {
                let sd = instance
                    .view_distance_exhaustive(&s0, &s1, set)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                if sd > worst {
                    worst = sd.clone();
                }
                records.push(
                    Record::new("view_distance")
                        .with("pair", pair)
                        .with("set", join_csv(set.iter()))
                        .with("sd", &sd),
                );
            }
        }
        records.push(Record::new("view_distance_summary").with("max_sd", &worst));
    } else {
        records.push(
            Record::new("view_distance_summary")
                .with("skipped", true)
                .with("reason", "filler_space_too_large"),
        );
    }

    // deliberately broken layout: filler first, adjacent symbols sharing an
    // evaluation point; reading two symbols must defeat it
    let mut control_ok = true;
    if args.control {
        let control_read = read.max(2);
        if control_read <= n_sym {
            let control = SecrecyInstance::new(
                field,
                u,
                n_sym,
                secret_len,
                u * control_read,
                control_read,
                FillerPlacement::Leading,
                EvalWindows::Overlapping,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let report = control.rank_audit(seed);
            records.extend(rank_records("control_rank_audit", &report));
            control_ok = !report.certified;
        } else {
            records.push(
                Record::new("control_rank_audit")
                    .with("skipped", true)
                    .with("reason", "needs_two_symbols"),
            );
        }
    }

    let zero = Ratio::from_integer(BigUint::ZERO);
    records.push(
        Record::new("verdict")
            .with("certified", rank.certified)
            .with("enumerated", enumerated)
            .with("control_flagged", if args.control { control_ok.to_string() } else { "n/a".into() }),
    );
    emit(&args.out, &render_report(&records))?;
    if !rank.certified {
        return Err(CliError::Audit("rank audit found a leaking read set".into()));
    }
    if worst > zero {
        return Err(CliError::Audit(format!(
            "exhaustive audit measured statistical distance {worst}"
        )));
    }
    if !control_ok {
        return Err(CliError::Audit(
            "negative control was not flagged; the auditor is not discriminating".into(),
        ));
    }
    Ok(())
}

/// All read sets of the given size, or a sorted uniform sample of `cap`
/// when there are more than `cap` of them.
fn all_read_sets(
    n_sym: usize,
    size: usize,
    cap: usize,
    rng: &mut ChaCha12Rng,
) -> Vec<Vec<usize>> {
    let all: Vec<Vec<usize>> = (0..n_sym).combinations(size).take(cap + 1).collect();
    if all.len() <= cap {
        return all;
    }
    (0..cap)
        .map(|_| {
            let mut set = rand::seq::index::sample(rng, n_sym, size).into_vec();
            set.sort_unstable();
            set
        })
        .collect()
}

fn parse_number(tok: &str) -> Result<f64, CliError> {
    let tok = tok.trim();
    if let Some((a, b)) = tok.split_once('/') {
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("number {tok:?}: {e}")))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("number {tok:?}: {e}")))?;
        if b == 0.0 {
            return Err(CliError::Config(format!("number {tok:?}: zero denominator")));
        }
        Ok(a / b)
    } else {
        tok.parse()
            .map_err(|e| CliError::Config(format!("number {tok:?}: {e}")))
    }
}

fn parse_grid(spec: &str) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    let mut axes = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, values) = part
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("grid axis {part:?} is not name=values")))?;
        let values = values.trim();
        let list: Vec<f64> = if values.contains(':') {
            let nums: Vec<&str> = values.split(':').collect();
            if nums.len() != 3 {
                return Err(CliError::Config(format!(
                    "range {values:?} is not start:stop:step"
                )));
            }
            let (start, stop, step) = (
                parse_number(nums[0])?,
                parse_number(nums[1])?,
                parse_number(nums[2])?,
            );
            if step <= 0.0 || stop < start {
                return Err(CliError::Config(format!("range {values:?} does not advance")));
            }
            let mut out = Vec::new();
            let mut i = 0u32;
            loop {
                let x = start + f64::from(i) * step;
                if x > stop + step * 1e-9 {
                    break;
                }
                out.push(x);
                i += 1;
            }
            out
        } else {
            values
                .split(',')
                .map(parse_number)
                .collect::<Result<_, _>>()?
        };
        if list.is_empty() {
            return Err(CliError::Config(format!("grid axis {name:?} is empty")));
        }
        axes.push((name.trim().to_string(), list));
    }
    Ok(axes)
}

fn grid_axis<'a>(
    axes: &'a [(String, Vec<f64>)],
    name: &str,
    default: Option<f64>,
) -> Result<Vec<f64>, CliError> {
    match axes.iter().find(|(n, _)| n == name) {
        Some((_, values)) => Ok(values.clone()),
        None => default
            .map(|d| vec![d])
            .ok_or_else(|| CliError::Config(format!("grid is missing the {name} axis"))),
    }
}

fn as_integer(x: f64, what: &str) -> Result<u64, CliError> {
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(CliError::Config(format!("{what} must be a nonnegative integer, got {x}")))
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let axes = parse_grid(&args.grid)?;
    let known: &[&str] = match args.kind {
        BoundKind::Capacity => &["rho_r", "rho_w", "eps", "alphabet"],
        BoundKind::Smt => &["n", "t", "eps", "alphabet"],
    };
    for (name, _) in &axes {
        if !known.contains(&name.as_str()) {
            return Err(CliError::Config(format!(
                "unknown grid axis {name:?}; expected one of {known:?}"
            )));
        }
    }
    let eps_axis = grid_axis(&axes, "eps", Some(0.0))?;
    let alphabet_axis = grid_axis(&axes, "alphabet", Some(2.0))?;
    let mut rows = Vec::new();
    let header: Vec<&str>;
    match args.kind {
        BoundKind::Capacity => {
            header = vec!["rho_r", "rho_w", "eps", "alphabet", "capacity_bound"];
            for rr in grid_axis(&axes, "rho_r", None)? {
                for rw in grid_axis(&axes, "rho_w", None)? {
                    for &eps in &eps_axis {
                        for &al in &alphabet_axis {
                            let alphabet = as_integer(al, "alphabet")?;
                            let cell = match capacity_bound(rr, rw, eps, alphabet) {
                                Ok(v) => v.to_string(),
                                Err(_) => "domain_error".into(),
                            };
                            rows.push(vec![
                                rr.to_string(),
                                rw.to_string(),
                                eps.to_string(),
                                alphabet.to_string(),
                                cell,
                            ]);
                        }
                    }
                }
            }
        }
        BoundKind::Smt => {
            header = vec!["n", "t", "eps", "alphabet", "smt_lower_bound"];
            for n in grid_axis(&axes, "n", None)? {
                for t in grid_axis(&axes, "t", None)? {
                    for &eps in &eps_axis {
                        for &al in &alphabet_axis {
                            let n = as_integer(n, "n")?;
                            let t = as_integer(t, "t")?;
                            let alphabet = as_integer(al, "alphabet")?;
                            let cell =
                                match smt_lower_bound(n as usize, t as usize, eps, alphabet as u128)
                                {
                                    Ok(v) => v.to_string(),
                                    Err(_) => "domain_error".into(),
                                };
                            rows.push(vec![
                                n.to_string(),
                                t.to_string(),
                                eps.to_string(),
                                alphabet.to_string(),
                                cell,
                            ]);
                        }
                    }
                }
            }
        }
    }
    let kind = match args.kind {
        BoundKind::Capacity => "capacity",
        BoundKind::Smt => "smt",
    };
    let text = format!(
        "# schema=1 command=bounds kind={kind}\n# grid={}\n{}",
        slug(&args.grid),
        render_csv(&header, &rows)
    );
    emit(&args.out, &text)
}

fn cmd_smt(args: SmtArgs) -> Result<(), CliError> {
    let (cfg, params) = load_params(&args.params)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let protocol =
        SmtProtocol::from_awtp(params.clone()).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let rate = protocol.transmission_rate();
    let bound = smt_lower_bound(
        protocol.wires(),
        protocol.threshold(),
        0.0,
        protocol.alphabet_size(),
    )
    .map_err(|e| CliError::Infeasible(e.to_string()))?;
    let rate_f = *rate.numer() as f64 / *rate.denom() as f64;
    let mut records = vec![
        meta_record("smt"),
        params_record(&cfg, seed),
        Record::new("protocol")
            .with("wires", protocol.wires())
            .with("threshold", protocol.threshold())
            .with("alphabet", protocol.alphabet_size())
            .with("transmission_rate", rate)
            .with("lower_bound_eps0", bound)
            .with("meets_lower_bound", rate_f >= bound),
    ];
    if let Some(trials) = args.trials {
        let spec = ChannelSpec::from_params(&params, true)
            .map_err(|e| CliError::Infeasible(e.to_string()))?;
        let report =
            reliability_estimate(&params, &spec, &StrategyKind::RandomWriter, trials, seed)
                .map_err(|e| CliError::Config(e.to_string()))?;
        records.extend(reliability_records(&report));
    }
    emit(&args.out, &render_report(&records))
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let field = PrimeField::new(args.q).map_err(|e| CliError::Config(e.to_string()))?;
    let frs = FrsParams::new(field, args.u, args.n_sym, args.k, args.v)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let radius = frs
        .decoding_radius()
        .ok_or_else(|| CliError::Infeasible("decoding radius is not positive".into()))?;
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let mut empties = 0usize;
    let mut listed_total = 0usize;
    let mut planted = 0usize;
    for trial in 0..args.trials {
        // alternate fully random words with perturbed codewords so both
        // directions of the comparison carry weight
        let symbols: Vec<Vec<u64>> = if trial % 2 == 0 {
            (0..args.n_sym)
                .map(|_| (0..args.u).map(|_| field.uniform(&mut rng)).collect())
                .collect()
        } else {
            planted += 1;
            let coeffs: Vec<u64> = (0..args.k).map(|_| field.uniform(&mut rng)).collect();
            let mut symbols = frs.encode(&coeffs).expect("coefficients in range").symbols;
            for pos in rand::seq::index::sample(&mut rng, args.n_sym, radius.min(args.n_sym)) {
                for slot in symbols[pos].iter_mut() {
                    *slot = field.uniform(&mut rng);
                }
            }
            symbols
        };
        let y = ReceivedWord { symbols };
        let brute = {
            let mut list = frs
                .brute_force_list(&y, radius)
                .map_err(|e| CliError::Infeasible(e.to_string()))?;
            list.sort();
            list
        };
        let space = frs
            .list_decode(&y)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let mut listed: Vec<Vec<u64>> = match &space {
            None => Vec::new(),
            Some(s) => s
                .enumerate()
                .into_iter()
                .filter(|c| {
                    let cw = frs.encode(c).expect("coefficients in range");
                    symbol_distance(&cw.symbols, &y.symbols) <= radius
                })
                .collect(),
        };
        if space.is_none() {
            empties += 1;
        }
        listed.sort();
        listed_total += listed.len();
        if listed != brute {
            let records = vec![
                meta_record("oracle"),
                Record::new("mismatch")
                    .with("trial", trial)
                    .with("decoder", listed.len())
                    .with("brute_force", brute.len()),
            ];
            let text = format!(
                "{}list-decode matches brute force: FAIL\n",
                render_report(&records)
            );
            emit(&args.out, &text)?;
            return Err(CliError::Mismatch(format!(
                "trial {trial}: decoder and brute force disagree"
            )));
        }
    }
    let records = vec![
        meta_record("oracle"),
        Record::new("oracle")
            .with("q", args.q)
            .with("u", args.u)
            .with("N", args.n_sym)
            .with("v", args.v)
            .with("k", args.k)
            .with("radius", radius)
            .with("seed", args.seed)
            .with("trials", args.trials)
            .with("agreements", args.trials)
            .with("planted_codewords", planted)
            .with("empty_lists", empties)
            .with("codewords_listed", listed_total)
            .with("mismatches", 0),
    ];
    let text = format!(
        "{}list-decode matches brute force: PASS\n",
        render_report(&records)
    );
    emit(&args.out, &text)
}
