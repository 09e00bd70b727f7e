//! `sidelobe`: compute aperiodic autocorrelations and PSL of binary
//! sequences, evaluate the closed-form exceedance bounds, and verify the
//! bounds exactly (exhaustive enumeration at small n) or statistically
//! (seeded Monte Carlo at large n).
//!
//! Exit codes: 0 success/PASS, 1 usage or resource error, 2 property FAIL.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sidelobe::bounds::{self, BoundSpec, PsiKind};
use sidelobe::exact;
use sidelobe::record::{self, ExperimentRecord};
use sidelobe::seq::BinarySequence;
use sidelobe::stochastic::{self, SamplerConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_PROPERTY_FAIL: u8 = 2;

/// Default epsilon for Cor3 when none is given. The corollary leaves epsilon
/// free; this is a tool choice, not a canonical value.
const DEFAULT_COR3_EPSILON: f64 = 0.01;

#[derive(Parser)]
#[command(
    name = "sidelobe",
    version,
    about = "Peak sidelobe level tools: exact spectra, tail bounds, Monte Carlo and exhaustive verification"
)]
struct Cli {
    /// Append experiment records to this JSON-lines file
    /// (default: $SIDELOBE_RECORD_FILE, then ./sidelobe-records.jsonl).
    #[arg(long, global = true, value_name = "PATH")]
    record_file: Option<PathBuf>,

    /// Print table values at full float precision instead of 2 decimals.
    #[arg(long, global = true)]
    full_precision: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute PSL (and optionally the full spectrum) of {+,-} sequences.
    Psl(PslArgs),
    /// Emit the bound-comparison table as CSV: n,sqrt_2nlogn,cor4_bound.
    Table(TableArgs),
    /// Evaluate closed-form bounds.
    Bounds {
        #[command(subcommand)]
        command: BoundsCommand,
    },
    /// Seeded Monte Carlo estimation.
    Mc {
        #[command(subcommand)]
        command: McCommand,
    },
    /// Exhaustive computation over all sequences of length n.
    Exact {
        #[command(subcommand)]
        command: ExactCommand,
    },
    /// Run a named verification suite; exits 0 on PASS, 2 on FAIL.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
}

#[derive(Args)]
struct PslArgs {
    /// Sequence text over {+,-}; reads stdin (one sequence per line) if
    /// neither this nor --file is given.
    text: Option<String>,
    /// Read sequences from a file, one per line.
    #[arg(long, conflicts_with = "text")]
    file: Option<PathBuf>,
    /// Emit the full spectrum (CSV line,k,c_k) instead of one PSL per line.
    #[arg(long)]
    spectrum: bool,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, default_value_t = 1000)]
    step: u64,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Evaluate psi, the threshold sqrt(2 n psi), and the proportion bound.
    Eval(BoundArgs),
}

#[derive(Args, Clone)]
struct BoundArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    n: u64,
    /// Required for cor2; optional for cor3 (default 0.01).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Constant psi value; required for kind=custom.
    #[arg(long)]
    psi: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Cor2,
    Cor3,
    Cor4,
    Custom,
}

#[derive(Subcommand)]
enum McCommand {
    /// Estimate P[mu(A) > threshold] with a Wilson 99% interval; emits JSON.
    Exceed(McExceedArgs),
    /// Empirical PSL distribution; emits CSV mu,count.
    Hist(McHistArgs),
}

#[derive(Args)]
struct McExceedArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: u64,
    /// Omit to draw a fresh seed (printed to stderr and recorded).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: f64,
    #[arg(long, env = "SIDELOBE_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct McHistArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "SIDELOBE_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Also report (to stderr and the record) the fraction of samples inside
    /// the concentration interval for these epsilon values.
    #[arg(long, value_delimiter = ',')]
    interval_epsilon: Vec<f64>,
}

#[derive(Subcommand)]
enum ExactCommand {
    /// Exact mu_min(n) with a witness; emits JSON.
    Mumin(ExactMuminArgs),
    /// Exact exceedance count and proportion; emits JSON.
    Exceed(ExactExceedArgs),
}

#[derive(Args)]
struct ExactMuminArgs {
    #[arg(long)]
    n: u32,
    /// Prefix-extension search with determined-correlation pruning.
    #[arg(long)]
    prune: bool,
    /// Raise the desk-scale guard to the library maximum
    /// (plain 20 -> 24, pruned 24 -> 28).
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ExactExceedArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    threshold: f64,
    /// Raise the desk-scale guard from n <= 20 to the library maximum 24.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum VerifySuite {
    /// Exact exceedance <= 2n/(psi e^psi) for every n and psi on the grids.
    Prop1Exact(Prop1ExactArgs),
    /// One-sided Wilson-99% Monte Carlo check of the same bound at one n.
    Prop1Mc(Prop1McArgs),
    /// Exact Rademacher tails never exceed 2exp(-lambda^2/2k); optional
    /// empirical spot check.
    Chernoff(ChernoffArgs),
    /// Grid check of (K - loglog n)/log n >= -1/e^{K+1}.
    Fact(FactArgs),
    /// e^0.862 - 1/e > 2.00001 and the derived chain on a log grid.
    Cor4Const(Cor4ConstArgs),
    /// Exact distribution of each c_{n-k} equals a sum of k fair signs.
    Independence(IndependenceArgs),
    /// Exact union-bound step at one (n, lambda).
    UnionBound(UnionBoundArgs),
}

#[derive(Args)]
struct Prop1ExactArgs {
    #[arg(long, default_value_t = 2)]
    n_min: u32,
    #[arg(long, default_value_t = 16)]
    n_max: u32,
    /// Comma-separated psi values; the token `logn` means psi = log n.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,logn")]
    psi_grid: Vec<String>,
}

#[derive(Args)]
struct Prop1McArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "SIDELOBE_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct ChernoffArgs {
    /// Exact domination is checked for all k up to this value, with
    /// lambda on the half-integer grid 0.5, 1, ..., k.
    #[arg(long, default_value_t = 20)]
    k_max: u64,
    /// Also run an empirical comparison at (k, lambda) with this many trials.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 100)]
    k: u64,
    #[arg(long, default_value_t = 30.0)]
    lambda: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "SIDELOBE_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct FactArgs {
    #[arg(long = "K", default_value_t = bounds::COROLLARY4_K)]
    k_const: f64,
    #[arg(long, default_value_t = 1e12)]
    n_max: f64,
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
}

#[derive(Args)]
struct Cor4ConstArgs {
    #[arg(long, default_value_t = 1_000_000)]
    n_max: u64,
    #[arg(long, default_value_t = 1000)]
    grid_points: usize,
}

#[derive(Args)]
struct IndependenceArgs {
    /// Checks every n from 2 to this cap (library maximum 16).
    #[arg(long, default_value_t = 16)]
    n_max: u32,
}

#[derive(Args)]
struct UnionBoundArgs {
    #[arg(long)]
    n: u32,
    /// Defaults to sqrt(2n), the threshold for constant psi = 1.
    #[arg(long)]
    lambda: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are success, not usage errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Anything that reaches `main` as `Err` is a usage or resource error.
type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn run(cli: Cli) -> CliResult {
    let record_path = record::resolve_record_path(cli.record_file.clone());
    let recorder = Recorder { path: record_path };
    match cli.command {
        Command::Psl(args) => cmd_psl(args),
        Command::Table(args) => cmd_table(args, cli.full_precision),
        Command::Bounds { command: BoundsCommand::Eval(args) } => cmd_bounds_eval(args),
        Command::Mc { command } => match command {
            McCommand::Exceed(args) => cmd_mc_exceed(args, &recorder),
            McCommand::Hist(args) => cmd_mc_hist(args, &recorder),
        },
        Command::Exact { command } => match command {
            ExactCommand::Mumin(args) => cmd_exact_mumin(args, &recorder),
            ExactCommand::Exceed(args) => cmd_exact_exceed(args, &recorder),
        },
        Command::Verify { suite } => cmd_verify(suite, &recorder),
    }
}

struct Recorder {
    path: PathBuf,
}

impl Recorder {
    fn write(
        &self,
        inputs: serde_json::Value,
        outputs: serde_json::Value,
        elapsed_ms: u64,
    ) -> CliResult {
        let record = ExperimentRecord::new(
            std::env::args().collect(),
            inputs,
            outputs,
            elapsed_ms,
        );
        record::append_record(&self.path, &record)
            .map_err(|e| format!("cannot append record to {}: {e}", self.path.display()))?;
        Ok(ExitCode::SUCCESS)
    }
}

/// Explicit seed, or a fresh one drawn from OS entropy and echoed to stderr.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        use std::hash::{BuildHasher, Hasher};
        let generated = std::collections::hash_map::RandomState::new().build_hasher().finish();
        eprintln!("seed: {generated} (generated; pass --seed {generated} to reproduce)");
        generated
    })
}

fn cmd_psl(args: PslArgs) -> CliResult {
    let content = if let Some(text) = args.text {
        text
    } else if let Some(path) = args.file {
        std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?
    } else {
        let mut buffer = String::new();
        std::io::stdin().read_to_string(&mut buffer)?;
        buffer
    };
    let mut sequences = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let seq = BinarySequence::parse(line).map_err(|e| match e {
            sidelobe::seq::SeqError::Parse { column, found } => {
                format!("parse error at line {}, column {column}: unexpected {found:?}", idx + 1)
            }
            other => format!("line {}: {other}", idx + 1),
        })?;
        sequences.push((idx + 1, seq));
    }
    if sequences.is_empty() {
        return Err("no sequences in input".into());
    }
    if args.spectrum {
        println!("line,k,c_k");
        for (line, seq) in &sequences {
            let spectrum = seq.spectrum_direct();
            for (k, c) in spectrum.values().iter().enumerate() {
                println!("{line},{k},{c}");
            }
        }
    } else {
        println!("line,n,psl");
        for (line, seq) in &sequences {
            let mu = seq.psl().map_err(|e| format!("line {line}: {e}"))?;
            println!("{line},{},{mu}", seq.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(args: TableArgs, full_precision: bool) -> CliResult {
    if args.from < 3 {
        return Err("table requires --from >= 3".into());
    }
    if args.from > args.to {
        return Err("table requires --from <= --to".into());
    }
    if args.step == 0 {
        return Err("table requires --step >= 1".into());
    }
    println!("n,sqrt_2nlogn,cor4_bound");
    let mut n = args.from;
    while n <= args.to {
        let row = bounds::table_row(n)?;
        if full_precision {
            println!("{},{},{}", row.n, row.schmidt_value, row.cor4_value);
        } else {
            println!("{},{:.2},{:.2}", row.n, row.schmidt_value, row.cor4_value);
        }
        n = match n.checked_add(args.step) {
            Some(next) => next,
            None => break,
        };
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_kind(
    kind: KindArg,
    epsilon: Option<f64>,
    psi: Option<f64>,
) -> Result<PsiKind, String> {
    match kind {
        KindArg::Cor2 => {
            let epsilon = epsilon.ok_or("--epsilon is required for kind=cor2")?;
            Ok(PsiKind::Cor2 { epsilon })
        }
        KindArg::Cor3 => Ok(PsiKind::Cor3 { epsilon: epsilon.unwrap_or(DEFAULT_COR3_EPSILON) }),
        KindArg::Cor4 => Ok(PsiKind::Cor4),
        KindArg::Custom => {
            let psi = psi.ok_or("--psi is required for kind=custom")?;
            Ok(PsiKind::Custom { psi })
        }
    }
}

fn cmd_bounds_eval(args: BoundArgs) -> CliResult {
    let kind = parse_kind(args.kind, args.epsilon, args.psi)?;
    let spec = BoundSpec::new(kind, args.n)?;
    let output = json!({
        "n": spec.n(),
        "psi": spec.psi(),
        "threshold": spec.threshold(),
        "proportion_bound": spec.proportion_bound(),
    });
    println!("{output}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_mc_exceed(args: McExceedArgs, recorder: &Recorder) -> CliResult {
    let seed = resolve_seed(args.seed);
    let config = SamplerConfig::new(args.n, args.trials, seed, args.workers)?;
    let start = Instant::now();
    let estimate = stochastic::estimate_exceedance(&config, args.threshold)?;
    let elapsed = start.elapsed().as_millis() as u64;
    let output = serde_json::to_value(&estimate)?;
    println!("{output}");
    recorder.write(
        json!({"n": args.n, "trials": args.trials, "seed": seed, "threshold": args.threshold}),
        output,
        elapsed,
    )
}

fn cmd_mc_hist(args: McHistArgs, recorder: &Recorder) -> CliResult {
    let seed = resolve_seed(args.seed);
    let config = SamplerConfig::new(args.n, args.trials, seed, args.workers)?;
    let start = Instant::now();
    let histogram = stochastic::psl_histogram(&config)?;
    let elapsed = start.elapsed().as_millis() as u64;
    println!("mu,count");
    for (mu, count) in &histogram.counts {
        println!("{mu},{count}");
    }
    let mut fractions = serde_json::Map::new();
    for &epsilon in &args.interval_epsilon {
        let fraction = histogram.fraction_in_schmidt_interval(epsilon)?;
        eprintln!("in-interval fraction (epsilon = {epsilon}): {fraction}");
        fractions.insert(format!("{epsilon}"), json!(fraction));
    }
    let mut output = serde_json::to_value(&histogram)?;
    if !fractions.is_empty() {
        output["interval_fractions"] = serde_json::Value::Object(fractions);
    }
    recorder.write(
        json!({"n": args.n, "trials": args.trials, "seed": seed}),
        output,
        elapsed,
    )
}

fn cmd_exact_mumin(args: ExactMuminArgs, recorder: &Recorder) -> CliResult {
    let guard = match (args.prune, args.force) {
        (false, false) => 20,
        (false, true) => exact::PLAIN_MAX_N,
        (true, false) => 24,
        (true, true) => exact::PRUNED_MAX_N,
    };
    if args.n > guard {
        return Err(format!(
            "n = {} exceeds the desk-scale guard {guard}; pass --force (and --prune for n > {}) to go further",
            args.n,
            exact::PLAIN_MAX_N
        )
        .into());
    }
    let result = exact::mu_min_exact(args.n, args.prune)?;
    // Timing stays out of the output object so replays reproduce it exactly;
    // the record envelope carries elapsed_ms.
    let output = json!({
        "n": result.n,
        "mu_min": result.mu_min,
        "witness": result.witness.to_string(),
        "representatives_scanned": result.representatives_scanned,
    });
    println!("{output}");
    recorder.write(
        json!({"n": args.n, "prune": args.prune}),
        output,
        result.elapsed.as_millis() as u64,
    )
}

fn cmd_exact_exceed(args: ExactExceedArgs, recorder: &Recorder) -> CliResult {
    let guard = if args.force { exact::PLAIN_MAX_N } else { 20 };
    if args.n > guard {
        return Err(format!(
            "n = {} exceeds the desk-scale guard {guard}; pass --force to allow up to {}",
            args.n,
            exact::PLAIN_MAX_N
        )
        .into());
    }
    let start = Instant::now();
    let result = exact::exact_exceedance(args.n, args.threshold)?;
    let elapsed = start.elapsed().as_millis() as u64;
    let output = json!({
        "n": result.n,
        "threshold": result.threshold,
        "count": result.count,
        "denominator": result.denominator,
        "rational": format!("{}/{}", result.count, result.denominator),
        "proportion": result.proportion,
    });
    println!("{output}");
    recorder.write(
        json!({"n": args.n, "threshold": args.threshold}),
        output,
        elapsed,
    )
}

fn cmd_verify(suite: VerifySuite, recorder: &Recorder) -> CliResult {
    let start = Instant::now();
    let (inputs, output, pass) = match suite {
        VerifySuite::Prop1Exact(args) => verify_prop1_exact(args)?,
        VerifySuite::Prop1Mc(args) => verify_prop1_mc(args)?,
        VerifySuite::Chernoff(args) => verify_chernoff(args)?,
        VerifySuite::Fact(args) => verify_fact_suite(args)?,
        VerifySuite::Cor4Const(args) => verify_cor4_const(args)?,
        VerifySuite::Independence(args) => verify_independence(args)?,
        VerifySuite::UnionBound(args) => verify_union_bound(args)?,
    };
    let elapsed = start.elapsed().as_millis() as u64;
    println!("{output}");
    eprintln!("{}", if pass { "PASS" } else { "FAIL" });
    recorder.write(inputs, output, elapsed)?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_PROPERTY_FAIL) })
}

type SuiteOutcome = (serde_json::Value, serde_json::Value, bool);

fn verify_prop1_exact(args: Prop1ExactArgs) -> Result<SuiteOutcome, Box<dyn std::error::Error>> {
    if args.n_min < 2 || args.n_min > args.n_max {
        return Err("prop1-exact requires 2 <= n-min <= n-max".into());
    }
    let mut cases = Vec::new();
    let mut pass = true;
    for n in args.n_min..=args.n_max {
        let distribution = exact::psl_distribution(n)?;
        for token in &args.psi_grid {
            let psi = if token.eq_ignore_ascii_case("logn") {
                f64::from(n).ln()
            } else {
                token.parse::<f64>().map_err(|_| format!("bad psi value {token:?}"))?
            };
            let spec = BoundSpec::new(PsiKind::Custom { psi }, u64::from(n))?;
            let exceedance =
                exact::exceedance_from_distribution(&distribution, spec.threshold());
            let bound = spec.proportion_bound();
            let holds = exceedance.proportion <= bound;
            pass &= holds;
            cases.push(json!({
                "n": n,
                "psi": psi,
                "threshold": spec.threshold(),
                "count": exceedance.count,
                "denominator": exceedance.denominator,
                "exact_proportion": exceedance.proportion,
                "bound": bound,
                "holds": holds,
            }));
        }
    }
    let inputs = json!({"n_min": args.n_min, "n_max": args.n_max, "psi_grid": args.psi_grid});
    let output = json!({"suite": "prop1-exact", "pass": pass, "cases": cases});
    Ok((inputs, output, pass))
}

fn verify_prop1_mc(args: Prop1McArgs) -> Result<SuiteOutcome, Box<dyn std::error::Error>> {
    let seed = resolve_seed(args.seed);
    let kind = parse_kind(args.kind, args.epsilon, args.psi)?;
    let spec = BoundSpec::new(kind, args.n as u64)?;
    let config = SamplerConfig::new(args.n, args.trials, seed, args.workers)?;
    let report = stochastic::verify_proposition1(&config, &spec)?;
    let inputs = json!({
        "n": args.n, "kind": kind.name(), "epsilon": args.epsilon, "psi": args.psi,
        "trials": args.trials, "seed": seed,
    });
    let pass = report.pass;
    let output = serde_json::to_value(&report)?;
    let output = json!({"suite": "prop1-mc", "pass": pass, "report": output});
    Ok((inputs, output, pass))
}

fn verify_chernoff(args: ChernoffArgs) -> Result<SuiteOutcome, Box<dyn std::error::Error>> {
    if args.k_max < 1 {
        return Err("chernoff requires k-max >= 1".into());
    }
    // Exact side: binomial tails against the bound on the half-integer grid.
    let mut worst_margin = f64::INFINITY;
    let mut violations = Vec::new();
    for k in 1..=args.k_max {
        let mut lambda = 0.5;
        while lambda <= k as f64 {
            let exact_tail = exact::rademacher_tail_probability(k as u32, lambda);
            let bound = bounds::chernoff_tail(k, lambda);
            let margin = bound - exact_tail;
            worst_margin = worst_margin.min(margin);
            if exact_tail > bound {
                violations.push(json!({"k": k, "lambda": lambda, "exact": exact_tail, "bound": bound}));
            }
            lambda += 0.5;
        }
    }
    let mut pass = violations.is_empty();
    let mut empirical = serde_json::Value::Null;
    if let Some(trials) = args.trials {
        let seed = resolve_seed(args.seed);
        let report = stochastic::chernoff_empirical(args.k, args.lambda, trials, seed, args.workers)?;
        pass &= report.pass;
        empirical = serde_json::to_value(&report)?;
    }
    let inputs = json!({
        "k_max": args.k_max, "trials": args.trials, "k": args.k, "lambda": args.lambda,
    });
    let output = json!({
        "suite": "chernoff",
        "pass": pass,
        "k_max": args.k_max,
        "worst_margin": worst_margin,
        "violations": violations,
        "empirical": empirical,
    });
    Ok((inputs, output, pass))
}

fn verify_fact_suite(args: FactArgs) -> Result<SuiteOutcome, Box<dyn std::error::Error>> {
    if !args.n_max.is_finite() || args.n_max <= 2.0 || args.grid_points < 2 {
        return Err("fact requires n-max > 2 and grid-points >= 2".into());
    }
    // Wide grid for the inequality, plus a fine grid bracketing the
    // minimizer n* = e^{e^{K+1}} to confirm the bound is attained there.
    let wide = bounds::log_spaced_reals(2.0, args.n_max, args.grid_points);
    let report = bounds::verify_fact(args.k_const, &wide)?;
    let n_star = (args.k_const + 1.0).exp().exp();
    let mut pass = report.holds;
    let mut near = serde_json::Value::Null;
    if n_star > 1.0 && n_star.is_finite() {
        let fine = bounds::log_spaced_reals((n_star / 1.01).max(1.0001), n_star * 1.01, 1001);
        let fine_report = bounds::verify_fact(args.k_const, &fine)?;
        pass &= fine_report.holds && fine_report.min_slack <= 1e-6;
        near = serde_json::to_value(&fine_report)?;
    }
    let inputs = json!({"K": args.k_const, "n_max": args.n_max, "grid_points": args.grid_points});
    let output = json!({
        "suite": "fact",
        "pass": pass,
        "wide_grid": serde_json::to_value(&report)?,
        "near_minimizer": near,
    });
    Ok((inputs, output, pass))
}

fn verify_cor4_const(args: Cor4ConstArgs) -> Result<SuiteOutcome, Box<dyn std::error::Error>> {
    if args.n_max < 2 || args.grid_points < 2 {
        return Err("cor4-const requires n-max >= 2 and grid-points >= 2".into());
    }
    let grid = bounds::log_spaced_integers(2, args.n_max, args.grid_points);
    let report = bounds::corollary4_constant_check(&grid);
    let pass = report.pass;
    let inputs = json!({"n_max": args.n_max, "grid_points": args.grid_points});
    let output = json!({"suite": "cor4-const", "pass": pass, "report": serde_json::to_value(&report)?});
    Ok((inputs, output, pass))
}

fn verify_independence(args: IndependenceArgs) -> Result<SuiteOutcome, Box<dyn std::error::Error>> {
    if args.n_max < 2 {
        return Err("independence requires n-max >= 2".into());
    }
    let mut pass = true;
    let mut reports = Vec::new();
    for n in 2..=args.n_max {
        let report = exact::term_distribution_check(n)?;
        pass &= report.pass;
        reports.push(serde_json::to_value(&report)?);
    }
    let inputs = json!({"n_max": args.n_max});
    let output = json!({"suite": "independence", "pass": pass, "reports": reports});
    Ok((inputs, output, pass))
}

fn verify_union_bound(args: UnionBoundArgs) -> Result<SuiteOutcome, Box<dyn std::error::Error>> {
    let lambda = args.lambda.unwrap_or_else(|| (2.0 * f64::from(args.n)).sqrt());
    let report = exact::exceedance_union_bound_check(args.n, lambda)?;
    let pass = report.holds;
    let inputs = json!({"n": args.n, "lambda": lambda});
    let output = json!({"suite": "union-bound", "pass": pass, "report": serde_json::to_value(&report)?});
    Ok((inputs, output, pass))
}
