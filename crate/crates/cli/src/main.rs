use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use grand::bits::BitVec;
use grand::channel::{observe, ChannelConfig, ReliabilityProfile};
use grand::code::{CodeSpec, LinearCode};
use grand::decode::{DecodeResult, RoundTrace, TraceOptions};
use grand::harness::{self, ExperimentConfig, OutputFormat};
use grand::hybrid::{hybrid_decode, HybridOptions};
use grand::orb::{
    generate_pattern_set, load_pattern_set, orb_decode, save_pattern_set, AbstractPatternSet, Gamma,
    OrbOptions,
};
use grand::psgrand::{psgrand_decode, BatchSchedule, PsgrandOptions};
use grand::sgrand::{sgrand_decode, Backing, SgrandOptions};

#[derive(Parser)]
#[command(name = "grand", version, about = "Soft-decision GRAND decoders and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BLER and query statistics.
    Bler(RunArgs),
    /// Paired single-threaded decode timing.
    Latency(RunArgs),
    /// Decode one received word and print the result.
    Decode(DecodeArgs),
    /// Generate a γ-ordered abstract pattern set.
    GenPatterns(GenPatternsArgs),
    /// Write the parity-check matrix of a code.
    GenCode(GenCodeArgs),
    /// Check a code and, optionally, a pattern-set file.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file in `key = value` form.
    #[arg(long)]
    config: PathBuf,
    /// Output path; `.json` selects JSON, anything else CSV. Overrides `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write one CSV line per decode (bler only).
    #[arg(long)]
    trial_log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Sgrand,
    Psgrand,
    Orb,
    Hybrid,
}

#[derive(Args)]
struct DecodeArgs {
    /// Code descriptor, e.g. `bch:127,106`, `hamming:7,4`, `file:H.txt`.
    #[arg(long)]
    code: CodeSpec,
    #[arg(long, value_enum)]
    alg: Alg,
    /// Batch size per round.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Maximum number of rounds.
    #[arg(long)]
    kmax: Option<u64>,
    /// Query limit (tree searches) or the tree-phase budget (hybrid).
    #[arg(long)]
    max_queries: Option<u64>,
    #[arg(long)]
    no_prune: bool,
    #[arg(long)]
    no_early_term: bool,
    #[arg(long)]
    no_recursion: bool,
    #[arg(long, default_value = "heap")]
    backing: Backing,
    /// Pattern-set file for orb/hybrid.
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Size of a generated linear-γ pattern set when no file is given.
    #[arg(long = "T", default_value_t = 50_000)]
    t: usize,
    /// Signed LLRs, comma separated (negative means hard bit 1).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "ebno")]
    llr: Option<String>,
    /// Simulate the zero codeword over AWGN at this Eb/N0 (dB).
    #[arg(long)]
    ebno: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Print the per-round trace as CSV.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct GenPatternsArgs {
    /// Code length.
    #[arg(long)]
    n: usize,
    /// Number of patterns.
    #[arg(long = "T")]
    t: usize,
    /// `linear` or `list:g1,g2,...`.
    #[arg(long, default_value = "linear")]
    gamma: Gamma,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenCodeArgs {
    #[arg(long)]
    code: CodeSpec,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    code: CodeSpec,
    #[arg(long)]
    patterns: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bler(args) => run_experiment(args, false),
        Command::Latency(args) => run_experiment(args, true),
        Command::Decode(args) => decode(args),
        Command::GenPatterns(args) => {
            let set = generate_pattern_set(args.n, args.t, args.gamma)?;
            save_pattern_set(&set, &args.out)?;
            println!("wrote {} patterns of length {} to {}", set.len(), set.n(), args.out.display());
            Ok(())
        }
        Command::GenCode(args) => {
            let code = LinearCode::build(&args.code)?;
            code.save_matrix(&args.out)?;
            println!("wrote {} to {}", code.descriptor(), args.out.display());
            Ok(())
        }
        Command::Verify(args) => verify(args),
    }
}

fn run_experiment(args: RunArgs, latency: bool) -> Result<()> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let rows = if latency {
        if args.trial_log.is_some() {
            bail!("--trial-log applies to bler runs only");
        }
        harness::run_latency(&config)?
    } else {
        let (rows, log) = harness::run_bler_logged(&config, args.trial_log.is_some())?;
        if let Some(path) = &args.trial_log {
            let mut text = String::from("algorithm,ebno_db,trial,block_error,queries,zeta\n");
            for r in &log {
                let label = &config.algorithms[r.algorithm].label;
                text.push_str(&format!(
                    "\"{}\",{},{},{},{},{}\n",
                    label, r.ebno_db, r.trial, r.block_error as u8, r.queries, r.zeta
                ));
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        rows
    };
    match args.out.or(config.out) {
        Some(path) => {
            harness::emit(&rows, OutputFormat::for_path(&path), &path)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{}", harness::to_csv(&rows)),
    }
    Ok(())
}

fn profile_for(args: &DecodeArgs, code: &LinearCode) -> Result<ReliabilityProfile> {
    if let Some(text) = &args.llr {
        let llr = text
            .split(',')
            .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad LLR `{v}`")))
            .collect::<Result<Vec<_>>>()?;
        let hard = BitVec::from_ones(llr.len(), (0..llr.len()).filter(|&i| llr[i] < 0.0));
        let ell = llr.iter().map(|v| v.abs()).collect();
        return Ok(ReliabilityProfile::new(ell, hard)?);
    }
    let Some(ebno) = args.ebno else {
        bail!("give either --llr or --ebno");
    };
    let cfg = ChannelConfig::new(ebno, code.rate(), args.seed);
    let (_, y) = harness::realize(code, &cfg, args.trial, false);
    Ok(observe(&y, &cfg))
}

fn pattern_set(args: &DecodeArgs, n: usize) -> Result<AbstractPatternSet> {
    Ok(match &args.patterns {
        Some(p) => load_pattern_set(p)?,
        None => {
            let t = if n < 64 { args.t.min(1 << n) } else { args.t };
            generate_pattern_set(n, t, Gamma::Linear)?
        }
    })
}

fn decode(args: DecodeArgs) -> Result<()> {
    let code = LinearCode::build(&args.code)?;
    let profile = profile_for(&args, &code)?;
    let trace = if args.trace { TraceOptions::rounds() } else { TraceOptions::off() };
    let psgrand = PsgrandOptions {
        schedule: BatchSchedule::Constant(args.n),
        k_max: args.kmax,
        max_queries: args.max_queries,
        prune: !args.no_prune,
        early_term: !args.no_early_term,
        recursion: !args.no_recursion,
        backing: args.backing,
        trace,
    };
    let result: DecodeResult = match args.alg {
        Alg::Sgrand => {
            let options = SgrandOptions {
                backing: args.backing,
                max_queries: args.max_queries,
                trace,
            };
            sgrand_decode(&profile, &code, &options)?
        }
        Alg::Psgrand => psgrand_decode(&profile, &code, &psgrand)?,
        Alg::Orb => {
            let set = pattern_set(&args, code.n())?;
            let options = OrbOptions {
                max_queries: None,
                batch: args.n,
                trace: args.trace,
            };
            orb_decode(&profile, &code, &set, &options)?.result
        }
        Alg::Hybrid => {
            let set = pattern_set(&args, code.n())?;
            let options = HybridOptions {
                psgrand,
                orb_batch: args.n,
            };
            let out = hybrid_decode(&profile, &code, &set, &options)?;
            println!("orb_queries: {}", out.orb_queries);
            println!("envelope: {}", out.envelope_len);
            out.result
        }
    };
    println!("hard: {}", profile.hard());
    match (&result.codeword, &result.error_pattern) {
        (Some(c), Some(e)) => {
            println!("codeword: {c}");
            println!("error_pattern: {e}");
            println!("zeta: {}", result.zeta);
        }
        _ => println!("codeword: none"),
    }
    println!("termination: {}", result.termination);
    let c = &result.counters;
    println!("queries: {}", c.queries);
    println!("rounds: {}", c.rounds);
    if args.trace {
        print_trace(&result.trace);
    }
    Ok(())
}

fn print_trace(trace: &[RoundTrace]) {
    println!("round,batch,tau,zeta_min,queries,frontier_len");
    for r in trace {
        println!(
            "{},{},{},{},{},{}",
            r.round,
            r.batch.len(),
            r.tau,
            r.zeta_min,
            r.queries,
            r.frontier_len
        );
    }
}

fn verify(args: VerifyArgs) -> Result<()> {
    let code = LinearCode::build(&args.code)?;
    for g in code.generator() {
        if !code.is_codeword(g) {
            bail!("generator row is not a codeword of {}", code.descriptor());
        }
    }
    println!(
        "code {}: n={} k={} r={} d_min={} ok",
        code.descriptor(),
        code.n(),
        code.k(),
        code.redundancy(),
        code.d_min()
    );
    if let Some(path) = &args.patterns {
        let set = load_pattern_set(path)?;
        set.validate()?;
        set.check_length(code.n())?;
        println!(
            "patterns {}: n={} T={} gamma={} ok",
            path.display(),
            set.n(),
            set.len(),
            set.gamma()
        );
    }
    Ok(())
}
