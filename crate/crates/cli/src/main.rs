//! `affpow` command-line front end.
//!
//! Exit codes: 0 verified success, 2 algorithmic failure (input outside a
//! regime, no rational decomposition, verification mismatch), 1 usage or
//! parse error.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use affpow::decompose::{decompose_with, DEFAULT_MAX_DELTA};
use affpow::{
    decompose_auto, decompose_distinct_nodes_with_stats, decompose_small_intervals, expand,
    find_min_sde, generate, multi_build_poly, sparsest_shift, waring_decompose, AlgorithmTag, Decomposition,
    Delta, InstanceSpec, MultiPoly, Regime, UniPoly,
};

#[derive(Parser)]
#[command(name = "affpow", version, about = "Exact decompositions into sums of affine powers")]
struct Cli {
    /// Worker threads for the library's parallel loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose f = Σ α (x − a)^e.
    Decompose(DecomposeArgs),
    /// Emit a planted instance certified for a regime.
    Generate(GenerateArgs),
    /// Exit 0 iff a decomposition expands to a polynomial.
    Verify {
        /// Polynomial file ("-" for stdin).
        poly: PathBuf,
        /// Decomposition JSON file.
        decomposition: PathBuf,
    },
    /// Print a minimal shifted differential equation satisfied by f.
    Sde {
        input: Option<PathBuf>,
        /// Shift l: deg Pᵢ ≤ i + l.
        #[arg(long, default_value_t = 0)]
        shift: usize,
        /// Largest order tried (default deg f + 1).
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Waring decomposition f = Σ α (x − a)^d when the rank is small.
    Waring { input: Option<PathBuf> },
    /// Sparsest representation f = Σ α (x − a)^e with one shift a.
    SparsestShift { input: Option<PathBuf> },
    /// Multivariate reconstruction from a MultiPoly JSON.
    Multi(MultiArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Auto,
    BigExp,
    DistinctNodes,
    SmallIntervals,
    BigGaps,
}

impl Algorithm {
    fn tag(self) -> Option<AlgorithmTag> {
        match self {
            Algorithm::Auto => None,
            Algorithm::BigExp => Some(AlgorithmTag::BigExponents),
            Algorithm::DistinctNodes => Some(AlgorithmTag::DistinctNodes),
            Algorithm::SmallIntervals => Some(AlgorithmTag::SmallIntervals),
            Algorithm::BigGaps => Some(AlgorithmTag::BigGaps),
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    /// Coefficient list (lowest degree first) or UniPoly JSON; stdin if absent.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algorithm::Auto)]
    algorithm: Algorithm,
    /// Small-intervals width: a number or "auto".
    #[arg(long, default_value = "auto")]
    delta: String,
    /// Re-expand the result and compare with the input (default).
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    #[arg(long = "no-verify", overrides_with = "verify")]
    no_verify: bool,
    /// Per-pass maximum coefficient bit sizes (distinct-nodes).
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// big-exp, distinct-nodes, big-gaps or small-intervals[:δ].
    #[arg(long)]
    regime: String,
    /// Number of terms.
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    min_exp: usize,
    #[arg(long, default_value_t = 60)]
    max_exp: usize,
    #[arg(long, default_value_t = 0)]
    min_gap: usize,
    /// Nodes are integers in [-r, r].
    #[arg(long, default_value_t = 9)]
    node_range: i64,
    #[arg(long)]
    repeated_nodes: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the planted decomposition (JSON) here.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct MultiArgs {
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Algorithm::DistinctNodes)]
    backend: Algorithm,
    #[arg(long, default_value_t = 5)]
    retries: usize,
}

fn read_input(path: Option<&Path>) -> anyhow::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

/// Coefficient list (commas or whitespace) or `{"coeffs": [...]}`.
fn parse_poly(text: &str) -> anyhow::Result<UniPoly> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).context("parsing polynomial JSON");
    }
    let joined = t.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect::<Vec<_>>();
    Ok(UniPoly::parse_text(&joined.join(","))?)
}

fn read_poly(path: Option<&Path>) -> anyhow::Result<UniPoly> {
    parse_poly(&read_input(path)?)
}

fn print_json<T: serde::Serialize>(v: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}

fn parse_delta(s: &str) -> anyhow::Result<Delta> {
    if s == "auto" {
        return Ok(Delta::Auto { max: DEFAULT_MAX_DELTA });
    }
    match s.parse() {
        Ok(d) => Ok(Delta::Fixed(d)),
        Err(_) => bail!(affpow::Error::Parse(format!("--delta expects a number or \"auto\", got {s:?}"))),
    }
}

fn cmd_decompose(a: &DecomposeArgs, json: bool) -> anyhow::Result<()> {
    let f = read_poly(a.input.as_deref())?;
    let delta = parse_delta(&a.delta)?;
    let mut stats = None;
    let (d, tag) = match a.algorithm.tag() {
        None => decompose_auto(&f)?,
        Some(AlgorithmTag::DistinctNodes) if a.stats => {
            let (d, s) = decompose_distinct_nodes_with_stats(&f)?;
            stats = Some(s);
            (d, AlgorithmTag::DistinctNodes)
        }
        Some(AlgorithmTag::SmallIntervals) => (decompose_small_intervals(&f, delta)?, AlgorithmTag::SmallIntervals),
        Some(tag) => (decompose_with(&f, tag)?, tag),
    };
    if a.stats && stats.is_none() {
        eprintln!("note: --stats reports per-pass bit sizes for --algorithm distinct-nodes only");
    }
    let check = !a.no_verify;
    if check && expand(&d) != f {
        bail!(affpow::Error::ReconstructionFailed("expansion does not match the input".into()));
    }
    if json {
        print_json(&d)?;
        eprintln!("algorithm: {tag}");
    } else {
        println!("{d}");
        println!("algorithm: {tag}");
        println!("terms: {}", d.len());
    }
    if check {
        eprintln!("verified: expansion equals the input");
    }
    if let Some(s) = stats {
        let line = s.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        eprintln!("bit sizes per pass: {line}");
    }
    Ok(())
}

fn cmd_generate(a: &GenerateArgs, json: bool) -> anyhow::Result<()> {
    let regime: Regime = a.regime.parse()?;
    let spec = InstanceSpec::new(a.s, a.seed)
        .with_exponents(a.min_exp, a.max_exp, a.min_gap)
        .with_node_range(a.node_range)
        .with_repeated_nodes(a.repeated_nodes);
    let inst = generate(&spec, regime)?;
    if json {
        print_json(&inst.poly)?;
    } else {
        println!("{}", inst.poly.to_text());
    }
    if let Some(p) = &a.truth {
        fs::write(p, serde_json::to_string(&inst.truth)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_verify(poly: &Path, dec: &Path, json: bool) -> anyhow::Result<()> {
    let f = read_poly(Some(poly))?;
    let d: Decomposition = serde_json::from_str(&read_input(Some(dec))?).context("parsing decomposition JSON")?;
    let ok = expand(&d) == f;
    if json {
        println!("{{\"verified\":{ok}}}");
    } else {
        println!("{}", if ok { "verified" } else { "mismatch" });
    }
    if !ok {
        bail!(affpow::Error::ReconstructionFailed("expansion differs from the polynomial".into()));
    }
    Ok(())
}

fn cmd_multi(a: &MultiArgs) -> anyhow::Result<()> {
    let f: MultiPoly = serde_json::from_str(read_input(a.input.as_deref())?.trim()).context("parsing MultiPoly JSON")?;
    let Some(backend) = a.backend.tag() else {
        bail!(affpow::Error::Parse("--backend must name a specific algorithm".into()));
    };
    print_json(&multi_build_poly(&f, a.seed, backend, a.retries)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    match &cli.cmd {
        Command::Decompose(a) => cmd_decompose(a, cli.json),
        Command::Generate(a) => cmd_generate(a, cli.json),
        Command::Verify { poly, decomposition } => cmd_verify(poly, decomposition, cli.json),
        Command::Sde { input, shift, max_order } => {
            let f = read_poly(input.as_deref())?;
            let max = max_order.unwrap_or_else(|| f.degree().unwrap_or(0) + 1);
            print_json(&find_min_sde(&f, *shift, max)?)
        }
        Command::Waring { input } => print_json(&waring_decompose(&read_poly(input.as_deref())?)?),
        Command::SparsestShift { input } => print_json(&sparsest_shift(&read_poly(input.as_deref())?)?),
        Command::Multi(a) => cmd_multi(a),
    }
}

/// Variant name of a library error, e.g. `IrrationalNodeDetected`.
fn kind(e: &affpow::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<affpow::Error>() {
            Some(lib) => {
                eprintln!("error[{}]: {lib}", kind(lib));
                ExitCode::from(if lib.is_algorithmic() { 2 } else { 1 })
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
