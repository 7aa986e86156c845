//! `orbitgcd`: run height-ratio experiments and degree tools from the shell.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 orbit truncated by
//! indeterminacy, 3 internal or I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitgcd_core::degrees::{
    degree_sequence, monomial_dyn_degrees, topological_degree_ff, DegreeError, DegreeReport,
    FiberOptions, MonomialMap, DEFAULT_PRIMES, DEFAULT_TARGETS_PER_PRIME,
};
use orbitgcd_core::experiments::{
    builtin, emit_report, run_scenario, summary_table, BuiltinParams, Format, ScenarioConfig,
    ScenarioError, DEFAULT_SEED,
};
use orbitgcd_core::polyparse::parse_poly;
use orbitgcd_core::projgeom::DEFAULT_COMPOSITION_CAP;
use orbitgcd_core::{PolySource, RationalMap};

const EXIT_USAGE: u8 = 1;
const EXIT_TRUNCATED: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "orbitgcd", version, about = "Generalized gcd heights along orbits of rational maps")]
struct Cli {
    /// Worker threads for parallel sections (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Random seed for sampled computations.
    #[arg(long, global = true, env = "ORBITGCD_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario and emit its per-iterate report.
    Run(RunArgs),
    /// Dynamical degree tools.
    Degrees(DegreesArgs),
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["config", "scenario"])))]
struct RunArgs {
    /// JSON scenario config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario: backnonfin, a2, bcz, squaring.
    #[arg(long)]
    scenario: Option<String>,
    /// First multiplier of the bcz scenario.
    #[arg(long, requires = "scenario")]
    a: Option<u64>,
    /// Second multiplier of the bcz scenario.
    #[arg(long, requires = "scenario")]
    b: Option<u64>,
    /// Number of iterates.
    #[arg(long)]
    n: Option<usize>,
    /// Output file; the summary then goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    /// Also count rational preimages by exhaustive scan.
    #[arg(long)]
    rational_scan: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DegreeMode {
    Seq,
    Topo,
    Monomial,
}

#[derive(Args, Debug)]
struct DegreesArgs {
    #[arg(long, value_enum)]
    mode: DegreeMode,
    /// Map components separated by `;`, e.g. "x0^2*x1;x1^3;x2^3".
    #[arg(long, required_unless_present = "matrix")]
    map: Option<String>,
    /// Integer matrix, rows separated by `;`, e.g. "2,1;0,3".
    #[arg(long)]
    matrix: Option<String>,
    /// Iterates for the degree sequence.
    #[arg(long, default_value_t = 4)]
    n: u32,
    /// Primes for fiber counting, comma separated.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Random targets per prime.
    #[arg(long, default_value_t = DEFAULT_TARGETS_PER_PRIME)]
    targets: usize,
    /// Cap on the raw degree of iterates.
    #[arg(long, default_value_t = DEFAULT_COMPOSITION_CAP)]
    cap: u64,
    /// Add the exhaustive rational-preimage histogram (topo mode).
    #[arg(long)]
    rational_scan: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn internal(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: message.to_string(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Json(_) | ScenarioError::Field { .. } | ScenarioError::UnknownScenario(_) => {
                Failure::usage(e)
            }
            ScenarioError::Io { .. } | ScenarioError::Compute(_) => Failure::internal(e),
        }
    }
}

impl From<DegreeError> for Failure {
    fn from(e: DegreeError) -> Self {
        match e {
            DegreeError::Geom(_) | DegreeError::TooFewHeights { .. } => Failure::internal(e),
            _ => Failure::usage(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    eprintln!("orbitgcd {} seed={seed}", env!("CARGO_PKG_VERSION"));
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    let result = match cli.command {
        Command::Run(args) => cmd_run(args, seed),
        Command::Degrees(args) => cmd_degrees(args, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_run(args: RunArgs, seed: u64) -> Result<u8, Failure> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), None) => {
            if args.a.is_some() || args.b.is_some() {
                return Err(Failure::usage("--a/--b apply to built-in scenarios only"));
            }
            let mut cfg = ScenarioConfig::from_path(path).map_err(|e| match e {
                ScenarioError::Io { .. } => Failure::usage(e),
                other => other.into(),
            })?;
            if let Some(n) = args.n {
                cfg.n_max = n;
            }
            cfg
        }
        (None, Some(name)) => {
            if (args.a.is_some() || args.b.is_some()) && name != "bcz" {
                return Err(Failure::usage("--a/--b apply to the bcz scenario only"));
            }
            builtin(
                name,
                BuiltinParams {
                    a: args.a,
                    b: args.b,
                    n: args.n,
                },
            )?
        }
        _ => return Err(Failure::usage("give exactly one of --config or --scenario")),
    };
    if args.rational_scan {
        cfg.rational_scan = true;
    }
    let report = run_scenario(&cfg, seed)?;
    let format = match args.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    emit_report(&report, format, args.out.as_deref())?;
    let table = summary_table(&report);
    if args.out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(if report.flags.truncated() { EXIT_TRUNCATED } else { 0 })
}

fn parse_map(src: &str) -> Result<RationalMap, Failure> {
    let parts: Vec<&str> = src.split(';').map(str::trim).collect();
    let polys = parts
        .iter()
        .enumerate()
        .map(|(i, p)| parse_poly(&PolySource::new(*p, parts.len())).map_err(|e| Failure::usage(format!("map[{i}]: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    RationalMap::new(polys).map_err(|e| Failure::usage(format!("map: {e}")))
}

fn parse_matrix(src: &str) -> Result<Vec<Vec<i64>>, Failure> {
    src.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::usage(format!("matrix: bad entry `{}`", x.trim()))))
                .collect()
        })
        .collect()
}

fn cmd_degrees(args: DegreesArgs, seed: u64) -> Result<u8, Failure> {
    let mut report = DegreeReport::default();
    match args.mode {
        DegreeMode::Monomial => {
            let Some(m) = &args.matrix else {
                return Err(Failure::usage("--mode monomial needs --matrix"));
            };
            let map = MonomialMap::new(parse_matrix(m)?)?;
            report.monomial_degrees = Some(monomial_dyn_degrees(&map));
        }
        DegreeMode::Seq | DegreeMode::Topo => {
            let Some(src) = &args.map else {
                return Err(Failure::usage("this mode needs --map"));
            };
            let f = parse_map(src)?;
            if args.mode == DegreeMode::Seq {
                report.d1_sequence = Some(degree_sequence(&f, args.n, args.cap)?);
            } else {
                let opts = FiberOptions {
                    primes: args.primes.clone().unwrap_or_else(|| DEFAULT_PRIMES.to_vec()),
                    targets_per_prime: args.targets,
                    seed,
                    rational_scan: args.rational_scan,
                };
                report.dn = Some(topological_degree_ff(&f, &opts)?);
            }
        }
    }
    let text = serde_json::to_string_pretty(&report).map_err(Failure::internal)?;
    println!("{text}");
    Ok(0)
}
