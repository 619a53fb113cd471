//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or computation failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chain::{addressability_report, ChainParameters};
use crate::compiler::{compile_grover, pulse_counts, GroverSpec, Strategy};
use crate::config::{parse_run, RunFile};
use crate::error::Error;
use crate::experiments::{
    linear_grid, log_grid, nearest_detuning, rabi_for_2pik, random_state_trace, rabi_scan,
    summarize, trace_program,
};
use crate::propagation::Mode;
use crate::pulse::text::write_program;
use crate::state::StateVector;
use crate::validate::run_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

const DEFAULT_TARGET: u32 = 13;
const DEFAULT_STEPS: usize = 2;
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "spinchain", version, about = "Pulse-level Grover search on an Ising spin chain")]
pub struct Cli {
    /// key=value file with chain and run settings; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check addressability, gate identities, unitarity and engine agreement
    Validate,
    /// Fidelity trace of one Grover run from |0000>
    Trace(TraceArgs),
    /// Final fidelity over a grid of Rabi frequencies
    Scan(ScanArgs),
    /// Fidelity trace averaged over random initial states
    RandomAvg(RandomArgs),
    /// Pulse and duration accounting of the compiled program
    Counts(CountsArgs),
    /// Write the compiled pulse program in text form
    Compile(CompileArgs),
}

#[derive(Debug, Args)]
pub struct GroverArgs {
    /// Search target: 0, 5, 8 or 13
    #[arg(long)]
    pub alpha: Option<u32>,
    /// Number of Grover steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Hadamard pulse arrangement: naive, grouped or split
    #[arg(long)]
    pub strategy: Option<String>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct RabiArgs {
    /// Rabi frequency
    #[arg(long)]
    pub rabi: Option<f64>,
    /// Use the k-th 2πk Rabi frequency of the loaded chain
    #[arg(long, value_name = "K")]
    pub rabi_k: Option<u32>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub grover: GroverArgs,
    #[command(flatten)]
    pub rabi: RabiArgs,
    /// Engine compared against the ideal run: ideal, exact or rk4
    #[arg(long)]
    pub mode: Option<String>,
    /// CSV output (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary output (stderr when omitted)
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub grover: GroverArgs,
    /// Single-point scan at this Rabi frequency
    #[arg(long)]
    pub rabi: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 0.06)]
    pub min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub max: f64,
    /// Logarithmic spacing (default)
    #[arg(long, conflicts_with = "linear")]
    pub log: bool,
    /// Linear spacing
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[command(flatten)]
    pub grover: GroverArgs,
    #[command(flatten)]
    pub rabi: RabiArgs,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountsArgs {
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Print JSON instead of a table
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    pub grover: GroverArgs,
    #[command(flatten)]
    pub rabi: RabiArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Format { .. } | Error::InvalidTarget(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fully resolved settings of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub chain: ChainParameters,
    pub spec: GroverSpec,
    pub mode: Mode,
    pub seed: u64,
}

/// Parses arguments, runs the command, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn load(cli: &Cli) -> CliResult<RunFile> {
    match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            Ok(parse_run(&text)?)
        }
        None => Ok(RunFile::default()),
    }
}

fn resolve(file: &RunFile, grover: &GroverArgs, rabi: Option<&RabiArgs>, mode: Option<&str>) -> CliResult<RunConfig> {
    let chain = file.chain.clone();
    addressability_report(&chain)?;
    let strategy = match &grover.strategy {
        Some(s) => s.parse()?,
        None => file.strategy.unwrap_or_default(),
    };
    let mode = match mode {
        Some(m) => m.parse()?,
        None => file.mode.unwrap_or_default(),
    };
    let rabi = match rabi {
        Some(RabiArgs { rabi: Some(r), .. }) => *r,
        Some(RabiArgs { rabi_k: Some(k), .. }) => {
            if *k == 0 {
                return Err(Error::Config("--rabi-k must be at least 1".into()).into());
            }
            rabi_for_2pik(nearest_detuning(&chain), *k)
        }
        _ => file
            .rabi
            .unwrap_or_else(|| rabi_for_2pik(nearest_detuning(&chain), 4)),
    };
    let spec = GroverSpec::new(
        grover.alpha.or(file.alpha).unwrap_or(DEFAULT_TARGET),
        grover.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
        strategy,
        rabi,
    )?;
    Ok(RunConfig {
        chain,
        spec,
        mode,
        seed: file.seed.unwrap_or(DEFAULT_SEED),
    })
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let file = load(cli)?;
    match &cli.command {
        Command::Validate => Ok(cmd_validate(&file.chain)),
        Command::Trace(a) => cmd_trace(&file, a),
        Command::Scan(a) => cmd_scan(&file, a),
        Command::RandomAvg(a) => cmd_random_avg(&file, a),
        Command::Counts(a) => cmd_counts(&file, a),
        Command::Compile(a) => {
            let cfg = resolve(&file, &a.grover, Some(&a.rabi), None)?;
            let program = compile_grover(&cfg.chain, &cfg.spec)?;
            emit(a.out.as_deref(), |w| w.write_all(write_program(&cfg.chain, &program).as_bytes()))?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_validate(chain: &ChainParameters) -> i32 {
    let checks = run_checks(chain);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{:<width$}  {}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Formats `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes to `path` (or stdout), removing the file if writing fails.
fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).and_then(|_| lock.flush()).map_err(|e| io_error(Path::new("<stdout>"), e))
        }
        Some(path) => {
            let result = File::create(path).and_then(|f| {
                let mut w = io::BufWriter::new(f);
                body(&mut w)?;
                w.into_inner().map_err(|e| e.into_error())?.sync_all()
            });
            result.map_err(|e| {
                let _ = fs::remove_file(path);
                io_error(path, e)
            })
        }
    }
}

fn write_csv(path: Option<&Path>, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> CliResult<()> {
    emit(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(header)?;
        for row in rows {
            csv.write_record(row.into_iter().map(fmt_f64))?;
        }
        csv.flush()
    })
}

fn cmd_trace(file: &RunFile, a: &TraceArgs) -> CliResult<i32> {
    let cfg = resolve(file, &a.grover, Some(&a.rabi), a.mode.as_deref())?;
    let program = compile_grover(&cfg.chain, &cfg.spec)?;
    let run = trace_program(
        &cfg.chain,
        &program,
        &StateVector::ground(cfg.chain.n()),
        cfg.mode,
        cfg.spec.rabi,
    )?;
    let summary = summarize(&cfg.spec, cfg.mode, &program, &run)?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    let trace = &run.trace;
    write_csv(
        a.out.as_deref(),
        &["t_over_tau_pi2", "re_f", "im_f", "f_abs2"],
        trace
            .times
            .iter()
            .zip(&trace.values)
            .map(|(t, f)| vec![*t, f.re, f.im, f.norm_sqr()]),
    )?;
    match &a.summary {
        Some(path) => emit(Some(path), |w| writeln!(w, "{json}"))?,
        None => eprintln!("{json}"),
    }
    Ok(EXIT_OK)
}

fn cmd_scan(file: &RunFile, a: &ScanArgs) -> CliResult<i32> {
    let no_rabi = RabiArgs { rabi: None, rabi_k: None };
    let cfg = resolve(file, &a.grover, Some(&no_rabi), None)?;
    if a.points == 0 {
        return Err(Error::Config("--points must be positive".into()).into());
    }
    let grid = match (a.points, a.rabi) {
        (1, Some(r)) => vec![r],
        (_, Some(_)) => return Err(Error::Config("--rabi only applies to --points 1".into()).into()),
        _ if !(a.min > 0.0 && a.max >= a.min) => {
            return Err(Error::Config("need 0 < --min <= --max".into()).into())
        }
        _ if a.linear => linear_grid(a.min, a.max, a.points),
        _ => log_grid(a.min, a.max, a.points),
    };
    let rows = rabi_scan(&cfg.chain, cfg.spec.target, cfg.spec.steps, &grid, cfg.spec.strategy)?;
    write_csv(
        a.out.as_deref(),
        &["rabi", "re_f", "f_abs2"],
        rows.iter().map(|r| vec![r.rabi, r.re_f, r.f_abs2]),
    )?;
    Ok(EXIT_OK)
}

fn cmd_random_avg(file: &RunFile, a: &RandomArgs) -> CliResult<i32> {
    let mut cfg = resolve(file, &a.grover, Some(&a.rabi), None)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let program = compile_grover(&cfg.chain, &cfg.spec)?;
    let avg = random_state_trace(&cfg.chain, &program, a.samples, cfg.seed, cfg.spec.rabi)?;
    write_csv(
        a.out.as_deref(),
        &["t_over_tau_pi2", "mean_f_abs2"],
        avg.times.iter().zip(&avg.mean_f_abs2).map(|(t, f)| vec![*t, *f]),
    )?;
    Ok(EXIT_OK)
}

fn cmd_counts(file: &RunFile, a: &CountsArgs) -> CliResult<i32> {
    addressability_report(&file.chain)?;
    let strategy: Strategy = match &a.strategy {
        Some(s) => s.parse()?,
        None => file.strategy.unwrap_or_default(),
    };
    let steps = a.steps.or(file.steps).unwrap_or(DEFAULT_STEPS);
    let c = pulse_counts(&file.chain, strategy, steps)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&c).expect("counts serialize"));
        return Ok(EXIT_OK);
    }
    println!("strategy {}, {} Grover steps", c.strategy, c.steps);
    println!("{:<22}{:>8}{:>22}", "block", "pulses", "duration [tau_pi/2]");
    let rows: [(&str, usize, Option<f64>); 8] = [
        ("H on qubit 0", c.hadamard[0], None),
        ("H on qubit 2", c.hadamard[1], None),
        ("H on qubit 3", c.hadamard[2], None),
        ("superposition H^3", c.superposition, Some(c.superposition_duration)),
        ("S0", c.s0, Some(4.0 * c.s0 as f64)),
        ("oracle", c.oracle, Some(4.0 * c.oracle as f64)),
        ("Grover step", c.grover_step, Some(c.grover_step_duration)),
        ("total", c.total_pulses, Some(c.total_duration)),
    ];
    for (name, n, d) in rows {
        match d {
            Some(d) => println!("{name:<22}{n:>8}{d:>22}"),
            None => println!("{name:<22}{n:>8}"),
        }
    }
    Ok(EXIT_OK)
}
