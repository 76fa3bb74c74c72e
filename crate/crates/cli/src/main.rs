//! Command-line front end: construct and dump states, certify the PPT
//! property, sweep the key-rate bounds over parameter grids, extract
//! thresholds and combine pairwise rates into multipartite bounds.
//!
//! Exit codes: 0 on success, 1 when a requested check fails (a negative
//! partial transpose, a violated triangle inequality), 2 on usage errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::error::Error;
use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use wkey_cli::{grid, report};
use wkey_core::family::{ppt_check, w_state_projector, HermitianUnitary, StateFamilyParams};
use wkey_core::json::{OperatorDump, UnitaryDump};
use wkey_core::operator::MultipartiteOperator;
use wkey_core::protocol::{self, ThresholdMode};
use wkey_core::rates::{chain_multikey, triangle_multikey};
use wkey_core::squeeze::pair_reduction;

#[derive(Parser)]
#[command(
    name = "wkey",
    version,
    about = "Bound-entangled state construction and key-rate bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the family state (or a related operator) and dump it as JSON
    Construct(ConstructArgs),
    /// Check positivity of single-party partial transposes
    PptCheck(PptCheckArgs),
    /// Sweep the filtered-state rate over a (D, epsilon) grid
    SweepFilter(SweepFilterArgs),
    /// Sweep the randomized-protocol rate over a (D, M) grid
    SweepRandom(SweepRandomArgs),
    /// Scan a D grid for the smallest D with a positive rate
    Thresholds(ThresholdArgs),
    /// Multipartite key bounds from pairwise rates
    Multikey(MultikeyArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Number of parties
    #[arg(long)]
    n: usize,
    /// Shield dimension (built-in unitary, powers of two only)
    #[arg(long, conflicts_with = "unitary")]
    d: Option<usize>,
    /// Hermitian-unitary JSON file {"d": D, "re": [[..]], "im": [[..]]}
    #[arg(long)]
    unitary: Option<PathBuf>,
    /// Dump the uniform single-excitation projector instead of the family state
    #[arg(long, conflicts_with_all = ["d", "unitary", "pair"])]
    w_state: bool,
    /// Dump the two-party reduction for this pair instead of the full state
    #[arg(long, value_parser = grid::parse_pair)]
    pair: Option<(usize, usize)>,
    /// Output JSON path
    #[arg(long)]
    out: PathBuf,
    /// Dense-size refusal threshold
    #[arg(long, default_value_t = wkey_core::family::DEFAULT_MAX_SIDE)]
    max_side: usize,
    /// Absolute tolerance for validation and eigenvalue checks
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct PptCheckArgs {
    /// Number of parties (family mode)
    #[arg(long)]
    n: Option<usize>,
    /// Shield dimension (family mode)
    #[arg(long)]
    d: Option<usize>,
    /// Hermitian-unitary JSON file replacing the built-in one
    #[arg(long)]
    unitary: Option<PathBuf>,
    /// Operator JSON file to check instead of a family state; cuts are
    /// then single subsystems
    #[arg(long, conflicts_with_all = ["n", "d", "unitary"])]
    input: Option<PathBuf>,
    /// Check only this party (1-based); default checks every party
    #[arg(long)]
    party: Option<usize>,
    /// Eigenvalues above -tol count as nonnegative
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Dense-size refusal threshold
    #[arg(long, default_value_t = wkey_core::family::DEFAULT_MAX_SIDE)]
    max_side: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct SweepFilterArgs {
    /// Number of parties
    #[arg(long)]
    n: usize,
    /// Shield-dimension grid start:stop:step
    #[arg(long)]
    d_grid: String,
    /// Filter-strength grid start:stop:step
    #[arg(long)]
    eps_grid: String,
    /// Output path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SweepRandomArgs {
    /// Shield-dimension grid start:stop:step
    #[arg(long)]
    d_grid: String,
    /// Round-count grid start:stop:step
    #[arg(long)]
    m_grid: String,
    /// Output path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Filter,
    Random,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Number of parties (filter mode)
    #[arg(long)]
    n: Option<usize>,
    /// Filter-strength grid for the filter mode
    #[arg(long, default_value = "0.01:1.0:0.01")]
    eps_grid: String,
    /// Round count (random mode)
    #[arg(long)]
    m: Option<u64>,
    /// Shield-dimension grid start:stop:step
    #[arg(long)]
    d_grid: String,
}

#[derive(Args)]
struct MultikeyArgs {
    /// Pairwise rate shared by every neighboring pair (chain bound)
    #[arg(long, requires = "n")]
    rate: Option<f64>,
    /// Number of parties for the chain bound
    #[arg(long)]
    n: Option<usize>,
    /// Three pairwise rates r1,r2,r3 (triangle bound)
    #[arg(long)]
    rates: Option<String>,
}

enum Outcome {
    Success,
    CheckFailed,
}

type CmdResult = Result<Outcome, Box<dyn Error>>;

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::CheckFailed) => 1,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Construct(args) => cmd_construct(args),
        Command::PptCheck(args) => cmd_ppt_check(args),
        Command::SweepFilter(args) => cmd_sweep_filter(args),
        Command::SweepRandom(args) => cmd_sweep_random(args),
        Command::Thresholds(args) => cmd_thresholds(args),
        Command::Multikey(args) => cmd_multikey(args),
    }
}

fn load_unitary(path: &PathBuf, tol: f64) -> Result<HermitianUnitary<f64>, Box<dyn Error>> {
    let file = fs::File::open(path)?;
    let dump: UnitaryDump = serde_json::from_reader(BufReader::new(file))?;
    Ok(dump.to_unitary::<f64>(tol)?)
}

fn family_params(
    n: usize,
    d: Option<usize>,
    unitary: Option<&PathBuf>,
    tol: f64,
    max_side: usize,
) -> Result<StateFamilyParams<f64>, Box<dyn Error>> {
    let unitary = match (unitary, d) {
        (Some(path), _) => load_unitary(path, tol)?,
        (None, Some(d)) => HermitianUnitary::builtin(d)?,
        (None, None) => return Err("either --d or --unitary is required".into()),
    };
    Ok(StateFamilyParams::new(n, unitary)?.with_max_side(max_side))
}

fn write_dump(op: &MultipartiteOperator<f64>, out: &PathBuf) -> Result<(), Box<dyn Error>> {
    let file = fs::File::create(out)?;
    serde_json::to_writer(BufWriter::new(file), &OperatorDump::from_operator(op))?;
    Ok(())
}

fn cmd_construct(args: ConstructArgs) -> CmdResult {
    let op = if args.w_state {
        w_state_projector::<f64>(args.n)?
    } else {
        let params = family_params(
            args.n,
            args.d,
            args.unitary.as_ref(),
            args.tol,
            args.max_side,
        )?;
        let rho = params.density_matrix()?;
        match args.pair {
            Some((k, l)) => pair_reduction(&rho, &params, k, l)?,
            None => rho,
        }
    };
    write_dump(&op, &args.out)?;
    let spectrum = op.hermitian_spectrum(args.tol)?;
    println!(
        "side={} trace={} hermiticity_residual={} min_eigenvalue={}",
        op.side(),
        report::fmt_sig(op.trace().re),
        report::fmt_sig(op.hermiticity_residual()),
        report::fmt_sig(spectrum.min()),
    );
    Ok(Outcome::Success)
}

fn cmd_ppt_check(args: PptCheckArgs) -> CmdResult {
    let mut all_ppt = true;
    if let Some(input) = &args.input {
        let file = fs::File::open(input)?;
        let dump: OperatorDump = serde_json::from_reader(BufReader::new(file))?;
        let op = dump.to_operator::<f64>()?;
        let parties = op.dims().len();
        let selected: Vec<usize> = match args.party {
            Some(k) if k >= 1 && k <= parties => vec![k],
            Some(k) => return Err(format!("party {k} out of 1..={parties}").into()),
            None => (1..=parties).collect(),
        };
        for k in selected {
            let report = ppt_check(&op, &[k - 1], args.tol)?;
            print_cut(k, report.min_eigenvalue, report.is_ppt);
            all_ppt &= report.is_ppt;
        }
    } else {
        let n = args.n.ok_or("either --input or --n with --d is required")?;
        let params = family_params(n, args.d, args.unitary.as_ref(), args.tol, args.max_side)?;
        let rho = params.density_matrix()?;
        let selected: Vec<usize> = match args.party {
            Some(k) if k >= 1 && k <= n => vec![k],
            Some(k) => return Err(format!("party {k} out of 1..={n}").into()),
            None => (1..=n).collect(),
        };
        for k in selected {
            let report = params.ppt_check_party(&rho, k, args.tol)?;
            print_cut(k, report.min_eigenvalue, report.is_ppt);
            all_ppt &= report.is_ppt;
        }
    }
    Ok(if all_ppt {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    })
}

fn print_cut(party: usize, min_eigenvalue: f64, is_ppt: bool) {
    println!(
        "party {party}: min_eigenvalue={} {}",
        report::fmt_sig(min_eigenvalue),
        if is_ppt { "PPT" } else { "NPT" }
    );
}

fn cmd_sweep_filter(args: SweepFilterArgs) -> CmdResult {
    let d_grid = grid::parse_u64_grid(&args.d_grid)?;
    let eps_grid = grid::parse_f64_grid(&args.eps_grid)?;
    let rows = protocol::sweep_filter::<f64>(args.n, &d_grid, &eps_grid)?;
    let text = match args.format {
        Format::Csv => report::filter_csv(&rows),
        Format::Json => report::filter_json(&rows),
        Format::Svg => report::filter_svg(&rows),
    };
    fs::write(&args.out, text)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(Outcome::Success)
}

fn cmd_sweep_random(args: SweepRandomArgs) -> CmdResult {
    let d_grid = grid::parse_u64_grid(&args.d_grid)?;
    let m_grid = grid::parse_u64_grid(&args.m_grid)?;
    let rows = protocol::sweep_random::<f64>(&d_grid, &m_grid)?;
    let text = match args.format {
        Format::Csv => report::random_csv(&rows),
        Format::Json => report::random_json(&rows),
        Format::Svg => report::random_svg(&rows),
    };
    fs::write(&args.out, text)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(Outcome::Success)
}

fn cmd_thresholds(args: ThresholdArgs) -> CmdResult {
    let d_grid = grid::parse_u64_grid(&args.d_grid)?;
    let mode = match args.mode {
        Mode::Filter => ThresholdMode::Filter {
            n_parties: args.n.ok_or("--n is required for --mode filter")?,
            eps_grid: grid::parse_f64_grid(&args.eps_grid)?,
        },
        Mode::Random => ThresholdMode::Random {
            m_rounds: args.m.ok_or("--m is required for --mode random")?,
        },
    };
    match protocol::find_threshold_d(&mode, &d_grid)? {
        Some(d) => println!("threshold D = {d}"),
        None => println!("no threshold in range"),
    }
    Ok(Outcome::Success)
}

fn cmd_multikey(args: MultikeyArgs) -> CmdResult {
    if args.rate.is_none() && args.rates.is_none() {
        return Err("supply --rate with --n (chain) and/or --rates r1,r2,r3 (triangle)".into());
    }
    if let Some(rate) = args.rate {
        let n = args.n.expect("clap enforces --n with --rate");
        let bound = chain_multikey(rate, n)?;
        println!("chain bound: {} (N = {n})", report::fmt_sig(bound));
    }
    if let Some(spec) = args.rates {
        let rates = grid::parse_rates(&spec)?;
        if rates.len() != 3 {
            return Err("--rates needs exactly three values r1,r2,r3".into());
        }
        match triangle_multikey(rates[0], rates[1], rates[2]) {
            Ok(bound) => println!("triangle bound: {}", report::fmt_sig(bound)),
            Err(err) => {
                eprintln!("triangle check failed: {err}");
                return Ok(Outcome::CheckFailed);
            }
        }
    }
    Ok(Outcome::Success)
}
