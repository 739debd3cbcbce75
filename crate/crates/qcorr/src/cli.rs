//! Command-line front end: single-state reports, ensemble scans, proof
//! verification, and state generation.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input/usage error.
//! Results go to standard output (or `--out`); progress and summaries go to
//! standard error.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::correlations::{
    quantum_discord, qubit_grid_refine, report_from_j, CorrelationReport, DiscordOptions,
};
use crate::dilation::{
    build_proof_trace, verify_proof, NeumarkConstruction, DEFAULT_DIMENSION_CAP,
};
use crate::error::Error;
use crate::mat::DimSplit;
use crate::measurement::{
    computational_basis, random_rank1_povm, random_two_outcome_povm, read_povm_file, trine_povm,
    Povm,
};
use crate::optimize::{BestMeasurement, MeasurementClass, OptimizeOutcome};
use crate::report::{
    render_correlation_report, render_proof_report, render_scan_csv, scan_summary, Precision,
    ScanRow,
};
use crate::rng::{member_seed, seeded};
use crate::state::{
    bell_phi_plus, maximally_mixed, random_classical_classical, random_mixed_ginibre,
    random_pure_haar, read_state_file, singlet, to_state_json, werner, DensityMatrix,
};
use crate::Result;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Classical correlations, quantum discord, and dilation-based entropy-bound verification for bipartite states"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one state: entropies, mutual information, J, discord, margins.
    Compute(ComputeArgs),
    /// Run an ensemble and emit one CSV row per member.
    Scan(ScanArgs),
    /// Build the dilation proof trace for a (state, POVM) pair and verify it.
    VerifyProof(VerifyProofArgs),
    /// State-file utilities.
    State(StateArgs),
}

#[derive(Args)]
struct StateSource {
    /// Named state family: bell | singlet | werner | maximally_mixed |
    /// ginibre | haar_pure | classical
    #[arg(long)]
    preset: Option<String>,
    /// Path to a state file (alternative to --preset).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Family parameter (e.g. Werner z).
    #[arg(long)]
    param: Option<f64>,
    /// Subsystem dimensions as AxB (for dimensioned presets).
    #[arg(long)]
    dims: Option<String>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    source: StateSource,
    /// Measurement class to optimize over: projective | povm
    #[arg(long, default_value = "projective")]
    class: String,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report to a file (machine precision) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Ensemble: ginibre | haar_pure | werner-sweep
    #[arg(long)]
    ensemble: String,
    /// Subsystem dimensions as AxB (ignored by werner-sweep).
    #[arg(long, default_value = "2x2")]
    dims: String,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optimizer restarts per member (used when d_B > 2).
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyProofArgs {
    #[command(flatten)]
    source: StateSource,
    /// POVM: computational | trine | two-outcome | rank1 | path to a file
    #[arg(long, default_value = "computational")]
    povm: String,
    /// Neumark construction: canonical | rank1
    #[arg(long, default_value = "canonical")]
    construction: String,
    /// Seed for generated POVMs (two-outcome, rank1).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include all matrices in the report, not just the scalar chain.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StateArgs {
    #[command(subcommand)]
    command: StateCommand,
}

#[derive(Subcommand)]
enum StateCommand {
    /// Generate a state file for a named family.
    Gen(GenArgs),
}

#[derive(Args)]
struct GenArgs {
    /// bell | singlet | werner | maximally_mixed | ginibre | haar_pure | classical
    #[arg(long)]
    family: String,
    #[arg(long)]
    param: Option<f64>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses "AxB" into a dimension split.
fn parse_dims(s: &str) -> Result<DimSplit> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| Error::Parse(format!("dims must look like 2x3, got '{}'", s)))?;
    let dim_a: usize = a
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension '{}'", a)))?;
    let dim_b: usize = b
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension '{}'", b)))?;
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::Dimension("dimensions must be positive".into()));
    }
    Ok(DimSplit { dim_a, dim_b })
}

fn state_from_family(
    family: &str,
    param: Option<f64>,
    dims: Option<&str>,
    seed: u64,
) -> Result<DensityMatrix> {
    let need_dims = || -> Result<DimSplit> {
        parse_dims(dims.ok_or_else(|| {
            Error::ParamRange(format!("family '{}' needs --dims", family))
        })?)
    };
    match family {
        "bell" => Ok(bell_phi_plus()),
        "singlet" => Ok(singlet()),
        "werner" => werner(param.ok_or_else(|| {
            Error::ParamRange("family 'werner' needs --param z in [0, 1]".into())
        })?),
        "maximally_mixed" => Ok(maximally_mixed(need_dims()?)),
        "ginibre" => {
            let split = need_dims()?;
            random_mixed_ginibre(split, split.total(), seed)
        }
        "haar_pure" => Ok(random_pure_haar(need_dims()?, seed)),
        "classical" => Ok(random_classical_classical(need_dims()?, seed)),
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

fn resolve_state(source: &StateSource, seed: u64) -> Result<DensityMatrix> {
    match (&source.preset, &source.state) {
        (Some(_), Some(_)) => {
            Err(Error::ParamRange("--preset and --state are mutually exclusive".into()))
        }
        (Some(name), None) => {
            state_from_family(name, source.param, source.dims.as_deref(), seed)
        }
        (None, Some(path)) => read_state_file(path),
        (None, None) => Err(Error::ParamRange("one of --preset or --state is required".into())),
    }
}

fn resolve_povm(spec: &str, dim_b: usize, seed: u64) -> Result<Povm> {
    match spec {
        "computational" => Ok(computational_basis(dim_b).as_povm()),
        "trine" => {
            if dim_b != 2 {
                return Err(Error::Dimension(format!(
                    "trine POVM acts on a qubit, state has dim_b {}",
                    dim_b
                )));
            }
            Ok(trine_povm())
        }
        "two-outcome" => Ok(random_two_outcome_povm(dim_b, &mut seeded(seed))),
        "rank1" => Ok(random_rank1_povm(dim_b, dim_b * dim_b, &mut seeded(seed))),
        path => read_povm_file(Path::new(path)),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn precision_for(out: Option<&Path>) -> Precision {
    if out.is_some() {
        Precision::Machine
    } else {
        Precision::Human
    }
}

fn cmd_compute(args: &ComputeArgs) -> Result<i32> {
    let rho = resolve_state(&args.source, args.seed)?;
    let class = MeasurementClass::from_str(&args.class)?;
    let options = DiscordOptions { class, restarts: args.restarts, seed: args.seed };
    let report = quantum_discord(&rho, &options)?;
    let text = render_correlation_report(
        &report,
        rho.split(),
        args.seed,
        precision_for(args.out.as_deref()),
    );
    emit(&text, args.out.as_deref())?;
    Ok(0)
}

/// Grid resolution used for scan rows with a qubit B side.
const SCAN_GRID: (usize, usize) = (91, 180);

fn scan_member_report(
    rho: &DensityMatrix,
    restarts: usize,
    seed: u64,
) -> Result<CorrelationReport> {
    if rho.split().dim_b == 2 {
        // exhaustive grid plus polish: deterministic and fast for qubits
        let (j, (theta, phi)) = qubit_grid_refine(rho, SCAN_GRID.0, SCAN_GRID.1)?;
        let outcome = OptimizeOutcome {
            j,
            best: BestMeasurement {
                class: MeasurementClass::Projective,
                params: vec![theta, phi],
            },
            evals: 0,
        };
        report_from_j(rho, outcome, 0)
    } else {
        let options =
            DiscordOptions { class: MeasurementClass::Projective, restarts, seed };
        quantum_discord(rho, &options)
    }
}

fn cmd_scan(args: &ScanArgs) -> Result<i32> {
    let mut rows = Vec::with_capacity(args.count);
    match args.ensemble.as_str() {
        "ginibre" | "haar_pure" => {
            let split = parse_dims(&args.dims)?;
            for index in 0..args.count {
                let seed = member_seed(args.seed, index as u64);
                let rho = match args.ensemble.as_str() {
                    "ginibre" => random_mixed_ginibre(split, split.total(), seed)?,
                    _ => random_pure_haar(split, seed),
                };
                let report = scan_member_report(&rho, args.restarts, seed)?;
                rows.push(ScanRow::from_report(index, seed, split, &report));
                eprintln!("member {} of {} done", index + 1, args.count);
            }
        }
        "werner-sweep" => {
            let split = DimSplit { dim_a: 2, dim_b: 2 };
            for index in 0..args.count {
                let z = if args.count == 1 {
                    0.0
                } else {
                    index as f64 / (args.count - 1) as f64
                };
                let seed = member_seed(args.seed, index as u64);
                let rho = werner(z)?;
                let report = scan_member_report(&rho, args.restarts, seed)?;
                rows.push(ScanRow::from_report(index, seed, split, &report));
                eprintln!("z = {:.3} done", z);
            }
        }
        other => {
            return Err(Error::ParamRange(format!(
                "unknown ensemble '{}'; expected ginibre, haar_pure, or werner-sweep",
                other
            )))
        }
    }
    let text = render_scan_csv(&rows, Precision::Machine);
    emit(&text, args.out.as_deref())?;
    eprintln!("{}", scan_summary(&rows));
    Ok(0)
}

fn cmd_verify_proof(args: &VerifyProofArgs) -> Result<i32> {
    let rho = resolve_state(&args.source, args.seed)?;
    let povm = resolve_povm(&args.povm, rho.split().dim_b, args.seed)?;
    let construction = NeumarkConstruction::from_str(&args.construction)?;
    let trace = build_proof_trace(&rho, &povm, construction, DEFAULT_DIMENSION_CAP)?;
    let verdict = verify_proof(&trace);
    let text = render_proof_report(
        &trace,
        &verdict,
        args.full,
        precision_for(args.out.as_deref()),
    );
    emit(&text, args.out.as_deref())?;
    if verdict.all_required_pass {
        Ok(0)
    } else {
        eprintln!("verification failed: at least one required check is out of tolerance");
        Ok(1)
    }
}

fn cmd_state_gen(args: &GenArgs) -> Result<i32> {
    let rho = state_from_family(&args.family, args.param, args.dims.as_deref(), args.seed)?;
    emit(&to_state_json(&rho), args.out.as_deref())?;
    Ok(0)
}

/// Parses the process arguments, runs the selected command, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Scan(args) => cmd_scan(args),
        Command::VerifyProof(args) => cmd_verify_proof(args),
        Command::State(args) => match &args.command {
            StateCommand::Gen(gen) => cmd_state_gen(gen),
        },
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}
