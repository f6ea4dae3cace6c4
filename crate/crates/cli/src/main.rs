//! `morpho`: classify material evolution of a constitutive law and check
//! normal-subgroupoid algebra on finite groupoids.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 bad input
//! (model, grid, flags or groupoid files), 3 numerical failure.

mod groupoid;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morpho_core::report::{self, AnalysisError, BodyGrid, GridSpec};
use morpho_core::response::{builtin_scenario, scenario_source, ResponseModel, SCENARIOS};

#[derive(Parser)]
#[command(name = "morpho", version, about = "Remodeling, aging and morphogenesis of evolving elastic bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: symmetry, evolution and morphogenesis fibres, verdicts
    Analyze(AnalyzeArgs),
    /// Symmetry algebra dimension and basis per grid node
    Symmetry(SymmetryArgs),
    /// Finite groupoid checks
    #[command(subcommand)]
    Groupoid(groupoid::GroupoidCommand),
    /// Print the model source of a built-in scenario
    Scenario {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SCENARIOS))]
        name: String,
    },
}

#[derive(Copy, Clone, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct ModelArgs {
    /// Built-in scenario (A..E)
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    scenario: Option<String>,
    /// Model file in the response language ('#' starts a comment)
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long, default_value_t = 41)]
    t_steps: usize,
    /// Particle "a,b,c"; with --x1-range only x2 and x3 are used
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Full-body mode: x1 values "lo,hi,n"
    #[arg(long, allow_hyphen_values = true)]
    x1_range: Option<String>,
    /// Number of sampled deformations K
    #[arg(long, default_value_t = 40)]
    samples: usize,
    /// Relative rank tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Lower bound on |det F| for samples
    #[arg(long, default_value_t = 0.2)]
    det_floor: f64,
    /// Body stencil step for x-derivatives of the symmetry frame
    #[arg(long, default_value_t = 1e-2)]
    x_step: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Worker threads (default: all cores); output does not depend on it
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SymmetryArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Single instant instead of the t grid
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["t_min", "t_max", "t_steps"])]
    t: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// A failure with its exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    Input(String),
    Numerical(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Numerical(m) | Failure::Output(m) => f.write_str(m),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Grid(_) | AnalysisError::Threads(_) => Failure::Input(e.to_string()),
            AnalysisError::Numerical(_) => Failure::Numerical(e.to_string()),
        }
    }
}

fn load_model(args: &ModelArgs) -> Result<ResponseModel, Failure> {
    if let Some(name) = &args.scenario {
        return builtin_scenario(name).map_err(|e| Failure::Input(e.to_string()));
    }
    let path = args.model.as_ref().expect("clap requires --scenario or --model");
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let model = morpho_core::parse_response(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned());
    Ok(model.with_name(name))
}

fn parse_list(flag: &str, text: &str, n: usize) -> Result<Vec<f64>, Failure> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("--{flag}: expected {n} comma-separated numbers, got `{text}`")))?;
    if values.len() != n {
        return Err(Failure::Input(format!("--{flag}: expected {n} values, got {}", values.len())));
    }
    Ok(values)
}

fn grid_spec(args: &GridArgs) -> Result<GridSpec, Failure> {
    let x = match &args.x {
        Some(s) => {
            let v = parse_list("x", s, 3)?;
            [v[0], v[1], v[2]]
        }
        None => [0.0; 3],
    };
    let body = match &args.x1_range {
        None => BodyGrid::Fixed { x },
        Some(s) => {
            let v = parse_list("x1-range", s, 3)?;
            if v[2] < 1.0 || v[2].fract() != 0.0 {
                return Err(Failure::Input(format!("--x1-range: step count must be a positive integer, got {}", v[2])));
            }
            BodyGrid::X1Range {
                lo: v[0],
                hi: v[1],
                steps: v[2] as usize,
                x2: x[1],
                x3: x[2],
            }
        }
    };
    Ok(GridSpec {
        t_min: args.t_min,
        t_max: args.t_max,
        t_steps: args.t_steps,
        body,
        seed: args.seed,
        samples: args.samples,
        rel_tol: args.tol,
        det_floor: args.det_floor,
        x_step: args.x_step,
    })
}

pub(crate) fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Output(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let grid = grid_spec(&args.grid)?;
    let report = report::analyze_with_threads(&model, &grid, args.output.threads)?;
    let text = match args.output.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(args.output.out.as_deref(), &text)?;
    eprintln!(
        "{}: evolution {}, {}; jump nodes {:?}",
        model.name, report.verdicts.evolution, report.verdicts.morphogenesis, report.jump_nodes
    );
    Ok(())
}

fn symmetry(args: SymmetryArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let mut grid = grid_spec(&args.grid)?;
    if let Some(t) = args.t {
        (grid.t_min, grid.t_max, grid.t_steps) = (t, t, 1);
    }
    let report = report::with_threads(args.output.threads, || report::symmetry_report(&model, &grid))??;
    let text = match args.output.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(args.output.out.as_deref(), &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Symmetry(a) => symmetry(a),
        Command::Groupoid(g) => groupoid::run(g),
        Command::Scenario { name } => {
            println!("{}", scenario_source(&name).expect("validated by clap"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
