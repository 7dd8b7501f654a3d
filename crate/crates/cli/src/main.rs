use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gridrecov_core::bounds::{bounds_csv, bounds_report};
use gridrecov_core::graph::{
    count_saps, enumerate_filled_regions, group_counts, EnumerationCaps, ParsedGraph, DEFAULT_SAP_CAP,
};
use gridrecov_core::inference::{max_agreement_exhaustive, sign_vote};
use gridrecov_core::noise::{hamming_error, sample_observations};
use gridrecov_core::oracles::brute_force_max;
use gridrecov_core::{build_grid, Labeling, NoiseParams, Signals};
use gridrecov_cli::acceptance::{self, determinism_config};
use gridrecov_cli::{
    emit_csv, emit_plot, predict, run_experiment, table_csv, AdversaryKind, Algorithm, CliError, CliResult,
    ExperimentConfig, TruthKind,
};

#[derive(Parser)]
#[command(name = "gridrecov", version, about = "Label recovery from noisy node and edge observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one instance and write graph, truth and observation files.
    Generate(GenerateArgs),
    /// Run one algorithm on an instance.
    Solve(SolveArgs),
    /// Sweep edge noise levels and report mean errors as CSV.
    Experiment(ExperimentArgs),
    /// Evaluate the analytic bounds as CSV.
    Bounds(BoundsArgs),
    /// Count filled regions of a grid, or polygons of the square lattice.
    Regions(RegionsArgs),
    /// Run the oracle checks, or the full acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 20)]
    rows: usize,
    #[arg(long, default_value_t = 20)]
    cols: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(short, default_value_t = 0.05)]
    p: f64,
    #[arg(short, default_value_t = 0.4)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "plus")]
    truth: String,
    #[arg(long, default_value = "flip")]
    adversary: String,
    /// Output directory for graph.txt, truth.txt and signals.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Graph file: `grid R C` or an edge list.
    #[arg(long)]
    graph: PathBuf,
    /// Observation file with `node v x` and `edge u v x` lines.
    #[arg(long)]
    signals: PathBuf,
    #[arg(long, default_value = "two-step")]
    algo: String,
    #[arg(short, default_value_t = 0.05)]
    p: f64,
    #[arg(short, default_value_t = 0.4)]
    q: f64,
    /// Truth file; when given the Hamming error is printed to stderr.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Labeling output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated edge noise levels.
    #[arg(short, value_delimiter = ',', default_values_t = [0.01, 0.02, 0.04, 0.06, 0.08, 0.1])]
    p: Vec<f64>,
    #[arg(short, default_value_t = 0.4)]
    q: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated algorithms: two-step, marginal, map-full, edge-only, oracle.
    #[arg(long, value_delimiter = ',', default_values_t = ["two-step".to_string(), "map-full".to_string(), "edge-only".to_string()])]
    algo: Vec<String>,
    #[arg(long, default_value = "flip")]
    adversary: String,
    #[arg(long, default_value = "plus")]
    truth: String,
    /// CSV output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart of the table.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Fill the wall_ms column with measured times.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(short, value_delimiter = ',', default_values_t = [0.005, 0.01, 0.017])]
    p: Vec<f64>,
    /// Vertex count for the series bound.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Largest polygon perimeter in the refined constant.
    #[arg(long, default_value_t = 12)]
    imax: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegionsArgs {
    #[arg(long, default_value_t = 5)]
    rows: usize,
    #[arg(long, default_value_t = 5)]
    cols: usize,
    #[arg(long, default_value_t = 12)]
    max_boundary: usize,
    /// Print the polygon census up to this perimeter instead.
    #[arg(long)]
    census: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `oracles` for a quick pass, `acceptance` for every criterion.
    #[arg(long, default_value = "oracles")]
    suite: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn config_error(e: gridrecov_core::Error) -> CliError {
    if e.is_capacity() {
        CliError::Core(e)
    } else {
        CliError::Config(e.to_string())
    }
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let grid = build_grid(args.grid.rows, args.grid.cols).map_err(config_error)?;
    let truth_kind: TruthKind = args.truth.parse()?;
    let adversary: AdversaryKind = args.adversary.parse()?;
    let params = NoiseParams::with_adversary(args.p, args.q, adversary.mode()).map_err(config_error)?;
    let truth = truth_kind.sample(&grid, args.seed);
    let obs = sample_observations(&grid, &truth, &params, args.seed)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    for (name, text) in [
        ("graph.txt", grid.to_grid_line()),
        ("truth.txt", truth.to_text()),
        ("signals.txt", obs.signals().to_text(&grid)),
    ] {
        let path = args.out.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

fn solve(args: SolveArgs) -> CliResult<()> {
    let parsed: ParsedGraph = read(&args.graph)?.parse().map_err(config_error)?;
    let signals = Signals::parse(&read(&args.signals)?, parsed.graph()).map_err(config_error)?;
    let algorithm: Algorithm = args.algo.parse()?;
    let labels = match &parsed {
        ParsedGraph::Grid(grid) => predict(algorithm, grid, &signals, args.p, args.q)?,
        ParsedGraph::General(g) => {
            let fail = |e| CliError::algorithm(algorithm, e);
            match algorithm {
                Algorithm::EdgeOnly => max_agreement_exhaustive(g, &signals).map_err(fail)?.labeling,
                Algorithm::TwoStep => sign_vote(&max_agreement_exhaustive(g, &signals).map_err(fail)?.labeling, &signals),
                Algorithm::Oracle => {
                    let w = gridrecov_core::inference::gamma(args.p, args.q).map_err(fail)?;
                    brute_force_max(g, &signals, w.value()).map_err(fail)?.1
                }
                _ => return Err(CliError::Config(format!("{algorithm} needs a grid graph"))),
            }
        }
    };
    if let Some(path) = &args.truth {
        let truth = Labeling::parse(&read(path)?).map_err(config_error)?;
        eprintln!("error {}", hamming_error(&labels, &truth).map_err(config_error)?);
    }
    write_output(args.out.as_deref(), &labels.to_text())
}

fn experiment_config(args: &ExperimentArgs) -> CliResult<ExperimentConfig> {
    Ok(ExperimentConfig {
        rows: args.grid.rows,
        cols: args.grid.cols,
        ps: args.p.clone(),
        q: args.q,
        trials: args.trials,
        seed: args.seed,
        algorithms: args.algo.iter().map(|a| a.parse()).collect::<CliResult<_>>()?,
        adversary: args.adversary.parse()?,
        truth: args.truth.parse()?,
        output: args.out.clone(),
        timing: args.timing,
    })
}

fn experiment(args: ExperimentArgs) -> CliResult<()> {
    let cfg = experiment_config(&args)?;
    let table = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => emit_csv(&table, path)?,
        None => write_output(None, &table_csv(&table))?,
    }
    if let Some(path) = &args.plot {
        emit_plot(&table, path)?;
    }
    Ok(())
}

fn bounds(args: BoundsArgs) -> CliResult<()> {
    if args.imax > DEFAULT_SAP_CAP {
        return Err(CliError::Capacity(format!("polygon census supports i_max up to {DEFAULT_SAP_CAP}")));
    }
    let census = count_saps(args.imax).map_err(config_error)?;
    let rows = bounds_report(&args.p, args.n, &census, args.imax).map_err(config_error)?;
    write_output(args.out.as_deref(), &bounds_csv(&rows))
}

fn regions(args: RegionsArgs) -> CliResult<()> {
    if let Some(perimeter) = args.census {
        let census = count_saps(perimeter).map_err(config_error)?;
        return write_output(args.out.as_deref(), &census.to_csv());
    }
    let grid = build_grid(args.rows, args.cols).map_err(config_error)?;
    let regions = enumerate_filled_regions(&grid, args.max_boundary, EnumerationCaps::default()).map_err(config_error)?;
    let mut csv = String::from("boundary,type,count\n");
    for ((i, class), count) in group_counts(&regions) {
        csv.push_str(&format!("{i},{},{count}\n", class.label()));
    }
    write_output(args.out.as_deref(), &csv)
}

fn verify(args: VerifyArgs) -> CliResult<()> {
    match args.suite.as_str() {
        "oracles" => {
            let reports = acceptance::oracle_suite(args.trials, args.seed)?;
            let failed = reports.iter().filter(|r| r.applicable && !r.pass).count();
            let lines: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
            write_output(None, &lines)?;
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} of {} oracle checks failed", reports.len())));
            }
            Ok(())
        }
        "acceptance" => {
            let cfg = determinism_config();
            let outcomes = acceptance::run_all(|_| Ok(table_csv(&run_experiment(&cfg)?).into_bytes()));
            let lines: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
            write_output(None, &lines)?;
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} acceptance criteria failed")));
            }
            Ok(())
        }
        other => Err(CliError::Config(format!("unknown suite '{other}'"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Solve(args) => solve(args),
        Command::Experiment(args) => experiment(args),
        Command::Bounds(args) => bounds(args),
        Command::Regions(args) => regions(args),
        Command::Verify(args) => verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gridrecov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
