use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qhi_core::linalg::C64;
use qhi_core::pipeline::{self, PipelineError, RunConfig, Stage, SweepSpec, WordInput};
use qhi_core::report::{InvariantReport, Thresholds};
use qhi_core::roots::RootSelectors;
use qhi_core::shear::{SeedGrid, SolverOptions, SurfaceKind};

const EXIT_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

/// Quantum hyperbolic invariant of a pseudo-Anosov map, certified by the
/// conjugation identity.
#[derive(Parser, Debug)]
#[command(name = "invariant", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CSV sweep over words, N, k and root selectors.
    Tabulate(TabulateArgs),
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Seed grid `moduli,arguments,rmin,rmax`.
    #[arg(long, env = "QHI_SEED_GRID")]
    seed_grid: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    newton_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    dedup_radius: f64,
    #[arg(long, default_value_t = 1e-11)]
    tol_relations: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_per_step: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_full_word: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_cyclic: f64,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// `torus` or `sphere`.
    #[arg(long, default_value = "torus")]
    surface: String,
    /// Word in R and L.
    #[arg(long, conflicts_with = "matrix")]
    word: Option<String>,
    /// SL(2,Z) matrix, row-major `a,b,c,d`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    k: i64,
    /// Root selectors for `u_i`, one per step; missing entries are 0.
    #[arg(long, value_delimiter = ',')]
    selectors_u: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    selectors_v: Vec<usize>,
    /// Manual start weights `x1re,x1im,x2re,x2im`, skipping the solver.
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Re-check a stored report instead of running.
    #[arg(long, conflicts_with_all = ["word", "matrix", "weights"])]
    verify_only: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TabulateArgs {
    #[arg(long, default_value = "torus")]
    surface: String,
    #[arg(long, value_delimiter = ',', required = true)]
    words: Vec<String>,
    #[arg(long = "N", value_delimiter = ',', default_value = "3")]
    ns: Vec<usize>,
    #[arg(long = "k", value_delimiter = ',', default_value = "1")]
    ks: Vec<i64>,
    /// Sweep the initial selectors over all N² pairs.
    #[arg(long)]
    selector_sweep: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn surface(name: &str) -> Result<SurfaceKind, PipelineError> {
    name.parse()
        .map_err(|m: String| PipelineError::new(Stage::Config, "InvalidSurface", m))
}

impl SolverArgs {
    fn options(&self) -> Result<SolverOptions, PipelineError> {
        let mut opts = SolverOptions {
            newton_tolerance: self.newton_tol,
            dedup_radius: self.dedup_radius,
            ..Default::default()
        };
        if let Some(grid) = &self.seed_grid {
            opts.grid = grid
                .parse::<SeedGrid>()
                .map_err(|e| PipelineError::at(Stage::Config, &e))?;
        }
        Ok(opts)
    }

    fn thresholds(&self) -> Thresholds {
        Thresholds {
            relations: self.tol_relations,
            per_step: self.tol_per_step,
            full_word: self.tol_full_word,
            cyclic_check: self.tol_cyclic,
        }
    }
}

fn parse_weights(text: &str) -> Result<(C64, C64), PipelineError> {
    let bad = || {
        PipelineError::new(
            Stage::Config,
            "InvalidWeights",
            format!("expected x1re,x1im,x2re,x2im; got {text:?}"),
        )
    };
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match parts[..] {
        [a, b, c, d] => Ok((C64::new(a, b), C64::new(c, d))),
        _ => Err(bad()),
    }
}

fn config(args: &RunArgs) -> Result<RunConfig, PipelineError> {
    let input = match (&args.word, &args.matrix) {
        (Some(w), None) => {
            WordInput::Word(w.parse().map_err(|e| PipelineError::at(Stage::Word, &e))?)
        }
        (None, Some(m)) => {
            WordInput::Matrix(m.parse().map_err(|e| PipelineError::at(Stage::Word, &e))?)
        }
        _ => {
            return Err(PipelineError::new(
                Stage::Config,
                "MissingInput",
                "give exactly one of --word or --matrix",
            ))
        }
    };
    let mut cfg = RunConfig::new(surface(&args.surface)?, args.n, input);
    cfg.k = args.k;
    cfg.selectors = RootSelectors {
        u: args.selectors_u.clone(),
        v: args.selectors_v.clone(),
    };
    cfg.weights = args.weights.as_deref().map(parse_weights).transpose()?;
    cfg.solver = args.solver.options()?;
    cfg.thresholds = args.solver.thresholds();
    Ok(cfg)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| PipelineError::new(Stage::Config, "Io", format!("{}: {e}", p.display()))),
        None => {
            emit(&format!("{text}\n"));
            Ok(())
        }
    }
}

fn verify(path: &Path) -> Result<u8, PipelineError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::new(Stage::Verify, "Io", format!("{}: {e}", path.display())))?;
    let report: InvariantReport = serde_json::from_str(&text)
        .map_err(|e| PipelineError::new(Stage::Verify, "MalformedReport", e))?;
    let outcome = pipeline::verify_report(&report)?;
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(&outcome).expect("finite values")
    ));
    Ok(if outcome.passed { 0 } else { EXIT_FAILED })
}

fn run(args: &RunArgs) -> Result<u8, PipelineError> {
    if let Some(path) = &args.verify_only {
        return verify(path);
    }
    let report = pipeline::run(&config(args)?)?;
    write_output(args.output.as_deref(), &report.to_json())?;
    if !report.passed {
        eprintln!("residual check failed: {}", report.failures.join("; "));
    }
    Ok(report.exit_code() as u8)
}

fn tabulate(args: &TabulateArgs) -> Result<u8, PipelineError> {
    let mut spec = SweepSpec::new(surface(&args.surface)?, args.words.clone(), args.ns.clone());
    spec.ks = args.ks.clone();
    spec.selector_sweep = args.selector_sweep;
    spec.solver = args.solver.options()?;
    spec.thresholds = args.solver.thresholds();
    let csv = pipeline::tabulate(&spec).map_err(|e| PipelineError::new(Stage::Config, "Io", e))?;
    match &args.output {
        Some(p) => fs::write(p, csv).map_err(|e| {
            PipelineError::new(Stage::Config, "Io", format!("{}: {e}", p.display()))
        })?,
        None => emit(&csv),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Some(Command::Tabulate(args)) => tabulate(args),
        None => run(&cli.run),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            emit(&format!("{}\n", e.to_json()));
            eprintln!("{e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
