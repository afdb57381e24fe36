use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fovstat::splitlib::{DEFAULT_COMPONENTS, DEFAULT_LAMBDAS};
use fovstat::SplitLibrary;
use fovstat_cli::count::pmf_csv_text;
use fovstat_cli::output::ensure_dir;
use fovstat_cli::scenario::PmfMethodSpec;
use fovstat_cli::{generate_library, run_cardinality, run_partition_demo, run_plan, CliError, CliResult, Scenario};

#[derive(Parser)]
#[command(name = "fovstat", version, about = "Bounded field-of-view finite set statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a split library over a grid of R and lambda.
    GenLibrary {
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated component counts.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_COMPONENTS.to_vec())]
        components: Vec<usize>,
        /// Comma-separated regularizers.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LAMBDAS.to_vec())]
        lambdas: Vec<f64>,
    },
    /// Propagate a single-object density across a FoV that reports no detections.
    PartitionDemo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// FoV cardinality pmf of the scenario's model.
    Cardinality {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        method: MethodArgs,
        /// Directory for pmf.csv and pmf.json; prints the CSV when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Place the FoV where the count inside it is most uncertain.
    Plan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Split library to use instead of the built-in one.
    #[arg(long)]
    library: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Dp,
    Mc,
    Exact,
}

#[derive(Args)]
struct MethodArgs {
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Monte Carlo trials for `--method mc`.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

impl MethodArgs {
    fn spec(&self) -> CliResult<Option<PmfMethodSpec>> {
        if self.samples == 0 {
            return Err(CliError::Validation("--samples must be positive".into()));
        }
        Ok(self.method.map(|m| match m {
            Method::Dp => PmfMethodSpec::Dp,
            Method::Exact => PmfMethodSpec::Exact,
            Method::Mc => PmfMethodSpec::MonteCarlo { samples: self.samples },
        }))
    }
}

fn load(common: &Common) -> CliResult<(Scenario, Arc<SplitLibrary>)> {
    let mut scenario = Scenario::load(&common.scenario)?;
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    let library = match &common.library {
        Some(path) => Arc::new(SplitLibrary::load(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?),
        None => Arc::new(SplitLibrary::builtin().clone()),
    };
    Ok((scenario, library))
}

fn out_dir(dir: &Path) -> CliResult<&Path> {
    ensure_dir(dir)?;
    Ok(dir)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::GenLibrary { out, components, lambdas } => {
            let lib = generate_library(&components, &lambdas, &out)?;
            println!("wrote {} entries to {}", lib.entries.len(), out.display());
        }
        Command::PartitionDemo { common, out } => {
            let (scenario, library) = load(&common)?;
            let report = run_partition_demo(&scenario, &library, Some(out_dir(&out)?))?;
            for s in &report.steps {
                println!(
                    "step {}: components {} -> {}, sampled FoV mass {:.6} -> {:.6}, retained {:.6}",
                    s.step,
                    s.components_prior,
                    s.components_posterior,
                    s.prior_inside_sampled,
                    s.posterior_inside_sampled,
                    s.retained_mass
                );
            }
        }
        Command::Cardinality { common, method, out } => {
            let (scenario, library) = load(&common)?;
            let spec = method.spec()?.unwrap_or_default();
            let dir = out.as_deref().map(out_dir).transpose()?;
            let report = run_cardinality(&scenario, &library, spec, dir)?;
            if dir.is_none() {
                print!("{}", pmf_csv_text(&report.probabilities));
            } else {
                println!("mean {:.6}, variance {:.6}", report.mean, report.variance);
            }
        }
        Command::Plan { common, method, out } => {
            let (scenario, library) = load(&common)?;
            let report = run_plan(&scenario, &library, method.spec()?, Some(out_dir(&out)?))?;
            println!(
                "best center {:?} with variance {:.6} over {} candidates",
                report.best.best_center, report.best.best_variance, report.best.candidates
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as validation errors.
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
