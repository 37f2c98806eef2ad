use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod benchcfg;
mod commands;
mod error;
mod header;

use error::{CliError, CliResult, EXIT_CONFIG};

const EXIT_CODES: &str = "\
Exit codes: 0 success, 1 invalid data or arguments, 2 configuration error,
3 parse error, 4 numeric error, 5 IO error.";

/// Selective classification: base classifiers, uncertainty scores, reject
/// options and benchmark runs.
#[derive(Debug, Parser)]
#[command(name = "selcls", version, after_help = EXIT_CODES)]
struct Cli {
    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Train a base classifier on Trn1, choosing C by Val1 risk.
    Train(TrainArgs),
    /// Train an uncertainty score on Trn2, choosing C by Val2 AuRC.
    Score(ScoreArgs),
    /// Risk-coverage curve, AuRC, R@90 and R@100 of a score on one split.
    Eval(EvalArgs),
    /// Solve a reject-option model on a risk distribution.
    Reject(RejectArgs),
    /// Run the full benchmark protocol from a configuration file.
    #[command(after_long_help = benchcfg::GRAMMAR)]
    Bench(BenchArgs),
    /// Summarize a dataset manifest, model file or score file.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Split seed; defaults to the manifest seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replicate index; replicate r splits with seed + r.
    #[arg(long, default_value_t = 0)]
    pub replicate: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Classifier kind: lr, svm, binary_svm or svor.
    #[arg(long)]
    pub kind: String,
    /// Comma-separated regularization constants.
    #[arg(long, default_value = "1,10,100,1000")]
    pub c_grid: String,
    #[arg(long, default_value_t = 1e-3)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// baseline, sele, reg or tcp.
    #[arg(long)]
    pub method: String,
    #[arg(long, default_value = "0,1,10,100,1000")]
    pub c_grid: String,
    #[arg(long, default_value_t = 0.01)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    /// Score file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub model: PathBuf,
    /// Score file; the classifier's own margin when absent.
    #[arg(long)]
    pub score: Option<PathBuf>,
    /// trn1, val1, trn2, val2, tst or all.
    #[arg(long, default_value = "tst")]
    pub split: String,
    /// Write the curve as CSV here.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RejectArgs {
    /// cost (needs --epsilon), improvement (--lambda) or coverage (--omega).
    #[arg(long)]
    pub rejection: String,
    /// Reject cost.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Target selective risk.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Target coverage.
    #[arg(long)]
    pub omega: Option<f64>,
    /// File of `risk mass` lines.
    #[arg(long, conflicts_with_all = ["manifest", "model", "score"])]
    pub atoms: Option<PathBuf>,
    /// Use the empirical distribution of a score on a split instead.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub score: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub replicate: u64,
    #[arg(long, default_value = "tst")]
    pub split: String,
    /// Also write the result here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Configuration file; see the grammar below.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output_dir` from the configuration.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub score: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub replicate: u64,
}

/// Settings that determine the results. Thread count and output locations
/// are left out.
fn canonical(command: &Command) -> String {
    let mut c = command.clone();
    match &mut c {
        Command::Train(a) => a.out = PathBuf::new(),
        Command::Score(a) => a.out = PathBuf::new(),
        Command::Eval(a) => a.curve = None,
        Command::Reject(a) => a.out = None,
        Command::Bench(a) => a.out_dir = None,
        Command::Inspect(_) => {}
    }
    format!("{c:?}")
}

fn run(cli: Cli) -> CliResult<String> {
    if cli.threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let config = canonical(&cli.command);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Train(a) => commands::train(a, &config),
        Command::Score(a) => commands::score(a, &config),
        Command::Eval(a) => commands::eval(a, &config),
        Command::Reject(a) => commands::reject(a, &config),
        Command::Bench(a) => commands::bench(a, cli.threads),
        Command::Inspect(a) => commands::inspect(a),
    })
}

/// Parses `args`, runs the command, prints its report and returns the exit code.
fn execute<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("selcls: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(execute(std::env::args_os()))
}

#[cfg(test)]
mod tests;
