use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qkdefect::config::parse_config;
use qkdefect::parallel::thread_pool;
use qkdefect::report::{render_report, ReportFormat};
use qkdefect::runner::{self, validate};
use qkdefect::{io, Error, ExperimentConfig, ExperimentReport, Result};

/// Quantum-kernel SVM experiments for binary defect classification.
#[derive(Parser)]
#[command(name = "qkdefect", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` experiment configuration; defaults apply without one.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for kernel estimation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic corpus as PNG files plus manifest.csv.
    Generate(Common),
    /// Featurize, split and fit PCA + scaler; writes data/.
    Preprocess(Common),
    /// Estimate every kernel matrix from data/; writes kernels/.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Also write each training overlap circuit in text form here.
        #[arg(long)]
        dump_circuits: Option<PathBuf>,
    },
    /// Fit an SVM per kernel; writes models/.
    Train(Common),
    /// Score the test rows; writes predictions/.
    Predict(Common),
    /// Compute metrics and write report.json.
    Evaluate(Common),
    /// All stages end to end.
    Run(Common),
    /// Render report.json as CSV or Markdown.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
    },
}

fn load_config(c: &Common) -> Result<ExperimentConfig> {
    let mut config = match &c.config {
        Some(path) => parse_config(&io::read_text(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &c.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = c.seed {
        config.seed = seed;
    }
    validate(&config)?;
    Ok(config)
}

fn with_pool<T: Send>(c: &Common, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    thread_pool(c.threads).install(f)
}

fn print_summary(report: &ExperimentReport) {
    for row in report.all_rows() {
        let m = &row.metrics.macro_avg;
        println!(
            "{:<28} precision {:.3}  recall {:.3}  f1 {:.3}  ({:.2}s)",
            row.name,
            m.precision,
            m.recall,
            m.f1,
            row.kernel_seconds + row.svm_seconds
        );
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(c) => {
            let config = load_config(&c)?;
            let manifest = runner::generate_corpus(&config, &config.output_dir)?;
            println!("wrote {}", manifest.display());
        }
        Command::Preprocess(c) => {
            let config = load_config(&c)?;
            let data = with_pool(&c, || runner::preprocess(&config))?;
            println!(
                "train {} / test {} samples, {} features",
                data.x_train.rows(),
                data.x_test.rows(),
                data.x_train.cols()
            );
        }
        Command::Kernel {
            common: c,
            dump_circuits,
        } => {
            let config = load_config(&c)?;
            let data = runner::load_prepared(&config.output_dir)?;
            let kernels = with_pool(&c, || {
                runner::compute_kernels(&config, &data, dump_circuits.as_deref())
            })?;
            println!(
                "wrote {} kernel pairs to {}",
                kernels.len(),
                config.output_dir.join("kernels").display()
            );
        }
        Command::Train(c) => {
            let config = load_config(&c)?;
            let data = runner::load_prepared(&config.output_dir)?;
            let kernels = runner::load_kernels(&config)?;
            let models = runner::train_models(&config, &data, &kernels)?;
            println!("wrote {} models", models.len());
        }
        Command::Predict(c) => {
            let config = load_config(&c)?;
            let kernels = runner::load_kernels(&config)?;
            let models = runner::load_models(&config)?;
            runner::predict_all(&config, &kernels, &models)?;
            println!("wrote predictions for {} configurations", models.len());
        }
        Command::Evaluate(c) => {
            let config = load_config(&c)?;
            let out = config.output_dir.as_path();
            let data = runner::load_prepared(out)?;
            let kernels = runner::load_kernels(&config)?;
            let models = runner::load_models(&config)?;
            let predictions = runner::load_predictions(&config)?;
            let report = runner::evaluate_all(&config, &data, &kernels, &models, &predictions)?;
            print_summary(&report);
        }
        Command::Run(c) => {
            let config = load_config(&c)?;
            let report = runner::run_experiment(&config, c.threads)?;
            print_summary(&report);
            println!("artifacts in {}", config.output_dir.display());
        }
        Command::Report { common: c, format } => {
            let config = load_config(&c)?;
            let out: &Path = &config.output_dir;
            let report: ExperimentReport = io::read_json(out.join("report.json"))?;
            let file = out.join(match format {
                ReportFormat::Csv => "report.csv",
                ReportFormat::Markdown => "report.md",
            });
            qkdefect::report::emit_report(&report, format, &file)?;
            print!("{}", render_report(&report, format));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e))
        }
    }
}

fn exit_status(e: &Error) -> u8 {
    e.exit_code() as u8
}
