use clap::{Parser, Subcommand};
use inkage::config::RunConfig;
use inkage::dataset::{TableKind, Task};
use inkage::models::ModelKind;
use inkage::pipeline;
use inkage::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Handwriting and tremor indicators, age-group classifiers and Shapley explanations.
#[derive(Parser, Debug)]
#[command(name = "inkage", version)]
struct Cli {
    /// TOML run configuration; absent keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Refit imputation and scaling inside each training fold.
    #[arg(long, global = true)]
    fold_safe_scaling: bool,
    /// Overrides `run_dir`.
    #[arg(long, global = true)]
    run_dir: Option<PathBuf>,
    /// Overrides `input_dir`.
    #[arg(long, global = true)]
    input_dir: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the synthetic cohort.
    Synth,
    /// Extract indicators into the D_T, D_L and D_TL feature tables.
    Extract,
    /// Export the normalized task datasets.
    Dataset,
    /// Leave-one-out evaluation of every task, dataset and model.
    TrainEval,
    /// Shapley attributions for one task, dataset and model.
    Explain {
        #[arg(long)]
        task: Option<Task>,
        #[arg(long)]
        dataset: Option<TableKind>,
        #[arg(long)]
        model: Option<ModelKind>,
    },
    /// Consolidate stored evaluation reports into one metrics table.
    Report,
    /// Run every step in order.
    All,
}

fn effective_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.fold_safe_scaling {
        cfg.fold_safe_scaling = true;
    }
    if let Some(dir) = &cli.run_dir {
        cfg.run_dir = dir.clone();
    }
    if let Some(dir) = &cli.input_dir {
        cfg.input_dir = Some(dir.clone());
    }
    if let Some(Command::Explain { task, dataset, model }) = &cli.command {
        cfg.explain_task = task.unwrap_or(cfg.explain_task);
        cfg.explain_dataset = dataset.unwrap_or(cfg.explain_dataset);
        cfg.explain_model = model.unwrap_or(cfg.explain_model);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = effective_config(cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::ConfigInvalid("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
    }
    let Some(command) = &cli.command else {
        return Err(Error::ConfigInvalid("no subcommand given (see --help)".into()));
    };
    match command {
        Command::Synth => {
            let entries = pipeline::cmd_synth(&cfg)?;
            eprintln!("wrote {} recordings to {}", entries.len(), cfg.input_dir().display());
        }
        Command::Extract => {
            let tables = pipeline::cmd_extract(&cfg)?;
            eprintln!(
                "feature tables: {} D_T, {} D_L, {} D_TL rows",
                tables.text.rows.len(),
                tables.list.rows.len(),
                tables.text_list.rows.len()
            );
        }
        Command::Dataset => {
            let sets = pipeline::cmd_dataset(&cfg)?;
            eprintln!("wrote {} task datasets", sets.len());
        }
        Command::TrainEval => {
            let reports = pipeline::cmd_train_eval(&cfg)?;
            eprintln!("wrote {} metric rows to {}", reports.len(), cfg.run_dir.join(pipeline::EVAL_METRICS).display());
        }
        Command::Explain { .. } => explain(&cfg)?,
        Command::Report => {
            let reports = pipeline::cmd_report(&cfg)?;
            eprintln!("wrote {} metric rows to {}", reports.len(), cfg.run_dir.join(pipeline::REPORT_METRICS).display());
        }
        Command::All => {
            pipeline::cmd_synth(&cfg)?;
            pipeline::cmd_extract(&cfg)?;
            pipeline::cmd_dataset(&cfg)?;
            pipeline::cmd_train_eval(&cfg)?;
            explain(&cfg)?;
            let reports = pipeline::cmd_report(&cfg)?;
            eprintln!("wrote {} metric rows to {}", reports.len(), cfg.run_dir.join(pipeline::REPORT_METRICS).display());
        }
    }
    Ok(())
}

fn explain(cfg: &RunConfig) -> Result<(), Error> {
    let report = pipeline::cmd_explain(cfg)?;
    let top: Vec<&str> = report.ranking.iter().take(3).map(|r| r.feature.as_str()).collect();
    eprintln!("{} {} {}: top features {}", cfg.explain_task, cfg.explain_dataset, cfg.explain_model, top.join(", "));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", pipeline::error_record(&e));
            ExitCode::FAILURE
        }
    }
}
