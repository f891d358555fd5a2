use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gtrbench::{EndpointKind, HarnessError, Pipeline, RunConfig};

/// Generate graph questions, probe a reasoner with every GTR, build the
/// preference dataset, train the router and compare it with fixed GTRs.
#[derive(Debug, Parser)]
#[command(name = "gtrbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON). Missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Accuracy/brevity trade-off of the GRE score.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Probe trials per (question, GTR).
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Evaluation trials per (question, method).
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum)]
    endpoint: Option<EndpointKind>,
    /// Root seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write training and held-out question files.
    Generate,
    /// Probe every GTR k times per question, resuming from the probe store.
    Probe {
        /// Stop after this many new requests.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Score cached probes into the preference dataset and report.
    BuildGtrp,
    /// Train the router on the preference dataset.
    TrainRouter,
    /// Evaluate the router and all fixed-GTR baselines on held-out questions.
    Evaluate,
    /// Render evaluation reports as Markdown and TSV tables.
    Report {
        /// Evaluation report files; defaults to the configured one.
        files: Vec<PathBuf>,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(a) = cli.alpha {
        cfg.alpha = a;
    }
    if let Some(k) = cli.k {
        cfg.k = k;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(e) = cli.endpoint {
        cfg.endpoint.kind = e;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(out) = &cli.out {
        cfg.paths.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let cfg = config(&cli)?;
    // Only stages that talk to the reasoner need one built from the config.
    let pipeline = match cli.command {
        Command::Probe { .. } | Command::Evaluate => Pipeline::from_config(cfg)?,
        _ => Pipeline::new(cfg, std::sync::Arc::new(NoReasoner))?,
    };
    match cli.command {
        Command::Generate => {
            let (train, eval) = pipeline.generate()?;
            println!("wrote {train} training and {eval} held-out questions");
        }
        Command::Probe { limit } => {
            let s = pipeline.probe(limit)?;
            println!("{} cached, {} probed, {} remaining", s.cached, s.attempted, s.remaining);
        }
        Command::BuildGtrp => {
            let b = pipeline.build_gtrp()?;
            println!("{} examples, {} questions excluded", b.examples.len(), b.excluded.len());
        }
        Command::TrainRouter => {
            let m = pipeline.train_router()?;
            if let Some(rec) = &m.config {
                println!(
                    "validation top-1 in label set: {:.3} (lr {}, wd {}, {} epochs, batch {})",
                    rec.validation_accuracy,
                    rec.selected.learning_rate,
                    rec.selected.weight_decay,
                    rec.selected.epochs,
                    rec.selected.batch_size
                );
            }
        }
        Command::Evaluate => print!("{}", pipeline.evaluate()?.to_markdown()),
        Command::Report { files } => print!("{}", pipeline.report(&files)?),
    }
    Ok(())
}

/// Placeholder for stages that never call a reasoner.
struct NoReasoner;

impl gtr_core::reasoner::Reasoner for NoReasoner {
    fn ask(
        &self,
        _: &gtr_core::reasoner::ReasonerRequest,
        _: usize,
    ) -> Result<gtr_core::reasoner::ReasonerResponse, gtr_core::reasoner::ReasonerError> {
        Err(gtr_core::reasoner::ReasonerError::Config("this stage makes no reasoner calls".into()))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gtrbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
