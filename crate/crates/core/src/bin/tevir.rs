use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tevir::env::{Env, TaskSpec};
use tevir::error::Error;
use tevir::harness::{ablate, report, run_suite, Drop, ExperimentConfig, Summary};
use tevir::latent::{multi_view_similarity, ViewWeights};
use tevir::sequence::{load, oracle_for_task, save, DEFAULT_HORIZON};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "tevir", version, about = "Dense rewards from key-frame sequences: experiments and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment suite.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seeds, replacing the config's.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite with one reward term or view removed.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        /// r_dist, r_prog, r_expl, view:left, view:top or view:close.
        #[arg(long)]
        drop: String,
    },
    /// Summarize a results directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
    /// TVSEQ sequence files.
    Seq {
        #[command(subcommand)]
        command: SeqCommand,
    },
}

#[derive(Subcommand)]
enum SeqCommand {
    /// Write the oracle sequence for a task's reset with `seed`.
    Export {
        #[arg(long)]
        task: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
    },
    /// Print a sequence file's header and frame similarities.
    Inspect { file: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Usage(_) => EXIT_CONFIG,
        Error::Format { .. } | Error::Io { .. } => EXIT_RUNTIME,
    }
}

fn finish(summary: &Summary, out: &std::path::Path) -> Result<ExitCode, Error> {
    let failed: Vec<_> = summary.failures().collect();
    println!(
        "{} runs, {} failed; metrics in {}",
        summary.runs.len(),
        failed.len(),
        out.display()
    );
    for r in &failed {
        eprintln!("run {} failed: {}", r.id, r.error.as_deref().unwrap_or("unknown"));
    }
    Ok(if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_RUNTIME)
    })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { config, seeds, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seeds) = seeds {
                cfg.seeds = seeds;
            }
            if let Some(out) = out {
                cfg.out = Some(out);
            }
            let summary = run_suite(&cfg)?;
            finish(&summary, &cfg.out_dir())
        }
        Command::Ablate { config, drop } => {
            let cfg = ExperimentConfig::load(&config)?;
            let drop: Drop = drop.parse()?;
            let out = tevir::harness::suite::ablation_dir(&cfg, &drop);
            let summary = ablate(&cfg, drop)?;
            finish(&summary, &out)
        }
        Command::Report { dir } => {
            print!("{}", report(&dir)?.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Seq { command } => match command {
            SeqCommand::Export {
                task,
                seed,
                out,
                horizon,
            } => {
                let task = TaskSpec::by_name(&task)?;
                let (start, _) = Env::new(task.clone()).reset(seed);
                let seq = oracle_for_task(&task, &start, horizon)?;
                save(&seq, &out)?;
                println!("wrote {} ({} frames of {})", out.display(), seq.horizon(), seq.task_id());
                Ok(ExitCode::SUCCESS)
            }
            SeqCommand::Inspect { file } => {
                let seq = load(&file)?;
                let views: Vec<String> = seq.views().iter().map(|v| v.to_string()).collect();
                println!("task    {}", seq.task_id());
                println!("frames  {}", seq.horizon());
                println!("views   {}", views.join(", "));
                println!("dims    {:?}", seq.frame(0).dims());
                let w = ViewWeights::uniform(seq.views().clone());
                println!("frame  sim(first)  sim(prev)  sim(last)");
                for (h, f) in seq.frames().iter().enumerate() {
                    let prev = if h == 0 { f } else { seq.frame(h - 1) };
                    println!(
                        "{h:>5}  {:>10.4}  {:>9.4}  {:>9.4}",
                        multi_view_similarity(f, seq.frame(0), &w)?,
                        multi_view_similarity(f, prev, &w)?,
                        multi_view_similarity(f, seq.last(), &w)?,
                    );
                }
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tevir: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
