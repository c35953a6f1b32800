mod args;
mod commands;
mod config;
mod error;
mod gold;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::RunConfig;
use error::{CliError, Result, EXIT_USAGE};

fn run(cli: Cli) -> Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::validation("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
        cfg.annotator.max_in_flight = jobs;
    }
    match &cli.command {
        Command::Prepare(a) => commands::prepare(a),
        Command::Split(a) => commands::split(a),
        Command::Stats(a) => commands::stats(a, &cfg),
        Command::Train(a) => commands::train(a, &cfg),
        Command::Predict(a) => commands::predict_cmd(a, &cfg),
        Command::AnnotateLlm(a) => commands::annotate_llm(a, &cfg),
        Command::LexiconAnnotate(a) => commands::lexicon_annotate_cmd(a),
        Command::Evaluate(a) => commands::evaluate(a, &cfg),
        Command::Analyze(a) => commands::analyze(a, &cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
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
