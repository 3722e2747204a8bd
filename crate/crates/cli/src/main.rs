use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skewrot_cli::{format_summary, list_experiments, run, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "skewrot", version, about = "Run skew-rotation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered experiments and their parameters.
    List,
    /// Run an experiment from a JSON config or by name.
    Run {
        #[arg(long, conflicts_with = "experiment")]
        config: Option<PathBuf>,
        #[arg(long)]
        experiment: Option<String>,
        /// Override a parameter, or n_steps / seed / output_prefix.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn build_config(config: Option<PathBuf>, experiment: Option<String>, set: &[String]) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match (config, experiment) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json_str(&text)?
        }
        (None, Some(name)) => ExperimentConfig::new(&name),
        (None, None) => return Err(HarnessError::Config("give --config or --experiment".into())),
    };
    for s in set {
        cfg.apply_override(s)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in list_experiments() {
                println!("{}\t{}", e.name, e.description);
                println!("    n_steps (default {})", e.default_n_steps);
                for p in e.params {
                    println!("    {} (default {}): {}", p.name, p.default, p.help);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, experiment, set } => {
            let output_dir = std::env::var_os("OUTPUT_DIR").map(PathBuf::from);
            let result = build_config(config, experiment, &set).and_then(|cfg| run(&cfg, output_dir.as_deref()));
            match result {
                Ok(bundle) => {
                    print!("{}", format_summary(&bundle));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("skewrot: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
