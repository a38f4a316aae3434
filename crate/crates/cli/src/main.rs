use std::process::ExitCode;

use clap::Parser;
use sbs_cli::{run_experiment, write_outputs, Cli, CliError, ToolkitConfig};

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ToolkitConfig::load(path)?,
        None => ToolkitConfig::defaults(),
    };
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    let outputs = run_experiment(&cfg, &cli.command)?;
    let manifest = write_outputs(&cli.out, &cfg, cli.command.name(), &outputs)?;
    for f in &manifest.files {
        eprintln!("wrote {}", cli.out.join(&f.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sbs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
