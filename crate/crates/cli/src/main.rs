mod args;
mod commands;
mod config;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{execute, Run};
use error::CliError;
use manifest::RunManifest;

fn parse_cli() -> Result<Cli, CliError> {
    let argv = config::merge_config(std::env::args_os().collect())?;
    Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            let _ = e.print();
            std::process::exit(0);
        }
        CliError::usage(e.to_string().trim_end().to_string())
    })
}

fn write_manifest(run: &Run) -> Result<(), CliError> {
    let file = std::fs::File::create(run.out.join("manifest.json"))?;
    cybermob::output::write_json(std::io::BufWriter::new(file), &run.manifest)?;
    Ok(())
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            return fail(&CliError::runtime(format!("cannot start thread pool: {e}")));
        }
    }
    let out = cli.command.out_dir().clone();
    if let Err(e) = std::fs::create_dir_all(&out) {
        return fail(&CliError::usage(format!("cannot create output directory {}: {e}", out.display())));
    }
    let config = serde_json::to_value(&cli).unwrap_or(serde_json::Value::Null);
    let mut run = Run::new(out, RunManifest::new(cli.command.name(), config));
    let result = execute(&mut run, &cli.command);
    if let Err(e) = &result {
        run.manifest.error = Some(e.clone());
    }
    let written = write_manifest(&run);
    match (result, written) {
        (Err(e), _) | (Ok(()), Err(e)) => fail(&e),
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
    }
}
