use std::process::ExitCode;

use clap::Parser;
use qca_cli::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = cli.command.parts();
    let result = args.to_spec(command).and_then(|spec| {
        let summary = qca_cli::run(&spec)?;
        eprintln!(
            "{}: {} cells, {} rows -> {}",
            command.name(),
            summary.cells,
            summary.rows,
            spec.output_path.display()
        );
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qca {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
