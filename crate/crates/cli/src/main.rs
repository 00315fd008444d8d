mod args;
mod betas;
mod boundaries;
mod decide;
mod error;
mod presets;
mod simulate;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, ShowConfigArgs};
use error::{CliError, CliResult};

fn show_config(args: &ShowConfigArgs, out: &mut impl Write) -> CliResult<()> {
    let w = |e: std::io::Error| CliError::io("<stdout>", e);
    let Some(name) = &args.name else {
        for (name, _) in presets::PRESETS {
            writeln!(out, "{name}").map_err(w)?;
        }
        return Ok(());
    };
    let text = simulate::load_config(name)?;
    write!(out, "{text}").map_err(w)?;
    if args.expand {
        writeln!(out).map_err(w)?;
        for s in gslond::sim::parse_grid(&text)? {
            writeln!(out, "# {} {}", s.id, s.describe()).map_err(w)?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    match &cli.command {
        Command::Boundaries(a) => boundaries::run(a, &mut out)?,
        Command::Betas(a) => betas::run(a, &mut out)?,
        Command::Decide(a) => decide::run(a, &mut out)?,
        Command::Simulate(a) => simulate::run(a)?,
        Command::ShowConfig(a) => show_config(a, &mut out)?,
    }
    out.flush().map_err(|e| CliError::io("<stdout>", e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
