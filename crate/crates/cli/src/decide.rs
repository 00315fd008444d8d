use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};

use gslond::engine::{format_response, parse_submission};
use gslond::{Error, LondEngine};

use crate::args::DecideArgs;
use crate::error::{CliError, CliResult};

pub fn run(args: &DecideArgs, out: &mut impl Write) -> CliResult<()> {
    let mut engine = LondEngine::new(args.engine.config()?)?;
    let reader: Box<dyn BufRead> = match &args.input {
        Some(path) => Box::new(BufReader::new(File::open(path).map_err(|e| CliError::io(path, e))?)),
        None => Box::new(BufReader::new(std::io::stdin())),
    };
    let mut log = match &args.out {
        Some(path) => Some(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?)),
        None => None,
    };
    let w = |e: std::io::Error| CliError::io("<stdout>", e);

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CliError::io(args.input.clone().unwrap_or_else(|| "<stdin>".into()), e))?;
        let Some(submission) = parse_submission(&line, line_no)? else {
            continue;
        };
        let response = engine
            .apply(submission)
            .map_err(|e| match e {
                Error::Numerical(_) => e,
                other => Error::Parse { line: line_no, msg: other.to_string() },
            })?;
        writeln!(out, "{}", format_response(&response)).map_err(w)?;
        if let (Some(log), Some(path)) = (log.as_mut(), args.out.as_ref()) {
            writeln!(log, "{submission}").map_err(|e| CliError::io(path, e))?;
        }
    }
    if let (Some(mut log), Some(path)) = (log, args.out.as_ref()) {
        log.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}
