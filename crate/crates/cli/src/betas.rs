use std::io::Write;

use gslond::sum::NeumaierSum;

use crate::args::BetasArgs;
use crate::error::{CliError, CliResult};

pub fn run(args: &BetasArgs, out: &mut impl Write) -> CliResult<()> {
    let schedule = args.schedule.schedule()?;
    if let Some(bound) = schedule.bound() {
        if args.count > bound {
            return Err(CliError::Usage(format!("--count {} exceeds the bound N = {bound}", args.count)));
        }
    }
    let w = |e: std::io::Error| CliError::io("<stdout>", e);
    writeln!(out, "index,beta,cumulative").map_err(w)?;
    let mut total = NeumaierSum::default();
    for (j, beta) in schedule.take(args.count)?.into_iter().enumerate() {
        total.add(beta);
        writeln!(out, "{},{:.8},{:.8}", j + 1, beta, total.value()).map_err(w)?;
    }
    Ok(())
}
