use std::io::Write;

use gslond::engine::ProcedureKind;
use gslond::tables::{level_table, variant_table, AnalysisOrder, TableSetup};
use gslond::SpendingKind;

use crate::args::{BetaModeArg, BoundariesArgs, ScheduleArgs, SpendingArg};
use crate::error::{CliError, CliResult};

const VARIANTS: [ProcedureKind; 4] =
    [ProcedureKind::GsLond, ProcedureKind::GsLondII, ProcedureKind::GsLondIII, ProcedureKind::GsLondIIandIII];

// Variant tables enumerate 3^(K-1) outcome combinations.
const MAX_DEFAULT_VARIANT_K: usize = 6;

pub fn run(args: &BoundariesArgs, out: &mut impl Write) -> CliResult<()> {
    let k = args.hypotheses;
    if k == 0 {
        return Err(CliError::Usage("--hypotheses must be at least 1".into()));
    }
    let n_bound = match args.beta_mode {
        BetaModeArg::Bounded | BetaModeArg::Equal => Some(args.n_bound.unwrap_or(k)),
        _ => args.n_bound,
    };
    let schedule = ScheduleArgs { alpha: args.alpha, beta_mode: args.beta_mode, n_bound }.schedule()?;
    let kinds: Vec<SpendingKind> = if args.spending.is_empty() {
        vec![SpendingKind::Pocock, SpendingKind::ObrienFleming]
    } else {
        args.spending.iter().map(|&s| SpendingKind::from(s)).collect()
    };

    let w = |e: std::io::Error| CliError::io("<stdout>", e);
    writeln!(out, "# nominal levels: alpha = {}, beta = {:?}, t1 = {}", args.alpha, schedule.mode(), args.t1).map_err(w)?;
    let mut header = format!("{:<4} {:>4} {:>10}", "H", "sumR", "LOND");
    for kind in &kinds {
        header.push_str(&format!(" {:>10} {:>10}", format!("{} stage1", kind.label()), format!("{} stage2", kind.label())));
    }
    writeln!(out, "{header}").map_err(w)?;
    for row in level_table(&schedule, k, &kinds, args.t1)? {
        let h = row.hypothesis.map_or("-".to_string(), |i| i.to_string());
        let mut line = format!("{:<4} {:>4} {:>10.6}", h, row.prior_rejections, row.lond_level);
        for pair in &row.pairs {
            line.push_str(&format!(" {:>10.6} {:>10.6}", pair.alpha1, pair.alpha2));
        }
        writeln!(out, "{line}").map_err(w)?;
    }

    if args.levels_only || (args.order.is_none() && k > MAX_DEFAULT_VARIANT_K) {
        return Ok(());
    }
    let order: AnalysisOrder = match &args.order {
        Some(text) => text.parse()?,
        None => AnalysisOrder::staggered(k),
    };
    if order.hypotheses() > k && schedule.bound().is_some_and(|b| order.hypotheses() > b) {
        return Err(CliError::Usage(format!(
            "ordering mentions {} hypotheses but the beta bound is {}",
            order.hypotheses(),
            schedule.bound().unwrap_or(0)
        )));
    }
    let targets: Vec<usize> = if args.target.is_empty() { (1..=order.hypotheses()).collect() } else { args.target.clone() };
    let variant_kinds: Vec<SpendingKind> =
        if args.spending.is_empty() { vec![SpendingArg::Po.into()] } else { kinds.clone() };
    for kind in variant_kinds {
        let setup = TableSetup { schedule: schedule.clone(), spending: kind, t1: args.t1, alpha_futility: args.alpha_futility };
        for &target in &targets {
            let rows = variant_table(&setup, &order, target, &VARIANTS)?;
            writeln!(out).map_err(w)?;
            writeln!(out, "# boundaries of H{target}: {} spending, ordering {order}", kind.label()).map_err(w)?;
            let mut header = String::new();
            if let Some(first) = rows.first() {
                for (j, _) in &first.others {
                    header.push_str(&format!("{:<15}", format!("H{j}")));
                }
            }
            for p in VARIANTS {
                header.push_str(&format!(" {:>21}", p.label()));
            }
            writeln!(out, "{}", header.trim_end()).map_err(w)?;
            for row in rows {
                let mut line = String::new();
                for (_, o) in &row.others {
                    line.push_str(&format!("{:<15}", o.to_string()));
                }
                for b in &row.boundaries {
                    line.push_str(&format!(" {:>10.6} {:>10.6}", b.interim, b.final_));
                }
                writeln!(out, "{line}").map_err(w)?;
            }
        }
    }
    Ok(())
}
