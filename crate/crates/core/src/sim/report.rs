use std::io::{self, Write};

use super::run::ScenarioResult;

pub const CSV_HEADER: &str = "scenario_id,procedure,spending,control_mode,order,pi0,delta,K,N,power,power_se,fdr,fdr_se,saved_pct,saved_pct_se,mean_rejected_alternatives,replications,saved_pct_stage2basis,mean_rejected_alternatives_se,power_replications,beta_mode,budget_scenario";

fn fixed(x: f64) -> String {
    if x.is_nan() {
        "NA".to_string()
    } else {
        format!("{x:.6}")
    }
}

pub fn csv_row(r: &ScenarioResult) -> String {
    let s = &r.scenario;
    let m = &r.summary;
    let procedure = s.engine_config().map(|c| c.procedure.label()).unwrap_or_else(|_| s.procedure.label());
    [
        s.id.clone(),
        procedure,
        s.spending.label().to_string(),
        s.control_mode.label().to_string(),
        s.order.label().to_string(),
        format!("{}", s.pi0),
        s.delta_label(),
        s.arms.to_string(),
        s.n_bound.map_or("inf".to_string(), |n| n.to_string()),
        fixed(m.power),
        fixed(m.power_se),
        fixed(m.fdr),
        fixed(m.fdr_se),
        fixed(m.saved_pct),
        fixed(m.saved_pct_se),
        fixed(m.mean_rejected_alternatives),
        m.replications.to_string(),
        fixed(m.saved_pct_stage2),
        fixed(m.mean_rejected_alternatives_se),
        m.power_replications.to_string(),
        s.beta.label().to_string(),
        s.budget.as_ref().map_or("none", |b| b.label()).to_string(),
    ]
    .join(",")
}

pub fn write_csv<W: Write>(mut w: W, results: &[ScenarioResult]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in results {
        writeln!(w, "{}", csv_row(r))?;
    }
    Ok(())
}
