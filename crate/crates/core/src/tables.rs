//! Boundary tables for worked examples: nominal levels by number of prior
//! rejections, and final boundaries of every procedure variant for a given
//! ordering of interim and final analyses.

use std::fmt;
use std::str::FromStr;

use crate::beta::{BetaMode, BetaSchedule};
use crate::boundaries::{solve_two_stage, BoundaryPair, SpendingKind};
use crate::engine::{EngineConfig, LondEngine, ProcedureKind, Stage};
use crate::error::{Error, Result};
use crate::numerics::Probability;

/// Boundaries for one hypothesis at one count of prior rejections.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    /// `None` when β is equal across hypotheses and the row applies to all.
    pub hypothesis: Option<usize>,
    pub prior_rejections: usize,
    pub lond_level: f64,
    pub pairs: Vec<BoundaryPair>,
}

/// Nominal LOND levels and two-stage boundaries for `k` hypotheses.
pub fn level_table(schedule: &BetaSchedule, k: usize, kinds: &[SpendingKind], t1: f64) -> Result<Vec<LevelRow>> {
    if k == 0 {
        return Err(Error::domain("table needs at least one hypothesis"));
    }
    let row = |hypothesis: Option<usize>, beta: f64, prior: usize| -> Result<LevelRow> {
        let level = beta * (prior as f64 + 1.0);
        let pairs = kinds.iter().map(|&kind| solve_two_stage(kind, level, t1)).collect::<Result<_>>()?;
        Ok(LevelRow { hypothesis, prior_rejections: prior, lond_level: level, pairs })
    };
    if matches!(schedule.mode(), BetaMode::Equal(_)) {
        let beta = schedule.beta(1)?;
        return (0..k).map(|r| row(None, beta, r)).collect();
    }
    let mut rows = Vec::new();
    for i in 1..=k {
        let beta = schedule.beta(i)?;
        for r in 0..i {
            rows.push(row(Some(i), beta, r)?);
        }
    }
    Ok(rows)
}

/// Ordering of analyses, e.g. `1I,2I,1F,3I,2F,3F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisOrder(pub Vec<(usize, Stage)>);

impl AnalysisOrder {
    /// Three arms started one after another with the interim of each arm
    /// falling between the interim and final of its predecessor.
    pub fn toy() -> Self {
        "1I,2I,1F,3I,2F,3F".parse().expect("valid literal")
    }

    /// The same pattern for `k` arms: `1I,2I,1F,3I,2F,...,kI,(k-1)F,kF`.
    pub fn staggered(k: usize) -> Self {
        let mut events = Vec::with_capacity(2 * k);
        for i in 1..=k {
            events.push((i, Stage::Interim));
            if i > 1 {
                events.push((i - 1, Stage::Final));
            }
        }
        if k > 0 {
            events.push((k, Stage::Final));
        }
        AnalysisOrder(events)
    }

    pub fn hypotheses(&self) -> usize {
        self.0.iter().map(|(i, _)| *i).max().unwrap_or(0)
    }
}

impl FromStr for AnalysisOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut events = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (num, stage) = token.split_at(token.len() - 1);
            let stage = match stage {
                "I" | "i" => Stage::Interim,
                "F" | "f" => Stage::Final,
                _ => return Err(Error::domain(format!("analysis `{token}` must end in I or F"))),
            };
            let index: usize = num
                .parse()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::domain(format!("bad hypothesis number in `{token}`")))?;
            events.push((index, stage));
        }
        let k = events.iter().map(|(i, _)| *i).max().unwrap_or(0);
        for i in 1..=k {
            let interim = events.iter().position(|&e| e == (i, Stage::Interim));
            let fin = events.iter().position(|&e| e == (i, Stage::Final));
            match (interim, fin) {
                (Some(a), Some(b)) if a < b => {}
                _ => return Err(Error::domain(format!("hypothesis {i} needs exactly one interim before its final"))),
            }
        }
        if events.len() != 2 * k {
            return Err(Error::domain("each hypothesis must appear exactly twice"));
        }
        Ok(AnalysisOrder(events))
    }
}

impl fmt::Display for AnalysisOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(i, s)| format!("{i}{}", if *s == Stage::Interim { "I" } else { "F" }))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Scripted outcome of a hypothesis other than the one tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScriptedOutcome {
    Retain,
    RejectInterim,
    RejectFinal,
}

impl fmt::Display for ScriptedOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScriptedOutcome::Retain => "retain",
            ScriptedOutcome::RejectInterim => "reject interim",
            ScriptedOutcome::RejectFinal => "reject final",
        })
    }
}

/// Boundaries a procedure applies to the target hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantBoundaries {
    pub procedure: ProcedureKind,
    pub interim: f64,
    pub final_: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantRow {
    /// Scripted outcomes of the other hypotheses, by index.
    pub others: Vec<(usize, ScriptedOutcome)>,
    pub boundaries: Vec<VariantBoundaries>,
}

impl VariantRow {
    pub fn get(&self, procedure: ProcedureKind) -> Option<&VariantBoundaries> {
        self.boundaries.iter().find(|b| b.procedure == procedure)
    }
}

/// Shared settings for [`variant_table`].
#[derive(Debug, Clone)]
pub struct TableSetup {
    pub schedule: BetaSchedule,
    pub spending: SpendingKind,
    pub t1: f64,
    pub alpha_futility: f64,
}

/// For every combination of outcomes of the other hypotheses, the interim and
/// final boundaries each procedure applies to `target` under `order`.
pub fn variant_table(
    setup: &TableSetup,
    order: &AnalysisOrder,
    target: usize,
    procedures: &[ProcedureKind],
) -> Result<Vec<VariantRow>> {
    let k = order.hypotheses();
    if target == 0 || target > k {
        return Err(Error::domain(format!("target {target} is not in the ordering")));
    }
    let others: Vec<usize> = (1..=k).filter(|&i| i != target).collect();
    let choices = [ScriptedOutcome::Retain, ScriptedOutcome::RejectInterim, ScriptedOutcome::RejectFinal];
    let combos = 3usize.pow(others.len() as u32);
    let mut rows = Vec::with_capacity(combos);
    for code in 0..combos {
        // First listed hypothesis is the most significant digit, so rows
        // group by it.
        let mut script = vec![(0, ScriptedOutcome::Retain); others.len()];
        let mut rest = code;
        for slot in (0..others.len()).rev() {
            script[slot] = (others[slot], choices[rest % 3]);
            rest /= 3;
        }
        let mut boundaries = Vec::with_capacity(procedures.len());
        for &procedure in procedures {
            boundaries.push(run_script(setup, order, target, procedure, &script)?);
        }
        rows.push(VariantRow { others: script, boundaries });
    }
    Ok(rows)
}

fn run_script(
    setup: &TableSetup,
    order: &AnalysisOrder,
    target: usize,
    procedure: ProcedureKind,
    script: &[(usize, ScriptedOutcome)],
) -> Result<VariantBoundaries> {
    let config = EngineConfig::new(procedure, setup.spending, setup.schedule.clone(), setup.alpha_futility, setup.t1)?;
    let mut engine = LondEngine::new(config)?;
    for _ in 0..order.hypotheses() {
        engine.register_scheduled()?;
    }
    let cont = Probability::new(setup.alpha_futility)?;
    let zero = Probability::new(0.0)?;
    let one = Probability::new(1.0)?;
    for (pos, &(i, stage)) in order.0.iter().enumerate() {
        let time = pos as u64 + 1;
        let outcome = script.iter().find(|(j, _)| *j == i).map(|(_, o)| *o);
        match stage {
            Stage::Interim => {
                let p = if outcome == Some(ScriptedOutcome::RejectInterim) { zero } else { cont };
                let got = engine.submit_interim(i, p, time)?;
                if outcome != Some(ScriptedOutcome::RejectInterim) && got.stops_early() {
                    return Err(Error::Numerical(format!(
                        "hypothesis {i} cannot continue: interim boundary reaches the futility threshold"
                    )));
                }
            }
            Stage::Final => {
                if outcome == Some(ScriptedOutcome::RejectInterim) {
                    continue;
                }
                let p = if outcome == Some(ScriptedOutcome::RejectFinal) { zero } else { one };
                engine.submit_final(i, p, time)?;
            }
        }
    }
    let record = engine.record(target).expect("target registered");
    Ok(VariantBoundaries {
        procedure,
        interim: record.interim_boundary.expect("target analysed at interim"),
        final_: record.final_boundary.expect("target analysed at final"),
    })
}
