//! The online decision state machine.
//!
//! Hypotheses are registered in a fixed order and receive their nominal level
//! from the LOND rule `α_i = β_i·(1 + #rejections)`, where the rejections that
//! count depend on the procedure:
//!
//! * `FixedLOND`: one analysis per hypothesis, rejections of `j < i`.
//! * `gsLOND`: interim and final analyses; rejections of `j < i` that happened
//!   strictly before the analysis time. The final boundary re-evaluates the
//!   spending function at the (possibly raised) level.
//! * `gsLOND.II`: as gsLOND, but when the level was raised after the interim
//!   look the final boundary spends the whole increment over what the
//!   interim boundary actually used.
//! * `gsLOND.III`: rejections of any other hypothesis count, including later
//!   indexed ones. This variant carries no formal online FDR guarantee.
//! * `gsLOND.II.III`: all-index counting; increment exhaustion is triggered by
//!   an in-between rejection of a lower-indexed hypothesis.
//!
//! A rejection recorded at the same timestamp as an analysis does not count
//! for that analysis.

mod stream;

pub use stream::{format_response, parse_submission, Submission};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::beta::BetaSchedule;
use crate::boundaries::{spend, BoundaryCache, SpendingKind};
use crate::error::{Error, Result};
use crate::numerics::Probability;

/// Control-patient index used as the trial clock.
pub type Timestamp = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcedureKind {
    FixedLond,
    GsLond,
    GsLondII,
    GsLondIII,
    GsLondIIandIII,
    LevelAlpha,
    /// Group-sequential Bonferroni with the (known) total number of hypotheses.
    Bonferroni(usize),
}

/// Which hypotheses' rejections enter a level computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Only `j < i`.
    BeforeIndex,
    /// Every `j != i`.
    All,
}

impl ProcedureKind {
    pub fn is_group_sequential(self) -> bool {
        !matches!(self, ProcedureKind::FixedLond)
    }

    pub fn is_lond(self) -> bool {
        !matches!(self, ProcedureKind::LevelAlpha | ProcedureKind::Bonferroni(_))
    }

    pub fn scope(self) -> Scope {
        match self {
            ProcedureKind::GsLondIII | ProcedureKind::GsLondIIandIII => Scope::All,
            _ => Scope::BeforeIndex,
        }
    }

    fn exhausts_increment(self) -> bool {
        matches!(self, ProcedureKind::GsLondII | ProcedureKind::GsLondIIandIII)
    }

    pub fn label(self) -> String {
        match self {
            ProcedureKind::FixedLond => "LOND".into(),
            ProcedureKind::GsLond => "gsLOND".into(),
            ProcedureKind::GsLondII => "gsLOND.II".into(),
            ProcedureKind::GsLondIII => "gsLOND.III".into(),
            ProcedureKind::GsLondIIandIII => "gsLOND.II.III".into(),
            ProcedureKind::LevelAlpha => "level-alpha".into(),
            ProcedureKind::Bonferroni(k) => format!("Bonferroni({k})"),
        }
    }
}

impl fmt::Display for ProcedureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ProcedureKind {
    type Err = Error;

    /// Accepts the labels produced by [`ProcedureKind::label`] (case-insensitive)
    /// plus a few spellings without dots. `bonferroni` without a count parses as
    /// `Bonferroni(0)`, a placeholder the caller fills with the arm count.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let kind = match t.as_str() {
            "lond" | "fixedlond" | "fixed_lond" | "fixed-lond" => ProcedureKind::FixedLond,
            "gslond" | "gslond.i" => ProcedureKind::GsLond,
            "gslond.ii" | "gslond2" | "gslond_ii" => ProcedureKind::GsLondII,
            "gslond.iii" | "gslond3" | "gslond_iii" => ProcedureKind::GsLondIII,
            "gslond.ii.iii" | "gslond23" | "gslond_ii_iii" => ProcedureKind::GsLondIIandIII,
            "level-alpha" | "level_alpha" | "levelalpha" => ProcedureKind::LevelAlpha,
            "bonferroni" => ProcedureKind::Bonferroni(0),
            other => {
                let count = other
                    .strip_prefix("bonferroni(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|k| k.trim().parse::<usize>().ok());
                match count {
                    Some(k) => ProcedureKind::Bonferroni(k),
                    None => return Err(Error::domain(format!("unknown procedure `{s}`"))),
                }
            }
        };
        Ok(kind)
    }
}

/// Procedure parameters shared by every hypothesis of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub alpha: f64,
    pub alpha_futility: f64,
    pub spending: SpendingKind,
    pub t1: f64,
    pub schedule: BetaSchedule,
    pub procedure: ProcedureKind,
}

impl EngineConfig {
    pub fn new(
        procedure: ProcedureKind,
        spending: SpendingKind,
        schedule: BetaSchedule,
        alpha_futility: f64,
        t1: f64,
    ) -> Result<Self> {
        let cfg = EngineConfig { alpha: schedule.alpha(), alpha_futility, spending, t1, schedule, procedure };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.t1 > 0.0 && self.t1 < 1.0) {
            return Err(Error::config("t1", format!("must lie in (0, 1), got {}", self.t1)));
        }
        if !(self.alpha_futility > 0.0 && self.alpha_futility <= 1.0) {
            return Err(Error::config("alpha_futility", format!("must lie in (0, 1], got {}", self.alpha_futility)));
        }
        let interim = spend(self.spending, self.alpha, self.t1)?;
        if self.alpha_futility <= interim {
            return Err(Error::config(
                "alpha_futility",
                format!("{} does not exceed the interim efficacy level {interim}", self.alpha_futility),
            ));
        }
        if let ProcedureKind::Bonferroni(0) = self.procedure {
            return Err(Error::config("procedure", "Bonferroni needs the number of hypotheses"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HypothesisState {
    PendingInterim,
    PendingFinal,
    RejectedInterim,
    RejectedFinal,
    RetainedFinal,
    StoppedFutility,
}

impl HypothesisState {
    pub fn is_rejected(self) -> bool {
        matches!(self, HypothesisState::RejectedInterim | HypothesisState::RejectedFinal)
    }

    pub fn is_terminal(self) -> bool {
        !matches!(self, HypothesisState::PendingInterim | HypothesisState::PendingFinal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisRecord {
    pub index: usize,
    pub beta: f64,
    pub state: HypothesisState,
    pub interim_level: Option<f64>,
    pub interim_boundary: Option<f64>,
    pub final_level: Option<f64>,
    pub final_boundary: Option<f64>,
    pub interim_time: Option<Timestamp>,
    pub final_time: Option<Timestamp>,
    // Rejections among j < i counted at the interim look.
    lower_rejections_at_interim: usize,
}

impl HypothesisRecord {
    /// Time of the rejecting analysis, if the hypothesis was rejected.
    pub fn rejection_time(&self) -> Option<Timestamp> {
        match self.state {
            HypothesisState::RejectedInterim => self.interim_time,
            HypothesisState::RejectedFinal => self.final_time,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Interim,
    Final,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Interim => "interim",
            Stage::Final => "final",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    RejectedInterim,
    StoppedFutility,
    Continue,
    RejectedFinal,
    RetainedFinal,
}

impl Outcome {
    pub fn is_rejection(self) -> bool {
        matches!(self, Outcome::RejectedInterim | Outcome::RejectedFinal)
    }

    /// Whether the hypothesis stops at its interim look.
    pub fn stops_early(self) -> bool {
        matches!(self, Outcome::RejectedInterim | Outcome::StoppedFutility)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One analysis in the audit trail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionEvent {
    pub index: usize,
    pub stage: Stage,
    pub time: Timestamp,
    pub p_value: f64,
    pub nominal_level: f64,
    pub boundary: f64,
    pub outcome: Outcome,
}

/// Single-writer decision engine for one trial.
#[derive(Debug, Clone)]
pub struct LondEngine {
    config: EngineConfig,
    cache: Arc<BoundaryCache>,
    records: Vec<HypothesisRecord>,
    log: Vec<DecisionEvent>,
    last_time: Option<Timestamp>,
}

impl LondEngine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        Self::with_cache(config, Arc::new(BoundaryCache::new()))
    }

    /// Shares a boundary memo with other engines (e.g. across replications).
    pub fn with_cache(config: EngineConfig, cache: Arc<BoundaryCache>) -> Result<Self> {
        config.validate()?;
        Ok(LondEngine { config, cache, records: Vec::new(), log: Vec::new(), last_time: None })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn records(&self) -> &[HypothesisRecord] {
        &self.records
    }

    pub fn record(&self, index: usize) -> Option<&HypothesisRecord> {
        index.checked_sub(1).and_then(|k| self.records.get(k))
    }

    pub fn log(&self) -> &[DecisionEvent] {
        &self.log
    }

    /// Appends a hypothesis with budget `beta`; returns its 1-based index.
    pub fn register(&mut self, beta: f64) -> Result<usize> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::domain(format!("beta must be a nonnegative finite number, got {beta}")));
        }
        let index = self.records.len() + 1;
        self.records.push(HypothesisRecord {
            index,
            beta,
            state: HypothesisState::PendingInterim,
            interim_level: None,
            interim_boundary: None,
            final_level: None,
            final_boundary: None,
            interim_time: None,
            final_time: None,
            lower_rejections_at_interim: 0,
        });
        Ok(index)
    }

    /// Registers the next hypothesis with β taken from the configured schedule.
    pub fn register_scheduled(&mut self) -> Result<usize> {
        let beta = self.config.schedule.beta(self.records.len() + 1)?;
        self.register(beta)
    }

    /// Rejections recorded strictly before `as_of` among the hypotheses in
    /// `scope` relative to hypothesis `i`.
    pub fn rejection_count(&self, as_of: Timestamp, scope: Scope, i: usize) -> usize {
        self.records
            .iter()
            .filter(|r| r.index != i)
            .filter(|r| scope == Scope::All || r.index < i)
            .filter(|r| r.rejection_time().is_some_and(|t| t < as_of))
            .count()
    }

    fn lond_level(&self, record: &HypothesisRecord, count: usize) -> f64 {
        match self.config.procedure {
            ProcedureKind::LevelAlpha => self.config.alpha,
            ProcedureKind::Bonferroni(k) => self.config.alpha / k as f64,
            _ => record.beta * (count as f64 + 1.0),
        }
    }

    fn lookup(&self, i: usize) -> Result<&HypothesisRecord> {
        self.record(i).ok_or_else(|| Error::state(i, "hypothesis is not registered"))
    }

    /// Nominal level for the interim analysis of `i` at time `at`.
    pub fn level_for_interim(&self, i: usize, at: Timestamp) -> Result<f64> {
        let record = self.lookup(i)?;
        if !self.config.procedure.is_group_sequential() {
            return Err(Error::state(i, "fixed-sample LOND has no interim analysis"));
        }
        if record.state != HypothesisState::PendingInterim {
            return Err(Error::state(i, format!("interim requested in state {:?}", record.state)));
        }
        let count = self.rejection_count(at, self.config.procedure.scope(), i);
        Ok(self.lond_level(record, count))
    }

    /// Nominal level for the final analysis of `i` at time `at`.
    pub fn level_for_final(&self, i: usize, at: Timestamp) -> Result<f64> {
        let record = self.lookup(i)?;
        let expected = if self.config.procedure.is_group_sequential() {
            HypothesisState::PendingFinal
        } else {
            HypothesisState::PendingInterim
        };
        if record.state != expected {
            return Err(Error::state(i, format!("final analysis requested in state {:?}", record.state)));
        }
        let count = if self.config.procedure.is_group_sequential() {
            self.rejection_count(at, self.config.procedure.scope(), i)
        } else {
            self.records[..i - 1].iter().filter(|r| r.state.is_rejected()).count()
        };
        Ok(self.lond_level(record, count))
    }

    fn advance_clock(&mut self, at: Timestamp) -> Result<()> {
        if let Some(last) = self.last_time {
            if at < last {
                return Err(Error::OutOfOrder { got: at, last });
            }
        }
        self.last_time = Some(at);
        Ok(())
    }

    /// Interim analysis of `i` with stage-1 p-value `p1` observed at `at`.
    pub fn submit_interim(&mut self, i: usize, p1: Probability, at: Timestamp) -> Result<Outcome> {
        let level = self.level_for_interim(i, at)?;
        self.check_clock(at)?;
        let pair = self.cache.solve_two_stage(self.config.spending, level, self.config.t1)?;
        let boundary = pair.alpha1;
        let p = p1.value();
        let outcome = if p <= boundary {
            Outcome::RejectedInterim
        } else if p > self.config.alpha_futility {
            Outcome::StoppedFutility
        } else {
            Outcome::Continue
        };
        let lower = self.rejection_count(at, Scope::BeforeIndex, i);
        self.advance_clock(at)?;
        let record = &mut self.records[i - 1];
        record.interim_level = Some(level);
        record.interim_boundary = Some(boundary);
        record.interim_time = Some(at);
        record.lower_rejections_at_interim = lower;
        record.state = match outcome {
            Outcome::RejectedInterim => HypothesisState::RejectedInterim,
            Outcome::StoppedFutility => HypothesisState::StoppedFutility,
            _ => HypothesisState::PendingFinal,
        };
        self.log.push(DecisionEvent {
            index: i,
            stage: Stage::Interim,
            time: at,
            p_value: p,
            nominal_level: level,
            boundary,
            outcome,
        });
        Ok(outcome)
    }

    /// Final analysis of `i` with cumulative p-value `p` observed at `at`.
    ///
    /// For fixed-sample LOND this is the only analysis and requires every
    /// lower-indexed hypothesis to be decided already.
    pub fn submit_final(&mut self, i: usize, p: Probability, at: Timestamp) -> Result<Outcome> {
        let level = self.level_for_final(i, at)?;
        self.check_clock(at)?;
        let boundary = if self.config.procedure.is_group_sequential() {
            self.final_boundary(i, level, at)?
        } else {
            if let Some(open) = self.records[..i - 1].iter().find(|r| !r.state.is_terminal()) {
                return Err(Error::state(
                    i,
                    format!("fixed-sample LOND must decide hypothesis {} first", open.index),
                ));
            }
            level
        };
        let outcome = if p.value() <= boundary { Outcome::RejectedFinal } else { Outcome::RetainedFinal };
        self.advance_clock(at)?;
        let record = &mut self.records[i - 1];
        record.final_level = Some(level);
        record.final_boundary = Some(boundary);
        record.final_time = Some(at);
        record.state = match outcome {
            Outcome::RejectedFinal => HypothesisState::RejectedFinal,
            _ => HypothesisState::RetainedFinal,
        };
        self.log.push(DecisionEvent {
            index: i,
            stage: Stage::Final,
            time: at,
            p_value: p.value(),
            nominal_level: level,
            boundary,
            outcome,
        });
        Ok(outcome)
    }

    fn check_clock(&self, at: Timestamp) -> Result<()> {
        match self.last_time {
            Some(last) if at < last => Err(Error::OutOfOrder { got: at, last }),
            _ => Ok(()),
        }
    }

    fn final_boundary(&self, i: usize, level: f64, at: Timestamp) -> Result<f64> {
        let record = &self.records[i - 1];
        let used = record.interim_boundary.expect("pending final implies an interim boundary");
        let raised_from_below =
            self.rejection_count(at, Scope::BeforeIndex, i) > record.lower_rejections_at_interim;
        if self.config.procedure.exhausts_increment() && raised_from_below {
            self.cache.exhaust_increment(used, level, self.config.t1)
        } else {
            Ok(self.cache.solve_two_stage(self.config.spending, level, self.config.t1)?.alpha2)
        }
    }

    /// Applies one streamed submission; returns the response fields.
    pub fn apply(&mut self, submission: Submission) -> Result<Response> {
        match submission {
            Submission::Register { beta } => {
                let index = self.register(beta)?;
                Ok(Response::Registered { index, beta })
            }
            Submission::Interim { index, p, time } => {
                self.submit_interim(index, p, time)?;
                Ok(Response::Decision(*self.log.last().expect("decision logged")))
            }
            Submission::Final { index, p, time } => {
                self.submit_final(index, p, time)?;
                Ok(Response::Decision(*self.log.last().expect("decision logged")))
            }
        }
    }

    /// Rebuilds an engine by applying `submissions` in order.
    pub fn replay(config: EngineConfig, submissions: &[Submission]) -> Result<Self> {
        let mut engine = LondEngine::new(config)?;
        for s in submissions {
            engine.apply(*s)?;
        }
        Ok(engine)
    }
}

/// Result of [`LondEngine::apply`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Response {
    Registered { index: usize, beta: f64 },
    Decision(DecisionEvent),
}

/// False and total rejections with the realised false discovery proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrSnapshot {
    pub false_rejections: usize,
    pub rejections: usize,
    pub fdp: f64,
}

/// Counts rejections in `log`; `is_null[k]` tells whether hypothesis `k + 1` is a true null.
pub fn fdr_snapshot(log: &[DecisionEvent], is_null: &[bool]) -> FdrSnapshot {
    let mut rejections = 0;
    let mut false_rejections = 0;
    for event in log.iter().filter(|e| e.outcome.is_rejection()) {
        rejections += 1;
        if is_null.get(event.index - 1).copied().unwrap_or(false) {
            false_rejections += 1;
        }
    }
    FdrSnapshot { false_rejections, rejections, fdp: false_rejections as f64 / rejections.max(1) as f64 }
}
