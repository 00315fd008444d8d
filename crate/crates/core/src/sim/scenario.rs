use std::fmt;
use std::str::FromStr;

use crate::beta::{BetaMode, BetaSchedule};
use crate::boundaries::SpendingKind;
use crate::engine::{EngineConfig, ProcedureKind};
use crate::error::{Error, Result};

/// Which control patients enter each comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlMode {
    /// Only controls recruited while the arm is running.
    Concurrent,
    /// All controls recruited since the platform opened.
    AllControls,
}

impl ControlMode {
    pub fn label(self) -> &'static str {
        match self {
            ControlMode::Concurrent => "CC",
            ControlMode::AllControls => "NCC+CC",
        }
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ControlMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cc" => Ok(ControlMode::Concurrent),
            "ncc+cc" | "ncc_cc" | "ncc" | "all" => Ok(ControlMode::AllControls),
            other => Err(Error::domain(format!("unknown control mode `{other}` (expected cc or ncc+cc)"))),
        }
    }
}

/// Placement of the true alternatives among the arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlternativeOrder {
    /// Each arm is null independently with probability π₀.
    Random,
    AlternativesFirst,
    AlternativesLast,
}

impl AlternativeOrder {
    pub fn label(self) -> &'static str {
        match self {
            AlternativeOrder::Random => "random",
            AlternativeOrder::AlternativesFirst => "alternatives_first",
            AlternativeOrder::AlternativesLast => "alternatives_last",
        }
    }
}

impl fmt::Display for AlternativeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AlternativeOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "random" => Ok(AlternativeOrder::Random),
            "alternatives_first" | "first" => Ok(AlternativeOrder::AlternativesFirst),
            "alternatives_last" | "last" => Ok(AlternativeOrder::AlternativesLast),
            other => Err(Error::domain(format!("unknown order `{other}`"))),
        }
    }
}

/// How the β-sequence is generated; combined with the optional bound `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BetaKind {
    Descending,
    Equal,
    /// Descending sequence divided by harmonic numbers.
    Dependent,
}

impl BetaKind {
    pub fn label(self) -> &'static str {
        match self {
            BetaKind::Descending => "descending",
            BetaKind::Equal => "equal",
            BetaKind::Dependent => "dependent",
        }
    }
}

impl FromStr for BetaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "descending" | "unbounded" | "bounded" => Ok(BetaKind::Descending),
            "equal" => Ok(BetaKind::Equal),
            "dependent" => Ok(BetaKind::Dependent),
            other => Err(Error::domain(format!("unknown beta mode `{other}`"))),
        }
    }
}

/// Effect and null-probability rules for arms added under a fixed budget.
#[derive(Debug, Clone, PartialEq)]
pub enum BudgetScenario {
    /// π₀ and Δ stay constant.
    Constant,
    /// Alternatives draw Δ uniformly from the set.
    DistributedEffects(Vec<f64>),
    /// π₀ drops by the given amount for each added arm.
    DecreasingNull(f64),
    /// Added alternatives get the given Δ.
    LargerAddedEffect(f64),
}

impl BudgetScenario {
    pub fn label(&self) -> &'static str {
        match self {
            BudgetScenario::Constant => "s1",
            BudgetScenario::DistributedEffects(_) => "s2",
            BudgetScenario::DecreasingNull(_) => "s3",
            BudgetScenario::LargerAddedEffect(_) => "s4",
        }
    }
}

impl FromStr for BudgetScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s1" => Ok(BudgetScenario::Constant),
            "s2" => Ok(BudgetScenario::DistributedEffects(vec![0.4, 0.8, 1.2])),
            "s3" => Ok(BudgetScenario::DecreasingNull(1.0 / 80.0)),
            "s4" => Ok(BudgetScenario::LargerAddedEffect(1.0)),
            other => Err(Error::domain(format!("unknown budget scenario `{other}` (expected s1..s4)"))),
        }
    }
}

/// Fixed observation budget `B = Σ n_i + C` for the initially planned arms.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetConfig {
    pub initial_arms: usize,
    pub total: usize,
    pub planned_controls: usize,
    pub scenario: BudgetScenario,
}

/// One grid point of the simulation study.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialScenario {
    pub id: String,
    /// Planned number of arms `K` (initial arms `K0` in budget mode).
    pub arms: usize,
    pub beta: BetaKind,
    /// Upper bound `N` on the number of hypotheses; `None` is unbounded.
    pub n_bound: Option<usize>,
    pub pi0: f64,
    pub delta: f64,
    pub order: AlternativeOrder,
    pub n: usize,
    pub n1: usize,
    pub n_delta: usize,
    pub control_mode: ControlMode,
    pub procedure: ProcedureKind,
    pub spending: SpendingKind,
    pub alpha: f64,
    pub alpha_futility: f64,
    pub budget: Option<BudgetScenario>,
    pub replications: usize,
    pub master_seed: u64,
}

impl Default for TrialScenario {
    fn default() -> Self {
        TrialScenario {
            id: "scenario".into(),
            arms: 10,
            beta: BetaKind::Descending,
            n_bound: None,
            pi0: 0.5,
            delta: 0.6,
            order: AlternativeOrder::Random,
            n: 50,
            n1: 25,
            n_delta: 20,
            control_mode: ControlMode::Concurrent,
            procedure: ProcedureKind::GsLond,
            spending: SpendingKind::ObrienFleming,
            alpha: 0.025,
            alpha_futility: 0.5,
            budget: None,
            replications: 5000,
            master_seed: 20_240_601,
        }
    }
}

impl TrialScenario {
    pub fn validate(&self) -> Result<()> {
        if self.arms == 0 {
            return Err(Error::config("K", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.pi0) {
            return Err(Error::config("pi0", format!("must lie in [0, 1], got {}", self.pi0)));
        }
        if !self.delta.is_finite() {
            return Err(Error::config("delta", "must be finite"));
        }
        if self.n1 < 2 || self.n1 >= self.n {
            return Err(Error::config("n1", format!("need 2 <= n1 < n (n1 = {}, n = {})", self.n1, self.n)));
        }
        if self.n_delta == 0 {
            return Err(Error::config("n_delta", "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", "must be at least 1"));
        }
        if let Some(bound) = self.n_bound {
            if bound == 0 {
                return Err(Error::config("N", "must be positive"));
            }
            if bound < self.arms {
                return Err(Error::config("N", format!("bound {bound} is smaller than K = {}", self.arms)));
            }
        } else if self.beta == BetaKind::Equal {
            return Err(Error::config("N", "equal beta needs a finite bound"));
        }
        self.engine_config()?;
        Ok(())
    }

    /// Interim information fraction `n1 / n` (treatment arm only).
    pub fn t1(&self) -> f64 {
        self.n1 as f64 / self.n as f64
    }

    pub fn beta_mode(&self) -> BetaMode {
        let descending = match self.n_bound {
            Some(n) => BetaMode::BoundedDescending(n),
            None => BetaMode::UnboundedDescending,
        };
        match (self.beta, self.n_bound) {
            (BetaKind::Descending, _) => descending,
            (BetaKind::Equal, Some(n)) => BetaMode::Equal(n),
            (BetaKind::Equal, None) => BetaMode::Equal(self.arms),
            (BetaKind::Dependent, _) => BetaMode::DependentAdjusted(Box::new(descending)),
        }
    }

    pub fn engine_config(&self) -> Result<EngineConfig> {
        let schedule = BetaSchedule::new(self.beta_mode(), self.alpha)?;
        let procedure = match self.procedure {
            ProcedureKind::Bonferroni(0) => ProcedureKind::Bonferroni(self.arms),
            other => other,
        };
        EngineConfig::new(procedure, self.spending, schedule, self.alpha_futility, self.t1())
    }

    /// Number of true alternatives under the deterministic orders.
    pub fn planned_alternatives(&self) -> usize {
        let nulls = (self.pi0 * self.arms as f64).round() as usize;
        self.arms - nulls.min(self.arms)
    }

    pub fn budget_config(&self) -> Option<BudgetConfig> {
        self.budget.as_ref().map(|scenario| {
            let planned_controls = (self.arms - 1) * self.n_delta + self.n;
            BudgetConfig {
                initial_arms: self.arms,
                total: self.arms * self.n + planned_controls,
                planned_controls,
                scenario: scenario.clone(),
            }
        })
    }

    /// Canonical description of everything that shapes the simulated data.
    /// Scenarios that differ only in the analysis (procedure, spending,
    /// control mode, levels, β) share it and so see identical data.
    pub fn data_key(&self) -> String {
        format!(
            "K={};pi0={:?};delta={:?};order={};n={};n1={};n_delta={};budget={:?}",
            self.arms, self.pi0, self.delta, self.order, self.n, self.n1, self.n_delta, self.budget
        )
    }

    pub fn delta_label(&self) -> String {
        match &self.budget {
            Some(BudgetScenario::DistributedEffects(set)) => {
                set.iter().map(|d| format!("{d}")).collect::<Vec<_>>().join(";")
            }
            _ => format!("{}", self.delta),
        }
    }

    /// One-line `key=value` rendering used in manifests.
    pub fn describe(&self) -> String {
        format!(
            "procedure={} spending={} control_mode={} order={} pi0={} delta={} K={} N={} beta_mode={} n={} n1={} n_delta={} alpha={} alpha_futility={} budget={} replications={}",
            self.engine_config().map(|c| c.procedure.label()).unwrap_or_else(|_| self.procedure.label()),
            self.spending,
            self.control_mode,
            self.order,
            self.pi0,
            self.delta_label(),
            self.arms,
            self.n_bound.map_or("inf".to_string(), |n| n.to_string()),
            self.beta.label(),
            self.n,
            self.n1,
            self.n_delta,
            self.alpha,
            self.alpha_futility,
            self.budget.as_ref().map_or("none", |b| b.label()),
            self.replications,
        )
    }
}
