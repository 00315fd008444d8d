use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gslond::{BetaMode, BetaSchedule, EngineConfig, ProcedureKind, SpendingKind};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "gslond", version, about = "Online FDR control for group-sequential platform trials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nominal levels and two-stage boundaries, plus variant tables for an analysis ordering.
    Boundaries(BoundariesArgs),
    /// The β-sequence with cumulative sums.
    Betas(BetasArgs),
    /// Streams REGISTER/INTERIM/FINAL events through a decision engine.
    Decide(DecideArgs),
    /// Runs a simulation grid and writes CSV plus a manifest.
    Simulate(SimulateArgs),
    /// Prints a bundled grid configuration (or a config file) and its expanded scenarios.
    ShowConfig(ShowConfigArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpendingArg {
    Obf,
    Po,
}

impl From<SpendingArg> for SpendingKind {
    fn from(s: SpendingArg) -> Self {
        match s {
            SpendingArg::Obf => SpendingKind::ObrienFleming,
            SpendingArg::Po => SpendingKind::Pocock,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BetaModeArg {
    Unbounded,
    Bounded,
    Equal,
    Dependent,
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    /// Overall significance level.
    #[arg(long, default_value_t = 0.025)]
    pub alpha: f64,

    #[arg(long, value_enum, default_value = "unbounded")]
    pub beta_mode: BetaModeArg,

    /// Bound N on the number of hypotheses (bounded, equal, and optionally dependent).
    #[arg(long)]
    pub n_bound: Option<usize>,
}

impl ScheduleArgs {
    pub fn schedule(&self) -> CliResult<BetaSchedule> {
        let need_bound = |mode: &str| {
            self.n_bound
                .ok_or_else(|| CliError::Usage(format!("--beta-mode {mode} requires --n-bound")))
        };
        let mode = match self.beta_mode {
            BetaModeArg::Unbounded => BetaMode::UnboundedDescending,
            BetaModeArg::Bounded => BetaMode::BoundedDescending(need_bound("bounded")?),
            BetaModeArg::Equal => BetaMode::Equal(need_bound("equal")?),
            BetaModeArg::Dependent => BetaMode::DependentAdjusted(Box::new(match self.n_bound {
                Some(n) => BetaMode::BoundedDescending(n),
                None => BetaMode::UnboundedDescending,
            })),
        };
        Ok(BetaSchedule::new(mode, self.alpha)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,

    /// LOND, gsLOND, gsLOND.II, gsLOND.III, gsLOND.II.III, level-alpha or bonferroni(K).
    #[arg(long, default_value = "gsLOND")]
    pub procedure: String,

    #[arg(long, value_enum, default_value = "obf")]
    pub spending: SpendingArg,

    /// Futility threshold on the interim p-value.
    #[arg(long, default_value_t = 0.5)]
    pub alpha_futility: f64,

    /// Interim information fraction.
    #[arg(long, default_value_t = 0.5)]
    pub t1: f64,
}

impl EngineArgs {
    pub fn config(&self) -> CliResult<EngineConfig> {
        let procedure: ProcedureKind = self.procedure.parse()?;
        Ok(EngineConfig::new(
            procedure,
            self.spending.into(),
            self.schedule.schedule()?,
            self.alpha_futility,
            self.t1,
        )?)
    }
}

#[derive(Debug, Args)]
pub struct BoundariesArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    #[arg(long, value_enum, default_value = "equal")]
    pub beta_mode: BetaModeArg,

    /// Bound N; defaults to the number of hypotheses.
    #[arg(long)]
    pub n_bound: Option<usize>,

    /// Number of hypotheses K.
    #[arg(short = 'k', long, default_value_t = 3)]
    pub hypotheses: usize,

    /// Spending functions to tabulate; both when omitted.
    #[arg(long, value_enum)]
    pub spending: Vec<SpendingArg>,

    #[arg(long, default_value_t = 0.5)]
    pub t1: f64,

    #[arg(long, default_value_t = 0.5)]
    pub alpha_futility: f64,

    /// Analysis ordering for the variant tables, e.g. "1I,2I,1F,3I,2F,3F".
    #[arg(long)]
    pub order: Option<String>,

    /// Hypotheses whose boundaries the variant tables follow; all when omitted.
    #[arg(long)]
    pub target: Vec<usize>,

    /// Skip the variant tables.
    #[arg(long)]
    pub levels_only: bool,
}

#[derive(Debug, Args)]
pub struct BetasArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,

    /// Number of values to print.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[command(flatten)]
    pub engine: EngineArgs,

    /// Event file; standard input when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Persists the accepted events so the session can be replayed with --input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Config file, or the name of a bundled config (fig2 .. fig6, beta-modes).
    #[arg(long, required_unless_present = "manifest")]
    pub config: Option<String>,

    /// CSV destination; the manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Overrides the master seed of every scenario.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Overrides the replication count of every scenario.
    #[arg(long)]
    pub replications: Option<usize>,

    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Re-runs a previously written manifest.
    #[arg(long, conflicts_with_all = ["config", "seed", "replications"])]
    pub manifest: Option<PathBuf>,

    /// Suppresses per-scenario progress on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct ShowConfigArgs {
    /// Bundled config name or path; lists bundled configs when omitted.
    pub name: Option<String>,

    /// Also print the expanded scenarios.
    #[arg(long)]
    pub expand: bool,
}
