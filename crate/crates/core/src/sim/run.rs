use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::metrics::{MetricsAccumulator, MetricsSummary, ReplicationMetrics};
use super::scenario::{BudgetScenario, ControlMode, TrialScenario};
use super::streams::{assign_truth, fnv1a, normal_sample, stream_rng, ControlStream, StreamId};
use crate::boundaries::BoundaryCache;
use crate::engine::{DecisionEvent, EngineConfig, LondEngine, Outcome, Stage, Timestamp};
use crate::error::{Error, Result};
use crate::numerics::{pooled_t_pvalue, SampleSummary};

/// Replications per work unit. Fixed so results do not depend on thread count.
pub const CHUNK: usize = 64;

/// Opening, interim and final times of an arm on the control clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArmTimeline {
    pub start: Timestamp,
    pub interim: Timestamp,
    pub final_: Timestamp,
}

impl ArmTimeline {
    pub fn opening_at(start: Timestamp, n: usize, n1: usize) -> Self {
        ArmTimeline { start, interim: start + n1 as u64, final_: start + n as u64 }
    }

    /// Staggered entry of the `i`-th planned arm (0-based).
    pub fn planned(i: usize, n: usize, n1: usize, n_delta: usize) -> Self {
        Self::opening_at((i * n_delta) as u64, n, n1)
    }

    pub fn at(&self, stage: Stage) -> Timestamp {
        match stage {
            Stage::Interim => self.interim,
            Stage::Final => self.final_,
        }
    }
}

/// Half-open range of control recruitment times used for an analysis at `time`.
pub fn control_window(mode: ControlMode, start: Timestamp, time: Timestamp) -> (Timestamp, Timestamp) {
    match mode {
        ControlMode::Concurrent => (start, time),
        ControlMode::AllControls => (0, time),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmRecord {
    /// 1-based hypothesis index.
    pub index: usize,
    pub timeline: ArmTimeline,
    pub is_null: bool,
    pub effect: f64,
    pub outcome: Outcome,
    /// Opened by freed budget rather than planned up front.
    pub added: bool,
}

impl ArmRecord {
    pub fn stopped_at(&self) -> Timestamp {
        if self.outcome.stops_early() {
            self.timeline.interim
        } else {
            self.timeline.final_
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub arms: Vec<ArmRecord>,
    pub log: Vec<DecisionEvent>,
    pub n: usize,
    pub n1: usize,
    pub saved_observations: usize,
    pub treatment_observations: usize,
    pub control_observations: usize,
    pub budget: Option<usize>,
}

impl ReplicationRecord {
    pub fn rejections(&self) -> usize {
        self.arms.iter().filter(|a| a.outcome.is_rejection()).count()
    }

    pub fn false_rejections(&self) -> usize {
        self.arms.iter().filter(|a| a.is_null && a.outcome.is_rejection()).count()
    }

    pub fn alternatives(&self) -> usize {
        self.arms.iter().filter(|a| !a.is_null).count()
    }

    pub fn total_observations(&self) -> usize {
        self.treatment_observations + self.control_observations
    }

    pub fn metrics(&self) -> ReplicationMetrics {
        let rejected_alt = self.rejections() - self.false_rejections();
        let alternatives = self.alternatives();
        let rejections = self.rejections();
        let arms = self.arms.len() as f64;
        ReplicationMetrics {
            power: (alternatives > 0).then(|| rejected_alt as f64 / alternatives as f64),
            fdp: if rejections == 0 { 0.0 } else { self.false_rejections() as f64 / rejections as f64 },
            saved_pct: 100.0 * self.saved_observations as f64 / (arms * self.n as f64),
            saved_pct_stage2: 100.0 * self.saved_observations as f64 / (arms * (self.n - self.n1) as f64),
            rejected_alternatives: rejected_alt as f64,
        }
    }
}

struct LiveArm {
    timeline: ArmTimeline,
    is_null: bool,
    effect: f64,
    data: Vec<f64>,
    outcome: Option<Outcome>,
    added: bool,
}

impl LiveArm {
    fn new<R: Rng>(rng: &mut R, timeline: ArmTimeline, is_null: bool, effect: f64, n: usize, added: bool) -> Self {
        let data = normal_sample(rng, if is_null { 0.0 } else { effect }, n);
        LiveArm { timeline, is_null, effect, data, outcome: None, added }
    }

    fn committed(&self, n: usize, n1: usize) -> usize {
        match self.outcome {
            Some(o) if o.stops_early() => n1,
            _ => n,
        }
    }

    fn control_end(&self) -> Timestamp {
        match self.outcome {
            Some(o) if o.stops_early() => self.timeline.interim,
            _ => self.timeline.final_,
        }
    }
}

/// Precomputed per-scenario state shared by all replications.
#[derive(Debug, Clone)]
pub struct Prepared {
    scenario: TrialScenario,
    config: EngineConfig,
    data_hash: u64,
    cache: Arc<BoundaryCache>,
}

impl Prepared {
    pub fn new(scenario: &TrialScenario, cache: Arc<BoundaryCache>) -> Result<Self> {
        scenario.validate()?;
        Ok(Prepared {
            scenario: scenario.clone(),
            config: scenario.engine_config()?,
            data_hash: fnv1a(scenario.data_key().as_bytes()),
            cache,
        })
    }

    pub fn scenario(&self) -> &TrialScenario {
        &self.scenario
    }

    fn rng(&self, replication: u64, stream: StreamId) -> rand_chacha::ChaCha8Rng {
        stream_rng(self.scenario.master_seed, self.data_hash, replication, stream)
    }

    fn effect_for<R: Rng>(&self, rng: &mut R, added: bool) -> f64 {
        match &self.scenario.budget {
            Some(BudgetScenario::DistributedEffects(set)) => set[rng.random_range(0..set.len())],
            Some(BudgetScenario::LargerAddedEffect(d)) if added => *d,
            _ => self.scenario.delta,
        }
    }

    fn open_planned(&self, replication: u64) -> Vec<LiveArm> {
        let s = &self.scenario;
        let truth = assign_truth(s, &mut self.rng(replication, StreamId::Truth));
        truth
            .into_iter()
            .enumerate()
            .map(|(i, is_null)| {
                let mut rng = self.rng(replication, StreamId::Arm(i));
                let effect = self.effect_for(&mut rng, false);
                LiveArm::new(&mut rng, ArmTimeline::planned(i, s.n, s.n1, s.n_delta), is_null, effect, s.n, false)
            })
            .collect()
    }

    fn open_added(&self, replication: u64, index: usize, added_so_far: usize, at: Timestamp) -> LiveArm {
        let s = &self.scenario;
        let mut rng = self.rng(replication, StreamId::Arm(index));
        let pi0 = match s.budget {
            Some(BudgetScenario::DecreasingNull(step)) => (s.pi0 - step * (added_so_far + 1) as f64).max(0.0),
            _ => s.pi0,
        };
        let is_null = rng.random::<f64>() < pi0;
        let effect = self.effect_for(&mut rng, true);
        LiveArm::new(&mut rng, ArmTimeline::opening_at(at, s.n, s.n1), is_null, effect, s.n, true)
    }

    /// Simulates one platform trial.
    pub fn run_replication(&self, replication: u64) -> Result<ReplicationRecord> {
        let s = &self.scenario;
        let (n, n1) = (s.n, s.n1);
        let budget = s.budget_config();
        let mut engine = LondEngine::with_cache(self.config.clone(), Arc::clone(&self.cache))?;
        let mut controls = ControlStream::new(self.rng(replication, StreamId::Control));
        let mut arms = self.open_planned(replication);
        let group_sequential = self.config.procedure.is_group_sequential();

        // Ordered by time, then finals before interims, then arm index.
        let mut queue: BinaryHeap<Reverse<(Timestamp, u8, usize)>> = BinaryHeap::new();
        let schedule = |q: &mut BinaryHeap<_>, i: usize, t: &ArmTimeline| {
            if group_sequential {
                q.push(Reverse((t.interim, 1u8, i)));
            }
            q.push(Reverse((t.final_, 0u8, i)));
        };
        for (i, arm) in arms.iter().enumerate() {
            engine.register_scheduled()?;
            schedule(&mut queue, i, &arm.timeline);
        }

        let mut saved = 0usize;
        let mut added = 0usize;
        while let Some(Reverse((time, rank, i))) = queue.pop() {
            if arms[i].outcome.is_some_and(|o| o.stops_early()) {
                continue;
            }
            let stage = if rank == 0 { Stage::Final } else { Stage::Interim };
            let used = if stage == Stage::Interim { n1 } else { n };
            let (from, to) = control_window(s.control_mode, arms[i].timeline.start, time);
            let p = pooled_t_pvalue(&SampleSummary::from_slice(&arms[i].data[..used]), &controls.summary(from, to))?;
            let outcome = match stage {
                Stage::Interim => engine.submit_interim(i + 1, p, time)?,
                Stage::Final => engine.submit_final(i + 1, p, time)?,
            };
            arms[i].outcome = Some(outcome);
            if stage == Stage::Interim && outcome.stops_early() {
                saved += n - n1;
                if let Some(b) = &budget {
                    let index_ok = engine.config().schedule.bound().is_none_or(|bound| arms.len() < bound);
                    let committed: usize = arms.iter().map(|a| a.committed(n, n1)).sum();
                    let control_end = arms.iter().map(LiveArm::control_end).fold(time, Timestamp::max);
                    let needed_controls = control_end.max(time + n as u64) as usize;
                    if index_ok && committed + n + needed_controls <= b.total {
                        let index = arms.len();
                        let arm = self.open_added(replication, index, added, time);
                        engine.register_scheduled()?;
                        schedule(&mut queue, index, &arm.timeline);
                        arms.push(arm);
                        added += 1;
                    }
                }
            }
        }

        let mut records = Vec::with_capacity(arms.len());
        for (i, arm) in arms.into_iter().enumerate() {
            let index = i + 1;
            let outcome = arm
                .outcome
                .ok_or_else(|| Error::state(index, "arm finished without a decision"))?;
            records.push(ArmRecord { index, timeline: arm.timeline, is_null: arm.is_null, effect: arm.effect, outcome, added: arm.added });
        }
        let treatment_observations = records.iter().map(|a| if a.outcome.stops_early() { n1 } else { n }).sum();
        let control_observations = records.iter().map(ArmRecord::stopped_at).max().unwrap_or(0) as usize;
        Ok(ReplicationRecord {
            arms: records,
            log: engine.log().to_vec(),
            n,
            n1,
            saved_observations: saved,
            treatment_observations,
            control_observations,
            budget: budget.map(|b| b.total),
        })
    }

    fn run_chunk(&self, chunk: usize) -> Result<MetricsAccumulator> {
        let lo = chunk * CHUNK;
        let hi = (lo + CHUNK).min(self.scenario.replications);
        let mut acc = MetricsAccumulator::default();
        for r in lo..hi {
            acc.add(&self.run_replication(r as u64)?.metrics());
        }
        Ok(acc)
    }

    /// All replications of the scenario on the current rayon pool.
    pub fn run(&self) -> Result<MetricsAccumulator> {
        let chunks = self.scenario.replications.div_ceil(CHUNK);
        let parts: Vec<MetricsAccumulator> =
            (0..chunks).into_par_iter().map(|c| self.run_chunk(c)).collect::<Result<_>>()?;
        Ok(parts.iter().fold(MetricsAccumulator::default(), |acc, p| acc.merge(p)))
    }
}

/// Convenience wrapper around [`Prepared::run_replication`].
pub fn run_replication(scenario: &TrialScenario, replication: u64) -> Result<ReplicationRecord> {
    Prepared::new(scenario, Arc::new(BoundaryCache::new()))?.run_replication(replication)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: TrialScenario,
    pub summary: MetricsSummary,
}

/// Runs every scenario with `jobs` worker threads, reporting each as it completes.
pub fn run_grid<F>(scenarios: &[TrialScenario], jobs: usize, mut progress: F) -> Result<Vec<ScenarioResult>>
where
    F: FnMut(usize, &ScenarioResult),
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    let cache = Arc::new(BoundaryCache::new());
    let mut out = Vec::with_capacity(scenarios.len());
    for (k, scenario) in scenarios.iter().enumerate() {
        let prepared = Prepared::new(scenario, Arc::clone(&cache))?;
        let acc = pool.install(|| prepared.run())?;
        let result = ScenarioResult { scenario: scenario.clone(), summary: acc.summary() };
        progress(k, &result);
        out.push(result);
    }
    Ok(out)
}

/// Runs a single scenario with `jobs` threads.
pub fn run_scenario(scenario: &TrialScenario, jobs: usize) -> Result<MetricsSummary> {
    Ok(run_grid(std::slice::from_ref(scenario), jobs, |_, _| {})?.remove(0).summary)
}
