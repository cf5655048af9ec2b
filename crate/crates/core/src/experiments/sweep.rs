use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::setup::{DomainSpec, WellbeingInputs, WellbeingSpec};
use crate::domain::greater_than::{GreaterThan, GtConfig};
use crate::domain::wellbeing::{
    diversity_error, Catalog, WellbeingPlan, ACCEPTABLE_ERROR, MONTH_DAYS,
};
use crate::engine::{run, EngineConfig, GenerationStats, Individual, Mode, TrialResult};
use crate::error::{Error, Result};
use crate::mitigation::{AvaConfig, RvConfig, Technique};
use crate::rng::mix_seed;

/// Population sizes of the well-being sweep.
pub const POPULATION_SIZES: [usize; 5] = [30, 60, 130, 260, 510];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasGrid {
    /// {0.1, 0.3, 0.5, 0.7, 0.9}: 15 cells.
    Coarse,
    /// 0.1 to 1.0 in steps of 0.1: 55 cells.
    Full,
}

impl BiasGrid {
    pub fn values(self) -> Vec<f64> {
        let tenths: Vec<u32> = match self {
            BiasGrid::Coarse => vec![1, 3, 5, 7, 9],
            BiasGrid::Full => (1..=10).collect(),
        };
        tenths.into_iter().map(|k| f64::from(k) / 10.0).collect()
    }

    /// Every pair with `beta_parasite >= beta_host`, host-major.
    pub fn cells(self) -> Vec<CellKey> {
        let v = self.values();
        let mut cells = Vec::new();
        for (i, &h) in v.iter().enumerate() {
            for &p in &v[i..] {
                cells.push(CellKey::Bias {
                    beta_host: h,
                    beta_parasite: p,
                });
            }
        }
        cells
    }
}

impl FromStr for BiasGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarse" => Ok(BiasGrid::Coarse),
            "full" => Ok(BiasGrid::Full),
            other => Err(Error::config(format!(
                "unknown grid '{other}', expected coarse or full"
            ))),
        }
    }
}

/// One point of an experimental grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellKey {
    Bias { beta_host: f64, beta_parasite: f64 },
    PopulationSize { n: usize },
}

impl CellKey {
    /// Integer key folded into trial seeds.
    pub fn seed_key(&self) -> u64 {
        match *self {
            CellKey::Bias {
                beta_host,
                beta_parasite,
            } => {
                let pct = |b: f64| (b * 100.0).round() as u64;
                pct(beta_host) * 1000 + pct(beta_parasite)
            }
            CellKey::PopulationSize { n } => n as u64,
        }
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CellKey::Bias {
                beta_host,
                beta_parasite,
            } => write!(f, "beta_h={beta_host} beta_p={beta_parasite}"),
            CellKey::PopulationSize { n } => write!(f, "n={n}"),
        }
    }
}

/// What a trial runs: a single population, or coevolution under a technique.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Single,
    Coevolution(Technique),
}

impl Condition {
    pub fn code(self) -> u64 {
        match self {
            Condition::Single => 4,
            Condition::Coevolution(t) => t.code(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Single => "single",
            Condition::Coevolution(t) => t.as_str(),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "single" => Ok(Condition::Single),
            other => other.parse().map(Condition::Coevolution),
        }
    }
}

/// Seed of trial `index` of `condition` in `cell`.
pub fn trial_seed(base: u64, cell: &CellKey, condition: Condition, index: usize) -> u64 {
    mix_seed(&[base, cell.seed_key(), condition.code(), index as u64])
}

/// Per-trial outcome, one row of the trial table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: CellKey,
    pub condition: Condition,
    pub trial: usize,
    pub seed: u64,
    pub ever_disengaged: bool,
    pub disengaged_generations: usize,
    pub reached_optimum: bool,
    pub best_objective: f64,
    /// Mean host objective of the last evaluated generation.
    pub final_mean_host: f64,
    pub final_mean_parasite: Option<f64>,
    /// Month diversity of the final population's best plans (well-being only).
    pub diversity_error: Option<f64>,
}

/// Aggregate over all trials of one (cell, condition).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: CellKey,
    pub condition: Condition,
    pub trials: usize,
    /// Trials that never disengaged.
    pub engaged_runs: usize,
    pub reached_optimum: usize,
    pub mean_best_objective: f64,
    pub median_best_objective: f64,
    pub sd_best_objective: f64,
    pub mean_disengaged_gens: f64,
    pub mean_final_host: f64,
    pub mean_final_parasite: Option<f64>,
    pub mean_diversity_error: Option<f64>,
    pub median_diversity_error: Option<f64>,
    pub fitness_threshold: Option<f64>,
    pub diversity_threshold: Option<f64>,
    pub thresholds_met: Option<bool>,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Sample standard deviation; 0 for a single value.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn optional<F: Fn(&TrialRecord) -> Option<f64>>(
    records: &[TrialRecord],
    get: F,
) -> Option<Vec<f64>> {
    records.iter().map(get).collect()
}

/// Summarizes the trials of one cell and condition (taken from the first
/// record). Thresholds are left unset.
pub fn summarize(records: &[TrialRecord]) -> Result<CellSummary> {
    let first = records
        .first()
        .ok_or_else(|| Error::config("cannot summarize an empty set of trials"))?;
    let best: Vec<f64> = records.iter().map(|r| r.best_objective).collect();
    let dis: Vec<f64> = records
        .iter()
        .map(|r| r.disengaged_generations as f64)
        .collect();
    let final_host: Vec<f64> = records.iter().map(|r| r.final_mean_host).collect();
    let diversity = optional(records, |r| r.diversity_error);
    Ok(CellSummary {
        cell: first.cell,
        condition: first.condition,
        trials: records.len(),
        engaged_runs: records.iter().filter(|r| !r.ever_disengaged).count(),
        reached_optimum: records.iter().filter(|r| r.reached_optimum).count(),
        mean_best_objective: mean(&best),
        median_best_objective: median(&best),
        sd_best_objective: std_dev(&best),
        mean_disengaged_gens: mean(&dis),
        mean_final_host: mean(&final_host),
        mean_final_parasite: optional(records, |r| r.final_mean_parasite).map(|v| mean(&v)),
        mean_diversity_error: diversity.as_deref().map(mean),
        median_diversity_error: diversity.as_deref().map(median),
        fitness_threshold: None,
        diversity_threshold: None,
        thresholds_met: None,
    })
}

/// Sets the acceptability thresholds of a well-being summary.
pub fn attach_thresholds(summary: &mut CellSummary, diversity_threshold: f64) {
    summary.fitness_threshold = Some(ACCEPTABLE_ERROR);
    summary.diversity_threshold = Some(diversity_threshold);
    summary.thresholds_met = summary
        .mean_diversity_error
        .map(|d| summary.mean_best_objective <= ACCEPTABLE_ERROR && d <= diversity_threshold);
}

/// Diversity error of the `MONTH_DAYS` lowest-error plans of a population
/// (ties keep population order).
pub fn final_population_diversity(
    hosts: &[Individual<WellbeingPlan>],
    catalog: &Catalog,
) -> Result<f64> {
    if hosts.len() < MONTH_DAYS {
        return Err(Error::config(format!(
            "population of {} is too small to pick {MONTH_DAYS} daily plans",
            hosts.len()
        )));
    }
    let mut order: Vec<usize> = (0..hosts.len()).collect();
    order.sort_by(|&a, &b| hosts[a].objective.total_cmp(&hosts[b].objective));
    let plans: Vec<WellbeingPlan> = order[..MONTH_DAYS]
        .iter()
        .map(|&i| hosts[i].genome)
        .collect();
    diversity_error(&plans, catalog)
}

/// Engine settings shared by every trial of a job.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub population_size: usize,
    pub sample_size: usize,
    pub generations: usize,
}

impl EngineParams {
    fn config(&self, condition: Condition, mitigation: &Mitigations, seed: u64) -> EngineConfig {
        let (mode, strategy) = match condition {
            Condition::Single => (
                Mode::SinglePopulation,
                crate::mitigation::Strategy::Baseline,
            ),
            Condition::Coevolution(t) => {
                (Mode::Coevolution, t.strategy(mitigation.rv, mitigation.ava))
            }
        };
        EngineConfig {
            population_size: self.population_size,
            sample_size: self.sample_size,
            tournament_size: 2,
            generations: self.generations,
            mode,
            mitigation: strategy,
            seed,
        }
    }
}

/// Parameters of the tunable techniques.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mitigations {
    pub rv: RvConfig,
    pub ava: AvaConfig,
}

/// One executed trial.
pub struct TrialOutput {
    pub record: TrialRecord,
    /// Per-generation statistics, kept only when generation logging is on.
    pub generations: Option<Vec<GenerationStats>>,
    /// Best plan ever found (well-being only).
    pub best_plan: Option<WellbeingPlan>,
}

/// A trial to execute.
#[derive(Clone, Copy, Debug)]
pub struct Task {
    pub cell: CellKey,
    pub condition: Condition,
    pub trial: usize,
}

/// Domains instantiated once per job.
#[allow(clippy::large_enum_variant)]
pub enum Prepared {
    GreaterThan(GtConfig),
    Wellbeing {
        spec: WellbeingSpec,
        inputs: WellbeingInputs,
        domain: Box<crate::domain::wellbeing::WellbeingDomain>,
    },
}

impl Prepared {
    pub fn new(domain: &DomainSpec) -> Result<Self> {
        match domain {
            DomainSpec::GreaterThan(cfg) => {
                cfg.validate()?;
                Ok(Prepared::GreaterThan(*cfg))
            }
            DomainSpec::Wellbeing(spec) => {
                let inputs = spec.load()?;
                let domain = spec.domain(&inputs, spec.operators)?;
                Ok(Prepared::Wellbeing {
                    spec: spec.clone(),
                    inputs,
                    domain: Box::new(domain),
                })
            }
        }
    }

    pub fn fingerprints(&self) -> (Option<String>, Option<String>) {
        match self {
            Prepared::GreaterThan(_) => (None, None),
            Prepared::Wellbeing { inputs, .. } => (
                Some(inputs.catalog_fingerprint.clone()),
                Some(inputs.users_fingerprint.clone()),
            ),
        }
    }
}

fn record_of<G>(task: &Task, seed: u64, r: &TrialResult<G>, diversity: Option<f64>) -> TrialRecord {
    let last = r.last();
    TrialRecord {
        cell: task.cell,
        condition: task.condition,
        trial: task.trial,
        seed,
        ever_disengaged: r.summary.ever_disengaged,
        disengaged_generations: r.summary.disengaged_generation_count,
        reached_optimum: r.summary.reached_optimum,
        best_objective: r.summary.best_objective_overall,
        final_mean_host: last.mean_objective_host,
        final_mean_parasite: last.mean_objective_parasite,
        diversity_error: diversity,
    }
}

/// Runs one trial. Bias cells override the greater-than biases; population
/// cells override the population size.
pub fn run_task(
    prepared: &Prepared,
    params: &EngineParams,
    mitigations: &Mitigations,
    base_seed: u64,
    task: &Task,
    keep_generations: bool,
) -> Result<TrialOutput> {
    let seed = trial_seed(base_seed, &task.cell, task.condition, task.trial);
    let mut params = *params;
    if let CellKey::PopulationSize { n } = task.cell {
        params.population_size = n;
    }
    let config = params.config(task.condition, mitigations, seed);
    match prepared {
        Prepared::GreaterThan(base) => {
            let mut gt = *base;
            if let CellKey::Bias {
                beta_host,
                beta_parasite,
            } = task.cell
            {
                gt.beta_host = beta_host;
                gt.beta_parasite = beta_parasite;
            }
            let domain = GreaterThan::new(gt)?;
            let r = run(&config, &domain)?;
            Ok(TrialOutput {
                record: record_of(task, seed, &r, None),
                generations: keep_generations.then_some(r.per_generation),
                best_plan: None,
            })
        }
        Prepared::Wellbeing { inputs, domain, .. } => {
            let r = run(&config, domain.as_ref())?;
            let diversity = final_population_diversity(&r.final_hosts, &inputs.catalog)?;
            Ok(TrialOutput {
                record: record_of(task, seed, &r, Some(diversity)),
                best_plan: Some(r.best_host.genome),
                generations: keep_generations.then_some(r.per_generation),
            })
        }
    }
}

/// Progress callback: `(finished, total)` trials.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

/// Runs `tasks` on a pool of `jobs` threads (0 = one per core). Results
/// come back in task order whatever the scheduling.
#[allow(clippy::too_many_arguments)]
pub fn run_tasks(
    prepared: &Prepared,
    params: &EngineParams,
    mitigations: &Mitigations,
    base_seed: u64,
    tasks: &[Task],
    keep_generations: bool,
    jobs: usize,
    progress: Option<Progress<'_>>,
) -> Result<Vec<TrialOutput>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let done = AtomicUsize::new(0);
    pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let out = run_task(
                    prepared,
                    params,
                    mitigations,
                    base_seed,
                    t,
                    keep_generations,
                );
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(p) = progress {
                    p(k, tasks.len());
                }
                out
            })
            .collect()
    })
}

/// Summaries per (cell, condition) in first-appearance order of `records`.
pub fn summarize_all(records: &[TrialRecord]) -> Result<Vec<CellSummary>> {
    let mut keys: Vec<(CellKey, Condition)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.cell, r.condition)) {
            keys.push((r.cell, r.condition));
        }
    }
    keys.iter()
        .map(|&(c, q)| {
            let group: Vec<TrialRecord> = records
                .iter()
                .filter(|r| r.cell == c && r.condition == q)
                .cloned()
                .collect();
            summarize(&group)
        })
        .collect()
}

/// A grid sweep over cells and techniques.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub domain: DomainSpec,
    pub cells: Vec<CellKey>,
    pub techniques: Vec<Technique>,
    pub trials: usize,
    pub engine: EngineParams,
    pub mitigations: Mitigations,
    pub base_seed: u64,
    pub log_generations: bool,
    /// Diversity threshold for well-being summaries; resolved before a
    /// well-being sweep runs.
    pub diversity_threshold: Option<f64>,
}

impl SweepSpec {
    /// Greater-than bias sweep with the standard settings: 25 individuals,
    /// 5 opponents, 1000 generations.
    pub fn bias(grid: BiasGrid, techniques: Vec<Technique>, trials: usize, base_seed: u64) -> Self {
        SweepSpec {
            domain: DomainSpec::GreaterThan(GtConfig::default()),
            cells: grid.cells(),
            techniques,
            trials,
            engine: EngineParams {
                population_size: 25,
                sample_size: 5,
                generations: 1000,
            },
            mitigations: Mitigations::default(),
            base_seed,
            log_generations: false,
            diversity_threshold: None,
        }
    }

    /// Well-being population-size sweep: 5 opponents, 500 generations.
    pub fn population(
        spec: WellbeingSpec,
        sizes: &[usize],
        techniques: Vec<Technique>,
        trials: usize,
        base_seed: u64,
    ) -> Self {
        SweepSpec {
            domain: DomainSpec::Wellbeing(spec),
            cells: sizes
                .iter()
                .map(|&n| CellKey::PopulationSize { n })
                .collect(),
            techniques,
            trials,
            engine: EngineParams {
                population_size: sizes.first().copied().unwrap_or(30),
                sample_size: 5,
                generations: 500,
            },
            mitigations: Mitigations::default(),
            base_seed,
            log_generations: false,
            diversity_threshold: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::config("a sweep needs at least one cell"));
        }
        if self.techniques.is_empty() {
            return Err(Error::config("a sweep needs at least one technique"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials per cell must be at least 1"));
        }
        for (i, t) in self.techniques.iter().enumerate() {
            if self.techniques[..i].contains(t) {
                return Err(Error::config(format!("technique {t} listed twice")));
            }
        }
        let bias = matches!(self.domain, DomainSpec::GreaterThan(_));
        for c in &self.cells {
            match (bias, c) {
                (true, CellKey::Bias { .. }) | (false, CellKey::PopulationSize { .. }) => {}
                _ => {
                    return Err(Error::config(format!(
                        "cell {c:?} does not fit the {} domain",
                        self.domain.name()
                    )))
                }
            }
        }
        Ok(())
    }

    /// Cell-major, then technique, then trial index.
    pub fn tasks(&self) -> Vec<Task> {
        let mut tasks = Vec::new();
        for &cell in &self.cells {
            for &t in &self.techniques {
                for trial in 0..self.trials {
                    tasks.push(Task {
                        cell,
                        condition: Condition::Coevolution(t),
                        trial,
                    });
                }
            }
        }
        tasks
    }
}

/// Trials and summaries of a finished sweep.
pub struct SweepResult {
    pub outputs: Vec<TrialOutput>,
    pub summaries: Vec<CellSummary>,
}

impl SweepResult {
    pub fn records(&self) -> impl Iterator<Item = &TrialRecord> {
        self.outputs.iter().map(|o| &o.record)
    }

    pub fn summary(&self, cell: &CellKey, technique: Technique) -> Option<&CellSummary> {
        self.summaries
            .iter()
            .find(|s| s.cell == *cell && s.condition == Condition::Coevolution(technique))
    }
}

/// Runs every trial of a sweep. A well-being sweep needs its diversity
/// threshold resolved beforehand.
pub fn run_sweep(
    spec: &SweepSpec,
    prepared: &Prepared,
    jobs: usize,
    progress: Option<Progress<'_>>,
) -> Result<SweepResult> {
    spec.validate()?;
    let tasks = spec.tasks();
    let outputs = run_tasks(
        prepared,
        &spec.engine,
        &spec.mitigations,
        spec.base_seed,
        &tasks,
        spec.log_generations,
        jobs,
        progress,
    )?;
    let records: Vec<TrialRecord> = outputs.iter().map(|o| o.record.clone()).collect();
    let mut summaries = summarize_all(&records)?;
    if let DomainSpec::Wellbeing(_) = spec.domain {
        let threshold = spec
            .diversity_threshold
            .ok_or_else(|| Error::config("well-being sweeps need a diversity threshold"))?;
        for s in &mut summaries {
            attach_thresholds(s, threshold);
        }
    }
    Ok(SweepResult { outputs, summaries })
}

/// Bias sweep over the greater-than game.
pub fn run_bias_sweep(
    spec: &SweepSpec,
    jobs: usize,
    progress: Option<Progress<'_>>,
) -> Result<SweepResult> {
    if !matches!(spec.domain, DomainSpec::GreaterThan(_)) {
        return Err(Error::config(
            "a bias sweep runs on the greater-than domain",
        ));
    }
    run_sweep(spec, &Prepared::new(&spec.domain)?, jobs, progress)
}

/// Population-size sweep over the well-being domain.
pub fn run_popsize_sweep(
    spec: &SweepSpec,
    jobs: usize,
    progress: Option<Progress<'_>>,
) -> Result<SweepResult> {
    if !matches!(spec.domain, DomainSpec::Wellbeing(_)) {
        return Err(Error::config(
            "a population-size sweep runs on the well-being domain",
        ));
    }
    run_sweep(spec, &Prepared::new(&spec.domain)?, jobs, progress)
}
