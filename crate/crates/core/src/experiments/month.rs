//! A month of recommendations for one user, and the diversity threshold.

use serde::{Deserialize, Serialize};

use super::setup::{DomainSpec, WellbeingSpec};
use super::sweep::{
    mean, median, run_tasks, CellKey, Condition, EngineParams, Mitigations, Prepared, Progress,
    TrialOutput, TrialRecord,
};
use crate::domain::wellbeing::{diversity_error, OperatorConfig, WellbeingPlan, MONTH_DAYS};
use crate::error::{Error, Result};
use crate::mitigation::Technique;

/// Month comparison: single population, coevolution and coevolution with
/// SF under the deployed recommender's settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonthSpec {
    pub wellbeing: WellbeingSpec,
    pub conditions: Vec<Condition>,
    pub trials: usize,
    pub engine: EngineParams,
    pub mitigations: Mitigations,
    pub base_seed: u64,
    pub log_generations: bool,
}

impl MonthSpec {
    pub fn new(mut wellbeing: WellbeingSpec, base_seed: u64) -> Self {
        wellbeing.operators = OperatorConfig::web();
        MonthSpec {
            wellbeing,
            conditions: vec![
                Condition::Single,
                Condition::Coevolution(Technique::Baseline),
                Condition::Coevolution(Technique::Sf),
            ],
            trials: MONTH_DAYS,
            engine: EngineParams {
                population_size: 250,
                sample_size: 5,
                generations: 150,
            },
            mitigations: Mitigations::default(),
            base_seed,
            log_generations: false,
        }
    }

    fn cell(&self) -> CellKey {
        CellKey::PopulationSize {
            n: self.engine.population_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.conditions.is_empty() {
            return Err(Error::config(
                "the month comparison needs at least one condition",
            ));
        }
        if self.trials < MONTH_DAYS {
            return Err(Error::config(format!(
                "a month needs at least {MONTH_DAYS} trials, got {}",
                self.trials
            )));
        }
        Ok(())
    }
}

/// Per-condition outcome of the month comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonthSummary {
    pub condition: Condition,
    pub trials: usize,
    pub median_best_error: f64,
    pub mean_best_error: f64,
    /// Median over trials of each trial's final-population diversity.
    pub median_diversity_error: f64,
    pub mean_diversity_error: f64,
    /// Diversity of the month formed by the best plan of the first 28 trials.
    pub month_diversity_error: f64,
}

pub struct MonthResult {
    pub outputs: Vec<TrialOutput>,
    pub summaries: Vec<MonthSummary>,
}

impl MonthResult {
    pub fn records(&self) -> impl Iterator<Item = &TrialRecord> {
        self.outputs.iter().map(|o| &o.record)
    }

    pub fn summary(&self, condition: Condition) -> Option<&MonthSummary> {
        self.summaries.iter().find(|s| s.condition == condition)
    }
}

pub fn run_month_comparison(
    spec: &MonthSpec,
    jobs: usize,
    progress: Option<Progress<'_>>,
) -> Result<MonthResult> {
    spec.validate()?;
    let prepared = Prepared::new(&DomainSpec::Wellbeing(spec.wellbeing.clone()))?;
    let Prepared::Wellbeing { inputs, .. } = &prepared else {
        unreachable!("month comparison always prepares the well-being domain")
    };
    let cell = spec.cell();
    let tasks: Vec<_> = spec
        .conditions
        .iter()
        .flat_map(|&condition| {
            (0..spec.trials).map(move |trial| super::sweep::Task {
                cell,
                condition,
                trial,
            })
        })
        .collect();
    let outputs = run_tasks(
        &prepared,
        &spec.engine,
        &spec.mitigations,
        spec.base_seed,
        &tasks,
        spec.log_generations,
        jobs,
        progress,
    )?;
    let mut summaries = Vec::new();
    for &condition in &spec.conditions {
        let group: Vec<&TrialOutput> = outputs
            .iter()
            .filter(|o| o.record.condition == condition)
            .collect();
        let best: Vec<f64> = group.iter().map(|o| o.record.best_objective).collect();
        let div: Vec<f64> = group
            .iter()
            .map(|o| {
                o.record
                    .diversity_error
                    .expect("well-being trials record diversity")
            })
            .collect();
        let plans: Vec<WellbeingPlan> = group
            .iter()
            .take(MONTH_DAYS)
            .map(|o| o.best_plan.expect("well-being trials keep their best plan"))
            .collect();
        summaries.push(MonthSummary {
            condition,
            trials: group.len(),
            median_best_error: median(&best),
            mean_best_error: mean(&best),
            median_diversity_error: median(&div),
            mean_diversity_error: mean(&div),
            month_diversity_error: diversity_error(&plans, &inputs.catalog)?,
        });
    }
    Ok(MonthResult { outputs, summaries })
}

/// Diversity threshold from single-population runs: the mean diversity
/// error over `trials` runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub wellbeing: WellbeingSpec,
    pub trials: usize,
    pub engine: EngineParams,
    pub base_seed: u64,
}

impl ThresholdSpec {
    pub fn new(mut wellbeing: WellbeingSpec, base_seed: u64) -> Self {
        wellbeing.operators = OperatorConfig::web();
        ThresholdSpec {
            wellbeing,
            trials: MONTH_DAYS,
            engine: EngineParams {
                population_size: 250,
                sample_size: 5,
                generations: 500,
            },
            base_seed,
        }
    }
}

pub struct ThresholdResult {
    pub outputs: Vec<TrialOutput>,
    pub threshold: f64,
}

pub fn compute_diversity_threshold(
    spec: &ThresholdSpec,
    jobs: usize,
    progress: Option<Progress<'_>>,
) -> Result<ThresholdResult> {
    if spec.trials == 0 {
        return Err(Error::config(
            "threshold recomputation needs at least one trial",
        ));
    }
    let prepared = Prepared::new(&DomainSpec::Wellbeing(spec.wellbeing.clone()))?;
    let cell = CellKey::PopulationSize {
        n: spec.engine.population_size,
    };
    let tasks: Vec<_> = (0..spec.trials)
        .map(|trial| super::sweep::Task {
            cell,
            condition: Condition::Single,
            trial,
        })
        .collect();
    let outputs = run_tasks(
        &prepared,
        &spec.engine,
        &Mitigations::default(),
        spec.base_seed,
        &tasks,
        false,
        jobs,
        progress,
    )?;
    let div: Vec<f64> = outputs
        .iter()
        .map(|o| {
            o.record
                .diversity_error
                .expect("well-being trials record diversity")
        })
        .collect();
    Ok(ThresholdResult {
        threshold: mean(&div),
        outputs,
    })
}
