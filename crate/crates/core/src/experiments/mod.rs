//! Experimental campaigns: bias sweeps over the greater-than game,
//! population-size sweeps and the month comparison over the well-being
//! domain, with CSV export and replayable manifests.

pub mod export;
pub mod month;
pub mod setup;
pub mod sweep;

pub use export::{
    check_grid_against_trials, execute, read_trials_csv, verify, Artifacts, ExecOptions, Job,
    Manifest, RunSpec, Verification, MANIFEST_FILE,
};
pub use month::{
    compute_diversity_threshold, run_month_comparison, MonthResult, MonthSpec, MonthSummary,
    ThresholdResult, ThresholdSpec,
};
pub use setup::{DomainSpec, UserSource, WellbeingInputs, WellbeingSpec};
pub use sweep::{
    run_bias_sweep, run_popsize_sweep, run_sweep, summarize, trial_seed, BiasGrid, CellKey,
    CellSummary, Condition, EngineParams, Mitigations, SweepResult, SweepSpec, TrialRecord,
    POPULATION_SIZES,
};
