//! CSV tables, run manifests and replay verification.
//!
//! Every job renders its tables in memory first, so the same bytes can be
//! written to disk or compared with an earlier run. Floats use Rust's
//! shortest round-trip formatting, which makes every summary recomputable
//! from the trial table without loss.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::month::{
    compute_diversity_threshold, run_month_comparison, MonthSpec, MonthSummary, ThresholdSpec,
};
use super::setup::DomainSpec;
use super::sweep::{
    attach_thresholds, run_sweep, run_tasks, summarize_all, CellKey, CellSummary, Condition,
    EngineParams, Mitigations, Prepared, Progress, SweepSpec, Task, TrialOutput, TrialRecord,
};
use crate::engine::GenerationStats;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_FORMAT: u32 = 1;

/// A single trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub domain: DomainSpec,
    pub condition: Condition,
    pub engine: EngineParams,
    pub mitigations: Mitigations,
    /// Base seed; the trial seed is derived exactly as in sweeps.
    pub seed: u64,
}

impl RunSpec {
    pub fn cell(&self) -> CellKey {
        match &self.domain {
            DomainSpec::GreaterThan(gt) => CellKey::Bias {
                beta_host: gt.beta_host,
                beta_parasite: gt.beta_parasite,
            },
            DomainSpec::Wellbeing(_) => CellKey::PopulationSize {
                n: self.engine.population_size,
            },
        }
    }
}

/// Everything needed to reproduce a set of output files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "job", rename_all = "snake_case")]
pub enum Job {
    Run(RunSpec),
    Sweep(SweepSpec),
    Month(MonthSpec),
    Threshold(ThresholdSpec),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Run(_) => "run",
            Job::Sweep(_) => "sweep",
            Job::Month(_) => "month",
            Job::Threshold(_) => "threshold",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub tool_version: String,
    /// The job as executed, with every default and derived value resolved.
    pub job: Job,
    pub catalog_fingerprint: Option<String>,
    pub users_fingerprint: Option<String>,
    pub outputs: Vec<OutputFile>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::config(format!(
                    "manifest {} does not exist",
                    path.display()
                )))
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                message: format!("unsupported manifest format {}", manifest.format),
            });
        }
        Ok(manifest)
    }
}

/// Execution knobs that never change results.
#[derive(Clone, Copy, Default)]
pub struct ExecOptions<'a> {
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    pub progress: Option<Progress<'a>>,
}

/// Rendered output files plus the manifest describing them.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub manifest: Manifest,
    /// Short human-readable account of the results.
    pub report: String,
}

impl Artifacts {
    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    /// Writes every file and `manifest.json` into `dir`, creating it.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        }
        let path = dir.join(MANIFEST_FILE);
        let mut json = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| Error::config(format!("cannot serialize manifest: {e}")))?;
        json.push('\n');
        fs::write(&path, json).map_err(|e| Error::io(&path, e))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn fmt_f64(v: f64) -> String {
    v.to_string()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn cell_header(cell: &CellKey) -> Vec<&'static str> {
    match cell {
        CellKey::Bias { .. } => vec!["beta_h", "beta_p"],
        CellKey::PopulationSize { .. } => vec!["n"],
    }
}

fn cell_fields(cell: &CellKey) -> Vec<String> {
    match *cell {
        CellKey::Bias {
            beta_host,
            beta_parasite,
        } => vec![fmt_f64(beta_host), fmt_f64(beta_parasite)],
        CellKey::PopulationSize { n } => vec![n.to_string()],
    }
}

struct Table {
    name: &'static str,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(name: &'static str, header: &[&str]) -> Result<Self> {
        let mut t = Table {
            name,
            writer: csv::Writer::from_writer(Vec::new()),
        };
        t.row(header.iter().map(|s| s.to_string()).collect())?;
        Ok(t)
    }

    fn row(&mut self, fields: Vec<String>) -> Result<()> {
        self.writer.write_record(&fields).map_err(|e| Error::Csv {
            path: PathBuf::from(self.name),
            source: e,
        })
    }

    fn finish(self) -> Result<(String, Vec<u8>)> {
        let name = self.name;
        let bytes = self.writer.into_inner().map_err(|e| Error::Csv {
            path: PathBuf::from(name),
            source: e.into_error().into(),
        })?;
        Ok((name.to_string(), bytes))
    }
}

const TRIAL_COLUMNS: [&str; 10] = [
    "condition",
    "trial",
    "seed",
    "ever_disengaged",
    "disengaged_generations",
    "reached_optimum",
    "best_objective",
    "final_mean_host",
    "final_mean_parasite",
    "diversity_error",
];

/// One row per trial.
pub fn trials_csv(name: &'static str, records: &[&TrialRecord]) -> Result<(String, Vec<u8>)> {
    let first = records
        .first()
        .ok_or_else(|| Error::config("no trials to export"))?;
    let mut header = cell_header(&first.cell);
    header.extend(TRIAL_COLUMNS);
    let mut t = Table::new(name, &header)?;
    for r in records {
        let mut f = cell_fields(&r.cell);
        f.extend([
            r.condition.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.ever_disengaged.to_string(),
            r.disengaged_generations.to_string(),
            r.reached_optimum.to_string(),
            fmt_f64(r.best_objective),
            fmt_f64(r.final_mean_host),
            fmt_opt(r.final_mean_parasite),
            fmt_opt(r.diversity_error),
        ]);
        t.row(f)?;
    }
    t.finish()
}

/// Long format: one row per trial per generation.
pub fn generations_csv(outputs: &[TrialOutput]) -> Result<(String, Vec<u8>)> {
    let first = outputs
        .first()
        .ok_or_else(|| Error::config("no trials to export"))?;
    let mut header = cell_header(&first.record.cell);
    header.extend([
        "condition",
        "trial",
        "gen",
        "raw_sigma_host",
        "raw_sigma_parasite",
        "delta",
        "disengaged",
        "sigma_host",
        "sigma_parasite",
        "kappa",
        "virulence_host",
        "virulence_parasite",
        "best_objective_host",
        "best_objective_parasite",
        "mean_objective_host",
        "mean_objective_parasite",
    ]);
    let mut t = Table::new("generations.csv", &header)?;
    for o in outputs {
        let r = &o.record;
        let gens: &[GenerationStats] = o.generations.as_deref().unwrap_or(&[]);
        for g in gens {
            let mut f = cell_fields(&r.cell);
            f.extend([
                r.condition.to_string(),
                r.trial.to_string(),
                g.gen.to_string(),
                fmt_f64(g.raw_sigma_host),
                fmt_opt(g.raw_sigma_parasite),
                fmt_f64(g.delta),
                g.disengaged.to_string(),
                fmt_f64(g.sigma_host),
                fmt_opt(g.sigma_parasite),
                g.kappa_applied.to_string(),
                fmt_f64(g.virulence_host),
                fmt_f64(g.virulence_parasite),
                fmt_f64(g.best_objective_host),
                fmt_opt(g.best_objective_parasite),
                fmt_f64(g.mean_objective_host),
                fmt_opt(g.mean_objective_parasite),
            ]);
            t.row(f)?;
        }
    }
    t.finish()
}

const GRID_COLUMNS: [&str; 17] = [
    "technique",
    "engaged_runs",
    "reached_optimum",
    "mean_best_objective",
    "mean_disengaged_gens",
    "trials",
    "median_best_objective",
    "sd_best_objective",
    "mean_final_host",
    "mean_final_parasite",
    "mean_diversity_error",
    "median_diversity_error",
    "fitness_threshold",
    "diversity_threshold",
    "thresholds_met",
    "engaged_fraction",
    "optimum_fraction",
];

/// One row per (cell, technique), ready for heatmaps.
pub fn grid_csv(summaries: &[CellSummary]) -> Result<(String, Vec<u8>)> {
    let first = summaries
        .first()
        .ok_or_else(|| Error::config("no summaries to export"))?;
    let mut header = cell_header(&first.cell);
    header.extend(GRID_COLUMNS);
    let mut t = Table::new("grid.csv", &header)?;
    for s in summaries {
        let mut f = cell_fields(&s.cell);
        f.extend([
            s.condition.to_string(),
            s.engaged_runs.to_string(),
            s.reached_optimum.to_string(),
            fmt_f64(s.mean_best_objective),
            fmt_f64(s.mean_disengaged_gens),
            s.trials.to_string(),
            fmt_f64(s.median_best_objective),
            fmt_f64(s.sd_best_objective),
            fmt_f64(s.mean_final_host),
            fmt_opt(s.mean_final_parasite),
            fmt_opt(s.mean_diversity_error),
            fmt_opt(s.median_diversity_error),
            fmt_opt(s.fitness_threshold),
            fmt_opt(s.diversity_threshold),
            s.thresholds_met.map(|b| b.to_string()).unwrap_or_default(),
            fmt_f64(s.engaged_runs as f64 / s.trials as f64),
            fmt_f64(s.reached_optimum as f64 / s.trials as f64),
        ]);
        t.row(f)?;
    }
    t.finish()
}

pub fn month_summary_csv(summaries: &[MonthSummary]) -> Result<(String, Vec<u8>)> {
    let mut t = Table::new(
        "month_summary.csv",
        &[
            "condition",
            "trials",
            "median_best_error",
            "mean_best_error",
            "median_diversity_error",
            "mean_diversity_error",
            "month_diversity_error",
        ],
    )?;
    for s in summaries {
        t.row(vec![
            s.condition.to_string(),
            s.trials.to_string(),
            fmt_f64(s.median_best_error),
            fmt_f64(s.mean_best_error),
            fmt_f64(s.median_diversity_error),
            fmt_f64(s.mean_diversity_error),
            fmt_f64(s.month_diversity_error),
        ])?;
    }
    t.finish()
}

fn csv_error(name: &str, e: csv::Error) -> Error {
    Error::Csv {
        path: PathBuf::from(name),
        source: e,
    }
}

fn parse_field<T: std::str::FromStr>(
    name: &str,
    row: usize,
    column: &str,
    text: &str,
) -> Result<T> {
    text.parse().map_err(|_| Error::Parse {
        path: PathBuf::from(name),
        message: format!("row {row}: cannot parse {column} value '{text}'"),
    })
}

fn parse_opt(name: &str, row: usize, column: &str, text: &str) -> Result<Option<f64>> {
    if text.is_empty() {
        Ok(None)
    } else {
        parse_field(name, row, column, text).map(Some)
    }
}

/// Parses a table written by [`trials_csv`].
pub fn read_trials_csv(name: &str, bytes: &[u8]) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_reader(bytes);
    let header = reader.headers().map_err(|e| csv_error(name, e))?.clone();
    let bias = header.get(0) == Some("beta_h");
    let offset = if bias { 2 } else { 1 };
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(name, e))?;
        let get = |k: usize| row.get(k).unwrap_or("");
        let col = |k: usize| header.get(k).unwrap_or("?");
        let cell = if bias {
            CellKey::Bias {
                beta_host: parse_field(name, i, col(0), get(0))?,
                beta_parasite: parse_field(name, i, col(1), get(1))?,
            }
        } else {
            CellKey::PopulationSize {
                n: parse_field(name, i, col(0), get(0))?,
            }
        };
        let f = |k: usize| (col(offset + k), get(offset + k));
        let (c, v) = f(0);
        let condition: Condition = v.parse().map_err(|_| Error::Parse {
            path: PathBuf::from(name),
            message: format!("row {i}: unknown {c} '{v}'"),
        })?;
        out.push(TrialRecord {
            cell,
            condition,
            trial: parse_field(name, i, f(1).0, f(1).1)?,
            seed: parse_field(name, i, f(2).0, f(2).1)?,
            ever_disengaged: parse_field(name, i, f(3).0, f(3).1)?,
            disengaged_generations: parse_field(name, i, f(4).0, f(4).1)?,
            reached_optimum: parse_field(name, i, f(5).0, f(5).1)?,
            best_objective: parse_field(name, i, f(6).0, f(6).1)?,
            final_mean_host: parse_field(name, i, f(7).0, f(7).1)?,
            final_mean_parasite: parse_opt(name, i, f(8).0, f(8).1)?,
            diversity_error: parse_opt(name, i, f(9).0, f(9).1)?,
        });
    }
    Ok(out)
}

/// Recomputes the grid from the trial table and compares every numeric
/// field of `grid` to `tol`. Returns the first disagreement.
pub fn check_grid_against_trials(
    trials: &[u8],
    grid: &[u8],
    diversity_threshold: Option<f64>,
    tol: f64,
) -> Result<Option<String>> {
    let records = read_trials_csv("trials.csv", trials)?;
    let mut summaries = summarize_all(&records)?;
    if let Some(th) = diversity_threshold {
        for s in &mut summaries {
            attach_thresholds(s, th);
        }
    }
    let (_, expected) = grid_csv(&summaries)?;
    let mut want = csv::Reader::from_reader(expected.as_slice());
    let mut got = csv::Reader::from_reader(grid);
    let header = want
        .headers()
        .map_err(|e| csv_error("grid.csv", e))?
        .clone();
    if got.headers().map_err(|e| csv_error("grid.csv", e))? != &header {
        return Ok(Some("grid.csv header differs".into()));
    }
    let want_rows: Vec<_> = want
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_error("grid.csv", e))?;
    let got_rows: Vec<_> = got
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_error("grid.csv", e))?;
    if want_rows.len() != got_rows.len() {
        return Ok(Some(format!(
            "grid.csv has {} rows, trials imply {}",
            got_rows.len(),
            want_rows.len()
        )));
    }
    for (i, (w, g)) in want_rows.iter().zip(&got_rows).enumerate() {
        for (k, (a, b)) in w.iter().zip(g.iter()).enumerate() {
            let same = match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => (x - y).abs() <= tol,
                _ => a == b,
            };
            if !same {
                return Ok(Some(format!(
                    "grid.csv row {i} column {}: file has '{b}', trials give '{a}'",
                    header.get(k).unwrap_or("?")
                )));
            }
        }
    }
    Ok(None)
}

fn finish(
    job: Job,
    prepared: Option<&Prepared>,
    files: Vec<(String, Vec<u8>)>,
    report: String,
) -> Artifacts {
    let (catalog_fingerprint, users_fingerprint) =
        prepared.map(Prepared::fingerprints).unwrap_or((None, None));
    let outputs = files
        .iter()
        .map(|(name, bytes)| OutputFile {
            name: name.clone(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        })
        .collect();
    Artifacts {
        files,
        manifest: Manifest {
            format: MANIFEST_FORMAT,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            job,
            catalog_fingerprint,
            users_fingerprint,
            outputs,
        },
        report,
    }
}

fn wellbeing_threshold(spec: &SweepSpec, opts: &ExecOptions<'_>) -> Result<Option<f64>> {
    match (&spec.domain, spec.diversity_threshold) {
        (DomainSpec::Wellbeing(wb), None) => {
            let th = ThresholdSpec::new(wb.clone(), spec.base_seed);
            Ok(Some(
                compute_diversity_threshold(&th, opts.jobs, opts.progress)?.threshold,
            ))
        }
        (_, t) => Ok(t),
    }
}

/// Runs a job and renders its output files. A well-being sweep without a
/// diversity threshold computes one first; the manifest records the value.
pub fn execute(job: &Job, opts: &ExecOptions<'_>) -> Result<Artifacts> {
    match job {
        Job::Run(spec) => {
            let prepared = Prepared::new(&spec.domain)?;
            let task = Task {
                cell: spec.cell(),
                condition: spec.condition,
                trial: 0,
            };
            let outputs = run_tasks(
                &prepared,
                &spec.engine,
                &spec.mitigations,
                spec.seed,
                &[task],
                true,
                1,
                opts.progress,
            )?;
            let r = &outputs[0].record;
            let report = format!(
                "{} {}: best objective {}, disengaged generations {}, reached optimum {}",
                spec.domain.name(),
                spec.condition,
                r.best_objective,
                r.disengaged_generations,
                r.reached_optimum
            );
            let files = vec![trials_csv("trials.csv", &[r])?, generations_csv(&outputs)?];
            Ok(finish(job.clone(), Some(&prepared), files, report))
        }
        Job::Sweep(spec) => {
            let mut spec = spec.clone();
            spec.validate()?;
            spec.diversity_threshold = wellbeing_threshold(&spec, opts)?;
            let prepared = Prepared::new(&spec.domain)?;
            let result = run_sweep(&spec, &prepared, opts.jobs, opts.progress)?;
            let records: Vec<&TrialRecord> = result.records().collect();
            let mut files = vec![
                trials_csv("trials.csv", &records)?,
                grid_csv(&result.summaries)?,
            ];
            if spec.log_generations {
                files.push(generations_csv(&result.outputs)?);
            }
            let mut report = String::new();
            for s in &result.summaries {
                report.push_str(&format!(
                    "{} {}: engaged {}/{}, optimum {}/{}, mean best {:.4}\n",
                    s.cell,
                    s.condition,
                    s.engaged_runs,
                    s.trials,
                    s.reached_optimum,
                    s.trials,
                    s.mean_best_objective
                ));
            }
            Ok(finish(Job::Sweep(spec), Some(&prepared), files, report))
        }
        Job::Month(spec) => {
            let result = run_month_comparison(spec, opts.jobs, opts.progress)?;
            let records: Vec<&TrialRecord> = result.records().collect();
            let mut files = vec![
                trials_csv("month.csv", &records)?,
                month_summary_csv(&result.summaries)?,
            ];
            if spec.log_generations {
                files.push(generations_csv(&result.outputs)?);
            }
            let mut report = String::new();
            for s in &result.summaries {
                report.push_str(&format!(
                    "{}: median best error {:.4}, median diversity {:.4}, month diversity {:.4}\n",
                    s.condition,
                    s.median_best_error,
                    s.median_diversity_error,
                    s.month_diversity_error
                ));
            }
            let prepared = Prepared::new(&DomainSpec::Wellbeing(spec.wellbeing.clone()))?;
            Ok(finish(job.clone(), Some(&prepared), files, report))
        }
        Job::Threshold(spec) => {
            let result = compute_diversity_threshold(spec, opts.jobs, opts.progress)?;
            let records: Vec<&TrialRecord> = result.outputs.iter().map(|o| &o.record).collect();
            let mut t = Table::new("threshold_summary.csv", &["trials", "diversity_threshold"])?;
            t.row(vec![records.len().to_string(), fmt_f64(result.threshold)])?;
            let files = vec![trials_csv("threshold.csv", &records)?, t.finish()?];
            let report = format!("diversity threshold {}\n", result.threshold);
            let prepared = Prepared::new(&DomainSpec::Wellbeing(spec.wellbeing.clone()))?;
            Ok(finish(job.clone(), Some(&prepared), files, report))
        }
    }
}

/// Outcome of a replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Identical,
    /// First divergent file and what differs.
    Mismatch {
        file: String,
        reason: String,
    },
}

/// Re-executes the job in `manifest_path` and compares every output with
/// the file next to the manifest, byte for byte. Grid files are also
/// checked against their trial table.
pub fn verify(manifest_path: &Path, opts: &ExecOptions<'_>) -> Result<Verification> {
    let manifest = Manifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mismatch = |file: &str, reason: String| {
        Ok(Verification::Mismatch {
            file: file.to_string(),
            reason,
        })
    };
    let mut on_disk = Vec::new();
    for out in &manifest.outputs {
        let path = dir.join(&out.name);
        match fs::read(&path) {
            Ok(b) => on_disk.push(b),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return mismatch(&out.name, "file is missing".into())
            }
            Err(e) => return Err(Error::io(&path, e)),
        }
    }
    let fresh = execute(&manifest.job, opts)?;
    if fresh.manifest.catalog_fingerprint != manifest.catalog_fingerprint {
        return mismatch("catalog", "catalog fingerprint changed".into());
    }
    if fresh.manifest.users_fingerprint != manifest.users_fingerprint {
        return mismatch("users", "user pool fingerprint changed".into());
    }
    for (out, bytes) in manifest.outputs.iter().zip(&on_disk) {
        match fresh.file(&out.name) {
            None => return mismatch(&out.name, "the job no longer produces this file".into()),
            Some(b) if b != bytes.as_slice() => {
                return mismatch(&out.name, "contents differ from the replay".into())
            }
            Some(_) => {}
        }
    }
    if fresh.files.len() != manifest.outputs.len() {
        return mismatch(
            "manifest.json",
            "the replay produces a different file set".into(),
        );
    }
    if let Job::Sweep(spec) = &manifest.job {
        if let (Some(t), Some(g)) = (fresh.file("trials.csv"), fresh.file("grid.csv")) {
            if let Some(reason) = check_grid_against_trials(t, g, spec.diversity_threshold, 1e-9)? {
                return mismatch("grid.csv", reason);
            }
        }
    }
    Ok(Verification::Identical)
}
