//! Generational loop shared by every domain.
//!
//! One coevolutionary generation runs a fixed pipeline:
//!
//! 1. every host and every parasite plays `S` opponents drawn uniformly
//!    with replacement from the other population; psi is the mean score;
//! 2. population means (sigma) and the engagement gap `delta` are computed;
//! 3. the mitigation strategy rewrites psi (and, for SF, genomes);
//! 4. `n` offspring per population are bred from tournament winners on the
//!    post-mitigation psi;
//! 5. offspring replace their population wholesale (no elitism).
//!
//! The random stream of a trial is consumed in exactly that order, which
//! makes a trial a pure function of its configuration and seed.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mitigation::{Mitigation, Strategy};
use crate::rng::{trial_rng, TrialRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Host,
    Parasite,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Host => "host",
            Role::Parasite => "parasite",
        })
    }
}

/// Whether larger or smaller domain objective values are better.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }

    pub fn worst(self) -> f64 {
        match self {
            Direction::Maximize => f64::NEG_INFINITY,
            Direction::Minimize => f64::INFINITY,
        }
    }

    /// Pairwise competition score of `own` against `opponent`: 1 for a
    /// win, 0.5 for a draw, 0 for a loss.
    pub fn score(self, own: f64, opponent: f64) -> f64 {
        if self.better(own, opponent) {
            1.0
        } else if own == opponent {
            0.5
        } else {
            0.0
        }
    }
}

/// A problem domain: genome representation, objective, and variation.
pub trait Domain: Sync {
    type Genome: Clone + Send + Sync + fmt::Debug;

    fn direction(&self) -> Direction;

    fn init_genome(&self, role: Role, rng: &mut TrialRng) -> Result<Self::Genome>;

    /// Initial genome for single-population runs.
    fn init_single(&self, rng: &mut TrialRng) -> Result<Self::Genome> {
        self.init_genome(Role::Host, rng)
    }

    /// The domain objective (not observable to coevolutionary selection).
    fn objective(&self, genome: &Self::Genome) -> Result<f64>;

    /// Competition score of an individual with objective `own` against an
    /// opponent with objective `opponent`.
    fn score(&self, own: f64, opponent: f64) -> f64 {
        self.direction().score(own, opponent)
    }

    /// Objective mapped to [0, 1], higher is better. Selection uses it in
    /// single-population runs.
    fn direct_fitness(&self, objective: f64) -> f64;

    /// Breeds one offspring from the tournament winner `parent`.
    /// `population` is the parent's own population, for mate choice.
    fn offspring(
        &self,
        role: Role,
        parent: &Individual<Self::Genome>,
        population: &[Individual<Self::Genome>],
        rng: &mut TrialRng,
    ) -> Result<Self::Genome>;

    fn is_optimal(&self, objective: f64) -> bool;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual<G> {
    pub genome: G,
    /// Cached domain objective of `genome`.
    pub objective: f64,
    /// Subjective fitness in [0, 1].
    pub psi: f64,
}

impl<G> Individual<G> {
    pub fn new(genome: G, objective: f64) -> Self {
        Individual {
            genome,
            objective,
            psi: 0.0,
        }
    }
}

/// One side of the coevolutionary system and its mean subjective fitness.
#[derive(Clone, Debug)]
pub struct Population<G> {
    role: Role,
    members: Vec<Individual<G>>,
    sigma: f64,
}

impl<G> Population<G> {
    pub fn new(role: Role, members: Vec<Individual<G>>) -> Self {
        let mut p = Population {
            role,
            members,
            sigma: 0.0,
        };
        p.refresh_sigma();
        p
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn members(&self) -> &[Individual<G>] {
        &self.members
    }

    /// Mutable access; call [`Population::refresh_sigma`] after changing psi.
    pub fn members_mut(&mut self) -> &mut [Individual<G>] {
        &mut self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn refresh_sigma(&mut self) {
        self.sigma = if self.members.is_empty() {
            0.0
        } else {
            self.members.iter().map(|m| m.psi).sum::<f64>() / self.members.len() as f64
        };
    }

    pub fn mean_objective(&self) -> f64 {
        self.members.iter().map(|m| m.objective).sum::<f64>() / self.members.len().max(1) as f64
    }

    pub fn best(&self, direction: Direction) -> Option<&Individual<G>> {
        self.members.iter().fold(None, |best, m| match best {
            Some(b) if !direction.better(m.objective, b.objective) => Some(b),
            _ => Some(m),
        })
    }

    pub fn into_members(self) -> Vec<Individual<G>> {
        self.members
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Coevolution,
    SinglePopulation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub population_size: usize,
    pub sample_size: usize,
    pub tournament_size: usize,
    pub generations: usize,
    pub mode: Mode,
    pub mitigation: Strategy,
    pub seed: u64,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population size must be at least 2"));
        }
        if self.sample_size == 0 || self.sample_size > self.population_size {
            return Err(Error::config(format!(
                "opponent sample size must be in [1, {}], got {}",
                self.population_size, self.sample_size
            )));
        }
        if self.tournament_size != 2 {
            return Err(Error::config(format!(
                "only binary tournaments are supported, got size {}",
                self.tournament_size
            )));
        }
        if self.generations == 0 {
            return Err(Error::config("generations must be at least 1"));
        }
        if self.mode == Mode::SinglePopulation && self.mitigation != Strategy::Baseline {
            return Err(Error::config(
                "single-population runs have no opponents; mitigation must be baseline",
            ));
        }
        self.mitigation.validate()
    }
}

/// Statistics of one generation. psi-derived fields are taken after
/// mitigation; `delta`, `disengaged` and the raw sigmas describe the
/// competition itself. Objective fields describe the evaluated population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub gen: usize,
    pub raw_sigma_host: f64,
    pub raw_sigma_parasite: Option<f64>,
    pub delta: f64,
    pub disengaged: bool,
    pub sigma_host: f64,
    pub sigma_parasite: Option<f64>,
    pub kappa_applied: usize,
    pub virulence_host: f64,
    pub virulence_parasite: f64,
    pub best_objective_host: f64,
    pub best_objective_parasite: Option<f64>,
    pub mean_objective_host: f64,
    pub mean_objective_parasite: Option<f64>,
}

/// Statistics of a generation with its evaluated host and parasite populations.
pub type Evaluated<G> = (GenerationStats, Population<G>, Population<G>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub ever_disengaged: bool,
    pub disengaged_generation_count: usize,
    pub reached_optimum: bool,
    /// Best host objective seen in any generation.
    pub best_objective_overall: f64,
}

#[derive(Clone, Debug)]
pub struct TrialResult<G> {
    pub per_generation: Vec<GenerationStats>,
    /// Best host ever evaluated (by objective).
    pub best_host: Individual<G>,
    pub best_parasite: Option<Individual<G>>,
    /// Host population of the last evaluated generation.
    pub final_hosts: Vec<Individual<G>>,
    pub summary: TrialSummary,
}

impl<G> TrialResult<G> {
    pub fn last(&self) -> &GenerationStats {
        self.per_generation
            .last()
            .expect("a trial has at least one generation")
    }
}

/// `|sigma_a - sigma_b|`.
pub fn compute_delta(sigma_a: f64, sigma_b: f64) -> f64 {
    (sigma_a - sigma_b).abs()
}

/// Mean score of one competitor against the given opponent objectives.
pub fn subjective_score<D: Domain + ?Sized>(domain: &D, own: f64, opponents: &[f64]) -> f64 {
    let total: f64 = opponents.iter().map(|&o| domain.score(own, o)).sum();
    total / opponents.len() as f64
}

fn competitive_scores<D: Domain, R: Rng + ?Sized>(
    domain: &D,
    own: &[Individual<D::Genome>],
    opponents: &[Individual<D::Genome>],
    sample_size: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut drawn = Vec::with_capacity(sample_size);
    own.iter()
        .map(|ind| {
            drawn.clear();
            drawn.extend(
                (0..sample_size).map(|_| opponents[rng.random_range(0..opponents.len())].objective),
            );
            subjective_score(domain, ind.objective, &drawn)
        })
        .collect()
}

/// Refreshes psi of both populations from sampled competitions (hosts are
/// sampled first, then parasites) and recomputes their sigmas.
pub fn evaluate_subjective<D: Domain, R: Rng + ?Sized>(
    domain: &D,
    host: &mut Population<D::Genome>,
    parasite: &mut Population<D::Genome>,
    sample_size: usize,
    rng: &mut R,
) -> Result<()> {
    if sample_size == 0 {
        return Err(Error::config("opponent sample size must be at least 1"));
    }
    if host.is_empty() || parasite.is_empty() {
        return Err(Error::config("both populations must be non-empty"));
    }
    let host_psi = competitive_scores(domain, host.members(), parasite.members(), sample_size, rng);
    let par_psi = competitive_scores(domain, parasite.members(), host.members(), sample_size, rng);
    for (m, p) in host.members_mut().iter_mut().zip(host_psi) {
        m.psi = p;
    }
    for (m, p) in parasite.members_mut().iter_mut().zip(par_psi) {
        m.psi = p;
    }
    host.refresh_sigma();
    parasite.refresh_sigma();
    Ok(())
}

/// Binary tournament on psi: two distinct members drawn uniformly, the
/// higher psi wins, ties go either way with equal probability.
pub fn tournament_select<G, R: Rng + ?Sized>(members: &[Individual<G>], rng: &mut R) -> usize {
    let n = members.len();
    if n < 2 {
        return 0;
    }
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let (pa, pb) = (members[a].psi, members[b].psi);
    if pa > pb {
        a
    } else if pb > pa {
        b
    } else if rng.random_bool(0.5) {
        a
    } else {
        b
    }
}

fn breed<D: Domain>(
    domain: &D,
    pop: &Population<D::Genome>,
    rng: &mut TrialRng,
) -> Result<Population<D::Genome>> {
    let members = pop.members();
    let mut next = Vec::with_capacity(members.len());
    for _ in 0..members.len() {
        let parent = &members[tournament_select(members, rng)];
        let genome = domain.offspring(pop.role(), parent, members, rng)?;
        let objective = domain.objective(&genome)?;
        next.push(Individual::new(genome, objective));
    }
    Ok(Population::new(pop.role(), next))
}

fn init_population<D: Domain>(
    domain: &D,
    role: Role,
    n: usize,
    single: bool,
    rng: &mut TrialRng,
) -> Result<Population<D::Genome>> {
    let members = (0..n)
        .map(|_| {
            let g = if single {
                domain.init_single(rng)?
            } else {
                domain.init_genome(role, rng)?
            };
            let obj = domain.objective(&g)?;
            Ok(Individual::new(g, obj))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Population::new(role, members))
}

/// A coevolutionary run in progress.
pub struct Coevolution<'d, D: Domain> {
    domain: &'d D,
    config: EngineConfig,
    host: Population<D::Genome>,
    parasite: Population<D::Genome>,
    mitigation: Mitigation,
    rng: TrialRng,
    generation: usize,
}

impl<'d, D: Domain> Coevolution<'d, D> {
    /// Initializes both populations (hosts first) from the config's seed.
    pub fn new(config: EngineConfig, domain: &'d D) -> Result<Self> {
        config.validate()?;
        let mut rng = trial_rng(config.seed);
        let n = config.population_size;
        let host = init_population(domain, Role::Host, n, false, &mut rng)?;
        let parasite = init_population(domain, Role::Parasite, n, false, &mut rng)?;
        let mitigation = Mitigation::new(config.mitigation)?;
        Ok(Coevolution {
            domain,
            config,
            host,
            parasite,
            mitigation,
            rng,
            generation: 0,
        })
    }

    pub fn host(&self) -> &Population<D::Genome> {
        &self.host
    }

    pub fn parasite(&self) -> &Population<D::Genome> {
        &self.parasite
    }

    /// Runs one generation. Returns the statistics together with the
    /// evaluated (pre-breeding) host and parasite populations.
    pub fn step(&mut self) -> Result<Evaluated<D::Genome>> {
        let dir = self.domain.direction();
        evaluate_subjective(
            self.domain,
            &mut self.host,
            &mut self.parasite,
            self.config.sample_size,
            &mut self.rng,
        )?;
        let raw_h = self.host.sigma();
        let raw_p = self.parasite.sigma();
        let delta = compute_delta(raw_h, raw_p);

        let best_h = self.host.best(dir).map_or(dir.worst(), |b| b.objective);
        let best_p = self.parasite.best(dir).map_or(dir.worst(), |b| b.objective);
        let mean_h = self.host.mean_objective();
        let mean_p = self.parasite.mean_objective();
        let evaluated_host = self.host.clone();
        let evaluated_parasite = self.parasite.clone();

        let report = self
            .mitigation
            .apply(&mut self.host, &mut self.parasite, self.generation);

        let stats = GenerationStats {
            gen: self.generation,
            raw_sigma_host: raw_h,
            raw_sigma_parasite: Some(raw_p),
            delta,
            disengaged: delta == 1.0,
            sigma_host: self.host.sigma(),
            sigma_parasite: Some(self.parasite.sigma()),
            kappa_applied: report.kappa,
            virulence_host: report.virulence_host,
            virulence_parasite: report.virulence_parasite,
            best_objective_host: best_h,
            best_objective_parasite: Some(best_p),
            mean_objective_host: mean_h,
            mean_objective_parasite: Some(mean_p),
        };

        self.host = breed(self.domain, &self.host, &mut self.rng)?;
        self.parasite = breed(self.domain, &self.parasite, &mut self.rng)?;
        self.generation += 1;
        Ok((stats, evaluated_host, evaluated_parasite))
    }
}

fn keep_best<G: Clone>(slot: &mut Option<Individual<G>>, pop: &Population<G>, dir: Direction) {
    if let Some(b) = pop.best(dir) {
        if slot
            .as_ref()
            .is_none_or(|s| dir.better(b.objective, s.objective))
        {
            *slot = Some(b.clone());
        }
    }
}

/// Runs a full two-population trial.
pub fn run_trial<D: Domain>(config: &EngineConfig, domain: &D) -> Result<TrialResult<D::Genome>> {
    if config.mode != Mode::Coevolution {
        return Err(Error::config("run_trial requires coevolution mode"));
    }
    let dir = domain.direction();
    let mut run = Coevolution::new(config.clone(), domain)?;
    let mut per_generation = Vec::with_capacity(config.generations);
    let mut best_host = None;
    let mut best_parasite = None;
    let mut final_hosts = Vec::new();
    let mut reached = false;
    for _ in 0..config.generations {
        let (stats, hosts, parasites) = run.step()?;
        reached |= hosts
            .members()
            .iter()
            .any(|m| domain.is_optimal(m.objective));
        keep_best(&mut best_host, &hosts, dir);
        keep_best(&mut best_parasite, &parasites, dir);
        per_generation.push(stats);
        final_hosts = hosts.into_members();
    }
    let best_host = best_host.expect("populations are non-empty");
    let disengaged_generation_count = per_generation.iter().filter(|s| s.disengaged).count();
    Ok(TrialResult {
        summary: TrialSummary {
            ever_disengaged: disengaged_generation_count > 0,
            disengaged_generation_count,
            reached_optimum: reached,
            best_objective_overall: best_host.objective,
        },
        per_generation,
        best_host,
        best_parasite,
        final_hosts,
    })
}

/// Runs a single-population evolutionary trial: psi is the domain's direct
/// fitness, there is no competition and no mitigation.
pub fn run_single_population<D: Domain>(
    config: &EngineConfig,
    domain: &D,
) -> Result<TrialResult<D::Genome>> {
    if config.mode != Mode::SinglePopulation {
        return Err(Error::config(
            "run_single_population requires single-population mode",
        ));
    }
    config.validate()?;
    let dir = domain.direction();
    let mut rng = trial_rng(config.seed);
    let mut pop = init_population(domain, Role::Host, config.population_size, true, &mut rng)?;
    let mut per_generation = Vec::with_capacity(config.generations);
    let mut best_host = None;
    let mut final_hosts = Vec::new();
    let mut reached = false;
    for gen in 0..config.generations {
        for m in pop.members_mut() {
            m.psi = domain.direct_fitness(m.objective);
        }
        pop.refresh_sigma();
        reached |= pop.members().iter().any(|m| domain.is_optimal(m.objective));
        keep_best(&mut best_host, &pop, dir);
        per_generation.push(GenerationStats {
            gen,
            raw_sigma_host: pop.sigma(),
            raw_sigma_parasite: None,
            delta: 0.0,
            disengaged: false,
            sigma_host: pop.sigma(),
            sigma_parasite: None,
            kappa_applied: 0,
            virulence_host: 1.0,
            virulence_parasite: 1.0,
            best_objective_host: pop.best(dir).map_or(dir.worst(), |b| b.objective),
            best_objective_parasite: None,
            mean_objective_host: pop.mean_objective(),
            mean_objective_parasite: None,
        });
        let next = breed(domain, &pop, &mut rng)?;
        final_hosts = std::mem::replace(&mut pop, next).into_members();
    }
    let best_host = best_host.expect("population is non-empty");
    Ok(TrialResult {
        summary: TrialSummary {
            ever_disengaged: false,
            disengaged_generation_count: 0,
            reached_optimum: reached,
            best_objective_overall: best_host.objective,
        },
        per_generation,
        best_host,
        best_parasite: None,
        final_hosts,
    })
}

/// Dispatches on `config.mode`.
pub fn run<D: Domain>(config: &EngineConfig, domain: &D) -> Result<TrialResult<D::Genome>> {
    match config.mode {
        Mode::Coevolution => run_trial(config, domain),
        Mode::SinglePopulation => run_single_population(config, domain),
    }
}
