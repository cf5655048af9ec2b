//! Command-line flags and the matching config-file keys.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(
    name = "coevo",
    version,
    about = "Two-population competitive coevolution with disengagement mitigation"
)]
pub struct Cli {
    /// Only print warnings and errors on standard error.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a single trial.
    Run(Options),
    /// Sweep a grid of bias pairs or population sizes.
    Sweep(Options),
    /// Compare a month of recommendations across conditions.
    Month(Options),
    /// Recompute the diversity threshold from single-population runs.
    Threshold(Options),
    /// Replay a manifest and compare its outputs byte for byte.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Manifest file, or the directory holding `manifest.json`.
    pub manifest: PathBuf,

    /// Worker threads for the replay (0 = one per core).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainName {
    GreaterThan,
    Wellbeing,
}

/// Flags shared by the data-producing subcommands. Every flag except
/// `--config` may also be given as a key of the TOML config file; a flag on
/// the command line wins over the file, which wins over the built-in default.
#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// TOML file whose keys mirror these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub domain: Option<DomainName>,

    /// Condition of a single run: baseline, rv, ava, sf or single.
    #[arg(long)]
    pub mitigation: Option<String>,

    /// Comma-separated techniques for a sweep.
    #[arg(long)]
    pub techniques: Option<String>,

    /// Bias grid of a greater-than sweep: coarse or full.
    #[arg(long)]
    pub grid: Option<String>,

    /// Comma-separated population sizes of a well-being sweep.
    #[arg(long)]
    pub sizes: Option<String>,

    /// Trials per cell (or per condition).
    #[arg(long)]
    pub trials: Option<usize>,

    /// Full-scale sweep: 55-cell grid and 100 trials (greater-than) or
    /// 30 trials (well-being).
    #[arg(long)]
    #[serde(default)]
    pub full_scale: bool,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Also write per-generation statistics.
    #[arg(long)]
    #[serde(default)]
    pub log_generations: bool,

    #[arg(long)]
    pub population_size: Option<usize>,

    /// Opponents sampled per individual.
    #[arg(long)]
    pub sample_size: Option<usize>,

    #[arg(long)]
    pub generations: Option<usize>,

    #[arg(long)]
    pub rv_virulence: Option<f64>,

    /// Population(s) reduced virulence applies to: host, parasite or both.
    #[arg(long)]
    pub rv_target: Option<String>,

    #[arg(long)]
    pub ava_alpha: Option<f64>,

    #[arg(long)]
    pub ava_mu: Option<f64>,

    #[arg(long)]
    pub ava_tau: Option<f64>,

    #[arg(long)]
    pub ava_initial_virulence: Option<f64>,

    /// Genome length of the greater-than game.
    #[arg(long)]
    pub l: Option<usize>,

    /// Per-bit mutation rate of the greater-than game.
    #[arg(long)]
    pub m: Option<f64>,

    #[arg(long)]
    pub beta_host: Option<f64>,

    #[arg(long)]
    pub beta_parasite: Option<f64>,

    /// Catalog JSON; the built-in demo catalog when absent.
    #[arg(long)]
    pub catalog: Option<PathBuf>,

    /// User pool JSON; a synthetic pool when absent.
    #[arg(long)]
    pub users: Option<PathBuf>,

    /// Size of the synthetic user pool.
    #[arg(long)]
    pub synthetic_users: Option<usize>,

    /// Seed of the synthetic user pool.
    #[arg(long)]
    pub users_seed: Option<u64>,

    #[arg(long)]
    pub user_id: Option<u32>,

    /// Crossover probability of the well-being operators.
    #[arg(long)]
    pub p_c: Option<f64>,

    /// Mutation probability of the well-being operators.
    #[arg(long)]
    pub p_m: Option<f64>,

    /// Diversity threshold for well-being sweeps; recomputed when absent.
    #[arg(long)]
    pub diversity_threshold: Option<f64>,
}

macro_rules! prefer {
    ($flags:ident, $file:ident; $($f:ident),* ; $($b:ident),*) => {
        Options {
            config: $flags.config,
            $($f: $flags.$f.or($file.$f),)*
            $($b: $flags.$b || $file.$b,)*
        }
    };
}

impl Options {
    /// Fills every unset flag from the config file, if one was given.
    pub fn resolve(self) -> Result<Options, String> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = Options::from_file(&path)?;
        let flags = self;
        Ok(prefer!(flags, file;
            domain, mitigation, techniques, grid, sizes, trials, seed, out, jobs,
            population_size, sample_size, generations, rv_virulence, rv_target, ava_alpha,
            ava_mu, ava_tau, ava_initial_virulence, l, m, beta_host, beta_parasite, catalog,
            users, synthetic_users, users_seed, user_id, p_c, p_m, diversity_threshold;
            full_scale, log_generations))
    }

    fn from_file(path: &Path) -> Result<Options, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut file: Options =
            toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        // Paths in a config file are relative to the file itself.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut file.out, &mut file.catalog, &mut file.users]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }

    /// Names of the flags that are set, for rejecting flags a subcommand
    /// does not use.
    pub fn set_flags(&self) -> Vec<&'static str> {
        let mut set = Vec::new();
        let mut note = |name: &'static str, on: bool| {
            if on {
                set.push(name);
            }
        };
        note("domain", self.domain.is_some());
        note("mitigation", self.mitigation.is_some());
        note("techniques", self.techniques.is_some());
        note("grid", self.grid.is_some());
        note("sizes", self.sizes.is_some());
        note("trials", self.trials.is_some());
        note("full-scale", self.full_scale);
        note("log-generations", self.log_generations);
        note("population-size", self.population_size.is_some());
        note("sample-size", self.sample_size.is_some());
        note("generations", self.generations.is_some());
        note("rv-virulence", self.rv_virulence.is_some());
        note("rv-target", self.rv_target.is_some());
        note("ava-alpha", self.ava_alpha.is_some());
        note("ava-mu", self.ava_mu.is_some());
        note("ava-tau", self.ava_tau.is_some());
        note(
            "ava-initial-virulence",
            self.ava_initial_virulence.is_some(),
        );
        note("l", self.l.is_some());
        note("m", self.m.is_some());
        note("beta-host", self.beta_host.is_some());
        note("beta-parasite", self.beta_parasite.is_some());
        note("catalog", self.catalog.is_some());
        note("users", self.users.is_some());
        note("synthetic-users", self.synthetic_users.is_some());
        note("users-seed", self.users_seed.is_some());
        note("user-id", self.user_id.is_some());
        note("p-c", self.p_c.is_some());
        note("p-m", self.p_m.is_some());
        note("diversity-threshold", self.diversity_threshold.is_some());
        set
    }
}
