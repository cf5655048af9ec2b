//! Turns resolved options into a job description.

use std::path::PathBuf;

use coevo::domain::greater_than::GtConfig;
use coevo::domain::wellbeing::OperatorConfig;
use coevo::experiments::{
    BiasGrid, Condition, DomainSpec, EngineParams, Job, Mitigations, MonthSpec, RunSpec, SweepSpec,
    ThresholdSpec, UserSource, WellbeingSpec, POPULATION_SIZES,
};
use coevo::{RvTarget, Technique};

use crate::options::{DomainName, Options};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "results";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Run,
    Sweep,
    Month,
    Threshold,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Run => "run",
            Kind::Sweep => "sweep",
            Kind::Month => "month",
            Kind::Threshold => "threshold",
        }
    }
}

const ENGINE: [&str; 4] = [
    "population-size",
    "sample-size",
    "generations",
    "log-generations",
];
const MITIGATION: [&str; 6] = [
    "rv-virulence",
    "rv-target",
    "ava-alpha",
    "ava-mu",
    "ava-tau",
    "ava-initial-virulence",
];
const GREATER_THAN: [&str; 4] = ["l", "m", "beta-host", "beta-parasite"];
const WELLBEING: [&str; 7] = [
    "catalog",
    "users",
    "synthetic-users",
    "users-seed",
    "user-id",
    "p-c",
    "p-m",
];

fn allowed(kind: Kind, domain: DomainName) -> Vec<&'static str> {
    let mut a = vec!["domain"];
    a.extend(ENGINE);
    match domain {
        DomainName::GreaterThan => a.extend(GREATER_THAN),
        DomainName::Wellbeing => a.extend(WELLBEING),
    }
    match kind {
        Kind::Run => {
            a.push("mitigation");
            a.extend(MITIGATION);
        }
        Kind::Sweep => {
            a.extend(["techniques", "trials", "full-scale"]);
            a.extend(MITIGATION);
            match domain {
                DomainName::GreaterThan => a.push("grid"),
                DomainName::Wellbeing => a.extend(["sizes", "diversity-threshold"]),
            }
        }
        Kind::Month => {
            a.push("trials");
            a.extend(MITIGATION);
        }
        Kind::Threshold => {
            a.retain(|f| *f != "log-generations");
            a.push("trials");
        }
    }
    a
}

fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| format!("--{flag}: {e}")))
        .collect()
}

fn absolute(p: &PathBuf) -> Result<PathBuf, String> {
    std::path::absolute(p).map_err(|e| format!("cannot resolve {}: {e}", p.display()))
}

fn mitigations(o: &Options) -> Result<Mitigations, String> {
    let mut m = Mitigations::default();
    if let Some(v) = o.rv_virulence {
        m.rv.virulence = v;
    }
    if let Some(t) = &o.rv_target {
        m.rv.target = t.parse::<RvTarget>().map_err(|e| e.to_string())?;
    }
    if let Some(v) = o.ava_alpha {
        m.ava.alpha = v;
    }
    if let Some(v) = o.ava_mu {
        m.ava.mu = v;
    }
    if let Some(v) = o.ava_tau {
        m.ava.tau = v;
    }
    if let Some(v) = o.ava_initial_virulence {
        m.ava.initial_virulence = v;
    }
    m.rv.validate().map_err(|e| e.to_string())?;
    m.ava.validate().map_err(|e| e.to_string())?;
    Ok(m)
}

fn greater_than(o: &Options) -> GtConfig {
    let mut gt = GtConfig::default();
    if let Some(l) = o.l {
        gt.length = l;
    }
    if let Some(m) = o.m {
        gt.mutation_rate = m;
    }
    if let Some(b) = o.beta_host {
        gt.beta_host = b;
    }
    if let Some(b) = o.beta_parasite {
        gt.beta_parasite = b;
    }
    gt
}

fn operator_flags(o: &Options, ops: &mut OperatorConfig) -> Result<(), String> {
    if let Some(p) = o.p_c {
        ops.p_c = p;
    }
    if let Some(p) = o.p_m {
        ops.p_m = p;
    }
    ops.validate().map_err(|e| e.to_string())
}

fn wellbeing(o: &Options) -> Result<WellbeingSpec, String> {
    let users = match (&o.users, o.synthetic_users, o.users_seed) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err("--users cannot be combined with a synthetic pool".into())
        }
        (Some(path), None, None) => UserSource::File {
            path: absolute(path)?,
        },
        (None, count, seed) => {
            let UserSource::Synthetic {
                count: dc,
                seed: ds,
            } = UserSource::default()
            else {
                unreachable!("the default user pool is synthetic")
            };
            UserSource::Synthetic {
                count: count.unwrap_or(dc),
                seed: seed.unwrap_or(ds),
            }
        }
    };
    let mut wb = WellbeingSpec {
        catalog: o.catalog.as_ref().map(absolute).transpose()?,
        users,
        ..WellbeingSpec::default()
    };
    if let Some(id) = o.user_id {
        wb.user_id = id;
    }
    operator_flags(o, &mut wb.operators)?;
    Ok(wb)
}

fn engine(o: &Options, defaults: EngineParams) -> EngineParams {
    EngineParams {
        population_size: o.population_size.unwrap_or(defaults.population_size),
        sample_size: o.sample_size.unwrap_or(defaults.sample_size),
        generations: o.generations.unwrap_or(defaults.generations),
    }
}

/// Built-in engine settings per domain.
fn engine_defaults(domain: DomainName) -> EngineParams {
    match domain {
        DomainName::GreaterThan => EngineParams {
            population_size: 25,
            sample_size: 5,
            generations: 1000,
        },
        DomainName::Wellbeing => EngineParams {
            population_size: 130,
            sample_size: 5,
            generations: 500,
        },
    }
}

/// Builds the job for a data-producing subcommand from resolved options.
pub fn build(kind: Kind, o: &Options) -> Result<Job, String> {
    let domain = match (kind, o.domain) {
        (Kind::Month | Kind::Threshold, Some(DomainName::GreaterThan)) => {
            return Err(format!(
                "`{}` runs on the wellbeing domain only",
                kind.name()
            ))
        }
        (Kind::Month | Kind::Threshold, _) => DomainName::Wellbeing,
        (_, Some(d)) => d,
        (_, None) => DomainName::GreaterThan,
    };
    let allowed = allowed(kind, domain);
    if let Some(flag) = o.set_flags().into_iter().find(|f| !allowed.contains(f)) {
        return Err(format!(
            "--{flag} does not apply to `{}` on the {} domain",
            kind.name(),
            match domain {
                DomainName::GreaterThan => "greater-than",
                DomainName::Wellbeing => "wellbeing",
            }
        ));
    }
    let seed = o.seed.unwrap_or(DEFAULT_SEED);
    let domain_spec = match domain {
        DomainName::GreaterThan => DomainSpec::GreaterThan(greater_than(o)),
        DomainName::Wellbeing => DomainSpec::Wellbeing(wellbeing(o)?),
    };
    match kind {
        Kind::Run => {
            let condition = match &o.mitigation {
                Some(m) => m.parse::<Condition>().map_err(|e| e.to_string())?,
                None => Condition::Coevolution(Technique::Baseline),
            };
            Ok(Job::Run(RunSpec {
                domain: domain_spec,
                condition,
                engine: engine(o, engine_defaults(domain)),
                mitigations: mitigations(o)?,
                seed,
            }))
        }
        Kind::Sweep => {
            let techniques = match &o.techniques {
                Some(t) => parse_list::<Technique>("techniques", t)?,
                None => Technique::ALL.to_vec(),
            };
            let mut spec = match (&domain_spec, domain) {
                (DomainSpec::GreaterThan(gt), _) => {
                    let grid = match &o.grid {
                        Some(g) => g.parse::<BiasGrid>().map_err(|e| e.to_string())?,
                        None if o.full_scale => BiasGrid::Full,
                        None => BiasGrid::Coarse,
                    };
                    let trials = o.trials.unwrap_or(if o.full_scale { 100 } else { 20 });
                    let mut s = SweepSpec::bias(grid, techniques, trials, seed);
                    s.domain = DomainSpec::GreaterThan(*gt);
                    s
                }
                (DomainSpec::Wellbeing(wb), _) => {
                    let sizes = match &o.sizes {
                        Some(s) => parse_list::<usize>("sizes", s)?,
                        None => POPULATION_SIZES.to_vec(),
                    };
                    if o.population_size.is_some() {
                        return Err("use --sizes to set well-being sweep population sizes".into());
                    }
                    let trials = o.trials.unwrap_or(if o.full_scale { 30 } else { 10 });
                    let mut s = SweepSpec::population(wb.clone(), &sizes, techniques, trials, seed);
                    s.diversity_threshold = o.diversity_threshold;
                    s
                }
            };
            spec.engine = engine(o, spec.engine);
            spec.mitigations = mitigations(o)?;
            spec.log_generations = o.log_generations;
            spec.validate().map_err(|e| e.to_string())?;
            Ok(Job::Sweep(spec))
        }
        Kind::Month => {
            let DomainSpec::Wellbeing(wb) = domain_spec else {
                unreachable!("month runs on the wellbeing domain")
            };
            let mut spec = MonthSpec::new(wb, seed);
            operator_flags(o, &mut spec.wellbeing.operators)?;
            spec.engine = engine(o, spec.engine);
            spec.mitigations = mitigations(o)?;
            spec.log_generations = o.log_generations;
            if let Some(t) = o.trials {
                spec.trials = t;
            }
            spec.validate().map_err(|e| e.to_string())?;
            Ok(Job::Month(spec))
        }
        Kind::Threshold => {
            let DomainSpec::Wellbeing(wb) = domain_spec else {
                unreachable!("threshold runs on the wellbeing domain")
            };
            let mut spec = ThresholdSpec::new(wb, seed);
            operator_flags(o, &mut spec.wellbeing.operators)?;
            spec.engine = engine(o, spec.engine);
            if let Some(t) = o.trials {
                spec.trials = t;
            }
            Ok(Job::Threshold(spec))
        }
    }
}
