//! Disengagement mitigation: psi and genome transforms applied between
//! competitive evaluation and selection.
//!
//! * Reduced virulence (RV) reshapes a population's subjective fitness with
//!   `f(x, v) = 2x/v - x²/v²`, so that for `v < 1` individuals winning a
//!   fraction `v` of their competitions are rewarded most.
//! * Autonomous virulence adaptation (AVA) learns `v` online for each
//!   population from its mean subjective score.
//! * Substitution of the fittest (SF) fires whenever the engagement gap
//!   `delta` grows: the losing population copies its best over its worst
//!   and gains `delta` fitness, the winning population copies its worst over
//!   its best and loses `delta`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{compute_delta, Individual, Population};
use crate::error::{Error, Result};

pub const MIN_VIRULENCE: f64 = 0.5;
pub const MAX_VIRULENCE: f64 = 1.0;

/// Which population(s) a fixed reduced-virulence transform applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RvTarget {
    Host,
    Parasite,
    Both,
}

impl FromStr for RvTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "host" => Ok(RvTarget::Host),
            "parasite" => Ok(RvTarget::Parasite),
            "both" => Ok(RvTarget::Both),
            other => Err(Error::config(format!(
                "unknown RV target `{other}` (expected host, parasite or both)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RvConfig {
    pub virulence: f64,
    pub target: RvTarget,
}

impl Default for RvConfig {
    fn default() -> Self {
        RvConfig {
            virulence: 0.75,
            target: RvTarget::Parasite,
        }
    }
}

impl RvConfig {
    pub fn validate(&self) -> Result<()> {
        check_virulence(self.virulence)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvaConfig {
    pub alpha: f64,
    pub mu: f64,
    pub tau: f64,
    pub initial_virulence: f64,
}

impl Default for AvaConfig {
    fn default() -> Self {
        AvaConfig {
            alpha: 0.0125,
            mu: 0.3,
            tau: 0.56,
            initial_virulence: 0.75,
        }
    }
}

impl AvaConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("mu", self.mu), ("tau", self.tau)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!(
                    "AVA {name} = {v} is outside the valid range [0, 1]"
                )));
            }
        }
        check_virulence(self.initial_virulence)
    }
}

fn check_virulence(v: f64) -> Result<()> {
    if (MIN_VIRULENCE..=MAX_VIRULENCE).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "virulence {v} is outside the valid range [0.5, 1.0]"
        )))
    }
}

/// A configured mitigation strategy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Baseline,
    Rv(RvConfig),
    Ava(AvaConfig),
    Sf,
}

impl Strategy {
    pub fn validate(&self) -> Result<()> {
        match self {
            Strategy::Baseline | Strategy::Sf => Ok(()),
            Strategy::Rv(cfg) => cfg.validate(),
            Strategy::Ava(cfg) => cfg.validate(),
        }
    }

    pub fn technique(&self) -> Technique {
        match self {
            Strategy::Baseline => Technique::Baseline,
            Strategy::Rv(_) => Technique::Rv,
            Strategy::Ava(_) => Technique::Ava,
            Strategy::Sf => Technique::Sf,
        }
    }
}

/// Strategy name without parameters, as used on the command line and in
/// result tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    Baseline,
    Rv,
    Ava,
    Sf,
}

impl Technique {
    pub const ALL: [Technique; 4] = [
        Technique::Baseline,
        Technique::Rv,
        Technique::Ava,
        Technique::Sf,
    ];

    /// Stable numeric key used when deriving per-trial seeds.
    pub fn code(self) -> u64 {
        match self {
            Technique::Baseline => 0,
            Technique::Rv => 1,
            Technique::Ava => 2,
            Technique::Sf => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Baseline => "baseline",
            Technique::Rv => "rv",
            Technique::Ava => "ava",
            Technique::Sf => "sf",
        }
    }

    pub fn strategy(self, rv: RvConfig, ava: AvaConfig) -> Strategy {
        match self {
            Technique::Baseline => Strategy::Baseline,
            Technique::Rv => Strategy::Rv(rv),
            Technique::Ava => Strategy::Ava(ava),
            Technique::Sf => Strategy::Sf,
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "baseline" => Ok(Technique::Baseline),
            "rv" => Ok(Technique::Rv),
            "ava" => Ok(Technique::Ava),
            "sf" => Ok(Technique::Sf),
            other => Err(Error::config(format!(
                "unknown mitigation `{other}` (expected baseline, rv, ava or sf)"
            ))),
        }
    }
}

/// Reduced-virulence reward `2x/v - x²/v²`, clipped to [0, 1].
pub fn rv_transform(x: f64, virulence: f64) -> Result<f64> {
    check_virulence(virulence)?;
    let r = x / virulence;
    Ok((2.0 * r - r * r).clamp(0.0, 1.0))
}

/// Per-population AVA learner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvaState {
    pub alpha: f64,
    pub mu: f64,
    pub tau: f64,
    pub virulence: f64,
    /// Last step applied to the virulence (signed).
    pub prev_step: f64,
}

impl AvaState {
    pub fn new(cfg: &AvaConfig) -> Self {
        AvaState {
            alpha: cfg.alpha,
            mu: cfg.mu,
            tau: cfg.tau,
            virulence: cfg.initial_virulence,
            prev_step: 0.0,
        }
    }

    /// Applies one update from the population's mean subjective score at
    /// generation `t` (counted from 1). During the first four generations the
    /// step is `(0.5 - mean)/t`, which lets virulence jump to either bound
    /// before the momentum rule takes over.
    pub fn update(&mut self, mean_score: f64, t: usize) {
        let t = t.max(1);
        let step = if t < 5 {
            (0.5 - mean_score) / t as f64
        } else {
            self.mu * self.prev_step + self.alpha * (1.0 - self.mu) * (self.tau - mean_score)
        };
        self.virulence = (self.virulence + step).clamp(MIN_VIRULENCE, MAX_VIRULENCE);
        self.prev_step = step;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SfState {
    pub delta_prev: f64,
    pub kappa_last: usize,
}

/// Number of individuals SF substitutes: `ceil(n * delta^(1/delta))`, with
/// the limit value 0 at `delta = 0`.
///
/// For small `delta` the power underflows to 0.0 although the exact value is
/// positive, so the ceiling is taken as at least 1.
pub fn sf_kappa(n: usize, delta: f64) -> usize {
    if delta <= 0.0 || n == 0 {
        return 0;
    }
    let frac = delta.min(1.0).powf(1.0 / delta.min(1.0));
    ((n as f64 * frac).ceil() as usize).clamp(1, n)
}

/// Indices ordered from worst to best psi, ties by member index.
fn ranked_ascending<G>(members: &[Individual<G>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..members.len()).collect();
    idx.sort_by(|&a, &b| members[a].psi.total_cmp(&members[b].psi).then(a.cmp(&b)));
    idx
}

/// Substitution of the fittest on a losing (`low`) and a winning (`high`)
/// population.
///
/// Both substitutions read from a snapshot taken before any copy, so the
/// i-th worst of `low` becomes the i-th best of the snapshot and vice versa
/// for `high`, even when `kappa > n/2` and the two ranges overlap. Copies
/// carry the source psi; the `+delta` / `-delta` shift is applied afterwards.
pub fn sf_apply<G: Clone>(
    low: &mut [Individual<G>],
    high: &mut [Individual<G>],
    delta: f64,
    kappa: usize,
) {
    substitute(low, kappa, true);
    for ind in low.iter_mut() {
        ind.psi = (ind.psi + delta).min(1.0);
    }
    substitute(high, kappa, false);
    for ind in high.iter_mut() {
        ind.psi = (ind.psi - delta).max(0.0);
    }
}

fn substitute<G: Clone>(members: &mut [Individual<G>], kappa: usize, best_over_worst: bool) {
    let n = members.len();
    let kappa = kappa.min(n);
    if kappa == 0 {
        return;
    }
    let asc = ranked_ascending(members);
    let snapshot: Vec<Individual<G>> = members.to_vec();
    for i in 0..kappa {
        let worst = asc[i];
        let best = asc[n - 1 - i];
        if best_over_worst {
            members[worst] = snapshot[best].clone();
        } else {
            members[best] = snapshot[worst].clone();
        }
    }
}

/// What a mitigation step did, for the generation statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MitigationReport {
    pub kappa: usize,
    pub virulence_host: f64,
    pub virulence_parasite: f64,
}

#[derive(Clone, Debug)]
enum State {
    Stateless,
    Ava { host: AvaState, parasite: AvaState },
    Sf(SfState),
}

/// A strategy together with the per-population state it carries across
/// generations. One instance belongs to exactly one trial.
#[derive(Clone, Debug)]
pub struct Mitigation {
    strategy: Strategy,
    state: State,
}

impl Mitigation {
    pub fn new(strategy: Strategy) -> Result<Self> {
        strategy.validate()?;
        let state = match &strategy {
            Strategy::Ava(cfg) => State::Ava {
                host: AvaState::new(cfg),
                parasite: AvaState::new(cfg),
            },
            Strategy::Sf => State::Sf(SfState::default()),
            _ => State::Stateless,
        };
        Ok(Mitigation { strategy, state })
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn sf_state(&self) -> Option<&SfState> {
        match &self.state {
            State::Sf(s) => Some(s),
            _ => None,
        }
    }

    pub fn ava_states(&self) -> Option<(&AvaState, &AvaState)> {
        match &self.state {
            State::Ava { host, parasite } => Some((host, parasite)),
            _ => None,
        }
    }

    /// Transforms freshly evaluated populations in place. `generation` is
    /// zero-based; sigmas on entry are the raw competition means.
    pub fn apply<G: Clone>(
        &mut self,
        host: &mut Population<G>,
        parasite: &mut Population<G>,
        generation: usize,
    ) -> MitigationReport {
        let mut report = MitigationReport {
            kappa: 0,
            virulence_host: 1.0,
            virulence_parasite: 1.0,
        };
        match (&self.strategy, &mut self.state) {
            (Strategy::Baseline, _) => {}
            (Strategy::Rv(cfg), _) => {
                let v = cfg.virulence;
                if matches!(cfg.target, RvTarget::Host | RvTarget::Both) {
                    reshape(host, v);
                    report.virulence_host = v;
                }
                if matches!(cfg.target, RvTarget::Parasite | RvTarget::Both) {
                    reshape(parasite, v);
                    report.virulence_parasite = v;
                }
            }
            (
                Strategy::Ava(_),
                State::Ava {
                    host: hs,
                    parasite: ps,
                },
            ) => {
                let t = generation + 1;
                hs.update(host.sigma(), t);
                ps.update(parasite.sigma(), t);
                reshape(host, hs.virulence);
                reshape(parasite, ps.virulence);
                report.virulence_host = hs.virulence;
                report.virulence_parasite = ps.virulence;
            }
            (Strategy::Sf, State::Sf(sf)) => {
                let delta = compute_delta(host.sigma(), parasite.sigma());
                sf.kappa_last = 0;
                if delta > sf.delta_prev {
                    let n = host.len().min(parasite.len());
                    let kappa = sf_kappa(n, delta);
                    if host.sigma() <= parasite.sigma() {
                        sf_apply(host.members_mut(), parasite.members_mut(), delta, kappa);
                    } else {
                        sf_apply(parasite.members_mut(), host.members_mut(), delta, kappa);
                    }
                    host.refresh_sigma();
                    parasite.refresh_sigma();
                    sf.kappa_last = kappa;
                }
                sf.delta_prev = delta;
                report.kappa = sf.kappa_last;
            }
            _ => unreachable!("mitigation state does not match its strategy"),
        }
        report
    }
}

fn reshape<G>(pop: &mut Population<G>, virulence: f64) {
    for ind in pop.members_mut() {
        // virulence is validated at construction or clamped by AVA
        ind.psi = rv_transform(ind.psi, virulence).unwrap_or(ind.psi);
    }
    pop.refresh_sigma();
}
