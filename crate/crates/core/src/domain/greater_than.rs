//! The "greater than" game.
//!
//! A genome is a bit string and its scalar value is its number of ones, but
//! selection only ever sees pairwise comparisons of scalar values. Each
//! population mutates with its own bias `beta`: a mutated bit is redrawn as 1
//! with probability `beta`, so a population left to drift settles around
//! `beta * l` ones.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Direction, Domain, Individual, Role};
use crate::error::{Error, Result};
use crate::rng::TrialRng;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitGenome(Vec<bool>);

impl BitGenome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitGenome(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for BitGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitGenome({self})")
    }
}

impl fmt::Display for BitGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All-zero genome of length `l`.
pub fn init_genome(l: usize) -> BitGenome {
    BitGenome(vec![false; l])
}

pub fn scalar_value(g: &BitGenome) -> usize {
    g.0.iter().filter(|&&b| b).count()
}

/// 1 if `a` has more ones than `b`, 0.5 on a tie, 0 otherwise.
pub fn gt_score(a: &BitGenome, b: &BitGenome) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "cannot compare genomes of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(Direction::Maximize.score(scalar_value(a) as f64, scalar_value(b) as f64))
}

/// Independently for every bit: with probability `m` the bit is redrawn,
/// becoming 1 with probability `beta` and 0 otherwise.
pub fn biased_mutate<R: Rng + ?Sized>(g: &mut BitGenome, m: f64, beta: f64, rng: &mut R) {
    for bit in g.0.iter_mut() {
        if rng.random_bool(m) {
            *bit = rng.random_bool(beta);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtConfig {
    pub length: usize,
    pub mutation_rate: f64,
    pub beta_host: f64,
    pub beta_parasite: f64,
}

impl Default for GtConfig {
    fn default() -> Self {
        GtConfig {
            length: 100,
            mutation_rate: 0.005,
            beta_host: 0.5,
            beta_parasite: 0.5,
        }
    }
}

impl GtConfig {
    pub fn with_bias(beta_host: f64, beta_parasite: f64) -> Self {
        GtConfig {
            beta_host,
            beta_parasite,
            ..GtConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::config("genome length must be at least 1"));
        }
        for (name, v) in [
            ("mutation rate", self.mutation_rate),
            ("host bias", self.beta_host),
            ("parasite bias", self.beta_parasite),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!(
                    "{name} {v} is outside the valid range [0, 1]"
                )));
            }
        }
        Ok(())
    }

    fn beta(&self, role: Role) -> f64 {
        match role {
            Role::Host => self.beta_host,
            Role::Parasite => self.beta_parasite,
        }
    }
}

/// Engine adapter for the game. Asexual: offspring are mutated clones.
#[derive(Clone, Debug)]
pub struct GreaterThan {
    config: GtConfig,
}

impl GreaterThan {
    pub fn new(config: GtConfig) -> Result<Self> {
        config.validate()?;
        Ok(GreaterThan { config })
    }

    pub fn config(&self) -> &GtConfig {
        &self.config
    }
}

impl Domain for GreaterThan {
    type Genome = BitGenome;

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn init_genome(&self, _role: Role, _rng: &mut TrialRng) -> Result<BitGenome> {
        Ok(init_genome(self.config.length))
    }

    fn objective(&self, genome: &BitGenome) -> Result<f64> {
        if genome.len() != self.config.length {
            return Err(Error::Domain(format!(
                "genome length {} does not match configured length {}",
                genome.len(),
                self.config.length
            )));
        }
        Ok(scalar_value(genome) as f64)
    }

    fn direct_fitness(&self, objective: f64) -> f64 {
        objective / self.config.length as f64
    }

    fn offspring(
        &self,
        role: Role,
        parent: &Individual<BitGenome>,
        _population: &[Individual<BitGenome>],
        rng: &mut TrialRng,
    ) -> Result<BitGenome> {
        let mut child = parent.genome.clone();
        biased_mutate(
            &mut child,
            self.config.mutation_rate,
            self.config.beta(role),
            rng,
        );
        Ok(child)
    }

    fn is_optimal(&self, objective: f64) -> bool {
        objective >= self.config.length as f64
    }
}
