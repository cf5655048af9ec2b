//! Daily meal-and-exercise recommendations.
//!
//! A plan holds three bundles, each one meal (a main and three sides with
//! gram servings) plus one exercise with a duration. Plans are scored by
//! [`fitness::phi_error`] against one user; lower is better.
//!
//! In coevolution, parasites start from the user's preferences and hosts
//! start at random, which hands parasites a large initial advantage.

pub mod catalog;
pub mod fitness;
pub mod operators;
pub mod plan;
pub mod user;

use std::sync::Arc;

use rand::Rng;

pub use catalog::{
    load_catalog, Catalog, ExerciseItem, FoodCategory, FoodItem, Intensity, MealSlot,
};
pub use fitness::{
    cd_error, compare_error, diversity_error, ea_error, hf_error, phi_error, psi_error,
    WellbeingFitness, ACCEPTABLE_ERROR, MONTH_DAYS,
};
pub use operators::{
    cf_mutate, crossover, init_host, init_parasite, OperatorConfig, Sampling, ServingGrid,
};
pub use plan::{Activity, Bundle, PlanSlot, Portion, SlotKind, WellbeingPlan};
pub use user::{
    generate_synthetic_users, load_users, micro_users, nearest_neighbour, Goal, GoalFactors,
    UserProfile,
};

use crate::engine::{Direction, Domain, Individual, Role};
use crate::error::Result;
use crate::rng::TrialRng;

/// Engine adapter recommending plans for one user.
#[derive(Clone, Debug)]
pub struct WellbeingDomain {
    catalog: Arc<Catalog>,
    user: UserProfile,
    neighbour: UserProfile,
    operators: OperatorConfig,
    sampling: Sampling,
}

impl WellbeingDomain {
    /// `pool` supplies the collaborative-filtering neighbour and must hold
    /// at least one user other than `user`.
    pub fn new(
        catalog: Arc<Catalog>,
        user: UserProfile,
        pool: &[UserProfile],
        operators: OperatorConfig,
        sampling: Sampling,
    ) -> Result<Self> {
        user.validate()?;
        operators.validate()?;
        sampling.validate()?;
        let neighbour = nearest_neighbour(&user, pool)?.clone();
        Ok(WellbeingDomain {
            catalog,
            user,
            neighbour,
            operators,
            sampling,
        })
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn user(&self) -> &UserProfile {
        &self.user
    }

    pub fn neighbour(&self) -> &UserProfile {
        &self.neighbour
    }

    pub fn fitness(&self, plan: &WellbeingPlan) -> Result<WellbeingFitness> {
        fitness::phi_error_with(plan, &self.user, &self.catalog, &self.sampling.factors)
    }
}

impl Domain for WellbeingDomain {
    type Genome = WellbeingPlan;

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn init_genome(&self, role: Role, rng: &mut TrialRng) -> Result<WellbeingPlan> {
        match role {
            Role::Host => init_host(&self.catalog, &self.sampling, rng),
            Role::Parasite => init_parasite(&self.user, &self.catalog, &self.sampling, rng),
        }
    }

    fn init_single(&self, rng: &mut TrialRng) -> Result<WellbeingPlan> {
        init_parasite(&self.user, &self.catalog, &self.sampling, rng)
    }

    fn objective(&self, genome: &WellbeingPlan) -> Result<f64> {
        Ok(self.fitness(genome)?.phi)
    }

    fn score(&self, own: f64, opponent: f64) -> f64 {
        compare_error(own, opponent)
    }

    fn direct_fitness(&self, objective: f64) -> f64 {
        (1.0 - objective).clamp(0.0, 1.0)
    }

    fn offspring(
        &self,
        _role: Role,
        parent: &Individual<WellbeingPlan>,
        population: &[Individual<WellbeingPlan>],
        rng: &mut TrialRng,
    ) -> Result<WellbeingPlan> {
        let mut child = parent.genome;
        if rng.random_bool(self.operators.p_c) {
            let mate = &population[rng.random_range(0..population.len())].genome;
            operators::inject_bundles(&mut child, mate, &self.operators, rng);
        }
        if rng.random_bool(self.operators.p_m) {
            operators::mutate_slot(
                &mut child,
                &self.neighbour,
                &self.catalog,
                &self.sampling,
                rng,
            )?;
        }
        Ok(child)
    }

    /// A plan at or below the acceptable error counts as optimal.
    fn is_optimal(&self, objective: f64) -> bool {
        objective <= ACCEPTABLE_ERROR
    }
}
