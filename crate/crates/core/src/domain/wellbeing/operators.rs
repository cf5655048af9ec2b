//! Plan initialization and variation operators.
//!
//! Parasite-style (canonical) initialization samples items the user can eat
//! and is allowed to do, weighted by the user's ratings, and sizes each
//! serving so the meal's expected energy matches the user's meal target.
//! Host-style initialization ignores the user entirely.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::catalog::{Catalog, FoodItem, MealSlot};
use super::fitness::{MAX_SERVING_G, MIN_SERVING_G};
use super::plan::{Activity, Bundle, PlanSlot, Portion, SlotKind, WellbeingPlan, SLOTS_PER_PLAN};
use super::user::{nearest_neighbour, GoalFactors, UserProfile};
use crate::error::{Error, Result};

/// Share of the meal energy target assigned to the main food; each side
/// gets `SIDE_KCAL_SHARE`. Four slots sum to 1.
pub const MAIN_KCAL_SHARE: f64 = 0.4;
pub const SIDE_KCAL_SHARE: f64 = 0.2;
pub const MIN_HOST_MINUTES: f64 = 10.0;
pub const MAX_HOST_MINUTES: f64 = 180.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    /// Crossover probability per child.
    pub p_c: f64,
    /// Mutation probability per child.
    pub p_m: f64,
    /// Injection probability per bundle once crossover happens.
    pub p_b: f64,
    pub inject_main: f64,
    pub inject_side: f64,
    pub inject_exercise: f64,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        OperatorConfig::coevolution()
    }
}

impl OperatorConfig {
    pub fn coevolution() -> Self {
        OperatorConfig {
            p_c: 0.8,
            p_m: 0.1,
            p_b: 0.9,
            inject_main: 0.2,
            inject_side: 0.6,
            inject_exercise: 0.2,
        }
    }

    /// Settings of the deployed single-user recommender.
    pub fn web() -> Self {
        OperatorConfig {
            p_c: 0.6,
            ..OperatorConfig::coevolution()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_c", self.p_c),
            ("p_m", self.p_m),
            ("p_b", self.p_b),
            ("inject_main", self.inject_main),
            ("inject_side", self.inject_side),
            ("inject_exercise", self.inject_exercise),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        let split = self.inject_main + self.inject_side + self.inject_exercise;
        if (split - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "injection split must sum to 1, got {split}"
            )));
        }
        Ok(())
    }
}

/// Discrete serving sizes and durations. When set, every serving and
/// duration drawn by the operators is picked uniformly from these values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServingGrid {
    pub grams: Vec<f64>,
    pub minutes: Vec<f64>,
}

/// How servings and durations are drawn.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub factors: GoalFactors,
    pub grid: Option<ServingGrid>,
}

impl Sampling {
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.grid {
            if g.grams.is_empty() || g.minutes.is_empty() {
                return Err(Error::config(
                    "serving grid needs at least one value per axis",
                ));
            }
            if g.grams
                .iter()
                .chain(&g.minutes)
                .any(|v| v.is_nan() || *v <= 0.0)
            {
                return Err(Error::config("serving grid values must be positive"));
            }
        }
        Ok(())
    }

    fn kcal_share(kind: SlotKind) -> f64 {
        match kind {
            SlotKind::Main => MAIN_KCAL_SHARE,
            _ => SIDE_KCAL_SHARE,
        }
    }

    /// Serving of `item` in slot `kind` sized for `user`'s meal target.
    fn tailored_grams<R: Rng + ?Sized>(
        &self,
        item: &FoodItem,
        kind: SlotKind,
        user: &UserProfile,
        rng: &mut R,
    ) -> f64 {
        if let Some(g) = &self.grid {
            return *g.grams.choose(rng).expect("validated non-empty");
        }
        let kcal = Self::kcal_share(kind)
            * user.meal_kcal_target(&self.factors)
            * rng.random_range(0.8..=1.2);
        let density = item.kcal_per_gram();
        if density > 0.0 {
            kcal / density
        } else {
            item.serving_g
        }
    }

    fn tailored_minutes<R: Rng + ?Sized>(&self, user: &UserProfile, rng: &mut R) -> f64 {
        match &self.grid {
            Some(g) => *g.minutes.choose(rng).expect("validated non-empty"),
            None => user.session_minutes * rng.random_range(0.8..=1.2),
        }
    }

    fn random_grams<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.grid {
            Some(g) => *g.grams.choose(rng).expect("validated non-empty"),
            None => rng.random_range(MIN_SERVING_G..=MAX_SERVING_G),
        }
    }

    fn random_minutes<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.grid {
            Some(g) => *g.minutes.choose(rng).expect("validated non-empty"),
            None => rng.random_range(MIN_HOST_MINUTES..=MAX_HOST_MINUTES),
        }
    }
}

/// Items a user may be offered for one slot type, with sampling weights.
struct Menu<'c> {
    items: Vec<&'c FoodItem>,
    weights: WeightedIndex<f64>,
}

impl<'c> Menu<'c> {
    fn for_user(catalog: &'c Catalog, slot: MealSlot, user: &UserProfile) -> Result<Self> {
        let items: Vec<&FoodItem> = catalog
            .foods_for(slot)
            .filter(|f| user.admits_food(f) && user.food_rating(f.category) > 0.0)
            .collect();
        let weights = WeightedIndex::new(items.iter().map(|f| user.food_rating(f.category)))
            .map_err(|_| {
                Error::Init(format!(
                    "no admissible {slot} food for user {} in the catalog",
                    user.id
                ))
            })?;
        Ok(Menu { items, weights })
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> &'c FoodItem {
        self.items[self.weights.sample(rng)]
    }
}

struct ExerciseMenu {
    ids: Vec<u32>,
    weights: WeightedIndex<f64>,
}

impl ExerciseMenu {
    fn for_user(catalog: &Catalog, user: &UserProfile) -> Result<Self> {
        let ids: Vec<u32> = catalog
            .exercises()
            .iter()
            .map(|e| e.id)
            .filter(|&id| user.allows_exercise(id) && user.exercise_rating(id) > 0.0)
            .collect();
        let weights =
            WeightedIndex::new(ids.iter().map(|&id| user.exercise_rating(id))).map_err(|_| {
                Error::Init(format!(
                    "no admissible exercise for user {} in the catalog",
                    user.id
                ))
            })?;
        Ok(ExerciseMenu { ids, weights })
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.ids[self.weights.sample(rng)]
    }
}

/// Canonical initialization from the user's diet, preferences and energy
/// needs.
pub fn init_parasite<R: Rng + ?Sized>(
    user: &UserProfile,
    catalog: &Catalog,
    sampling: &Sampling,
    rng: &mut R,
) -> Result<WellbeingPlan> {
    let mains = Menu::for_user(catalog, MealSlot::Main, user)?;
    let sides = Menu::for_user(catalog, MealSlot::Side, user)?;
    let exercises = ExerciseMenu::for_user(catalog, user)?;
    let portion = |menu: &Menu, kind: SlotKind, rng: &mut R| {
        let item = menu.pick(rng);
        Portion {
            food: item.id,
            grams: sampling.tailored_grams(item, kind, user, rng),
        }
    };
    let bundle = |rng: &mut R| Bundle {
        main: portion(&mains, SlotKind::Main, rng),
        sides: [
            portion(&sides, SlotKind::Side(0), rng),
            portion(&sides, SlotKind::Side(1), rng),
            portion(&sides, SlotKind::Side(2), rng),
        ],
        exercise: Activity {
            exercise: exercises.pick(rng),
            minutes: sampling.tailored_minutes(user, rng),
        },
    };
    Ok(WellbeingPlan {
        bundles: [bundle(rng), bundle(rng), bundle(rng)],
    })
}

/// Random initialization, uniform over the catalog, independent of any user.
pub fn init_host<R: Rng + ?Sized>(
    catalog: &Catalog,
    sampling: &Sampling,
    rng: &mut R,
) -> Result<WellbeingPlan> {
    let mains: Vec<u32> = catalog.foods_for(MealSlot::Main).map(|f| f.id).collect();
    let sides: Vec<u32> = catalog.foods_for(MealSlot::Side).map(|f| f.id).collect();
    let exercises: Vec<u32> = catalog.exercises().iter().map(|e| e.id).collect();
    if mains.is_empty() || sides.is_empty() || exercises.is_empty() {
        return Err(Error::Init(
            "catalog needs at least one main, one side and one exercise".into(),
        ));
    }
    let portion = |ids: &[u32], rng: &mut R| Portion {
        food: *ids.choose(rng).expect("non-empty"),
        grams: sampling.random_grams(rng),
    };
    let bundle = |rng: &mut R| Bundle {
        main: portion(&mains, rng),
        sides: [
            portion(&sides, rng),
            portion(&sides, rng),
            portion(&sides, rng),
        ],
        exercise: Activity {
            exercise: *exercises.choose(rng).expect("non-empty"),
            minutes: sampling.random_minutes(rng),
        },
    };
    Ok(WellbeingPlan {
        bundles: [bundle(rng), bundle(rng), bundle(rng)],
    })
}

/// Per-bundle injection from `other` into `child`, without the crossover
/// roll. Returns the injected position of each bundle, if any.
pub fn inject_bundles<R: Rng + ?Sized>(
    child: &mut WellbeingPlan,
    other: &WellbeingPlan,
    cfg: &OperatorConfig,
    rng: &mut R,
) -> [Option<SlotKind>; 3] {
    let mut injected = [None; 3];
    for (k, slot) in injected.iter_mut().enumerate() {
        if !rng.random_bool(cfg.p_b) {
            continue;
        }
        let u: f64 = rng.random();
        let kind = if u < cfg.inject_main {
            SlotKind::Main
        } else if u < cfg.inject_main + cfg.inject_side {
            SlotKind::Side(rng.random_range(0..3))
        } else {
            SlotKind::Exercise
        };
        let (dst, src) = (&mut child.bundles[k], &other.bundles[k]);
        match kind {
            SlotKind::Main => dst.main = src.main,
            SlotKind::Side(j) => dst.sides[j] = src.sides[j],
            SlotKind::Exercise => dst.exercise = src.exercise,
        }
        *slot = Some(kind);
    }
    injected
}

/// Crossover: with probability `p_c`, inject items of `other` into `child`
/// bundle by bundle.
pub fn crossover<R: Rng + ?Sized>(
    child: &mut WellbeingPlan,
    other: &WellbeingPlan,
    cfg: &OperatorConfig,
    rng: &mut R,
) -> Option<[Option<SlotKind>; 3]> {
    rng.random_bool(cfg.p_c)
        .then(|| inject_bundles(child, other, cfg, rng))
}

/// Replaces one uniformly chosen slot with an item drawn from the
/// neighbour's preferences, sized for the neighbour's profile. Does not roll
/// the mutation probability.
pub fn mutate_slot<R: Rng + ?Sized>(
    child: &mut WellbeingPlan,
    neighbour: &UserProfile,
    catalog: &Catalog,
    sampling: &Sampling,
    rng: &mut R,
) -> Result<PlanSlot> {
    let slot = PlanSlot::from_index(rng.random_range(0..SLOTS_PER_PLAN));
    let bundle = &mut child.bundles[slot.bundle];
    match slot.kind {
        SlotKind::Exercise => {
            let menu = ExerciseMenu::for_user(catalog, neighbour)?;
            bundle.exercise = Activity {
                exercise: menu.pick(rng),
                minutes: sampling.tailored_minutes(neighbour, rng),
            };
        }
        kind => {
            let meal_slot = if kind == SlotKind::Main {
                MealSlot::Main
            } else {
                MealSlot::Side
            };
            let item = Menu::for_user(catalog, meal_slot, neighbour)?.pick(rng);
            let portion = Portion {
                food: item.id,
                grams: sampling.tailored_grams(item, kind, neighbour, rng),
            };
            match kind {
                SlotKind::Main => bundle.main = portion,
                SlotKind::Side(j) => bundle.sides[j] = portion,
                SlotKind::Exercise => unreachable!(),
            }
        }
    }
    Ok(slot)
}

/// Collaborative-filtering mutation: with probability `p_m`, finds `user`'s
/// nearest neighbour in `pool` and applies [`mutate_slot`] with it.
pub fn cf_mutate<R: Rng + ?Sized>(
    child: &mut WellbeingPlan,
    user: &UserProfile,
    pool: &[UserProfile],
    catalog: &Catalog,
    cfg: &OperatorConfig,
    sampling: &Sampling,
    rng: &mut R,
) -> Result<Option<PlanSlot>> {
    let neighbour = nearest_neighbour(user, pool)?;
    if !rng.random_bool(cfg.p_m) {
        return Ok(None);
    }
    mutate_slot(child, neighbour, catalog, sampling, rng).map(Some)
}
