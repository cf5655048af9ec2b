//! Plan error: the mean of four component errors, each in [0, 1].
//!
//! * `hf`: nutrition of each meal against the user's per-meal targets;
//! * `ea`: recommended exercise time against the user's usual session;
//! * `cd`: repetition and serving proportionality across the plan;
//! * `psi_pref`: how much the user likes the recommended items.
//!
//! Per-meal targets, for a meal energy target `C` kcal: energy `C`; protein
//! 15 % and carbohydrate 50 % of `C` at 4 kcal/g; fat 35 % at 9 kcal/g;
//! saturated fat at most 11 % (9 kcal/g); sugar at most 5 % (4 kcal/g);
//! fibre at least 10 g; sodium at most 0.8 g.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::catalog::{Catalog, FoodCategory};
use super::plan::{Bundle, WellbeingPlan, BUNDLES_PER_PLAN, FOOD_SLOTS_PER_PLAN, SLOTS_PER_PLAN};
use super::user::{GoalFactors, UserProfile};
use crate::error::{Error, Result};

/// Highest plan error considered an acceptable recommendation.
pub const ACCEPTABLE_ERROR: f64 = 0.33;
/// Number of daily plans in a month of recommendations.
pub const MONTH_DAYS: usize = 28;
pub const MIN_SERVING_G: f64 = 10.0;
pub const MAX_SERVING_G: f64 = 500.0;
pub const MIN_FIBRE_G: f64 = 10.0;
pub const MAX_SODIUM_G: f64 = 0.8;

const PROTEIN_SHARE: f64 = 0.15;
const CARB_SHARE: f64 = 0.50;
const FAT_SHARE: f64 = 0.35;
const SATFAT_CAP_SHARE: f64 = 0.11;
const SUGAR_CAP_SHARE: f64 = 0.05;
const KCAL_PER_G_PROTEIN: f64 = 4.0;
const KCAL_PER_G_CARB: f64 = 4.0;
const KCAL_PER_G_FAT: f64 = 9.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellbeingFitness {
    pub hf: f64,
    pub ea: f64,
    pub cd: f64,
    pub psi_pref: f64,
    pub phi: f64,
}

impl WellbeingFitness {
    pub fn from_components(hf: f64, ea: f64, cd: f64, psi_pref: f64) -> Self {
        WellbeingFitness {
            hf,
            ea,
            cd,
            psi_pref,
            phi: (hf + ea + cd + psi_pref) / 4.0,
        }
    }
}

fn deviation(actual: f64, target: f64) -> f64 {
    ((actual - target).abs() / target).min(1.0)
}

fn excess(actual: f64, cap: f64) -> f64 {
    if actual <= cap {
        0.0
    } else {
        ((actual - cap) / cap).min(1.0)
    }
}

fn shortfall(actual: f64, floor: f64) -> f64 {
    if actual >= floor {
        0.0
    } else {
        ((floor - actual) / floor).min(1.0)
    }
}

/// Summed nutrients of one meal.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MealNutrients {
    pub kcal: f64,
    pub protein_g: f64,
    pub carbs_g: f64,
    pub sugar_g: f64,
    pub fibre_g: f64,
    pub fat_g: f64,
    pub satfat_g: f64,
    pub sodium_g: f64,
}

impl MealNutrients {
    pub fn of(bundle: &Bundle, catalog: &Catalog) -> Result<Self> {
        let mut n = MealNutrients::default();
        for p in bundle.portions() {
            let f = catalog.food(p.food)?;
            let k = p.grams / f.serving_g;
            n.kcal += k * f.kcal_per_serving;
            n.protein_g += k * f.protein_g;
            n.carbs_g += k * f.carbs_g;
            n.sugar_g += k * f.sugar_g;
            n.fibre_g += k * f.fibre_g;
            n.fat_g += k * f.fat_g;
            n.satfat_g += k * f.satfat_g;
            n.sodium_g += k * f.sodium_g;
        }
        Ok(n)
    }

    /// The eight healthy-food terms against a meal energy target.
    pub fn terms(&self, meal_kcal: f64) -> [f64; 8] {
        let c = meal_kcal;
        [
            deviation(self.kcal, c),
            deviation(self.protein_g, PROTEIN_SHARE * c / KCAL_PER_G_PROTEIN),
            deviation(self.carbs_g, CARB_SHARE * c / KCAL_PER_G_CARB),
            deviation(self.fat_g, FAT_SHARE * c / KCAL_PER_G_FAT),
            excess(self.satfat_g, SATFAT_CAP_SHARE * c / KCAL_PER_G_FAT),
            excess(self.sugar_g, SUGAR_CAP_SHARE * c / KCAL_PER_G_CARB),
            shortfall(self.fibre_g, MIN_FIBRE_G),
            excess(self.sodium_g, MAX_SODIUM_G),
        ]
    }
}

/// Healthy-food error of one meal with explicit goal factors.
pub fn hf_error_with(
    bundle: &Bundle,
    user: &UserProfile,
    catalog: &Catalog,
    factors: &GoalFactors,
) -> Result<f64> {
    let terms = MealNutrients::of(bundle, catalog)?.terms(user.meal_kcal_target(factors));
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

pub fn hf_error(bundle: &Bundle, user: &UserProfile, catalog: &Catalog) -> Result<f64> {
    hf_error_with(bundle, user, catalog, &GoalFactors::default())
}

/// Relative mismatch between recommended and usual exercise time, capped at 1.
pub fn ea_error(bundle: &Bundle, user: &UserProfile) -> f64 {
    ((bundle.exercise.minutes - user.session_minutes).abs() / user.session_minutes).min(1.0)
}

fn population_cv(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return 1.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Proportionality error of one meal: the coefficient of variation of its
/// servings (capped at 1), or 1 if any serving is outside [10 g, 500 g].
pub fn meal_proportionality(bundle: &Bundle) -> f64 {
    let grams: Vec<f64> = bundle.portions().map(|p| p.grams).collect();
    if grams
        .iter()
        .any(|g| !(MIN_SERVING_G..=MAX_SERVING_G).contains(g))
    {
        1.0
    } else {
        population_cv(&grams).min(1.0)
    }
}

/// Consistency-and-diversity error: mean of item repetition, category
/// repetition, serving proportionality and exercise repetition.
pub fn cd_error(plan: &WellbeingPlan, catalog: &Catalog) -> Result<f64> {
    let mut items = HashSet::with_capacity(FOOD_SLOTS_PER_PLAN);
    let mut categories = HashSet::with_capacity(FoodCategory::COUNT);
    for p in plan.portions() {
        items.insert(p.food);
        categories.insert(catalog.food(p.food)?.category);
    }
    let exercises: HashSet<u32> = plan
        .activities()
        .map(|a| catalog.exercise(a.exercise).map(|e| e.id))
        .collect::<Result<_>>()?;

    let item_rep = 1.0 - items.len() as f64 / FOOD_SLOTS_PER_PLAN as f64;
    let cat_rep =
        1.0 - categories.len() as f64 / FOOD_SLOTS_PER_PLAN.min(FoodCategory::COUNT) as f64;
    let proportion =
        plan.bundles.iter().map(meal_proportionality).sum::<f64>() / BUNDLES_PER_PLAN as f64;
    let ex_rep = 1.0 - exercises.len() as f64 / BUNDLES_PER_PLAN as f64;
    Ok((item_rep + cat_rep + proportion + ex_rep) / 4.0)
}

/// Preference error: one minus the mean likeability of all fifteen slots.
/// Items the user's diet excludes, and disallowed exercises, count as 0.
pub fn psi_error(plan: &WellbeingPlan, user: &UserProfile, catalog: &Catalog) -> Result<f64> {
    let mut total = 0.0;
    for p in plan.portions() {
        let f = catalog.food(p.food)?;
        if user.admits_food(f) {
            total += user.food_rating(f.category);
        }
    }
    for a in plan.activities() {
        let e = catalog.exercise(a.exercise)?;
        if user.allows_exercise(e.id) {
            total += user.exercise_rating(e.id);
        }
    }
    Ok(1.0 - total / SLOTS_PER_PLAN as f64)
}

pub fn phi_error_with(
    plan: &WellbeingPlan,
    user: &UserProfile,
    catalog: &Catalog,
    factors: &GoalFactors,
) -> Result<WellbeingFitness> {
    let mut hf = 0.0;
    let mut ea = 0.0;
    for b in &plan.bundles {
        hf += hf_error_with(b, user, catalog, factors)?;
        ea += ea_error(b, user);
    }
    let n = BUNDLES_PER_PLAN as f64;
    Ok(WellbeingFitness::from_components(
        hf / n,
        ea / n,
        cd_error(plan, catalog)?,
        psi_error(plan, user, catalog)?,
    ))
}

/// Plan error with the default goal factors.
pub fn phi_error(
    plan: &WellbeingPlan,
    user: &UserProfile,
    catalog: &Catalog,
) -> Result<WellbeingFitness> {
    phi_error_with(plan, user, catalog, &GoalFactors::default())
}

/// Competition score of a host with error `phi_h` against a parasite with
/// error `phi_p`: the lower error wins.
pub fn compare_error(phi_h: f64, phi_p: f64) -> f64 {
    if phi_h < phi_p {
        1.0
    } else if phi_h == phi_p {
        0.5
    } else {
        0.0
    }
}

/// Month diversity error of exactly 28 daily plans: the mean of food-item
/// repetition and food-category repetition over all 336 food slots.
pub fn diversity_error(plans: &[WellbeingPlan], catalog: &Catalog) -> Result<f64> {
    if plans.len() != MONTH_DAYS {
        return Err(Error::Domain(format!(
            "month diversity needs {MONTH_DAYS} plans, got {}",
            plans.len()
        )));
    }
    let slots = MONTH_DAYS * FOOD_SLOTS_PER_PLAN;
    let mut items = HashSet::new();
    let mut categories = HashSet::new();
    for p in plans.iter().flat_map(|p| p.portions()) {
        items.insert(p.food);
        categories.insert(catalog.food(p.food)?.category);
    }
    let item_term = 1.0 - items.len() as f64 / slots as f64;
    let cat_term = 1.0 - categories.len() as f64 / slots.min(FoodCategory::COUNT) as f64;
    Ok((0.5 * item_term + 0.5 * cat_term).clamp(0.0, 1.0))
}
