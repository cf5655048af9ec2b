//! User profiles, synthetic user pools and preference similarity.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::catalog::{Catalog, FoodCategory, FoodItem};
use crate::error::{Error, Result};
use crate::rng::trial_rng;

pub const USERS_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    LoseWeight,
    Maintain,
    GainMuscle,
}

/// Multipliers applied to a user's daily energy requirement per goal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalFactors {
    pub lose_weight: f64,
    pub maintain: f64,
    pub gain_muscle: f64,
}

impl Default for GoalFactors {
    fn default() -> Self {
        GoalFactors {
            lose_weight: 0.85,
            maintain: 1.0,
            gain_muscle: 1.10,
        }
    }
}

impl GoalFactors {
    pub fn factor(&self, goal: Goal) -> f64 {
        match goal {
            Goal::LoseWeight => self.lose_weight,
            Goal::Maintain => self.maintain,
            Goal::GainMuscle => self.gain_muscle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserProfile {
    pub id: u32,
    pub daily_kcal: f64,
    pub goal: Goal,
    pub vegetarian: bool,
    pub vegan: bool,
    pub session_minutes: f64,
    pub food_prefs: BTreeMap<FoodCategory, f64>,
    pub exercise_prefs: BTreeMap<u32, f64>,
    #[serde(default)]
    pub disallowed_exercises: BTreeSet<u32>,
}

impl UserProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::config(format!("user {}: {what}", self.id)));
        if self.daily_kcal.is_nan() || self.daily_kcal <= 0.0 {
            return bad("daily_kcal must be positive".into());
        }
        if self.session_minutes.is_nan() || self.session_minutes <= 0.0 {
            return bad("session_minutes must be positive".into());
        }
        let ratings = self.food_prefs.values().chain(self.exercise_prefs.values());
        for r in ratings {
            if !(0.0..=1.0).contains(r) {
                return bad(format!("rating {r} is outside [0, 1]"));
            }
        }
        Ok(())
    }

    /// Energy target of one meal (a third of the goal-adjusted daily intake).
    pub fn meal_kcal_target(&self, factors: &GoalFactors) -> f64 {
        factors.factor(self.goal) * self.daily_kcal / 3.0
    }

    pub fn food_rating(&self, category: FoodCategory) -> f64 {
        self.food_prefs.get(&category).copied().unwrap_or(0.0)
    }

    pub fn exercise_rating(&self, id: u32) -> f64 {
        self.exercise_prefs.get(&id).copied().unwrap_or(0.0)
    }

    /// Whether the item is compatible with the user's diet.
    pub fn admits_food(&self, item: &FoodItem) -> bool {
        !(self.vegan && !item.vegan) && !(self.vegetarian && !item.vegetarian)
    }

    pub fn allows_exercise(&self, id: u32) -> bool {
        !self.disallowed_exercises.contains(&id)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UsersFile {
    schema: u32,
    users: Vec<UserProfile>,
}

pub fn users_from_json(text: &str, origin: &Path) -> Result<Vec<UserProfile>> {
    let file: UsersFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.schema != USERS_SCHEMA {
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            message: format!("unsupported user pool schema {}", file.schema),
        });
    }
    if file.users.is_empty() {
        return Err(Error::config("user pool is empty"));
    }
    let mut seen = BTreeSet::new();
    for u in &file.users {
        u.validate()?;
        if !seen.insert(u.id) {
            return Err(Error::config(format!("duplicate user id {}", u.id)));
        }
    }
    Ok(file.users)
}

const MICRO_USERS: &str = include_str!("../../../data/micro_users.json");

/// Three users rating every category and exercise of [`Catalog::micro`].
///
/// [`Catalog::micro`]: super::catalog::Catalog::micro
pub fn micro_users() -> Vec<UserProfile> {
    users_from_json(MICRO_USERS, Path::new("<micro users>"))
        .expect("the bundled micro users are valid")
}

pub fn load_users(path: &Path) -> Result<Vec<UserProfile>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    users_from_json(&text, path)
}

pub fn users_to_json(users: &[UserProfile]) -> String {
    serde_json::to_string_pretty(&UsersFile {
        schema: USERS_SCHEMA,
        users: users.to_vec(),
    })
    .expect("user pool serializes")
}

pub fn users_fingerprint(users: &[UserProfile]) -> String {
    hex::encode(Sha256::digest(users_to_json(users).as_bytes()))
}

/// Builds a reproducible pool of `k` plausible users (ids `0..k`) whose
/// exercise preferences refer to `catalog`'s exercises.
pub fn generate_synthetic_users(
    k: usize,
    seed: u64,
    catalog: &Catalog,
) -> Result<Vec<UserProfile>> {
    if k == 0 {
        return Err(Error::config("synthetic user pool size must be at least 1"));
    }
    let mut rng = trial_rng(seed);
    let rating = Beta::new(2.0, 2.0).expect("valid beta parameters");
    let sessions: Vec<f64> = (0..7).map(|i| 30.0 + 15.0 * i as f64).collect();
    let goals = [Goal::LoseWeight, Goal::Maintain, Goal::GainMuscle];
    let exercise_ids: Vec<u32> = catalog.exercises().iter().map(|e| e.id).collect();

    let users = (0..k)
        .map(|i| {
            let daily_kcal = rng.random_range(1600.0..=2800.0);
            let session_minutes = *sessions.choose(&mut rng).expect("non-empty");
            let goal = *goals.choose(&mut rng).expect("non-empty");
            let vegetarian = rng.random_bool(0.15);
            let vegan = vegetarian && rng.random_bool(1.0 / 3.0);
            let food_prefs = FoodCategory::ALL
                .iter()
                .map(|&c| (c, rating.sample(&mut rng)))
                .collect();
            let exercise_prefs = exercise_ids
                .iter()
                .map(|&id| (id, rating.sample(&mut rng)))
                .collect();
            let n_disallowed = rng.random_range(0..=2usize).min(exercise_ids.len());
            let disallowed_exercises = exercise_ids
                .choose_multiple(&mut rng, n_disallowed)
                .copied()
                .collect();
            UserProfile {
                id: i as u32,
                daily_kcal,
                goal,
                vegetarian,
                vegan,
                session_minutes,
                food_prefs,
                exercise_prefs,
                disallowed_exercises,
            }
        })
        .collect();
    Ok(users)
}

/// Cosine similarity of the two users' preference vectors: the ten food
/// categories followed by the union of rated exercise ids (missing ratings
/// count as 0). Zero vectors have similarity 0.
pub fn preference_similarity(a: &UserProfile, b: &UserProfile) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    let mut acc = |x: f64, y: f64| {
        dot += x * y;
        na += x * x;
        nb += y * y;
    };
    for c in FoodCategory::ALL {
        acc(a.food_rating(c), b.food_rating(c));
    }
    let keys: BTreeSet<u32> = a
        .exercise_prefs
        .keys()
        .chain(b.exercise_prefs.keys())
        .copied()
        .collect();
    for id in keys {
        acc(a.exercise_rating(id), b.exercise_rating(id));
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// The other pool member whose preferences are most similar to `user`'s;
/// ties go to the lowest id.
pub fn nearest_neighbour<'a>(
    user: &UserProfile,
    pool: &'a [UserProfile],
) -> Result<&'a UserProfile> {
    pool.iter()
        .filter(|u| u.id != user.id)
        .map(|u| (preference_similarity(user, u), u))
        .fold(
            None,
            |best: Option<(f64, &UserProfile)>, (s, u)| match best {
                Some((bs, bu)) if bs > s || (bs == s && bu.id < u.id) => Some((bs, bu)),
                _ => Some((s, u)),
            },
        )
        .map(|(_, u)| u)
        .ok_or_else(|| Error::config(format!("no neighbour for user {} in the pool", user.id)))
}
