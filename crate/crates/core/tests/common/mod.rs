//! Independent plan-error oracle and exhaustive search over the micro catalog.
//!
//! Reads the raw JSON files, never the library's parsed types, and rebuilds
//! the error from the nutrient tables.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use coevo::domain::wellbeing::{
    micro_users, Activity, Bundle, Portion, UserProfile, WellbeingPlan,
};
use serde_json::Value;

pub mod props;

pub const MICRO_GRAMS: [f64; 3] = [50.0, 100.0, 150.0];
pub const MICRO_MINUTES: [f64; 3] = [30.0, 45.0, 60.0];

fn data(name: &str) -> Value {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn clip(x: f64) -> f64 {
    if x > 1.0 {
        1.0
    } else {
        x
    }
}

pub struct OracleUser {
    pub meal_kcal: f64,
    pub vegetarian: bool,
    pub vegan: bool,
    pub session: f64,
    pub food: BTreeMap<String, f64>,
    pub exercise: BTreeMap<u64, f64>,
}

impl OracleUser {
    pub fn from_json(u: &Value) -> Self {
        let factor = match u["goal"].as_str().unwrap() {
            "lose_weight" => 0.85,
            "maintain" => 1.0,
            "gain_muscle" => 1.10,
            g => panic!("goal {g}"),
        };
        OracleUser {
            meal_kcal: factor * u["daily_kcal"].as_f64().unwrap() / 3.0,
            vegetarian: u["vegetarian"].as_bool().unwrap(),
            vegan: u["vegan"].as_bool().unwrap(),
            session: u["session_minutes"].as_f64().unwrap(),
            food: u["food_prefs"]
                .as_object()
                .unwrap()
                .iter()
                .map(|(k, v)| (k.clone(), v.as_f64().unwrap()))
                .collect(),
            exercise: u["exercise_prefs"]
                .as_object()
                .unwrap()
                .iter()
                .map(|(k, v)| (k.parse().unwrap(), v.as_f64().unwrap()))
                .collect(),
        }
    }
}

/// Disallowed exercises are not modelled.
pub struct Oracle {
    foods: BTreeMap<u64, Value>,
    pub users: Vec<Value>,
}

/// A plan as (food id, grams) for the twelve food slots, meal by meal
/// (main first), and (exercise id, minutes) per bundle.
pub type Foods = [(u32, f64); 12];
pub type Exercises = [(u32, f64); 3];

impl Oracle {
    fn load(catalog: &str, users: Option<&str>) -> Self {
        let cat = data(catalog);
        Oracle {
            foods: cat["foods"]
                .as_array()
                .unwrap()
                .iter()
                .map(|f| (f["id"].as_u64().unwrap(), f.clone()))
                .collect(),
            users: users.map_or_else(Vec::new, |u| data(u)["users"].as_array().unwrap().clone()),
        }
    }

    pub fn micro() -> Self {
        Self::load("micro_catalog.json", Some("micro_users.json"))
    }

    /// The shipped demo catalog; users are built by the caller.
    pub fn demo() -> Self {
        Self::load("demo_catalog.json", None)
    }

    pub fn user(&self, id: u64) -> OracleUser {
        let u = self
            .users
            .iter()
            .find(|u| u["id"].as_u64() == Some(id))
            .unwrap();
        OracleUser::from_json(u)
    }

    fn num(&self, id: u32, key: &str) -> f64 {
        self.foods[&(id as u64)][key].as_f64().unwrap()
    }

    fn category(&self, id: u32) -> &str {
        self.foods[&(id as u64)]["category"].as_str().unwrap()
    }

    fn flag(&self, id: u32, key: &str) -> bool {
        self.foods[&(id as u64)][key].as_bool().unwrap()
    }

    fn food_like(&self, id: u32, u: &OracleUser) -> f64 {
        let violates =
            (u.vegetarian && !self.flag(id, "vegetarian")) || (u.vegan && !self.flag(id, "vegan"));
        if violates {
            0.0
        } else {
            u.food[self.category(id)]
        }
    }

    /// Healthy-food error and proportionality error of one meal.
    pub fn meal(&self, meal: &[(u32, f64)], c: f64) -> (f64, f64) {
        let tot = |key: &str| -> f64 {
            meal.iter()
                .map(|&(id, g)| g / self.num(id, "serving_g") * self.num(id, key))
                .sum()
        };
        let dev = |a: f64, t: f64| clip((a - t).abs() / t);
        let over = |a: f64, t: f64| if a <= t { 0.0 } else { clip((a - t) / t) };
        let fibre = tot("fibre_g");
        let terms = [
            dev(tot("kcal_per_serving"), c),
            dev(tot("protein_g"), c * 0.15 / 4.0),
            dev(tot("carbs_g"), c * 0.5 / 4.0),
            dev(tot("fat_g"), c * 0.35 / 9.0),
            over(tot("satfat_g"), c * 0.11 / 9.0),
            over(tot("sugar_g"), c * 0.05 / 4.0),
            if fibre >= 10.0 {
                0.0
            } else {
                clip((10.0 - fibre) / 10.0)
            },
            over(tot("sodium_g"), 0.8),
        ];
        let g: Vec<f64> = meal.iter().map(|m| m.1).collect();
        let prop = if g.iter().any(|&x| !(10.0..=500.0).contains(&x)) {
            1.0
        } else {
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            let sd =
                (g.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / g.len() as f64).sqrt();
            clip(sd / mean)
        };
        (terms.iter().sum::<f64>() / 8.0, prop)
    }

    /// Repetition and preference terms, which depend on item choice only:
    /// (item + category + exercise repetition, preference error).
    pub fn item_terms(
        &self,
        foods: &[u32; 12],
        exercises: &[u32; 3],
        u: &OracleUser,
    ) -> (f64, f64) {
        let ids: HashSet<u32> = foods.iter().copied().collect();
        let cats: HashSet<&str> = foods.iter().map(|&f| self.category(f)).collect();
        let exs: HashSet<u32> = exercises.iter().copied().collect();
        let rep = (1.0 - ids.len() as f64 / 12.0)
            + (1.0 - cats.len() as f64 / 10.0)
            + (1.0 - exs.len() as f64 / 3.0);
        let like: f64 = foods.iter().map(|&f| self.food_like(f, u)).sum::<f64>()
            + exercises
                .iter()
                .map(|&e| u.exercise[&(e as u64)])
                .sum::<f64>();
        (rep, 1.0 - like / 15.0)
    }

    /// (hf, ea, cd, psi, phi) of a full plan.
    pub fn phi(&self, foods: &Foods, ex: &Exercises, u: &OracleUser) -> [f64; 5] {
        let mut hf = 0.0;
        let mut prop = 0.0;
        for meal in foods.chunks(4) {
            let (h, p) = self.meal(meal, u.meal_kcal);
            hf += h / 3.0;
            prop += p / 3.0;
        }
        let ea = ex
            .iter()
            .map(|&(_, m)| clip((m - u.session).abs() / u.session) / 3.0)
            .sum::<f64>();
        let (rep, psi) = self.item_terms(&foods.map(|f| f.0), &ex.map(|e| e.0), u);
        let cd = (rep + prop) / 4.0;
        [hf, ea, cd, psi, (hf + ea + cd + psi) / 4.0]
    }

    /// Exact minimum error over every plan whose servings come from
    /// `MICRO_GRAMS` and durations from `MICRO_MINUTES`.
    ///
    /// For fixed items, grams enter only through each meal's healthy-food
    /// and proportionality terms and minutes only through each bundle's
    /// exercise term, so those are minimized per meal; item choices (2^15)
    /// are enumerated outright.
    pub fn micro_optimum(&self, u: &OracleUser) -> (f64, Foods, Exercises) {
        let mains = [1u32, 2];
        let sides = [3u32, 4];
        let exercises = [1u32, 2];
        // Best grams per meal item tuple, keyed by (main, side, side, side).
        let mut meal_best: BTreeMap<[u32; 4], (f64, [f64; 4])> = BTreeMap::new();
        for &m in &mains {
            for &a in &sides {
                for &b in &sides {
                    for &c in &sides {
                        let items = [m, a, b, c];
                        let mut best = (f64::INFINITY, [0.0; 4]);
                        for k in 0..81usize {
                            let g =
                                [k % 3, (k / 3) % 3, (k / 9) % 3, k / 27].map(|i| MICRO_GRAMS[i]);
                            let meal: Vec<(u32, f64)> = items.iter().copied().zip(g).collect();
                            let (h, p) = self.meal(&meal, u.meal_kcal);
                            let v = h / 3.0 + p / 12.0;
                            if v < best.0 {
                                best = (v, g);
                            }
                        }
                        meal_best.insert(items, best);
                    }
                }
            }
        }
        let (ea_min, minutes) = MICRO_MINUTES
            .iter()
            .map(|&m| (clip((m - u.session).abs() / u.session) / 3.0, m))
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });

        let mut best = (f64::INFINITY, [(0, 0.0); 12], [(0, 0.0); 3]);
        for code in 0u32..(1 << 15) {
            let bit = |i: u32| ((code >> i) & 1) as usize;
            let mut foods = [0u32; 12];
            for meal in 0..3 {
                foods[4 * meal] = mains[bit(meal as u32)];
                for s in 0..3 {
                    foods[4 * meal + 1 + s] = sides[bit(3 + 3 * meal as u32 + s as u32)];
                }
            }
            let ex = [0, 1, 2].map(|b| exercises[bit(12 + b)]);
            let (rep, psi) = self.item_terms(&foods, &ex, u);
            let grams_part: f64 = (0..3)
                .map(|meal| {
                    meal_best[&[
                        foods[4 * meal],
                        foods[4 * meal + 1],
                        foods[4 * meal + 2],
                        foods[4 * meal + 3],
                    ]]
                        .0
                })
                .sum();
            let phi = (grams_part + 3.0 * ea_min + rep / 4.0 + psi) / 4.0;
            if phi < best.0 {
                let mut plan = [(0, 0.0); 12];
                for meal in 0..3 {
                    let key = [
                        foods[4 * meal],
                        foods[4 * meal + 1],
                        foods[4 * meal + 2],
                        foods[4 * meal + 3],
                    ];
                    let g = meal_best[&key].1;
                    for j in 0..4 {
                        plan[4 * meal + j] = (key[j], g[j]);
                    }
                }
                best = (phi, plan, ex.map(|e| (e, minutes)));
            }
        }
        best
    }
}

/// Library plan for an oracle plan description.
pub fn to_plan(foods: &Foods, ex: &Exercises) -> WellbeingPlan {
    let b = |k: usize| Bundle {
        main: Portion {
            food: foods[4 * k].0,
            grams: foods[4 * k].1,
        },
        sides: [1, 2, 3].map(|j| Portion {
            food: foods[4 * k + j].0,
            grams: foods[4 * k + j].1,
        }),
        exercise: Activity {
            exercise: ex[k].0,
            minutes: ex[k].1,
        },
    };
    WellbeingPlan {
        bundles: [b(0), b(1), b(2)],
    }
}

pub fn micro_user(id: u32) -> UserProfile {
    micro_users().into_iter().find(|u| u.id == id).unwrap()
}
