//! Food and exercise catalogs.
//!
//! Catalog files are JSON documents of the form
//! `{"schema": 1, "foods": [...], "exercises": [...]}` whose records use the
//! field names of [`FoodItem`] and [`ExerciseItem`]. Nutrient masses are
//! grams per `serving_g` grams of food.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CATALOG_SCHEMA: u32 = 1;

const DEMO_CATALOG: &str = include_str!("../../../data/demo_catalog.json");
const MICRO_CATALOG: &str = include_str!("../../../data/micro_catalog.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoodCategory {
    Vegetable,
    Fruit,
    Grain,
    Meat,
    Fish,
    Dairy,
    Legume,
    Nut,
    Egg,
    Other,
}

impl FoodCategory {
    pub const ALL: [FoodCategory; 10] = [
        FoodCategory::Vegetable,
        FoodCategory::Fruit,
        FoodCategory::Grain,
        FoodCategory::Meat,
        FoodCategory::Fish,
        FoodCategory::Dairy,
        FoodCategory::Legume,
        FoodCategory::Nut,
        FoodCategory::Egg,
        FoodCategory::Other,
    ];

    /// Size of the category space.
    pub const COUNT: usize = Self::ALL.len();
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MealSlot {
    Main,
    Side,
}

impl fmt::Display for MealSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MealSlot::Main => "main",
            MealSlot::Side => "side",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intensity {
    Low,
    Moderate,
    High,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoodItem {
    pub id: u32,
    pub name: String,
    pub slot: MealSlot,
    pub category: FoodCategory,
    pub vegetarian: bool,
    pub vegan: bool,
    pub serving_g: f64,
    pub kcal_per_serving: f64,
    pub protein_g: f64,
    pub carbs_g: f64,
    pub sugar_g: f64,
    pub fibre_g: f64,
    pub fat_g: f64,
    pub satfat_g: f64,
    pub sodium_g: f64,
}

impl FoodItem {
    pub fn kcal_per_gram(&self) -> f64 {
        self.kcal_per_serving / self.serving_g
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::Catalog(format!(
                "food {} ({}): {what}",
                self.id, self.name
            )))
        };
        if self.serving_g.is_nan() || self.serving_g <= 0.0 {
            return bad("serving_g must be positive");
        }
        let masses = [
            self.kcal_per_serving,
            self.protein_g,
            self.carbs_g,
            self.sugar_g,
            self.fibre_g,
            self.fat_g,
            self.satfat_g,
            self.sodium_g,
        ];
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return bad("nutrient values must be finite and non-negative");
        }
        if self.satfat_g > self.fat_g {
            return bad("satfat_g exceeds fat_g");
        }
        if self.sugar_g > self.carbs_g {
            return bad("sugar_g exceeds carbs_g");
        }
        if self.vegan && !self.vegetarian {
            return bad("vegan items must also be vegetarian");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExerciseItem {
    pub id: u32,
    pub name: String,
    pub intensity: Intensity,
    /// Metabolic equivalent of task. Carried for display; fitness ignores it.
    pub met: f64,
}

impl ExerciseItem {
    fn validate(&self) -> Result<()> {
        if !(self.met > 0.9 && self.met <= 20.0) {
            return Err(Error::Catalog(format!(
                "exercise {} ({}): met {} is outside (0.9, 20]",
                self.id, self.name, self.met
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    schema: u32,
    foods: Vec<FoodItem>,
    exercises: Vec<ExerciseItem>,
}

/// A validated, immutable catalog with id lookup.
#[derive(Clone, Debug)]
pub struct Catalog {
    foods: Vec<FoodItem>,
    exercises: Vec<ExerciseItem>,
    food_index: HashMap<u32, usize>,
    exercise_index: HashMap<u32, usize>,
}

impl Catalog {
    pub fn new(foods: Vec<FoodItem>, exercises: Vec<ExerciseItem>) -> Result<Self> {
        if foods.is_empty() {
            return Err(Error::Catalog("catalog has no foods".into()));
        }
        if exercises.is_empty() {
            return Err(Error::Catalog("catalog has no exercises".into()));
        }
        let mut food_index = HashMap::with_capacity(foods.len());
        for (i, f) in foods.iter().enumerate() {
            f.validate()?;
            if food_index.insert(f.id, i).is_some() {
                return Err(Error::Catalog(format!("duplicate food id {}", f.id)));
            }
        }
        let mut exercise_index = HashMap::with_capacity(exercises.len());
        for (i, e) in exercises.iter().enumerate() {
            e.validate()?;
            if exercise_index.insert(e.id, i).is_some() {
                return Err(Error::Catalog(format!("duplicate exercise id {}", e.id)));
            }
        }
        Ok(Catalog {
            foods,
            exercises,
            food_index,
            exercise_index,
        })
    }

    /// Parses catalog JSON; `origin` only labels error messages.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let file: CatalogFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        if file.schema != CATALOG_SCHEMA {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                message: format!("unsupported catalog schema {}", file.schema),
            });
        }
        Catalog::new(file.foods, file.exercises)
    }

    /// The catalog shipped with the crate.
    pub fn demo() -> Self {
        Catalog::from_json(DEMO_CATALOG, Path::new("<demo catalog>"))
            .expect("the bundled demo catalog is valid")
    }

    /// Two mains, two sides and two exercises: small enough to enumerate.
    pub fn micro() -> Self {
        Catalog::from_json(MICRO_CATALOG, Path::new("<micro catalog>"))
            .expect("the bundled micro catalog is valid")
    }

    pub fn foods(&self) -> &[FoodItem] {
        &self.foods
    }

    pub fn exercises(&self) -> &[ExerciseItem] {
        &self.exercises
    }

    pub fn food(&self, id: u32) -> Result<&FoodItem> {
        self.food_index
            .get(&id)
            .map(|&i| &self.foods[i])
            .ok_or_else(|| Error::Catalog(format!("unknown food id {id}")))
    }

    pub fn exercise(&self, id: u32) -> Result<&ExerciseItem> {
        self.exercise_index
            .get(&id)
            .map(|&i| &self.exercises[i])
            .ok_or_else(|| Error::Catalog(format!("unknown exercise id {id}")))
    }

    pub fn foods_for(&self, slot: MealSlot) -> impl Iterator<Item = &FoodItem> {
        self.foods.iter().filter(move |f| f.slot == slot)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CatalogFile {
            schema: CATALOG_SCHEMA,
            foods: self.foods.clone(),
            exercises: self.exercises.clone(),
        })
        .expect("catalog serializes")
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

pub fn load_catalog(path: &Path) -> Result<Catalog> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Catalog::from_json(&text, path)
}
