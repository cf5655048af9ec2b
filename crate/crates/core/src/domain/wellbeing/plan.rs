//! Plan genomes: three bundles of one meal and one exercise each.

use serde::{Deserialize, Serialize};

pub const BUNDLES_PER_PLAN: usize = 3;
pub const SIDES_PER_MEAL: usize = 3;
pub const FOODS_PER_MEAL: usize = 1 + SIDES_PER_MEAL;
pub const FOOD_SLOTS_PER_PLAN: usize = BUNDLES_PER_PLAN * FOODS_PER_MEAL;
pub const SLOTS_PER_PLAN: usize = BUNDLES_PER_PLAN * (FOODS_PER_MEAL + 1);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Portion {
    pub food: u32,
    pub grams: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Activity {
    pub exercise: u32,
    pub minutes: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub main: Portion,
    pub sides: [Portion; SIDES_PER_MEAL],
    pub exercise: Activity,
}

impl Bundle {
    /// The four food portions of the meal, main first.
    pub fn portions(&self) -> impl Iterator<Item = &Portion> {
        std::iter::once(&self.main).chain(self.sides.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellbeingPlan {
    pub bundles: [Bundle; BUNDLES_PER_PLAN],
}

impl WellbeingPlan {
    pub fn portions(&self) -> impl Iterator<Item = &Portion> {
        self.bundles.iter().flat_map(|b| b.portions())
    }

    pub fn activities(&self) -> impl Iterator<Item = &Activity> {
        self.bundles.iter().map(|b| &b.exercise)
    }
}

/// A position inside a bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotKind {
    Main,
    Side(usize),
    Exercise,
}

impl SlotKind {
    /// The five positions of a bundle in a fixed order.
    pub const ALL: [SlotKind; FOODS_PER_MEAL + 1] = [
        SlotKind::Main,
        SlotKind::Side(0),
        SlotKind::Side(1),
        SlotKind::Side(2),
        SlotKind::Exercise,
    ];

    pub fn index(self) -> usize {
        match self {
            SlotKind::Main => 0,
            SlotKind::Side(i) => 1 + i,
            SlotKind::Exercise => FOODS_PER_MEAL,
        }
    }
}

/// A position inside a plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlanSlot {
    pub bundle: usize,
    pub kind: SlotKind,
}

impl PlanSlot {
    /// Maps `0..SLOTS_PER_PLAN` onto plan positions, bundle-major.
    pub fn from_index(i: usize) -> PlanSlot {
        let per = SlotKind::ALL.len();
        PlanSlot {
            bundle: i / per,
            kind: SlotKind::ALL[i % per],
        }
    }

    pub fn index(self) -> usize {
        self.bundle * SlotKind::ALL.len() + self.kind.index()
    }
}
