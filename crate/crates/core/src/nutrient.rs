//! Metrics and the six-slot nutrient vector every quantity in the system uses.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign};
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// One of the tracked dietary quantities. Declaration order is the canonical
/// metric order used for iteration, sets and report layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Calories,
    Carbohydrates,
    Protein,
    Fat,
    Sugar,
    Sodium,
}

impl Metric {
    pub const ALL: [Metric; 6] =
        [Metric::Calories, Metric::Carbohydrates, Metric::Protein, Metric::Fat, Metric::Sugar, Metric::Sodium];

    pub fn id(self) -> &'static str {
        match self {
            Metric::Calories => "calories",
            Metric::Carbohydrates => "carbohydrates",
            Metric::Protein => "protein",
            Metric::Fat => "fat",
            Metric::Sugar => "sugar",
            Metric::Sodium => "sodium",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Metric::Calories => "kcal",
            Metric::Sodium => "mg",
            _ => "g",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL.into_iter().find(|m| m.id() == s).ok_or_else(|| Error::UnknownMetric(s.into()))
    }
}

/// Calories (kcal), carbohydrates, protein, fat and sugar (g), sodium (mg).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NutrientVector {
    pub calories: f64,
    pub carbohydrates: f64,
    pub protein: f64,
    pub fat: f64,
    pub sugar: f64,
    pub sodium: f64,
}

impl NutrientVector {
    pub const ZERO: NutrientVector =
        NutrientVector { calories: 0.0, carbohydrates: 0.0, protein: 0.0, fat: 0.0, sugar: 0.0, sodium: 0.0 };

    pub fn from_array(values: [f64; 6]) -> Self {
        let [calories, carbohydrates, protein, fat, sugar, sodium] = values;
        NutrientVector { calories, carbohydrates, protein, fat, sugar, sodium }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.calories, self.carbohydrates, self.protein, self.fat, self.sugar, self.sodium]
    }

    pub fn get(&self, metric: Metric) -> f64 {
        self.to_array()[metric.index()]
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::from_array(self.to_array().map(|v| v * factor))
    }

    /// First metric whose component is negative or not finite.
    pub fn first_invalid(&self) -> Option<Metric> {
        Metric::ALL.into_iter().find(|&m| {
            let v = self.get(m);
            !v.is_finite() || v < 0.0
        })
    }
}

impl Add for NutrientVector {
    type Output = NutrientVector;

    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(core::array::from_fn(|i| a[i] + b[i]))
    }
}

impl AddAssign for NutrientVector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sum for NutrientVector {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(NutrientVector::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a NutrientVector> for NutrientVector {
    fn sum<I: Iterator<Item = &'a NutrientVector>>(iter: I) -> Self {
        iter.copied().sum()
    }
}
