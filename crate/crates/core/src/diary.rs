//! Food diary data model, JSON persistence format and date-range aggregation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::nutrient::{Metric, NutrientVector};
use crate::{Error, Result};

/// Inclusive calendar-date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRange")]
pub struct DateRange {
    start: NaiveDate,
    end: NaiveDate,
}

#[derive(Deserialize)]
struct RawRange {
    start: NaiveDate,
    end: NaiveDate,
}

impl TryFrom<RawRange> for DateRange {
    type Error = Error;

    fn try_from(raw: RawRange) -> Result<Self> {
        DateRange::new(raw.start, raw.end)
    }
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidRange { start, end });
        }
        Ok(DateRange { start, end })
    }

    pub fn single(day: NaiveDate) -> Self {
        DateRange { start: day, end: day }
    }

    /// `days` consecutive days beginning at `start`. `days` must be positive.
    pub fn starting(start: NaiveDate, days: u64) -> Self {
        debug_assert!(days > 0);
        DateRange { start, end: start + Days::new(days - 1) }
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn day_count(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_single_day(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day <= self.end
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.start.iter_days().take(self.day_count())
    }

    /// The range of equal length that ends the day before this one starts.
    pub fn preceding(&self) -> Self {
        let n = self.day_count() as u64;
        DateRange { start: self.start - Days::new(n), end: self.start - Days::new(1) }
    }
}

const MONTH_ABBREV: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

pub(crate) fn short_date(d: NaiveDate) -> String {
    format!("{} {}", MONTH_ABBREV[d.month0() as usize], d.day())
}

impl fmt::Display for DateRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single_day() {
            f.write_str(&short_date(self.start))
        } else {
            write!(f, "{} to {}", short_date(self.start), short_date(self.end))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Breakfast,
    Lunch,
    Dinner,
    Snack,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::Breakfast, Slot::Lunch, Slot::Dinner, Slot::Snack];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoodItem {
    pub name: String,
    pub per100g: NutrientVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MealEntry {
    pub date: NaiveDate,
    pub slot: Slot,
    /// Name of a catalog food. Resolved case-insensitively on load and
    /// rewritten to the catalog spelling.
    pub food: String,
    pub grams: f64,
}

/// Whether a goal is a target to hit from both sides or a ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Band,
    UpperOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NutrientGoals {
    pub daily_target: NutrientVector,
}

impl Default for NutrientGoals {
    fn default() -> Self {
        NutrientGoals {
            daily_target: NutrientVector {
                calories: 2000.0,
                carbohydrates: 260.0,
                protein: 50.0,
                fat: 70.0,
                sugar: 90.0,
                sodium: 2300.0,
            },
        }
    }
}

impl NutrientGoals {
    pub fn target(&self, metric: Metric) -> f64 {
        self.daily_target.get(metric)
    }

    pub fn bound_kind(&self, metric: Metric) -> BoundKind {
        match metric {
            Metric::Sugar | Metric::Sodium => BoundKind::UpperOnly,
            _ => BoundKind::Band,
        }
    }

    fn validate(&self) -> Result<()> {
        for m in Metric::ALL {
            let t = self.target(m);
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Validation {
                    field: format!("goals.daily_target.{}", m.id()),
                    message: "targets must be positive".into(),
                });
            }
        }
        Ok(())
    }
}

/// On-disk layout of a diary document.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiaryFile {
    catalog: Vec<FoodItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goals: Option<NutrientGoals>,
    entries: Vec<MealEntry>,
}

/// Per-food totals over a range, as produced by [`FoodDiary::foods_in_range`].
#[derive(Debug, Clone, PartialEq)]
pub struct FoodTotal {
    pub food: FoodItem,
    pub grams: f64,
    pub total: NutrientVector,
}

/// A validated food diary. Entries are kept in canonical
/// `(date, slot, food, grams)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FoodDiary {
    catalog: Vec<FoodItem>,
    entries: Vec<MealEntry>,
    goals: NutrientGoals,
    by_name: BTreeMap<String, usize>,
}

fn fold_name(name: &str) -> String {
    name.trim().to_lowercase()
}

impl FoodDiary {
    pub fn new(catalog: Vec<FoodItem>, mut entries: Vec<MealEntry>, goals: NutrientGoals) -> Result<Self> {
        goals.validate()?;
        let mut by_name = BTreeMap::new();
        for (i, item) in catalog.iter().enumerate() {
            let key = fold_name(&item.name);
            if key.is_empty() {
                return Err(Error::Validation {
                    field: format!("catalog[{i}].name"),
                    message: "food name must not be empty".into(),
                });
            }
            if let Some(m) = item.per100g.first_invalid() {
                return Err(Error::Validation {
                    field: format!("catalog[{i}].per100g.{}", m.id()),
                    message: "nutrient amounts must be finite and non-negative".into(),
                });
            }
            if by_name.insert(key, i).is_some() {
                return Err(Error::Validation {
                    field: format!("catalog[{i}].name"),
                    message: format!("duplicate food `{}`", item.name),
                });
            }
        }
        for (i, entry) in entries.iter_mut().enumerate() {
            if !(entry.grams.is_finite() && entry.grams > 0.0) {
                return Err(Error::Validation {
                    field: format!("entries[{i}].grams"),
                    message: "grams must be positive".into(),
                });
            }
            let idx = *by_name.get(&fold_name(&entry.food)).ok_or_else(|| Error::UnknownFood {
                index: i,
                date: entry.date,
                food: entry.food.clone(),
            })?;
            entry.food.clone_from(&catalog[idx].name);
        }
        entries.sort_by(|a, b| {
            (a.date, a.slot, fold_name(&a.food))
                .cmp(&(b.date, b.slot, fold_name(&b.food)))
                .then(a.grams.total_cmp(&b.grams))
        });
        Ok(FoodDiary { catalog, entries, goals, by_name })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DiaryFile = serde_json::from_str(text).map_err(|e| Error::DiaryParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        FoodDiary::new(file.catalog, file.entries, file.goals.unwrap_or_default())
    }

    pub fn to_json(&self) -> String {
        let file = DiaryFile { catalog: self.catalog.clone(), goals: Some(self.goals), entries: self.entries.clone() };
        // Plain data with string keys cannot fail to serialize.
        serde_json::to_string_pretty(&file).expect("diary serializes")
    }

    pub fn catalog(&self) -> &[FoodItem] {
        &self.catalog
    }

    pub fn entries(&self) -> &[MealEntry] {
        &self.entries
    }

    pub fn goals(&self) -> &NutrientGoals {
        &self.goals
    }

    pub fn food(&self, name: &str) -> Option<&FoodItem> {
        self.by_name.get(&fold_name(name)).map(|&i| &self.catalog[i])
    }

    /// Nutrients contributed by one entry: `per100g * grams / 100`.
    pub fn contribution(&self, entry: &MealEntry) -> NutrientVector {
        let item = self.food(&entry.food).expect("entries reference catalog foods");
        item.per100g.scale(entry.grams / 100.0)
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.entries.first().map(|e| e.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.entries.last().map(|e| e.date)
    }

    /// Range from the first to the last logged date.
    pub fn span(&self) -> Option<DateRange> {
        Some(DateRange { start: self.first_date()?, end: self.last_date()? })
    }

    /// Diary-relative week `n` (1-based): seven days starting
    /// `7 * (n - 1)` days after the first logged date.
    pub fn week(&self, n: u32) -> Option<DateRange> {
        let first = self.first_date()?;
        (n > 0).then(|| DateRange::starting(first + Days::new(7 * u64::from(n - 1)), 7))
    }

    /// Distinct logged dates in ascending order.
    pub fn dates(&self) -> Vec<NaiveDate> {
        let mut out: Vec<NaiveDate> = self.entries.iter().map(|e| e.date).collect();
        out.dedup();
        out
    }

    pub fn entries_on(&self, day: NaiveDate) -> impl Iterator<Item = &MealEntry> {
        let lo = self.entries.partition_point(|e| e.date < day);
        let hi = self.entries.partition_point(|e| e.date <= day);
        self.entries[lo..hi].iter()
    }

    pub fn entries_in(&self, range: DateRange) -> impl Iterator<Item = &MealEntry> {
        let lo = self.entries.partition_point(|e| e.date < range.start);
        let hi = self.entries.partition_point(|e| e.date <= range.end);
        self.entries[lo..hi].iter()
    }

    pub fn aggregate_day(&self, day: NaiveDate) -> NutrientVector {
        self.entries_on(day).map(|e| self.contribution(e)).sum()
    }

    /// One element per calendar day of `range`, including empty days.
    pub fn aggregate_range(&self, range: DateRange) -> Vec<(NaiveDate, NutrientVector)> {
        range.days().map(|d| (d, self.aggregate_day(d))).collect()
    }

    /// Per-food totals over `range`, ordered by case-folded food name.
    pub fn foods_in_range(&self, range: DateRange) -> Vec<FoodTotal> {
        let mut acc: BTreeMap<String, (usize, f64, NutrientVector)> = BTreeMap::new();
        for entry in self.entries_in(range) {
            let key = fold_name(&entry.food);
            let idx = self.by_name[&key];
            let slot = acc.entry(key).or_insert((idx, 0.0, NutrientVector::ZERO));
            slot.1 += entry.grams;
            slot.2 += self.contribution(entry);
        }
        acc.into_values()
            .map(|(idx, grams, total)| FoodTotal { food: self.catalog[idx].clone(), grams, total })
            .collect()
    }
}
