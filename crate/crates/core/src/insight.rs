//! Analysis logic: intake classification against goals, trend and consistency
//! detection, food impact ranking and two-period comparison.
//!
//! Every assessment is a plain serializable record; the chat layer ships them
//! verbatim as message payloads so that evaluation never has to read prose.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::diary::{BoundKind, DateRange, FoodDiary};
use crate::nlu::{InsightKind, InsightKindSet, IntentKind, MetricSet, ParsedQuery, ResolvedTime, TemporalExpression};
use crate::nutrient::Metric;
use crate::{Error, Result};

/// Every decision constant of the analysis layer. The quiz answer key reads
/// the same record, which is the only thing it shares with this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Half-width of the "balanced" band, in percent of the daily target.
    pub balance_band_pct: f64,
    /// Trend dead zone as a fraction of the daily target, per day.
    pub trend_epsilon_fraction: f64,
    /// Largest coefficient of variation still counted as consistent.
    pub consistency_cv_max: f64,
    /// Comparison hysteresis as a fraction of the daily target.
    pub comparison_delta_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            balance_band_pct: 10.0,
            trend_epsilon_fraction: 0.01,
            consistency_cv_max: 0.15,
            comparison_delta_fraction: 0.02,
        }
    }
}

impl Thresholds {
    /// Every threshold must be finite and positive.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("balance_band_pct", self.balance_band_pct),
            ("trend_epsilon_fraction", self.trend_epsilon_fraction),
            ("consistency_cv_max", self.consistency_cv_max),
            ("comparison_delta_fraction", self.comparison_delta_fraction),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(alloc::format!("threshold `{name}` must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntakeStatus {
    Deficient,
    Balanced,
    Excess,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Decrease,
    Increase,
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Improved,
    Worsened,
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntakeAssessment {
    pub metric: Metric,
    pub period: DateRange,
    pub daily: Vec<f64>,
    pub mean_daily: f64,
    pub target: f64,
    pub deviation_pct: f64,
    pub status: IntakeStatus,
    /// No diary entry falls inside the period.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendAssessment {
    pub metric: Metric,
    pub period: DateRange,
    pub daily: Vec<f64>,
    pub target: f64,
    /// Least-squares slope of daily totals, in metric units per day.
    pub slope: f64,
    pub recommended_direction: Direction,
    pub matches_recommendation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyAssessment {
    pub metric: Metric,
    pub period: DateRange,
    pub mean: f64,
    /// Population standard deviation over mean; zero when the mean is zero.
    pub cv: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoodImpact {
    pub food: String,
    pub amount: f64,
    pub grams: f64,
    pub share_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoodImpactRanking {
    pub metric: Metric,
    pub period: DateRange,
    pub total: f64,
    pub ranked: Vec<FoodImpact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub metric: Metric,
    pub period_a: DateRange,
    pub period_b: DateRange,
    pub mean_a: f64,
    pub mean_b: f64,
    pub target: f64,
    pub abs_dev_a: f64,
    pub abs_dev_b: f64,
    pub verdict: Verdict,
}

/// Any single assessment, tagged by kind on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Assessment {
    Intake(IntakeAssessment),
    Trend(TrendAssessment),
    Consistency(ConsistencyAssessment),
    Food(FoodImpactRanking),
    Comparison(ComparisonResult),
}

impl Assessment {
    pub fn metric(&self) -> Metric {
        match self {
            Assessment::Intake(a) => a.metric,
            Assessment::Trend(a) => a.metric,
            Assessment::Consistency(a) => a.metric,
            Assessment::Food(a) => a.metric,
            Assessment::Comparison(a) => a.metric,
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Ordinary least-squares slope of `values` against indices `0..n`.
pub fn ols_slope(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    // Pair index i with its mirror n-1-i around the centre; a palindromic
    // series then sums to exactly zero.
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let dx = (j - i) as f64 / 2.0;
        sxy += dx * (values[j] - values[i]);
        sxx += 2.0 * dx * dx;
    }
    sxy / sxx
}

/// Stateless analysis functions parameterized by [`Thresholds`].
#[derive(Debug, Clone, Copy, Default)]
pub struct InsightEngine {
    pub thresholds: Thresholds,
}

impl InsightEngine {
    pub fn new(thresholds: Thresholds) -> Self {
        InsightEngine { thresholds }
    }

    fn daily(diary: &FoodDiary, metric: Metric, period: DateRange) -> Vec<f64> {
        diary.aggregate_range(period).into_iter().map(|(_, v)| v.get(metric)).collect()
    }

    pub fn classify(&self, deviation_pct: f64, bound: BoundKind) -> IntakeStatus {
        let band = self.thresholds.balance_band_pct;
        if deviation_pct > band {
            IntakeStatus::Excess
        } else if bound == BoundKind::Band && deviation_pct < -band {
            IntakeStatus::Deficient
        } else {
            IntakeStatus::Balanced
        }
    }

    pub fn assess_intake(&self, diary: &FoodDiary, metric: Metric, period: DateRange) -> IntakeAssessment {
        let daily = Self::daily(diary, metric, period);
        let mean_daily = mean(&daily);
        let target = diary.goals().target(metric);
        let deviation_pct = (mean_daily - target) / target * 100.0;
        IntakeAssessment {
            metric,
            period,
            status: self.classify(deviation_pct, diary.goals().bound_kind(metric)),
            empty: diary.entries_in(period).next().is_none(),
            daily,
            mean_daily,
            target,
            deviation_pct,
        }
    }

    pub fn detect_trend(&self, diary: &FoodDiary, metric: Metric, period: DateRange) -> Result<TrendAssessment> {
        if period.day_count() < 3 {
            return Err(Error::PeriodTooShort { needed: 3, got: period.day_count() });
        }
        let intake = self.assess_intake(diary, metric, period);
        let slope = ols_slope(&intake.daily);
        let eps = self.thresholds.trend_epsilon_fraction * intake.target;
        let recommended_direction = match intake.status {
            IntakeStatus::Excess => Direction::Decrease,
            IntakeStatus::Deficient => Direction::Increase,
            IntakeStatus::Balanced => Direction::Hold,
        };
        let matches_recommendation = match recommended_direction {
            Direction::Decrease => slope < -eps,
            Direction::Increase => slope > eps,
            Direction::Hold => slope.abs() <= eps,
        };
        Ok(TrendAssessment {
            metric,
            period,
            daily: intake.daily,
            target: intake.target,
            slope,
            recommended_direction,
            matches_recommendation,
        })
    }

    pub fn assess_consistency(
        &self,
        diary: &FoodDiary,
        metric: Metric,
        period: DateRange,
    ) -> Result<ConsistencyAssessment> {
        if period.day_count() < 2 {
            return Err(Error::PeriodTooShort { needed: 2, got: period.day_count() });
        }
        let daily = Self::daily(diary, metric, period);
        let m = mean(&daily);
        let variance = daily.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / daily.len() as f64;
        let cv = if m == 0.0 { 0.0 } else { libm::sqrt(variance) / m };
        Ok(ConsistencyAssessment { metric, period, mean: m, cv, consistent: cv <= self.thresholds.consistency_cv_max })
    }

    pub fn rank_food_impact(&self, diary: &FoodDiary, metric: Metric, period: DateRange) -> FoodImpactRanking {
        let mut ranked: Vec<FoodImpact> = diary
            .foods_in_range(period)
            .into_iter()
            .map(|f| FoodImpact { amount: f.total.get(metric), grams: f.grams, food: f.food.name, share_pct: 0.0 })
            .collect();
        ranked.sort_by(|a, b| b.amount.total_cmp(&a.amount).then_with(|| a.food.cmp(&b.food)));
        let total: f64 = ranked.iter().map(|r| r.amount).sum();
        if total > 0.0 {
            for r in &mut ranked {
                r.share_pct = r.amount / total * 100.0;
            }
        }
        FoodImpactRanking { metric, period, total, ranked }
    }

    /// `b` is the later ("current") period.
    pub fn compare_ranges(&self, diary: &FoodDiary, metric: Metric, a: DateRange, b: DateRange) -> ComparisonResult {
        let target = diary.goals().target(metric);
        let mean_a = mean(&Self::daily(diary, metric, a));
        let mean_b = mean(&Self::daily(diary, metric, b));
        let abs_dev_a = (mean_a - target).abs();
        let abs_dev_b = (mean_b - target).abs();
        let delta = self.thresholds.comparison_delta_fraction * target;
        let verdict = if abs_dev_b < abs_dev_a - delta {
            Verdict::Improved
        } else if abs_dev_b > abs_dev_a + delta {
            Verdict::Worsened
        } else {
            Verdict::Unchanged
        };
        ComparisonResult { metric, period_a: a, period_b: b, mean_a, mean_b, target, abs_dev_a, abs_dev_b, verdict }
    }

    /// Dispatches a defaulted query to the assessments it asks for.
    ///
    /// Basic reports yield one intake assessment per metric; comparisons one
    /// comparison per metric plus any requested insight kinds for both
    /// periods; advanced queries the requested kinds (intake when none).
    /// Conversation-control intents produce an empty bundle.
    pub fn build_bundle(&self, diary: &FoodDiary, query: &ParsedQuery) -> Result<InsightBundle> {
        let mut bundle = InsightBundle::new(query.clone());
        let metrics: Vec<Metric> =
            if query.metrics.is_empty() { alloc::vec![Metric::Calories] } else { query.metrics.iter().collect() };
        let Some(time) = &query.time else {
            return Ok(bundle);
        };
        let (periods, pair) = match (query.intent.kind, &time.resolved) {
            (IntentKind::Compare, ResolvedTime::Single(r)) => {
                let pair = ordered(r.preceding(), *r);
                (alloc::vec![pair.0, pair.1], Some(pair))
            }
            (_, ResolvedTime::Pair(a, b)) => {
                let pair = ordered(*a, *b);
                (alloc::vec![pair.0, pair.1], Some(pair))
            }
            (_, ResolvedTime::Single(r)) => (alloc::vec![*r], None),
        };
        let kinds = match query.intent.kind {
            IntentKind::BasicReport if pair.is_none() => InsightKindSet::single(InsightKind::Intake),
            IntentKind::BasicReport | IntentKind::Compare => query.insight_kinds.clone(),
            IntentKind::AdvancedInsight if query.insight_kinds.is_empty() => {
                InsightKindSet::single(InsightKind::Intake)
            }
            IntentKind::AdvancedInsight => query.insight_kinds.clone(),
            _ => return Ok(bundle),
        };
        for &period in &periods {
            for &metric in &metrics {
                if kinds.contains(InsightKind::Intake) {
                    bundle.intakes.push(self.assess_intake(diary, metric, period));
                }
                if kinds.contains(InsightKind::TrendConsistency) {
                    bundle.trends.push(self.detect_trend(diary, metric, period)?);
                    bundle.consistency.push(self.assess_consistency(diary, metric, period)?);
                }
                if kinds.contains(InsightKind::Food) {
                    bundle.foods.push(self.rank_food_impact(diary, metric, period));
                }
            }
        }
        if let Some((a, b)) = pair {
            for &metric in &metrics {
                bundle.comparisons.push(self.compare_ranges(diary, metric, a, b));
            }
        }
        Ok(bundle)
    }
}

fn ordered(a: DateRange, b: DateRange) -> (DateRange, DateRange) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

/// Fills in the metric set and timeframe a query left unspecified.
///
/// Missing metrics default to calories. A missing timeframe reuses
/// `previous` when compatible, otherwise falls back to the most recent diary
/// day (or the diary's two weeks for comparisons).
pub fn apply_defaults(
    query: &ParsedQuery,
    diary: &FoodDiary,
    reference_date: NaiveDate,
    previous: Option<&TemporalExpression>,
) -> ParsedQuery {
    let mut out = query.clone();
    if out.metrics.is_empty() {
        out.metrics = MetricSet::single(Metric::Calories);
    }
    if out.time.is_some() {
        return out;
    }
    let wants_pair = out.intent.kind == IntentKind::Compare;
    let carried = previous.and_then(|prev| match (&prev.resolved, wants_pair) {
        (ResolvedTime::Pair(..), true) | (ResolvedTime::Single(_), false) => Some(prev.clone()),
        (ResolvedTime::Pair(a, b), false) => {
            Some(TemporalExpression { raw: prev.raw.clone(), resolved: ResolvedTime::Single(ordered(*a, *b).1) })
        }
        (ResolvedTime::Single(_), true) => None,
    });
    out.time = Some(carried.unwrap_or_else(|| {
        if wants_pair {
            let (a, b) = match (diary.week(1), diary.week(2)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    let current = DateRange::starting(reference_date - chrono::Days::new(6), 7);
                    (current.preceding(), current)
                }
            };
            TemporalExpression { raw: String::new(), resolved: ResolvedTime::Pair(a, b) }
        } else {
            let day = diary.last_date().unwrap_or(reference_date);
            TemporalExpression { raw: String::new(), resolved: ResolvedTime::Single(DateRange::single(day)) }
        }
    }));
    out
}

/// Structured output of the analysis layer for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightBundle {
    pub query: ParsedQuery,
    pub intakes: Vec<IntakeAssessment>,
    pub trends: Vec<TrendAssessment>,
    pub consistency: Vec<ConsistencyAssessment>,
    pub foods: Vec<FoodImpactRanking>,
    pub comparisons: Vec<ComparisonResult>,
}

impl InsightBundle {
    pub fn new(query: ParsedQuery) -> Self {
        InsightBundle {
            query,
            intakes: Vec::new(),
            trends: Vec::new(),
            consistency: Vec::new(),
            foods: Vec::new(),
            comparisons: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intakes.is_empty()
            && self.trends.is_empty()
            && self.consistency.is_empty()
            && self.foods.is_empty()
            && self.comparisons.is_empty()
    }

    /// Assessments in presentation order: intake, trend and consistency,
    /// food, comparison.
    pub fn assessments(&self) -> Vec<Assessment> {
        let mut out = Vec::new();
        out.extend(self.intakes.iter().cloned().map(Assessment::Intake));
        // Trend and consistency for the same (metric, period) stay adjacent.
        let mut consistency: BTreeMap<(DateRange, Metric), &ConsistencyAssessment> =
            self.consistency.iter().map(|c| ((c.period, c.metric), c)).collect();
        for t in &self.trends {
            out.push(Assessment::Trend(t.clone()));
            if let Some(c) = consistency.remove(&(t.period, t.metric)) {
                out.push(Assessment::Consistency(c.clone()));
            }
        }
        out.extend(consistency.into_values().cloned().map(Assessment::Consistency));
        out.extend(self.foods.iter().cloned().map(Assessment::Food));
        out.extend(self.comparisons.iter().cloned().map(Assessment::Comparison));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diary::{FoodItem, MealEntry, NutrientGoals, Slot};
    use crate::nlu::Intent;
    use crate::nutrient::NutrientVector;
    use alloc::vec;
    use alloc::vec::Vec;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    /// One food "Unit" worth 1 kcal per gram-hundredth: `grams = 100 * kcal`.
    fn diary_from_calories(start: &str, calories: &[f64]) -> FoodDiary {
        let unit = FoodItem {
            name: "Unit".into(),
            per100g: NutrientVector { calories: 100.0, carbohydrates: 10.0, ..NutrientVector::ZERO },
        };
        let entries = calories
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(|(i, &c)| MealEntry {
                date: d(start) + chrono::Days::new(i as u64),
                slot: Slot::Lunch,
                food: "Unit".into(),
                grams: c,
            })
            .collect();
        FoodDiary::new(vec![unit], entries, NutrientGoals::default()).unwrap()
    }

    fn engine() -> InsightEngine {
        InsightEngine::default()
    }

    #[test]
    fn intake_exactly_on_target_is_balanced() {
        let diary = diary_from_calories("2021-06-01", &[2000.0; 7]);
        let a = engine().assess_intake(&diary, Metric::Calories, DateRange::starting(d("2021-06-01"), 7));
        assert_eq!(a.deviation_pct, 0.0);
        assert_eq!(a.status, IntakeStatus::Balanced);
        assert!(!a.empty);
    }

    #[test]
    fn intake_excess_at_plus_25() {
        let diary = diary_from_calories("2021-06-01", &[2500.0]);
        let a = engine().assess_intake(&diary, Metric::Calories, DateRange::single(d("2021-06-01")));
        assert!((a.deviation_pct - 25.0).abs() < 1e-12);
        assert_eq!(a.status, IntakeStatus::Excess);
    }

    #[test]
    fn intake_outside_diary_is_flagged_empty() {
        let diary = diary_from_calories("2021-06-01", &[2500.0]);
        let a = engine().assess_intake(&diary, Metric::Calories, DateRange::single(d("2022-01-01")));
        assert!(a.empty);
        assert_eq!(a.status, IntakeStatus::Deficient);
    }

    #[test]
    fn upper_only_metrics_never_deficient() {
        let e = engine();
        assert_eq!(e.classify(-80.0, BoundKind::UpperOnly), IntakeStatus::Balanced);
        assert_eq!(e.classify(10.5, BoundKind::UpperOnly), IntakeStatus::Excess);
        assert_eq!(e.classify(-10.5, BoundKind::Band), IntakeStatus::Deficient);
        assert_eq!(e.classify(10.0, BoundKind::Band), IntakeStatus::Balanced);
        assert_eq!(e.classify(-10.0, BoundKind::Band), IntakeStatus::Balanced);
    }

    #[test]
    fn decreasing_series_with_mean_on_target_holds_and_mismatches() {
        // Hand OLS: x = 0..6, x̄ = 3, Σ(x-x̄)² = 28, Σ(x-x̄)(y-ȳ) = -5600 → slope -200.
        let diary = diary_from_calories("2021-06-01", &[2600.0, 2400.0, 2200.0, 2000.0, 1800.0, 1600.0, 1400.0]);
        let t = engine().detect_trend(&diary, Metric::Calories, DateRange::starting(d("2021-06-01"), 7)).unwrap();
        assert_eq!(t.recommended_direction, Direction::Hold);
        assert!((t.slope + 200.0).abs() < 1e-9);
        assert!(!t.matches_recommendation);
    }

    #[test]
    fn constant_series_holds() {
        let diary = diary_from_calories("2021-06-01", &[2000.0; 5]);
        let t = engine().detect_trend(&diary, Metric::Calories, DateRange::starting(d("2021-06-01"), 5)).unwrap();
        assert_eq!(t.slope, 0.0);
        assert!(t.matches_recommendation);
    }

    #[test]
    fn rising_intake_on_deficient_period_matches() {
        let diary = diary_from_calories("2021-06-01", &[1000.0, 1100.0, 1250.0, 1300.0, 1500.0]);
        let t = engine().detect_trend(&diary, Metric::Calories, DateRange::starting(d("2021-06-01"), 5)).unwrap();
        assert_eq!(t.recommended_direction, Direction::Increase);
        assert!(t.slope > 0.0);
        assert!(t.matches_recommendation);
    }

    #[test]
    fn trend_needs_three_days() {
        let diary = diary_from_calories("2021-06-01", &[2000.0; 2]);
        let err = engine().detect_trend(&diary, Metric::Calories, DateRange::starting(d("2021-06-01"), 2)).unwrap_err();
        assert_eq!(err, Error::PeriodTooShort { needed: 3, got: 2 });
        assert!(engine().assess_consistency(&diary, Metric::Calories, DateRange::single(d("2021-06-01"))).is_err());
    }

    #[test]
    fn consistency_examples() {
        let e = engine();
        let c = |series: &[f64]| {
            let diary = diary_from_calories("2021-06-01", series);
            e.assess_consistency(&diary, Metric::Calories, DateRange::starting(d("2021-06-01"), series.len() as u64))
                .unwrap()
        };
        let flat = c(&[1900.0; 4]);
        assert_eq!(flat.cv, 0.0);
        assert!(flat.consistent);
        let pair = c(&[1800.0, 2200.0]);
        assert!((pair.mean - 2000.0).abs() < 1e-9);
        assert!((pair.cv - 0.10).abs() < 1e-12);
        assert!(pair.consistent);
        let wide = c(&[1000.0, 3000.0]);
        assert!((wide.cv - 0.50).abs() < 1e-12);
        assert!(!wide.consistent);
        // zero mean
        let diary = diary_from_calories("2021-06-01", &[]);
        let z = e.assess_consistency(&diary, Metric::Calories, DateRange::starting(d("2021-06-01"), 3)).unwrap();
        assert_eq!(z.cv, 0.0);
    }

    fn two_food_diary() -> FoodDiary {
        let foods = vec![
            FoodItem { name: "Pasta".into(), per100g: NutrientVector { calories: 150.0, ..NutrientVector::ZERO } },
            FoodItem { name: "Apple".into(), per100g: NutrientVector { calories: 50.0, ..NutrientVector::ZERO } },
        ];
        let entries = vec![
            MealEntry { date: d("2021-06-01"), slot: Slot::Lunch, food: "Pasta".into(), grams: 200.0 },
            MealEntry { date: d("2021-06-01"), slot: Slot::Snack, food: "Apple".into(), grams: 200.0 },
        ];
        FoodDiary::new(foods, entries, NutrientGoals::default()).unwrap()
    }

    #[test]
    fn food_ranking_shares() {
        let r = engine().rank_food_impact(&two_food_diary(), Metric::Calories, DateRange::single(d("2021-06-01")));
        let names: Vec<_> = r.ranked.iter().map(|f| f.food.as_str()).collect();
        assert_eq!(names, ["Pasta", "Apple"]);
        assert!((r.ranked[0].share_pct - 75.0).abs() < 1e-9);
        assert!((r.ranked[1].share_pct - 25.0).abs() < 1e-9);
        assert_eq!(r.ranked[0].grams, 200.0);
    }

    #[test]
    fn food_ranking_single_and_empty() {
        let diary = diary_from_calories("2021-06-01", &[500.0]);
        let one = engine().rank_food_impact(&diary, Metric::Calories, DateRange::single(d("2021-06-01")));
        assert_eq!(one.ranked.len(), 1);
        assert!((one.ranked[0].share_pct - 100.0).abs() < 1e-9);
        let none = engine().rank_food_impact(&diary, Metric::Calories, DateRange::single(d("2021-07-01")));
        assert!(none.ranked.is_empty());
    }

    #[test]
    fn food_ranking_ties_break_by_name() {
        let r = engine().rank_food_impact(&two_food_diary(), Metric::Fat, DateRange::single(d("2021-06-01")));
        let names: Vec<_> = r.ranked.iter().map(|f| f.food.as_str()).collect();
        assert_eq!(names, ["Apple", "Pasta"]);
        assert!(r.ranked.iter().all(|f| f.share_pct == 0.0));
    }

    #[test]
    fn comparison_verdicts() {
        // week a: mean 2400 (dev 400); week b: mean 2100 (dev 100); δ = 40.
        let mut series = vec![2400.0; 7];
        series.extend([2100.0; 7]);
        let diary = diary_from_calories("2021-06-07", &series);
        let a = DateRange::starting(d("2021-06-07"), 7);
        let b = DateRange::starting(d("2021-06-14"), 7);
        let e = engine();
        let c = e.compare_ranges(&diary, Metric::Calories, a, b);
        assert!((c.abs_dev_a - 400.0).abs() < 1e-9);
        assert!((c.abs_dev_b - 100.0).abs() < 1e-9);
        assert_eq!(c.verdict, Verdict::Improved);
        assert_eq!(e.compare_ranges(&diary, Metric::Calories, b, a).verdict, Verdict::Worsened);
        assert_eq!(e.compare_ranges(&diary, Metric::Calories, a, a).verdict, Verdict::Unchanged);
    }

    #[test]
    fn ols_matches_two_point_slope_on_lines() {
        let line: Vec<f64> = (0..9).map(|i| 3.5 * i as f64 - 12.0).collect();
        assert!((ols_slope(&line) - (line[8] - line[0]) / 8.0).abs() < 1e-12);
    }

    fn query(kind: IntentKind, metrics: &[Metric], kinds: &[InsightKind], time: ResolvedTime) -> ParsedQuery {
        ParsedQuery {
            intent: Intent::matched(kind),
            metrics: metrics.iter().copied().collect(),
            insight_kinds: kinds.iter().copied().collect(),
            time: Some(TemporalExpression { raw: String::new(), resolved: time }),
            clarification: None,
            follow_up: false,
        }
    }

    #[test]
    fn bundle_dispatch() {
        let mut series = vec![2400.0; 7];
        series.extend([2100.0; 7]);
        let diary = diary_from_calories("2021-06-07", &series);
        let e = engine();
        let day = ResolvedTime::Single(DateRange::single(d("2021-06-13")));
        let basic =
            e.build_bundle(&diary, &query(IntentKind::BasicReport, &[Metric::Calories], &[], day.clone())).unwrap();
        assert_eq!(basic.intakes.len(), 1);
        assert_eq!(basic.assessments().len(), 1);

        let week = ResolvedTime::Single(DateRange::starting(d("2021-06-07"), 7));
        let food = e
            .build_bundle(
                &diary,
                &query(IntentKind::AdvancedInsight, &[Metric::Calories, Metric::Fat], &[InsightKind::Food], week),
            )
            .unwrap();
        assert_eq!(food.foods.len(), 2);
        assert!(food.intakes.is_empty());

        let pair = ResolvedTime::Pair(DateRange::starting(d("2021-06-14"), 7), DateRange::starting(d("2021-06-07"), 7));
        let cmp = e.build_bundle(&diary, &query(IntentKind::Compare, &[Metric::Calories], &[], pair)).unwrap();
        assert_eq!(cmp.comparisons.len(), 1);
        // the later period is always b
        assert_eq!(cmp.comparisons[0].period_b.start(), d("2021-06-14"));
        assert_eq!(cmp.comparisons[0].verdict, Verdict::Improved);

        let err = e
            .build_bundle(
                &diary,
                &query(IntentKind::AdvancedInsight, &[Metric::Calories], &[InsightKind::TrendConsistency], day),
            )
            .unwrap_err();
        assert!(matches!(err, Error::PeriodTooShort { .. }));
    }

    #[test]
    fn defaults_fill_metric_and_time() {
        let diary = diary_from_calories("2021-06-07", &[2000.0; 14]);
        let mut q = query(IntentKind::BasicReport, &[], &[], ResolvedTime::Single(DateRange::single(d("2021-06-07"))));
        q.time = None;
        let out = apply_defaults(&q, &diary, d("2021-06-20"), None);
        assert_eq!(out.metrics.iter().collect::<Vec<_>>(), [Metric::Calories]);
        assert_eq!(out.time.unwrap().resolved, ResolvedTime::Single(DateRange::single(d("2021-06-20"))));

        q.intent = Intent::matched(IntentKind::Compare);
        let out = apply_defaults(&q, &diary, d("2021-06-20"), None);
        assert_eq!(
            out.time.unwrap().resolved,
            ResolvedTime::Pair(DateRange::starting(d("2021-06-07"), 7), DateRange::starting(d("2021-06-14"), 7))
        );

        let prev = TemporalExpression {
            raw: "yesterday".into(),
            resolved: ResolvedTime::Single(DateRange::single(d("2021-06-10"))),
        };
        q.intent = Intent::matched(IntentKind::BasicReport);
        let out = apply_defaults(&q, &diary, d("2021-06-20"), Some(&prev));
        assert_eq!(out.time.unwrap(), prev);
    }
}
