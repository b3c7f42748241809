//! The 10-point informativeness quiz: scripted questions, an answer key
//! computed straight from the raw diary entries, and payload-based scoring.
//!
//! The answer key deliberately avoids the insight engine and the diary's
//! aggregation helpers; it only reads entries, the catalog, goals and the
//! shared [`Thresholds`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::diary::{DateRange, FoodDiary};
use crate::insight::{Assessment, IntakeStatus, Thresholds, Verdict};
use crate::{Error, Metric, NutrientVector, Result};

/// Relative tolerance for food quantity answers.
pub const QUANTITY_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuizTask {
    DayAnalysis,
    FoodAnalysis,
    WeekAnalysis,
    WeeksComparison,
}

impl QuizTask {
    pub const ALL: [QuizTask; 4] =
        [QuizTask::DayAnalysis, QuizTask::FoodAnalysis, QuizTask::WeekAnalysis, QuizTask::WeeksComparison];

    pub fn points(self) -> u32 {
        match self {
            QuizTask::FoodAnalysis => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Answer {
    Status { status: IntakeStatus },
    TopFood { food: String },
    FoodQuantity { food: String, amount: f64 },
    Verdict { verdict: Verdict },
}

impl Answer {
    pub fn matches(&self, got: &Answer) -> bool {
        match (self, got) {
            (Answer::FoodQuantity { amount: want, .. }, Answer::FoodQuantity { amount: have, .. }) => {
                (have - want).abs() <= QUANTITY_TOLERANCE * want.abs()
            }
            _ => self == got,
        }
    }
}

fn status_name(s: IntakeStatus) -> &'static str {
    match s {
        IntakeStatus::Deficient => "deficient",
        IntakeStatus::Balanced => "balanced",
        IntakeStatus::Excess => "excess",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Improved => "improved",
        Verdict::Worsened => "worsened",
        Verdict::Unchanged => "unchanged",
    }
}

impl core::fmt::Display for Answer {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Answer::Status { status } => f.write_str(status_name(*status)),
            Answer::TopFood { food } => f.write_str(food),
            Answer::FoodQuantity { food, amount } => write!(f, "{amount:.1} from {food}"),
            Answer::Verdict { verdict } => f.write_str(verdict_name(*verdict)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub task: QuizTask,
    pub metric: Metric,
    pub period: DateRange,
    /// The later period of a comparison question.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub later_period: Option<DateRange>,
    /// What the harness types into the chat.
    pub utterance: String,
    pub expected: Answer,
    /// Distance from the nearest decision boundary, in percent of the
    /// relevant target (or of the top amount for food questions).
    pub margin_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerKey {
    pub quiz_day: NaiveDate,
    pub week1: DateRange,
    pub week2: DateRange,
    pub questions: Vec<Question>,
}

impl AnswerKey {
    pub fn min_margin_pct(&self) -> f64 {
        self.questions.iter().map(|q| q.margin_pct).fold(f64::INFINITY, f64::min)
    }
}

fn component(v: &NutrientVector, metric: Metric) -> f64 {
    match metric {
        Metric::Calories => v.calories,
        Metric::Carbohydrates => v.carbohydrates,
        Metric::Protein => v.protein,
        Metric::Fat => v.fat,
        Metric::Sugar => v.sugar,
        Metric::Sodium => v.sodium,
    }
}

struct Flat {
    date: NaiveDate,
    food: String,
    per100g: NutrientVector,
    grams: f64,
}

fn flatten(diary: &FoodDiary) -> Vec<Flat> {
    diary
        .entries()
        .iter()
        .map(|e| {
            let item = diary
                .catalog()
                .iter()
                .find(|c| c.name.to_lowercase() == e.food.to_lowercase())
                .expect("validated diary");
            Flat { date: e.date, food: item.name.clone(), per100g: item.per100g, grams: e.grams }
        })
        .collect()
}

fn amount(f: &Flat, metric: Metric) -> f64 {
    component(&f.per100g, metric) * f.grams / 100.0
}

fn mean_over(flat: &[Flat], metric: Metric, start: NaiveDate, days: u64) -> f64 {
    let mut total = 0.0;
    for i in 0..days {
        let day = start + Days::new(i);
        let mut day_total = 0.0;
        for f in flat.iter().filter(|f| f.date == day) {
            day_total += amount(f, metric);
        }
        total += day_total;
    }
    total / days as f64
}

fn status_answer(
    flat: &[Flat],
    diary: &FoodDiary,
    t: &Thresholds,
    metric: Metric,
    start: NaiveDate,
    days: u64,
) -> (IntakeStatus, f64) {
    let target = component(&diary.goals().daily_target, metric);
    let dev = (mean_over(flat, metric, start, days) - target) / target * 100.0;
    let band = t.balance_band_pct;
    let upper_only = matches!(metric, Metric::Sugar | Metric::Sodium);
    let status = if dev > band {
        IntakeStatus::Excess
    } else if !upper_only && dev < -band {
        IntakeStatus::Deficient
    } else {
        IntakeStatus::Balanced
    };
    let margin = if upper_only { (dev - band).abs() } else { (dev - band).abs().min((dev + band).abs()) };
    (status, margin)
}

fn top_food(flat: &[Flat], metric: Metric, day: NaiveDate) -> Result<(String, f64, f64)> {
    let mut totals: Vec<(String, f64)> = Vec::new();
    for f in flat.iter().filter(|f| f.date == day) {
        match totals.iter_mut().find(|(n, _)| n.to_lowercase() == f.food.to_lowercase()) {
            Some(row) => row.1 += amount(f, metric),
            None => totals.push((f.food.clone(), amount(f, metric))),
        }
    }
    // Selection of the maximum by repeated scanning; no sorting shared with the engine.
    let mut best: Option<usize> = None;
    for (i, (_, v)) in totals.iter().enumerate() {
        if best.is_none_or(|b| *v > totals[b].1) {
            best = Some(i);
        }
    }
    let best = best.ok_or_else(|| Error::DegenerateDiary(format!("no entries on {day}")))?;
    let top = totals[best].1;
    let runner_up = totals.iter().enumerate().filter(|(i, _)| *i != best).map(|(_, (_, v))| *v).fold(0.0f64, f64::max);
    if top <= 0.0 || runner_up == top {
        return Err(Error::DegenerateDiary(format!("tie for the top {} food on {day}", metric.id())));
    }
    Ok((totals[best].0.clone(), top, (top - runner_up) / top * 100.0))
}

fn verdict_answer(
    flat: &[Flat],
    diary: &FoodDiary,
    t: &Thresholds,
    metric: Metric,
    w1: NaiveDate,
    w2: NaiveDate,
) -> (Verdict, f64) {
    let target = component(&diary.goals().daily_target, metric);
    let dev_a = (mean_over(flat, metric, w1, 7) - target).abs();
    let dev_b = (mean_over(flat, metric, w2, 7) - target).abs();
    let delta = t.comparison_delta_fraction * target;
    let verdict = if dev_b < dev_a - delta {
        Verdict::Improved
    } else if dev_b > dev_a + delta {
        Verdict::Worsened
    } else {
        Verdict::Unchanged
    };
    let margin = ((dev_b - dev_a + delta).abs()).min((dev_b - dev_a - delta).abs()) / target * 100.0;
    (verdict, margin)
}

const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

/// "June 10th".
pub fn spoken_date(day: NaiveDate) -> String {
    let d = day.day();
    let suffix = match (d % 10, d % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{} {d}{suffix}", MONTH_NAMES[day.month0() as usize])
}

/// Computes the answer key. The quiz day is the day with the most entries
/// (earliest on ties); week 1 starts on the first logged date.
///
/// Refuses diaries whose answers are ill-defined: a tie for the top food on
/// the quiz day, or an "unchanged" verdict in the weeks comparison.
pub fn compute_answer_key(diary: &FoodDiary, thresholds: &Thresholds) -> Result<AnswerKey> {
    let flat = flatten(diary);
    let first =
        flat.iter().map(|f| f.date).min().ok_or_else(|| Error::DegenerateDiary("the diary has no entries".into()))?;
    let mut quiz_day = first;
    let mut most = 0;
    let last = flat.iter().map(|f| f.date).max().unwrap_or(first);
    let mut day = first;
    while day <= last {
        let n = flat.iter().filter(|f| f.date == day).count();
        if n > most {
            most = n;
            quiz_day = day;
        }
        day = day + Days::new(1);
    }
    let w1 = first;
    let w2 = first + Days::new(7);
    let week1 = DateRange::starting(w1, 7);
    let week2 = DateRange::starting(w2, 7);
    let on = spoken_date(quiz_day);
    let mut questions = Vec::new();

    for (metric, utterance) in [
        (Metric::Calories, format!("Were my calories balanced on {on}?")),
        (Metric::Carbohydrates, format!("How many carbs did I have on {on}?")),
    ] {
        let (status, margin_pct) = status_answer(&flat, diary, thresholds, metric, quiz_day, 1);
        questions.push(Question {
            task: QuizTask::DayAnalysis,
            metric,
            period: DateRange::single(quiz_day),
            later_period: None,
            utterance,
            expected: Answer::Status { status },
            margin_pct,
        });
    }
    for metric in [Metric::Calories, Metric::Fat] {
        let (food, amount, margin_pct) = top_food(&flat, metric, quiz_day)?;
        let m = metric.id();
        questions.push(Question {
            task: QuizTask::FoodAnalysis,
            metric,
            period: DateRange::single(quiz_day),
            later_period: None,
            utterance: format!("Which food gave me the most {m} on {on}?"),
            expected: Answer::TopFood { food: food.clone() },
            margin_pct,
        });
        questions.push(Question {
            task: QuizTask::FoodAnalysis,
            metric,
            period: DateRange::single(quiz_day),
            later_period: None,
            utterance: format!("Show me the food breakdown of my {m} for {on}"),
            expected: Answer::FoodQuantity { food, amount },
            margin_pct,
        });
    }
    for (metric, utterance) in [
        (Metric::Calories, "How were my calories in week 1?"),
        (Metric::Carbohydrates, "Give me a summary of my carbs for the first week"),
    ] {
        let (status, margin_pct) = status_answer(&flat, diary, thresholds, metric, w1, 7);
        questions.push(Question {
            task: QuizTask::WeekAnalysis,
            metric,
            period: week1,
            later_period: None,
            utterance: utterance.to_string(),
            expected: Answer::Status { status },
            margin_pct,
        });
    }
    for (metric, utterance) in [
        (Metric::Calories, "Did my calories improve from week 1 to week 2?"),
        (Metric::Carbohydrates, "Compare my carbs in week 1 vs week 2"),
    ] {
        let (verdict, margin_pct) = verdict_answer(&flat, diary, thresholds, metric, w1, w2);
        if verdict == Verdict::Unchanged {
            return Err(Error::DegenerateDiary(format!("{} is unchanged between the two weeks", metric.id())));
        }
        questions.push(Question {
            task: QuizTask::WeeksComparison,
            metric,
            period: week1,
            later_period: Some(week2),
            utterance: utterance.to_string(),
            expected: Answer::Verdict { verdict },
            margin_pct,
        });
    }
    Ok(AnswerKey { quiz_day, week1, week2, questions })
}

/// Reads the answer to `question` out of the payloads of the messages the
/// chatbot sent in reply. Prose is never inspected.
pub fn extract_answer(question: &Question, payloads: &[Assessment]) -> Option<Answer> {
    payloads.iter().find_map(|a| match (&question.expected, a) {
        (Answer::Status { .. }, Assessment::Intake(i))
            if i.metric == question.metric && i.period == question.period =>
        {
            Some(Answer::Status { status: i.status })
        }
        (Answer::TopFood { .. }, Assessment::Food(r)) if r.metric == question.metric && r.period == question.period => {
            r.ranked.first().map(|top| Answer::TopFood { food: top.food.clone() })
        }
        (Answer::FoodQuantity { .. }, Assessment::Food(r))
            if r.metric == question.metric && r.period == question.period =>
        {
            r.ranked.first().map(|top| Answer::FoodQuantity { food: top.food.clone(), amount: top.amount })
        }
        (Answer::Verdict { .. }, Assessment::Comparison(c))
            if c.metric == question.metric
                && c.period_a == question.period
                && Some(c.period_b) == question.later_period =>
        {
            Some(Answer::Verdict { verdict: c.verdict })
        }
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionResult {
    pub task: QuizTask,
    pub utterance: String,
    pub expected: Answer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub got: Option<Answer>,
    pub correct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task: QuizTask,
    pub points: u32,
    pub max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub quiz_day: NaiveDate,
    pub tasks: Vec<TaskScore>,
    pub total: u32,
    pub max: u32,
    pub questions: Vec<QuestionResult>,
}

impl ScoreReport {
    pub fn is_perfect(&self) -> bool {
        self.total == self.max
    }
}

pub fn score_question(question: &Question, payloads: &[Assessment]) -> QuestionResult {
    let got = extract_answer(question, payloads);
    let correct = got.as_ref().is_some_and(|g| question.expected.matches(g));
    let diagnostic = match &got {
        None => Some(format!("no matching machine_payload in the reply to `{}`", question.utterance)),
        Some(g) if !correct => Some(format!("`{}` answered {g}, expected {}", question.utterance, question.expected)),
        Some(_) => None,
    };
    QuestionResult {
        task: question.task,
        utterance: question.utterance.clone(),
        expected: question.expected.clone(),
        got,
        correct,
        diagnostic,
    }
}

/// One point per correct question, grouped by task.
pub fn score_report(key: &AnswerKey, results: Vec<QuestionResult>) -> ScoreReport {
    let tasks: Vec<TaskScore> = QuizTask::ALL
        .iter()
        .map(|&task| TaskScore {
            task,
            points: results.iter().filter(|r| r.task == task && r.correct).count() as u32,
            max: task.points(),
        })
        .collect();
    ScoreReport {
        quiz_day: key.quiz_day,
        total: tasks.iter().map(|t| t.points).sum(),
        max: tasks.iter().map(|t| t.max).sum(),
        tasks,
        questions: results,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diary::{FoodItem, MealEntry, NutrientGoals, Slot};
    use crate::insight::{ComparisonResult, FoodImpact, FoodImpactRanking};
    use alloc::vec;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn item(name: &str, kcal: f64, carbs: f64, fat: f64) -> FoodItem {
        FoodItem {
            name: name.into(),
            per100g: NutrientVector { calories: kcal, carbohydrates: carbs, fat, ..NutrientVector::ZERO },
        }
    }

    /// Two weeks at exactly the calorie and carb targets, then scaled.
    fn diary(week2_scale: f64) -> FoodDiary {
        let catalog =
            vec![item("Bread", 250.0, 40.0, 3.0), item("Cheese", 400.0, 1.0, 33.0), item("Rice", 130.0, 28.0, 0.3)];
        let mut entries = Vec::new();
        for i in 0..14u64 {
            let date = d("2021-06-07") + Days::new(i);
            let s = if i >= 7 { week2_scale } else { 1.0 };
            // 2000 kcal and 260 g carbs per day.
            entries.push(MealEntry { date, slot: Slot::Breakfast, food: "Bread".into(), grams: 400.0 * s });
            entries.push(MealEntry { date, slot: Slot::Lunch, food: "Rice".into(), grams: 500.0 * s });
            entries.push(MealEntry { date, slot: Slot::Dinner, food: "Cheese".into(), grams: 37.5 * s });
        }
        // Hand check: 1000 + 650 + 150 = 1800 kcal; 160 + 140 + 0.375 carbs.
        FoodDiary::new(catalog, entries, NutrientGoals::default()).unwrap()
    }

    #[test]
    fn spoken_dates() {
        assert_eq!(spoken_date(d("2021-06-01")), "June 1st");
        assert_eq!(spoken_date(d("2021-06-12")), "June 12th");
        assert_eq!(spoken_date(d("2021-06-22")), "June 22nd");
        assert_eq!(spoken_date(d("2021-06-23")), "June 23rd");
    }

    #[test]
    fn identical_weeks_are_degenerate() {
        assert!(matches!(compute_answer_key(&diary(1.0), &Thresholds::default()), Err(Error::DegenerateDiary(_))));
    }

    #[test]
    fn hand_computed_key() {
        // Week 1: 1800 kcal (-10%, balanced at the boundary), 300.375 g carbs
        // (+15.5%, excess). Week 2 at 1.15x: 2070 kcal (+3.5%), 345.4 g carbs.
        let key = compute_answer_key(&diary(1.15), &Thresholds::default()).unwrap();
        assert_eq!(key.quiz_day, d("2021-06-07"));
        assert_eq!(key.questions.len(), 10);
        let expected: Vec<Answer> = key.questions.iter().map(|q| q.expected.clone()).collect();
        assert_eq!(expected[0], Answer::Status { status: IntakeStatus::Balanced });
        assert_eq!(expected[1], Answer::Status { status: IntakeStatus::Excess });
        assert_eq!(expected[2], Answer::TopFood { food: "Bread".into() });
        assert_eq!(expected[3], Answer::FoodQuantity { food: "Bread".into(), amount: 1000.0 });
        assert_eq!(expected[4], Answer::TopFood { food: "Cheese".into() });
        assert_eq!(expected[5], Answer::FoodQuantity { food: "Cheese".into(), amount: 12.375 });
        assert_eq!(expected[8], Answer::Verdict { verdict: Verdict::Improved });
        assert_eq!(expected[9], Answer::Verdict { verdict: Verdict::Worsened });
        let points: u32 = QuizTask::ALL.iter().map(|t| t.points()).sum();
        assert_eq!(points, 10);
        assert_eq!(key.questions.iter().filter(|q| q.task == QuizTask::FoodAnalysis).count(), 4);
    }

    #[test]
    fn scoring_reads_payloads_only() {
        let key = compute_answer_key(&diary(1.15), &Thresholds::default()).unwrap();
        let q = &key.questions[3];
        let ranking = FoodImpactRanking {
            metric: Metric::Calories,
            period: q.period,
            total: 1000.0,
            ranked: vec![FoodImpact { food: "Bread".into(), amount: 1005.0, grams: 400.0, share_pct: 100.0 }],
        };
        let r = score_question(q, &[Assessment::Food(ranking.clone())]);
        assert!(r.correct, "{r:?}");
        let mut off = ranking;
        off.ranked[0].amount = 1020.0;
        assert!(!score_question(q, &[Assessment::Food(off)]).correct);
        let missing = score_question(q, &[]);
        assert!(!missing.correct);
        assert!(missing.diagnostic.unwrap().contains(&q.utterance));

        let cq = &key.questions[8];
        let cmp = ComparisonResult {
            metric: Metric::Calories,
            period_a: key.week1,
            period_b: key.week2,
            mean_a: 0.0,
            mean_b: 0.0,
            target: 2000.0,
            abs_dev_a: 0.0,
            abs_dev_b: 0.0,
            verdict: Verdict::Improved,
        };
        assert!(score_question(cq, &[Assessment::Comparison(cmp.clone())]).correct);
        let swapped = ComparisonResult { period_a: key.week2, period_b: key.week1, ..cmp };
        assert!(!score_question(cq, &[Assessment::Comparison(swapped)]).correct);
    }

    #[test]
    fn report_totals() {
        let key = compute_answer_key(&diary(1.15), &Thresholds::default()).unwrap();
        let results: Vec<QuestionResult> = key.questions.iter().map(|q| score_question(q, &[])).collect();
        let report = score_report(&key, results);
        assert_eq!((report.total, report.max), (0, 10));
        assert!(!report.is_perfect());
    }
}
