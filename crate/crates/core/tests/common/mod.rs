//! Naive reference implementations and criterion checks shared by the core
//! integration tests and the workspace acceptance suite.
//!
//! The oracle reads raw catalog/entry tuples and never calls into the
//! engine's aggregation helpers.

#![allow(dead_code)]

use std::sync::Arc;

use chrono::{Days, NaiveDate};
use dietchat_core::dialogue::Pipeline;
use dietchat_core::insight::{ols_slope, Direction, InsightEngine, IntakeStatus, Verdict};
use dietchat_core::nlg::{compute_delay, Planner, SystemMessage, MAX_DELAY_MS, MAX_MESSAGE_CHARS, MIN_DELAY_MS};
use dietchat_core::{
    Conversation, DateRange, FoodDiary, FoodItem, InboundEvent, InsightKind, MealEntry, Metric, Mode, NutrientGoals,
    NutrientVector, Slot,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REL_TOL: f64 = 1e-9;

pub fn rel_close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

/// A diary as plain tuples: catalog `(name, per100g)`, entries
/// `(date, food, grams)` and goals, all in the fixed metric order
/// calories, carbohydrates, protein, fat, sugar, sodium.
#[derive(Debug, Clone)]
pub struct RawDiary {
    pub catalog: Vec<(String, [f64; 6])>,
    pub entries: Vec<(NaiveDate, String, f64)>,
    pub goals: [f64; 6],
}

fn idx(metric: Metric) -> usize {
    match metric {
        Metric::Calories => 0,
        Metric::Carbohydrates => 1,
        Metric::Protein => 2,
        Metric::Fat => 3,
        Metric::Sugar => 4,
        Metric::Sodium => 5,
    }
}

fn upper_only(metric: Metric) -> bool {
    matches!(metric, Metric::Sugar | Metric::Sodium)
}

impl RawDiary {
    pub fn build(&self) -> FoodDiary {
        let catalog = self
            .catalog
            .iter()
            .map(|(name, v)| FoodItem { name: name.clone(), per100g: NutrientVector::from_array(*v) })
            .collect();
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, (date, food, grams))| MealEntry {
                date: *date,
                slot: Slot::ALL[i % 4],
                food: food.clone(),
                grams: *grams,
            })
            .collect();
        FoodDiary::new(catalog, entries, NutrientGoals { daily_target: NutrientVector::from_array(self.goals) })
            .expect("generated diaries are valid")
    }

    fn per100g(&self, food: &str) -> [f64; 6] {
        for (name, v) in &self.catalog {
            if name == food {
                return *v;
            }
        }
        panic!("unknown food {food}")
    }

    fn days(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
        let mut out = Vec::new();
        let mut d = start;
        while d <= end {
            out.push(d);
            d = d.succ_opt().unwrap();
        }
        out
    }

    pub fn daily(&self, metric: Metric, start: NaiveDate, end: NaiveDate) -> Vec<f64> {
        let k = idx(metric);
        Self::days(start, end)
            .into_iter()
            .map(|d| {
                let mut total = 0.0;
                for (date, food, grams) in &self.entries {
                    if *date == d {
                        total += self.per100g(food)[k] * grams / 100.0;
                    }
                }
                total
            })
            .collect()
    }

    pub fn target(&self, metric: Metric) -> f64 {
        self.goals[idx(metric)]
    }
}

fn naive_mean(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in xs {
        s += x;
    }
    s / xs.len() as f64
}

/// Pairwise form of the least-squares slope:
/// `sum_{i<j} (y_j - y_i)(j - i) / sum_{i<j} (j - i)^2`.
pub fn naive_slope(ys: &[f64]) -> f64 {
    let (mut num, mut den) = (Neumaier::default(), 0.0);
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            let dx = (j - i) as f64;
            num.add((ys[j] - ys[i]) * dx);
            den += dx * dx;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num.total() / den
    }
}

/// Compensated summation, so that sums whose exact value is zero come out
/// as zero.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() { (self.sum - t) + x } else { (x - t) + self.sum };
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Population coefficient of variation via `var = sum_{i<j} (x_i - x_j)^2 / n^2`.
fn naive_cv(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = naive_mean(xs);
    if m == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            s += (xs[i] - xs[j]) * (xs[i] - xs[j]);
        }
    }
    (s / (n * n)).sqrt() / m
}

fn naive_status(dev_pct: f64, upper: bool) -> IntakeStatus {
    if dev_pct > 10.0 {
        IntakeStatus::Excess
    } else if dev_pct < -10.0 && !upper {
        IntakeStatus::Deficient
    } else {
        IntakeStatus::Balanced
    }
}

pub fn random_raw_diary(rng: &mut ChaCha8Rng) -> RawDiary {
    let n_foods = rng.gen_range(1..=10);
    let catalog: Vec<(String, [f64; 6])> = (0..n_foods)
        .map(|i| {
            let mut v = [0.0; 6];
            for (k, x) in v.iter_mut().enumerate() {
                let hi = if k == 5 {
                    900.0
                } else if k == 0 {
                    600.0
                } else {
                    60.0
                };
                // Some foods have none of a nutrient.
                *x = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.0..hi) };
            }
            (format!("food {i}"), v)
        })
        .collect();
    let start = NaiveDate::from_ymd_opt(2021, 3, 1).unwrap() + Days::new(rng.gen_range(0..40));
    let span = rng.gen_range(1..=14u64);
    let mut entries = Vec::new();
    for d in 0..span {
        let count = if d == 0 || d == span - 1 { rng.gen_range(1..=5) } else { rng.gen_range(0..=5) };
        for _ in 0..count {
            let food = catalog[rng.gen_range(0..n_foods)].0.clone();
            entries.push((start + Days::new(d), food, rng.gen_range(1.0..450.0)));
        }
    }
    let base = NutrientGoals::default().daily_target.to_array();
    let mut goals = [0.0; 6];
    for k in 0..6 {
        goals[k] = base[k] * rng.gen_range(0.5..1.5);
    }
    RawDiary { catalog, entries, goals }
}

fn random_period(rng: &mut ChaCha8Rng, first: NaiveDate, last: NaiveDate) -> DateRange {
    let lo = first - Days::new(3);
    let slack = (last - lo).num_days() as u64 + 3;
    let start = lo + Days::new(rng.gen_range(0..=slack));
    DateRange::starting(start, rng.gen_range(1..=14))
}

#[derive(Debug, Default, Clone, Copy)]
pub struct OracleStats {
    pub diaries: usize,
    pub intake: usize,
    pub trend: usize,
    pub consistency: usize,
    pub food: usize,
    pub comparison: usize,
}

fn fail<T>(what: &str, ctx: &str) -> Result<T, String> {
    Err(format!("{what} mismatch ({ctx})"))
}

macro_rules! ensure {
    ($cond:expr, $what:expr, $ctx:expr) => {
        if !$cond {
            return fail($what, &$ctx);
        }
    };
}

/// Compares the five analysis functions against the naive versions over
/// `cases` random diaries drawn from `seed`.
pub fn check_oracle_equivalence(cases: usize, seed: u64) -> Result<OracleStats, String> {
    let engine = InsightEngine::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = OracleStats::default();
    for case in 0..cases {
        let raw = random_raw_diary(&mut rng);
        let diary = raw.build();
        let (first, last) = (diary.first_date().unwrap(), diary.last_date().unwrap());
        stats.diaries += 1;
        for _ in 0..3 {
            let p = random_period(&mut rng, first, last);
            let q = random_period(&mut rng, first, last);
            for metric in Metric::ALL {
                let ctx = format!("case {case}, {metric}, {p}");
                let daily = raw.daily(metric, p.start(), p.end());
                let target = raw.target(metric);
                let mean = naive_mean(&daily);
                let dev = (mean - target) / target * 100.0;

                let a = engine.assess_intake(&diary, metric, p);
                ensure!(a.daily.len() == daily.len(), "intake daily length", ctx);
                for (x, y) in a.daily.iter().zip(&daily) {
                    ensure!(rel_close(*x, *y), "intake daily", ctx);
                }
                ensure!(rel_close(a.mean_daily, mean), "intake mean", ctx);
                ensure!(rel_close(a.deviation_pct, dev), "intake deviation", ctx);
                ensure!(a.status == naive_status(dev, upper_only(metric)), "intake status", ctx);
                let logged = raw.entries.iter().any(|(d, _, _)| p.start() <= *d && *d <= p.end());
                ensure!(a.empty == !logged, "intake empty flag", ctx);
                stats.intake += 1;

                match engine.detect_trend(&diary, metric, p) {
                    Err(_) => ensure!(daily.len() < 3, "trend availability", ctx),
                    Ok(t) => {
                        ensure!(daily.len() >= 3, "trend availability", ctx);
                        let slope = naive_slope(&daily);
                        ensure!(rel_close(t.slope, slope), "trend slope", ctx);
                        let eps = 0.01 * target;
                        let (dir, ok) = match naive_status(dev, upper_only(metric)) {
                            IntakeStatus::Excess => (Direction::Decrease, slope < -eps),
                            IntakeStatus::Deficient => (Direction::Increase, slope > eps),
                            IntakeStatus::Balanced => (Direction::Hold, slope.abs() <= eps),
                        };
                        ensure!(t.recommended_direction == dir, "trend direction", ctx);
                        ensure!(t.matches_recommendation == ok, "trend match flag", ctx);
                        stats.trend += 1;
                    }
                }

                match engine.assess_consistency(&diary, metric, p) {
                    Err(_) => ensure!(daily.len() < 2, "consistency availability", ctx),
                    Ok(c) => {
                        ensure!(daily.len() >= 2, "consistency availability", ctx);
                        let cv = naive_cv(&daily);
                        ensure!(rel_close(c.mean, mean), "consistency mean", ctx);
                        ensure!(rel_close(c.cv, cv), "consistency cv", ctx);
                        ensure!(c.consistent == (cv <= 0.15), "consistency flag", ctx);
                        stats.consistency += 1;
                    }
                }

                // Food ranking: totals per food name, then a selection sort.
                let mut foods: Vec<(String, f64, f64)> = Vec::new();
                for (d, food, grams) in &raw.entries {
                    if *d < p.start() || *d > p.end() {
                        continue;
                    }
                    let amount = raw.per100g(food)[idx(metric)] * grams / 100.0;
                    match foods.iter_mut().find(|f| &f.0 == food) {
                        Some(f) => {
                            f.1 += amount;
                            f.2 += grams;
                        }
                        None => foods.push((food.clone(), amount, *grams)),
                    }
                }
                let mut ordered = Vec::new();
                while !foods.is_empty() {
                    let mut best = 0;
                    for i in 1..foods.len() {
                        let (b, c) = (&foods[best], &foods[i]);
                        if c.1 > b.1 || (c.1 == b.1 && c.0 < b.0) {
                            best = i;
                        }
                    }
                    ordered.push(foods.remove(best));
                }
                let total: f64 = ordered.iter().map(|f| f.1).sum();
                let r = engine.rank_food_impact(&diary, metric, p);
                ensure!(r.ranked.len() == ordered.len(), "food count", ctx);
                ensure!(rel_close(r.total, total), "food total", ctx);
                for (got, want) in r.ranked.iter().zip(&ordered) {
                    ensure!(got.food == want.0, "food order", ctx);
                    ensure!(rel_close(got.amount, want.1), "food amount", ctx);
                    ensure!(rel_close(got.grams, want.2), "food grams", ctx);
                    let share = if total > 0.0 { want.1 / total * 100.0 } else { 0.0 };
                    ensure!(rel_close(got.share_pct, share), "food share", ctx);
                }
                stats.food += 1;

                let ctx = format!("case {case}, {metric}, {q} vs {p}");
                let mean_a = naive_mean(&raw.daily(metric, q.start(), q.end()));
                let (dev_a, dev_b) = ((mean_a - target).abs(), (mean - target).abs());
                let delta = 0.02 * target;
                let verdict = if dev_b < dev_a - delta {
                    Verdict::Improved
                } else if dev_b > dev_a + delta {
                    Verdict::Worsened
                } else {
                    Verdict::Unchanged
                };
                let c = engine.compare_ranges(&diary, metric, q, p);
                ensure!(rel_close(c.mean_a, mean_a) && rel_close(c.mean_b, mean), "comparison means", ctx);
                ensure!(rel_close(c.abs_dev_a, dev_a) && rel_close(c.abs_dev_b, dev_b), "comparison deviations", ctx);
                ensure!(c.verdict == verdict, "comparison verdict", ctx);
                stats.comparison += 1;
            }
        }
    }
    Ok(stats)
}

/// A diary of one food worth 100 kcal per 100 g whose daily grams follow
/// `series`, starting 2021-05-03.
pub fn series_diary(series: &[f64]) -> (FoodDiary, DateRange) {
    let start = NaiveDate::from_ymd_opt(2021, 5, 3).unwrap();
    let raw = RawDiary {
        catalog: vec![("unit food".into(), [100.0, 0.0, 0.0, 0.0, 0.0, 0.0])],
        entries: series
            .iter()
            .enumerate()
            .map(|(i, g)| (start + Days::new(i as u64), "unit food".into(), *g))
            .collect(),
        goals: NutrientGoals::default().daily_target.to_array(),
    };
    (raw.build(), DateRange::starting(start, series.len() as u64))
}

/// OLS slope equals the finite-difference slope on exactly linear series,
/// both directly and through the trend detector.
pub fn check_trend_linear(cases: usize, seed: u64) -> Result<usize, String> {
    let engine = InsightEngine::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let n = rng.gen_range(3..=14);
        let a = rng.gen_range(1500.0..3000.0);
        let b = rng.gen_range(-100.0..100.0);
        let ys: Vec<f64> = (0..n).map(|i| a + b * i as f64).collect();
        let fd = (ys[n - 1] - ys[0]) / (n - 1) as f64;
        let direct = ols_slope(&ys);
        if !rel_close(direct, fd) {
            return Err(format!("case {case}: ols {direct} vs finite difference {fd}"));
        }
        let (diary, period) = series_diary(&ys);
        let t = engine.detect_trend(&diary, Metric::Calories, period).map_err(|e| e.to_string())?;
        if !rel_close(t.slope, fd) {
            return Err(format!("case {case}: detector {} vs finite difference {fd}", t.slope));
        }
    }
    Ok(cases)
}

/// On strictly monotone series whose step exceeds the dead zone, an excess
/// matches only when decreasing and a deficit only when increasing.
pub fn check_trend_signs(cases: usize, seed: u64) -> Result<usize, String> {
    let engine = InsightEngine::default();
    let goal = NutrientGoals::default().target(Metric::Calories);
    let eps = 0.01 * goal;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for case in 0..cases {
        let n = rng.gen_range(3..=14);
        let excess = rng.gen_bool(0.5);
        let falling = rng.gen_bool(0.5);
        // Monotone but not linear: steps vary between 1.5 and 4 epsilons.
        let steps: Vec<f64> = (1..n).map(|_| rng.gen_range(1.5 * eps..4.0 * eps)).collect();
        let mut ys = vec![0.0];
        for s in &steps {
            ys.push(ys.last().unwrap() + if falling { -s } else { *s });
        }
        let m = ys.iter().sum::<f64>() / n as f64;
        let centre = if excess { goal * 1.5 } else { goal * 0.5 };
        let ys: Vec<f64> = ys.iter().map(|y| y - m + centre).collect();
        let (diary, period) = series_diary(&ys);
        let t = engine.detect_trend(&diary, Metric::Calories, period).map_err(|e| e.to_string())?;
        let want_dir = if excess { Direction::Decrease } else { Direction::Increase };
        if t.recommended_direction != want_dir {
            return Err(format!("case {case}: direction {:?}, wanted {want_dir:?}", t.recommended_direction));
        }
        if (t.slope < 0.0) != falling {
            return Err(format!("case {case}: slope {} has the wrong sign", t.slope));
        }
        let want_match = excess == falling;
        if t.matches_recommendation != want_match {
            return Err(format!("case {case}: match flag {}, wanted {want_match}", t.matches_recommendation));
        }
        checked += 1;
    }
    Ok(checked)
}

fn audit_text(text: &str, delay_ms: u32, what: &str) -> Result<(), String> {
    if text.contains('{') || text.contains('}') {
        return Err(format!("{what}: unfilled slot in {text:?}"));
    }
    if text.chars().count() > MAX_MESSAGE_CHARS {
        return Err(format!("{what}: {} chars", text.chars().count()));
    }
    if !(MIN_DELAY_MS..=MAX_DELAY_MS).contains(&delay_ms) {
        return Err(format!("{what}: delay {delay_ms}"));
    }
    Ok(())
}

/// Assessments covering every template variant, with numbers at both ends
/// of their plausible range.
pub fn variant_assessments() -> Vec<dietchat_core::Assessment> {
    use dietchat_core::insight::*;
    use dietchat_core::Assessment as A;
    let d = |m: u32, day: u32| NaiveDate::from_ymd_opt(2021, m, day).unwrap();
    let periods = [DateRange::single(d(6, 10)), DateRange::new(d(9, 27), d(10, 10)).unwrap()];
    let longest_food =
        dietchat_core::sample::sample_catalog().into_iter().map(|f| f.name).max_by_key(|n| n.chars().count()).unwrap();
    let mut out = Vec::new();
    for metric in Metric::ALL {
        for p in periods {
            for scale in [0.0, 1.0, 99_999.5] {
                let n = p.day_count();
                for (status, empty) in [
                    (IntakeStatus::Excess, false),
                    (IntakeStatus::Deficient, false),
                    (IntakeStatus::Balanced, false),
                    (IntakeStatus::Balanced, true),
                ] {
                    out.push(A::Intake(IntakeAssessment {
                        metric,
                        period: p,
                        daily: vec![scale; n],
                        mean_daily: scale,
                        target: scale * 2.0 + 1.0,
                        deviation_pct: -scale,
                        status,
                        empty,
                    }));
                }
                for dir in [Direction::Decrease, Direction::Increase, Direction::Hold] {
                    for matches_recommendation in [true, false] {
                        out.push(A::Trend(TrendAssessment {
                            metric,
                            period: p,
                            daily: vec![scale; n],
                            target: scale,
                            slope: -scale,
                            recommended_direction: dir,
                            matches_recommendation,
                        }));
                    }
                }
                for consistent in [true, false] {
                    out.push(A::Consistency(ConsistencyAssessment {
                        metric,
                        period: p,
                        mean: scale,
                        cv: scale,
                        consistent,
                    }));
                }
                for ranked in [
                    vec![],
                    vec![FoodImpact { food: longest_food.clone(), amount: scale, grams: scale, share_pct: 100.0 }],
                ] {
                    out.push(A::Food(FoodImpactRanking {
                        metric,
                        period: p,
                        total: if ranked.is_empty() { 0.0 } else { scale.max(1.0) },
                        ranked,
                    }));
                }
                for verdict in [Verdict::Improved, Verdict::Worsened, Verdict::Unchanged] {
                    out.push(A::Comparison(ComparisonResult {
                        metric,
                        period_a: p,
                        period_b: periods[1],
                        mean_a: scale,
                        mean_b: -scale,
                        target: scale,
                        abs_dev_a: scale,
                        abs_dev_b: scale,
                        verdict,
                    }));
                }
            }
        }
    }
    out
}

/// Every paraphrase of every variant, plus every system message and the
/// button prompts, stays brace-free, within the length cap and with a
/// delay inside the allowed window. Returns the number of texts checked.
pub fn check_realization_hygiene() -> Result<usize, String> {
    let mut checked = 0;
    let mut variants_seen = std::collections::BTreeSet::new();
    for ascii_only in [false, true] {
        let planner = Planner::new(Default::default(), ascii_only);
        for a in variant_assessments() {
            let (kind, variant, _) = dietchat_core::nlg::slots_for(&a);
            variants_seen.insert((kind, variant));
            for text in planner.realize_all(&a).map_err(|e| e.to_string())? {
                audit_text(&text, compute_delay(&text), &format!("{kind:?}.{variant}"))?;
                checked += 1;
            }
        }
        for which in SystemMessage::ALL {
            let m = planner.system(which, &"x".repeat(160));
            audit_text(m.text().unwrap(), m.delay_ms, &format!("system.{}", which.variant()))?;
            checked += 1;
        }
        let all: dietchat_core::nlu::InsightKindSet = InsightKind::ALL.into_iter().collect();
        for (sel, updated) in [(Default::default(), false), (all, true)] {
            let m = planner.buttons(&sel, updated);
            let dietchat_core::nlg::MessageBody::Buttons { buttons } = &m.body else { unreachable!() };
            audit_text(&buttons.prompt, m.delay_ms, "buttons")?;
            checked += 1;
        }
    }
    for kind in dietchat_core::nlg::TemplateKind::ALL {
        if kind == dietchat_core::nlg::TemplateKind::System {
            continue;
        }
        for v in kind.variants() {
            if !variants_seen.contains(&(kind, *v)) {
                return Err(format!("variant {kind:?}.{v} not exercised"));
            }
        }
    }
    Ok(checked)
}

/// Events that drive the machine, grouped by what they exercise.
pub fn probe_events() -> Vec<(&'static str, InboundEvent)> {
    let mut out = vec![
        ("greet", InboundEvent::text("hello")),
        ("help", InboundEvent::text("what can you do?")),
        ("out_of_scope", InboundEvent::text("what's the weather like in Paris")),
        ("blank", InboundEvent::text("   ")),
        ("basic_report", InboundEvent::text("how many calories did I have yesterday?")),
        ("advanced", InboundEvent::text("show my fat trend in week 1")),
        ("compare", InboundEvent::text("compare my carbs in week 1 vs week 2")),
        ("more_insights", InboundEvent::text("tell me more about this")),
        ("bad_date", InboundEvent::text("calories on 2021-02-30")),
        ("submit", InboundEvent::ButtonSubmit),
    ];
    for kind in InsightKind::ALL {
        out.push(("toggle", InboundEvent::ButtonToggle { kind }));
    }
    out
}

/// Every (mode, event) pair, with the picker empty and non-empty, yields at
/// least one outbound message and lands in the expected mode. Returns the
/// number of pairs checked.
pub fn check_state_machine_totality() -> Result<usize, String> {
    let pipeline = Arc::new(Pipeline::default());
    let diary = Arc::new(dietchat_core::sample::generate_sample_diary(7));
    let reference = dietchat_core::sample::sample_reference_date();
    let mut checked = 0;
    for (setup, start_mode) in [
        (vec![], Mode::Idle),
        (vec![InboundEvent::text("how much fat last week")], Mode::Idle),
        (vec![InboundEvent::text("tell me more about this")], Mode::AwaitingButtonSubmit),
        (
            vec![
                InboundEvent::text("tell me more about this"),
                InboundEvent::ButtonToggle { kind: InsightKind::Intake },
            ],
            Mode::AwaitingButtonSubmit,
        ),
    ] {
        for (label, event) in probe_events() {
            let mut c = Conversation::new(pipeline.clone(), diary.clone(), reference);
            for e in &setup {
                c.handle(e.clone());
            }
            if c.state().mode != start_mode {
                return Err(format!("setup {setup:?} did not reach {start_mode:?}"));
            }
            let selection_empty = c.state().pending_selection.is_empty();
            let out = c.handle(event.clone());
            if out.is_empty() {
                return Err(format!("{start_mode:?} x {label}: no outbound message"));
            }
            let expected = match (&event, start_mode) {
                (InboundEvent::UserText { .. }, _) if label == "more_insights" => Mode::AwaitingButtonSubmit,
                (InboundEvent::UserText { .. }, _) => Mode::Idle,
                (_, Mode::Idle) => Mode::Idle,
                (InboundEvent::ButtonToggle { .. }, m) => m,
                (InboundEvent::ButtonSubmit, m) => {
                    if selection_empty {
                        m
                    } else {
                        Mode::Idle
                    }
                }
            };
            if c.state().mode != expected {
                return Err(format!("{start_mode:?} x {label}: ended in {:?}, wanted {expected:?}", c.state().mode));
            }
            for m in &out {
                let text = m.text.as_deref().or(m.buttons.as_ref().map(|b| b.prompt.as_str())).unwrap_or("");
                if m.chart_id.is_none() {
                    audit_text(text, m.delay_ms, label)?;
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}
