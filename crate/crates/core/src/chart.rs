//! Deterministic SVG rendering for assessment charts.
//!
//! Output is SVG 1.1 on a fixed 640x360 view box. Elements are emitted in a
//! fixed order and every coordinate is printed with two decimals, so equal
//! specs always render to identical bytes. Structural elements carry a
//! `class` (`point`, `bar`, `goal`, `legend-entry`, ...) for tests and styling.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diary::short_date;
use crate::insight::{Assessment, ComparisonResult, FoodImpactRanking};
use crate::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948"];
const INK: &str = "#333333";
const GRID: &str = "#e6e6e6";
const GOAL: &str = "#c0392b";
/// Named bars in a food chart before the tail is folded into "other".
pub const FOOD_BAR_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Timeseries,
    Bars,
    GroupedBars,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

/// What to draw. `categories` label the x positions (days, foods or
/// periods); each series holds one value per category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub units: String,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_line: Option<f64>,
}

fn unique(labels: impl Iterator<Item = impl AsRef<str>>) -> bool {
    let mut seen = alloc::collections::BTreeSet::new();
    labels.into_iter().all(|l| seen.insert(String::from(l.as_ref())))
}

impl ChartSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidChart(m.into()));
        if self.series.is_empty() {
            return bad("a chart needs at least one series");
        }
        if !unique(self.series.iter().map(|s| &s.label)) {
            return bad("series labels must be unique");
        }
        if !unique(self.categories.iter()) {
            return bad("category labels must be unique");
        }
        if self.series.iter().any(|s| s.values.len() != self.categories.len()) {
            return bad("every series needs one value per category");
        }
        if self.series.iter().flat_map(|s| &s.values).any(|v| !v.is_finite())
            || self.goal_line.is_some_and(|g| !g.is_finite())
        {
            return bad("values must be finite");
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.series.iter().map(|s| s.values.len()).sum()
    }

    /// Content address: first 16 hex digits of the SHA-256 of the spec's JSON.
    pub fn id(&self) -> String {
        let json = serde_json::to_string(self).expect("chart spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn truncate_label(label: &str, max: usize) -> String {
    if label.chars().count() <= max {
        label.to_string()
    } else {
        let mut s: String = label.chars().take(max - 1).collect();
        s.push('\u{2026}');
        s
    }
}

/// Smallest of 1, 2, 2.5, 5 times a power of ten that is >= `v`.
fn nice_ceiling(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let mut base = 1.0;
    while base * 10.0 < v {
        base *= 10.0;
    }
    while base > v {
        base /= 10.0;
    }
    [1.0, 2.0, 2.5, 5.0, 10.0].into_iter().map(|m| m * base).find(|c| *c >= v).unwrap_or(base * 10.0)
}

struct Canvas {
    out: String,
    y_max: f64,
}

impl Canvas {
    fn line(&mut self, args: core::fmt::Arguments<'_>) {
        let _ = self.out.write_fmt(args);
        self.out.push('\n');
    }

    fn plot_w(&self) -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h(&self) -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    fn y(&self, v: f64) -> f64 {
        TOP + self.plot_h() - (v / self.y_max) * self.plot_h()
    }
}

fn header(c: &mut Canvas, title: &str) {
    c.line(format_args!(r#"<?xml version="1.0" encoding="UTF-8"?>"#));
    c.line(format_args!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 640 360" width="640" height="360" font-family="sans-serif">"#
    ));
    c.line(format_args!(r##"<rect class="background" x="0" y="0" width="640" height="360" fill="#ffffff"/>"##));
    c.line(format_args!(
        r#"<text class="title" x="320.00" y="28.00" text-anchor="middle" font-size="16" fill="{INK}">{}</text>"#,
        escape(title)
    ));
}

fn axes(c: &mut Canvas, units: &str) {
    let decimals = if c.y_max >= 10.0 { 0 } else { 1 };
    c.line(format_args!(r#"<g class="grid" stroke="{GRID}" stroke-width="1">"#));
    for i in 1..=5 {
        let y = c.y(c.y_max * f64::from(i) / 5.0);
        c.line(format_args!(r#"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#, LEFT + c.plot_w()));
    }
    c.line(format_args!("</g>"));
    let base = c.y(0.0);
    c.line(format_args!(r#"<g class="axes" stroke="{INK}" stroke-width="1">"#));
    c.line(format_args!(
        r#"<line class="x-axis" x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}"/>"#,
        LEFT + c.plot_w()
    ));
    c.line(format_args!(r#"<line class="y-axis" x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{base:.2}"/>"#));
    c.line(format_args!("</g>"));
    c.line(format_args!(r#"<g class="y-ticks" font-size="10" fill="{INK}" text-anchor="end">"#));
    for i in 0..=5 {
        let v = c.y_max * f64::from(i) / 5.0;
        c.line(format_args!(
            r#"<text class="tick" x="{:.2}" y="{:.2}">{v:.decimals$}</text>"#,
            LEFT - 6.0,
            c.y(v) + 3.0
        ));
    }
    c.line(format_args!("</g>"));
    c.line(format_args!(
        r#"<text class="units" x="{LEFT:.2}" y="{:.2}" font-size="10" fill="{INK}">{}</text>"#,
        TOP - 8.0,
        escape(units)
    ));
}

fn x_labels(c: &mut Canvas, categories: &[String], centers: &[f64]) {
    let font = if categories.len() > 10 { 8 } else { 10 };
    c.line(format_args!(r#"<g class="x-labels" font-size="{font}" fill="{INK}" text-anchor="middle">"#));
    for (label, x) in categories.iter().zip(centers) {
        c.line(format_args!(
            r#"<text class="x-label" x="{x:.2}" y="{:.2}">{}</text>"#,
            HEIGHT - BOTTOM + 16.0,
            escape(&truncate_label(label, 14))
        ));
    }
    c.line(format_args!("</g>"));
}

fn goal(c: &mut Canvas, goal: Option<f64>) {
    if let Some(g) = goal {
        let y = c.y(g);
        c.line(format_args!(
            r#"<line class="goal" x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{GOAL}" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            LEFT + c.plot_w()
        ));
        c.line(format_args!(
            r#"<text class="goal-label" x="{:.2}" y="{:.2}" font-size="10" fill="{GOAL}" text-anchor="end">goal {g:.0}</text>"#,
            LEFT + c.plot_w(),
            y - 4.0
        ));
    }
}

fn legend(c: &mut Canvas, series: &[Series]) {
    c.line(format_args!(r#"<g class="legend" font-size="10" fill="{INK}">"#));
    for (i, s) in series.iter().enumerate() {
        let x = WIDTH - RIGHT - 110.0;
        let y = TOP + 4.0 + 14.0 * i as f64;
        c.line(format_args!(
            r#"<g class="legend-entry"><rect x="{x:.2}" y="{y:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            PALETTE[i % PALETTE.len()],
            x + 14.0,
            y + 9.0,
            escape(&truncate_label(&s.label, 16))
        ));
    }
    c.line(format_args!("</g>"));
}

fn slot_centers(n: usize) -> Vec<f64> {
    let w = (WIDTH - LEFT - RIGHT) / n as f64;
    (0..n).map(|i| LEFT + w * (i as f64 + 0.5)).collect()
}

/// Renders a chart. Specs with no categories render a "no data" placeholder.
pub fn render(spec: &ChartSpec) -> Result<String> {
    spec.validate()?;
    let data_max =
        spec.series.iter().flat_map(|s| s.values.iter().copied()).chain(spec.goal_line).fold(0.0f64, f64::max);
    let mut c = Canvas { out: String::new(), y_max: nice_ceiling(data_max * 1.1) };
    header(&mut c, &spec.title);
    if spec.categories.is_empty() {
        c.line(format_args!(
            r#"<text class="no-data" x="320.00" y="180.00" text-anchor="middle" font-size="14" fill="{INK}">No data for this period</text>"#
        ));
        c.line(format_args!("</svg>"));
        return Ok(c.out);
    }
    axes(&mut c, &spec.units);
    let centers = slot_centers(spec.categories.len());
    let slot = (WIDTH - LEFT - RIGHT) / spec.categories.len() as f64;
    let base = c.y(0.0);
    c.line(format_args!(r#"<g class="data">"#));
    match spec.kind {
        ChartKind::Timeseries => {
            for (si, s) in spec.series.iter().enumerate() {
                let color = PALETTE[si % PALETTE.len()];
                let points: Vec<String> =
                    s.values.iter().zip(&centers).map(|(v, x)| format!("{x:.2},{:.2}", c.y(*v))).collect();
                c.line(format_args!(
                    r#"<polyline class="series-line" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    points.join(" ")
                ));
                for (v, x) in s.values.iter().zip(&centers) {
                    c.line(format_args!(
                        r#"<circle class="point" cx="{x:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                        c.y(*v)
                    ));
                }
            }
        }
        ChartKind::Bars | ChartKind::GroupedBars => {
            let n = spec.series.len() as f64;
            let group_w = slot * 0.7;
            let bar_w = group_w / n;
            for (ci, x) in centers.iter().enumerate() {
                for (si, s) in spec.series.iter().enumerate() {
                    let v = s.values[ci];
                    let left = x - group_w / 2.0 + bar_w * si as f64;
                    let top = c.y(v);
                    c.line(format_args!(
                        r#"<rect class="bar" x="{left:.2}" y="{top:.2}" width="{bar_w:.2}" height="{:.2}" fill="{}"/>"#,
                        base - top,
                        PALETTE[si % PALETTE.len()]
                    ));
                    c.line(format_args!(
                        r#"<text class="bar-label" x="{:.2}" y="{:.2}" font-size="9" fill="{INK}" text-anchor="middle">{v:.0}</text>"#,
                        left + bar_w / 2.0,
                        top - 3.0
                    ));
                }
            }
        }
    }
    c.line(format_args!("</g>"));
    x_labels(&mut c, &spec.categories, &centers);
    goal(&mut c, spec.goal_line);
    if spec.kind == ChartKind::GroupedBars || spec.series.len() > 1 {
        legend(&mut c, &spec.series);
    }
    c.line(format_args!("</svg>"));
    Ok(c.out)
}

fn title_case(word: &str) -> String {
    let mut chars = word.chars();
    chars.next().map(|c| c.to_ascii_uppercase().to_string() + chars.as_str()).unwrap_or_default()
}

fn food_bars(r: &FoodImpactRanking) -> ChartSpec {
    let mut categories: Vec<String> = Vec::new();
    let mut values = Vec::new();
    for row in r.ranked.iter().take(FOOD_BAR_LIMIT) {
        categories.push(row.food.clone());
        values.push(row.amount);
    }
    if r.ranked.len() > FOOD_BAR_LIMIT {
        categories.push("other".into());
        values.push(r.ranked[FOOD_BAR_LIMIT..].iter().map(|f| f.amount).sum());
    }
    ChartSpec {
        kind: ChartKind::Bars,
        title: format!("{} by food, {}", title_case(r.metric.id()), r.period),
        units: r.metric.unit().into(),
        categories,
        series: alloc::vec![Series { label: r.metric.id().into(), values }],
        goal_line: None,
    }
}

/// Grouped bars for one or more comparisons over the same two periods: one
/// group per period, one series per metric.
pub fn spec_from_comparisons(results: &[ComparisonResult]) -> Option<ChartSpec> {
    let first = results.first()?;
    if results.iter().any(|r| (r.period_a, r.period_b) != (first.period_a, first.period_b)) {
        return None;
    }
    let same_metric = results.iter().all(|r| r.metric == first.metric);
    let metrics: Vec<&str> = results.iter().map(|r| r.metric.id()).collect();
    Some(ChartSpec {
        kind: ChartKind::GroupedBars,
        title: format!("{}: {} vs {}", metrics.join(", "), first.period_a, first.period_b),
        units: if same_metric { first.metric.unit().into() } else { "daily mean".into() },
        categories: alloc::vec![format!("A: {}", first.period_a), format!("B: {}", first.period_b),],
        series: results
            .iter()
            .map(|r| Series { label: r.metric.id().into(), values: alloc::vec![r.mean_a, r.mean_b] })
            .collect(),
        goal_line: same_metric.then_some(first.target),
    })
}

/// Chart for an assessment, if it has one. Single-day intakes and
/// consistency assessments are text-only.
pub fn spec_from_assessment(assessment: &Assessment) -> Option<ChartSpec> {
    let daily_chart =
        |title: String, metric: crate::Metric, period: crate::DateRange, daily: &[f64], target: f64| ChartSpec {
            kind: ChartKind::Timeseries,
            title,
            units: metric.unit().into(),
            categories: period.days().map(short_date).collect(),
            series: alloc::vec![Series { label: metric.id().into(), values: daily.to_vec() }],
            goal_line: Some(target),
        };
    match assessment {
        Assessment::Intake(a) if !a.period.is_single_day() => {
            Some(daily_chart(format!("Daily {}, {}", a.metric, a.period), a.metric, a.period, &a.daily, a.target))
        }
        Assessment::Trend(t) => Some(daily_chart(
            format!("{} trend, {}", title_case(t.metric.id()), t.period),
            t.metric,
            t.period,
            &t.daily,
            t.target,
        )),
        Assessment::Food(r) => Some(food_bars(r)),
        Assessment::Comparison(c) => spec_from_comparisons(core::slice::from_ref(c)),
        Assessment::Intake(_) | Assessment::Consistency(_) => None,
    }
}
