use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diary::DateRange;
use crate::insight::{Assessment, Direction, IntakeStatus, Verdict};
use crate::nlu::InsightKind;
use crate::{Error, Metric, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    Intake,
    Trend,
    Consistency,
    Food,
    Comparison,
    System,
}

impl TemplateKind {
    fn id(self) -> &'static str {
        match self {
            TemplateKind::Intake => "intake",
            TemplateKind::Trend => "trend",
            TemplateKind::Consistency => "consistency",
            TemplateKind::Food => "food",
            TemplateKind::Comparison => "comparison",
            TemplateKind::System => "system",
        }
    }

    /// Slots an assessment of this kind always provides.
    pub fn slots(self) -> &'static [&'static str] {
        match self {
            TemplateKind::Intake => &[
                "metric",
                "metric_cap",
                "metric_noun",
                "unit",
                "period",
                "period_phrase",
                "per_day",
                "value",
                "target",
                "deviation_pct",
                "abs_deviation_pct",
            ],
            TemplateKind::Trend => &[
                "metric",
                "metric_cap",
                "metric_noun",
                "unit",
                "period",
                "period_phrase",
                "slope",
                "abs_slope",
                "target",
            ],
            TemplateKind::Consistency => {
                &["metric", "metric_cap", "metric_noun", "unit", "period", "period_phrase", "value", "cv_pct"]
            }
            TemplateKind::Food => &[
                "metric",
                "metric_cap",
                "metric_noun",
                "unit",
                "period",
                "period_phrase",
                "food",
                "amount",
                "share_pct",
                "total",
                "food_count",
            ],
            TemplateKind::Comparison => &[
                "metric",
                "metric_cap",
                "metric_noun",
                "unit",
                "target",
                "period_a",
                "period_b",
                "mean_a",
                "mean_b",
                "dev_a",
                "dev_b",
            ],
            TemplateKind::System => &["reason", "submit", "selection"],
        }
    }

    /// Variants that must exist in every catalog.
    pub fn variants(self) -> &'static [&'static str] {
        match self {
            TemplateKind::Intake => &["excess", "deficient", "balanced", "empty"],
            TemplateKind::Trend => &[
                "decrease_on_track",
                "decrease_off_track",
                "increase_on_track",
                "increase_off_track",
                "hold_on_track",
                "hold_off_track",
            ],
            TemplateKind::Consistency => &["consistent", "inconsistent"],
            TemplateKind::Food => &["ranked", "empty"],
            TemplateKind::Comparison => &["improved", "worsened", "unchanged"],
            TemplateKind::System => SystemMessage::VARIANTS,
        }
    }

    pub const ALL: [TemplateKind; 6] = [
        TemplateKind::Intake,
        TemplateKind::Trend,
        TemplateKind::Consistency,
        TemplateKind::Food,
        TemplateKind::Comparison,
        TemplateKind::System,
    ];
}

/// Fixed conversational messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemMessage {
    Greeting,
    Help,
    OutOfScope,
    ButtonsPrompt,
    SelectionUpdated,
    EmptySelection,
    NoButtons,
    NoData,
    Clarification,
}

impl SystemMessage {
    const VARIANTS: &'static [&'static str] = &[
        "greeting",
        "help",
        "out_of_scope",
        "buttons_prompt",
        "selection_updated",
        "empty_selection",
        "no_buttons",
        "no_data",
        "clarification",
    ];

    pub const ALL: [SystemMessage; 9] = [
        SystemMessage::Greeting,
        SystemMessage::Help,
        SystemMessage::OutOfScope,
        SystemMessage::ButtonsPrompt,
        SystemMessage::SelectionUpdated,
        SystemMessage::EmptySelection,
        SystemMessage::NoButtons,
        SystemMessage::NoData,
        SystemMessage::Clarification,
    ];

    pub fn variant(self) -> &'static str {
        Self::VARIANTS[self as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateRecord {
    pub kind: TemplateKind,
    pub variant: String,
    pub patterns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ButtonLabels {
    pub intake: String,
    pub trend_consistency: String,
    pub food: String,
    pub submit: String,
}

impl ButtonLabels {
    pub fn label(&self, kind: InsightKind) -> &str {
        match kind {
            InsightKind::Intake => &self.intake,
            InsightKind::TrendConsistency => &self.trend_consistency,
            InsightKind::Food => &self.food,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    emoji: BTreeMap<String, String>,
    buttons: ButtonLabels,
    templates: Vec<TemplateRecord>,
}

/// Validated template catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateCatalog {
    patterns: BTreeMap<(TemplateKind, String), Vec<String>>,
    emoji: BTreeMap<String, String>,
    buttons: ButtonLabels,
}

const BUNDLED: &str = include_str!("../../data/templates.json");

impl Default for TemplateCatalog {
    fn default() -> Self {
        TemplateCatalog::from_json(BUNDLED).expect("bundled template catalog is valid")
    }
}

/// Slot names in `pattern`, in order of appearance.
pub fn pattern_slots(pattern: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut rest = pattern;
    while let Some(open) = rest.find(['{', '}']) {
        if rest.as_bytes()[open] == b'}' {
            return Err(Error::MalformedTemplate(format!("stray `}}` in `{pattern}`")));
        }
        let after = &rest[open + 1..];
        let close = after
            .find(['{', '}'])
            .filter(|&i| after.as_bytes()[i] == b'}')
            .ok_or_else(|| Error::MalformedTemplate(format!("unclosed `{{` in `{pattern}`")))?;
        let name = &after[..close];
        if name.is_empty() || !name.bytes().all(|b| b.is_ascii_lowercase() || b == b'_') {
            return Err(Error::MalformedTemplate(format!("bad slot name `{name}` in `{pattern}`")));
        }
        out.push(name);
        rest = &after[close + 1..];
    }
    Ok(out)
}

/// Substitutes every `{slot}` in `pattern`. A slot without a value is an
/// error naming the slot.
pub fn realize(pattern: &str, slots: &BTreeMap<&str, String>) -> Result<String> {
    pattern_slots(pattern)?;
    let mut out = String::with_capacity(pattern.len() + 32);
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').expect("validated") + open;
        let name = &rest[open + 1..close];
        out.push_str(slots.get(name).ok_or_else(|| Error::MissingSlot(name.to_string()))?);
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

impl TemplateCatalog {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CatalogFile =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("template catalog: {e}")))?;
        let mut patterns: BTreeMap<(TemplateKind, String), Vec<String>> = BTreeMap::new();
        for record in file.templates {
            let key = (record.kind, record.variant.clone());
            if !record.kind.variants().contains(&record.variant.as_str()) {
                return Err(Error::Config(format!("unknown {} variant `{}`", record.kind.id(), record.variant)));
            }
            for p in &record.patterns {
                for slot in pattern_slots(p)? {
                    if !record.kind.slots().contains(&slot) {
                        return Err(Error::Config(format!(
                            "{}.{} uses slot `{slot}`, which it cannot fill",
                            record.kind.id(),
                            record.variant
                        )));
                    }
                }
            }
            if patterns.insert(key, record.patterns).is_some() {
                return Err(Error::Config(format!("duplicate record {}.{}", record.kind.id(), record.variant)));
            }
        }
        for kind in TemplateKind::ALL {
            let min = if kind == TemplateKind::System { 1 } else { 2 };
            for variant in kind.variants() {
                let n = patterns.get(&(kind, variant.to_string())).map_or(0, Vec::len);
                if n < min {
                    return Err(Error::Config(format!(
                        "{}.{variant} needs at least {min} pattern(s), found {n}",
                        kind.id()
                    )));
                }
            }
        }
        Ok(TemplateCatalog { patterns, emoji: file.emoji, buttons: file.buttons })
    }

    pub fn patterns(&self, kind: TemplateKind, variant: &str) -> &[String] {
        self.patterns.get(&(kind, variant.to_string())).map_or(&[], Vec::as_slice)
    }

    pub fn records(&self) -> impl Iterator<Item = (TemplateKind, &str, &[String])> {
        self.patterns.iter().map(|((k, v), p)| (*k, v.as_str(), p.as_slice()))
    }

    pub fn emoji(&self, kind: TemplateKind, variant: &str) -> Option<&str> {
        self.emoji.get(&format!("{}.{variant}", kind.id())).map(String::as_str)
    }

    pub fn buttons(&self) -> &ButtonLabels {
        &self.buttons
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(*b)).wrapping_mul(0x0100_0000_01b3))
}

/// Index of the paraphrase used for `(metric, period)`.
pub fn choose(count: usize, metric: Metric, period: &DateRange) -> usize {
    let key = format!("{}|{}|{}", metric.id(), period.start(), period.end());
    // The low bits of FNV-1a track byte parity; the high half mixes better.
    ((fnv1a(key.as_bytes()) >> 32) % count.max(1) as u64) as usize
}

/// Whole numbers, without a negative zero.
pub fn fmt_value(v: f64) -> String {
    let s = format!("{v:.0}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Signed, one decimal: `+25.0`, `-3.5`.
pub fn fmt_signed_pct(v: f64) -> String {
    let s = format!("{v:+.1}");
    if s == "-0.0" {
        "+0.0".into()
    } else {
        s
    }
}

pub fn fmt_pct(v: f64) -> String {
    let s = format!("{v:.1}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

fn signed_value(v: f64) -> String {
    let s = fmt_value(v);
    if s.starts_with('-') || s == "0" {
        s
    } else {
        format!("+{s}")
    }
}

fn period_phrase(p: &DateRange) -> String {
    if p.is_single_day() {
        format!("on {p}")
    } else {
        format!("from {p}")
    }
}

/// Singular form for use before another noun: "calorie intake".
fn metric_noun(metric: Metric) -> &'static str {
    match metric {
        Metric::Calories => "calorie",
        Metric::Carbohydrates => "carbohydrate",
        other => other.id(),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Template key and slot values for an assessment.
pub fn slots_for(a: &Assessment) -> (TemplateKind, &'static str, BTreeMap<&'static str, String>) {
    let metric = a.metric();
    let mut s: BTreeMap<&'static str, String> = BTreeMap::new();
    s.insert("metric", metric.id().into());
    s.insert("metric_cap", capitalize(metric.id()));
    s.insert("metric_noun", metric_noun(metric).into());
    s.insert("unit", metric.unit().into());
    let period = |s: &mut BTreeMap<&'static str, String>, p: &DateRange| {
        s.insert("period", p.to_string());
        s.insert("period_phrase", period_phrase(p));
    };
    match a {
        Assessment::Intake(i) => {
            period(&mut s, &i.period);
            s.insert("per_day", if i.period.is_single_day() { "" } else { " a day" }.into());
            s.insert("value", fmt_value(i.mean_daily));
            s.insert("target", fmt_value(i.target));
            s.insert("deviation_pct", fmt_signed_pct(i.deviation_pct));
            s.insert("abs_deviation_pct", fmt_pct(i.deviation_pct.abs()));
            let variant = match (i.empty, i.status) {
                (true, _) => "empty",
                (false, IntakeStatus::Excess) => "excess",
                (false, IntakeStatus::Deficient) => "deficient",
                (false, IntakeStatus::Balanced) => "balanced",
            };
            (TemplateKind::Intake, variant, s)
        }
        Assessment::Trend(t) => {
            period(&mut s, &t.period);
            s.insert("slope", signed_value(t.slope));
            s.insert("abs_slope", fmt_value(t.slope.abs()));
            s.insert("target", fmt_value(t.target));
            let variant = match (t.recommended_direction, t.matches_recommendation) {
                (Direction::Decrease, true) => "decrease_on_track",
                (Direction::Decrease, false) => "decrease_off_track",
                (Direction::Increase, true) => "increase_on_track",
                (Direction::Increase, false) => "increase_off_track",
                (Direction::Hold, true) => "hold_on_track",
                (Direction::Hold, false) => "hold_off_track",
            };
            (TemplateKind::Trend, variant, s)
        }
        Assessment::Consistency(c) => {
            period(&mut s, &c.period);
            s.insert("value", fmt_value(c.mean));
            s.insert("cv_pct", fmt_pct(c.cv * 100.0));
            (TemplateKind::Consistency, if c.consistent { "consistent" } else { "inconsistent" }, s)
        }
        Assessment::Food(r) => {
            period(&mut s, &r.period);
            s.insert("total", fmt_value(r.total));
            s.insert("food_count", r.ranked.len().to_string());
            match r.ranked.first() {
                Some(top) if r.total > 0.0 => {
                    s.insert("food", top.food.clone());
                    s.insert("amount", fmt_value(top.amount));
                    s.insert("share_pct", fmt_pct(top.share_pct));
                    (TemplateKind::Food, "ranked", s)
                }
                _ => (TemplateKind::Food, "empty", s),
            }
        }
        Assessment::Comparison(c) => {
            s.insert("target", fmt_value(c.target));
            s.insert("period_a", c.period_a.to_string());
            s.insert("period_b", c.period_b.to_string());
            s.insert("mean_a", fmt_value(c.mean_a));
            s.insert("mean_b", fmt_value(c.mean_b));
            s.insert("dev_a", fmt_value(c.abs_dev_a));
            s.insert("dev_b", fmt_value(c.abs_dev_b));
            let variant = match c.verdict {
                Verdict::Improved => "improved",
                Verdict::Worsened => "worsened",
                Verdict::Unchanged => "unchanged",
            };
            (TemplateKind::Comparison, variant, s)
        }
    }
}

/// The period used to pick a paraphrase for an assessment.
pub fn choice_period(a: &Assessment) -> DateRange {
    match a {
        Assessment::Intake(i) => i.period,
        Assessment::Trend(t) => t.period,
        Assessment::Consistency(c) => c.period,
        Assessment::Food(f) => f.period,
        Assessment::Comparison(c) => c.period_b,
    }
}
