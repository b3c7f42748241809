//! Input layer: rule-based intent classification, metric and insight-kind
//! extraction, and temporal expression parsing.
//!
//! Rules come from a JSON table (bundled copy in `data/nlu_rules.json`).
//! Intents are tried in table order and the first one with a matching
//! pattern wins. A pattern is a phrase matched on whole tokens; a trailing
//! `*` makes its last word a prefix match, and the macros `@metric`, `@time`,
//! `@pair` and `@insight` fire when the corresponding extractor finds
//! something.

mod time;
mod tokens;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::nutrient::Metric;
use crate::{Error, Result};

pub use time::{ResolvedTime, TemporalExpression, TimeParse};
pub use tokens::{tokenize, Token};

const BUNDLED_RULES: &str = include_str!("../../data/nlu_rules.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntentKind {
    BasicReport,
    AdvancedInsight,
    Compare,
    MoreInsights,
    Greet,
    Help,
    OutOfScope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intent {
    pub kind: IntentKind,
    pub confidence: f64,
}

impl Intent {
    pub fn matched(kind: IntentKind) -> Self {
        Intent { kind, confidence: 1.0 }
    }

    pub fn fallback() -> Self {
        Intent { kind: IntentKind::OutOfScope, confidence: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsightKind {
    Intake,
    TrendConsistency,
    Food,
}

impl InsightKind {
    pub const ALL: [InsightKind; 3] = [InsightKind::Intake, InsightKind::TrendConsistency, InsightKind::Food];
}

macro_rules! ordered_set {
    ($(#[$meta:meta])* $name:ident, $item:ty) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(BTreeSet<$item>);

        impl $name {
            pub fn single(item: $item) -> Self {
                Self(core::iter::once(item).collect())
            }
            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
            pub fn len(&self) -> usize {
                self.0.len()
            }
            pub fn contains(&self, item: $item) -> bool {
                self.0.contains(&item)
            }
            pub fn insert(&mut self, item: $item) -> bool {
                self.0.insert(item)
            }
            /// Flips membership; returns whether `item` is now present.
            pub fn toggle(&mut self, item: $item) -> bool {
                if !self.0.remove(&item) {
                    self.0.insert(item);
                }
                self.0.contains(&item)
            }
            pub fn iter(&self) -> impl Iterator<Item = $item> + '_ {
                self.0.iter().copied()
            }
        }

        impl FromIterator<$item> for $name {
            fn from_iter<I: IntoIterator<Item = $item>>(iter: I) -> Self {
                Self(iter.into_iter().collect())
            }
        }
    };
}

ordered_set!(
    /// Requested metrics; empty means "use the default".
    MetricSet,
    Metric
);
ordered_set!(
    /// Requested advanced insights; empty means "not specified".
    InsightKindSet,
    InsightKind
);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub text: String,
    /// The "today" anchor for relative expressions.
    pub reference_date: NaiveDate,
    /// First diary day, anchoring `week 1`. Defaults to 13 days before the
    /// reference date.
    pub diary_start: Option<NaiveDate>,
}

impl Utterance {
    pub fn new(text: impl Into<String>, reference_date: NaiveDate) -> Self {
        Utterance { text: text.into(), reference_date, diary_start: None }
    }

    pub fn with_diary_start(mut self, start: NaiveDate) -> Self {
        self.diary_start = Some(start);
        self
    }

    pub fn is_blank(&self) -> bool {
        self.text.trim().is_empty()
    }

    fn anchor(&self) -> NaiveDate {
        self.diary_start.unwrap_or(self.reference_date - Days::new(13))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedQuery {
    pub intent: Intent,
    pub metrics: MetricSet,
    pub insight_kinds: InsightKindSet,
    pub time: Option<TemporalExpression>,
    /// Set when part of the input could not be understood (e.g. an invalid
    /// calendar date) and was ignored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clarification: Option<String>,
    /// The utterance leans on the previous question ("what about fat?").
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub follow_up: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PatternItem {
    Word(String),
    Prefix(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Pattern {
    Phrase(Vec<PatternItem>),
    Metric,
    Time,
    Pair,
    Insight,
}

impl Pattern {
    fn compile(source: &str) -> Result<Self> {
        match source.trim() {
            "@metric" => return Ok(Pattern::Metric),
            "@time" => return Ok(Pattern::Time),
            "@pair" => return Ok(Pattern::Pair),
            "@insight" => return Ok(Pattern::Insight),
            other if other.starts_with('@') => return Err(Error::Config(format!("unknown pattern macro `{other}`"))),
            _ => {}
        }
        let words: Vec<&str> = source.split_whitespace().collect();
        if words.is_empty() {
            return Err(Error::Config("empty pattern".into()));
        }
        let items = words
            .iter()
            .map(|w| {
                let w = w.to_lowercase();
                match w.strip_suffix('*') {
                    Some(stem) if !stem.is_empty() => PatternItem::Prefix(stem.to_string()),
                    _ => PatternItem::Word(w),
                }
            })
            .collect();
        Ok(Pattern::Phrase(items))
    }
}

fn phrase_at(items: &[PatternItem], tokens: &[Token], at: usize) -> bool {
    items.len() <= tokens.len() - at
        && items.iter().zip(&tokens[at..]).all(|(item, tok)| match item {
            PatternItem::Word(w) => *w == tok.text,
            PatternItem::Prefix(p) => tok.text.starts_with(p.as_str()),
        })
}

fn phrase_in(items: &[PatternItem], tokens: &[Token]) -> bool {
    (0..tokens.len()).any(|i| phrase_at(items, tokens, i))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    intents: Vec<IntentRuleFile>,
    metrics: BTreeMap<Metric, Vec<String>>,
    insight_kinds: BTreeMap<InsightKind, Vec<String>>,
    pair_connectors: Vec<String>,
    #[serde(default)]
    follow_up: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntentRuleFile {
    intent: IntentKind,
    patterns: Vec<String>,
}

/// Compiled rule tables.
#[derive(Debug, Clone)]
pub struct Nlu {
    intents: Vec<(IntentKind, Vec<Pattern>)>,
    metrics: Vec<(Metric, Vec<Vec<PatternItem>>)>,
    kinds: Vec<(InsightKind, Vec<Vec<PatternItem>>)>,
    connectors: Vec<String>,
    follow_up: Vec<Vec<PatternItem>>,
}

impl Default for Nlu {
    fn default() -> Self {
        Nlu::from_json(BUNDLED_RULES).expect("bundled NLU rules are valid")
    }
}

fn phrases(list: &[String]) -> Result<Vec<Vec<PatternItem>>> {
    list.iter()
        .map(|s| match Pattern::compile(s)? {
            Pattern::Phrase(items) => Ok(items),
            _ => Err(Error::Config(format!("macro `{s}` not allowed in synonym lists"))),
        })
        .collect()
}

impl Nlu {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: RuleFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut seen = BTreeSet::new();
        let mut intents = Vec::new();
        for rule in file.intents {
            if rule.intent == IntentKind::OutOfScope {
                return Err(Error::Config("out_of_scope is the fallback and takes no rules".into()));
            }
            if !seen.insert(rule.intent) {
                return Err(Error::Config(format!("intent {:?} listed twice", rule.intent)));
            }
            let patterns = rule.patterns.iter().map(|p| Pattern::compile(p)).collect::<Result<_>>()?;
            intents.push((rule.intent, patterns));
        }
        let metrics = file.metrics.iter().map(|(m, list)| Ok((*m, phrases(list)?))).collect::<Result<_>>()?;
        let kinds = file.insight_kinds.iter().map(|(k, list)| Ok((*k, phrases(list)?))).collect::<Result<_>>()?;
        let connectors = file.pair_connectors.iter().map(|c| c.to_lowercase()).collect();
        let follow_up = phrases(&file.follow_up)?;
        Ok(Nlu { intents, metrics, kinds, connectors, follow_up })
    }

    fn metrics_in(&self, tokens: &[Token]) -> MetricSet {
        self.metrics.iter().filter(|(_, syns)| syns.iter().any(|p| phrase_in(p, tokens))).map(|(m, _)| *m).collect()
    }

    fn kinds_in(&self, tokens: &[Token]) -> InsightKindSet {
        self.kinds.iter().filter(|(_, syns)| syns.iter().any(|p| phrase_in(p, tokens))).map(|(k, _)| *k).collect()
    }

    fn time_in(&self, u: &Utterance, tokens: &[Token]) -> TimeParse {
        let ctx = time::TimeContext { reference: u.reference_date, diary_start: u.anchor() };
        ctx.parse(&u.text, tokens, &self.connectors)
    }

    fn classify_tokens(
        &self,
        tokens: &[Token],
        metrics: &MetricSet,
        kinds: &InsightKindSet,
        time: &TimeParse,
    ) -> Intent {
        let has_pair = matches!(time.expression, Some(TemporalExpression { resolved: ResolvedTime::Pair(..), .. }));
        let fires = |p: &Pattern| match p {
            Pattern::Phrase(items) => phrase_in(items, tokens),
            Pattern::Metric => !metrics.is_empty(),
            Pattern::Time => time.expression.is_some(),
            Pattern::Pair => has_pair,
            Pattern::Insight => !kinds.is_empty(),
        };
        self.intents
            .iter()
            .find(|(_, patterns)| patterns.iter().any(fires))
            .map(|(kind, _)| Intent::matched(*kind))
            .unwrap_or_else(Intent::fallback)
    }

    pub fn classify_intent(&self, u: &Utterance) -> Intent {
        let tokens = tokenize(&u.text);
        let time = self.time_in(u, &tokens);
        self.classify_tokens(&tokens, &self.metrics_in(&tokens), &self.kinds_in(&tokens), &time)
    }

    pub fn extract_metrics(&self, u: &Utterance) -> MetricSet {
        self.metrics_in(&tokenize(&u.text))
    }

    pub fn extract_insight_kinds(&self, u: &Utterance) -> InsightKindSet {
        self.kinds_in(&tokenize(&u.text))
    }

    pub fn parse_time(&self, u: &Utterance) -> TimeParse {
        self.time_in(u, &tokenize(&u.text))
    }

    pub fn parse_query(&self, u: &Utterance) -> ParsedQuery {
        let tokens = tokenize(&u.text);
        let metrics = self.metrics_in(&tokens);
        let insight_kinds = self.kinds_in(&tokens);
        let time = self.time_in(u, &tokens);
        let mut intent = self.classify_tokens(&tokens, &metrics, &insight_kinds, &time);
        if intent.kind == IntentKind::BasicReport
            && matches!(time.expression, Some(TemporalExpression { resolved: ResolvedTime::Pair(..), .. }))
        {
            intent = Intent::matched(IntentKind::Compare);
        }
        ParsedQuery {
            intent,
            metrics,
            insight_kinds,
            time: time.expression,
            clarification: time.diagnostic,
            follow_up: self.follow_up.iter().any(|p| phrase_in(p, &tokens)),
        }
    }
}
