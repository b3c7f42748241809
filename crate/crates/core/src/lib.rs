//! Core of a conversational diet coach.
//!
//! Everything here is pure and allocation-only (`no_std` + `alloc`): the food
//! diary model and aggregations, the rule-based query understanding layer, the
//! insight engine, template realization and message planning, SVG chart
//! rendering, the per-session dialogue state machine and the informativeness
//! quiz with its brute-force answer key. File IO, the HTTP service and the
//! command line live in the `dietchat` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chart;
pub mod dialogue;
pub mod diary;
pub mod insight;
pub mod nlg;
pub mod nlu;
pub mod nutrient;
pub mod quiz;
pub mod sample;

use alloc::string::String;
pub use chart::{ChartKind, ChartSpec};
pub use dialogue::{Conversation, InboundEvent, Mode, OutboundMessage, Pipeline, Transcript};

pub use diary::{DateRange, FoodDiary, FoodItem, MealEntry, NutrientGoals, Slot};
pub use insight::{Assessment, InsightBundle, Thresholds};
pub use nlu::{InsightKind, Intent, IntentKind, MetricSet, ParsedQuery, Utterance};
pub use nutrient::{Metric, NutrientVector};

pub use chrono::NaiveDate;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("diary parse error at line {line}, column {column}: {message}")]
    DiaryParse { line: usize, column: usize, message: String },
    #[error("entry {index} ({date}) references unknown food `{food}`")]
    UnknownFood { index: usize, date: NaiveDate, food: String },
    #[error("invalid diary field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("invalid date range: {start} is after {end}")]
    InvalidRange { start: NaiveDate, end: NaiveDate },
    #[error("period too short: need at least {needed} days, got {got}")]
    PeriodTooShort { needed: usize, got: usize },
    #[error("template slot `{0}` has no value")]
    MissingSlot(String),
    #[error("malformed template pattern: {0}")]
    MalformedTemplate(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("degenerate diary: {0}")]
    DegenerateDiary(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
