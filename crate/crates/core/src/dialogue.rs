//! Per-session conversation state machine.
//!
//! Two modes: `idle` and `awaiting_button_submit`. Text always returns the
//! machine to idle before it is interpreted, so typing while the insight
//! picker is open abandons the selection. Every inbound event produces at
//! least one outbound message.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::chart::render;
use crate::diary::FoodDiary;
use crate::insight::{apply_defaults, Assessment, InsightEngine};
use crate::nlg::{ButtonGroup, Message, MessageBody, MessageKind, Planner, SystemMessage};
use crate::nlu::{
    InsightKind, InsightKindSet, Intent, IntentKind, Nlu, ParsedQuery, ResolvedTime, TemporalExpression, Utterance,
};
use crate::Error;

/// The three layers a conversation runs through. Shared by all sessions.
#[derive(Debug, Clone, Default)]
pub struct Pipeline {
    pub nlu: Nlu,
    pub engine: InsightEngine,
    pub planner: Planner,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InboundEvent {
    UserText { text: String },
    ButtonToggle { kind: InsightKind },
    ButtonSubmit,
}

impl InboundEvent {
    pub fn text(text: impl Into<String>) -> Self {
        InboundEvent::UserText { text: text.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Idle,
    AwaitingButtonSubmit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationState {
    pub mode: Mode,
    pub last_query: Option<ParsedQuery>,
    /// Only meaningful while awaiting a button submit.
    pub pending_selection: InsightKindSet,
}

/// Wire form of a planned message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutboundMessage {
    pub kind: MessageKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buttons: Option<ButtonGroup>,
    pub delay_ms: u32,
    pub machine_payload: Vec<Assessment>,
}

impl From<&Message> for OutboundMessage {
    fn from(m: &Message) -> Self {
        let mut out = OutboundMessage {
            kind: m.kind(),
            text: None,
            chart_id: None,
            buttons: None,
            delay_ms: m.delay_ms,
            machine_payload: m.machine_payload.clone(),
        };
        match &m.body {
            MessageBody::Text { text } => out.text = Some(text.clone()),
            MessageBody::Chart { chart_id, .. } => out.chart_id = Some(chart_id.clone()),
            MessageBody::Buttons { buttons } => out.buttons = Some(buttons.clone()),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: u64,
    /// Absent for the greeting sent when the session opens.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inbound: Option<InboundEvent>,
    pub outbound: Vec<OutboundMessage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub reference_date: NaiveDate,
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn inbound_events(&self) -> impl Iterator<Item = &InboundEvent> {
        self.entries.iter().filter_map(|e| e.inbound.as_ref())
    }
}

/// One chat session over a diary.
#[derive(Debug, Clone)]
pub struct Conversation {
    pipeline: Arc<Pipeline>,
    diary: Arc<FoodDiary>,
    reference_date: NaiveDate,
    state: ConversationState,
    entries: Vec<TranscriptEntry>,
    charts: BTreeMap<String, String>,
}

/// Keeps echoed user text from pushing a clarification past the message cap.
const MAX_REASON_CHARS: usize = 160;

fn reason(err: &Error) -> String {
    match err {
        Error::PeriodTooShort { needed, got } => {
            format!("trends need at least {needed} days of data and that period has {got}")
        }
        other => format!("{other}").chars().take(MAX_REASON_CHARS).collect(),
    }
}

impl Conversation {
    /// Opens a session; the greeting is the first transcript entry.
    pub fn new(pipeline: Arc<Pipeline>, diary: Arc<FoodDiary>, reference_date: NaiveDate) -> Self {
        let mut c = Conversation {
            pipeline,
            diary,
            reference_date,
            state: ConversationState {
                mode: Mode::Idle,
                last_query: None,
                pending_selection: InsightKindSet::default(),
            },
            entries: Vec::new(),
            charts: BTreeMap::new(),
        };
        let greeting = c.pipeline.planner.system(SystemMessage::Greeting, "");
        c.record(None, alloc::vec![greeting]);
        c
    }

    pub fn state(&self) -> &ConversationState {
        &self.state
    }

    pub fn diary(&self) -> &FoodDiary {
        &self.diary
    }

    pub fn reference_date(&self) -> NaiveDate {
        self.reference_date
    }

    pub fn transcript(&self) -> Transcript {
        Transcript { reference_date: self.reference_date, entries: self.entries.clone() }
    }

    /// SVG for a chart this session has sent.
    pub fn chart_svg(&self, id: &str) -> Option<&str> {
        self.charts.get(id).map(String::as_str)
    }

    pub fn charts(&self) -> impl Iterator<Item = (&str, &str)> {
        self.charts.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn handle(&mut self, event: InboundEvent) -> Vec<OutboundMessage> {
        let planner = &self.pipeline.planner;
        let messages = match (&event, self.state.mode) {
            (InboundEvent::UserText { text }, _) => {
                self.state.mode = Mode::Idle;
                self.state.pending_selection = InsightKindSet::default();
                self.on_text(text)
            }
            (InboundEvent::ButtonToggle { .. } | InboundEvent::ButtonSubmit, Mode::Idle) => {
                alloc::vec![planner.system(SystemMessage::NoButtons, "")]
            }
            (InboundEvent::ButtonToggle { kind }, Mode::AwaitingButtonSubmit) => {
                self.state.pending_selection.toggle(*kind);
                alloc::vec![planner.buttons(&self.state.pending_selection, true)]
            }
            (InboundEvent::ButtonSubmit, Mode::AwaitingButtonSubmit) => {
                if self.state.pending_selection.is_empty() {
                    alloc::vec![planner.system(SystemMessage::EmptySelection, "")]
                } else {
                    self.on_submit()
                }
            }
        };
        self.record(Some(event), messages)
    }

    fn record(&mut self, inbound: Option<InboundEvent>, messages: Vec<Message>) -> Vec<OutboundMessage> {
        let mut outbound = Vec::with_capacity(messages.len());
        for m in &messages {
            if let MessageBody::Chart { chart_id, spec } = &m.body {
                match render(spec) {
                    Ok(svg) => {
                        self.charts.entry(chart_id.clone()).or_insert(svg);
                    }
                    Err(_) => continue,
                }
            }
            outbound.push(OutboundMessage::from(m));
        }
        self.entries.push(TranscriptEntry { seq: self.entries.len() as u64, inbound, outbound: outbound.clone() });
        outbound
    }

    fn utterance(&self, text: &str) -> Utterance {
        let start = self.diary.first_date().unwrap_or(self.reference_date - Days::new(13));
        Utterance::new(text, self.reference_date).with_diary_start(start)
    }

    fn previous_time(&self) -> Option<&TemporalExpression> {
        self.state.last_query.as_ref().and_then(|q| q.time.as_ref())
    }

    fn on_text(&mut self, text: &str) -> Vec<Message> {
        let planner = &self.pipeline.planner;
        let u = self.utterance(text);
        if u.is_blank() {
            return alloc::vec![planner.system(SystemMessage::Clarification, "I didn't catch any text")];
        }
        let query = self.pipeline.nlu.parse_query(&u);
        match query.intent.kind {
            IntentKind::Greet => alloc::vec![planner.system(SystemMessage::Greeting, "")],
            IntentKind::Help => alloc::vec![planner.system(SystemMessage::Help, "")],
            IntentKind::OutOfScope => alloc::vec![planner.system(SystemMessage::OutOfScope, "")],
            IntentKind::MoreInsights => {
                if !query.metrics.is_empty() || query.time.is_some() {
                    let q = apply_defaults(&query, &self.diary, self.reference_date, self.previous_time());
                    self.state.last_query = Some(q);
                }
                self.state.mode = Mode::AwaitingButtonSubmit;
                alloc::vec![planner.buttons(&self.state.pending_selection, false)]
            }
            IntentKind::BasicReport | IntentKind::AdvancedInsight | IntentKind::Compare => {
                if let (Some(why), None) = (&query.clarification, &query.time) {
                    let why: String = why.chars().take(MAX_REASON_CHARS).collect();
                    return alloc::vec![planner.system(SystemMessage::Clarification, &why)];
                }
                let query = self.inherit(query);
                let q = apply_defaults(&query, &self.diary, self.reference_date, self.previous_time());
                self.answer(q)
            }
        }
    }

    /// "What about sugar?" after a comparison or an insight request asks
    /// the same kind of question again, for the new metrics.
    fn inherit(&self, mut query: ParsedQuery) -> ParsedQuery {
        let Some(prev) = &self.state.last_query else { return query };
        let plain = query.intent.kind == IntentKind::BasicReport && query.time.is_none();
        if query.follow_up && plain && prev.intent.kind != IntentKind::BasicReport {
            query.intent = prev.intent;
            if query.insight_kinds.is_empty() {
                query.insight_kinds = prev.insight_kinds.clone();
            }
        }
        query
    }

    fn on_submit(&mut self) -> Vec<Message> {
        let base = self.state.last_query.clone();
        // A remembered pair narrows to its later range so the reply holds
        // only the selected insights.
        let time = base.as_ref().and_then(|q| q.time.clone()).map(|t| match t.resolved {
            ResolvedTime::Pair(a, b) => {
                TemporalExpression { raw: t.raw, resolved: ResolvedTime::Single(if b < a { a } else { b }) }
            }
            ResolvedTime::Single(_) => t,
        });
        let query = ParsedQuery {
            intent: Intent::matched(IntentKind::AdvancedInsight),
            metrics: base.map(|q| q.metrics).unwrap_or_default(),
            insight_kinds: core::mem::take(&mut self.state.pending_selection),
            time,
            clarification: None,
            follow_up: false,
        };
        self.state.mode = Mode::Idle;
        let q = apply_defaults(&query, &self.diary, self.reference_date, None);
        self.answer(q)
    }

    fn answer(&mut self, query: ParsedQuery) -> Vec<Message> {
        let pipeline = Arc::clone(&self.pipeline);
        match pipeline.engine.build_bundle(&self.diary, &query) {
            Ok(bundle) => match pipeline.planner.plan(&bundle) {
                Ok(plan) => {
                    self.state.last_query = Some(query);
                    plan.messages
                }
                Err(e) => alloc::vec![pipeline.planner.system(SystemMessage::Clarification, &reason(&e))],
            },
            Err(e) => alloc::vec![pipeline.planner.system(SystemMessage::Clarification, &reason(&e))],
        }
    }
}

/// Feeds `events` to a fresh session. Replaying a transcript's inbound
/// events reproduces its outbound messages exactly.
pub fn replay<'a>(
    pipeline: Arc<Pipeline>,
    diary: Arc<FoodDiary>,
    reference_date: NaiveDate,
    events: impl IntoIterator<Item = &'a InboundEvent>,
) -> Conversation {
    let mut c = Conversation::new(pipeline, diary, reference_date);
    for e in events {
        c.handle(e.clone());
    }
    c
}
