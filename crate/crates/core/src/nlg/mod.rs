//! Message planning and surface realization.
//!
//! [`Planner::plan`] turns an [`InsightBundle`] into an ordered list of text,
//! chart and button messages. Wording comes from a [`TemplateCatalog`];
//! every message carries the assessments behind it as `machine_payload`.

mod split;
mod template;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use split::{compute_delay, split, split_with_separators, MAX_DELAY_MS, MAX_MESSAGE_CHARS, MIN_DELAY_MS};
pub use template::{
    choice_period, choose, fmt_pct, fmt_signed_pct, fmt_value, fnv1a, pattern_slots, realize, slots_for, ButtonLabels,
    SystemMessage, TemplateCatalog, TemplateKind, TemplateRecord,
};

use crate::chart::{spec_from_assessment, ChartSpec};
use crate::insight::{Assessment, InsightBundle};
use crate::nlu::{InsightKind, InsightKindSet, IntentKind};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Text,
    Chart,
    Buttons,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButtonOption {
    pub kind: InsightKind,
    pub label: String,
    pub checked: bool,
}

/// One checkable option per advanced insight plus a submit action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButtonGroup {
    pub prompt: String,
    pub options: Vec<ButtonOption>,
    pub submit_label: String,
}

impl ButtonGroup {
    pub fn selection(&self) -> InsightKindSet {
        self.options.iter().filter(|o| o.checked).map(|o| o.kind).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MessageBody {
    Text { text: String },
    Chart { chart_id: String, spec: ChartSpec },
    Buttons { buttons: ButtonGroup },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub body: MessageBody,
    pub delay_ms: u32,
    pub machine_payload: Vec<Assessment>,
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        match self.body {
            MessageBody::Text { .. } => MessageKind::Text,
            MessageBody::Chart { .. } => MessageKind::Chart,
            MessageBody::Buttons { .. } => MessageKind::Buttons,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match &self.body {
            MessageBody::Text { text } => Some(text),
            _ => None,
        }
    }

    fn text_with(text: String, machine_payload: Vec<Assessment>) -> Message {
        Message { delay_ms: compute_delay(&text), body: MessageBody::Text { text }, machine_payload }
    }

    fn chart(spec: ChartSpec, payload: Assessment) -> Message {
        Message {
            delay_ms: compute_delay(&spec.title),
            body: MessageBody::Chart { chart_id: spec.id(), spec },
            machine_payload: alloc::vec![payload],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MessagePlan {
    pub messages: Vec<Message>,
}

/// Realizes and plans messages from a template catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Planner {
    catalog: TemplateCatalog,
    ascii_only: bool,
}

impl Default for Planner {
    fn default() -> Self {
        Planner::new(TemplateCatalog::default(), false)
    }
}

impl Planner {
    pub fn new(catalog: TemplateCatalog, ascii_only: bool) -> Self {
        Planner { catalog, ascii_only }
    }

    pub fn catalog(&self) -> &TemplateCatalog {
        &self.catalog
    }

    pub fn ascii_only(&self) -> bool {
        self.ascii_only
    }

    /// Realizes the paraphrase picked for `a` and appends its emoji.
    pub fn realize_assessment(&self, a: &Assessment) -> Result<String> {
        let (kind, variant, slots) = slots_for(a);
        let patterns = self.catalog.patterns(kind, variant);
        let pattern = &patterns[choose(patterns.len(), a.metric(), &choice_period(a))];
        let text = realize(pattern, &slots)?;
        Ok(self.decorate(text, kind, variant))
    }

    /// Every paraphrase for `a`, realized. Used to audit the catalog.
    pub fn realize_all(&self, a: &Assessment) -> Result<Vec<String>> {
        let (kind, variant, slots) = slots_for(a);
        self.catalog
            .patterns(kind, variant)
            .iter()
            .map(|p| Ok(self.decorate(realize(p, &slots)?, kind, variant)))
            .collect()
    }

    fn decorate(&self, text: String, kind: TemplateKind, variant: &str) -> String {
        match self.catalog.emoji(kind, variant) {
            Some(e) if !self.ascii_only => format!("{text} {e}"),
            _ => text,
        }
    }

    fn system_slots(&self, reason: &str, selection: &InsightKindSet) -> BTreeMap<&'static str, String> {
        let labels = self.catalog.buttons();
        let chosen: Vec<&str> = selection.iter().map(|k| labels.label(k)).collect();
        let mut slots = BTreeMap::new();
        slots.insert("reason", String::from(reason));
        slots.insert("submit", labels.submit.clone());
        slots.insert("selection", if chosen.is_empty() { String::from("nothing yet") } else { chosen.join(", ") });
        slots
    }

    /// A fixed conversational message. `reason` fills the clarification slot.
    pub fn system(&self, which: SystemMessage, reason: &str) -> Message {
        let patterns = self.catalog.patterns(TemplateKind::System, which.variant());
        let text = realize(&patterns[0], &self.system_slots(reason, &InsightKindSet::default()))
            .expect("system templates are validated on load");
        Message::text_with(text, Vec::new())
    }

    /// The insight picker with `selection` checked.
    pub fn buttons(&self, selection: &InsightKindSet, updated: bool) -> Message {
        let which = if updated { SystemMessage::SelectionUpdated } else { SystemMessage::ButtonsPrompt };
        let patterns = self.catalog.patterns(TemplateKind::System, which.variant());
        let prompt =
            realize(&patterns[0], &self.system_slots("", selection)).expect("system templates are validated on load");
        let labels = self.catalog.buttons();
        let group = ButtonGroup {
            options: InsightKind::ALL
                .iter()
                .map(|&kind| ButtonOption { kind, label: labels.label(kind).into(), checked: selection.contains(kind) })
                .collect(),
            submit_label: labels.submit.clone(),
            prompt,
        };
        Message {
            delay_ms: compute_delay(&group.prompt),
            body: MessageBody::Buttons { buttons: group },
            machine_payload: Vec::new(),
        }
    }

    /// Plans the reply to a bundle. Basic reports are text only; everything
    /// else pairs each explanation with its chart, text first.
    pub fn plan(&self, bundle: &InsightBundle) -> Result<MessagePlan> {
        if bundle.is_empty() {
            return Ok(MessagePlan { messages: alloc::vec![self.system(SystemMessage::NoData, "")] });
        }
        let assessments = bundle.assessments();
        let mut messages = Vec::new();
        if bundle.query.intent.kind == IntentKind::BasicReport {
            // Pack sentences into as few messages as fit.
            let mut text = String::new();
            let mut payload: Vec<Assessment> = Vec::new();
            for a in &assessments {
                let sentence = self.realize_assessment(a)?;
                for (piece, _) in split_with_separators(&sentence) {
                    let joined = if text.is_empty() { piece.clone() } else { format!("{text} {piece}") };
                    if joined.chars().count() > MAX_MESSAGE_CHARS {
                        messages.push(Message::text_with(core::mem::take(&mut text), core::mem::take(&mut payload)));
                        text = piece;
                    } else {
                        text = joined;
                    }
                    if payload.last() != Some(a) {
                        payload.push(a.clone());
                    }
                }
            }
            if !text.is_empty() {
                messages.push(Message::text_with(text, payload));
            }
        } else {
            for a in &assessments {
                let sentence = self.realize_assessment(a)?;
                for piece in split(&sentence) {
                    messages.push(Message::text_with(piece, alloc::vec![a.clone()]));
                }
                let chart = match a {
                    Assessment::Food(r) if r.ranked.is_empty() => None,
                    _ => spec_from_assessment(a),
                };
                if let Some(spec) = chart {
                    messages.push(Message::chart(spec, a.clone()));
                }
            }
        }
        Ok(MessagePlan { messages })
    }
}
