//! Session registry shared by the HTTP server and in-process callers.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use dietchat_core::dialogue::{Pipeline, Transcript};
use dietchat_core::sample::{generate_sample_diary, sample_reference_date};
use dietchat_core::{Conversation, FoodDiary, InboundEvent, Mode, NaiveDate, OutboundMessage};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Body of `POST /sessions`: exactly one of `diary_seed` or `diary`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diary_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diary: Option<serde_json::Value>,
    /// "Today" for relative dates. Defaults to the day after the last
    /// logged day.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_date: Option<NaiveDate>,
}

impl CreateSession {
    pub fn seeded(seed: u64) -> Self {
        CreateSession { diary_seed: Some(seed), ..Self::default() }
    }

    fn resolve(&self) -> Result<(FoodDiary, NaiveDate)> {
        let diary = match (&self.diary_seed, &self.diary) {
            (Some(seed), None) => generate_sample_diary(*seed),
            (None, Some(doc)) => FoodDiary::from_json(&doc.to_string())?,
            _ => return Err(Error::BadRequest("give exactly one of `diary_seed` or `diary`".into())),
        };
        let reference = match (self.reference_date, self.diary_seed, diary.last_date()) {
            (Some(d), _, _) => d,
            (None, Some(_), _) => sample_reference_date(),
            (None, None, Some(last)) => last.succ_opt().unwrap_or(last),
            (None, None, None) => return Err(Error::BadRequest("empty diary needs a `reference_date`".into())),
        };
        Ok((diary, reference))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub messages: Vec<OutboundMessage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventReply {
    pub messages: Vec<OutboundMessage>,
    pub mode: Mode,
}

#[derive(Default)]
struct Registry {
    next_id: u64,
    sessions: BTreeMap<String, Conversation>,
    charts: BTreeMap<String, String>,
}

pub struct ChatService {
    pipeline: Arc<Pipeline>,
    transcript_dir: Option<PathBuf>,
    registry: Mutex<Registry>,
}

impl ChatService {
    pub fn new(pipeline: Arc<Pipeline>, transcript_dir: Option<PathBuf>) -> Self {
        ChatService { pipeline, transcript_dir, registry: Mutex::new(Registry::default()) }
    }

    pub fn pipeline(&self) -> &Arc<Pipeline> {
        &self.pipeline
    }

    fn lock(&self) -> MutexGuard<'_, Registry> {
        // A panic mid-request leaves the maps consistent; keep serving.
        self.registry.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn create(&self, req: &CreateSession) -> Result<SessionCreated> {
        let (diary, reference) = req.resolve()?;
        let conv = Conversation::new(self.pipeline.clone(), Arc::new(diary), reference);
        let messages = conv.transcript().entries[0].outbound.clone();
        let mut reg = self.lock();
        reg.next_id += 1;
        let session_id = format!("s{}", reg.next_id);
        self.persist(&session_id, &conv)?;
        reg.sessions.insert(session_id.clone(), conv);
        Ok(SessionCreated { session_id, messages })
    }

    pub fn handle(&self, session_id: &str, event: InboundEvent) -> Result<EventReply> {
        let mut reg = self.lock();
        let Registry { sessions, charts, .. } = &mut *reg;
        let conv = sessions.get_mut(session_id).ok_or_else(|| Error::UnknownSession(session_id.into()))?;
        let messages = conv.handle(event);
        for id in messages.iter().filter_map(|m| m.chart_id.as_deref()) {
            if let Some(svg) = conv.chart_svg(id) {
                charts.entry(id.to_owned()).or_insert_with(|| svg.to_owned());
            }
        }
        let mode = conv.state().mode;
        self.persist(session_id, conv)?;
        Ok(EventReply { messages, mode })
    }

    pub fn transcript(&self, session_id: &str) -> Result<Transcript> {
        let reg = self.lock();
        let conv = reg.sessions.get(session_id).ok_or_else(|| Error::UnknownSession(session_id.into()))?;
        Ok(conv.transcript())
    }

    /// SVG of any chart sent by any session.
    pub fn chart(&self, chart_id: &str) -> Option<String> {
        self.lock().charts.get(chart_id).cloned()
    }

    fn persist(&self, session_id: &str, conv: &Conversation) -> Result<()> {
        let Some(dir) = &self.transcript_dir else { return Ok(()) };
        let path = dir.join(format!("{session_id}.json"));
        let body = serde_json::to_string_pretty(&conv.transcript()).expect("transcripts serialize");
        std::fs::write(&path, body).map_err(|source| Error::Io { path, source })
    }
}
