//! Blocking client for the HTTP API.

use dietchat_core::dialogue::Transcript;
use dietchat_core::InboundEvent;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::service::{CreateSession, EventReply, SessionCreated};
use crate::{Error, Result};

pub struct HttpClient {
    base: String,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

fn http(e: ureq::Error) -> Error {
    Error::Http(e.to_string())
}

impl HttpClient {
    /// `base` is e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder().http_status_as_error(false).build().new_agent();
        HttpClient { base: base.into().trim_end_matches('/').to_owned(), agent }
    }

    fn decode<T: DeserializeOwned>(mut resp: ureq::http::Response<ureq::Body>) -> Result<T> {
        let status = resp.status();
        if status.is_success() {
            return resp.body_mut().read_json().map_err(http);
        }
        let text = resp.body_mut().read_to_string().map_err(http)?;
        let message = serde_json::from_str::<ErrorBody>(&text).map(|b| b.error).unwrap_or(text);
        Err(match status.as_u16() {
            404 => Error::UnknownSession(message),
            400 => Error::BadRequest(message),
            _ => Error::Http(format!("{status}: {message}")),
        })
    }

    pub fn create_session(&self, req: &CreateSession) -> Result<SessionCreated> {
        Self::decode(self.agent.post(format!("{}/sessions", self.base)).send_json(req).map_err(http)?)
    }

    pub fn send(&self, session_id: &str, event: &InboundEvent) -> Result<EventReply> {
        let url = format!("{}/sessions/{session_id}/events", self.base);
        Self::decode(self.agent.post(url).send_json(event).map_err(http)?)
    }

    pub fn transcript(&self, session_id: &str) -> Result<Transcript> {
        let url = format!("{}/sessions/{session_id}/transcript", self.base);
        Self::decode(self.agent.get(url).call().map_err(http)?)
    }

    pub fn chart(&self, chart_id: &str) -> Result<String> {
        let mut resp = self.agent.get(format!("{}/charts/{chart_id}", self.base)).call().map_err(http)?;
        if resp.status().is_success() {
            resp.body_mut().read_to_string().map_err(http)
        } else {
            Err(Error::Http(format!("{}: chart `{chart_id}`", resp.status())))
        }
    }
}
