//! One chat session seen from the outside, either in-process or over HTTP.

use std::sync::Arc;

use dietchat_core::{InboundEvent, OutboundMessage};

use crate::client::HttpClient;
use crate::service::{ChatService, CreateSession};
use crate::{Error, Result};

pub trait ChatTransport {
    /// Starts a new session and returns its greeting.
    fn open(&mut self, req: &CreateSession) -> Result<Vec<OutboundMessage>>;
    fn send(&mut self, event: &InboundEvent) -> Result<Vec<OutboundMessage>>;
}

fn no_session() -> Error {
    Error::BadRequest("no open session".into())
}

pub struct InProcess {
    service: Arc<ChatService>,
    session: Option<String>,
}

impl InProcess {
    pub fn new(service: Arc<ChatService>) -> Self {
        InProcess { service, session: None }
    }
}

impl ChatTransport for InProcess {
    fn open(&mut self, req: &CreateSession) -> Result<Vec<OutboundMessage>> {
        let created = self.service.create(req)?;
        self.session = Some(created.session_id);
        Ok(created.messages)
    }

    fn send(&mut self, event: &InboundEvent) -> Result<Vec<OutboundMessage>> {
        let id = self.session.as_deref().ok_or_else(no_session)?;
        Ok(self.service.handle(id, event.clone())?.messages)
    }
}

pub struct OverHttp {
    client: HttpClient,
    session: Option<String>,
}

impl OverHttp {
    pub fn new(base: impl Into<String>) -> Self {
        OverHttp { client: HttpClient::new(base), session: None }
    }
}

impl ChatTransport for OverHttp {
    fn open(&mut self, req: &CreateSession) -> Result<Vec<OutboundMessage>> {
        let created = self.client.create_session(req)?;
        self.session = Some(created.session_id);
        Ok(created.messages)
    }

    fn send(&mut self, event: &InboundEvent) -> Result<Vec<OutboundMessage>> {
        let id = self.session.as_deref().ok_or_else(no_session)?;
        Ok(self.client.send(id, event)?.messages)
    }
}
