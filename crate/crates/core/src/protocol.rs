//! Message protocol between the engine and a UI client.
//!
//! Inbound messages carry a session event and a sequence number. Every
//! outbound message has its own strictly increasing sequence number and
//! acknowledges the inbound number it answers.

use serde::{Deserialize, Serialize};

use crate::document::Document;
use crate::registry::Rect;
use crate::scene::AttributePath;
use crate::session::{Effect, Session, SessionEvent};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inbound {
    pub seq: u64,
    pub event: SessionEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outbound {
    pub seq: u64,
    /// Inbound sequence number this message answers; 0 for unsolicited
    /// state pushes.
    pub ack: u64,
    pub message: Message,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquidgetInfo {
    pub id: String,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanvasInfo {
    pub id: String,
    pub region: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeValue {
    pub path: AttributePath,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Message {
    Effects { effects: Vec<Effect> },
    SceneDelta { changes: Vec<AttributeValue> },
    SelectionHighlight { squidget: String, kind: String, pending: bool },
    SquidgetList { squidgets: Vec<SquidgetInfo> },
    CanvasList { canvases: Vec<CanvasInfo> },
    Error { message: String },
}

/// A session behind the message protocol. Events are processed strictly
/// in inbound order.
pub struct Engine {
    session: Session,
    out_seq: u64,
    last_in: Option<u64>,
}

impl Engine {
    pub fn new(doc: Document) -> Self {
        Self {
            session: Session::new(doc),
            out_seq: 0,
            last_in: None,
        }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    fn emit(&mut self, ack: u64, message: Message) -> Outbound {
        self.out_seq += 1;
        Outbound {
            seq: self.out_seq,
            ack,
            message,
        }
    }

    /// Squidget and canvas lists, for a client starting from nothing.
    pub fn snapshot(&mut self) -> Vec<Outbound> {
        let (s, c) = self.lists();
        vec![self.emit(0, s), self.emit(0, c)]
    }

    fn lists(&self) -> (Message, Message) {
        let reg = &self.session.doc.registry;
        let mut squidgets: Vec<SquidgetInfo> = reg
            .discrete
            .iter()
            .map(|d| SquidgetInfo {
                id: d.id.clone(),
                kind: "discrete".into(),
            })
            .collect();
        squidgets.extend(reg.continuous.iter().map(|c| SquidgetInfo {
            id: c.id.clone(),
            kind: "continuous".into(),
        }));
        let canvases = reg
            .canvases
            .iter()
            .map(|c| CanvasInfo {
                id: c.id.clone(),
                region: c.region,
            })
            .collect();
        (
            Message::SquidgetList { squidgets },
            Message::CanvasList { canvases },
        )
    }

    pub fn handle(&mut self, msg: &Inbound) -> Vec<Outbound> {
        if self.last_in.is_some_and(|last| msg.seq <= last) {
            let message = format!("sequence number {} is not increasing", msg.seq);
            return vec![self.emit(msg.seq, Message::Error { message })];
        }
        self.last_in = Some(msg.seq);
        let ack = msg.seq;
        let effects = match self.session.handle_event(&msg.event) {
            Ok(e) => e,
            Err(e) => {
                return vec![self.emit(
                    ack,
                    Message::Error {
                        message: e.to_string(),
                    },
                )]
            }
        };
        if effects.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.emit(
            ack,
            Message::Effects {
                effects: effects.clone(),
            },
        )];
        let mut changes: Vec<AttributeValue> = Vec::new();
        let mut registry_changed = false;
        for e in &effects {
            match e {
                Effect::AttributeChanged { path, new, .. } => {
                    match changes.iter_mut().find(|c| &c.path == path) {
                        Some(c) => c.value = *new,
                        None => changes.push(AttributeValue {
                            path: path.clone(),
                            value: *new,
                        }),
                    }
                }
                Effect::SquidgetCreated { .. } | Effect::SquidgetDeleted { .. } => {
                    registry_changed = true
                }
                _ => {}
            }
        }
        if !changes.is_empty() {
            out.push(self.emit(ack, Message::SceneDelta { changes }));
        }
        for e in &effects {
            match e {
                Effect::SelectionHighlight {
                    squidget,
                    kind,
                    pending,
                } => {
                    let m = Message::SelectionHighlight {
                        squidget: squidget.clone(),
                        kind: kind.clone(),
                        pending: *pending,
                    };
                    out.push(self.emit(ack, m));
                }
                Effect::Error { message } => {
                    let m = Message::Error {
                        message: message.clone(),
                    };
                    out.push(self.emit(ack, m));
                }
                _ => {}
            }
        }
        if registry_changed {
            let (s, c) = self.lists();
            out.push(self.emit(ack, s));
            out.push(self.emit(ack, c));
        }
        out
    }

    /// Handles one JSON line, answering parse failures with an error.
    pub fn handle_line(&mut self, line: &str) -> Vec<Outbound> {
        match serde_json::from_str::<Inbound>(line) {
            Ok(msg) => self.handle(&msg),
            Err(e) => {
                let message = format!("bad message: {e}");
                vec![self.emit(0, Message::Error { message })]
            }
        }
    }
}
