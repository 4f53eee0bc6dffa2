//! Document and event-log files.
//!
//! Documents are pretty-printed JSON with a version field. Event logs are
//! JSON lines: a header naming the document and config hashes, then one
//! event per line. Stroke files use the log format with a single stroke.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::document::Document;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Polyline};
use crate::registry::Registry;
use crate::scene::Scene;
use crate::session::{EventKind, SessionEvent};

pub const DOCUMENT_VERSION: i64 = 1;
pub const LOG_FORMAT: &str = "squidgets-log";
pub const LOG_VERSION: i64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentFile {
    version: i64,
    config: Config,
    scene: Scene,
    registry: Registry,
}

fn parse_error(e: &serde_json::Error, line_offset: usize) -> Error {
    Error::Parse {
        line: e.line() + line_offset,
        column: e.column(),
        message: e.to_string(),
    }
}

fn version_of(v: &serde_json::Value) -> Result<i64> {
    match v.get("version") {
        Some(n) => n.as_i64().ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: format!("version must be an integer, found {n}"),
        }),
        None => Err(Error::Parse {
            line: 1,
            column: 1,
            message: "missing field `version`".into(),
        }),
    }
}

/// Parses a document. Nothing is returned unless the whole text is valid.
pub fn load_document(text: &str) -> Result<Document> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(&e, 0))?;
    let found = version_of(&value)?;
    if found != DOCUMENT_VERSION {
        return Err(Error::Version {
            found,
            expected: DOCUMENT_VERSION,
        });
    }
    let file: DocumentFile = serde_json::from_str(text).map_err(|e| parse_error(&e, 0))?;
    Ok(Document {
        config: file.config,
        scene: file.scene,
        registry: file.registry,
    })
}

/// Canonical text: two-space indentation, shortest round-trip numbers,
/// trailing newline.
pub fn save_document(doc: &Document) -> String {
    let file = DocumentFile {
        version: DOCUMENT_VERSION,
        config: doc.config.clone(),
        scene: doc.scene.clone(),
        registry: doc.registry.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("documents serialize");
    s.push('\n');
    s
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of a document's canonical text.
pub fn document_hash(doc: &Document) -> String {
    sha256_hex(save_document(doc).as_bytes())
}

pub fn config_hash(config: &Config) -> String {
    sha256_hex(
        serde_json::to_string(config)
            .expect("config serializes")
            .as_bytes(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub format: String,
    pub version: i64,
    pub document_hash: String,
    pub config_hash: String,
}

impl LogHeader {
    pub fn for_document(doc: &Document) -> Self {
        Self {
            format: LOG_FORMAT.into(),
            version: LOG_VERSION,
            document_hash: document_hash(doc),
            config_hash: config_hash(&doc.config),
        }
    }

    /// Fails if `doc` is not the document the log was recorded against.
    pub fn verify(&self, doc: &Document) -> Result<()> {
        if self.document_hash != document_hash(doc) {
            return Err(Error::HashMismatch("document differs from the recorded one".into()));
        }
        if self.config_hash != config_hash(&doc.config) {
            return Err(Error::HashMismatch("config differs from the recorded one".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub header: LogHeader,
    pub events: Vec<SessionEvent>,
}

impl EventLog {
    pub fn new(doc: &Document, events: Vec<SessionEvent>) -> Self {
        Self {
            header: LogHeader::for_document(doc),
            events,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    /// Parses a log; timestamps must not decrease.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (i, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            column: 1,
            message: "missing log header".into(),
        })?;
        let value: serde_json::Value =
            serde_json::from_str(first).map_err(|e| parse_error(&e, i))?;
        if value.get("format").and_then(|f| f.as_str()) != Some(LOG_FORMAT) {
            return Err(Error::Parse {
                line: i + 1,
                column: 1,
                message: format!("header format must be {LOG_FORMAT:?}"),
            });
        }
        let found = version_of(&value)?;
        if found != LOG_VERSION {
            return Err(Error::Version {
                found,
                expected: LOG_VERSION,
            });
        }
        let header: LogHeader = serde_json::from_str(first).map_err(|e| parse_error(&e, i))?;
        let mut events = Vec::new();
        for (i, line) in lines {
            let e: SessionEvent = serde_json::from_str(line).map_err(|e| parse_error(&e, i))?;
            if events.last().is_some_and(|p: &SessionEvent| e.t < p.t) {
                return Err(Error::MalformedLog {
                    index: events.len(),
                    reason: format!("timestamp {} decreases", e.t),
                });
            }
            events.push(e);
        }
        Ok(Self { header, events })
    }

    /// Points of a stroke file: exactly one down, any moves, one up.
    pub fn stroke_points(&self) -> Result<Vec<Point2>> {
        let bad = |index: usize, reason: &str| Error::MalformedLog {
            index,
            reason: reason.into(),
        };
        let n = self.events.len();
        let mut pts = Vec::with_capacity(n);
        for (i, e) in self.events.iter().enumerate() {
            let pos = match (&e.kind, i) {
                (EventKind::PointerDown { pos }, 0) => pos,
                (EventKind::PointerMove { pos }, i) if i > 0 && i + 1 < n => pos,
                (EventKind::PointerUp { pos }, i) if i > 0 && i + 1 == n => pos,
                _ => return Err(bad(i, "stroke files hold one down/move/up sequence")),
            };
            pts.push(*pos);
        }
        if n < 2 {
            return Err(bad(n, "stroke needs a down and an up"));
        }
        Ok(pts)
    }

    pub fn stroke(&self) -> Result<Polyline> {
        Polyline::from_stroke(&self.stroke_points()?)
    }

    /// A stroke file for `points`, 10 ms apart.
    pub fn from_stroke(doc: &Document, points: &[Point2]) -> Self {
        let n = points.len();
        let events = points
            .iter()
            .enumerate()
            .map(|(i, &pos)| {
                let kind = if i == 0 {
                    EventKind::PointerDown { pos }
                } else if i + 1 == n {
                    EventKind::PointerUp { pos }
                } else {
                    EventKind::PointerMove { pos }
                };
                SessionEvent::new(10 * i as u64, kind)
            })
            .collect();
        Self::new(doc, events)
    }
}
