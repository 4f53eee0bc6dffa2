use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::wrap_angle;

/// Slash-separated attribute address, e.g. `lamp/shape/cone-angle` or
/// `squidget/c4/w`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AttributePath(String);

impl AttributePath {
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() || s.split('/').any(str::is_empty) {
            return Err(Error::UnknownAttribute(s.to_string()));
        }
        Ok(Self(s.to_string()))
    }

    pub fn object_attr(object: &str, name: &str) -> Self {
        Self(format!("{object}/{name}"))
    }

    pub fn weight(squidget: &str) -> Self {
        Self(format!("{WEIGHT_ROOT}/{squidget}/w"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('/')
    }

    /// First segment: an object id, or `squidget` for interpolation weights.
    pub fn root(&self) -> &str {
        self.0.split('/').next().unwrap_or_default()
    }

    /// Everything after the root segment.
    pub fn tail(&self) -> &str {
        self.0.split_once('/').map(|(_, t)| t).unwrap_or_default()
    }

    /// The continuous squidget id when this path is `squidget/<id>/w`.
    pub fn weight_target(&self) -> Option<&str> {
        let rest = self.0.strip_prefix(WEIGHT_ROOT)?.strip_prefix('/')?;
        let id = rest.strip_suffix("/w")?;
        (!id.is_empty() && !id.contains('/')).then_some(id)
    }
}

/// Root segment reserved for continuous-squidget weights.
pub const WEIGHT_ROOT: &str = "squidget";

impl fmt::Display for AttributePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for AttributePath {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        AttributePath::parse(&s)
    }
}

impl From<AttributePath> for String {
    fn from(p: AttributePath) -> Self {
        p.0
    }
}

/// A set of attribute values captured at one moment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeSnapshot(pub BTreeMap<AttributePath, f64>);

impl AttributeSnapshot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, path: &AttributePath) -> Option<f64> {
        self.0.get(path).copied()
    }

    pub fn insert(&mut self, path: AttributePath, value: f64) {
        self.0.insert(path, value);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn paths(&self) -> impl Iterator<Item = &AttributePath> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AttributePath, f64)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }

    /// Blends toward `other` by `u ∈ [0, 1]` over the union of both key sets.
    /// A key present on one side only keeps that side's value. `u == 0` and
    /// `u == 1` return the endpoint values bit for bit.
    pub fn blend(&self, other: &AttributeSnapshot, u: f64) -> AttributeSnapshot {
        let mut out = BTreeMap::new();
        for (k, &a) in &self.0 {
            let v = match other.0.get(k) {
                Some(&b) => lerp_scalar(a, b, u),
                None => a,
            };
            out.insert(k.clone(), v);
        }
        for (k, &b) in &other.0 {
            out.entry(k.clone()).or_insert(b);
        }
        AttributeSnapshot(out)
    }
}

/// `a + u·(b − a)`, returning the endpoints exactly at `u = 0` and `u = 1`.
pub fn lerp_scalar(a: f64, b: f64, u: f64) -> f64 {
    if u <= 0.0 {
        a
    } else if u >= 1.0 {
        b
    } else {
        a + u * (b - a)
    }
}

/// Valid values of an attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttrRange {
    /// Any finite value.
    Unbounded,
    /// An angle; writes are wrapped into `(-π, π]`.
    Angle,
    /// Strictly positive, no upper bound.
    Positive,
    /// `lo < v < hi`.
    Open(f64, f64),
    /// `lo ≤ v ≤ hi`.
    Closed(f64, f64),
}

impl AttrRange {
    /// Checks (and for angles wraps) a value about to be written.
    pub fn admit(&self, path: &AttributePath, value: f64) -> Result<f64> {
        let violation = || Error::RangeViolation {
            path: path.to_string(),
            value,
        };
        if !value.is_finite() {
            return Err(violation());
        }
        let ok = match *self {
            AttrRange::Unbounded => true,
            AttrRange::Angle => return Ok(wrap_angle(value)),
            AttrRange::Positive => value > 0.0,
            AttrRange::Open(lo, hi) => value > lo && value < hi,
            AttrRange::Closed(lo, hi) => value >= lo && value <= hi,
        };
        if ok {
            Ok(value)
        } else {
            Err(violation())
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        match *self {
            AttrRange::Unbounded => value.is_finite(),
            AttrRange::Angle => value.is_finite() && value > -PI && value <= PI,
            AttrRange::Positive => value > 0.0 && value.is_finite(),
            AttrRange::Open(lo, hi) => value > lo && value < hi,
            AttrRange::Closed(lo, hi) => value >= lo && value <= hi,
        }
    }

    /// Closed search interval for numerical solving, if the range is
    /// bounded. Open bounds are pulled in by a hair so every returned value
    /// is admissible.
    pub fn search_interval(&self) -> Option<(f64, f64)> {
        match *self {
            AttrRange::Unbounded | AttrRange::Positive => None,
            AttrRange::Angle => Some((-PI, PI)),
            AttrRange::Open(lo, hi) => {
                let pad = (hi - lo) * 1e-9;
                Some((lo + pad, hi - pad))
            }
            AttrRange::Closed(lo, hi) => Some((lo, hi)),
        }
    }
}

/// One scalar write, kept for undo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub path: AttributePath,
    pub old: f64,
    pub new: f64,
}
