//! Stroke-driven manipulation of 2D scenes through squidgets: curves bound
//! to scene attributes, matched against user strokes and inverted into
//! attribute changes.

// Range checks are written as `!(x > lo)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod demos;
pub mod document;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod persistence;
pub mod protocol;
pub mod registry;
pub mod scene;
pub mod session;
pub mod solver;

pub use config::Config;
pub use document::Document;
pub use error::{Error, Result};
