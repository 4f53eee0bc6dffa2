use serde::{Deserialize, Serialize};

use crate::geometry::ShortStrawConfig;

/// Engine tunables. Stored in every scene document and hashed into event
/// log headers, so a replay runs with exactly the recorded settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct Config {
    /// Point count of squidget curves and resampled strokes.
    pub resample_n: usize,
    /// Corner-cutting passes applied to a stroke before it becomes a curve.
    pub smoothing_iterations: usize,
    /// Weight of the translation-deviation term in implicit scores.
    pub lambda: f64,
    /// Added to score denominators.
    pub epsilon: f64,
    /// No-selection cut-off, as a fraction of the stroke's bounding-box
    /// diagonal: a candidate must score at least as well as a mean squared
    /// per-point error of `(threshold · diagonal)²`.
    pub threshold: f64,
    pub hold_ms: u64,
    /// Screen units the pointer may wander while still counting as held.
    pub hold_radius: f64,
    pub shortstraw: ShortStrawConfig,
    /// Partial curves covering less than this fraction of their segment are
    /// rejected.
    pub min_coverage: f64,
    /// Projection/fit rounds used when matching implicit squidgets; 1 is a
    /// single projection followed by one rigid fit.
    pub fit_iterations: usize,
    /// Half-width of the scalar search window as a fraction of the
    /// attribute's range.
    pub search_window: f64,
    /// Bracket width at which scalar search stops, as a fraction of range.
    pub search_tolerance: f64,
    /// Use centered (shape-only) distances for single-stroke selection.
    pub shape_only: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            resample_n: 30,
            smoothing_iterations: 2,
            lambda: 0.7,
            epsilon: 1e-9,
            threshold: 0.25,
            hold_ms: 300,
            hold_radius: 4.0,
            shortstraw: ShortStrawConfig::default(),
            min_coverage: 0.05,
            fit_iterations: 1000,
            search_window: 0.25,
            search_tolerance: 1e-10,
            shape_only: false,
        }
    }
}

impl Config {
    /// Applies a `key=value` override as accepted on the command line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse()
                .map_err(|_| format!("invalid value {v:?} for {key}"))
        }
        match key {
            "resample-n" => self.resample_n = parse(key, value)?,
            "smoothing-iterations" => self.smoothing_iterations = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "hold-ms" => self.hold_ms = parse(key, value)?,
            "hold-radius" => self.hold_radius = parse(key, value)?,
            "min-coverage" => self.min_coverage = parse(key, value)?,
            "fit-iterations" => self.fit_iterations = parse(key, value)?,
            "search-window" => self.search_window = parse(key, value)?,
            "search-tolerance" => self.search_tolerance = parse(key, value)?,
            "shape-only" => self.shape_only = parse(key, value)?,
            _ => return Err(format!("unknown config key {key:?}")),
        }
        if self.resample_n < 2 {
            return Err("resample-n must be at least 2".into());
        }
        Ok(())
    }
}
