//! A scene plus its squidget registry and settings: the unit every session
//! edits and every file stores.

use crate::config::Config;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Polyline};
use crate::registry::{Rect, Registry, RegistryEdit};
use crate::scene::{AttrRange, AttributePath, AttributeSnapshot, Change, Scene, WEIGHT_ROOT};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub config: Config,
    pub scene: Scene,
    pub registry: Registry,
}

impl Document {
    pub fn new(scene: Scene) -> Self {
        Self {
            scene,
            ..Self::default()
        }
    }

    pub fn with_config(mut self, config: Config) -> Self {
        self.config = config;
        self
    }

    pub fn range_of(&self, path: &AttributePath) -> Result<AttrRange> {
        match path.weight_target() {
            Some(id) => {
                self.registry.continuous(id)?;
                Ok(AttrRange::Closed(0.0, 1.0))
            }
            None => self.scene.range_of(path),
        }
    }

    /// Reads a scene attribute or a continuous squidget's weight.
    pub fn get_attr(&self, path: &AttributePath) -> Result<f64> {
        match path.weight_target() {
            Some(id) => Ok(self.registry.continuous(id)?.weight),
            None => self.scene.get_attr(path),
        }
    }

    pub fn set_attr(&mut self, path: &AttributePath, value: f64) -> Result<Change> {
        match path.weight_target() {
            Some(id) => {
                let new = AttrRange::Closed(0.0, 1.0).admit(path, value)?;
                let cs = self.registry.continuous_mut(id)?;
                let old = cs.weight;
                cs.weight = new;
                Ok(Change {
                    path: path.clone(),
                    old,
                    new,
                })
            }
            None => self.scene.set_attr(path, value),
        }
    }

    pub(crate) fn restore_attr(&mut self, path: &AttributePath, value: f64) -> Result<()> {
        match path.weight_target() {
            Some(id) => {
                self.registry.continuous_mut(id)?.weight = value;
                Ok(())
            }
            None => self.scene.restore_attr(path, value),
        }
    }

    /// Current values of every selected attribute. Selection entries are
    /// object ids (expanded over descendants) or `squidget/<id>` for a
    /// continuous squidget's weight.
    pub fn collect_attributes(&self, selection: &[String]) -> Result<AttributeSnapshot> {
        let mut objects = Vec::new();
        let mut snap = AttributeSnapshot::new();
        for item in selection {
            match item.strip_prefix(WEIGHT_ROOT).and_then(|r| r.strip_prefix('/')) {
                Some(id) => {
                    let w = self.registry.continuous(id)?.weight;
                    snap.insert(AttributePath::weight(id), w);
                }
                None => objects.push(item.clone()),
            }
        }
        for (p, v) in self.scene.collect_attributes(&objects)?.iter() {
            snap.insert(p.clone(), v);
        }
        Ok(snap)
    }

    /// Current values of a canvas's attribute set; paths that no longer
    /// resolve are left out.
    pub fn canvas_snapshot(&self, canvas: &str) -> Result<AttributeSnapshot> {
        let c = self.registry.canvas(canvas)?;
        let mut snap = AttributeSnapshot::new();
        for p in &c.attributes {
            if let Ok(v) = self.get_attr(p) {
                snap.insert(p.clone(), v);
            }
        }
        Ok(snap)
    }

    /// Registers a canvas over a world-space region whose attribute set is
    /// collected from `selection`.
    pub fn create_canvas(&mut self, region: Rect, selection: &[String]) -> Result<RegistryEdit> {
        let attrs = self.collect_attributes(selection)?.paths().cloned().collect();
        self.registry.create_canvas(region, attrs)
    }

    pub fn to_world(&self, p: Point2) -> Point2 {
        self.scene.screen_to_world().apply(p)
    }

    pub fn to_screen(&self, p: Point2) -> Point2 {
        self.scene.world_to_screen().apply(p)
    }

    pub fn polyline_to_world(&self, p: &Polyline) -> Polyline {
        let m = self.scene.screen_to_world();
        p.map(|q| m.apply(q))
    }

    pub fn polyline_to_screen(&self, p: &Polyline) -> Polyline {
        let m = self.scene.world_to_screen();
        p.map(|q| m.apply(q))
    }

    /// Scene, registry and cross-reference problems.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = self.scene.validate();
        issues.extend(self.registry.validate());
        for c in &self.registry.canvases {
            for p in &c.attributes {
                if self.get_attr(p).is_err() {
                    issues.push(format!("{}: attribute {p} does not resolve", c.id));
                }
            }
        }
        for d in &self.registry.discrete {
            if d.curve.len() != self.config.resample_n {
                issues.push(format!(
                    "{}: curve has {} points, expected {}",
                    d.id,
                    d.curve.len(),
                    self.config.resample_n
                ));
            }
            if let Ok(c) = self.registry.canvas(&d.canvas) {
                for p in d.snapshot.paths() {
                    if !c.attributes.contains(p) {
                        issues.push(format!("{}: {p} is not a {} attribute", d.id, c.id));
                    }
                }
            }
        }
        if let Err(e) = self.config_issue() {
            issues.push(e.to_string());
        }
        issues
    }

    fn config_issue(&self) -> Result<()> {
        let c = &self.config;
        let ok = c.resample_n >= 2
            && (0.0..=1.0).contains(&c.lambda)
            && c.epsilon > 0.0
            && c.threshold > 0.0
            && c.hold_radius >= 0.0
            && c.fit_iterations >= 1
            && c.search_window > 0.0
            && c.search_tolerance > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScene("config value out of range".into()))
        }
    }
}
