//! Instruction templates: sampling, rendering, strict parsing and one-hot codes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Color, ObjectKind, COLORS};
use crate::rng::{below, RngStream};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MissionError {
    #[error("mission {0:?} does not match any template")]
    Unparsable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    GoTo,
    PickUp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Template {
    pub id: TemplateId,
    /// Text before the `{color} {obj_type}` slots.
    pub prefix: &'static str,
}

impl Template {
    pub fn pattern(&self) -> String {
        format!("{}{{color}} {{obj_type}}", self.prefix)
    }
}

pub const OBJ_TYPES: [ObjectKind; 3] = [ObjectKind::Key, ObjectKind::Ball, ObjectKind::Box];

pub const TEMPLATES: [Template; 2] =
    [Template { id: TemplateId::GoTo, prefix: "go to the " }, Template { id: TemplateId::PickUp, prefix: "pick up the " }];

/// Length of the one-hot mission code: every (colour, object type) pair.
pub const ONE_HOT_LEN: usize = COLORS.len() * OBJ_TYPES.len();

/// Frozen slot orderings and templates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissionVocabulary {
    pub colors: Vec<Color>,
    pub obj_types: Vec<ObjectKind>,
    pub templates: Vec<Template>,
}

impl Default for MissionVocabulary {
    fn default() -> Self {
        Self { colors: COLORS.to_vec(), obj_types: OBJ_TYPES.to_vec(), templates: TEMPLATES.to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mission {
    pub template: TemplateId,
    pub color: Color,
    pub obj_type: ObjectKind,
    pub text: String,
}

impl MissionVocabulary {
    fn template(&self, id: TemplateId) -> &Template {
        self.templates.iter().find(|t| t.id == id).expect("template in vocabulary")
    }

    fn type_index(&self, kind: ObjectKind) -> Option<usize> {
        self.obj_types.iter().position(|&k| k == kind)
    }

    pub fn mission(&self, template: TemplateId, color: Color, obj_type: ObjectKind) -> Mission {
        let text = format!("{}{} {}", self.template(template).prefix, color.name(), obj_type.name());
        Mission { template, color, obj_type, text }
    }

    /// Draws colour then object type, each uniformly.
    pub fn sample_mission(&self, template: TemplateId, rng: &mut RngStream) -> Mission {
        let color = self.colors[below(rng, self.colors.len())];
        let obj_type = self.obj_types[below(rng, self.obj_types.len())];
        self.mission(template, color, obj_type)
    }

    /// Exact, case-sensitive match against the templates.
    pub fn parse_mission(&self, text: &str) -> Result<Mission, MissionError> {
        let err = || MissionError::Unparsable(text.to_string());
        for t in &self.templates {
            let Some(slots) = text.strip_prefix(t.prefix) else { continue };
            let (color, obj) = slots.split_once(' ').ok_or_else(err)?;
            let color = Color::from_name(color).filter(|c| self.colors.contains(c)).ok_or_else(err)?;
            let obj_type = self.obj_types.iter().copied().find(|k| k.name() == obj).ok_or_else(err)?;
            return Ok(self.mission(t.id, color, obj_type));
        }
        Err(err())
    }

    /// Colour-major index: `color_id * n_types + type_id`.
    pub fn one_hot_index(&self, mission: &Mission) -> usize {
        let c = self.colors.iter().position(|&c| c == mission.color).expect("colour in vocabulary");
        let t = self.type_index(mission.obj_type).expect("object type in vocabulary");
        c * self.obj_types.len() + t
    }

    /// One-hot code of the mission's slots.
    pub fn encode_one_hot(&self, mission: &Mission) -> Vec<u8> {
        let mut v = vec![0; self.colors.len() * self.obj_types.len()];
        v[self.one_hot_index(mission)] = 1;
        v
    }

    /// Go-to mission for a one-hot code.
    pub fn decode_one_hot(&self, code: &[u8]) -> Option<Mission> {
        if code.len() != self.colors.len() * self.obj_types.len() || code.iter().map(|&x| x as usize).sum::<usize>() != 1 {
            return None;
        }
        let i = code.iter().position(|&x| x == 1)?;
        let n = self.obj_types.len();
        Some(self.mission(TemplateId::GoTo, self.colors[i / n], self.obj_types[i % n]))
    }

    /// Every instance of `template` in one-hot order.
    pub fn instances(&self, template: TemplateId) -> Vec<Mission> {
        self.colors
            .iter()
            .flat_map(|&c| self.obj_types.iter().map(move |&k| (c, k)))
            .map(|(c, k)| self.mission(template, c, k))
            .collect()
    }

    /// Human-readable listing of colours, types, templates and the one-hot
    /// table. Checked in as a golden file so orderings cannot drift.
    pub fn golden_text(&self) -> String {
        let mut out = String::new();
        out.push_str("colors:");
        for c in &self.colors {
            out.push(' ');
            out.push_str(c.name());
        }
        out.push_str("\nobj_types:");
        for k in &self.obj_types {
            out.push(' ');
            out.push_str(k.name());
        }
        out.push('\n');
        for t in &self.templates {
            out.push_str(&format!("template {:?}: {}\n", t.id, t.pattern()));
        }
        for (i, m) in self.instances(TemplateId::GoTo).iter().enumerate() {
            out.push_str(&format!("one_hot {i}: {}\n", m.text));
        }
        out
    }
}
