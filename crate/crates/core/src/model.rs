//! Shared centering vocabulary: entity features, attentional states,
//! transitions, and the two salience hierarchies.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::annot::{EntityId, ExpType, Gender, Gf, MentionId, MentionRecord, Number, Person};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("conflicting {feature}: {left} vs {right}")]
    FeatureConflict {
        feature: &'static str,
        left: String,
        right: String,
    },
    #[error("Cm is undefined for an empty Cf")]
    EmptyCf,
}

/// Agreement and sort features. `Unknown`/`None` is the identity of `join`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Features {
    pub gender: Gender,
    pub number: Number,
    pub person: Option<Person>,
    pub sort: Option<String>,
}

impl Default for Features {
    fn default() -> Self {
        Self::UNKNOWN
    }
}

impl Features {
    pub const UNKNOWN: Features = Features {
        gender: Gender::Unknown,
        number: Number::Unknown,
        person: None,
        sort: None,
    };

    pub fn of(m: &MentionRecord) -> Self {
        Self {
            gender: m.gender,
            number: m.number,
            person: Some(m.person),
            sort: m.sort.clone(),
        }
    }

    pub fn join(&self, other: &Features) -> Result<Features, ModelError> {
        fn pick<T: PartialEq + Copy + fmt::Display>(
            feature: &'static str,
            a: T,
            b: T,
            unknown: T,
        ) -> Result<T, ModelError> {
            if a == unknown {
                Ok(b)
            } else if b == unknown || a == b {
                Ok(a)
            } else {
                Err(ModelError::FeatureConflict {
                    feature,
                    left: a.to_string(),
                    right: b.to_string(),
                })
            }
        }
        let person = match (self.person, other.person) {
            (Some(a), Some(b)) if a != b => {
                return Err(ModelError::FeatureConflict {
                    feature: "person",
                    left: a.to_string(),
                    right: b.to_string(),
                })
            }
            (a, b) => a.or(b),
        };
        let sort = match (&self.sort, &other.sort) {
            (Some(a), Some(b)) if a != b => {
                return Err(ModelError::FeatureConflict {
                    feature: "sort",
                    left: a.clone(),
                    right: b.clone(),
                })
            }
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Ok(Features {
            gender: pick("gender", self.gender, other.gender, Gender::Unknown)?,
            number: pick("number", self.number, other.number, Number::Unknown)?,
            person,
            sort,
        })
    }

    /// Agreement check: gender, number and person only.
    pub fn agrees(&self, other: &Features) -> bool {
        let strip = |f: &Features| Features {
            sort: None,
            ..f.clone()
        };
        strip(self).join(&strip(other)).is_ok()
    }

    /// Sortal compatibility: two determinate sort tags must be equal.
    pub fn sort_compatible(&self, other: &Features) -> bool {
        match (&self.sort, &other.sort) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

/// One realized entity in a Cf list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CfEntry {
    pub entity: EntityId,
    pub mention: MentionId,
    pub gf: Gf,
    pub exp: ExpType,
    /// Surface position of the realizing mention within its unit.
    pub position: usize,
}

impl CfEntry {
    pub fn sort_key(&self) -> (u8, u8, usize) {
        (gf_rank(self.gf), exp_rank(self.exp), self.position)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Top,
    Speech,
    Comp,
    Rel,
}

impl SegmentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentKind::Top => "top",
            SegmentKind::Speech => "speech",
            SegmentKind::Comp => "comp",
            SegmentKind::Rel => "rel",
        }
    }

    /// Whether the embedded entities stay reachable once the segment closes.
    pub fn accessible_on_pop(self) -> bool {
        matches!(self, SegmentKind::Comp | SegmentKind::Rel)
    }
}

impl fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where an `older` layer came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "origin", content = "kind", rename_all = "lowercase")]
pub enum LayerOrigin {
    /// Cf of an earlier unit at the same level.
    Demoted,
    /// Cf of a closed embedded segment appended below the host.
    Popped(SegmentKind),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OlderLayer {
    pub entries: Vec<CfEntry>,
    pub origin: LayerOrigin,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AttentionalState {
    pub cf: Vec<CfEntry>,
    pub cb: Option<EntityId>,
    /// Most recent first.
    pub older: Vec<OlderLayer>,
}

impl AttentionalState {
    pub fn is_empty(&self) -> bool {
        self.cf.is_empty() && self.cb.is_none() && self.older.is_empty()
    }

    /// Top Cf entity plus the Cb when it differs.
    pub fn cm(&self) -> Result<Vec<EntityId>, ModelError> {
        let top = self.cf.first().ok_or(ModelError::EmptyCf)?;
        let mut out = vec![top.entity.clone()];
        if let Some(cb) = &self.cb {
            if cb != &top.entity {
                out.push(cb.clone());
            }
        }
        Ok(out)
    }

    /// Cm, or the empty set for an empty Cf.
    pub fn cm_or_empty(&self) -> Vec<EntityId> {
        self.cm().unwrap_or_default()
    }

    pub fn cp(&self) -> Option<&EntityId> {
        self.cf.first().map(|e| &e.entity)
    }

    /// The most recent realization of `entity` in this state.
    pub fn latest(&self, entity: &EntityId) -> Option<&CfEntry> {
        self.cf
            .iter()
            .chain(self.older.iter().flat_map(|l| l.entries.iter()))
            .find(|e| &e.entity == entity)
    }

    /// Every entity reachable in this state, Cf first then older layers.
    pub fn entities(&self) -> impl Iterator<Item = &EntityId> {
        self.cf
            .iter()
            .chain(self.older.iter().flat_map(|l| l.entries.iter()))
            .map(|e| &e.entity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Transition {
    Chain,
    Establish,
    Null,
}

impl Transition {
    pub fn as_str(self) -> &'static str {
        match self {
            Transition::Chain => "CHAIN",
            Transition::Establish => "ESTABLISH",
            Transition::Null => "NULL",
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_transition(prev: Option<&EntityId>, cur: Option<&EntityId>) -> Transition {
    match cur {
        None => Transition::Null,
        Some(c) if prev == Some(c) => Transition::Chain,
        Some(_) => Transition::Establish,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BfpTransition {
    Continue,
    Retain,
    SmoothShift,
    RoughShift,
}

impl BfpTransition {
    pub fn as_str(self) -> &'static str {
        match self {
            BfpTransition::Continue => "CONTINUE",
            BfpTransition::Retain => "RETAIN",
            BfpTransition::SmoothShift => "SMOOTH_SHIFT",
            BfpTransition::RoughShift => "ROUGH_SHIFT",
        }
    }

    /// Lower is preferred.
    pub fn rank(self) -> u8 {
        self as u8
    }

    /// An undefined previous Cb counts as matching. A missing current Cb
    /// never does, so it lands in the shift family.
    pub fn classify(
        prev_cb: Option<&EntityId>,
        cur_cb: Option<&EntityId>,
        cp: Option<&EntityId>,
    ) -> BfpTransition {
        let same = cur_cb.is_some() && (prev_cb.is_none() || cur_cb == prev_cb);
        let cp_match = cur_cb.is_some() && cur_cb == cp;
        match (same, cp_match) {
            (true, true) => BfpTransition::Continue,
            (true, false) => BfpTransition::Retain,
            (false, true) => BfpTransition::SmoothShift,
            (false, false) => BfpTransition::RoughShift,
        }
    }
}

impl fmt::Display for BfpTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// SUBJECT > OBJECT > OBJECT2 > Others; lower is more salient.
pub fn gf_rank(gf: Gf) -> u8 {
    match gf {
        Gf::Subj => 0,
        Gf::Obj => 1,
        Gf::Obj2 => 2,
        Gf::Oblique | Gf::Possessor | Gf::Other => 3,
    }
}

/// Zero > pronoun > definite NP > indefinite NP; lower is more salient.
pub fn exp_rank(exp: ExpType) -> u8 {
    match exp {
        ExpType::Zero => 0,
        ExpType::Pronoun | ExpType::PossPronoun => 1,
        ExpType::DefNp => 2,
        ExpType::IndefNp => 3,
    }
}
