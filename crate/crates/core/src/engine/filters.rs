//! Hard constraints on pronoun–entity pairs: agreement, sort, binding.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::annot::{ClauseId, EntityId, ExpType, Gf, MentionId, MentionRecord, Relation};
use crate::model::Features;
use crate::segment::{SegmentedDiscourse, UnitMention};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    Agreement,
    Sortal,
    Binding,
}

impl Filter {
    pub fn as_str(self) -> &'static str {
        match self {
            Filter::Agreement => "agreement",
            Filter::Sortal => "sortal",
            Filter::Binding => "binding",
        }
    }
}

/// Engine-side entity of a mention that needs no resolution: names, NPs and
/// first/second person pronouns. Pleonastics have none.
pub fn static_entity(m: &MentionRecord) -> Option<EntityId> {
    if m.is_pleonastic() || m.is_anaphoric() {
        return None;
    }
    Some(
        m.gold_entity
            .clone()
            .unwrap_or_else(|| EntityId::new(m.id.as_str())),
    )
}

/// Possessor pronouns, overt or zero, take the locality route.
pub fn is_possessive(m: &MentionRecord) -> bool {
    m.exp == ExpType::PossPronoun || (m.exp.is_pronominal() && m.gf == Gf::Possessor)
}

/// Mention→entity assignments and joined entity features, grown left to right.
#[derive(Debug, Clone, Default)]
pub struct EntityTable {
    pub features: BTreeMap<EntityId, Features>,
    pub assigned: BTreeMap<MentionId, EntityId>,
}

impl EntityTable {
    pub fn entity_of(&self, m: &MentionRecord) -> Option<EntityId> {
        static_entity(m).or_else(|| self.assigned.get(&m.id).cloned())
    }

    pub fn features(&self, e: &EntityId) -> Features {
        self.features.get(e).cloned().unwrap_or_default()
    }

    /// Records `m` as realizing `e`. On a feature conflict the earlier
    /// features are kept and the conflict is returned as a message.
    pub fn bind(&mut self, m: &MentionRecord, e: &EntityId) -> Option<String> {
        self.assigned.insert(m.id.clone(), e.clone());
        let current = self.features(e);
        match current.join(&Features::of(m)) {
            Ok(joined) => {
                self.features.insert(e.clone(), joined);
                None
            }
            Err(err) => Some(format!("{} on {}: {err}", m.id, e)),
        }
    }

    pub fn check(&self, pronoun: &MentionRecord, candidate: &EntityId) -> Option<Filter> {
        let p = Features::of(pronoun);
        let c = self.features(candidate);
        if !p.agrees(&c) {
            Some(Filter::Agreement)
        } else if !p.sort_compatible(&c) {
            Some(Filter::Sortal)
        } else {
            None
        }
    }
}

/// Clause-indexed view of a segmented discourse for binding checks.
pub struct ClauseIndex<'a> {
    pub seg: &'a SegmentedDiscourse,
    mentions: BTreeMap<&'a ClauseId, Vec<&'a MentionRecord>>,
    by_id: BTreeMap<&'a MentionId, &'a MentionRecord>,
    children: BTreeMap<&'a ClauseId, Vec<&'a ClauseId>>,
}

impl<'a> ClauseIndex<'a> {
    pub fn new(seg: &'a SegmentedDiscourse) -> Self {
        let mut mentions: BTreeMap<&ClauseId, Vec<&MentionRecord>> = BTreeMap::new();
        let mut by_id = BTreeMap::new();
        for unit in &seg.units {
            for um in &unit.mentions {
                mentions.entry(&um.clause).or_default().push(&um.record);
                by_id.insert(&um.record.id, &um.record);
            }
        }
        let mut children: BTreeMap<&ClauseId, Vec<&ClauseId>> = BTreeMap::new();
        for (id, info) in &seg.clauses {
            if matches!(info.relation, Relation::Conj | Relation::Adj) {
                continue;
            }
            if let Some(p) = &info.parent {
                children.entry(p).or_default().push(id);
            }
        }
        Self {
            seg,
            mentions,
            by_id,
            children,
        }
    }

    pub fn mention(&self, id: &MentionId) -> Option<&'a MentionRecord> {
        self.by_id.get(id).copied()
    }

    /// Clauses reached through complement and relative links only.
    fn descendants(&self, clause: &ClauseId) -> Vec<&'a ClauseId> {
        let mut out = Vec::new();
        let mut todo: Vec<&ClauseId> = self.children.get(clause).cloned().unwrap_or_default();
        while let Some(c) = todo.pop() {
            out.push(c);
            if let Some(more) = self.children.get(c) {
                todo.extend(more.iter().copied());
            }
        }
        out
    }

    /// Entities a non-possessive pronoun cannot corefer with: co-arguments
    /// of its clause, NPs in its clause, and for subjects NPs in complement
    /// or relative clauses below it.
    pub fn binding_excluded(&self, um: &UnitMention, table: &EntityTable) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::new();
        let m = &um.record;
        if is_possessive(m) {
            return out;
        }
        for other in self.mentions.get(&um.clause).into_iter().flatten() {
            if other.id == m.id {
                continue;
            }
            let Some(e) = table.entity_of(other) else {
                continue;
            };
            let coargument = m.gf.is_argument() && other.gf.is_argument();
            let name = !other.exp.is_pronominal() && (m.gf == Gf::Subj || other.gf != Gf::Possessor);
            if coargument || name {
                out.insert(e);
            }
        }
        if m.gf == Gf::Subj {
            for clause in self.descendants(&um.clause) {
                for other in self.mentions.get(clause).into_iter().flatten() {
                    if !other.exp.is_pronominal() {
                        if let Some(e) = table.entity_of(other) {
                            out.insert(e);
                        }
                    }
                }
            }
        }
        out
    }
}
