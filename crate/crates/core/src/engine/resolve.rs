//! Candidate pools, filters and ranking for a single pronoun.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::annot::{EntityId, ExpType, Gf, MentionId, Relation};
use crate::model::{AttentionalState, LayerOrigin, SegmentKind};
use crate::segment::UtteranceUnit;

use super::filters::{is_possessive, ClauseIndex, EntityTable, Filter};

/// One open centering level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub state: AttentionalState,
    pub kind: SegmentKind,
    /// No unit has been processed at this level since it was opened.
    pub fresh: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Override,
    Parallel,
    Locality,
    /// Cm of the input state.
    Cm,
    /// The rest of the input Cf.
    RestCf,
    /// An older layer of the input state, most recent first.
    Older(usize),
    /// A lower open frame, nearest first.
    Lower(usize),
    /// Earlier mentions of the current unit.
    Intra,
}

impl Tier {
    pub fn label(self) -> String {
        match self {
            Tier::Override => "override".into(),
            Tier::Parallel => "cpara".into(),
            Tier::Locality => "locality".into(),
            Tier::Cm => "T1".into(),
            Tier::RestCf => "T2".into(),
            Tier::Older(i) => format!("T3.{i}"),
            Tier::Lower(i) => format!("T4.{i}"),
            Tier::Intra => "T5".into(),
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Tier {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Determinate,
    Weak,
    Unresolved,
}

impl Strength {
    pub fn as_str(self) -> &'static str {
        match self {
            Strength::Determinate => "determinate",
            Strength::Weak => "weak",
            Strength::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub entity: EntityId,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterHit {
    pub entity: EntityId,
    pub tier: Tier,
    pub filter: Filter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PronounResult {
    pub mention: MentionId,
    pub surface: String,
    pub exp: ExpType,
    pub gf: Gf,
    /// Candidates before filtering, in tier order.
    pub pool: Vec<Candidate>,
    pub filtered: Vec<FilterHit>,
    pub ranked: Vec<Candidate>,
    pub strength: Strength,
    /// What decided the top candidate: a tier label, `PARA`, `CENTER`,
    /// `LOCALITY`, `CPARA` or `OVERRIDE`.
    pub basis: String,
    pub used_override: bool,
    pub gold: Option<EntityId>,
    pub notes: Vec<String>,
}

impl PronounResult {
    pub fn top(&self) -> Option<&EntityId> {
        self.ranked.first().map(|c| &c.entity)
    }

    /// Filters that removed at least one candidate, deduplicated.
    pub fn filters_used(&self) -> Vec<Filter> {
        let set: BTreeSet<Filter> = self.filtered.iter().map(|h| h.filter).collect();
        set.into_iter().collect()
    }

    pub fn diverges_from_gold(&self) -> bool {
        matches!((&self.gold, self.top()), (Some(g), Some(t)) if g != t)
    }
}

/// Position of each entity in a state's salience order.
fn state_position(state: &AttentionalState, e: &EntityId) -> usize {
    state.entities().position(|x| x == e).unwrap_or(usize::MAX)
}

/// Entities whose latest realization shares the pronoun's GF come first;
/// everything else keeps state order.
pub fn para_tiebreak(tied: &[EntityId], gf: Gf, state: &AttentionalState) -> Vec<EntityId> {
    let mut ordered = tied.to_vec();
    ordered.sort_by_key(|e| state_position(state, e));
    let (mut hit, miss): (Vec<_>, Vec<_>) = ordered
        .into_iter()
        .partition(|e| state.latest(e).is_some_and(|r| r.gf == gf));
    hit.extend(miss);
    hit
}

/// The Cb first, then state order.
pub fn center_order(tied: &[EntityId], state: &AttentionalState) -> Vec<EntityId> {
    let mut ordered = tied.to_vec();
    ordered.sort_by_key(|e| (Some(e) != state.cb.as_ref(), state_position(state, e)));
    ordered
}

pub struct Resolver<'a> {
    pub index: &'a ClauseIndex<'a>,
    pub table: &'a EntityTable,
    /// Bottom to top; the last frame holds the input state.
    pub frames: &'a [Frame],
}

impl Resolver<'_> {
    fn pool(&self, unit: &UtteranceUnit, pos: usize) -> Vec<Candidate> {
        let top = self.frames.len() - 1;
        let input = &self.frames[top].state;
        let mut tiers: Vec<(Tier, Vec<EntityId>)> = Vec::new();
        let cm = input.cm_or_empty();
        tiers.push((
            Tier::RestCf,
            input.cf.iter().map(|e| e.entity.clone()).filter(|e| !cm.contains(e)).collect(),
        ));
        tiers.insert(0, (Tier::Cm, cm));
        for (i, layer) in input.older.iter().enumerate() {
            tiers.push((Tier::Older(i), layer.entries.iter().map(|e| e.entity.clone()).collect()));
        }
        for (j, idx) in (0..top).rev().enumerate() {
            if self.frames[idx + 1].kind == SegmentKind::Speech {
                break;
            }
            tiers.push((Tier::Lower(j), self.frames[idx].state.entities().cloned().collect()));
        }
        tiers.push((
            Tier::Intra,
            unit.mentions[..pos]
                .iter()
                .rev()
                .filter_map(|um| self.table.entity_of(&um.record))
                .collect(),
        ));
        let mut seen = BTreeSet::new();
        let mut pool = Vec::new();
        for (tier, ents) in tiers {
            for e in ents {
                if seen.insert(e.clone()) {
                    pool.push(Candidate { entity: e, tier });
                }
            }
        }
        pool
    }

    fn special_route(&self, unit: &UtteranceUnit, pos: usize, notes: &mut Vec<String>) -> Option<Candidate> {
        let m = &unit.mentions[pos].record;
        if let Some(target) = &m.override_antecedent {
            match self.index.mention(target).and_then(|t| self.table.entity_of(t)) {
                Some(e) => {
                    return Some(Candidate {
                        entity: e,
                        tier: Tier::Override,
                    })
                }
                None => notes.push(format!("override target {target} has no entity yet; ignored")),
            }
        }
        if m.exp == ExpType::Zero && m.gf == Gf::Subj && unit.relation == Relation::Conj {
            if let Some(pi) = unit.parallel_with {
                let subject = self.index.seg.units[pi]
                    .mentions
                    .iter()
                    .filter(|um| um.record.gf == Gf::Subj)
                    .find_map(|um| self.table.entity_of(&um.record));
                match subject {
                    Some(e) if self.table.check(m, &e).is_none() => {
                        return Some(Candidate {
                            entity: e,
                            tier: Tier::Parallel,
                        })
                    }
                    _ => notes.push("parallel conjunct has no compatible subject".into()),
                }
            }
        }
        if is_possessive(m) {
            let near = unit.mentions[..pos]
                .iter()
                .rev()
                .filter_map(|um| self.table.entity_of(&um.record))
                .find(|e| self.table.check(m, e).is_none());
            if let Some(e) = near {
                return Some(Candidate {
                    entity: e,
                    tier: Tier::Locality,
                });
            }
        }
        None
    }

    pub fn resolve(&self, unit: &UtteranceUnit, pos: usize) -> PronounResult {
        let um = &unit.mentions[pos];
        let m = &um.record;
        let frame = self.frames.last().expect("at least one frame");
        let input = &frame.state;
        let excluded = self.index.binding_excluded(um, self.table);
        let pool = self.pool(unit, pos);

        let mut filtered = Vec::new();
        let mut survivors: Vec<&Candidate> = Vec::new();
        for c in &pool {
            let hit = self.table.check(m, &c.entity).or_else(|| {
                excluded.contains(&c.entity).then_some(Filter::Binding)
            });
            match hit {
                Some(filter) => filtered.push(FilterHit {
                    entity: c.entity.clone(),
                    tier: c.tier,
                    filter,
                }),
                None => survivors.push(c),
            }
        }

        let mut notes = Vec::new();
        let mut ranked: Vec<Candidate> = Vec::new();
        let mut strength = Strength::Unresolved;
        let mut basis = String::from("none");
        if let Some(first) = survivors.first() {
            let top_tier = first.tier;
            let tied: Vec<EntityId> = survivors
                .iter()
                .filter(|c| c.tier == top_tier)
                .map(|c| c.entity.clone())
                .collect();
            let ordered = if tied.len() == 1 {
                strength = Strength::Determinate;
                basis = top_tier.label();
                tied
            } else if frame.fresh {
                strength = Strength::Weak;
                basis = "CENTER".into();
                center_order(&tied, input)
            } else {
                strength = Strength::Weak;
                basis = "PARA".into();
                para_tiebreak(&tied, m.gf, input)
            };
            ranked.extend(ordered.into_iter().map(|entity| Candidate { entity, tier: top_tier }));
            ranked.extend(survivors.iter().filter(|c| c.tier != top_tier).map(|c| (*c).clone()));
        }

        let mut used_override = false;
        if let Some(special) = self.special_route(unit, pos, &mut notes) {
            ranked.retain(|c| c.entity != special.entity);
            strength = Strength::Determinate;
            basis = match special.tier {
                Tier::Override => {
                    used_override = true;
                    "OVERRIDE"
                }
                Tier::Parallel => "CPARA",
                _ => "LOCALITY",
            }
            .into();
            ranked.insert(0, special);
        }

        if let Some(top) = ranked.first() {
            match top.tier {
                Tier::Older(i) if matches!(input.older[i].origin, LayerOrigin::Popped(_)) => {
                    notes.push("answer comes from a closed embedded segment, demoted below the host Cf".into())
                }
                Tier::Lower(_) => notes.push("answer comes from a lower open frame, ranked by depth".into()),
                _ => {}
            }
        }

        PronounResult {
            mention: m.id.clone(),
            surface: m.surface.clone(),
            exp: m.exp,
            gf: m.gf,
            pool,
            filtered,
            ranked,
            strength,
            basis,
            used_override,
            gold: m.gold_entity.clone(),
            notes,
        }
    }
}
