//! Output-state construction: Cf ordering, demotion into older layers, and
//! Cb assignment.

use std::collections::BTreeSet;

use crate::annot::{EntityId, Person};
use crate::model::{AttentionalState, CfEntry, LayerOrigin, OlderLayer, SegmentKind};
use crate::segment::UtteranceUnit;

use super::filters::{is_possessive, EntityTable};

/// One entry per realized entity, its best realization, ordered by
/// GF rank, then expression rank, then surface position.
pub fn build_cf(unit: &UtteranceUnit, table: &EntityTable) -> Vec<CfEntry> {
    let mut cf: Vec<CfEntry> = Vec::new();
    for (position, um) in unit.mentions.iter().enumerate() {
        let Some(entity) = table.entity_of(&um.record) else {
            continue;
        };
        let entry = CfEntry {
            entity,
            mention: um.record.id.clone(),
            gf: um.record.gf,
            exp: um.record.exp,
            position,
        };
        match cf.iter_mut().find(|e| e.entity == entry.entity) {
            Some(existing) if entry.sort_key() < existing.sort_key() => *existing = entry,
            Some(_) => {}
            None => cf.push(entry),
        }
    }
    cf.sort_by_key(CfEntry::sort_key);
    cf
}

/// Cb-chaining pronoun first, then the best non-possessive pronoun by
/// (GF rank, position); possessives only when no other pronoun resolved.
pub fn compute_cb(prev_cb: Option<&EntityId>, unit: &UtteranceUnit, table: &EntityTable) -> Option<EntityId> {
    let resolved: Vec<(usize, &crate::annot::MentionRecord, EntityId)> = unit
        .mentions
        .iter()
        .enumerate()
        .filter(|(_, um)| um.record.is_anaphoric())
        .filter_map(|(i, um)| table.assigned.get(&um.record.id).map(|e| (i, &um.record, e.clone())))
        .collect();
    debug_assert!(resolved.iter().all(|(_, m, _)| m.person == Person::Third));
    if let Some(prev) = prev_cb {
        if resolved.iter().any(|(_, _, e)| e == prev) {
            return Some(prev.clone());
        }
    }
    let best = |possessive: bool| {
        resolved
            .iter()
            .filter(|(_, m, _)| is_possessive(m) == possessive)
            .min_by_key(|(i, m, _)| (crate::model::gf_rank(m.gf), *i))
            .map(|(_, _, e)| e.clone())
    };
    best(false).or_else(|| best(true))
}

/// Removes entities already seen (in `seen` or earlier layers) and drops
/// emptied layers.
fn dedupe_layers(layers: Vec<OlderLayer>, mut seen: BTreeSet<EntityId>) -> Vec<OlderLayer> {
    layers
        .into_iter()
        .filter_map(|mut layer| {
            layer.entries.retain(|e| seen.insert(e.entity.clone()));
            (!layer.entries.is_empty()).then_some(layer)
        })
        .collect()
}

pub fn update_state(prev: &AttentionalState, cf: Vec<CfEntry>, cb: Option<EntityId>) -> AttentionalState {
    let seen: BTreeSet<EntityId> = cf.iter().map(|e| e.entity.clone()).collect();
    let mut layers = Vec::with_capacity(prev.older.len() + 1);
    layers.push(OlderLayer {
        entries: prev.cf.clone(),
        origin: LayerOrigin::Demoted,
    });
    layers.extend(prev.older.iter().cloned());
    AttentionalState {
        cf,
        cb,
        older: dedupe_layers(layers, seen),
    }
}

/// Host state after an accessible embedded segment closes: the embedded Cf
/// goes below the host Cf as the most recent older layer.
pub fn absorb_popped(host: &AttentionalState, embedded: &AttentionalState, kind: SegmentKind) -> AttentionalState {
    let seen: BTreeSet<EntityId> = host.cf.iter().map(|e| e.entity.clone()).collect();
    let mut layers = Vec::with_capacity(host.older.len() + 1);
    layers.push(OlderLayer {
        entries: embedded.cf.clone(),
        origin: LayerOrigin::Popped(kind),
    });
    layers.extend(host.older.iter().cloned());
    AttentionalState {
        cf: host.cf.clone(),
        cb: host.cb.clone(),
        older: dedupe_layers(layers, seen),
    }
}
