//! Clause trees to utterance units. Tensed clauses head units, tenseless ones
//! merge upward, and tensed complements and relatives open embedded segments.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::annot::{CdaDocument, CdaSentence, ClauseId, MentionRecord, Relation};
use crate::model::SegmentKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("sentence `{sentence}`: matrix clause `{clause}` is tenseless")]
    TenselessMatrix { sentence: String, clause: String },
    #[error("sentence `{sentence}`: {relation} clause `{clause}` has no parent")]
    Orphan {
        sentence: String,
        clause: String,
        relation: Relation,
    },
    #[error("sentence `{sentence}`: clause `{clause}` has unknown parent `{parent}`")]
    UnknownParent {
        sentence: String,
        clause: String,
        parent: String,
    },
    #[error("sentence `{sentence}`: tenseless clause `{clause}` has no tensed ancestor")]
    NoHead { sentence: String, clause: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitMention {
    pub clause: ClauseId,
    pub record: MentionRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UtteranceUnit {
    /// Id of the head clause.
    pub id: String,
    pub clause_ids: Vec<ClauseId>,
    pub mentions: Vec<UnitMention>,
    pub level: usize,
    pub segment_kind: SegmentKind,
    pub sentence_id: String,
    pub index: usize,
    pub relation: Relation,
    pub connective: Option<String>,
    /// For conjunct heads: index of the unit holding the parent conjunct.
    pub parallel_with: Option<usize>,
    /// Index of the unit holding the head clause's parent clause.
    pub superordinate: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventAction {
    Push,
    Pop,
}

/// A segment boundary that applies just before unit `position`
/// (`position == units.len()` for boundaries after the last unit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SegmentEvent {
    pub action: EventAction,
    pub kind: SegmentKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseInfo {
    pub parent: Option<ClauseId>,
    pub relation: Relation,
    pub sentence_id: String,
    pub unit: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SegmentedDiscourse {
    pub units: Vec<UtteranceUnit>,
    pub events: Vec<SegmentEvent>,
    pub clauses: BTreeMap<ClauseId, ClauseInfo>,
}

impl SegmentedDiscourse {
    pub fn events_before(&self, position: usize) -> impl Iterator<Item = &SegmentEvent> {
        self.events.iter().filter(move |e| e.position == position)
    }

    /// True when `descendant` is `ancestor` or lies below it in the clause tree.
    pub fn dominates(&self, ancestor: &ClauseId, descendant: &ClauseId) -> bool {
        let mut cursor = Some(descendant);
        while let Some(c) = cursor {
            if c == ancestor {
                return true;
            }
            cursor = self.clauses.get(c).and_then(|i| i.parent.as_ref());
        }
        false
    }
}

fn opened_segment(relation: Relation) -> Option<SegmentKind> {
    match relation {
        Relation::CompReport => Some(SegmentKind::Speech),
        Relation::CompNonReport => Some(SegmentKind::Comp),
        Relation::Rel => Some(SegmentKind::Rel),
        _ => None,
    }
}

/// Segments one sentence. Unit indices start at `first_index`; levels start
/// at `start_level`. Events for segments closed at sentence end are placed at
/// `first_index + units.len()`.
pub fn segment_sentence(
    sent: &CdaSentence,
    start_level: usize,
    first_index: usize,
) -> Result<SegmentedDiscourse, SegmentError> {
    let by_id: BTreeMap<&ClauseId, &crate::annot::ClauseRecord> =
        sent.clauses.iter().map(|c| (&c.id, c)).collect();
    for c in &sent.clauses {
        match (&c.parent, c.relation) {
            (None, Relation::Matrix) => {
                if !c.tense.is_tensed() {
                    return Err(SegmentError::TenselessMatrix {
                        sentence: sent.id.clone(),
                        clause: c.id.0.clone(),
                    });
                }
            }
            (None, relation) => {
                return Err(SegmentError::Orphan {
                    sentence: sent.id.clone(),
                    clause: c.id.0.clone(),
                    relation,
                })
            }
            (Some(p), _) => {
                if !by_id.contains_key(p) {
                    return Err(SegmentError::UnknownParent {
                        sentence: sent.id.clone(),
                        clause: c.id.0.clone(),
                        parent: p.0.clone(),
                    });
                }
            }
        }
    }
    let ancestors = |c: &ClauseId| {
        let mut out = vec![c.clone()];
        let mut cursor = by_id[c].parent.clone();
        while let Some(p) = cursor {
            if out.len() > sent.clauses.len() {
                break;
            }
            cursor = by_id[&p].parent.clone();
            out.push(p);
        }
        out
    };

    let heads: Vec<&ClauseId> = sent
        .clauses
        .iter()
        .filter(|c| c.tense.is_tensed())
        .map(|c| &c.id)
        .collect();
    let unit_of_head: BTreeMap<&ClauseId, usize> = heads
        .iter()
        .enumerate()
        .map(|(i, h)| (*h, first_index + i))
        .collect();

    let mut owner: BTreeMap<ClauseId, usize> = BTreeMap::new();
    for c in &sent.clauses {
        let head = ancestors(&c.id)
            .into_iter()
            .find(|a| by_id[a].tense.is_tensed())
            .ok_or_else(|| SegmentError::NoHead {
                sentence: sent.id.clone(),
                clause: c.id.0.clone(),
            })?;
        owner.insert(c.id.clone(), unit_of_head[&head]);
    }

    let mut out = SegmentedDiscourse::default();
    let mut open: Vec<(ClauseId, SegmentKind)> = Vec::new();
    for (offset, head) in heads.iter().enumerate() {
        let index = first_index + offset;
        let record = by_id[head];
        let mut chain: Vec<(ClauseId, SegmentKind)> = ancestors(head)
            .into_iter()
            .filter_map(|a| {
                let c = by_id[&a];
                let kind = opened_segment(c.relation).filter(|_| c.tense.is_tensed())?;
                Some((a, kind))
            })
            .collect();
        chain.reverse();
        let shared = open.iter().zip(&chain).take_while(|(a, b)| a == b).count();
        while open.len() > shared {
            let (_, kind) = open.pop().unwrap();
            out.events.push(SegmentEvent {
                action: EventAction::Pop,
                kind,
                position: index,
            });
        }
        for entry in &chain[shared..] {
            out.events.push(SegmentEvent {
                action: EventAction::Push,
                kind: entry.1,
                position: index,
            });
            open.push(entry.clone());
        }

        let clause_ids: Vec<ClauseId> = sent
            .clauses
            .iter()
            .filter(|c| owner[&c.id] == index)
            .map(|c| c.id.clone())
            .collect();
        let mentions = sent
            .clauses
            .iter()
            .filter(|c| owner[&c.id] == index)
            .flat_map(|c| {
                c.mentions.iter().map(|m| UnitMention {
                    clause: c.id.clone(),
                    record: m.clone(),
                })
            })
            .collect();
        let superordinate = record.parent.as_ref().map(|p| owner[p]);
        out.units.push(UtteranceUnit {
            id: head.0.clone(),
            clause_ids,
            mentions,
            level: start_level + chain.len(),
            segment_kind: chain.last().map_or(SegmentKind::Top, |c| c.1),
            sentence_id: sent.id.clone(),
            index,
            relation: record.relation,
            connective: record.connective.clone(),
            parallel_with: superordinate.filter(|_| record.relation == Relation::Conj),
            superordinate,
        });
    }
    let end = first_index + heads.len();
    while let Some((_, kind)) = open.pop() {
        out.events.push(SegmentEvent {
            action: EventAction::Pop,
            kind,
            position: end,
        });
    }
    for c in &sent.clauses {
        out.clauses.insert(
            c.id.clone(),
            ClauseInfo {
                parent: c.parent.clone(),
                relation: c.relation,
                sentence_id: sent.id.clone(),
                unit: owner[&c.id],
            },
        );
    }
    Ok(out)
}

pub fn segment_document(doc: &CdaDocument) -> Result<SegmentedDiscourse, SegmentError> {
    let mut out = SegmentedDiscourse::default();
    for sent in &doc.sentences {
        let part = segment_sentence(sent, 0, out.units.len())?;
        out.units.extend(part.units);
        out.events.extend(part.events);
        out.clauses.extend(part.clauses);
    }
    Ok(out)
}
