//! The salience-based centering engine: a left-to-right fold over utterance
//! units with a stack of open centering levels.

mod filters;
mod resolve;
mod state;

use serde::Serialize;

use crate::annot::EntityId;
use crate::model::{classify_transition, AttentionalState, SegmentKind, Transition};
use crate::segment::{EventAction, SegmentEvent, SegmentedDiscourse};

pub use filters::{is_possessive, static_entity, ClauseIndex, EntityTable, Filter};
pub use resolve::{center_order, para_tiebreak, Candidate, FilterHit, Frame, PronounResult, Resolver, Strength, Tier};
pub use state::{absorb_popped, build_cf, compute_cb, update_state};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitTrace {
    pub index: usize,
    pub unit: String,
    pub sentence: String,
    pub level: usize,
    /// Number of open frames above the top level.
    pub depth: usize,
    pub segment: SegmentKind,
    pub events: Vec<SegmentEvent>,
    pub input_cm: Vec<EntityId>,
    pub cb_in: Option<EntityId>,
    pub cb_out: Option<EntityId>,
    pub cp: Option<EntityId>,
    pub transition: Transition,
    pub cf: Vec<EntityId>,
    pub pronouns: Vec<PronounResult>,
    /// Feature conflicts met while binding mentions to entities.
    pub conflicts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscourseRun {
    pub units: Vec<UnitTrace>,
    /// Segment closings after the last unit.
    pub trailing_events: Vec<SegmentEvent>,
    pub final_state: AttentionalState,
}

impl DiscourseRun {
    pub fn pronouns(&self) -> impl Iterator<Item = (&UnitTrace, &PronounResult)> {
        self.units.iter().flat_map(|u| u.pronouns.iter().map(move |p| (u, p)))
    }

    pub fn pronoun(&self, mention: &str) -> Option<&PronounResult> {
        self.pronouns().map(|(_, p)| p).find(|p| p.mention.as_str() == mention)
    }

    pub fn transitions(&self) -> Vec<Transition> {
        self.units.iter().map(|u| u.transition).collect()
    }
}

fn apply_event(frames: &mut Vec<Frame>, event: &SegmentEvent) {
    match event.action {
        EventAction::Push => {
            let state = frames.last().expect("bottom frame").state.clone();
            frames.push(Frame {
                state,
                kind: event.kind,
                fresh: true,
            });
        }
        EventAction::Pop => {
            if frames.len() < 2 {
                return;
            }
            let closed = frames.pop().unwrap();
            if closed.kind.accessible_on_pop() {
                let host = frames.last_mut().unwrap();
                host.state = absorb_popped(&host.state, &closed.state, closed.kind);
            }
        }
    }
}

pub fn run_discourse(seg: &SegmentedDiscourse) -> DiscourseRun {
    let index = ClauseIndex::new(seg);
    let mut table = EntityTable::default();
    let mut frames = vec![Frame {
        state: AttentionalState::default(),
        kind: SegmentKind::Top,
        fresh: true,
    }];
    let mut units = Vec::with_capacity(seg.units.len());

    for unit in &seg.units {
        let events: Vec<SegmentEvent> = seg.events_before(unit.index).copied().collect();
        for event in &events {
            apply_event(&mut frames, event);
        }
        let mut conflicts = Vec::new();
        for um in &unit.mentions {
            if let Some(e) = static_entity(&um.record) {
                conflicts.extend(table.bind(&um.record, &e));
            }
        }

        let mut pronouns = Vec::new();
        for (pos, um) in unit.mentions.iter().enumerate() {
            if !um.record.is_anaphoric() {
                continue;
            }
            let result = Resolver {
                index: &index,
                table: &table,
                frames: &frames,
            }
            .resolve(unit, pos);
            if let Some(e) = result.top().cloned() {
                conflicts.extend(table.bind(&um.record, &e));
            }
            pronouns.push(result);
        }

        let depth = frames.len() - 1;
        let frame = frames.last_mut().unwrap();
        let input = &frame.state;
        let cb_in = input.cb.clone();
        let cb_out = compute_cb(cb_in.as_ref(), unit, &table);
        let cf = build_cf(unit, &table);
        let output = update_state(input, cf, cb_out.clone());
        units.push(UnitTrace {
            index: unit.index,
            unit: unit.id.clone(),
            sentence: unit.sentence_id.clone(),
            level: unit.level,
            depth,
            segment: unit.segment_kind,
            events,
            input_cm: input.cm_or_empty(),
            transition: classify_transition(cb_in.as_ref(), cb_out.as_ref()),
            cb_in,
            cb_out,
            cp: output.cp().cloned(),
            cf: output.cf.iter().map(|e| e.entity.clone()).collect(),
            pronouns,
            conflicts,
        });
        frame.state = output;
        frame.fresh = false;
    }

    let trailing_events: Vec<SegmentEvent> = seg.events_before(seg.units.len()).copied().collect();
    for event in &trailing_events {
        apply_event(&mut frames, event);
    }
    DiscourseRun {
        units,
        trailing_events,
        final_state: frames.swap_remove(0).state,
    }
}
