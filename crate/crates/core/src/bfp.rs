//! The Brennan–Friedman–Pollard centering algorithm over the same units,
//! kept as a baseline for divergence studies.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::annot::{EntityId, MentionId};
use crate::engine::{self, build_cf, static_entity, ClauseIndex, EntityTable, Strength};
use crate::model::{BfpTransition, CfEntry, Transition};
use crate::segment::{EventAction, SegmentedDiscourse, UtteranceUnit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BfpAnchor {
    pub cb: Option<EntityId>,
    pub cp: Option<EntityId>,
    pub cf: Vec<CfEntry>,
    /// Pronoun → chosen entity, in surface order. `None` when no candidate survived.
    pub assignment: Vec<(MentionId, Option<EntityId>)>,
    pub transition: BfpTransition,
    /// False when every anchor broke Rule 1 and the best of them was kept.
    pub rule1_satisfied: bool,
}

impl BfpAnchor {
    pub fn pick(&self, mention: &MentionId) -> Option<&EntityId> {
        self.assignment
            .iter()
            .find(|(m, _)| m == mention)
            .and_then(|(_, e)| e.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BfpUnit {
    pub index: usize,
    pub unit: String,
    pub prev_cb: Option<EntityId>,
    pub anchor: BfpAnchor,
    /// Candidate entities per pronoun after filtering, in prevCf order.
    pub candidates: Vec<(MentionId, Vec<EntityId>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BfpRun {
    pub units: Vec<BfpUnit>,
}

impl BfpRun {
    pub fn pick(&self, mention: &str) -> Option<&EntityId> {
        let id = MentionId::new(mention);
        self.units.iter().find_map(|u| u.anchor.pick(&id))
    }
}

#[derive(Debug, Clone, Default)]
struct BfpState {
    cf: Vec<CfEntry>,
    cb: Option<EntityId>,
}

/// Chooses the best anchor for one unit. `table` supplies features and the
/// entities of earlier mentions; it is updated with the chosen assignment.
pub fn bfp_resolve(
    unit: &UtteranceUnit,
    prev_cf: &[CfEntry],
    prev_cb: Option<&EntityId>,
    index: &ClauseIndex<'_>,
    table: &mut EntityTable,
) -> (BfpAnchor, Vec<(MentionId, Vec<EntityId>)>) {
    for um in &unit.mentions {
        if let Some(e) = static_entity(&um.record) {
            table.bind(&um.record, &e);
        }
    }
    let pronouns: Vec<usize> = (0..unit.mentions.len())
        .filter(|&i| unit.mentions[i].record.is_anaphoric())
        .collect();

    let mut candidates: Vec<Vec<EntityId>> = Vec::with_capacity(pronouns.len());
    for &pos in &pronouns {
        let um = &unit.mentions[pos];
        let excluded = index.binding_excluded(um, table);
        let mut list: Vec<EntityId> = Vec::new();
        let pool = prev_cf
            .iter()
            .map(|e| e.entity.clone())
            .chain(unit.mentions[..pos].iter().filter_map(|o| static_entity(&o.record)));
        for e in pool {
            let blocked = table.check(&um.record, &e).is_some() || excluded.contains(&e);
            if !blocked && !list.contains(&e) {
                list.push(e);
            }
        }
        candidates.push(list);
    }

    struct Scored {
        key: (bool, u8, usize, Vec<usize>),
        anchor: BfpAnchor,
    }
    let prev_index = |e: &EntityId| prev_cf.iter().position(|c| &c.entity == e);
    let mut best: Option<Scored> = None;
    let mut choice = vec![0usize; pronouns.len()];
    loop {
        let mut trial = table.clone();
        let mut assignment = Vec::with_capacity(pronouns.len());
        for (k, &pos) in pronouns.iter().enumerate() {
            let m = &unit.mentions[pos].record;
            let picked = candidates[k].get(choice[k]).cloned();
            if let Some(e) = &picked {
                trial.assigned.insert(m.id.clone(), e.clone());
            }
            assignment.push((m.id.clone(), picked));
        }
        let consistent = pronouns.iter().all(|&pos| {
            let um = &unit.mentions[pos];
            match trial.assigned.get(&um.record.id) {
                Some(e) => !index.binding_excluded(um, &trial).contains(e),
                None => true,
            }
        });
        if consistent {
            let cf = build_cf(unit, &trial);
            let cb = prev_cf
                .iter()
                .find(|p| cf.iter().any(|c| c.entity == p.entity))
                .map(|p| p.entity.clone());
            let cp = cf.first().map(|c| c.entity.clone());
            let transition = BfpTransition::classify(prev_cb, cb.as_ref(), cp.as_ref());
            let has_pronoun = assignment.iter().any(|(_, e)| e.is_some());
            let rule1 = match (&cb, has_pronoun) {
                (Some(cb), true) => unit.mentions.iter().any(|um| {
                    um.record.exp.is_pronominal() && trial.entity_of(&um.record).as_ref() == Some(cb)
                }),
                _ => true,
            };
            let key = (
                !rule1,
                transition.rank(),
                cb.as_ref().and_then(prev_index).unwrap_or(usize::MAX),
                choice.clone(),
            );
            if best.as_ref().is_none_or(|b| key < b.key) {
                best = Some(Scored {
                    key,
                    anchor: BfpAnchor {
                        cb,
                        cp,
                        cf,
                        assignment,
                        transition,
                        rule1_satisfied: rule1,
                    },
                });
            }
        }
        let mut k = 0;
        loop {
            if k == pronouns.len() {
                break;
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len().max(1) {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == pronouns.len() {
            break;
        }
    }

    let anchor = match best {
        Some(b) => b.anchor,
        None => {
            // Every combination violated binding: leave all pronouns unresolved.
            let cf = build_cf(unit, table);
            let cb = prev_cf
                .iter()
                .find(|p| cf.iter().any(|c| c.entity == p.entity))
                .map(|p| p.entity.clone());
            let cp = cf.first().map(|c| c.entity.clone());
            BfpAnchor {
                transition: BfpTransition::classify(prev_cb, cb.as_ref(), cp.as_ref()),
                cb,
                cp,
                cf,
                assignment: pronouns
                    .iter()
                    .map(|&p| (unit.mentions[p].record.id.clone(), None))
                    .collect(),
                rule1_satisfied: true,
            }
        }
    };
    for (m, e) in &anchor.assignment {
        if let (Some(e), Some(record)) = (e, index.mention(m)) {
            table.bind(record, e);
        }
    }
    let listed = pronouns
        .iter()
        .zip(candidates)
        .map(|(&p, c)| (unit.mentions[p].record.id.clone(), c))
        .collect();
    (anchor, listed)
}

/// Left-to-right BFP fold. Embedded segments start from a copy of the host
/// state and the host resumes unchanged when they close.
pub fn run_bfp(seg: &SegmentedDiscourse) -> BfpRun {
    let index = ClauseIndex::new(seg);
    let mut table = EntityTable::default();
    let mut stack = vec![BfpState::default()];
    let mut units = Vec::with_capacity(seg.units.len());
    for unit in &seg.units {
        for event in seg.events_before(unit.index) {
            match event.action {
                EventAction::Push => {
                    let top = stack.last().unwrap().clone();
                    stack.push(top);
                }
                EventAction::Pop => {
                    if stack.len() > 1 {
                        stack.pop();
                    }
                }
            }
        }
        let state = stack.last_mut().unwrap();
        let (anchor, candidates) = bfp_resolve(unit, &state.cf, state.cb.as_ref(), &index, &mut table);
        units.push(BfpUnit {
            index: unit.index,
            unit: unit.id.clone(),
            prev_cb: state.cb.clone(),
            anchor: anchor.clone(),
            candidates,
        });
        state.cf = anchor.cf;
        state.cb = anchor.cb;
    }
    BfpRun { units }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PronounComparison {
    pub unit: String,
    pub mention: MentionId,
    pub surface: String,
    pub salience: Option<EntityId>,
    pub strength: Strength,
    pub basis: String,
    pub bfp: Option<EntityId>,
    pub gold: Option<EntityId>,
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitComparison {
    pub unit: String,
    pub salience: Transition,
    pub salience_cb: Option<EntityId>,
    pub bfp: BfpTransition,
    pub bfp_cb: Option<EntityId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub pronouns: Vec<PronounComparison>,
    pub units: Vec<UnitComparison>,
}

impl Comparison {
    pub fn divergences(&self) -> impl Iterator<Item = &PronounComparison> {
        self.pronouns.iter().filter(|p| p.divergent)
    }
}

pub fn compare_models(seg: &SegmentedDiscourse) -> Comparison {
    let salience = engine::run_discourse(seg);
    let bfp = run_bfp(seg);
    let picks: BTreeMap<&MentionId, Option<&EntityId>> = bfp
        .units
        .iter()
        .flat_map(|u| u.anchor.assignment.iter().map(|(m, e)| (m, e.as_ref())))
        .collect();
    let pronouns = salience
        .pronouns()
        .map(|(u, p)| {
            let bfp_pick = picks.get(&p.mention).copied().flatten().cloned();
            PronounComparison {
                unit: u.unit.clone(),
                mention: p.mention.clone(),
                surface: p.surface.clone(),
                salience: p.top().cloned(),
                strength: p.strength,
                basis: p.basis.clone(),
                divergent: p.top() != bfp_pick.as_ref(),
                bfp: bfp_pick,
                gold: p.gold.clone(),
            }
        })
        .collect();
    let units = salience
        .units
        .iter()
        .zip(&bfp.units)
        .map(|(s, b)| UnitComparison {
            unit: s.unit.clone(),
            salience: s.transition,
            salience_cb: s.cb_out.clone(),
            bfp: b.anchor.transition,
            bfp_cb: b.anchor.cb.clone(),
        })
        .collect();
    Comparison { pronouns, units }
}

