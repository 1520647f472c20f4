//! Shared test support: fixture loading, random document generators and
//! brute-force oracles that recompute results without the engine.
#![allow(dead_code)]


use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use centering::annot::{
    parse_cda, CdaDocument, CdaSentence, ClauseRecord, EntityId, ExpType, Gender, Gf, MentionId, MentionRecord,
    Number, Person, Relation, Tense,
};
use centering::segment::{segment_document, SegmentedDiscourse};
use proptest::prelude::*;
use proptest::sample::select;

// ---------------------------------------------------------------- fixtures

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixtures_dir().join(format!("{name}.cda"))
}

pub fn fixture_paths() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "cda"))
        .collect();
    paths.sort();
    paths
}

pub fn load(name: &str) -> (CdaDocument, SegmentedDiscourse) {
    let text = fs::read_to_string(fixture_path(name)).expect("fixture readable");
    let doc = parse_cda(&text).unwrap_or_else(|e| panic!("{name}: {e:?}"));
    let seg = segment_document(&doc).unwrap_or_else(|e| panic!("{name}: {e}"));
    (doc, seg)
}

pub fn ent(s: &str) -> EntityId {
    EntityId::new(s)
}

// ------------------------------------------------------- random documents

#[derive(Debug, Clone)]
pub struct MentionSpec {
    exp: ExpType,
    gf: Gf,
    gender: Gender,
    number: Number,
    person: Person,
    surface: String,
    sort: Option<&'static str>,
    gold: Option<u8>,
    ante: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ClauseSpec {
    parent_pick: usize,
    relation: Relation,
    tense: Tense,
    connective: Option<String>,
    mentions: Vec<MentionSpec>,
}

#[derive(Debug, Clone)]
pub struct SentenceSpec {
    matrix_tense: Tense,
    matrix_connective: Option<String>,
    matrix_mentions: Vec<MentionSpec>,
    clauses: Vec<ClauseSpec>,
}

const SORTS: &[&str] = &["person", "event", "time", "thing", "pleo"];

fn arb_mention_spec() -> impl Strategy<Value = MentionSpec> {
    (
        select(ExpType::ALL.to_vec()),
        select(Gf::ALL.to_vec()),
        select(Gender::ALL.to_vec()),
        select(Number::ALL.to_vec()),
        prop_oneof![6 => Just(Person::Third), 1 => Just(Person::First), 1 => Just(Person::Second)],
        "[a-zA-Z0-9 ,.'\"\\\\=éß-]{0,10}",
        proptest::option::weighted(0.3, select(SORTS.to_vec())),
        proptest::option::weighted(0.8, 0u8..4),
        proptest::option::weighted(0.15, any::<usize>()),
    )
        .prop_map(|(exp, gf, gender, number, person, surface, sort, gold, ante)| MentionSpec {
            exp,
            gf,
            gender,
            number,
            person,
            surface,
            sort,
            gold,
            ante,
        })
}

fn arb_clause_spec() -> impl Strategy<Value = ClauseSpec> {
    (
        any::<usize>(),
        select(Relation::ALL.iter().copied().filter(|r| *r != Relation::Matrix).collect::<Vec<_>>()),
        select(Tense::ALL.to_vec()),
        proptest::option::weighted(0.4, "[a-zA-Z \"=]{1,8}"),
        prop::collection::vec(arb_mention_spec(), 0..4),
    )
        .prop_map(|(parent_pick, relation, tense, connective, mentions)| ClauseSpec {
            parent_pick,
            relation,
            tense,
            connective,
            mentions,
        })
}

fn arb_sentence_spec(tensed_matrix: bool) -> impl Strategy<Value = SentenceSpec> {
    let tense = if tensed_matrix {
        prop_oneof![Just(Tense::Tensed), Just(Tense::Elided)].boxed()
    } else {
        select(Tense::ALL.to_vec()).boxed()
    };
    (
        tense,
        proptest::option::weighted(0.2, "[a-zA-Z ]{1,8}"),
        prop::collection::vec(arb_mention_spec(), 0..4),
        prop::collection::vec(arb_clause_spec(), 0..4),
    )
        .prop_map(|(matrix_tense, matrix_connective, matrix_mentions, clauses)| SentenceSpec {
            matrix_tense,
            matrix_connective,
            matrix_mentions,
            clauses,
        })
}

/// Builds a well-formed document from specs. Parents always precede their
/// children; antecedent picks are mapped onto existing mention ids.
/// At most `max_mentions` mentions are kept.
fn build_document(id: &str, sentences: &[SentenceSpec], max_mentions: usize) -> CdaDocument {
    let mut doc = CdaDocument {
        id: id.into(),
        sentences: Vec::new(),
    };
    let mut next = 0usize;
    let mut antes: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mention = |spec: &MentionSpec, next: &mut usize| -> Option<MentionRecord> {
        if *next >= max_mentions {
            return None;
        }
        let gf = if spec.exp == ExpType::PossPronoun { Gf::Possessor } else { spec.gf };
        let mut m = MentionRecord::new(format!("m{next}"), spec.exp, gf);
        *next += 1;
        m.gender = spec.gender;
        m.number = spec.number;
        m.person = spec.person;
        if spec.exp != ExpType::Zero {
            m.surface = spec.surface.clone();
        }
        m.sort = spec.sort.map(str::to_string);
        m.gold_entity = spec.gold.map(|g| EntityId::new(format!("E{g}")));
        Some(m)
    };
    for (si, s) in sentences.iter().enumerate() {
        let mut sentence = CdaSentence {
            id: format!("s{si}"),
            clauses: Vec::new(),
        };
        let mut matrix = ClauseRecord::new(format!("s{si}c0"), None, Relation::Matrix, s.matrix_tense);
        matrix.connective = s.matrix_connective.clone();
        for spec in &s.matrix_mentions {
            if let Some(m) = mention(spec, &mut next) {
                if let Some(a) = spec.ante {
                    antes.push((si, 0, matrix.mentions.len(), a));
                }
                matrix.mentions.push(m);
            }
        }
        sentence.clauses.push(matrix);
        for (ci, c) in s.clauses.iter().enumerate() {
            let parent = c.parent_pick % (ci + 1);
            let mut clause = ClauseRecord::new(
                format!("s{si}c{}", ci + 1),
                Some(&format!("s{si}c{parent}")),
                c.relation,
                c.tense,
            );
            clause.connective = c.connective.clone();
            for spec in &c.mentions {
                if let Some(m) = mention(spec, &mut next) {
                    if let Some(a) = spec.ante {
                        antes.push((si, ci + 1, clause.mentions.len(), a));
                    }
                    clause.mentions.push(m);
                }
            }
            sentence.clauses.push(clause);
        }
        doc.sentences.push(sentence);
    }
    if next > 0 {
        for (si, ci, mi, pick) in antes {
            let m = &mut doc.sentences[si].clauses[ci].mentions[mi];
            let target = MentionId::new(format!("m{}", pick % next));
            if target != m.id {
                m.override_antecedent = Some(target);
            }
        }
    }
    doc
}

/// Arbitrary well-formed documents, for round-trip checks.
pub fn arb_document() -> impl Strategy<Value = CdaDocument> {
    ("[a-z][a-z0-9_]{0,6}", prop::collection::vec(arb_sentence_spec(false), 1..4))
        .prop_map(|(id, sentences)| build_document(&id, &sentences, usize::MAX))
}

/// Segmentable documents with at most 50 mentions, for the locality oracle.
pub fn arb_locality_corpus() -> impl Strategy<Value = CdaDocument> {
    prop::collection::vec(arb_sentence_spec(true), 1..7).prop_map(|sentences| build_document("corpus", &sentences, 50))
}

// ------------------------------------------------ nested speech discourses

#[derive(Debug, Clone)]
pub struct ShapeMention {
    pronoun: bool,
    slot: u8,
    gf: Gf,
}

#[derive(Debug, Clone)]
pub struct ClauseShape {
    relation: Relation,
    tense: Tense,
    mentions: Vec<ShapeMention>,
    children: Vec<ClauseShape>,
}

const SLOT_GENDERS: [Gender; 3] = [Gender::Masc, Gender::Fem, Gender::Masc];

fn arb_shape_mention() -> impl Strategy<Value = ShapeMention> {
    (
        any::<bool>(),
        0u8..3,
        select(vec![Gf::Subj, Gf::Obj, Gf::Oblique, Gf::Possessor]),
    )
        .prop_map(|(pronoun, slot, gf)| ShapeMention { pronoun, slot, gf })
}

fn arb_clause_shape() -> impl Strategy<Value = ClauseShape> {
    let relation = prop_oneof![
        3 => Just(Relation::CompReport),
        1 => Just(Relation::Conj),
        1 => Just(Relation::Adj),
        1 => Just(Relation::CompNonReport),
        1 => Just(Relation::Rel),
    ];
    let tense = prop_oneof![4 => Just(Tense::Tensed), 1 => Just(Tense::Tenseless), 1 => Just(Tense::Elided)];
    let leaf = (relation.clone(), tense.clone(), prop::collection::vec(arb_shape_mention(), 0..3)).prop_map(
        |(relation, tense, mentions)| ClauseShape {
            relation,
            tense,
            mentions,
            children: Vec::new(),
        },
    );
    leaf.prop_recursive(3, 16, 3, move |inner| {
        (
            relation.clone(),
            tense.clone(),
            prop::collection::vec(arb_shape_mention(), 0..3),
            prop::collection::vec(inner, 0..3),
        )
            .prop_map(|(relation, tense, mentions, children)| ClauseShape {
                relation,
                tense,
                mentions,
                children,
            })
    })
}

/// A discourse with nested quotations. Entities mentioned inside a quotation
/// are private to it: `S<n>_<k>` for quotation `n`, `H<k>` outside any.
#[derive(Debug, Clone)]
pub struct SpeechDiscourse {
    pub doc: CdaDocument,
    /// For every clause, the quotations that enclose it, outermost first.
    pub scopes: BTreeMap<String, Vec<usize>>,
}

impl SpeechDiscourse {
    /// Whether `entity` may be visible to a unit headed by `clause`.
    pub fn visible(&self, clause: &str, entity: &EntityId) -> bool {
        let name = entity.as_str();
        if name.starts_with('H') {
            return true;
        }
        let n: usize = name[1..name.find('_').expect("scoped entity")].parse().expect("quotation number");
        self.scopes[clause].contains(&n)
    }
}

pub fn arb_speech_discourse() -> impl Strategy<Value = SpeechDiscourse> {
    prop::collection::vec(
        (prop::collection::vec(arb_shape_mention(), 0..3), prop::collection::vec(arb_clause_shape(), 0..3)),
        1..5,
    )
    .prop_map(|sentences| {
        let mut doc = CdaDocument {
            id: "speech".into(),
            sentences: Vec::new(),
        };
        let mut scopes = BTreeMap::new();
        let mut counters = (0usize, 0usize);
        for (si, (mentions, children)) in sentences.into_iter().enumerate() {
            let mut sentence = CdaSentence {
                id: format!("s{si}"),
                clauses: Vec::new(),
            };
            let root = ClauseShape {
                relation: Relation::Matrix,
                tense: Tense::Tensed,
                mentions,
                children,
            };
            emit_shape(&root, None, &[], &mut sentence, &mut scopes, &mut counters);
            doc.sentences.push(sentence);
        }
        SpeechDiscourse { doc, scopes }
    })
}

fn emit_shape(
    shape: &ClauseShape,
    parent: Option<&str>,
    outer: &[usize],
    sentence: &mut CdaSentence,
    scopes: &mut BTreeMap<String, Vec<usize>>,
    counters: &mut (usize, usize),
) {
    let id = format!("{}k{}", sentence.id, sentence.clauses.len());
    let mut stack = outer.to_vec();
    if shape.relation == Relation::CompReport && shape.tense.is_tensed() {
        stack.push(counters.0);
        counters.0 += 1;
    }
    let mut clause = ClauseRecord::new(id.clone(), parent, shape.relation, shape.tense);
    for sm in &shape.mentions {
        let entity = match stack.last() {
            Some(n) => format!("S{n}_{}", sm.slot),
            None => format!("H{}", sm.slot),
        };
        let exp = match (sm.pronoun, sm.gf) {
            (true, Gf::Possessor) => ExpType::PossPronoun,
            (true, _) => ExpType::Pronoun,
            (false, _) => ExpType::DefNp,
        };
        let mut m = MentionRecord::new(format!("m{}", counters.1), exp, sm.gf);
        counters.1 += 1;
        m.gender = SLOT_GENDERS[sm.slot as usize];
        m.number = Number::Sg;
        m.gold_entity = Some(EntityId::new(entity));
        clause.mentions.push(m);
    }
    scopes.insert(id.clone(), stack.clone());
    sentence.clauses.push(clause);
    for child in &shape.children {
        emit_shape(child, Some(&id), &stack, sentence, scopes, counters);
    }
}

// ------------------------------------------------- simple discourses

/// Entity genders used by simple discourses: two masculine, one feminine,
/// one neuter.
pub const SIMPLE_ENTITIES: [(&str, Gender); 4] = [
    ("A", Gender::Masc),
    ("B", Gender::Masc),
    ("C", Gender::Fem),
    ("D", Gender::Neut),
];

/// A slot in a one-clause sentence: (is pronoun, entity index, gf).
pub type SimpleSlot = (bool, usize, Gf);

/// One matrix clause per sentence, mentions in the given order.
pub fn simple_document(id: &str, sentences: &[Vec<SimpleSlot>]) -> CdaDocument {
    let mut doc = CdaDocument {
        id: id.into(),
        sentences: Vec::new(),
    };
    let mut n = 0;
    for (si, slots) in sentences.iter().enumerate() {
        let mut clause = ClauseRecord::new(format!("u{si}"), None, Relation::Matrix, Tense::Tensed);
        for &(pronoun, e, gf) in slots {
            let (name, gender) = SIMPLE_ENTITIES[e];
            let exp = if pronoun { ExpType::Pronoun } else { ExpType::DefNp };
            let mut m = MentionRecord::new(format!("m{n}"), exp, gf);
            n += 1;
            m.gender = gender;
            m.number = Number::Sg;
            m.gold_entity = Some(EntityId::new(name));
            clause.mentions.push(m);
        }
        doc.sentences.push(CdaSentence {
            id: format!("u{si}"),
            clauses: vec![clause],
        });
    }
    doc
}

pub fn arb_simple_discourse() -> impl Strategy<Value = CdaDocument> {
    let slot = (
        any::<bool>(),
        0usize..SIMPLE_ENTITIES.len(),
        select(vec![Gf::Subj, Gf::Obj, Gf::Obj2, Gf::Oblique]),
    );
    prop::collection::vec(prop::collection::vec(slot, 1..4), 2..7).prop_map(|s| simple_document("simple", &s))
}

/// Every discourse of three one-clause utterances over entities A, B (both
/// masculine) and C (feminine): a subject (name or pronoun) and an optional
/// object (name or pronoun).
pub fn all_three_by_three() -> impl Iterator<Item = CdaDocument> {
    let subjects: Vec<SimpleSlot> = (0..3).flat_map(|e| [(false, e, Gf::Subj), (true, e, Gf::Subj)]).collect();
    let mut utterances: Vec<Vec<SimpleSlot>> = Vec::new();
    for s in &subjects {
        utterances.push(vec![*s]);
        for e in 0..3 {
            for pronoun in [false, true] {
                utterances.push(vec![*s, (pronoun, e, Gf::Obj)]);
            }
        }
    }
    let n = utterances.len();
    (0..n * n * n).map(move |i| {
        let picks = [i / (n * n), (i / n) % n, i % n];
        let sentences: Vec<Vec<SimpleSlot>> = picks.iter().map(|&p| utterances[p].clone()).collect();
        simple_document(&format!("d{i}"), &sentences)
    })
}

// --------------------------------------------- simple-discourse oracle

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub mention: String,
    pub ranked: Vec<String>,
    pub strength: &'static str,
    pub basis: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleUnit {
    pub cb: Option<String>,
    pub cf: Vec<String>,
    pub answers: Vec<OracleAnswer>,
}

#[derive(Clone)]
struct Realization {
    entity: String,
    gf: Gf,
    key: (u8, u8, usize),
}

fn gf_order(gf: Gf) -> u8 {
    match gf {
        Gf::Subj => 0,
        Gf::Obj => 1,
        Gf::Obj2 => 2,
        _ => 3,
    }
}

fn exp_order(exp: ExpType) -> u8 {
    match exp {
        ExpType::Zero => 0,
        ExpType::Pronoun | ExpType::PossPronoun => 1,
        ExpType::DefNp => 2,
        ExpType::IndefNp => 3,
    }
}

fn compatible<T: PartialEq>(a: T, b: T, unknown: T) -> bool {
    a == unknown || b == unknown || a == b
}

/// Recomputes pronoun answers for one-clause-per-sentence discourses of
/// third-person names and non-possessive pronouns, straight from the
/// ranking rules: T1 = Cm of the previous utterance, T2 = the rest of its
/// Cf, T3.i = older Cfs minus anything more recent, T5 = earlier mentions
/// of the same utterance. Ties go to PARA, or to the Cb for the first
/// utterance.
pub fn oracle_simple(doc: &CdaDocument) -> Vec<OracleUnit> {
    let mut history: Vec<(Vec<Realization>, Option<String>)> = Vec::new();
    let mut features: BTreeMap<String, (Gender, Number)> = BTreeMap::new();
    let mut out = Vec::new();
    for (k, sentence) in doc.sentences.iter().enumerate() {
        let mentions: Vec<&MentionRecord> = sentence.mentions().collect();
        let mut denotes: Vec<Option<String>> = vec![None; mentions.len()];
        for (i, m) in mentions.iter().enumerate() {
            if !m.exp.is_pronominal() {
                let e = m.gold_entity.as_ref().map_or(m.id.0.clone(), |g| g.0.clone());
                features.entry(e.clone()).or_insert((m.gender, m.number));
                denotes[i] = Some(e);
            }
        }

        // Older layers: each earlier Cf minus entities realized after it.
        let mut layers: Vec<Vec<Realization>> = Vec::new();
        if k >= 2 {
            let mut seen: BTreeSet<String> = history[k - 1].0.iter().map(|r| r.entity.clone()).collect();
            for j in (0..k - 1).rev() {
                let layer: Vec<Realization> = history[j].0.iter().filter(|r| !seen.contains(&r.entity)).cloned().collect();
                for r in &layer {
                    seen.insert(r.entity.clone());
                }
                if !layer.is_empty() {
                    layers.push(layer);
                }
            }
        }
        let (prev_cf, prev_cb): (Vec<Realization>, Option<String>) =
            if k > 0 { history[k - 1].clone() } else { (Vec::new(), None) };
        let state_order: Vec<&Realization> = prev_cf.iter().chain(layers.iter().flatten()).collect();

        let mut answers = Vec::new();
        for (i, m) in mentions.iter().enumerate() {
            if !m.exp.is_pronominal() {
                continue;
            }
            let mut tiers: Vec<(String, Vec<String>)> = Vec::new();
            let mut cm = Vec::new();
            if let Some(first) = prev_cf.first() {
                cm.push(first.entity.clone());
                if let Some(cb) = &prev_cb {
                    if cb != &first.entity {
                        cm.push(cb.clone());
                    }
                }
            }
            tiers.push(("T1".into(), cm.clone()));
            tiers.push((
                "T2".into(),
                prev_cf.iter().map(|r| r.entity.clone()).filter(|e| !cm.contains(e)).collect(),
            ));
            for (li, layer) in layers.iter().enumerate() {
                tiers.push((format!("T3.{li}"), layer.iter().map(|r| r.entity.clone()).collect()));
            }
            tiers.push(("T5".into(), (0..i).rev().filter_map(|j| denotes[j].clone()).collect()));

            let mut pool: Vec<(String, String)> = Vec::new();
            for (tier, ents) in tiers {
                for e in ents {
                    if !pool.iter().any(|(x, _)| x == &e) {
                        pool.push((e, tier.clone()));
                    }
                }
            }

            // Binding: every other mention of the clause already denoting
            // something, under the co-argument and name rules.
            let mut excluded = BTreeSet::new();
            for (j, other) in mentions.iter().enumerate() {
                if j == i {
                    continue;
                }
                let Some(e) = &denotes[j] else { continue };
                let coargument = m.gf.is_argument() && other.gf.is_argument();
                let name = !other.exp.is_pronominal() && (m.gf == Gf::Subj || other.gf != Gf::Possessor);
                if coargument || name {
                    excluded.insert(e.clone());
                }
            }
            let survivors: Vec<(String, String)> = pool
                .into_iter()
                .filter(|(e, _)| {
                    let (g, n) = features[e];
                    compatible(g, m.gender, Gender::Unknown) && compatible(n, m.number, Number::Unknown)
                })
                .filter(|(e, _)| !excluded.contains(e))
                .collect();

            let answer = match survivors.first() {
                None => OracleAnswer {
                    mention: m.id.0.clone(),
                    ranked: Vec::new(),
                    strength: "unresolved",
                    basis: "none".into(),
                },
                Some((_, top_tier)) => {
                    let top_tier = top_tier.clone();
                    let mut tied: Vec<String> =
                        survivors.iter().filter(|(_, t)| *t == top_tier).map(|(e, _)| e.clone()).collect();
                    let position = |e: &String| state_order.iter().position(|r| &r.entity == e).unwrap_or(usize::MAX);
                    let (strength, basis) = if tied.len() == 1 {
                        ("determinate", top_tier.clone())
                    } else if k == 0 {
                        tied.sort_by_key(|e| (Some(e) != prev_cb.as_ref(), position(e)));
                        ("weak", "CENTER".into())
                    } else {
                        tied.sort_by_key(|e| {
                            let same_gf = state_order.iter().find(|r| &r.entity == e).is_some_and(|r| r.gf == m.gf);
                            (!same_gf, position(e))
                        });
                        ("weak", "PARA".into())
                    };
                    let mut ranked = tied;
                    ranked.extend(survivors.iter().filter(|(_, t)| *t != top_tier).map(|(e, _)| e.clone()));
                    OracleAnswer {
                        mention: m.id.0.clone(),
                        ranked,
                        strength,
                        basis,
                    }
                }
            };
            if let Some(e) = answer.ranked.first() {
                denotes[i] = Some(e.clone());
            }
            answers.push(answer);
        }

        let mut cf: Vec<Realization> = Vec::new();
        for (i, m) in mentions.iter().enumerate() {
            let Some(e) = &denotes[i] else { continue };
            let r = Realization {
                entity: e.clone(),
                gf: m.gf,
                key: (gf_order(m.gf), exp_order(m.exp), i),
            };
            match cf.iter_mut().find(|x| x.entity == *e) {
                Some(x) if r.key < x.key => *x = r,
                Some(_) => {}
                None => cf.push(r),
            }
        }
        cf.sort_by_key(|r| r.key);

        let pronouns: Vec<(usize, &String)> = mentions
            .iter()
            .enumerate()
            .filter(|(_, m)| m.exp.is_pronominal())
            .filter_map(|(i, _)| denotes[i].as_ref().map(|e| (i, e)))
            .collect();
        let cb = match &prev_cb {
            Some(p) if pronouns.iter().any(|(_, e)| *e == p) => Some(p.clone()),
            _ => pronouns
                .iter()
                .min_by_key(|(i, _)| (gf_order(mentions[*i].gf), *i))
                .map(|(_, e)| (*e).clone()),
        };

        out.push(OracleUnit {
            cb: cb.clone(),
            cf: cf.iter().map(|r| r.entity.clone()).collect(),
            answers,
        });
        history.push((cf, cb));
    }
    out
}

// ------------------------------------------------- locality oracle

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleLocality {
    pub sentence: BTreeMap<&'static str, usize>,
    pub clause: BTreeMap<&'static str, usize>,
    /// (pronoun, antecedent, sentence label, clause label)
    pub placements: Vec<(String, String, &'static str, &'static str)>,
    pub discourse_new: Vec<String>,
    pub ungold: usize,
    pub by_type: BTreeMap<ExpType, usize>,
}

/// Pairwise recomputation of antecedent placement. Units are derived here
/// from the clause tree: each tensed or elided clause heads a unit, in
/// listing order; other clauses join their nearest tensed ancestor.
pub fn oracle_locality(doc: &CdaDocument) -> OracleLocality {
    struct Site<'a> {
        m: &'a MentionRecord,
        sentence: usize,
        unit: usize,
        superordinate: Option<usize>,
    }
    let mut sites = Vec::new();
    let mut unit_base = 0;
    for (si, s) in doc.sentences.iter().enumerate() {
        let heads: Vec<&ClauseRecord> = s.clauses.iter().filter(|c| c.tense.is_tensed()).collect();
        let unit_of = |id: &centering::annot::ClauseId| -> usize {
            let mut c = s.clause(id).expect("clause");
            while !c.tense.is_tensed() {
                c = s.clause(c.parent.as_ref().expect("tensed ancestor")).expect("parent");
            }
            unit_base + heads.iter().position(|h| h.id == c.id).expect("head")
        };
        for c in &s.clauses {
            let unit = unit_of(&c.id);
            let head = heads[unit - unit_base];
            let superordinate = head.parent.as_ref().map(&unit_of);
            for m in &c.mentions {
                sites.push(Site {
                    m,
                    sentence: si,
                    unit,
                    superordinate,
                });
            }
        }
        unit_base += heads.len();
    }

    let mut out = OracleLocality::default();
    for (j, site) in sites.iter().enumerate() {
        let m = site.m;
        let counted = matches!(m.exp, ExpType::Pronoun | ExpType::PossPronoun)
            && m.person == Person::Third
            && m.sort.as_deref() != Some("pleo");
        if !counted {
            continue;
        }
        let Some(gold) = &m.gold_entity else {
            out.ungold += 1;
            continue;
        };
        *out.by_type.entry(m.exp).or_default() += 1;
        let mut best: Option<usize> = None;
        for (i, other) in sites[..j].iter().enumerate() {
            if other.m.gold_entity.as_ref() == Some(gold) && best.is_none_or(|b| i > b) {
                best = Some(i);
            }
        }
        let Some(a) = best else {
            out.discourse_new.push(m.id.0.clone());
            continue;
        };
        let ante = &sites[a];
        let sentence = match site.sentence - ante.sentence {
            0 => "sameSentence",
            1 => "prevSentence",
            2 => "secondPrevSentence",
            _ => "farther",
        };
        let adjacent = ante.unit + 1 == site.unit;
        let clause = if ante.unit == site.unit {
            "sameUtterance"
        } else if ante.sentence == site.sentence && (adjacent || site.superordinate == Some(ante.unit)) {
            "prevOrSuperordinateSameSentence"
        } else if adjacent && ante.sentence + 1 == site.sentence {
            "prevUtterancePrevSentence"
        } else {
            "other"
        };
        *out.sentence.entry(sentence).or_default() += 1;
        *out.clause.entry(clause).or_default() += 1;
        out.placements.push((m.id.0.clone(), ante.m.id.0.clone(), sentence, clause));
    }
    out
}
