//! Text renderings for each subcommand. Everything here is deterministic:
//! ordered containers only, no timestamps.

use std::fmt::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

use super::{Loaded, Model};
use crate::annot::EntityId;
use crate::bfp::{compare_models, run_bfp};
use crate::engine::{run_discourse, PronounResult, Strength, UnitTrace};
use crate::model::Transition;
use crate::segment::{EventAction, SegmentEvent};
use crate::stats::{chi_square_binary, locality_histogram, Category, Histogram, LocalityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Jsonl,
    Pretty,
}

fn ent(e: Option<&EntityId>) -> &str {
    e.map_or("-", |e| e.as_str())
}

fn surface(s: &str) -> &str {
    if s.is_empty() {
        "0"
    } else {
        s
    }
}

fn events(evs: &[SegmentEvent]) -> String {
    if evs.is_empty() {
        return "-".into();
    }
    evs.iter()
        .map(|e| {
            let verb = match e.action {
                EventAction::Push => "push",
                EventAction::Pop => "pop",
            };
            format!("{verb}:{}", e.kind)
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn set(es: &[EntityId]) -> String {
    format!("{{{}}}", es.iter().map(|e| e.as_str()).collect::<Vec<_>>().join(", "))
}

fn jsonl(out: &mut String, mut v: Value, doc: &str, record: &str) {
    if let Value::Object(map) = &mut v {
        map.insert("doc".into(), json!(doc));
        map.insert("record".into(), json!(record));
    }
    out.push_str(&serde_json::to_string(&v).expect("json values serialize"));
    out.push('\n');
}

/// Transition label in the style "CHAIN(Cb=Cp=X)" / "NULL(Cb=NULL, Cp=Y)".
pub fn label(t: Transition, cb: Option<&EntityId>, cp: Option<&EntityId>) -> String {
    match (cb, cp) {
        (Some(b), Some(p)) if b == p => format!("{t}(Cb=Cp={b})"),
        (b, Some(p)) => format!("{t}(Cb={}, Cp={p})", b.map_or("NULL", |b| b.as_str())),
        (Some(b), None) => format!("{t}(Cb={b})"),
        (None, None) => format!("{t}(Cb=NULL)"),
    }
}

pub fn header(action: &str, model: Model, format: Format) -> String {
    if format != Format::Tsv {
        return String::new();
    }
    let cols: &[&str] = match (action, model) {
        ("resolve", Model::Salience) => &["doc", "unit", "mention", "surface", "entity", "strength", "basis", "gold"],
        ("resolve", Model::Bfp) => &["doc", "unit", "mention", "surface", "entity", "transition", "gold"],
        ("trace", Model::Salience) => &[
            "doc", "index", "unit", "sentence", "level", "depth", "events", "input_cm", "cb_in", "cb_out", "cp",
            "transition", "pronouns",
        ],
        ("trace", Model::Bfp) => &["doc", "index", "unit", "prev_cb", "cb", "cp", "transition", "rule1", "assignment"],
        ("compare", _) => {
            return "#pronoun\tdoc\tunit\tmention\tsurface\tsalience\tstrength\tbfp\tgold\tdivergent\n\
                    #unit\tdoc\tunit\tsalience_transition\tsalience_cb\tbfp_transition\tbfp_cb\n"
                .into()
        }
        ("stats", _) => &["doc", "section", "key", "value", "percent"],
        _ => return String::new(),
    };
    format!("{}\n", cols.join("\t"))
}

fn pronoun_pretty(p: &PronounResult) -> String {
    match p.top() {
        Some(e) => format!("{} → {e} ({}; {})", surface(&p.surface), p.strength.as_str(), p.basis),
        None => format!("{} → ? (unresolved)", surface(&p.surface)),
    }
}

pub fn resolve(d: &Loaded, model: Model, format: Format) -> String {
    let mut out = String::new();
    let id = d.doc.id.as_str();
    match model {
        Model::Salience => {
            let run = run_discourse(&d.seg);
            if format == Format::Pretty {
                let _ = writeln!(out, "== {id}");
            }
            for (u, p) in run.pronouns() {
                match format {
                    Format::Pretty => {
                        let _ = writeln!(out, "{}\t{}", u.unit, pronoun_pretty(p));
                    }
                    Format::Tsv => {
                        let _ = writeln!(
                            out,
                            "{id}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            u.unit,
                            p.mention,
                            surface(&p.surface),
                            ent(p.top()),
                            p.strength.as_str(),
                            p.basis,
                            ent(p.gold.as_ref())
                        );
                    }
                    Format::Jsonl => jsonl(
                        &mut out,
                        json!({
                            "unit": u.unit,
                            "mention": p.mention,
                            "surface": p.surface,
                            "entity": p.top(),
                            "strength": p.strength,
                            "basis": p.basis,
                            "candidates": p.ranked,
                            "used_override": p.used_override,
                            "gold": p.gold,
                        }),
                        id,
                        "pronoun",
                    ),
                }
            }
        }
        Model::Bfp => {
            let run = run_bfp(&d.seg);
            if format == Format::Pretty {
                let _ = writeln!(out, "== {id} (bfp)");
            }
            for u in &run.units {
                for (m, pick) in &u.anchor.assignment {
                    let record = d.doc.mention(m);
                    let surf = record.map_or("", |r| r.surface.as_str());
                    let gold = record.and_then(|r| r.gold_entity.as_ref());
                    match format {
                        Format::Pretty => {
                            let _ = match pick {
                                Some(e) => writeln!(out, "{}\t{} → {e} ({})", u.unit, surface(surf), u.anchor.transition),
                                None => writeln!(out, "{}\t{} → ? (unresolved)", u.unit, surface(surf)),
                            };
                        }
                        Format::Tsv => {
                            let _ = writeln!(
                                out,
                                "{id}\t{}\t{m}\t{}\t{}\t{}\t{}",
                                u.unit,
                                surface(surf),
                                ent(pick.as_ref()),
                                u.anchor.transition,
                                ent(gold)
                            );
                        }
                        Format::Jsonl => jsonl(
                            &mut out,
                            json!({
                                "unit": u.unit,
                                "mention": m,
                                "surface": surf,
                                "entity": pick,
                                "transition": u.anchor.transition,
                                "gold": gold,
                            }),
                            id,
                            "pronoun",
                        ),
                    }
                }
            }
        }
    }
    out
}

fn pronoun_detail(p: &PronounResult) -> String {
    let pool = p
        .pool
        .iter()
        .map(|c| format!("{}:{}", c.tier, c.entity))
        .collect::<Vec<_>>()
        .join(" ");
    let filtered = if p.filtered.is_empty() {
        "-".into()
    } else {
        p.filtered
            .iter()
            .map(|h| format!("{}:{}", h.entity, h.filter.as_str()))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let ranked = p
        .ranked
        .iter()
        .map(|c| format!("{}:{}", c.tier, c.entity))
        .collect::<Vec<_>>()
        .join(" > ");
    let mut s = format!(
        "  {}\n    pool: {}\n    filtered: {}\n    ranked: {}",
        pronoun_pretty(p),
        if pool.is_empty() { "-".into() } else { pool },
        filtered,
        if ranked.is_empty() { "-".into() } else { ranked },
    );
    if let Some(g) = &p.gold {
        let mark = if p.diverges_from_gold() { "  DIVERGES" } else { "" };
        let _ = write!(s, "\n    gold: {g}{mark}");
    }
    for n in &p.notes {
        let _ = write!(s, "\n    note: {n}");
    }
    s
}

fn unit_pretty(out: &mut String, u: &UnitTrace) {
    for e in &u.events {
        let _ = writeln!(out, "  {}", events(std::slice::from_ref(e)).replace(':', " "));
    }
    let indent = "  ".repeat(u.level + 1);
    let _ = writeln!(
        out,
        "{indent}[{}] {} {}  in: Cm={} Cb={}",
        u.index + 1,
        u.unit,
        label(u.transition, u.cb_out.as_ref(), u.cp.as_ref()),
        set(&u.input_cm),
        ent(u.cb_in.as_ref())
    );
    for p in &u.pronouns {
        for line in pronoun_detail(p).lines() {
            let _ = writeln!(out, "{indent}{line}");
        }
    }
    for c in &u.conflicts {
        let _ = writeln!(out, "{indent}  conflict: {c}");
    }
}

pub fn trace(d: &Loaded, model: Model, format: Format) -> String {
    let mut out = String::new();
    let id = d.doc.id.as_str();
    match model {
        Model::Salience => {
            let run = run_discourse(&d.seg);
            match format {
                Format::Pretty => {
                    let _ = writeln!(out, "== {id}");
                    for u in &run.units {
                        unit_pretty(&mut out, u);
                    }
                    for e in &run.trailing_events {
                        let _ = writeln!(out, "  {}", events(std::slice::from_ref(e)).replace(':', " "));
                    }
                }
                Format::Tsv => {
                    for u in &run.units {
                        let pronouns = u
                            .pronouns
                            .iter()
                            .map(|p| format!("{}={}/{}/{}", p.mention, ent(p.top()), p.strength.as_str(), p.basis))
                            .collect::<Vec<_>>()
                            .join(";");
                        let _ = writeln!(
                            out,
                            "{id}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            u.index,
                            u.unit,
                            u.sentence,
                            u.level,
                            u.depth,
                            events(&u.events),
                            set(&u.input_cm),
                            ent(u.cb_in.as_ref()),
                            ent(u.cb_out.as_ref()),
                            ent(u.cp.as_ref()),
                            u.transition,
                            if pronouns.is_empty() { "-".into() } else { pronouns }
                        );
                    }
                    if !run.trailing_events.is_empty() {
                        let _ = writeln!(
                            out,
                            "{id}\t{}\t-\t-\t-\t-\t{}\t-\t-\t-\t-\t-\t-",
                            run.units.len(),
                            events(&run.trailing_events)
                        );
                    }
                }
                Format::Jsonl => {
                    for u in &run.units {
                        jsonl(&mut out, serde_json::to_value(u).expect("trace serializes"), id, "unit");
                    }
                    if !run.trailing_events.is_empty() {
                        jsonl(&mut out, json!({ "events": run.trailing_events }), id, "end");
                    }
                }
            }
        }
        Model::Bfp => {
            let run = run_bfp(&d.seg);
            if format == Format::Pretty {
                let _ = writeln!(out, "== {id} (bfp)");
            }
            for u in &run.units {
                let a = &u.anchor;
                let assignment = a
                    .assignment
                    .iter()
                    .map(|(m, e)| format!("{m}={}", ent(e.as_ref())))
                    .collect::<Vec<_>>()
                    .join(";");
                match format {
                    Format::Pretty => {
                        let _ = writeln!(
                            out,
                            "  [{}] {} {}(Cb={}, Cp={}) prev Cb={}{}{}",
                            u.index + 1,
                            u.unit,
                            a.transition,
                            ent(a.cb.as_ref()),
                            ent(a.cp.as_ref()),
                            ent(u.prev_cb.as_ref()),
                            if assignment.is_empty() { String::new() } else { format!("  {assignment}") },
                            if a.rule1_satisfied { "" } else { "  (rule 1 relaxed)" }
                        );
                    }
                    Format::Tsv => {
                        let _ = writeln!(
                            out,
                            "{id}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            u.index,
                            u.unit,
                            ent(u.prev_cb.as_ref()),
                            ent(a.cb.as_ref()),
                            ent(a.cp.as_ref()),
                            a.transition,
                            a.rule1_satisfied,
                            if assignment.is_empty() { "-".into() } else { assignment }
                        );
                    }
                    Format::Jsonl => jsonl(&mut out, serde_json::to_value(u).expect("bfp serializes"), id, "unit"),
                }
            }
        }
    }
    out
}

pub fn compare(d: &Loaded, format: Format) -> String {
    let mut out = String::new();
    let id = d.doc.id.as_str();
    let cmp = compare_models(&d.seg);
    match format {
        Format::Pretty => {
            let _ = writeln!(out, "== {id}");
            for p in &cmp.pronouns {
                let _ = writeln!(
                    out,
                    "  {}\t{}\tsalience={} ({})\tbfp={}\tgold={}{}",
                    p.unit,
                    surface(&p.surface),
                    ent(p.salience.as_ref()),
                    p.strength.as_str(),
                    ent(p.bfp.as_ref()),
                    ent(p.gold.as_ref()),
                    if p.divergent { "\tDIVERGENT" } else { "" }
                );
            }
            for u in &cmp.units {
                let _ = writeln!(
                    out,
                    "  {}\t{}(Cb={})\t{}(Cb={})",
                    u.unit,
                    u.salience,
                    ent(u.salience_cb.as_ref()),
                    u.bfp,
                    ent(u.bfp_cb.as_ref())
                );
            }
            let _ = writeln!(out, "  divergences: {}", cmp.divergences().count());
        }
        Format::Tsv => {
            for p in &cmp.pronouns {
                let _ = writeln!(
                    out,
                    "pronoun\t{id}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    p.unit,
                    p.mention,
                    surface(&p.surface),
                    ent(p.salience.as_ref()),
                    p.strength.as_str(),
                    ent(p.bfp.as_ref()),
                    ent(p.gold.as_ref()),
                    if p.divergent { "yes" } else { "no" }
                );
            }
            for u in &cmp.units {
                let _ = writeln!(
                    out,
                    "unit\t{id}\t{}\t{}\t{}\t{}\t{}",
                    u.unit,
                    u.salience,
                    ent(u.salience_cb.as_ref()),
                    u.bfp,
                    ent(u.bfp_cb.as_ref())
                );
            }
        }
        Format::Jsonl => {
            for p in &cmp.pronouns {
                jsonl(&mut out, serde_json::to_value(p).expect("row serializes"), id, "pronoun");
            }
            for u in &cmp.units {
                jsonl(&mut out, serde_json::to_value(u).expect("row serializes"), id, "unit");
            }
            jsonl(&mut out, json!({ "divergences": cmp.divergences().count() }), id, "summary");
        }
    }
    out
}

struct StatRow {
    section: &'static str,
    key: String,
    value: String,
    percent: Option<f64>,
}

fn histogram_rows<C: Category>(rows: &mut Vec<StatRow>, section: &'static str, h: &Histogram<C>) {
    for (c, n) in h.iter() {
        rows.push(StatRow {
            section,
            key: c.label().into(),
            value: n.to_string(),
            percent: h.percent(c),
        });
    }
}

fn stat_rows(r: &LocalityReport) -> Vec<StatRow> {
    let mut rows = Vec::new();
    histogram_rows(&mut rows, "sentence", &r.sentence);
    histogram_rows(&mut rows, "clause", &r.clause);
    let mut summary = |key: &str, value: String| {
        rows.push(StatRow {
            section: "summary",
            key: key.into(),
            value,
            percent: None,
        })
    };
    summary("counted", r.sentence.total().to_string());
    summary("discourseNew", r.discourse_new.len().to_string());
    summary("ungold", r.ungold.to_string());
    for (exp, n) in &r.by_type {
        summary(&format!("type:{exp}"), n.to_string());
    }
    summary("intrasentential", r.intrasentential().to_string());
    summary("intersentential", r.intersentential().to_string());
    summary(
        "possessiveShare",
        r.possessive_share().map_or("undefined".into(), |v| format!("{v:.3}")),
    );
    match chi_square_binary(r.intrasentential() as u64, r.intersentential() as u64) {
        Ok(c) => {
            summary("chi2", format!("{:.3}", c.statistic));
            summary("chi2.p", format!("{:.4}", c.p_value));
            summary("chi2.band", c.band.as_str().into());
        }
        Err(_) => summary("chi2", "undefined".into()),
    }
    rows
}

pub fn stats(docs: &[&Loaded], format: Format) -> String {
    let mut out = String::new();
    let mut blocks: Vec<(String, LocalityReport)> = Vec::new();
    let mut total = LocalityReport::default();
    for d in docs {
        match locality_histogram(&d.doc, &d.seg) {
            Ok(r) => {
                total.merge(&r);
                blocks.push((d.doc.id.clone(), r));
            }
            Err(e) => {
                let _ = writeln!(out, "# {}: {e}", d.doc.id);
            }
        }
    }
    if blocks.len() > 1 {
        blocks.push(("ALL".into(), total));
    }
    for (id, r) in &blocks {
        let rows = stat_rows(r);
        match format {
            Format::Pretty => {
                let _ = writeln!(out, "== {id}");
                let mut section = "";
                for row in rows {
                    if row.section != section {
                        section = row.section;
                        let _ = writeln!(out, "  {section}");
                    }
                    let pct = row.percent.map_or(String::new(), |p| format!("  ({p:.1}%)"));
                    let _ = writeln!(out, "    {:<34}{}{pct}", row.key, row.value);
                }
            }
            Format::Tsv => {
                for row in rows {
                    let pct = row.percent.map_or("-".into(), |p| format!("{p:.1}"));
                    let _ = writeln!(out, "{id}\t{}\t{}\t{}\t{pct}", row.section, row.key, row.value);
                }
            }
            Format::Jsonl => {
                for row in rows {
                    jsonl(
                        &mut out,
                        json!({
                            "section": row.section,
                            "key": row.key,
                            "value": row.value,
                            "percent": row.percent.map(|p| (p * 10.0).round() / 10.0),
                        }),
                        id,
                        "stat",
                    );
                }
            }
        }
    }
    out
}

pub fn validate(files: &[(&Path, &[Loaded])]) -> String {
    let mut out = String::new();
    for (path, docs) in files {
        let sentences: usize = docs.iter().map(|d| d.doc.sentences.len()).sum();
        let units: usize = docs.iter().map(|d| d.seg.units.len()).sum();
        let unresolved: usize = docs
            .iter()
            .map(|d| {
                run_discourse(&d.seg)
                    .pronouns()
                    .filter(|(_, p)| p.strength == Strength::Unresolved)
                    .count()
            })
            .sum();
        let _ = writeln!(
            out,
            "{}: ok ({} documents, {sentences} sentences, {units} units, {unresolved} unresolved pronouns)",
            path.display(),
            docs.len()
        );
    }
    out
}
