use std::fmt::Write;

use super::types::*;

/// Canonical serialization. Optional keys at their default value are omitted.
pub fn serialize_cda(doc: &CdaDocument) -> String {
    let mut out = String::new();
    write_doc(&mut out, doc);
    out
}

pub fn serialize_corpus(docs: &[CdaDocument]) -> String {
    let mut out = String::new();
    for (i, doc) in docs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_doc(&mut out, doc);
    }
    out
}

fn write_doc(out: &mut String, doc: &CdaDocument) {
    let _ = writeln!(out, "#DOC {}", doc.id);
    for sentence in &doc.sentences {
        let _ = writeln!(out, "#SENT {}", sentence.id);
        for clause in &sentence.clauses {
            let parent = clause.parent.as_ref().map_or("-", |p| p.as_str());
            let _ = write!(
                out,
                "#CL {} parent={} rel={} tense={}",
                clause.id, parent, clause.relation, clause.tense
            );
            if let Some(conn) = &clause.connective {
                let _ = write!(out, " conn={}", quote(conn));
            }
            out.push('\n');
            for m in &clause.mentions {
                write_mention(out, m);
            }
        }
    }
}

fn write_mention(out: &mut String, m: &MentionRecord) {
    let _ = write!(out, "M {} exp={} gf={}", m.id, m.exp, m.gf);
    if !m.surface.is_empty() {
        let _ = write!(out, " surf=\"{}\"", escape(&m.surface));
    }
    if m.gender != Gender::Unknown {
        let _ = write!(out, " gend={}", m.gender);
    }
    if m.number != Number::Unknown {
        let _ = write!(out, " num={}", m.number);
    }
    if m.person != Person::Third {
        let _ = write!(out, " pers={}", m.person);
    }
    if let Some(sort) = &m.sort {
        let _ = write!(out, " sort={sort}");
    }
    if let Some(ent) = &m.gold_entity {
        let _ = write!(out, " ent={ent}");
    }
    if let Some(ante) = &m.override_antecedent {
        let _ = write!(out, " ante={ante}");
    }
    out.push('\n');
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && c != '"' && c != '\\' && c != '=') {
        s.to_string()
    } else {
        format!("\"{}\"", escape(s))
    }
}
