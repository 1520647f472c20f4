use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::types::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("clause `{clause}` references parent `{parent}` which is not in sentence `{sentence}`")]
    DanglingParent {
        clause: String,
        parent: String,
        sentence: String,
    },
    #[error("mention `{mention}` references antecedent `{target}` which does not exist")]
    DanglingAntecedent { mention: String, target: String },
    #[error("duplicate {what} id `{id}`")]
    DuplicateId { what: &'static str, id: String },
    #[error("sentence `{0}` has more than one matrix clause")]
    MultipleMatrix(String),
    #[error("sentence `{0}` has no matrix clause")]
    NoMatrix(String),
    #[error("matrix clause `{0}` must have parent=-")]
    MatrixWithParent(String),
    #[error("non-matrix clause `{0}` has no parent")]
    MissingParent(String),
    #[error("parent references in sentence `{sentence}` form a cycle through `{clause}`")]
    ParentCycle { sentence: String, clause: String },
    #[error("mention `{0}`: {1}")]
    InvalidMention(String, &'static str),
    #[error("input contains no document")]
    NoDocument,
    #[error("document `{0}` has no sentences")]
    EmptyDocument(String),
    #[error("expected exactly one document, found {0}")]
    DocumentCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject unknown keys instead of ignoring them.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { strict: true }
    }
}

/// Non-fatal diagnostics collected in lenient mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<CdaDocument>,
    pub warnings: Vec<Warning>,
}

/// Parse input holding exactly one document, in strict mode.
pub fn parse_cda(input: &str) -> Result<CdaDocument, ParseError> {
    let corpus = parse_corpus(input, ParseOptions::default())?;
    match corpus.documents.len() {
        1 => Ok(corpus.documents.into_iter().next().unwrap()),
        n => Err(ParseError {
            line: 1,
            kind: ParseErrorKind::DocumentCount(n),
        }),
    }
}

/// Parse one or more `#DOC` blocks.
pub fn parse_corpus(input: &str, options: ParseOptions) -> Result<Corpus, ParseError> {
    let mut parser = Parser {
        options,
        docs: Vec::new(),
        warnings: Vec::new(),
        current: None,
    };
    for (idx, raw) in input.lines().enumerate() {
        parser.line(idx + 1, raw)?;
    }
    let last_line = input.lines().count().max(1);
    parser.finish_doc(last_line)?;
    if parser.docs.is_empty() {
        return Err(ParseError {
            line: last_line,
            kind: ParseErrorKind::NoDocument,
        });
    }
    Ok(Corpus {
        documents: parser.docs,
        warnings: parser.warnings,
    })
}

struct DocBuilder {
    doc: CdaDocument,
    line: usize,
    sentence_lines: Vec<usize>,
    clause_lines: BTreeMap<ClauseId, usize>,
    mention_lines: BTreeMap<MentionId, usize>,
    sentence_ids: BTreeSet<String>,
}

struct Parser {
    options: ParseOptions,
    docs: Vec<CdaDocument>,
    warnings: Vec<Warning>,
    current: Option<DocBuilder>,
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

impl Parser {
    fn line(&mut self, line: usize, raw: &str) -> Result<(), ParseError> {
        let text = raw.trim();
        if text.is_empty() || text.starts_with("//") {
            return Ok(());
        }
        let tokens = tokenize(text).map_err(|msg| syntax(line, msg))?;
        let (head, rest) = tokens.split_first().expect("non-empty line has a token");
        let head = match head {
            Token::Bare(s) => s.as_str(),
            Token::Pair(..) => return Err(syntax(line, "line must start with a record tag")),
        };
        match head {
            "#DOC" => self.doc_line(line, rest),
            "#SENT" => self.sent_line(line, rest),
            "#CL" => self.clause_line(line, rest),
            "M" => self.mention_line(line, rest),
            other => Err(syntax(line, format!("unknown record tag `{other}`"))),
        }
    }

    fn doc_line(&mut self, line: usize, rest: &[Token]) -> Result<(), ParseError> {
        let id = single_id(line, rest, "#DOC")?;
        self.finish_doc(line)?;
        if self.docs.iter().any(|d| d.id == id) {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::DuplicateId { what: "document", id },
            });
        }
        self.current = Some(DocBuilder {
            doc: CdaDocument {
                id,
                sentences: Vec::new(),
            },
            line,
            sentence_lines: Vec::new(),
            clause_lines: BTreeMap::new(),
            mention_lines: BTreeMap::new(),
            sentence_ids: BTreeSet::new(),
        });
        Ok(())
    }

    fn builder(&mut self, line: usize, what: &str) -> Result<&mut DocBuilder, ParseError> {
        self.current
            .as_mut()
            .ok_or_else(|| syntax(line, format!("{what} before any #DOC line")))
    }

    fn sent_line(&mut self, line: usize, rest: &[Token]) -> Result<(), ParseError> {
        let id = single_id(line, rest, "#SENT")?;
        let b = self.builder(line, "#SENT")?;
        if let Some(prev) = b.doc.sentences.last() {
            check_sentence(prev, *b.sentence_lines.last().unwrap(), &b.clause_lines)?;
        }
        if !b.sentence_ids.insert(id.clone()) {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::DuplicateId { what: "sentence", id },
            });
        }
        b.doc.sentences.push(CdaSentence {
            id,
            clauses: Vec::new(),
        });
        b.sentence_lines.push(line);
        Ok(())
    }

    fn clause_line(&mut self, line: usize, rest: &[Token]) -> Result<(), ParseError> {
        let strict = self.options.strict;
        let mut warnings = Vec::new();
        let (id, pairs) = id_and_pairs(line, rest, "#CL")?;
        let mut parent = None;
        let mut relation = None;
        let mut tense = None;
        let mut connective = None;
        for (key, value) in pairs {
            match key.as_str() {
                "parent" => {
                    check_id(line, &value)?;
                    parent = Some(if value == "-" { None } else { Some(ClauseId(value)) });
                }
                "rel" => {
                    relation = Some(
                        Relation::from_token(&value)
                            .ok_or_else(|| syntax(line, format!("invalid rel `{value}`")))?,
                    )
                }
                "tense" => {
                    tense = Some(
                        Tense::from_token(&value)
                            .ok_or_else(|| syntax(line, format!("invalid tense `{value}`")))?,
                    )
                }
                "conn" => {
                    if value.is_empty() {
                        return Err(syntax(line, "conn must not be empty"));
                    }
                    connective = Some(value)
                }
                _ => unknown_key(line, key, strict, &mut warnings)?,
            }
        }
        self.warnings.extend(warnings);
        let parent = parent.ok_or_else(|| syntax(line, "#CL requires parent="))?;
        let relation = relation.ok_or_else(|| syntax(line, "#CL requires rel="))?;
        let tense = tense.ok_or_else(|| syntax(line, "#CL requires tense="))?;

        let b = self.builder(line, "#CL")?;
        let sentence = b
            .doc
            .sentences
            .last_mut()
            .ok_or_else(|| syntax(line, "#CL before any #SENT line"))?;
        let id = ClauseId(id);
        if b.clause_lines.insert(id.clone(), line).is_some() {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::DuplicateId {
                    what: "clause",
                    id: id.0,
                },
            });
        }
        sentence.clauses.push(ClauseRecord {
            id,
            parent,
            relation,
            tense,
            connective,
            mentions: Vec::new(),
        });
        Ok(())
    }

    fn mention_line(&mut self, line: usize, rest: &[Token]) -> Result<(), ParseError> {
        let strict = self.options.strict;
        let mut warnings = Vec::new();
        let (id, pairs) = id_and_pairs(line, rest, "M")?;
        let mut exp = None;
        let mut gf = None;
        let mut m = MentionRecord::new(id, ExpType::DefNp, Gf::Other);
        for (key, value) in pairs {
            let bad = |what: &str| syntax(line, format!("invalid {what} `{value}`"));
            match key.as_str() {
                "exp" => exp = Some(ExpType::from_token(&value).ok_or_else(|| bad("exp"))?),
                "gf" => gf = Some(Gf::from_token(&value).ok_or_else(|| bad("gf"))?),
                "surf" => m.surface = value,
                "gend" => m.gender = Gender::from_token(&value).ok_or_else(|| bad("gend"))?,
                "num" => m.number = Number::from_token(&value).ok_or_else(|| bad("num"))?,
                "pers" => m.person = Person::from_token(&value).ok_or_else(|| bad("pers"))?,
                "sort" => {
                    check_id(line, &value)?;
                    m.sort = Some(value)
                }
                "ent" => {
                    check_id(line, &value)?;
                    m.gold_entity = Some(EntityId(value))
                }
                "ante" => {
                    check_id(line, &value)?;
                    m.override_antecedent = Some(MentionId(value))
                }
                _ => unknown_key(line, key, strict, &mut warnings)?,
            }
        }
        self.warnings.extend(warnings);
        m.exp = exp.ok_or_else(|| syntax(line, "M requires exp="))?;
        m.gf = gf.ok_or_else(|| syntax(line, "M requires gf="))?;
        if m.exp == ExpType::Zero && !m.surface.is_empty() {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::InvalidMention(m.id.0, "zero mentions must have an empty surface"),
            });
        }
        if m.exp == ExpType::PossPronoun && m.gf != Gf::Possessor {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::InvalidMention(m.id.0, "possessive pronouns must have gf=poss"),
            });
        }
        if m.override_antecedent.as_ref() == Some(&m.id) {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::InvalidMention(m.id.0, "a mention cannot be its own antecedent"),
            });
        }

        let b = self.builder(line, "M")?;
        let clause = b
            .doc
            .sentences
            .last_mut()
            .and_then(|s| s.clauses.last_mut())
            .ok_or_else(|| syntax(line, "M before any #CL line"))?;
        if b.mention_lines.insert(m.id.clone(), line).is_some() {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::DuplicateId {
                    what: "mention",
                    id: m.id.0,
                },
            });
        }
        clause.mentions.push(m);
        Ok(())
    }

    fn finish_doc(&mut self, line: usize) -> Result<(), ParseError> {
        let Some(b) = self.current.take() else {
            return Ok(());
        };
        if b.doc.sentences.is_empty() {
            return Err(ParseError {
                line: b.line,
                kind: ParseErrorKind::EmptyDocument(b.doc.id),
            });
        }
        let _ = line;
        let last = b.doc.sentences.last().unwrap();
        check_sentence(last, *b.sentence_lines.last().unwrap(), &b.clause_lines)?;
        for m in b.doc.mentions() {
            if let Some(target) = &m.override_antecedent {
                if !b.mention_lines.contains_key(target) {
                    return Err(ParseError {
                        line: b.mention_lines[&m.id],
                        kind: ParseErrorKind::DanglingAntecedent {
                            mention: m.id.0.clone(),
                            target: target.0.clone(),
                        },
                    });
                }
            }
        }
        self.docs.push(b.doc);
        Ok(())
    }
}

fn unknown_key(
    line: usize,
    key: String,
    strict: bool,
    warnings: &mut Vec<Warning>,
) -> Result<(), ParseError> {
    if strict {
        return Err(ParseError {
            line,
            kind: ParseErrorKind::UnknownKey(key),
        });
    }
    warnings.push(Warning {
        line,
        message: format!("ignoring unknown key `{key}`"),
    });
    Ok(())
}

/// Tree checks for one sentence: a single parentless matrix, parents inside
/// the sentence, no cycles.
fn check_sentence(
    sentence: &CdaSentence,
    sentence_line: usize,
    clause_lines: &BTreeMap<ClauseId, usize>,
) -> Result<(), ParseError> {
    let line_of = |id: &ClauseId| clause_lines.get(id).copied().unwrap_or(sentence_line);
    let mut matrix: Option<&ClauseRecord> = None;
    for clause in &sentence.clauses {
        let err = |kind| ParseError {
            line: line_of(&clause.id),
            kind,
        };
        match (clause.relation, &clause.parent) {
            (Relation::Matrix, Some(_)) => {
                return Err(err(ParseErrorKind::MatrixWithParent(clause.id.0.clone())))
            }
            (Relation::Matrix, None) => {
                if matrix.is_some() {
                    return Err(err(ParseErrorKind::MultipleMatrix(sentence.id.clone())));
                }
                matrix = Some(clause);
            }
            (_, None) => return Err(err(ParseErrorKind::MissingParent(clause.id.0.clone()))),
            (_, Some(parent)) => {
                if sentence.clause(parent).is_none() {
                    return Err(err(ParseErrorKind::DanglingParent {
                        clause: clause.id.0.clone(),
                        parent: parent.0.clone(),
                        sentence: sentence.id.clone(),
                    }));
                }
            }
        }
    }
    if matrix.is_none() {
        return Err(ParseError {
            line: sentence_line,
            kind: ParseErrorKind::NoMatrix(sentence.id.clone()),
        });
    }
    for clause in &sentence.clauses {
        let mut cursor = clause;
        let mut steps = 0;
        while let Some(parent) = &cursor.parent {
            steps += 1;
            if steps > sentence.clauses.len() {
                return Err(ParseError {
                    line: line_of(&clause.id),
                    kind: ParseErrorKind::ParentCycle {
                        sentence: sentence.id.clone(),
                        clause: clause.id.0.clone(),
                    },
                });
            }
            cursor = sentence.clause(parent).expect("parent checked above");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Bare(String),
    Pair(String, String),
}

fn is_id_char(c: char) -> bool {
    !c.is_whitespace() && c != '=' && c != '"' && c != '\\'
}

fn check_id(line: usize, value: &str) -> Result<(), ParseError> {
    if value.is_empty() || !value.chars().all(is_id_char) {
        return Err(syntax(line, format!("invalid identifier `{value}`")));
    }
    Ok(())
}

fn single_id(line: usize, rest: &[Token], tag: &str) -> Result<String, ParseError> {
    match rest {
        [Token::Bare(id)] => {
            check_id(line, id)?;
            Ok(id.clone())
        }
        _ => Err(syntax(line, format!("{tag} takes exactly one identifier"))),
    }
}

fn id_and_pairs(
    line: usize,
    rest: &[Token],
    tag: &str,
) -> Result<(String, Vec<(String, String)>), ParseError> {
    let (first, pairs) = rest
        .split_first()
        .ok_or_else(|| syntax(line, format!("{tag} requires an identifier")))?;
    let id = match first {
        Token::Bare(id) => {
            check_id(line, id)?;
            id.clone()
        }
        Token::Pair(..) => return Err(syntax(line, format!("{tag} requires an identifier first"))),
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(pairs.len());
    for tok in pairs {
        match tok {
            Token::Pair(k, v) => {
                if !seen.insert(k.clone()) {
                    return Err(syntax(line, format!("duplicate key `{k}`")));
                }
                out.push((k.clone(), v.clone()));
            }
            Token::Bare(b) => return Err(syntax(line, format!("expected key=value, found `{b}`"))),
        }
    }
    Ok((id, out))
}

/// Splits a record line into bare words and `key=value` pairs. Values may be
/// double-quoted with `\"` and `\\` escapes.
fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            break;
        }
        let mut word = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() || c == '=' {
                break;
            }
            if c == '"' {
                return Err("unexpected quote".into());
            }
            word.push(c);
            chars.next();
        }
        if chars.peek() != Some(&'=') {
            tokens.push(Token::Bare(word));
            continue;
        }
        chars.next();
        if word.is_empty() {
            return Err("missing key before `=`".into());
        }
        let mut value = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            let mut closed = false;
            while let Some(c) = chars.next() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match chars.next() {
                        Some(e @ ('"' | '\\')) => value.push(e),
                        Some(e) => return Err(format!("invalid escape `\\{e}`")),
                        None => return Err("dangling escape".into()),
                    },
                    c => value.push(c),
                }
            }
            if !closed {
                return Err("unterminated quoted value".into());
            }
            if chars.peek().is_some_and(|c| !c.is_whitespace()) {
                return Err("missing whitespace after quoted value".into());
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                if !is_id_char(c) {
                    return Err(format!("unexpected `{c}` in value; quote it"));
                }
                value.push(c);
                chars.next();
            }
        }
        tokens.push(Token::Pair(word, value));
    }
    Ok(tokens)
}
