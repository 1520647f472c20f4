//! Data model of the CDA annotation format.

use std::fmt;

use serde::Serialize;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }
    };
}

id_newtype!(
    /// Identifier of a clause, unique within a document.
    ClauseId
);
id_newtype!(
    /// Identifier of a mention, unique within a document.
    MentionId
);
id_newtype!(
    /// Identifier of a discourse entity (gold or engine-assigned).
    EntityId
);

/// Implements `token()` / `from_token()` for a closed enum over the literal
/// spellings used in the line format.
macro_rules! token_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $tok:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $tok),+
                }
            }

            pub fn from_token(s: &str) -> Option<Self> {
                match s {
                    $($tok => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

token_enum!(
    /// Syntactic relation of a clause to its parent clause.
    Relation {
        Matrix => "matrix",
        Conj => "conj",
        Adj => "adj",
        CompReport => "comp-report",
        CompNonReport => "comp-nonreport",
        Rel => "rel",
    }
);

token_enum!(
    /// Tense status. `Elided` marks verb-elided conjuncts, which count as tensed.
    Tense {
        Tensed => "t",
        Tenseless => "u",
        Elided => "e",
    }
);

token_enum!(
    /// Referring-expression type.
    ExpType {
        Zero => "zero",
        Pronoun => "pro",
        PossPronoun => "poss",
        DefNp => "def",
        IndefNp => "indef",
    }
);

token_enum!(
    /// Grammatical function of a mention within its clause.
    Gf {
        Subj => "subj",
        Obj => "obj",
        Obj2 => "obj2",
        Oblique => "obl",
        Possessor => "poss",
        Other => "other",
    }
);

token_enum!(
    Gender {
        Masc => "m",
        Fem => "f",
        Neut => "n",
        Unknown => "?",
    }
);

token_enum!(
    Number {
        Sg => "sg",
        Pl => "pl",
        Unknown => "?",
    }
);

token_enum!(
    Person {
        First => "1",
        Second => "2",
        Third => "3",
    }
);

impl Tense {
    /// Tensed and verb-elided clauses head their own utterance unit.
    pub fn is_tensed(self) -> bool {
        matches!(self, Tense::Tensed | Tense::Elided)
    }
}

impl ExpType {
    pub fn is_pronominal(self) -> bool {
        matches!(self, ExpType::Zero | ExpType::Pronoun | ExpType::PossPronoun)
    }
}

impl Gf {
    /// Argument positions used by the co-argument binding check.
    pub fn is_argument(self) -> bool {
        matches!(self, Gf::Subj | Gf::Obj | Gf::Obj2 | Gf::Oblique)
    }
}

/// Sort tag marking pleonastic pronouns ("it is raining").
pub const PLEONASTIC_SORT: &str = "pleo";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MentionRecord {
    pub id: MentionId,
    pub surface: String,
    pub exp: ExpType,
    pub gf: Gf,
    pub gender: Gender,
    pub number: Number,
    pub person: Person,
    pub sort: Option<String>,
    pub gold_entity: Option<EntityId>,
    /// Commonsense override: the antecedent is whatever this mention denotes.
    pub override_antecedent: Option<MentionId>,
}

impl MentionRecord {
    /// A bare mention with unknown agreement features, third person.
    pub fn new(id: impl Into<String>, exp: ExpType, gf: Gf) -> Self {
        Self {
            id: MentionId::new(id),
            surface: String::new(),
            exp,
            gf,
            gender: Gender::Unknown,
            number: Number::Unknown,
            person: Person::Third,
            sort: None,
            gold_entity: None,
            override_antecedent: None,
        }
    }

    pub fn is_pleonastic(&self) -> bool {
        self.sort.as_deref() == Some(PLEONASTIC_SORT)
    }

    /// Third-person, non-pleonastic zero/overt/possessive pronoun: the
    /// mentions the resolver is responsible for.
    pub fn is_anaphoric(&self) -> bool {
        self.exp.is_pronominal() && self.person == Person::Third && !self.is_pleonastic()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseRecord {
    pub id: ClauseId,
    pub parent: Option<ClauseId>,
    pub relation: Relation,
    pub tense: Tense,
    pub connective: Option<String>,
    pub mentions: Vec<MentionRecord>,
}

impl ClauseRecord {
    pub fn new(id: impl Into<String>, parent: Option<&str>, relation: Relation, tense: Tense) -> Self {
        Self {
            id: ClauseId::new(id),
            parent: parent.map(ClauseId::new),
            relation,
            tense,
            connective: None,
            mentions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CdaSentence {
    pub id: String,
    /// Clauses in surface (file) order.
    pub clauses: Vec<ClauseRecord>,
}

impl CdaSentence {
    pub fn clause(&self, id: &ClauseId) -> Option<&ClauseRecord> {
        self.clauses.iter().find(|c| &c.id == id)
    }

    pub fn mentions(&self) -> impl Iterator<Item = &MentionRecord> {
        self.clauses.iter().flat_map(|c| c.mentions.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CdaDocument {
    pub id: String,
    pub sentences: Vec<CdaSentence>,
}

impl CdaDocument {
    /// All mentions in document order.
    pub fn mentions(&self) -> impl Iterator<Item = &MentionRecord> {
        self.sentences.iter().flat_map(|s| s.mentions())
    }

    pub fn mention(&self, id: &MentionId) -> Option<&MentionRecord> {
        self.mentions().find(|m| &m.id == id)
    }
}
