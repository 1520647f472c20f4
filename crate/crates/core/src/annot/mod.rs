//! The CDA line format: one record per line, `#DOC`, `#SENT`, `#CL`, `M`.

mod parse;
mod types;
mod write;

pub use parse::{parse_cda, parse_corpus, Corpus, ParseError, ParseErrorKind, ParseOptions, Warning};
pub use types::*;
pub use write::{serialize_cda, serialize_corpus};
