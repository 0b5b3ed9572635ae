use thiserror::Error;

use crate::report::{CheckReport, ValidationReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label {0:?}: expected a non-empty string over [A-Za-z0-9_]")]
    InvalidLabel(String),
    #[error("invalid event id {0:?}: expected a non-empty string over [A-Za-z0-9_+@.]")]
    InvalidEventId(String),
    #[error("duplicate event {0}")]
    DuplicateEvent(String),
    #[error("unknown event {0}")]
    UnknownEvent(String),
    #[error("too many events: {0} (limit {limit})", limit = crate::poset::MAX_EVENTS)]
    TooManyEvents(usize),
    #[error("configuration {0} is not in the family")]
    ConfigNotInFamily(String),
    #[error("map is not total: {0}")]
    NonTotalMap(String),
    #[error("not a morphism\n{0}")]
    NotAMorphism(CheckReport),
    #[error("maps are not foldings\n{0}")]
    NotFoldings(CheckReport),
    #[error("wrong class: expected {expected}, found {found}")]
    WrongClass { expected: String, found: String },
    #[error("label clash in class {0}")]
    LabelClash(String),
    #[error("quotient is not a valid event structure\n{0}")]
    InvalidResult(ValidationReport),
    #[error("non-executable events: {}", .0.join(", "))]
    NonExecutable(Vec<String>),
    #[error("bisimulation is not hereditary")]
    NotHereditary,
    #[error("history image {0} is not a history of the target")]
    ImageNotAHistory(String),
    #[error("not a partition: {0}")]
    InvalidPartition(String),
    #[error("triple universe has more than {cap} triples")]
    UniverseCap { cap: usize },
    #[error("line {line}, column {column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: undeclared event {id}")]
    UndeclaredEvent { line: usize, id: String },
    #[error("line {line}: duplicate event {id}")]
    DuplicateDeclaration { line: usize, id: String },
    #[error("line {line}: statement {keyword:?} is not allowed in a {kind} file")]
    KindMismatch { line: usize, keyword: String, kind: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
