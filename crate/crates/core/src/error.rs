use std::fmt;

use thiserror::Error;

use crate::model::TaskId;

/// A located problem found while checking an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Field path, e.g. `tasks[3].duration`.
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn join(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl InstanceError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            InstanceError::Invalid(d) => d,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("schedule references unknown task {0}")]
    UnknownTask(TaskId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("infeasible generator config: {0}")]
    Infeasible(String),
    #[error("generated instance failed validation: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimilarityError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("rows have inconsistent widths")]
    Ragged,
    #[error("attribute column {0} has zero mean but non-zero dispersion")]
    DegenerateAttribute(usize),
    #[error("individuals have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("population needs at least 2 individuals, got {0}")]
    PopulationTooSmall(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("order has {got} entries but the instance has {expected} tasks")]
    WrongLength { expected: usize, got: usize },
    #[error("order references unknown task {0}")]
    UnknownTask(TaskId),
    #[error("task {0} appears more than once in the order")]
    Duplicate(TaskId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver config: {0}")]
    Config(String),
    #[error("negative fitness {0} in roulette selection")]
    NegativeFitness(f64),
    #[error("exact search refused: instance has {tasks} tasks, limit is {limit}; use dsga, random or greedy for larger instances")]
    TooLarge { tasks: usize, limit: usize },
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}
