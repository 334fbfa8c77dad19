use std::fmt;

/// Why a validation could not produce a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailureCode {
    RecursiveShapesGraph,
    IllFormedShapesGraph,
    UnsupportedEntailment,
    ResourceLimit,
}

impl fmt::Display for FailureCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureCode::RecursiveShapesGraph => "RecursiveShapesGraph",
            FailureCode::IllFormedShapesGraph => "IllFormedShapesGraph",
            FailureCode::UnsupportedEntailment => "UnsupportedEntailment",
            FailureCode::ResourceLimit => "ResourceLimit",
        })
    }
}

/// A processor-level failure. It is never turned into a validation report.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{code}: {detail}")]
pub struct Failure {
    pub code: FailureCode,
    pub detail: String,
    /// One line per underlying problem, each starting with a rule id.
    pub diagnostics: Vec<String>,
}

impl Failure {
    pub fn new(code: FailureCode, detail: impl Into<String>) -> Self {
        Failure { code, detail: detail.into(), diagnostics: Vec::new() }
    }

    pub fn with_diagnostics(mut self, diagnostics: Vec<String>) -> Self {
        self.diagnostics = diagnostics;
        self
    }
}
