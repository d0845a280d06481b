//! The JSON query document: a layer stack plus render settings, as stored
//! on disk and sent over the wire.
//!
//! ```json
//! {
//!   "dataset": "runs.jsonl",
//!   "layers": [{
//!     "curve": {"preset": {"name": "pulse", "center": 0.5, "width": 0.4}},
//!     "scale": {"stops": [[0, [0, 0, 0, 0]], [1, [1, 1, 1, 1]]]},
//!     "parameter": "district.3.favorability",
//!     "blend": "add"
//!   }],
//!   "render": {"width": 960, "height": 540, "n_frames": 60, "fps": 30}
//! }
//! ```

mod document;
mod parse;
mod run;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use document::{serialize_query, CurveSpec, LayerSpec, QueryDocument};
pub use parse::{parse_query, validate_against};
pub use run::{evaluate_document, render_document, render_document_still, Run, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A problem found in a document, located by a JSON pointer into it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub path: String,
}

impl Diagnostic {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), path: path.into() }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, message: message.into(), path: path.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let path = if self.path.is_empty() { "/" } else { &self.path };
        write!(f, "{sev} at {path}: {}", self.message)
    }
}

/// A rejected document; holds every diagnostic found, errors and warnings.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct QueryError {
    pub diagnostics: Vec<Diagnostic>,
}

impl QueryError {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.errors().map(|d| d.to_string()).collect();
        f.write_str(&msgs.join("; "))
    }
}
