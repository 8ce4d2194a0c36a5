//! Document formats: process models (JSON, XML), suite exports (JSON, XML,
//! CSV) and Graphviz DOT rendering.

mod dot;
mod model_doc;
mod suite_doc;
mod xml;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dot::render_dot;
pub use model_doc::{emit_model, emit_model_document, parse_model, parse_model_document, ModelDocument};
pub use suite_doc::{export_suite, import_suite, SuiteExport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Xml,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Xml => "xml",
            Format::Csv => "csv",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Some(Format::Json),
            "xml" => Some(Format::Xml),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }

    /// Guesses the format from a file name extension.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(Format::parse)
    }

    pub fn mime(self) -> &'static str {
        match self {
            Format::Json => "application/json",
            Format::Xml => "application/xml",
            Format::Csv => "text/csv",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    /// Text is not well-formed for its format.
    #[error("PARSE_ERROR at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    /// Well-formed text that does not match the document schema.
    #[error("SCHEMA_ERROR at {locus}: {message}")]
    Schema { locus: String, message: String },
    #[error("UNSUPPORTED_FORMAT: {0}")]
    Unsupported(String),
}

impl IoError {
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Parse { .. } => "PARSE_ERROR",
            IoError::Schema { .. } => "SCHEMA_ERROR",
            IoError::Unsupported(_) => "UNSUPPORTED_FORMAT",
        }
    }

    pub(crate) fn schema(locus: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Schema {
            locus: locus.into(),
            message: message.into(),
        }
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match err.classify() {
            Category::Data => IoError::Schema {
                locus: format!("line {}, column {}", err.line(), err.column()),
                message: strip_position(&err.to_string()),
            },
            _ => IoError::Parse {
                line: err.line(),
                column: err.column(),
                message: strip_position(&err.to_string()),
            },
        }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_owned(),
        None => msg.to_owned(),
    }
}

pub(crate) fn check_schema_version(found: &str) -> Result<(), IoError> {
    if found == crate::SCHEMA_VERSION {
        Ok(())
    } else {
        Err(IoError::schema(
            "schema_version",
            format!("unsupported schema_version '{found}', expected '{}'", crate::SCHEMA_VERSION),
        ))
    }
}
