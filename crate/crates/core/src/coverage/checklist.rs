//! Static catalog of the checks attached to zone entry and exit steps.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Interruption,
    Restoration,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Interruption => "interruption",
            Phase::Restoration => "restoration",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "interruption" => Some(Phase::Interruption),
            "restoration" => Some(Phase::Restoration),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistAnnotation {
    pub phase: Phase,
    pub question_id: String,
    pub text: String,
}

pub const INTERRUPTION: [(&str, &str); 4] = [
    ("INT-1", "Is the user informed that the connection was lost (where relevant)?"),
    (
        "INT-2",
        "Is collected data kept in a cache instead of being dropped, and how long can the cache hold it?",
    ),
    (
        "INT-3",
        "Are the parts of the system that send signals or commands to the affected device or module told that it is offline?",
    ),
    (
        "INT-4",
        "Does transactional processing of data or signals stay transactional while the connection is down?",
    ),
];

pub const RESTORATION: [(&str, &str); 5] = [
    ("RES-1", "Is the user or operator told that connectivity is back (where relevant)?"),
    ("RES-2", "Is cached content delivered correctly to the parts of the system that need it?"),
    ("RES-3", "Is the stored data still consistent?"),
    (
        "RES-4",
        "Do cached transactions complete correctly, keeping the order and timing their steps require?",
    ),
    (
        "RES-5",
        "Does performance stay acceptable while the device or module comes back online?",
    ),
];

fn build(phase: Phase, table: &[(&str, &str)]) -> Vec<ChecklistAnnotation> {
    table
        .iter()
        .map(|(id, text)| ChecklistAnnotation {
            phase,
            question_id: (*id).to_owned(),
            text: (*text).to_owned(),
        })
        .collect()
}

pub fn interruption_checks() -> Vec<ChecklistAnnotation> {
    build(Phase::Interruption, &INTERRUPTION)
}

pub fn restoration_checks() -> Vec<ChecklistAnnotation> {
    build(Phase::Restoration, &RESTORATION)
}

/// Looks up a catalog entry by question id.
pub fn lookup(question_id: &str) -> Option<ChecklistAnnotation> {
    INTERRUPTION
        .iter()
        .map(|e| (Phase::Interruption, e))
        .chain(RESTORATION.iter().map(|e| (Phase::Restoration, e)))
        .find(|(_, (id, _))| *id == question_id)
        .map(|(phase, (id, text))| ChecklistAnnotation {
            phase,
            question_id: (*id).to_owned(),
            text: (*text).to_owned(),
        })
}
