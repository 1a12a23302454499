//! Three-valued analysis outcomes with an explicit assumption audit.

use serde::Serialize;
use std::fmt;

/// Result of a certified check.
///
/// `RefutedAt` always carries a concrete index whose violation can be
/// re-checked in isolation. `Inconclusive` is not a negative result; it means
/// the finite computation decided nothing at the attempted bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CertifiedTrue,
    RefutedAt(i64),
    Inconclusive(String),
}

/// A hypothesis that was only verified on a finite window (or taken on
/// trust), listed so reports never silently extend finite checks to limits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumedFact {
    pub fact: String,
    /// Inclusive index range on which the fact was exactly verified, if any.
    pub checked: Option<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub assumed: Vec<AssumedFact>,
}

impl Verdict {
    pub fn certified() -> Self {
        Verdict { status: Status::CertifiedTrue, assumed: Vec::new() }
    }

    pub fn refuted_at(n: i64) -> Self {
        Verdict { status: Status::RefutedAt(n), assumed: Vec::new() }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict { status: Status::Inconclusive(reason.into()), assumed: Vec::new() }
    }

    pub fn with_assumed(mut self, assumed: Vec<AssumedFact>) -> Self {
        self.assumed = assumed;
        self
    }

    pub fn push_assumed(&mut self, fact: AssumedFact) {
        self.assumed.push(fact);
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::CertifiedTrue
    }

    pub fn refutation_index(&self) -> Option<i64> {
        match self.status {
            Status::RefutedAt(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::CertifiedTrue => write!(f, "certified-true"),
            Status::RefutedAt(n) => write!(f, "refuted-at({n})"),
            Status::Inconclusive(r) => write!(f, "inconclusive: {r}"),
        }
    }
}
