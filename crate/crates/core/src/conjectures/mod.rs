//! Checkers for the degree, character, genericity, torsion-shape and Hard
//! Lefschetz statements about Braden–MacPherson sheaves, and a sampler for
//! the generic-maps lemma.

mod checks;
mod genmaps;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use checks::{
    check_dcon, check_klcon, check_pcon, check_pcon_all, check_pdimone_hl, shift_lemma_check,
    CenterConvention, LefschetzSurvey,
};
pub use genmaps::{genmaps_sample, GenericMapProblem, GenmapsOutcome, GenmapsParams, GenmapsReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conjecture {
    Dcon,
    Klcon,
    Pcon,
    Pdimone,
    Hl,
    Genmaps,
}

impl Conjecture {
    pub fn name(self) -> &'static str {
        match self {
            Conjecture::Dcon => "dcon",
            Conjecture::Klcon => "klcon",
            Conjecture::Pcon => "pcon",
            Conjecture::Pdimone => "pdimone",
            Conjecture::Hl => "hl",
            Conjecture::Genmaps => "genmaps",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    /// No counterexample in any degree up to the recorded cap.
    HoldsUpToCap,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fails
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::HoldsUpToCap => "holds-up-to-cap",
        }
    }
}

/// One verdict on one `(x, y)` pair. A failing report always carries a
/// witness that can be reproduced from `params`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub conjecture: Conjecture,
    pub x: Option<String>,
    pub y: Option<String>,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub witness: Option<Value>,
}

impl ConjectureReport {
    pub(crate) fn new(conjecture: Conjecture, x: Option<String>, y: Option<String>) -> Self {
        ConjectureReport {
            conjecture,
            x,
            y,
            params: BTreeMap::new(),
            verdict: Verdict::Holds,
            witness: None,
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub(crate) fn finish(mut self, verdict: Verdict, witness: Option<Value>) -> Self {
        debug_assert!(!verdict.is_fail() || witness.is_some());
        self.verdict = verdict;
        self.witness = if verdict.is_fail() { witness } else { None };
        self
    }

    pub fn passed(&self) -> bool {
        !self.verdict.is_fail()
    }
}

/// Whether any report in the list fails.
pub fn any_fails<'a>(reports: impl IntoIterator<Item = &'a ConjectureReport>) -> bool {
    reports.into_iter().any(|r| r.verdict.is_fail())
}
