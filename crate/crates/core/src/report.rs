//! Verification reports shared by the identity checks and the CLI.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::poly::{Polynomial, TermRecord};
use crate::scalar::Scalar;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(&self) -> bool {
        *self == Status::Pass
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// Outcome of one exact check. `witness` is the difference of the two
/// sides in canonical term order; it is empty exactly when the check passes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub params: Map<String, Value>,
    pub status: Status,
    pub witness: Vec<TermRecord>,
    pub seed: Option<u64>,
    pub millis: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new<C: Scalar>(id: impl Into<String>, status: Status, witness: &Polynomial<C>) -> Self {
        VerificationReport {
            id: id.into(),
            params: Map::new(),
            status,
            witness: witness.term_records(),
            seed: None,
            millis: None,
            notes: Vec::new(),
        }
    }

    /// Pass iff `witness` is zero.
    pub fn from_witness<C: Scalar>(id: impl Into<String>, witness: &Polynomial<C>) -> Self {
        Self::new(id, Status::from_bool(witness.is_zero()), witness)
    }

    /// A check with no polynomial witness (structural facts, solver output).
    pub fn bare(id: impl Into<String>, status: Status) -> Self {
        VerificationReport {
            id: id.into(),
            params: Map::new(),
            status,
            witness: Vec::new(),
            seed: None,
            millis: None,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.millis = Some(start.elapsed().as_millis() as u64);
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }

    /// Fold another report's verdict into this one (used by multi-case checks).
    pub fn absorb(&mut self, other: VerificationReport) {
        if !other.passed() {
            self.status = Status::Fail;
            if self.witness.is_empty() {
                self.witness = other.witness;
            }
            self.note(format!("failing case: {} {}", other.id, Value::Object(other.params)));
        }
    }
}

fn compact_params(params: &Map<String, Value>) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

/// Fixed-width text rendering, one row per report.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let id_w = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let mut out = String::new();
    let _ = writeln!(out, "{:<id_w$}  {:<6}  {:>8}  params", "id", "status", "terms");
    for r in reports {
        let _ = writeln!(out, "{:<id_w$}  {:<6}  {:>8}  {}", r.id, r.status.to_string(), r.witness.len(), compact_params(&r.params));
        for n in &r.notes {
            let _ = writeln!(out, "{:<id_w$}    note: {n}", "");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::poly::{Basis, Monomial};

    #[test]
    fn status_tracks_witness() {
        let zero = Polynomial::<BigInt>::zero(2, Basis::E);
        assert!(VerificationReport::from_witness("x", &zero).passed());
        let w = Polynomial::from_terms(2, Basis::E, [(Monomial::from_exps(&[1u32, 0]), BigInt::from(3))]);
        let r = VerificationReport::from_witness("x", &w).param("n", 2);
        assert!(!r.passed());
        assert_eq!(r.witness.len(), 1);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["witness"][0]["exps"], serde_json::json!([1, 0]));
        assert_eq!(json["witness"][0]["num"], "3");
        assert_eq!(json["millis"], Value::Null);
        assert!(render_table(&[r]).contains("fail"));
    }
}
