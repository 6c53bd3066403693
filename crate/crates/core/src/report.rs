//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::{format_rational, Rational};

/// Version of the JSON layout emitted by the reports and the CLI envelope.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Violated,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Verified
        } else {
            Status::Violated
        }
    }

    pub fn is_verified(self) -> bool {
        self == Status::Verified
    }

    pub fn and(self, other: Status) -> Status {
        Status::from_bool(self.is_verified() && other.is_verified())
    }
}

/// An offending coefficient: which basis component, and its exact value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub component: String,
    pub value: String,
}

impl Witness {
    pub fn new(component: impl Into<String>, value: &Rational) -> Self {
        Self {
            component: component.into(),
            value: format_rational(value),
        }
    }
}

/// One named sub-check of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl SubCheck {
    pub fn new(name: impl Into<String>, ok: bool, witness: Option<Witness>) -> Self {
        Self {
            name: name.into(),
            status: Status::from_bool(ok),
            witness,
        }
    }

    /// Passes iff `witness` is `None`, i.e. the tested vector vanished.
    pub fn vanishing(name: impl Into<String>, witness: Option<Witness>) -> Self {
        let ok = witness.is_none();
        Self::new(name, ok, witness)
    }

    /// Passes iff a nonzero witness was found.
    pub fn nonvanishing(name: impl Into<String>, witness: Option<Witness>) -> Self {
        let ok = witness.is_some();
        Self::new(name, ok, witness)
    }
}

/// Generic algebraic verification result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: BTreeMap<String, String>,
    pub status: Status,
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<SubCheck>,
}

impl VerificationReport {
    /// Status is the conjunction of the sub-checks; the witness is the first
    /// failing sub-check's witness.
    pub fn from_checks(
        check: impl Into<String>,
        parameters: BTreeMap<String, String>,
        checks: Vec<SubCheck>,
    ) -> Self {
        let failing = checks.iter().find(|c| !c.status.is_verified());
        let status = Status::from_bool(failing.is_none());
        let witness = failing.and_then(|c| {
            c.witness.clone().or_else(|| {
                Some(Witness {
                    component: c.name.clone(),
                    value: "0".into(),
                })
            })
        });
        Self {
            check: check.into(),
            parameters,
            status,
            witness,
            checks,
        }
    }
}

/// Helper for building `parameters` maps.
pub fn params<const N: usize>(entries: [(&str, String); N]) -> BTreeMap<String, String> {
    entries
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
