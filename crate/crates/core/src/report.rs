//! Verdict reports produced by every identity check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::FieldElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Error,
    /// Sub-verdict whose precondition did not hold, so nothing was checked.
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedElement {
    pub name: String,
    pub value: FieldElement,
}

impl NamedElement {
    pub fn new(name: &str, value: &FieldElement) -> Self {
        NamedElement {
            name: name.to_string(),
            value: value.clone(),
        }
    }
}

/// First failing instance of a checked identity, with both sides in canonical form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub inputs: Vec<NamedElement>,
    pub lhs: FieldElement,
    pub rhs: FieldElement,
}

impl Witness {
    pub fn input(&self, name: &str) -> Option<&FieldElement> {
        self.inputs.iter().find(|n| n.name == name).map(|n| &n.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub check: String,
    pub anchor: String,
    pub samples_tested: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub assumptions: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_verdicts: Vec<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerdictReport {
    pub fn new(check: &str, anchor: &str) -> Self {
        VerdictReport {
            check: check.to_string(),
            anchor: anchor.to_string(),
            samples_tested: 0,
            status: Status::Pass,
            witness: None,
            assumptions: Vec::new(),
            notes: Vec::new(),
            values: BTreeMap::new(),
            sub_verdicts: Vec::new(),
            error: None,
        }
    }

    /// Report for a check that could not be evaluated.
    pub fn from_error(check: &str, anchor: &str, err: &Error) -> Self {
        let mut r = Self::new(check, anchor);
        r.status = Status::Error;
        r.error = Some(err.to_string());
        r
    }

    pub fn skipped(check: &str, anchor: &str, reason: &str) -> Self {
        let mut r = Self::new(check, anchor);
        r.status = Status::Skipped;
        r.notes.push(reason.to_string());
        r
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn with_value(mut self, key: &str, value: impl ToString) -> Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }

    pub fn with_assumptions(mut self, assumptions: &[String]) -> Self {
        for a in assumptions {
            if !self.assumptions.contains(a) {
                self.assumptions.push(a.clone());
            }
        }
        self
    }

    /// Attaches sub-verdicts; the overall status becomes the worst of all parts.
    pub fn with_sub_verdicts(mut self, subs: Vec<VerdictReport>) -> Self {
        for s in &subs {
            let a = s.assumptions.clone();
            self = self.with_assumptions(&a);
            self.status = match (self.status, s.status) {
                (Status::Error, _) | (_, Status::Error) => Status::Error,
                (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
                (st, _) => st,
            };
            if self.witness.is_none() && s.witness.is_some() {
                self.witness = s.witness.clone();
            }
            self.samples_tested = self.samples_tested.max(s.samples_tested);
        }
        self.sub_verdicts.extend(subs);
        self
    }

    pub fn sub(&self, check: &str) -> Option<&VerdictReport> {
        self.sub_verdicts.iter().find(|s| s.check == check)
    }
}

/// Evaluates `sides` on each input tuple in order, stopping at the first
/// tuple where the two sides differ.
pub(crate) fn check_identity<F>(
    check: &str,
    anchor: &str,
    tuples: &[Vec<NamedElement>],
    mut sides: F,
) -> Result<VerdictReport>
where
    F: FnMut(&[FieldElement]) -> Result<(FieldElement, FieldElement)>,
{
    let mut report = VerdictReport::new(check, anchor);
    if let Some(first) = tuples.first().and_then(|t| t.first()) {
        report = report.with_assumptions(first.value.tower().assumptions());
    }
    for tuple in tuples {
        let args: Vec<FieldElement> = tuple.iter().map(|n| n.value.clone()).collect();
        let (lhs, rhs) = sides(&args)?;
        report.samples_tested += 1;
        if lhs != rhs {
            report.status = Status::Fail;
            report.witness = Some(Witness {
                inputs: tuple.clone(),
                lhs,
                rhs,
            });
            return Ok(report);
        }
    }
    Ok(report)
}
