use serde::{Deserialize, Serialize};

/// Direction of a certified inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≥ rhs`
    AtLeast,
    /// `lhs ≤ rhs`
    AtMost,
}

/// One instance of a named inequality.
///
/// `margin` is the slack in the direction of the inequality, so a negative
/// margin means the raw comparison failed; `pass` applies the check's own
/// relative tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
    pub extremal: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    /// `lhs ≥ rhs (1 - rtol)`; extremal when `|lhs - rhs| ≤ extremal_rtol |rhs|`.
    pub fn at_least(name: &str, lhs: f64, rhs: f64, rtol: f64, extremal_rtol: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            relation: Relation::AtLeast,
            lhs,
            rhs,
            margin: lhs - rhs,
            pass: lhs >= rhs * (1.0 - rtol),
            extremal: (lhs - rhs).abs() <= extremal_rtol * rhs.abs(),
            notes: Vec::new(),
        }
    }

    /// `lhs ≤ rhs (1 + rtol)`.
    pub fn at_most(name: &str, lhs: f64, rhs: f64, rtol: f64, extremal_rtol: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            relation: Relation::AtMost,
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs <= rhs * (1.0 + rtol),
            extremal: (lhs - rhs).abs() <= extremal_rtol * rhs.abs(),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}
