use std::fmt;

use serde::Serialize;

/// Tri-state outcome shared by every probe and verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Refuted,
    Inconclusive,
}

impl Status {
    /// Combine two statuses for a conjunction of conditions: any refutation
    /// wins, then any inconclusive result.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Refuted, _) | (_, Status::Refuted) => Status::Refuted,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Certified,
        }
    }

    pub fn all<I: IntoIterator<Item = Status>>(items: I) -> Status {
        items.into_iter().fold(Status::Certified, Status::and)
    }

    pub fn is_decisive(self) -> bool {
        self != Status::Inconclusive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Refuted => "refuted",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_prefers_refutation() {
        use Status::*;
        assert_eq!(Status::all([Certified, Inconclusive, Refuted]), Refuted);
        assert_eq!(Status::all([Certified, Inconclusive]), Inconclusive);
        assert_eq!(Status::all([Certified, Certified]), Certified);
        assert_eq!(Status::all([]), Certified);
    }
}
