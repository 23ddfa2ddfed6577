use serde::Serialize;

use super::corpus::CorpusEntry;
use super::epigraph::oracle_epigraph_strict_convexity;
use crate::analysis::{line_restriction_verdict, main_theorem_verdict, ConditionId, Verdict};
use crate::{Status, Tolerances};

/// Sample sizes shared by the three engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budget {
    pub k: usize,
    pub lines: usize,
    pub trials: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { k: 1000, lines: 64, trials: 2000 }
    }
}

/// The three engines' verdicts on one entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckRow {
    pub name: String,
    pub main_theorem: Status,
    pub lines: Status,
    pub oracle: Status,
    /// Conditions refuted by the analytic engine.
    pub failing: Vec<ConditionId>,
    pub expected: Status,
    pub expected_failing: Option<ConditionId>,
    /// No two decisive verdicts differ.
    pub agreement: bool,
    /// Every decisive verdict matches the expectation, at least one is
    /// decisive, and the expected failing condition is among the refuted ones.
    pub expectation_met: bool,
    pub error: Option<String>,
}

impl CrosscheckRow {
    pub fn statuses(&self) -> [Status; 3] {
        [self.main_theorem, self.lines, self.oracle]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub rows: Vec<CrosscheckRow>,
    pub seed: u64,
    pub budget: Budget,
}

impl CrosscheckReport {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| !r.agreement).count()
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| !r.expectation_met).count()
    }

    pub fn passed(&self) -> bool {
        self.disagreements() == 0 && self.mismatches() == 0
    }
}

/// All three engines on one entry.
pub fn run_engines(entry: &CorpusEntry, budget: Budget, seed: u64, tol: &Tolerances) -> [Option<Verdict>; 3] {
    let spec = &entry.spec;
    [
        main_theorem_verdict(spec, budget.k, seed, tol).ok(),
        line_restriction_verdict(spec, budget.lines, budget.k, seed, tol).ok(),
        oracle_epigraph_strict_convexity(spec, budget.trials, seed, tol).ok(),
    ]
}

fn row(entry: &CorpusEntry, verdicts: [Option<Verdict>; 3]) -> CrosscheckRow {
    let status = |v: &Option<Verdict>| v.as_ref().map_or(Status::Inconclusive, |v| v.overall);
    let [main, lines, oracle] = &verdicts;
    let statuses = [status(main), status(lines), status(oracle)];
    let decisive: Vec<Status> = statuses.iter().copied().filter(|s| s.is_decisive()).collect();
    let agreement = decisive.windows(2).all(|w| w[0] == w[1]);
    let failing = main.as_ref().map(Verdict::failing).unwrap_or_default();
    let failing_ok = match (entry.failing, statuses[0]) {
        (Some(id), Status::Refuted) => failing.contains(&id),
        _ => true,
    };
    let expectation_met = if entry.expected == Status::Inconclusive {
        decisive.is_empty()
    } else {
        !decisive.is_empty() && decisive.iter().all(|&s| s == entry.expected) && failing_ok
    };
    let error = verdicts.iter().any(Option::is_none).then(|| "domain sampling failed".to_string());
    CrosscheckRow {
        name: entry.name.clone(),
        main_theorem: statuses[0],
        lines: statuses[1],
        oracle: statuses[2],
        failing,
        expected: entry.expected,
        expected_failing: entry.failing,
        agreement,
        expectation_met,
        error,
    }
}

/// Run every engine on every entry and tabulate agreement.
pub fn crosscheck(corpus: &[CorpusEntry], budget: Budget, seed: u64, tol: &Tolerances) -> CrosscheckReport {
    let rows = corpus.iter().map(|e| row(e, run_engines(e, budget, seed, tol))).collect();
    CrosscheckReport { rows, seed, budget }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::parse_corpus;

    #[test]
    fn single_entries_agree_with_expectations() {
        let tol = Tolerances::default();
        let text = "\
example | 1/((1-x^2)*(1-y^2)) | 2 | x^2-1; y^2-1 | -1:1,-1:1 | certified | - | published
disc | x^2+y^2 | 2 | x^2+y^2-1 | -1:1,-1:1 | refuted | boundary_blowup | published";
        let corpus = parse_corpus(text, &tol).unwrap();
        let budget = Budget { k: 300, lines: 16, trials: 600 };
        let report = crosscheck(&corpus, budget, 42, &tol);
        assert_eq!(report.rows[0].statuses(), [Status::Certified; 3]);
        assert_eq!(report.rows[1].statuses(), [Status::Refuted; 3]);
        assert!(report.passed());
    }

    #[test]
    fn wrong_expectation_is_a_mismatch() {
        let tol = Tolerances::default();
        let corpus = parse_corpus("p | x^2 | 1 | | -3:3 | refuted | - | elementary", &tol).unwrap();
        let report = crosscheck(&corpus, Budget { k: 200, lines: 8, trials: 300 }, 1, &tol);
        assert_eq!(report.disagreements(), 0);
        assert_eq!(report.mismatches(), 1);
        assert!(!report.passed());
    }
}
