use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::ConditionId;
use crate::model::{DomainError, FunctionSpec};
use crate::{Status, Tolerances};

const BUILTIN: &str = include_str!("../../corpus/builtin.corpus");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Published,
    Elementary,
    Computed,
}

impl Source {
    fn parse(s: &str) -> Option<Source> {
        match s {
            "published" => Some(Source::Published),
            "elementary" => Some(Source::Elementary),
            "computed" => Some(Source::Computed),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Published => "published",
            Source::Elementary => "elementary",
            Source::Computed => "computed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub function: String,
    pub constraints: String,
    pub bounds: String,
    pub spec: FunctionSpec,
    pub expected: Status,
    pub failing: Option<ConditionId>,
    pub source: Source,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("corpus is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("line {line}: {source}")]
    Spec {
        line: usize,
        #[source]
        source: DomainError,
    },
}

fn parse_status(s: &str) -> Option<Status> {
    match s {
        "certified" => Some(Status::Certified),
        "refuted" => Some(Status::Refuted),
        "inconclusive" => Some(Status::Inconclusive),
        _ => None,
    }
}

/// Parse the `|`-separated corpus format (see `corpus/builtin.corpus`).
pub fn parse_corpus(text: &str, tol: &Tolerances) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
        let err = |message: String| CorpusError::Record { line, message };
        let [name, function, dim, constraints, bounds, expected, failing, source] = fields[..] else {
            return Err(err(format!("expected 8 fields, found {}", fields.len())));
        };
        if name.is_empty() {
            return Err(err("empty name".into()));
        }
        let dim: usize = dim.parse().map_err(|_| err(format!("bad dimension `{dim}`")))?;
        let expected = parse_status(expected).ok_or_else(|| err(format!("unknown verdict `{expected}`")))?;
        let failing = match failing {
            "-" | "" => None,
            s => Some(ConditionId::from_name(s).ok_or_else(|| err(format!("unknown condition `{s}`")))?),
        };
        let source = Source::parse(source).ok_or_else(|| err(format!("unknown source `{source}`")))?;
        let spec = FunctionSpec::parse(function, dim, constraints, bounds, tol)
            .map_err(|source| CorpusError::Spec { line, source })?;
        out.push(CorpusEntry {
            name: name.to_string(),
            function: function.to_string(),
            constraints: constraints.to_string(),
            bounds: bounds.to_string(),
            spec,
            expected,
            failing,
            source,
        });
    }
    if out.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(out)
}

/// The thirty built-in entries.
pub fn builtin_corpus(tol: &Tolerances) -> Vec<CorpusEntry> {
    parse_corpus(BUILTIN, tol).expect("built-in corpus parses")
}

impl fmt::Display for CorpusEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: f = {} on {{{}}} within {}", self.name, self.function, self.constraints, self.bounds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_thirty_distinct_entries() {
        let c = builtin_corpus(&Tolerances::default());
        assert_eq!(c.len(), 30);
        let mut names: Vec<_> = c.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 30);
        for id in ConditionId::MAIN {
            assert!(c.iter().filter(|e| e.failing == Some(id)).count() >= 2, "{id} covered twice");
        }
    }

    #[test]
    fn record_errors() {
        let tol = Tolerances::default();
        assert_eq!(parse_corpus("# nothing\n\n", &tol), Err(CorpusError::Empty));
        assert!(matches!(parse_corpus("a | x | 1", &tol), Err(CorpusError::Record { line: 1, .. })));
        assert!(matches!(
            parse_corpus("a | x | 1 | | -1:1 | maybe | - | computed", &tol),
            Err(CorpusError::Record { .. })
        ));
        assert!(matches!(
            parse_corpus("\na | x + q | 1 | | -1:1 | refuted | - | computed", &tol),
            Err(CorpusError::Spec { line: 2, .. })
        ));
        let ok = parse_corpus("a | x^2 | 1 | | -1:1 | certified | - | elementary", &tol).unwrap();
        assert_eq!(ok[0].expected, Status::Certified);
    }
}
